#pragma once

// Expectation values and uncertainty relations of the dynamical time operator
//
//     T = alpha.r / c + beta tau0
//
// on spinor fields, natural units (hbar = c = m0 = 1). Position-type
// operators act in the position view, momentum-type operators mode by mode.

#include <complex>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diractime/spinor_field.hpp"

namespace diractime {

/// tau0 for m0 c^2 = 1 in natural units.
inline constexpr double kNaturalDeBroglie = 2.0 * std::numbers::pi;

/// Tolerance on | ||psi|| - 1 | accepted as "normalized".
inline constexpr double kNormalizationTolerance = 1e-10;

using Potential = std::function<double(const Eigen::Vector3d&)>;

struct ExpectationReport {
    Eigen::Vector3d r_mean = Eigen::Vector3d::Zero();
    Eigen::Vector3d p_mean = Eigen::Vector3d::Zero();
    double r2_mean = 0.0;  ///< <r^2> summed over axes
    double p2_mean = 0.0;
    double h_mean = 0.0;
    double h2_mean = 0.0;
    double abs_h_mean = 0.0;  ///< <E(k)>, the mean energy magnitude
    double beta_mean = 0.0;
    Eigen::Vector3d alpha_mean = Eigen::Vector3d::Zero();
    double alpha_r_mean = 0.0;
    double t_mean = 0.0;
    double t2_mean = 0.0;
    double spin_orbit_mean = 0.0;  ///< <s.l> / hbar^2; 0 on 1D grids
    double beta_k_mean = 0.0;      ///< <beta K> = 1 + 2 <s.l>
    Complex commutator_th{};      ///< <[T, H]>, direct composition
    double tau0 = kNaturalDeBroglie;
};

struct UncertaintyReport {
    double delta_t = 0.0;
    double delta_h = 0.0;
    double delta_r = 0.0;
    double delta_p = 0.0;
    double product_th = 0.0;
    double robertson_bound = 0.0;  ///< |<[T, H]>| / 2
    double spin_orbit_bound = 0.0;      ///< (3/2) |1 + (4/3) <s.l>|
    std::optional<double> mt_time;  ///< needs a time series; see mt_from_series
    bool satisfied_robertson = false;

    /// (dT)^2 - [(dr)^2 + tau0^2 (1 - <beta>^2)], divided by (dT)^2.
    double spherical_dt_residual = 0.0;
    /// (dH)^2 - [(dp)^2 + (1 - <beta>^2)], divided by (dH)^2.
    double spherical_dh_residual = 0.0;
    /// <alpha.r> / (dr), the cross term the spherical decomposition drops.
    double alpha_r_over_delta_r = 0.0;
};

/// Throws ValidationError unless | ||f|| - 1 | <= kNormalizationTolerance.
void require_normalized(const SpinorField& f, const char* context);

ExpectationReport expect_all(const SpinorField& f, double tau0 = kNaturalDeBroglie);

/// (alpha.r + beta tau0) psi, unnormalized. Checks localization.
SpinorField time_operator_apply(const SpinorField& f, double tau0 = kNaturalDeBroglie);

/// V(r) psi in the position view. Rejects non-finite V where psi is nonzero.
SpinorField apply_potential(const SpinorField& f, const Potential& v);

/// <psi|T H psi> - <psi|H T psi>.
Complex commutator_th_direct(const SpinorField& f, double tau0 = kNaturalDeBroglie);

/// i{(d - 2) + 2<beta K>} + 2<beta (tau0 H - T)> with K = beta(2 s.l + 1).
/// For d = 3 this is exactly i<I + 2 beta K> + 2<beta(tau0 H - m0 c^2 T)>;
/// on 1D grids sum_i alpha_i^2 = 1 instead of 3, hence the (d - 2) term.
Complex commutator_th_closed_form(const SpinorField& f, double tau0 = kNaturalDeBroglie);

/// <psi|[T, V] psi>; vanishes for any multiplicative potential.
Complex commutator_tv(const SpinorField& f, const Potential& v, double tau0 = kNaturalDeBroglie);

/// <Sigma.(r x p)> / 2 = <s.l> / hbar^2. Three-dimensional grids only.
double spin_orbit_expect(const SpinorField& f);

/// Sigma.L psi, three-dimensional grids only.
SpinorField spin_orbit_apply(const SpinorField& f);

UncertaintyReport uncertainty_report(const SpinorField& f, double tau0 = kNaturalDeBroglie);
UncertaintyReport uncertainty_report(const ExpectationReport& e);

/// tau0 = h / (m0 c^2) with h = 2 pi (natural units).
double de_broglie_period(double mass_energy);
/// tau0 in seconds for a rest energy in joules.
double de_broglie_period_si(double mass_energy_joule);

/// -z / sqrt(r^2 + a^2); a = 0 gives the bare Coulomb potential.
Potential softened_coulomb(double z, double softening = 1.0);

// Flat serialization. Column order is fixed:
//   r_x,r_y,r_z,p_x,p_y,p_z,r2,p2,h,h2,abs_h,beta,alpha_r,t,t2,spin_orbit,beta_k,
//   comm_th_re,comm_th_im
std::vector<std::string> expectation_csv_header();
std::vector<std::string> expectation_csv_row(const ExpectationReport& e);
//   delta_t,delta_h,delta_r,delta_p,product_th,robertson_bound,spin_orbit_bound,mt_time,
//   satisfied_robertson,spherical_dt_residual,spherical_dh_residual,alpha_r_over_delta_r
std::vector<std::string> uncertainty_csv_header();
std::vector<std::string> uncertainty_csv_row(const UncertaintyReport& u);

void write_key_values(std::ostream& out, const ExpectationReport& e);
void write_key_values(std::ostream& out, const UncertaintyReport& u);

}  // namespace diractime
