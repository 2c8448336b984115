#include "diractime/observables.hpp"

#include <array>
#include <cmath>
#include <iostream>

#include "diractime/dirac_core.hpp"
#include "diractime/errors.hpp"
#include "diractime/format.hpp"
#include "diractime/numeric.hpp"
#include "diractime/parallel.hpp"
#include "diractime/units.hpp"
#include "diractime/wavepacket.hpp"

namespace diractime {

namespace {

using Matrix4 = Matrix4c<double>;

Matrix4 time_operator_matrix(const Eigen::Vector3d& r, double tau0, int dim) {
    const auto& d = dirac_matrices<double>();
    Matrix4 m = tau0 * d.beta;
    for (int a = 0; a < dim; ++a) m += r[a] * d.alpha[a];
    return m;
}

SpinorArray apply_local(const SpinorField& f,
                        const std::function<Matrix4(const Eigen::Vector3d&)>& fn) {
    const GridSpec& grid = f.grid();
    const SpinorArray& in = f.position_view();
    SpinorArray out(4, in.cols());
    parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            out.col(s).noalias() = fn(grid.site_position(s)) * in.col(s);
        }
    });
    return out;
}

double clamped_variance(double second, double first_squared, const char* what) {
    const double var = second - first_squared;
    if (var < 0.0) {
        if (var < -1e-12 * std::max(1.0, std::abs(second))) {
            std::clog << "observables: warning: negative variance " << format_double(var)
                      << " for " << what << " clamped to 0\n";
        }
        return 0.0;
    }
    return var;
}

// Multiplies each momentum mode by k_axis and returns the position view.
SpinorArray momentum_component_in_position(const SpinorField& f, int axis) {
    const GridSpec& grid = f.grid();
    SpinorArray pk = f.momentum_view();
    for (std::size_t s = 0; s < grid.size(); ++s) {
        pk.col(s) *= grid.site_momentum(s)[axis];
    }
    return momentum_to_position(grid, pk);
}

}  // namespace

void require_normalized(const SpinorField& f, const char* context) {
    const double norm = f.norm();
    if (!(std::abs(norm - 1.0) <= kNormalizationTolerance)) {
        throw ValidationError(std::string(context) + ": field is not normalized (norm " +
                              format_double(norm) + ")");
    }
}

SpinorField time_operator_apply(const SpinorField& f, double tau0) {
    const SpinorField g = to_position(f);
    check_localization(g, "observables");
    const int dim = g.grid().dim();
    return SpinorField::from_position(
        g.grid(), apply_local(g, [&](const Eigen::Vector3d& r) {
            return time_operator_matrix(r, tau0, dim);
        }));
}

SpinorField apply_potential(const SpinorField& f, const Potential& v) {
    const SpinorField g = to_position(f);
    const GridSpec& grid = g.grid();
    const SpinorArray& in = g.position_view();
    SpinorArray out(4, in.cols());
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const double value = v(grid.site_position(s));
        if (!std::isfinite(value)) {
            if (in.col(s).squaredNorm() > 0.0) {
                throw ValidationError(
                    "observables: potential is singular on the support of the field");
            }
            out.col(s).setZero();
            continue;
        }
        out.col(s) = value * in.col(s);
    }
    return SpinorField::from_position(grid, std::move(out));
}

SpinorField spin_orbit_apply(const SpinorField& f) {
    const GridSpec& grid = f.grid();
    if (grid.dim() != 3) {
        throw UnsupportedDimensionError(
            "observables: spin-orbit coupling needs a 3D grid (no orbital angular momentum in 1D)");
    }
    const SpinorField g = to_position(f);
    check_localization(g, "observables");
    std::array<SpinorArray, 3> p;
    for (int a = 0; a < 3; ++a) p[a] = momentum_component_in_position(g, a);

    const auto& d = dirac_matrices<double>();
    SpinorArray out(4, static_cast<Eigen::Index>(grid.size()));
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const Eigen::Vector3d r = grid.site_position(s);
        const Spinor lx = r[1] * p[2].col(s) - r[2] * p[1].col(s);
        const Spinor ly = r[2] * p[0].col(s) - r[0] * p[2].col(s);
        const Spinor lz = r[0] * p[1].col(s) - r[1] * p[0].col(s);
        out.col(s) = d.sigma[0] * lx + d.sigma[1] * ly + d.sigma[2] * lz;
    }
    return SpinorField::from_position(grid, std::move(out));
}

double spin_orbit_expect(const SpinorField& f) {
    const SpinorField g = to_position(f);
    const SpinorField so = spin_orbit_apply(g);
    return 0.5 * inner_product(g.position_view(), so.position_view()).real() /
           squared_norm(g.position_view());
}

Complex commutator_th_direct(const SpinorField& f, double tau0) {
    require_normalized(f, "observables");
    const SpinorField th = time_operator_apply(apply_hamiltonian(f), tau0);
    const SpinorField ht = apply_hamiltonian(time_operator_apply(f, tau0));
    return inner_product(f.momentum_view(), th.momentum_view()) -
           inner_product(f.momentum_view(), ht.momentum_view());
}

Complex commutator_th_closed_form(const SpinorField& f, double tau0) {
    require_normalized(f, "observables");
    const GridSpec& grid = f.grid();
    const auto& d = dirac_matrices<double>();
    const double spin_orbit = grid.dim() == 3 ? spin_orbit_expect(f) : 0.0;
    const double beta_k = 1.0 + 2.0 * spin_orbit;

    // <beta H> mode-wise, <beta T> site-wise.
    const SpinorField h = apply_hamiltonian(f);
    SpinorArray beta_h = h.momentum_view();
    for (Eigen::Index s = 0; s < beta_h.cols(); ++s) beta_h.col(s) = d.beta * beta_h.col(s);
    const SpinorField g = to_position(f);
    const SpinorField t = time_operator_apply(g, tau0);
    SpinorArray beta_t = t.position_view();
    for (Eigen::Index s = 0; s < beta_t.cols(); ++s) beta_t.col(s) = d.beta * beta_t.col(s);

    const Complex bh = inner_product(f.momentum_view(), beta_h);
    const Complex bt = inner_product(g.position_view(), beta_t);
    const Complex i(0.0, 1.0);
    return i * (static_cast<double>(grid.dim() - 2) + 2.0 * beta_k) + 2.0 * (tau0 * bh - bt);
}

Complex commutator_tv(const SpinorField& f, const Potential& v, double tau0) {
    const SpinorField g = to_position(f);
    const SpinorField tv = time_operator_apply(apply_potential(g, v), tau0);
    const SpinorField vt = apply_potential(time_operator_apply(g, tau0), v);
    return inner_product(g.position_view(), tv.position_view()) -
           inner_product(g.position_view(), vt.position_view());
}

ExpectationReport expect_all(const SpinorField& f, double tau0) {
    require_normalized(f, "observables");
    const SpinorField g = to_position(f);
    check_localization(g, "observables");
    const GridSpec& grid = g.grid();
    const int dim = grid.dim();
    const auto& d = dirac_matrices<double>();
    const SpinorArray& x_view = g.position_view();
    const SpinorArray& k_view = g.momentum_view();

    ExpectationReport e;
    e.tau0 = tau0;

    std::array<CompensatedSum, 3> r, p, alpha;
    CompensatedSum r2, p2, beta, alpha_r, t2, h, h2, abs_h;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const auto psi = x_view.col(s);
        const double w = psi.squaredNorm();
        const Eigen::Vector3d pos = grid.site_position(s);
        Spinor alpha_r_psi = Spinor::Zero();
        for (int a = 0; a < dim; ++a) {
            r[a].add(w * pos[a]);
            alpha_r_psi += pos[a] * (d.alpha[a] * psi);
        }
        r2.add(w * pos.squaredNorm());
        const Spinor beta_psi = d.beta * psi;
        beta.add(psi.dot(beta_psi).real());
        alpha_r.add(psi.dot(alpha_r_psi).real());
        t2.add((alpha_r_psi + tau0 * beta_psi).squaredNorm());
    }
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const auto phi = k_view.col(s);
        const double w = phi.squaredNorm();
        const auto mode = mode_hamiltonian<double>(grid.site_momentum(s));
        for (int a = 0; a < dim; ++a) {
            p[a].add(w * mode.k[a]);
            alpha[a].add(phi.dot(d.alpha[a] * phi).real());
        }
        p2.add(w * mode.k.squaredNorm());
        const Spinor h_phi = mode.h * phi;
        h.add(phi.dot(h_phi).real());
        h2.add(h_phi.squaredNorm());
        abs_h.add(w * mode.energy);
    }
    for (int a = 0; a < 3; ++a) {
        e.r_mean[a] = r[a].value();
        e.p_mean[a] = p[a].value();
        e.alpha_mean[a] = alpha[a].value();
    }
    e.r2_mean = r2.value();
    e.p2_mean = p2.value();
    e.beta_mean = beta.value();
    e.alpha_r_mean = alpha_r.value();
    e.t_mean = e.alpha_r_mean + tau0 * e.beta_mean;
    e.t2_mean = t2.value();
    e.h_mean = h.value();
    e.h2_mean = h2.value();
    e.abs_h_mean = abs_h.value();
    e.spin_orbit_mean = dim == 3 ? spin_orbit_expect(g) : 0.0;
    e.beta_k_mean = 1.0 + 2.0 * e.spin_orbit_mean;
    e.commutator_th = commutator_th_direct(g, tau0);
    return e;
}

UncertaintyReport uncertainty_report(const ExpectationReport& e) {
    UncertaintyReport u;
    const double var_t = clamped_variance(e.t2_mean, e.t_mean * e.t_mean, "T");
    const double var_h = clamped_variance(e.h2_mean, e.h_mean * e.h_mean, "H");
    const double var_r = clamped_variance(e.r2_mean, e.r_mean.squaredNorm(), "r");
    const double var_p = clamped_variance(e.p2_mean, e.p_mean.squaredNorm(), "p");
    u.delta_t = std::sqrt(var_t);
    u.delta_h = std::sqrt(var_h);
    u.delta_r = std::sqrt(var_r);
    u.delta_p = std::sqrt(var_p);
    u.product_th = u.delta_t * u.delta_h;
    u.robertson_bound = 0.5 * std::abs(e.commutator_th);
    u.spin_orbit_bound = 1.5 * std::abs(1.0 + (4.0 / 3.0) * e.spin_orbit_mean);
    u.satisfied_robertson = u.product_th >= u.robertson_bound - 1e-9;

    const double one_minus_beta2 = 1.0 - e.beta_mean * e.beta_mean;
    const double dt_model = var_r + e.tau0 * e.tau0 * one_minus_beta2;
    const double dh_model = var_p + one_minus_beta2;
    u.spherical_dt_residual = var_t > 0.0 ? (var_t - dt_model) / var_t : var_t - dt_model;
    u.spherical_dh_residual = var_h > 0.0 ? (var_h - dh_model) / var_h : var_h - dh_model;
    u.alpha_r_over_delta_r = u.delta_r > 0.0 ? e.alpha_r_mean / u.delta_r : e.alpha_r_mean;
    return u;
}

UncertaintyReport uncertainty_report(const SpinorField& f, double tau0) {
    return uncertainty_report(expect_all(f, tau0));
}

double de_broglie_period(double mass_energy) {
    if (!(mass_energy > 0.0) || !std::isfinite(mass_energy)) {
        throw ValidationError("observables: rest energy must be positive and finite");
    }
    return 2.0 * std::numbers::pi / mass_energy;
}

double de_broglie_period_si(double mass_energy_joule) {
    if (!(mass_energy_joule > 0.0) || !std::isfinite(mass_energy_joule)) {
        throw ValidationError("observables: rest energy must be positive and finite");
    }
    return units::kPlanck / mass_energy_joule;
}

Potential softened_coulomb(double z, double softening) {
    return [z, softening](const Eigen::Vector3d& r) {
        return -z / std::sqrt(r.squaredNorm() + softening * softening);
    };
}

std::vector<std::string> expectation_csv_header() {
    return {"r_x", "r_y",   "r_z",  "p_x",     "p_y",     "p_z",        "r2",
            "p2",  "h",     "h2",   "abs_h",   "beta",    "alpha_r",    "t",
            "t2",  "spin_orbit", "beta_k", "comm_th_re", "comm_th_im"};
}

std::vector<std::string> expectation_csv_row(const ExpectationReport& e) {
    return {format_double(e.r_mean[0]),       format_double(e.r_mean[1]),
            format_double(e.r_mean[2]),       format_double(e.p_mean[0]),
            format_double(e.p_mean[1]),       format_double(e.p_mean[2]),
            format_double(e.r2_mean),         format_double(e.p2_mean),
            format_double(e.h_mean),          format_double(e.h2_mean),
            format_double(e.abs_h_mean),      format_double(e.beta_mean),
            format_double(e.alpha_r_mean),    format_double(e.t_mean),
            format_double(e.t2_mean),         format_double(e.spin_orbit_mean),
            format_double(e.beta_k_mean),     format_double(e.commutator_th.real()),
            format_double(e.commutator_th.imag())};
}

std::vector<std::string> uncertainty_csv_header() {
    return {"delta_t",     "delta_h",         "delta_r",     "delta_p",
            "product_th",  "robertson_bound", "spin_orbit_bound", "mt_time",
            "satisfied_robertson", "spherical_dt_residual", "spherical_dh_residual",
            "alpha_r_over_delta_r"};
}

std::vector<std::string> uncertainty_csv_row(const UncertaintyReport& u) {
    return {format_double(u.delta_t),
            format_double(u.delta_h),
            format_double(u.delta_r),
            format_double(u.delta_p),
            format_double(u.product_th),
            format_double(u.robertson_bound),
            format_double(u.spin_orbit_bound),
            u.mt_time ? format_double(*u.mt_time) : std::string("nan"),
            u.satisfied_robertson ? "1" : "0",
            format_double(u.spherical_dt_residual),
            format_double(u.spherical_dh_residual),
            format_double(u.alpha_r_over_delta_r)};
}

void write_key_values(std::ostream& out, const ExpectationReport& e) {
    const auto header = expectation_csv_header();
    const auto row = expectation_csv_row(e);
    for (std::size_t i = 0; i < header.size(); ++i) write_key_value(out, header[i], row[i]);
}

void write_key_values(std::ostream& out, const UncertaintyReport& u) {
    const auto header = uncertainty_csv_header();
    const auto row = uncertainty_csv_row(u);
    for (std::size_t i = 0; i < header.size(); ++i) write_key_value(out, header[i], row[i]);
}

}  // namespace diractime
