#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diractime/observables.hpp"
#include "diractime/spinor_field.hpp"
#include "diractime/wavepacket.hpp"

namespace diractime {

/// Schroedinger picture: psi(k) -> exp(-i h(k) t) psi(k). Re-checks localization.
SpinorField evolve(const SpinorField& f, double t);

// Heisenberg picture, evaluated on the initial state with the closed forms
//
//   alpha(t) = c p/H + (alpha - c p/H) exp(-2iHt)
//   beta(t)  = m/H   + (beta  - m/H)   exp(-2iHt)
//   r(t)     = r + c^2 p/H t + (i c/2) (alpha - c p/H) H^-1 (exp(-2iHt) - 1)
//   T(t)     = alpha(t).r(t) / c + beta(t) tau0
//
// with every function of H taken mode by mode (H^-1 = h/E^2). Only r(0)
// needs the position view.

Eigen::Vector3d heisenberg_alpha(const SpinorField& f0, double t);
double heisenberg_beta(const SpinorField& f0, double t);
Eigen::Vector3d heisenberg_position(const SpinorField& f0, double t);
double heisenberg_time_operator(const SpinorField& f0, double t, double tau0 = kNaturalDeBroglie);

/// <(c p / H)^2>, the secular slope of <T(t)> (constant of motion).
double velocity_ratio_squared(const SpinorField& f);
/// <c^2 p / H>, the drift velocity of the packet center.
Eigen::Vector3d group_velocity(const SpinorField& f);

struct SeriesSample {
    double t = 0.0;
    double norm = 0.0;
    ExpectationReport report;
    UncertaintyReport uncertainty;
    /// |<x>_Heisenberg - <x>_Schroedinger| and the same for <T>.
    double picture_dx = 0.0;
    double picture_dt = 0.0;
};

struct ObservableSeries {
    std::vector<SeriesSample> samples;
    GridSpec grid{1, 16, 1.0};
    double tau0 = kNaturalDeBroglie;
    /// Set when a guard error aborted the run; samples holds what was computed.
    bool partial = false;
    std::string failure;

    std::size_t size() const { return samples.size(); }
};

/// `samples` uniform times on [0, horizon], each a fresh propagation from t = 0.
/// Requires samples >= 8 and horizon > 0.
ObservableSeries run_series(const SpinorField& f0, double horizon, int samples,
                            double tau0 = kNaturalDeBroglie);

enum class SeriesColumn { kPositionX, kTimeOperator, kEnergy };

struct DriftAnalysis {
    double slope = 0.0;
    double intercept = 0.0;
    double oscillation_amplitude = 0.0;
    double oscillation_frequency = 0.0;  ///< angular, natural units
    double fit_residual = 0.0;           ///< RMS of the line-fit residual
};

/// Least-squares line over the series, then a Hann-windowed, zero-padded DFT
/// of the residual with quadratic peak interpolation. Requires >= 64 samples,
/// >= 5 Zitterbewegung periods (pi / <|H|>) and Nyquist sampling of 2<|H|>.
DriftAnalysis analyze_drift(const ObservableSeries& s, SeriesColumn which);

/// Delta A at the series midpoint divided by |d<A>/dt| (central difference).
/// Throws UndefinedMtError when |d<A>/dt| < 1e-12.
double mt_from_series(const ObservableSeries& s, SeriesColumn which);

/// Columns: t,norm,x_mean,p_mean,h_mean,h2_mean,beta_mean,t_mean,t2_mean,
/// delta_t,delta_h,picture_dx,picture_dt
void write_series_csv(std::ostream& out, const ObservableSeries& s);
void write_key_values(std::ostream& out, const DriftAnalysis& d);

}  // namespace diractime
