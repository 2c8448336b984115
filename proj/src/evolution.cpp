#include "diractime/evolution.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "diractime/dirac_core.hpp"
#include "diractime/errors.hpp"
#include "diractime/format.hpp"
#include "diractime/numeric.hpp"

namespace diractime {

namespace {

using Matrix4 = Matrix4c<double>;

// Mode-wise building blocks of the Heisenberg closed forms.
struct ModeTerms {
    Matrix4 inverse_h;               // H^-1
    Matrix4 oscillator;              // exp(-2iHt)
    std::array<Matrix4, 3> drift;    // p_a H^-1
    std::array<Matrix4, 3> odd;      // alpha_a - p_a H^-1, anticommutes with H
};

ModeTerms mode_terms(const GridSpec& grid, std::size_t s, double t) {
    const auto& d = dirac_matrices<double>();
    const auto mode = mode_hamiltonian<double>(grid.site_momentum(s));
    ModeTerms m;
    m.inverse_h = inverse_hamiltonian(mode);
    m.oscillator = mode_propagator(mode, 2.0 * t);
    for (int a = 0; a < 3; ++a) {
        m.drift[a] = mode.k[a] * m.inverse_h;
        m.odd[a] = d.alpha[a] - m.drift[a];
    }
    return m;
}

// (i/2) (alpha_a - p_a/H) H^-1 (exp(-2iHt) - 1)
Matrix4 position_oscillation(const ModeTerms& m, int a) {
    const Complex half_i(0.0, 0.5);
    return half_i * m.odd[a] * m.inverse_h * (m.oscillator - Matrix4::Identity());
}

double column_value(const SeriesSample& sample, SeriesColumn which) {
    switch (which) {
        case SeriesColumn::kPositionX: return sample.report.r_mean[0];
        case SeriesColumn::kTimeOperator: return sample.report.t_mean;
        case SeriesColumn::kEnergy: return sample.report.h_mean;
    }
    return 0.0;
}

}  // namespace

SpinorField evolve(const SpinorField& f, double t) {
    if (!std::isfinite(t)) throw ValidationError("evolution: time must be finite");
    SpinorField out = to_position(
        apply_modewise(f, [t](const ModeMatrix<double>& m) { return mode_propagator(m, t); }));
    check_localization(out, "evolution");
    return out;
}

Eigen::Vector3d heisenberg_alpha(const SpinorField& f0, double t) {
    require_normalized(f0, "evolution");
    const GridSpec& grid = f0.grid();
    const SpinorArray& phi = f0.momentum_view();
    std::array<CompensatedSum, 3> sums;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const ModeTerms m = mode_terms(grid, s, t);
        const auto v = phi.col(s);
        for (int a = 0; a < grid.dim(); ++a) {
            sums[a].add(v.dot((m.drift[a] + m.odd[a] * m.oscillator) * v).real());
        }
    }
    return {sums[0].value(), sums[1].value(), sums[2].value()};
}

double heisenberg_beta(const SpinorField& f0, double t) {
    require_normalized(f0, "evolution");
    const GridSpec& grid = f0.grid();
    const auto& d = dirac_matrices<double>();
    const SpinorArray& phi = f0.momentum_view();
    CompensatedSum sum;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const ModeTerms m = mode_terms(grid, s, t);
        const auto v = phi.col(s);
        sum.add(v.dot((m.inverse_h + (d.beta - m.inverse_h) * m.oscillator) * v).real());
    }
    return sum.value();
}

Eigen::Vector3d heisenberg_position(const SpinorField& f0, double t) {
    require_normalized(f0, "evolution");
    const SpinorField g = to_position(f0);
    const GridSpec& grid = g.grid();
    const SpinorArray& phi = g.momentum_view();
    const SpinorArray& psi = g.position_view();

    std::array<CompensatedSum, 3> initial, moving;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const Eigen::Vector3d r = grid.site_position(s);
        const double w = psi.col(s).squaredNorm();
        for (int a = 0; a < grid.dim(); ++a) initial[a].add(w * r[a]);
    }
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const ModeTerms m = mode_terms(grid, s, t);
        const auto v = phi.col(s);
        for (int a = 0; a < grid.dim(); ++a) {
            const Matrix4 op = t * m.drift[a] + position_oscillation(m, a);
            moving[a].add(v.dot(op * v).real());
        }
    }
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (int a = 0; a < 3; ++a) out[a] = initial[a].value() + moving[a].value();
    return out;
}

double heisenberg_time_operator(const SpinorField& f0, double t, double tau0) {
    require_normalized(f0, "evolution");
    const SpinorField g = to_position(f0);
    check_localization(g, "evolution");
    const GridSpec& grid = g.grid();
    const int dim = grid.dim();
    const SpinorArray& phi = g.momentum_view();
    const SpinorArray& psi = g.position_view();

    // r_a(0) phi, carried back to the momentum view.
    std::array<SpinorArray, 3> x_phi;
    for (int a = 0; a < dim; ++a) {
        SpinorArray xa(4, psi.cols());
        for (std::size_t s = 0; s < grid.size(); ++s) {
            xa.col(s) = grid.site_position(s)[a] * psi.col(s);
        }
        x_phi[a] = position_to_momentum(grid, xa);
    }

    CompensatedComplexSum sum;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const ModeTerms m = mode_terms(grid, s, t);
        const auto v = phi.col(s);
        for (int a = 0; a < dim; ++a) {
            const Spinor r_t = x_phi[a].col(s) + (t * m.drift[a] + position_oscillation(m, a)) * v;
            const Matrix4 alpha_t = m.drift[a] + m.odd[a] * m.oscillator;
            sum.add(v.dot(alpha_t * r_t));
        }
    }
    return sum.value().real() + tau0 * heisenberg_beta(g, t);
}

double velocity_ratio_squared(const SpinorField& f) {
    const GridSpec& grid = f.grid();
    const SpinorArray& phi = f.momentum_view();
    CompensatedSum sum;
    CompensatedSum norm;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const Eigen::Vector3d k = grid.site_momentum(s);
        const double k2 = k.squaredNorm();
        const double w = phi.col(s).squaredNorm();
        sum.add(w * k2 / (k2 + 1.0));
        norm.add(w);
    }
    return sum.value() / norm.value();
}

Eigen::Vector3d group_velocity(const SpinorField& f) {
    const GridSpec& grid = f.grid();
    const SpinorArray& phi = f.momentum_view();
    std::array<CompensatedSum, 3> sums;
    CompensatedSum norm;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const auto mode = mode_hamiltonian<double>(grid.site_momentum(s));
        const Matrix4 inverse_h = inverse_hamiltonian(mode);
        const auto v = phi.col(s);
        const Spinor hv = inverse_h * v;
        for (int a = 0; a < grid.dim(); ++a) sums[a].add(mode.k[a] * v.dot(hv).real());
        norm.add(v.squaredNorm());
    }
    return Eigen::Vector3d(sums[0].value(), sums[1].value(), sums[2].value()) / norm.value();
}

ObservableSeries run_series(const SpinorField& f0, double horizon, int samples, double tau0) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ValidationError("evolution: horizon must be positive and finite");
    }
    if (samples < 8) throw ValidationError("evolution: need at least 8 samples");
    require_normalized(f0, "evolution");
    const SpinorField g = to_position(f0);

    ObservableSeries series;
    series.grid = g.grid();
    series.tau0 = tau0;
    series.samples.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double t = horizon * i / (samples - 1);
        try {
            const SpinorField ft = evolve(g, t);
            SeriesSample sample;
            sample.t = t;
            sample.norm = ft.norm();
            sample.report = expect_all(ft, tau0);
            sample.uncertainty = uncertainty_report(sample.report);
            sample.picture_dx = std::abs(heisenberg_position(g, t)[0] - sample.report.r_mean[0]);
            sample.picture_dt =
                std::abs(heisenberg_time_operator(g, t, tau0) - sample.report.t_mean);
            series.samples.push_back(sample);
        } catch (const GuardError& e) {
            series.partial = true;
            series.failure = e.what();
            break;
        }
    }
    return series;
}

DriftAnalysis analyze_drift(const ObservableSeries& s, SeriesColumn which) {
    const std::size_t n = s.size();
    if (n < 64) {
        throw ValidationError("evolution: drift analysis needs >= 64 samples, got " +
                              std::to_string(n));
    }
    const double energy = s.samples.front().report.abs_h_mean;
    const double span = s.samples.back().t - s.samples.front().t;
    const double dt = span / static_cast<double>(n - 1);
    const double period = std::numbers::pi / energy;
    if (span < 5.0 * period) {
        throw ValidationError("evolution: series spans " + format_double(span / period) +
                              " Zitterbewegung periods; need >= 5");
    }
    if (dt >= std::numbers::pi / (2.0 * energy)) {
        throw ValidationError("evolution: sampling step " + format_double(dt) +
                              " does not resolve the Zitterbewegung frequency 2<|H|> = " +
                              format_double(2.0 * energy) + " (Nyquist)");
    }

    // Ordinary least squares on centered times.
    CompensatedSum t_sum, y_sum;
    for (const auto& sample : s.samples) {
        t_sum.add(sample.t);
        y_sum.add(column_value(sample, which));
    }
    const double t_bar = t_sum.value() / n;
    const double y_bar = y_sum.value() / n;
    CompensatedSum stt, sty;
    for (const auto& sample : s.samples) {
        const double dt_i = sample.t - t_bar;
        stt.add(dt_i * dt_i);
        sty.add(dt_i * (column_value(sample, which) - y_bar));
    }
    DriftAnalysis out;
    out.slope = sty.value() / stt.value();
    out.intercept = y_bar - out.slope * t_bar;

    std::vector<double> residual(n);
    CompensatedSum rss;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& sample = s.samples[i];
        residual[i] = column_value(sample, which) - (out.intercept + out.slope * sample.t);
        rss.add(residual[i] * residual[i]);
    }
    out.fit_residual = std::sqrt(rss.value() / n);

    std::size_t padded = 1;
    while (padded < 8 * n) padded <<= 1;
    std::vector<double> windowed(padded, 0.0);
    CompensatedSum window_sum;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
        windowed[i] = w * residual[i];
        window_sum.add(w);
    }
    Eigen::FFT<double> fft;
    std::vector<Complex> spectrum;
    fft.fwd(spectrum, windowed);

    // Skip the window's main lobe around DC (two cycles over the span).
    const double bin_width = 2.0 * std::numbers::pi / (padded * dt);
    const auto first_bin =
        static_cast<std::size_t>(std::ceil(2.0 * (2.0 * std::numbers::pi / span) / bin_width));
    const std::size_t last_bin = padded / 2 - 1;
    std::size_t peak = std::max<std::size_t>(first_bin, 1);
    for (std::size_t m = peak; m < last_bin; ++m) {
        if (std::abs(spectrum[m]) > std::abs(spectrum[peak])) peak = m;
    }
    const double a = std::abs(spectrum[peak - 1]);
    const double b = std::abs(spectrum[peak]);
    const double c = std::abs(spectrum[peak + 1]);
    const double denom = a - 2.0 * b + c;
    const double delta = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    const double peak_magnitude = b - 0.25 * (a - c) * delta;
    out.oscillation_frequency = (static_cast<double>(peak) + delta) * bin_width;
    out.oscillation_amplitude = 2.0 * peak_magnitude / window_sum.value();
    return out;
}

double mt_from_series(const ObservableSeries& s, SeriesColumn which) {
    const std::size_t n = s.size();
    if (n < 3) throw ValidationError("evolution: Mandelstam-Tamm time needs >= 3 samples");
    const std::size_t mid = n / 2;
    const auto& before = s.samples[mid - 1];
    const auto& after = s.samples[mid + 1];
    const double derivative =
        (column_value(after, which) - column_value(before, which)) / (after.t - before.t);
    if (!(std::abs(derivative) >= 1e-12)) {
        throw UndefinedMtError("evolution: observable is stationary (d<A>/dt = " +
                               format_double(derivative) +
                               "); Mandelstam-Tamm time undefined");
    }
    const auto& u = s.samples[mid].uncertainty;
    double spread = 0.0;
    switch (which) {
        case SeriesColumn::kTimeOperator: spread = u.delta_t; break;
        case SeriesColumn::kEnergy: spread = u.delta_h; break;
        case SeriesColumn::kPositionX:
            if (s.grid.dim() != 1) {
                throw UnsupportedDimensionError(
                    "evolution: position Mandelstam-Tamm time is only tracked on 1D grids");
            }
            spread = u.delta_r;
            break;
    }
    return spread / std::abs(derivative);
}

void write_series_csv(std::ostream& out, const ObservableSeries& s) {
    write_csv_row(out, {"t", "norm", "x_mean", "p_mean", "h_mean", "h2_mean", "beta_mean",
                        "t_mean", "t2_mean", "delta_t", "delta_h", "picture_dx", "picture_dt"});
    for (const auto& sample : s.samples) {
        const auto& e = sample.report;
        write_csv_row(out, {format_double(sample.t), format_double(sample.norm),
                            format_double(e.r_mean[0]), format_double(e.p_mean[0]),
                            format_double(e.h_mean), format_double(e.h2_mean),
                            format_double(e.beta_mean), format_double(e.t_mean),
                            format_double(e.t2_mean), format_double(sample.uncertainty.delta_t),
                            format_double(sample.uncertainty.delta_h),
                            format_double(sample.picture_dx), format_double(sample.picture_dt)});
    }
}

void write_key_values(std::ostream& out, const DriftAnalysis& d) {
    write_key_value(out, "slope", d.slope);
    write_key_value(out, "intercept", d.intercept);
    write_key_value(out, "oscillation_amplitude", d.oscillation_amplitude);
    write_key_value(out, "oscillation_frequency", d.oscillation_frequency);
    write_key_value(out, "fit_residual", d.fit_residual);
}

}  // namespace diractime
