#include "diractime/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

#include "diractime/dirac_core.hpp"
#include "diractime/errors.hpp"
#include "diractime/evolution.hpp"
#include "diractime/format.hpp"
#include "diractime/observables.hpp"
#include "diractime/tunneling.hpp"
#include "diractime/units.hpp"
#include "diractime/wavepacket.hpp"

namespace diractime {

namespace {

using Matrix4 = Matrix4c<double>;

class Suite {
public:
    explicit Suite(std::vector<CheckResult>& out) : out_(out) {}

    // `measure` returns the deviation; the check passes when it is <= tolerance.
    void check(const std::string& suite, const std::string& name, double tolerance,
               const std::function<double()>& measure) {
        CheckResult r;
        r.suite = suite;
        r.name = name;
        r.tolerance = tolerance;
        try {
            r.measured = measure();
            r.passed = r.measured <= tolerance;
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        out_.push_back(std::move(r));
    }

private:
    std::vector<CheckResult>& out_;
};

double field_distance(const SpinorField& a, const SpinorField& b) {
    return std::sqrt(squared_norm(a.momentum_view() - b.momentum_view()));
}

Eigen::Vector3d random_momentum(std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> normal(0.0, scale);
    return Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
}

void dirac_core_checks(Suite& s, const SelfcheckOptions& o, std::mt19937_64& rng) {
    s.check("dirac_core", "clifford algebra", o.tol_identity, [] {
        const auto& d = dirac_matrices<double>();
        const Matrix4 id = Matrix4::Identity();
        double worst = (d.beta * d.beta - id).norm();
        for (int i = 0; i < 3; ++i) {
            worst = std::max(worst, (d.alpha[i] * d.beta + d.beta * d.alpha[i]).norm());
            for (int j = 0; j < 3; ++j) {
                const Matrix4 anti = d.alpha[i] * d.alpha[j] + d.alpha[j] * d.alpha[i];
                worst = std::max(worst, (anti - (i == j ? 2.0 : 0.0) * id).norm());
            }
        }
        return worst;
    });
    s.check("dirac_core", "energy projectors", o.tol_identity, [&] {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const auto m = mode_hamiltonian<double>(random_momentum(rng, 5.0));
            const auto [plus, minus] = energy_projectors(m);
            worst = std::max({worst, (plus * plus - plus).norm(),
                              (plus + minus - Matrix4::Identity()).norm(), (plus * minus).norm(),
                              (m.h * plus - m.energy * plus).norm()});
        }
        return worst;
    });
    s.check("dirac_core", "propagator unitarity and composition", o.tol_identity, [&] {
        std::uniform_real_distribution<double> time(-20.0, 20.0);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const auto m = mode_hamiltonian<double>(random_momentum(rng, 5.0));
            const double t1 = time(rng);
            const double t2 = time(rng);
            const Matrix4 u1 = mode_propagator(m, t1);
            worst = std::max({worst, (u1.adjoint() * u1 - Matrix4::Identity()).norm(),
                              (u1 * mode_propagator(m, t2) - mode_propagator(m, t1 + t2)).norm(),
                              (inverse_hamiltonian(m) * m.h - Matrix4::Identity()).norm()});
        }
        return worst;
    });
}

void wavepacket_checks(Suite& s, const SelfcheckOptions& o, std::mt19937_64& rng,
                       const GridSpec& grid) {
    s.check("wavepacket", "transform round trip", o.tol_identity, [&] {
        std::normal_distribution<double> normal;
        SpinorArray a(4, static_cast<Eigen::Index>(grid.size()));
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            for (int c = 0; c < 4; ++c) a(c, j) = Complex(normal(rng), normal(rng));
        }
        const SpinorArray k = position_to_momentum(grid, a);
        const double parseval = std::abs(squared_norm(k) / squared_norm(a) - 1.0);
        const double roundtrip = (momentum_to_position(grid, k) - a).norm() / a.norm();
        return std::max(parseval, roundtrip);
    });
    s.check("wavepacket", "positive-energy projection", o.tol_identity, [&] {
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            const SpinorField f = build_packet(random_packet_spec(grid, rng), grid);
            worst = std::max({worst, std::abs(f.norm() - 1.0),
                              1.0 - positive_energy_fraction(f)});
        }
        return worst;
    });
    s.check("wavepacket", "branch split conserves norm", o.tol_identity, [&] {
        PacketSpec spec = random_packet_spec(grid, rng);
        spec.project_positive = false;
        const SpinorField f = build_packet(spec, grid);
        const double plus = squared_norm(project(f, EnergyBranch::kPositive).momentum_view());
        const double minus = squared_norm(project(f, EnergyBranch::kNegative).momentum_view());
        return std::abs(plus + minus - 1.0);
    });
}

void observable_checks(Suite& s, const SelfcheckOptions& o, std::mt19937_64& rng,
                       const GridSpec& line, const GridSpec& cube) {
    std::vector<SpinorField> fields;
    for (int i = 0; i < 4; ++i) {
        PacketSpec spec = random_packet_spec(line, rng);
        spec.project_positive = i % 2 == 0;
        fields.push_back(to_position(build_packet(spec, line)));
    }
    {
        PacketSpec spec = random_packet_spec(cube, rng, 1.0);
        spec.project_positive = false;
        fields.push_back(to_position(build_packet(spec, cube)));
    }
    const double tau0 = kNaturalDeBroglie;

    s.check("observables", "H^2 = p^2 + 1", o.tol_identity, [&] {
        double worst = 0.0;
        for (const auto& f : fields) {
            const SpinorField h2 = apply_hamiltonian(apply_hamiltonian(f));
            const SpinorField rhs = apply_modewise(f, [](const ModeMatrix<double>& m) -> Matrix4 {
                return (m.k.squaredNorm() + 1.0) * Matrix4::Identity();
            });
            worst = std::max(worst, field_distance(h2, rhs) / rhs.norm());
        }
        return worst;
    });
    s.check("observables", "T^2 = r^2 + tau0^2", o.tol_identity, [&] {
        double worst = 0.0;
        for (const auto& f : fields) {
            const SpinorField t2 = time_operator_apply(to_position(time_operator_apply(f, tau0)), tau0);
            const SpinorField rhs = apply_potential(
                f, [&](const Eigen::Vector3d& r) { return r.squaredNorm() + tau0 * tau0; });
            worst = std::max(worst, field_distance(t2, rhs) / rhs.norm());
        }
        return worst;
    });
    s.check("observables", "[T, V] = 0", o.tol_identity, [&] {
        double worst = 0.0;
        const Potential v = softened_coulomb(1.0);
        for (const auto& f : fields) {
            const double scale = std::sqrt(expect_all(f, tau0).t2_mean);
            worst = std::max(worst, std::abs(commutator_tv(f, v, tau0)) / scale);
        }
        return worst;
    });
    s.check("observables", "commutator closed form", 1e-6, [&] {
        double worst = 0.0;
        for (const auto& f : fields) {
            const Complex direct = commutator_th_direct(f, tau0);
            worst = std::max(worst,
                             std::abs(commutator_th_closed_form(f, tau0) - direct) / std::abs(direct));
        }
        return worst;
    });
    s.check("observables", "Robertson bound slack", 1e-9, [&] {
        double worst = 0.0;
        for (const auto& f : fields) {
            const UncertaintyReport u = uncertainty_report(f, tau0);
            worst = std::max(worst, u.robertson_bound - u.product_th);
        }
        return worst;
    });
    s.check("observables", "spin-orbit of (x + i y) Gaussian", 1e-6, [&] {
        const SpinorField f = sample_field(cube, [](const Eigen::Vector3d& r) {
            const Complex amplitude = Complex(r[0], r[1]) * std::exp(-r.squaredNorm() / 16.0);
            return Spinor(amplitude, 0.0, 0.0, 0.0);
        });
        return std::abs(spin_orbit_expect(to_position(f)) - 0.5);
    });
    s.check("observables", "de Broglie period of the electron (s)", 1e-4, [] {
        const double tau0_si = de_broglie_period_si(units::kElectronRestEnergy);
        return std::abs(tau0_si / 8.0933e-21 - 1.0);
    });
}

void evolution_checks(Suite& s, const SelfcheckOptions& o, std::mt19937_64& rng,
                      const GridSpec& grid) {
    std::vector<SpinorField> fields;
    for (int i = 0; i < 3; ++i) {
        PacketSpec spec = random_packet_spec(grid, rng, 0.5);
        spec.project_positive = i == 0;
        fields.push_back(to_position(build_packet(spec, grid)));
    }
    const std::vector<double> times{0.0, 3.7, 11.0, 25.0};

    s.check("evolution", "norm conservation", o.tol_identity, [&] {
        double worst = 0.0;
        for (const auto& f : fields) {
            for (double t : times) worst = std::max(worst, std::abs(evolve(f, t).norm() - 1.0));
        }
        return worst;
    });
    s.check("evolution", "Heisenberg = Schroedinger picture", o.tol_picture, [&] {
        double worst = 0.0;
        for (const auto& f : fields) {
            for (double t : times) {
                const ExpectationReport e = expect_all(evolve(f, t));
                worst = std::max({worst, (heisenberg_alpha(f, t) - e.alpha_mean).cwiseAbs().maxCoeff(),
                                  std::abs(heisenberg_beta(f, t) - e.beta_mean),
                                  (heisenberg_position(f, t) - e.r_mean).cwiseAbs().maxCoeff(),
                                  std::abs(heisenberg_time_operator(f, t) - e.t_mean)});
            }
        }
        return worst;
    });
    s.check("evolution", "time-operator drift equals <(p/H)^2>", 1e-3, [&] {
        PacketSpec spec;
        spec.mean_momentum = Eigen::Vector3d(0.5, 0.0, 0.0);
        spec.center = Eigen::Vector3d(-20.0, 0.0, 0.0);
        const SpinorField f = build_packet(spec, grid);
        const ObservableSeries series = run_series(f, 16.0 * std::numbers::pi, 128);
        if (series.partial) throw GuardError(series.failure);
        const double slope = analyze_drift(series, SeriesColumn::kTimeOperator).slope;
        return std::abs(slope / velocity_ratio_squared(f) - 1.0);
    });
}

void tunneling_checks(Suite& s, std::mt19937_64& rng) {
    const Calibration cal = calibrate_velocity(CalibrationPoint{});
    s.check("tunneling", "calibrated inverse velocity ratio vs 304.22", 0.01,
            [&] { return std::abs(cal.inverse_ratio() / 304.22 - 1.0); });
    s.check("tunneling", "lab time at 20 a.u. vs 85.4 as", 0.01, [&] {
        const double t = units::seconds_to_attoseconds(lab_time(20.0, cal.velocity_ratio));
        return std::abs(t / 85.4 - 1.0);
    });
    s.check("tunneling", "lab time at 8 a.u. vs 34.2 as", 0.01, [&] {
        const double t = units::seconds_to_attoseconds(lab_time(8.0, cal.velocity_ratio));
        return std::abs(t / 34.2 - 1.0);
    });
    s.check("tunneling", "barrier width equals root separation", 1e-12, [&] {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            TunnelingScenario sc;
            sc.ip = 0.2 + 1.8 * unit(rng);
            sc.z_eff = 0.5 + 2.5 * unit(rng);
            sc.field = (0.01 + 0.98 * unit(rng)) * sc.ip * sc.ip / (4.0 * sc.z_eff);
            const auto [entrance, exit] = barrier_points(sc);
            const double width = barrier_width(sc);
            worst = std::max(worst, std::abs((exit - entrance) - width) / width);
        }
        return worst;
    });
    s.check("tunneling", "over-barrier field is rejected", 0.0, [] {
        TunnelingScenario sc;
        sc.field = 0.2;
        try {
            barrier_width(sc);
        } catch (const OverBarrierError&) {
            return 0.0;
        }
        return 1.0;
    });
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options) {
    std::vector<CheckResult> results;
    Suite suite(results);
    std::mt19937_64 rng(options.rng_seed);
    const GridSpec line(1, 1024, 400.0);
    const GridSpec cube(3, 64, 60.0);
    dirac_core_checks(suite, options, rng);
    wavepacket_checks(suite, options, rng, line);
    observable_checks(suite, options, rng, line, cube);
    evolution_checks(suite, options, rng, line);
    tunneling_checks(suite, rng);
    return results;
}

void write_check_table(std::ostream& out, const std::vector<CheckResult>& results) {
    std::size_t width = 0;
    for (const auto& r : results) width = std::max(width, r.suite.size() + r.name.size() + 2);
    std::size_t failed = 0;
    for (const auto& r : results) {
        failed += r.passed ? 0 : 1;
        out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width))
            << (r.suite + ": " + r.name) << "  " << std::setprecision(3) << r.measured
            << " <= " << r.tolerance;
        if (!r.detail.empty()) out << "  (" << r.detail << ')';
        out << '\n';
    }
    out << (results.size() - failed) << '/' << results.size() << " checks passed\n";
}

void write_check_csv(std::ostream& out, const std::vector<CheckResult>& results) {
    write_csv_row(out, {"suite", "check", "passed", "measured", "tolerance", "detail"});
    for (const auto& r : results) {
        write_csv_row(out, {r.suite, r.name, r.passed ? "true" : "false", format_double(r.measured),
                            format_double(r.tolerance), r.detail});
    }
}

}  // namespace diractime
