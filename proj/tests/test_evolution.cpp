#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "diractime/errors.hpp"
#include "diractime/evolution.hpp"
#include "diractime/wavepacket.hpp"
#include "oracles.hpp"

using namespace diractime;

namespace {

const GridSpec kLine(1, 1024, 400.0);

SpinorField packet(double p0, bool project, Spinor seed = Spinor(1, 0, 0, 0), double center = 0.0) {
    PacketSpec spec;
    spec.mean_momentum = Eigen::Vector3d(p0, 0, 0);
    spec.center = Eigen::Vector3d(center, 0, 0);
    spec.project_positive = project;
    spec.spinor_seed = seed;
    return to_position(build_packet(spec, kLine));
}

// Mode sum over |g(k)|^2 f(k) for the unprojected upper-seed Gaussian.
double gaussian_average(double p0, double sigma, double (*f)(double)) {
    double num = 0.0, den = 0.0;
    for (int m = -512; m < 512; ++m) {
        const double k = 2.0 * std::numbers::pi * m / 400.0;
        const double w = std::exp(-2.0 * sigma * sigma * (k - p0) * (k - p0));
        num += w * f(k);
        den += w;
    }
    return num / den;
}

}  // namespace

TEST_CASE("Schroedinger evolution is unitary and composes") {
    const SpinorField f = packet(0.4, false, Spinor(1, 0.5, 0, 1));
    CHECK(evolve(f, 0.0).momentum_view() == f.momentum_view());
    for (double t : {1.0, 7.5, 30.0}) CHECK(evolve(f, t).norm() == doctest::Approx(1.0).epsilon(1e-14));
    const SpinorField a = evolve(evolve(f, 3.0), 4.5);
    const SpinorField b = evolve(f, 7.5);
    CHECK((a.momentum_view() - b.momentum_view()).norm() < 1e-13);
    CHECK_THROWS_AS(evolve(f, INFINITY), ValidationError);
}

TEST_CASE("Heisenberg closed forms agree with Schroedinger expectations") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> time(0.0, 25.0);
    for (int i = 0; i < 6; ++i) {
        PacketSpec spec = random_packet_spec(kLine, rng, 1.0);
        spec.project_positive = i % 2 == 0;
        const SpinorField f = to_position(build_packet(spec, kLine));
        for (int j = 0; j < 3; ++j) {
            const double t = time(rng);
            const ExpectationReport e = expect_all(evolve(f, t));
            CHECK(std::abs(heisenberg_alpha(f, t)[0] - e.alpha_mean[0]) < 1e-10);
            CHECK(std::abs(heisenberg_beta(f, t) - e.beta_mean) < 1e-10);
            CHECK(std::abs(heisenberg_position(f, t)[0] - e.r_mean[0]) < 1e-10);
            CHECK(std::abs(heisenberg_time_operator(f, t) - e.t_mean) < 1e-10);
        }
    }
}

TEST_CASE("velocity constants of motion match mode-sum oracles") {
    const SpinorField f = packet(0.6, false);
    const double v2 = gaussian_average(0.6, 10.0, [](double k) { return k * k / (k * k + 1.0); });
    CHECK(velocity_ratio_squared(f) == doctest::Approx(v2).epsilon(1e-12));

    const SpinorField g = packet(0.6, true);
    const auto projected = [](double p0) {
        double num = 0.0, den = 0.0;
        for (int m = -512; m < 512; ++m) {
            const double k = 2.0 * std::numbers::pi * m / 400.0;
            const double e = std::sqrt(k * k + 1.0);
            const double w = std::exp(-200.0 * (k - p0) * (k - p0)) * 0.5 * (1.0 + 1.0 / e);
            num += w * k / e;
            den += w;
        }
        return num / den;
    };
    CHECK(group_velocity(g)[0] == doctest::Approx(projected(0.6)).epsilon(1e-12));
}

TEST_CASE("time-operator drift equals <(p/H)^2>") {
    const SpinorField f = packet(0.5, true, Spinor(1, 0, 0, 0), -30.0);
    const ObservableSeries s = run_series(f, 16.0 * std::numbers::pi, 128);
    REQUIRE_FALSE(s.partial);
    REQUIRE(s.size() == 128);
    const DriftAnalysis d = analyze_drift(s, SeriesColumn::kTimeOperator);
    CHECK(d.slope == doctest::Approx(velocity_ratio_squared(f)).epsilon(1e-9));
    CHECK(d.intercept == doctest::Approx(expect_all(f).t_mean).epsilon(1e-9));
    const DriftAnalysis x = analyze_drift(s, SeriesColumn::kPositionX);
    CHECK(x.slope == doctest::Approx(group_velocity(f)[0]).epsilon(1e-9));
    for (const auto& sample : s.samples) {
        CHECK(sample.picture_dx < 1e-10);
        CHECK(sample.picture_dt < 1e-10);
        CHECK(sample.norm == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("Zitterbewegung of a balanced mixed packet") {
    const SpinorField f = packet(0.0, false, Spinor(1, 0, 0, 1) / std::sqrt(2.0));
    const ObservableSeries s = run_series(f, 40.0 * std::numbers::pi, 256);
    const DriftAnalysis d = analyze_drift(s, SeriesColumn::kPositionX);
    const double abs_h = expect_all(f).abs_h_mean;
    CHECK(d.oscillation_frequency == doctest::Approx(2.0 * abs_h).epsilon(0.01));
    // Rest-mode amplitude <alpha_x> / 2E = 1/2, reduced slightly by the momentum spread.
    CHECK(d.oscillation_amplitude == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("positive-energy packets do not tremble") {
    const SpinorField f = packet(0.3, true);
    const ObservableSeries s = run_series(f, 40.0 * std::numbers::pi, 256);
    const DriftAnalysis d = analyze_drift(s, SeriesColumn::kPositionX);
    CHECK(d.oscillation_amplitude < 1e-6 * kLine.box_length());
    CHECK(d.fit_residual < 1e-9);
}

TEST_CASE("drift analysis preconditions") {
    const SpinorField f = packet(0.3, true);
    CHECK_THROWS_AS(run_series(f, 10.0, 4), ValidationError);
    CHECK_THROWS_AS(run_series(f, -1.0, 64), ValidationError);
    CHECK_THROWS_AS(analyze_drift(run_series(f, 40.0, 32), SeriesColumn::kTimeOperator),
                    ValidationError);
    // 64 samples over 2 periods: too short.
    CHECK_THROWS_AS(analyze_drift(run_series(f, 6.0, 64), SeriesColumn::kTimeOperator),
                    ValidationError);
    // 64 samples over 200: undersampled.
    CHECK_THROWS_AS(analyze_drift(run_series(f, 200.0, 64), SeriesColumn::kTimeOperator),
                    ValidationError);
}

TEST_CASE("Mandelstam-Tamm time") {
    const SpinorField f = packet(0.5, true);
    const ObservableSeries s = run_series(f, 20.0, 16);
    CHECK_THROWS_AS(mt_from_series(s, SeriesColumn::kEnergy), UndefinedMtError);
    const double mt = mt_from_series(s, SeriesColumn::kTimeOperator);
    const auto& mid = s.samples[s.size() / 2].uncertainty;
    CHECK(mt * mid.delta_h >= 0.5 - 1e-9);
    CHECK(mt == doctest::Approx(mid.delta_t / velocity_ratio_squared(f)).epsilon(1e-6));
}

TEST_CASE("leaving the guard region yields a partial series") {
    const SpinorField f = packet(2.0, true, Spinor(1, 0, 0, 0), 40.0);
    const ObservableSeries s = run_series(f, 100.0, 64);
    CHECK(s.partial);
    CHECK(s.failure.find("boundary") != std::string::npos);
    CHECK(s.size() > 0);
    CHECK(s.size() < 64);
    CHECK_THROWS_AS(evolve(f, 100.0), GuardError);
}

TEST_CASE("series CSV layout") {
    const ObservableSeries s = run_series(packet(0.1, true), 5.0, 8);
    std::ostringstream out;
    write_series_csv(out, s);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "t,norm,x_mean,p_mean,h_mean,h2_mean,beta_mean,t_mean,t2_mean,delta_t,delta_h,"
          "picture_dx,picture_dt");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 8);
}
