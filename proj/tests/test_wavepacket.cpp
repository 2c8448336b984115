#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "diractime/errors.hpp"
#include "diractime/observables.hpp"
#include "diractime/wavepacket.hpp"
#include "oracles.hpp"

using namespace diractime;

TEST_CASE("grid validation") {
    CHECK_NOTHROW(GridSpec(1, 16, 1.0));
    CHECK_THROWS_AS(GridSpec(1, 17, 400.0), ValidationError);
    CHECK_THROWS_AS(GridSpec(1, 8, 400.0), ValidationError);
    CHECK_THROWS_AS(GridSpec(2, 64, 400.0), ValidationError);
    CHECK_THROWS_AS(GridSpec(1, 64, 0.0), ValidationError);
    CHECK_THROWS_AS(GridSpec(1, 64, -1.0), ValidationError);
    CHECK_THROWS_AS(GridSpec(3, 512, 100.0), ValidationError);  // 2^27 sites
}

TEST_CASE("grid coordinates and FFT-ordered wavenumbers") {
    const GridSpec g(1, 16, 8.0);
    CHECK(g.spacing() == 0.5);
    CHECK(g.coordinate(0) == -4.0);
    CHECK(g.coordinate(8) == 0.0);
    CHECK(g.wavenumber(1) == doctest::Approx(2.0 * std::numbers::pi / 8.0));
    CHECK(g.wavenumber(8) == doctest::Approx(-std::numbers::pi / 0.5));
    CHECK(g.wavenumber(15) == doctest::Approx(-2.0 * std::numbers::pi / 8.0));
    CHECK(g.guard_half_width() == 2.0);
    const GridSpec cube(3, 16, 8.0);
    CHECK(cube.size() == 4096);
    CHECK(cube.guard_half_width() == doctest::Approx(4.0 * std::cbrt(0.5)));
    const Eigen::Vector3d r = cube.site_position(1 + 16 * (2 + 16 * 3));
    CHECK(r[0] == -3.5);
    CHECK(r[1] == -3.0);
    CHECK(r[2] == -2.5);
}

TEST_CASE("plane wave transforms to a single unit mode") {
    const GridSpec g(1, 64, 10.0);
    for (int m : {0, 3, 40, 63}) {
        SpinorArray pos = SpinorArray::Zero(4, 64);
        for (int j = 0; j < 64; ++j) {
            pos(2, j) = std::polar(1.0 / 8.0, g.wavenumber(m) * g.coordinate(j));
        }
        const SpinorArray k = position_to_momentum(g, pos);
        for (int j = 0; j < 64; ++j) {
            const double expected = j == m ? 1.0 : 0.0;
            CHECK(std::abs(k(2, j) - expected) < 1e-13);
            CHECK(std::abs(k(0, j)) == 0.0);
        }
    }
}

TEST_CASE("transforms are unitary inverses in 1D and 3D") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (const GridSpec& g : {GridSpec(1, 128, 7.0), GridSpec(3, 16, 5.0)}) {
        SpinorArray a(4, static_cast<Eigen::Index>(g.size()));
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            for (int c = 0; c < 4; ++c) a(c, j) = Complex(normal(rng), normal(rng));
        }
        const SpinorArray k = position_to_momentum(g, a);
        CHECK(squared_norm(k) == doctest::Approx(squared_norm(a)).epsilon(1e-13));
        CHECK((momentum_to_position(g, k) - a).norm() < 1e-12 * a.norm());
    }
}

TEST_CASE("spinor field views and inner product") {
    const GridSpec g(1, 64, 10.0);
    SpinorArray pos = SpinorArray::Zero(4, 64);
    pos(0, 10) = 3.0;
    pos(1, 11) = Complex(0.0, 4.0);
    const SpinorField f = SpinorField::from_position(g, pos);
    CHECK(f.has_position_view());
    CHECK(f.norm() == doctest::Approx(5.0));
    const SpinorField k_only = SpinorField::from_momentum(g, f.momentum_view());
    CHECK_FALSE(k_only.has_position_view());
    CHECK_THROWS_AS(k_only.position_view(), std::logic_error);
    CHECK((to_position(k_only).position_view() - pos).norm() < 1e-13);
    CHECK(std::abs(inner_product(pos, pos) - 25.0) < 1e-13);
}

TEST_CASE("unprojected Gaussian has the analytic moments") {
    const GridSpec g(1, 2048, 400.0);
    PacketSpec spec;
    spec.center = Eigen::Vector3d(12.5, 0, 0);
    spec.width = 7.0;
    spec.mean_momentum = Eigen::Vector3d(0.8, 0, 0);
    spec.project_positive = false;
    const SpinorField f = build_packet(spec, g);
    CHECK(f.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const ExpectationReport e = expect_all(f);
    CHECK(e.r_mean[0] == doctest::Approx(12.5).epsilon(1e-12));
    CHECK(e.r2_mean - e.r_mean[0] * e.r_mean[0] == doctest::Approx(49.0).epsilon(1e-10));
    CHECK(e.p_mean[0] == doctest::Approx(0.8).epsilon(1e-12));
    const double dp2 = 1.0 / (4.0 * 49.0);
    CHECK(e.p2_mean - 0.64 == doctest::Approx(dp2).epsilon(1e-10));
    // The upper-spin seed has no alpha component: <H> = <beta> = 1.
    CHECK(e.beta_mean == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.h_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.h2_mean == doctest::Approx(1.0 + 0.64 + dp2).epsilon(1e-12));
}

TEST_CASE("projected Gaussian matches the mode-sum oracle") {
    const GridSpec g(1, 4096, 400.0);
    PacketSpec spec;
    spec.width = 20.0;
    spec.mean_momentum = Eigen::Vector3d(0.1, 0, 0);
    const SpinorField f = build_packet(spec, g);
    const auto ref = oracle::projected_gaussian(4096, 400.0, 20.0, 0.1);
    const ExpectationReport e = expect_all(f);
    CHECK(e.beta_mean == doctest::Approx(ref.beta).epsilon(1e-12));
    CHECK(e.p_mean[0] == doctest::Approx(ref.p).epsilon(1e-12));
    CHECK(e.h_mean == doctest::Approx(ref.h).epsilon(1e-12));
    CHECK(std::abs(e.p_mean[0] - 0.1) < 1e-4);
    CHECK(positive_energy_fraction(f) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rest packet: positive fraction 1, <beta> close to 1") {
    const GridSpec g(1, 4096, 400.0);
    PacketSpec spec;
    const SpinorField f = build_packet(spec, g);
    const auto ref = oracle::projected_gaussian(4096, 400.0, 10.0, 0.0);
    CHECK(positive_energy_fraction(f) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(expect_all(f).beta_mean == doctest::Approx(ref.beta).epsilon(1e-12));
    CHECK(ref.beta > 0.998);
}

TEST_CASE("branch projections split the norm") {
    const GridSpec g(1, 1024, 200.0);
    PacketSpec spec;
    spec.mean_momentum = Eigen::Vector3d(0.7, 0, 0);
    spec.spinor_seed = Spinor(1.0, 0.0, 0.0, 1.0);
    spec.project_positive = false;
    const SpinorField f = build_packet(spec, g);
    const SpinorField plus = project(f, EnergyBranch::kPositive);
    const SpinorField minus = project(f, EnergyBranch::kNegative);
    CHECK(squared_norm(plus.momentum_view()) + squared_norm(minus.momentum_view()) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(inner_product(plus.momentum_view(), minus.momentum_view())) < 1e-14);
    CHECK(positive_energy_fraction(plus) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(positive_energy_fraction(minus) < 1e-14);
    CHECK(positive_energy_fraction(f) == doctest::Approx(squared_norm(plus.momentum_view())));
}

TEST_CASE("packet guards") {
    const GridSpec g(1, 1024, 400.0);  // spacing 0.39, max wavenumber 8.04
    PacketSpec spec;
    SUBCASE("under-resolved width") {
        spec.width = 1.0;
        CHECK_THROWS_AS(build_packet(spec, g), GuardError);
    }
    SUBCASE("too wide") {
        spec.width = 60.0;
        CHECK_THROWS_AS(build_packet(spec, g), GuardError);
    }
    SUBCASE("momentum beyond the lattice") {
        spec.mean_momentum = Eigen::Vector3d(7.9, 0, 0);
        CHECK_THROWS_AS(build_packet(spec, g), GuardError);
    }
    SUBCASE("centered outside the guard region") {
        spec.center = Eigen::Vector3d(95.0, 0, 0);
        CHECK_THROWS_AS(build_packet(spec, g), GuardError);
    }
    SUBCASE("zero field cannot be normalized") {
        const SpinorField zero = SpinorField::from_momentum(g, SpinorArray::Zero(4, 1024));
        CHECK_THROWS_AS(normalized(zero), GuardError);
    }
    SUBCASE("invalid inputs") {
        spec.spinor_seed = Spinor::Zero();
        CHECK_THROWS_AS(build_packet(spec, g), ValidationError);
        spec = PacketSpec{};
        spec.center = Eigen::Vector3d(0, 1.0, 0);
        CHECK_THROWS_AS(build_packet(spec, g), ValidationError);
        spec = PacketSpec{};
        spec.width = std::nan("");
        CHECK_THROWS_AS(build_packet(spec, g), ValidationError);
    }
}

TEST_CASE("random packet specs always pass the guards") {
    std::mt19937_64 rng(5);
    for (const GridSpec& g : {GridSpec(1, 1024, 400.0), GridSpec(1, 256, 50.0)}) {
        for (int i = 0; i < 40; ++i) {
            PacketSpec spec = random_packet_spec(g, rng);
            spec.project_positive = i % 2 == 0;
            const SpinorField f = to_position(build_packet(spec, g));
            CHECK(localization_fraction(f) >= kLocalizationThreshold);
        }
    }
    const GridSpec cube(3, 64, 60.0);
    for (int i = 0; i < 3; ++i) CHECK_NOTHROW(build_packet(random_packet_spec(cube, rng), cube));
}

TEST_CASE("snapshot layout") {
    const GridSpec g(1, 16, 16.0);
    const SpinorField f = sample_field(g, [](const Eigen::Vector3d& r) {
        return Spinor(std::exp(-r.squaredNorm()), 0.0, 0.0, 0.0);
    });
    std::ostringstream out;
    write_snapshot(out, f);
    std::istringstream in(out.str());
    int dim = 0, n = 0;
    double box = 0;
    in >> dim >> n >> box;
    CHECK(dim == 1);
    CHECK(n == 16);
    CHECK(box == 16.0);
    std::size_t index = 99;
    double values[8];
    in >> index;
    for (double& v : values) in >> v;
    CHECK(index == 0);
    CHECK(values[0] == doctest::Approx(std::real(f.position_view()(0, 0))));
}
