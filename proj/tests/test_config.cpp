#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "diractime/config.hpp"
#include "diractime/errors.hpp"
#include "diractime/format.hpp"
#include "diractime/parallel.hpp"
#include "diractime/run.hpp"

using namespace diractime;

namespace {

std::string error_of(std::string_view text, Mode mode) {
    try {
        parse_config(text, mode);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("empty document gives the evolve defaults") {
    const RunConfig cfg = parse_config("", Mode::kEvolve);
    CHECK(cfg.dim == 1);
    CHECK(cfg.n == 4096);
    CHECK(cfg.box_length == 400.0);
    CHECK(cfg.packet.width == 10.0);
    CHECK(cfg.packet.mean_momentum[0] == 0.1);
    CHECK(cfg.packet.project_positive);
    CHECK(cfg.tau0 == doctest::Approx(2.0 * std::numbers::pi));
    CHECK_FALSE(cfg.horizon.has_value());
    CHECK(cfg.out == "evolve.csv");
}

TEST_CASE("n must be a power of two") {
    CHECK(error_of("n = 17", Mode::kEvolve).find("n must be a power of two >= 16") != std::string::npos);
    CHECK(error_of("n = 8", Mode::kEvolve).find("power of two") != std::string::npos);
    CHECK(error_of("n = abc", Mode::kEvolve).find("integer") != std::string::npos);
}

TEST_CASE("tunneling regression scenario") {
    const RunConfig cfg = parse_config("field = 0.04\nip = 0.5792\nzeff = 1\n", Mode::kTunneling);
    REQUIRE(cfg.field.has_value());
    CHECK(*cfg.field == 0.04);
    CHECK(cfg.ip == 0.5792);
    CHECK(cfg.z_eff == 1.0);
    CHECK(cfg.ip * cfg.ip - 4.0 * cfg.z_eff * *cfg.field > 0.0);
}

TEST_CASE("comments, whitespace and value lists") {
    const RunConfig cfg = parse_config(
        "# packet\n  sigma = 12.5   # wider\n\np0 = 0.3\nseed = 1, 0, 0, 1\nseed_imag = 0,0.5,0,0\n"
        "project = false\n",
        Mode::kUncertainty);
    CHECK(cfg.packet.width == 12.5);
    CHECK(cfg.packet.mean_momentum[0] == 0.3);
    CHECK(cfg.packet.spinor_seed[3] == Complex(1.0, 0.0));
    CHECK(cfg.packet.spinor_seed[1] == Complex(0.0, 0.5));
    CHECK_FALSE(cfg.packet.project_positive);
}

TEST_CASE("overrides take precedence") {
    const RunConfig cfg =
        parse_config("samples = 128\n", Mode::kEvolve, {{"samples", "300"}, parse_override("out=x.csv")});
    CHECK(cfg.samples == 300);
    CHECK(cfg.out == "x.csv");
    CHECK_THROWS_AS(parse_override("novalue"), ValidationError);
}

TEST_CASE("rejected documents name the key") {
    CHECK(error_of("colour = red", Mode::kEvolve).find("unknown key 'colour'") != std::string::npos);
    CHECK(error_of("just words", Mode::kEvolve).find("line 1") != std::string::npos);
    CHECK(error_of("field = 0.04", Mode::kEvolve).find("does not apply") != std::string::npos);
    CHECK(error_of("sigma = 0.1", Mode::kEvolve).find("sigma") != std::string::npos);
    CHECK(error_of("sigma = 60", Mode::kEvolve).find("box_length / 8") != std::string::npos);
    CHECK(error_of("dim = 2", Mode::kEvolve).find("1 or 3") != std::string::npos);
    CHECK(error_of("p0 = 0.1, 0.2", Mode::kEvolve).find("p0") != std::string::npos);
    CHECK(error_of("seed = 0,0,0,0", Mode::kEvolve).find("non-zero") != std::string::npos);
    CHECK(error_of("seed = 1,0", Mode::kEvolve).find("4 comma-separated") != std::string::npos);
    CHECK(error_of("center = 150", Mode::kEvolve).find("guard") != std::string::npos);
    CHECK(error_of("samples = 3", Mode::kEvolve).find("samples") != std::string::npos);
    CHECK(error_of("horizon = -1", Mode::kEvolve).find("horizon") != std::string::npos);
    CHECK(error_of("project = maybe", Mode::kEvolve).find("boolean") != std::string::npos);
    CHECK(error_of("velocity_ratio = 2", Mode::kTunneling).find("(0, 1]") != std::string::npos);
    CHECK(error_of("ip = 0", Mode::kTunneling).find("ip") != std::string::npos);
}

TEST_CASE("conflicting tunneling parameters") {
    CHECK(error_of("velocity_ratio = 0.01\ncalib_width_au = 13", Mode::kTunneling).find("conflicts") !=
          std::string::npos);
    CHECK(error_of("field = 0.04\nfield_min = 0.02\nfield_max = 0.05", Mode::kTunneling)
              .find("conflicts") != std::string::npos);
    CHECK(error_of("field_min = 0.02", Mode::kTunneling).find("both") != std::string::npos);
    CHECK(error_of("field_min = 0.05\nfield_max = 0.02", Mode::kTunneling).find("field_max") !=
          std::string::npos);
    const RunConfig cfg =
        parse_config("field_min = 0.02\nfield_max = 0.06\nfield_count = 9", Mode::kTunneling);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->count == 9);
}

TEST_CASE("3D defaults and automatic horizon") {
    const RunConfig cube = parse_config("dim = 3\np0 = 0.1,0,0", Mode::kUncertainty);
    CHECK(cube.n == 64);
    CHECK(cube.box_length == 60.0);
    CHECK(cube.packet.width == 5.0);

    const RunConfig slow = parse_config("", Mode::kEvolve);
    CHECK(effective_horizon(slow) == doctest::Approx(40.0 * std::numbers::pi));
    const RunConfig fast = parse_config("p0 = 20", Mode::kEvolve);
    const double h = effective_horizon(fast);
    // Sampling limit 0.9 * 255 * pi / (2 E)
    CHECK(h == doctest::Approx(0.9 * 255 * std::numbers::pi / (2.0 * std::sqrt(401.0))));
    const RunConfig fixed = parse_config("horizon = 3.5", Mode::kEvolve);
    CHECK(effective_horizon(fixed) == 3.5);
}

TEST_CASE("mode names round trip") {
    for (Mode m : {Mode::kEvolve, Mode::kUncertainty, Mode::kTunneling, Mode::kSelfcheck}) {
        CHECK(parse_mode(mode_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_mode("plot"), ValidationError);
}

TEST_CASE("number formatting is fixed at 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(85.4) == "85.400000000000006");
    CHECK(format_double(1e-20) == "9.9999999999999995e-21");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(std::stod(format_double(std::numbers::pi)) == std::numbers::pi);
}

TEST_CASE("CSV cells are quoted only when needed") {
    std::ostringstream out;
    write_csv_row(out, {"a", "b,c", "say \"hi\"", "1.5"});
    CHECK(out.str() == "a,\"b,c\",\"say \"\"hi\"\"\",1.5\n");
}

TEST_CASE("parallel_for covers the range once and propagates errors") {
    for (const char* workers : {"1", "3", "8"}) {
        setenv(kWorkersEnv, workers, 1);
        std::vector<std::atomic<int>> hits(1001);
        parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) hits[i]++;
        });
        for (const auto& h : hits) CHECK(h.load() == 1);
        CHECK_THROWS_AS(parallel_for(100,
                                     [](std::size_t b, std::size_t) {
                                         if (b > 0 || true) throw GuardError("boom");
                                     }),
                        GuardError);
    }
    setenv(kWorkersEnv, "0", 1);
    CHECK(worker_count() == 1);
    unsetenv(kWorkersEnv);
    CHECK(worker_count() == 1);
}

TEST_CASE("run writes tunneling artifacts and maps errors to exit codes") {
    const auto dir = std::filesystem::temp_directory_path() / "diractime_test_config";
    std::filesystem::create_directories(dir);
    RunConfig cfg = parse_config("", Mode::kTunneling);
    cfg.out = (dir / "tun.csv").string();
    std::ostringstream log, err;
    CHECK(run(cfg, log, err) == kExitOk);
    std::ifstream csv(cfg.out);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "F_au,width_au,width_angstrom,internal_time_as,lab_time_as");
    CHECK(std::filesystem::exists(cfg.out + ".summary"));
    CHECK(log.str().find("inverse_velocity_ratio=") != std::string::npos);

    cfg.field = 0.5;
    CHECK(run(cfg, log, err) == kExitValidation);
    CHECK(err.str().find("no tunneling barrier") != std::string::npos);

    cfg.field.reset();
    cfg.out = (dir / "missing" / "deeper" / "x.csv").string();
    CHECK(run(cfg, log, err) == kExitValidation);
    CHECK(err.str().find("io:") != std::string::npos);

    RunConfig evolve = parse_config("center = 60\np0 = 2\nhorizon = 100\nsamples = 16\nn = 1024",
                                    Mode::kEvolve);
    evolve.out = (dir / "ev.csv").string();
    CHECK(run(evolve, log, err) == kExitGuard);
    CHECK(std::filesystem::exists(evolve.out));
}
