#include "diractime/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <ostream>
#include <random>
#include <sstream>

#include "diractime/errors.hpp"
#include "diractime/evolution.hpp"
#include "diractime/format.hpp"
#include "diractime/selfcheck.hpp"
#include "diractime/tunneling.hpp"
#include "diractime/wavepacket.hpp"

namespace diractime {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Writes `content` to `path` in one go; the only place the CLI touches disk.
void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("io: cannot open '" + path + "' for writing");
    file << content;
    file.flush();
    if (!file) throw Error("io: failed writing '" + path + "'");
}

void emit_summary(const RunConfig& cfg, const std::string& summary, std::ostream& log) {
    write_file(cfg.out + ".summary", summary);
    log << summary;
}

int run_evolve(const RunConfig& cfg, std::ostream& log) {
    const GridSpec grid = make_grid(cfg);
    const SpinorField f0 = to_position(build_packet(cfg.packet, grid));
    if (!cfg.snapshot.empty()) {
        std::ostringstream snap;
        write_snapshot(snap, f0);
        write_file(cfg.snapshot, snap.str());
    }
    const double horizon = effective_horizon(cfg);
    const ObservableSeries series = run_series(f0, horizon, cfg.samples, cfg.tau0);

    std::ostringstream csv;
    write_series_csv(csv, series);
    write_file(cfg.out, csv.str());

    std::ostringstream summary;
    write_key_value(summary, "horizon", horizon);
    write_key_value(summary, "samples", static_cast<double>(series.size()));
    write_key_value(summary, "partial", series.partial ? "true" : "false");
    if (series.partial) write_key_value(summary, "failure", series.failure);
    write_key_value(summary, "velocity_ratio_squared", velocity_ratio_squared(f0));
    write_key_value(summary, "group_velocity_x", group_velocity(f0)[0]);

    const auto drift = [&](SeriesColumn column, const std::string& prefix) {
        try {
            const DriftAnalysis d = analyze_drift(series, column);
            write_key_value(summary, prefix + "slope", d.slope);
            write_key_value(summary, prefix + "intercept", d.intercept);
            write_key_value(summary, prefix + "oscillation_amplitude", d.oscillation_amplitude);
            write_key_value(summary, prefix + "oscillation_frequency", d.oscillation_frequency);
            write_key_value(summary, prefix + "fit_residual", d.fit_residual);
        } catch (const ValidationError& e) {
            write_key_value(summary, prefix + "slope", kNaN);
            write_key_value(summary, prefix + "drift_note", e.what());
        }
    };
    drift(SeriesColumn::kTimeOperator, "");
    drift(SeriesColumn::kPositionX, "x_");

    if (series.size() >= 3) {
        const auto& mid = series.samples[series.size() / 2].uncertainty;
        try {
            const double mt = mt_from_series(series, SeriesColumn::kTimeOperator);
            write_key_value(summary, "mt_time", mt);
            write_key_value(summary, "mt_time_times_delta_h", mt * mid.delta_h);
            write_key_value(summary, "mt_over_delta_t", mt / mid.delta_t);
        } catch (const UndefinedMtError& e) {
            write_key_value(summary, "mt_time", kNaN);
            write_key_value(summary, "mt_note", e.what());
        }
    }
    emit_summary(cfg, summary.str(), log);
    if (series.partial) {
        throw GuardError(series.failure + " (partial series written to '" + cfg.out + "')");
    }
    return kExitOk;
}

struct FamilyMember {
    std::string label;
    PacketSpec spec;
};

std::vector<FamilyMember> uncertainty_family(const RunConfig& cfg, const GridSpec& grid) {
    std::vector<FamilyMember> family{{"configured", cfg.packet}};
    for (std::size_t i = 0; i < cfg.family_sigma.size(); ++i) {
        PacketSpec spec = cfg.packet;
        spec.width = cfg.family_sigma[i];
        family.push_back({"sigma_" + std::to_string(i), spec});
    }
    std::mt19937_64 rng(cfg.rng_seed);
    for (int i = 0; i < cfg.family_random; ++i) {
        PacketSpec spec = random_packet_spec(grid, rng);
        spec.project_positive = cfg.packet.project_positive;
        family.push_back({"random_" + std::to_string(i), spec});
    }
    return family;
}

int run_uncertainty(const RunConfig& cfg, std::ostream& log) {
    const GridSpec grid = make_grid(cfg);
    const auto family = uncertainty_family(cfg, grid);

    std::ostringstream csv;
    std::vector<std::string> header{"label", "sigma", "p0_x", "p0_y", "p0_z", "project"};
    for (auto& h : uncertainty_csv_header()) header.push_back(h);
    for (auto& h : expectation_csv_header()) header.push_back(h);
    header.insert(header.end(), {"comm_closed_re", "comm_closed_im"});
    write_csv_row(csv, header);

    std::size_t satisfied = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    double max_closed_form_gap = 0.0;
    for (const auto& member : family) {
        const SpinorField f = to_position(build_packet(member.spec, grid));
        if (&member == &family.front() && !cfg.snapshot.empty()) {
            std::ostringstream snap;
            write_snapshot(snap, f);
            write_file(cfg.snapshot, snap.str());
        }
        const ExpectationReport e = expect_all(f, cfg.tau0);
        const UncertaintyReport u = uncertainty_report(e);
        const Complex closed = commutator_th_closed_form(f, cfg.tau0);
        satisfied += u.satisfied_robertson ? 1 : 0;
        min_slack = std::min(min_slack, u.product_th - u.robertson_bound);
        max_closed_form_gap = std::max(
            max_closed_form_gap, std::abs(closed - e.commutator_th) / std::abs(e.commutator_th));

        std::vector<std::string> row{member.label, format_double(member.spec.width),
                                     format_double(member.spec.mean_momentum[0]),
                                     format_double(member.spec.mean_momentum[1]),
                                     format_double(member.spec.mean_momentum[2]),
                                     member.spec.project_positive ? "true" : "false"};
        for (auto& c : uncertainty_csv_row(u)) row.push_back(c);
        for (auto& c : expectation_csv_row(e)) row.push_back(c);
        row.push_back(format_double(closed.real()));
        row.push_back(format_double(closed.imag()));
        write_csv_row(csv, row);
    }
    write_file(cfg.out, csv.str());

    std::ostringstream summary;
    write_key_value(summary, "members", static_cast<double>(family.size()));
    write_key_value(summary, "robertson_satisfied", static_cast<double>(satisfied));
    write_key_value(summary, "min_robertson_slack", min_slack);
    write_key_value(summary, "max_closed_form_relative_gap", max_closed_form_gap);
    emit_summary(cfg, summary.str(), log);
    return kExitOk;
}

int run_tunneling(const RunConfig& cfg, std::ostream& log) {
    std::optional<Calibration> calibration;
    double ratio = 0.0;
    if (cfg.velocity_ratio) {
        ratio = *cfg.velocity_ratio;
    } else {
        calibration = calibrate_velocity(cfg.calibration);
        ratio = calibration->velocity_ratio;
    }

    std::vector<SweepRow> rows;
    for (double width : cfg.widths) {
        rows.push_back(sweep_row(cfg.ip, cfg.z_eff, ratio,
                                 field_for_width(cfg.ip, cfg.z_eff, width), cfg.direction_factor));
    }
    if (cfg.field) {
        TunnelingScenario sc;
        sc.ip = cfg.ip;
        sc.z_eff = cfg.z_eff;
        sc.field = *cfg.field;
        sc.direction_factor = cfg.direction_factor;
        validate_scenario(sc);
        rows.push_back(sweep_row(cfg.ip, cfg.z_eff, ratio, *cfg.field, cfg.direction_factor));
    }
    if (cfg.sweep) {
        for (const auto& row :
             intensity_sweep(cfg.ip, cfg.z_eff, ratio, *cfg.sweep, cfg.direction_factor)) {
            rows.push_back(row);
        }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.field < b.field; });

    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_file(cfg.out, csv.str());

    std::ostringstream summary;
    write_key_value(summary, "velocity_ratio", ratio);
    write_key_value(summary, "inverse_velocity_ratio", 1.0 / ratio);
    if (calibration) write_key_value(summary, "group_velocity_mps", calibration->group_velocity_mps);
    write_key_value(summary, "direction_factor", cfg.direction_factor);
    write_key_value(summary, "rows", static_cast<double>(rows.size()));
    const auto over = std::count_if(rows.begin(), rows.end(),
                                    [](const SweepRow& r) { return r.over_barrier; });
    write_key_value(summary, "over_barrier_rows", static_cast<double>(over));
    emit_summary(cfg, summary.str(), log);
    return kExitOk;
}

int run_selfcheck_mode(const RunConfig& cfg, std::ostream& log) {
    SelfcheckOptions options;
    options.tol_picture = cfg.tol_picture;
    options.tol_identity = cfg.tol_identity;
    options.rng_seed = cfg.rng_seed;
    const auto results = run_selfcheck(options);
    write_check_table(log, results);
    std::ostringstream csv;
    write_check_csv(csv, results);
    write_file(cfg.out, csv.str());
    const bool ok = std::all_of(results.begin(), results.end(),
                                [](const CheckResult& r) { return r.passed; });
    return ok ? kExitOk : kExitSelfcheck;
}

}  // namespace

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const GuardError& e) {
        err << "error: " << e.what() << '\n';
        return kExitGuard;
    } catch (const UndefinedMtError& e) {
        err << "error: " << e.what() << '\n';
        return kExitGuard;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory; reduce n\n";
        return kExitGuard;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitGuard;
    }
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded(
        [&]() -> int {
            switch (cfg.mode) {
                case Mode::kEvolve: return run_evolve(cfg, log);
                case Mode::kUncertainty: return run_uncertainty(cfg, log);
                case Mode::kTunneling: return run_tunneling(cfg, log);
                case Mode::kSelfcheck: return run_selfcheck_mode(cfg, log);
            }
            return kExitValidation;
        },
        err);
}

}  // namespace diractime
