#include "diractime/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "diractime/errors.hpp"
#include "diractime/format.hpp"

namespace diractime {

namespace {

constexpr unsigned kEvolve = 1u << 0;
constexpr unsigned kUncertainty = 1u << 1;
constexpr unsigned kTunneling = 1u << 2;
constexpr unsigned kSelfcheck = 1u << 3;
constexpr unsigned kAllModes = kEvolve | kUncertainty | kTunneling | kSelfcheck;
constexpr unsigned kPacketModes = kEvolve | kUncertainty;

unsigned mode_bit(Mode mode) {
    switch (mode) {
        case Mode::kEvolve: return kEvolve;
        case Mode::kUncertainty: return kUncertainty;
        case Mode::kTunneling: return kTunneling;
        case Mode::kSelfcheck: return kSelfcheck;
    }
    return 0;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& expected) {
    throw ValidationError("config: " + key + " must be " + expected);
}

double to_double(const std::string& key, std::string_view value) {
    value = trim(value);
    double out = 0.0;
    const auto result = std::from_chars(value.data(), value.data() + value.size(), out);
    if (result.ec != std::errc() || result.ptr != value.data() + value.size() ||
        !std::isfinite(out)) {
        fail(key, "a finite number (got '" + std::string(value) + "')");
    }
    return out;
}

long long to_integer(const std::string& key, std::string_view value) {
    value = trim(value);
    long long out = 0;
    const auto result = std::from_chars(value.data(), value.data() + value.size(), out);
    if (result.ec != std::errc() || result.ptr != value.data() + value.size()) {
        fail(key, "an integer (got '" + std::string(value) + "')");
    }
    return out;
}

bool to_bool(const std::string& key, std::string_view value) {
    value = trim(value);
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    fail(key, "a boolean (true/false)");
}

std::vector<double> to_list(const std::string& key, std::string_view value) {
    std::vector<double> out;
    while (true) {
        const auto comma = value.find(',');
        out.push_back(to_double(key, value.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return out;
}

Eigen::Vector3d to_vector3(const std::string& key, std::string_view value) {
    const auto list = to_list(key, value);
    if (list.size() > 3) fail(key, "a list of at most 3 numbers");
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < list.size(); ++i) v[static_cast<Eigen::Index>(i)] = list[i];
    return v;
}

bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

struct KeySpec {
    std::string_view name;
    unsigned modes;
    std::function<void(RunConfig&, const std::string&, std::string_view)> apply;
};

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = {
        {"dim", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const auto d = to_integer(k, v);
             if (d != 1 && d != 3) fail(k, "1 or 3");
             c.dim = static_cast<int>(d);
         }},
        {"n", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const auto n = to_integer(k, v);
             if (n < 16 || !is_power_of_two(n) || n > (1 << 24)) fail(k, "a power of two >= 16");
             c.n = static_cast<int>(n);
         }},
        {"box_length", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.box_length = to_double(k, v);
             if (!(c.box_length > 0.0)) fail(k, "positive");
         }},
        {"sigma", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.packet.width = to_double(k, v);
             if (!(c.packet.width > 0.0)) fail(k, "positive");
         }},
        {"center", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.packet.center = to_vector3(k, v);
         }},
        {"p0", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.packet.mean_momentum = to_vector3(k, v);
         }},
        {"seed", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const auto list = to_list(k, v);
             if (list.size() != 4) fail(k, "4 comma-separated numbers");
             for (int i = 0; i < 4; ++i) {
                 c.packet.spinor_seed[i] = Complex(list[i], c.packet.spinor_seed[i].imag());
             }
         }},
        {"seed_imag", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const auto list = to_list(k, v);
             if (list.size() != 4) fail(k, "4 comma-separated numbers");
             for (int i = 0; i < 4; ++i) {
                 c.packet.spinor_seed[i] = Complex(c.packet.spinor_seed[i].real(), list[i]);
             }
         }},
        {"project", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.packet.project_positive = to_bool(k, v);
         }},
        {"tau0", kPacketModes,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.tau0 = to_double(k, v);
             if (!(c.tau0 > 0.0)) fail(k, "positive");
         }},
        {"horizon", kEvolve,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const double h = to_double(k, v);
             if (!(h > 0.0)) fail(k, "positive");
             c.horizon = h;
         }},
        {"samples", kEvolve,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const auto s = to_integer(k, v);
             if (s < 8 || s > 1000000) fail(k, "an integer in [8, 1000000]");
             c.samples = static_cast<int>(s);
         }},
        {"snapshot", kPacketModes,
         [](RunConfig& c, const std::string&, std::string_view v) { c.snapshot = trim(v); }},
        {"family_sigma", kUncertainty,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.family_sigma = to_list(k, v);
             for (double s : c.family_sigma) {
                 if (!(s > 0.0)) fail(k, "a list of positive widths");
             }
         }},
        {"family_random", kUncertainty,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const auto n = to_integer(k, v);
             if (n < 0 || n > 100000) fail(k, "an integer in [0, 100000]");
             c.family_random = static_cast<int>(n);
         }},
        {"rng_seed", kUncertainty | kSelfcheck,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const auto n = to_integer(k, v);
             if (n < 0) fail(k, "a non-negative integer");
             c.rng_seed = static_cast<std::uint64_t>(n);
         }},
        {"ip", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.ip = to_double(k, v);
             if (!(c.ip > 0.0)) fail(k, "positive (Hartree)");
         }},
        {"zeff", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.z_eff = to_double(k, v);
             if (!(c.z_eff > 0.0)) fail(k, "positive");
         }},
        {"field", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const double f = to_double(k, v);
             if (!(f > 0.0)) fail(k, "positive (atomic units)");
             c.field = f;
         }},
        {"field_min", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const double f = to_double(k, v);
             if (!(f > 0.0)) fail(k, "positive (atomic units)");
             if (!c.sweep) c.sweep = FieldRange{};
             c.sweep->min = f;
         }},
        {"field_max", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const double f = to_double(k, v);
             if (!(f > 0.0)) fail(k, "positive (atomic units)");
             if (!c.sweep) c.sweep = FieldRange{};
             c.sweep->max = f;
         }},
        {"field_count", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const auto n = to_integer(k, v);
             if (n < 1 || n > 1000000) fail(k, "an integer in [1, 1000000]");
             if (!c.sweep) c.sweep = FieldRange{};
             c.sweep->count = static_cast<int>(n);
         }},
        {"widths", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.widths.clear();
             if (trim(v).empty()) return;
             c.widths = to_list(k, v);
             for (double w : c.widths) {
                 if (!(w >= 0.0)) fail(k, "a list of non-negative widths (atomic units)");
             }
         }},
        {"calib_lab_time_as", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const double t = to_double(k, v);
             if (!(t > 0.0)) fail(k, "positive (attoseconds)");
             c.calibration.lab_time_s = t * 1e-18;
         }},
        {"calib_width_au", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.calibration.width_au = to_double(k, v);
             if (!(c.calibration.width_au > 0.0)) fail(k, "positive (atomic units)");
         }},
        {"velocity_ratio", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             const double r = to_double(k, v);
             if (!(r > 0.0 && r <= 1.0)) fail(k, "in (0, 1]");
             c.velocity_ratio = r;
         }},
        {"direction_factor", kTunneling,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.direction_factor = to_double(k, v);
             if (!(c.direction_factor > 0.0)) fail(k, "positive");
         }},
        {"out", kAllModes,
         [](RunConfig& c, const std::string&, std::string_view v) { c.out = trim(v); }},
        {"tol_picture", kSelfcheck,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.tol_picture = to_double(k, v);
             if (!(c.tol_picture > 0.0)) fail(k, "positive");
         }},
        {"tol_identity", kSelfcheck,
         [](RunConfig& c, const std::string& k, std::string_view v) {
             c.tol_identity = to_double(k, v);
             if (!(c.tol_identity > 0.0)) fail(k, "positive");
         }},
    };
    return table;
}

void validate_packet(RunConfig& cfg, const std::set<std::string>& seen) {
    if (cfg.dim == 3) {
        if (!seen.count("n")) cfg.n = 64;
        if (!seen.count("box_length")) cfg.box_length = 60.0;
        if (!seen.count("sigma")) cfg.packet.width = 5.0;
    }
    const GridSpec grid = make_grid(cfg);
    const auto check_width = [&](const std::string& key, double width) {
        if (width < 4.0 * grid.spacing() || width > grid.box_length() / 8.0) {
            fail(key, "in [4 * spacing, box_length / 8] = [" + format_double(4.0 * grid.spacing()) +
                          ", " + format_double(grid.box_length() / 8.0) + "]");
        }
    };
    check_width("sigma", cfg.packet.width);
    for (double w : cfg.family_sigma) check_width("family_sigma", w);
    for (int a = cfg.dim; a < 3; ++a) {
        if (cfg.packet.center[a] != 0.0) fail("center", "one-component on a 1D grid");
        if (cfg.packet.mean_momentum[a] != 0.0) fail("p0", "one-component on a 1D grid");
    }
    if (cfg.packet.spinor_seed.squaredNorm() == 0.0) fail("seed", "non-zero");
    if (cfg.packet.center.cwiseAbs().maxCoeff() >= grid.guard_half_width()) {
        fail("center", "inside the guard region |x| < " + format_double(grid.guard_half_width()));
    }
}

void validate_tunneling(const RunConfig& cfg, const std::set<std::string>& seen) {
    const bool calibrated = seen.count("calib_lab_time_as") || seen.count("calib_width_au");
    if (calibrated && seen.count("velocity_ratio")) {
        throw ValidationError(
            "config: velocity_ratio conflicts with calib_lab_time_as/calib_width_au; set one or the "
            "other");
    }
    if (cfg.field && cfg.sweep) {
        throw ValidationError("config: field conflicts with field_min/field_max/field_count");
    }
    if (cfg.sweep) {
        if (!seen.count("field_min") || !seen.count("field_max")) {
            throw ValidationError("config: a field sweep needs both field_min and field_max");
        }
        if (cfg.sweep->max < cfg.sweep->min) fail("field_max", ">= field_min");
    }
}

}  // namespace

Mode parse_mode(std::string_view name) {
    if (name == "evolve") return Mode::kEvolve;
    if (name == "uncertainty") return Mode::kUncertainty;
    if (name == "tunneling") return Mode::kTunneling;
    if (name == "selfcheck") return Mode::kSelfcheck;
    throw ValidationError("config: unknown mode '" + std::string(name) +
                          "' (expected evolve, uncertainty, tunneling or selfcheck)");
}

std::string_view mode_name(Mode mode) {
    switch (mode) {
        case Mode::kEvolve: return "evolve";
        case Mode::kUncertainty: return "uncertainty";
        case Mode::kTunneling: return "tunneling";
        case Mode::kSelfcheck: return "selfcheck";
    }
    return "unknown";
}

ConfigEntries parse_entries(std::string_view text) {
    ConfigEntries entries;
    std::size_t line_number = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_number;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
            throw ValidationError("config: line " + std::to_string(line_number) +
                                  " is not of the form 'key = value'");
        }
        entries.emplace_back(std::string(trim(line.substr(0, eq))),
                             std::string(trim(line.substr(eq + 1))));
    }
    return entries;
}

std::pair<std::string, std::string> parse_override(std::string_view text) {
    const auto entries = parse_entries(text);
    if (entries.size() != 1) {
        throw ValidationError("config: --set expects a single key=value, got '" +
                              std::string(text) + "'");
    }
    return entries.front();
}

RunConfig parse_config(std::string_view text, Mode mode, const ConfigEntries& overrides) {
    ConfigEntries entries = parse_entries(text);
    entries.insert(entries.end(), overrides.begin(), overrides.end());

    RunConfig cfg;
    cfg.mode = mode;
    cfg.packet.mean_momentum = Eigen::Vector3d(0.1, 0.0, 0.0);
    std::set<std::string> seen;
    const unsigned bit = mode_bit(mode);
    for (const auto& [key, value] : entries) {
        const auto& table = key_table();
        const auto it = std::find_if(table.begin(), table.end(),
                                     [&](const KeySpec& s) { return s.name == key; });
        if (it == table.end()) throw ValidationError("config: unknown key '" + key + "'");
        if (!(it->modes & bit)) {
            throw ValidationError("config: key '" + key + "' does not apply to mode '" +
                                  std::string(mode_name(mode)) + "'");
        }
        it->apply(cfg, key, value);
        seen.insert(key);
    }

    if (mode == Mode::kEvolve || mode == Mode::kUncertainty) validate_packet(cfg, seen);
    if (mode == Mode::kTunneling) validate_tunneling(cfg, seen);
    if (cfg.out.empty()) cfg.out = std::string(mode_name(mode)) + ".csv";
    return cfg;
}

GridSpec make_grid(const RunConfig& cfg) {
    return GridSpec(cfg.dim, cfg.n, cfg.box_length);
}

double effective_horizon(const RunConfig& cfg) {
    if (cfg.horizon) return *cfg.horizon;
    const GridSpec grid = make_grid(cfg);
    const double p = cfg.packet.mean_momentum.norm();
    const double energy = std::sqrt(p * p + 1.0);
    // Nyquist for 2E with 10% margin.
    const double nyquist = 0.9 * (cfg.samples - 1) * std::numbers::pi / (2.0 * energy);
    // Travel until the packet tail (4.5 sigma) reaches the guard region edge.
    const double spread = 3.0 / (2.0 * cfg.packet.width);
    const double speed = std::min(1.0, p / energy + spread);
    const double room = grid.guard_half_width() - cfg.packet.center.cwiseAbs().maxCoeff() -
                        4.5 * cfg.packet.width;
    double horizon = std::min(40.0 * std::numbers::pi, nyquist);
    if (speed > 0.0) horizon = std::min(horizon, room / speed);
    if (!(horizon > 0.0)) {
        throw ValidationError("config: no usable horizon; the packet starts too close to the "
                              "guard region edge (set horizon explicitly or enlarge box_length)");
    }
    return horizon;
}

}  // namespace diractime
