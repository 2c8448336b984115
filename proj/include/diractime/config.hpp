#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diractime/observables.hpp"
#include "diractime/tunneling.hpp"
#include "diractime/wavepacket.hpp"

namespace diractime {

enum class Mode { kEvolve, kUncertainty, kTunneling, kSelfcheck };

Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

/// Validated run configuration. Physical quantities are in natural units
/// except the tunneling block (atomic units, attoseconds).
struct RunConfig {
    Mode mode = Mode::kEvolve;

    int dim = 1;
    int n = 4096;
    double box_length = 400.0;
    PacketSpec packet;
    double tau0 = kNaturalDeBroglie;

    /// Absent means "auto": the longest horizon <= 40 pi that keeps the
    /// Zitterbewegung frequency sampled and the packet inside the guard region.
    std::optional<double> horizon;
    int samples = 256;
    std::string snapshot;  ///< optional initial-field snapshot path

    std::vector<double> family_sigma;
    int family_random = 0;
    std::uint64_t rng_seed = 1;

    double ip = 0.5792;
    double z_eff = 1.0;
    std::optional<double> field;
    std::optional<FieldRange> sweep;
    std::vector<double> widths{20.0, 8.0};
    CalibrationPoint calibration;
    std::optional<double> velocity_ratio;
    double direction_factor = kDirectionFactor;

    std::string out;

    double tol_picture = 1e-8;
    double tol_identity = 1e-10;
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Splits `key = value` lines; '#' starts a comment. Throws ValidationError
/// on malformed lines.
ConfigEntries parse_entries(std::string_view text);

/// Parses "key=value" as given to --set.
std::pair<std::string, std::string> parse_override(std::string_view text);

/// Applies `text` then `overrides` (later entries win), fills defaults and
/// validates. Errors name the offending key and its expected range.
RunConfig parse_config(std::string_view text, Mode mode, const ConfigEntries& overrides = {});

/// Horizon actually used by evolve mode.
double effective_horizon(const RunConfig& cfg);

GridSpec make_grid(const RunConfig& cfg);

}  // namespace diractime
