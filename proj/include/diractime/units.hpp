#pragma once

#include <numbers>

namespace diractime::units {

// SI values (CODATA 2018). Every physical-unit conversion in the project
// goes through this table.
inline constexpr double kSpeedOfLight = 2.99792458e8;          // m/s
inline constexpr double kPlanck = 6.62607015e-34;              // J s
inline constexpr double kReducedPlanck = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kElectronMass = 9.1093837015e-31;      // kg
inline constexpr double kElectronRestEnergy = kElectronMass * kSpeedOfLight * kSpeedOfLight;

inline constexpr double kBohrInAngstrom = 0.529177210903;
inline constexpr double kAngstrom = 1e-10;                     // m
inline constexpr double kBohr = kBohrInAngstrom * kAngstrom;   // m
inline constexpr double kAttosecond = 1e-18;                   // s
inline constexpr double kHartree = 4.3597447222071e-18;        // J
inline constexpr double kAtomicTime = 2.4188843265857e-17;     // s
inline constexpr double kAtomicField = 5.14220674763e11;       // V/m

constexpr double bohr_to_angstrom(double a) { return a * kBohrInAngstrom; }
constexpr double angstrom_to_bohr(double a) { return a / kBohrInAngstrom; }
constexpr double bohr_to_meter(double a) { return a * kBohr; }
constexpr double seconds_to_attoseconds(double s) { return s / kAttosecond; }
constexpr double attoseconds_to_seconds(double as) { return as * kAttosecond; }

}  // namespace diractime::units
