#pragma once

// Attoclock tunneling-time model. Barrier geometry in atomic units (e = 1),
// times in seconds, lengths converted through units.hpp.
//
//   turning points:  F x^2 - Ip x + Z = 0
//   barrier width:   d_B = (Ip / F) sqrt(1 - 4 Z F / Ip^2)
//   internal time:   tau_T = (1 / 4 pi) d_B / c
//   laboratory time: Y_T   = tau_T / (v_gp / c)^2

#include <iosfwd>
#include <numbers>
#include <utility>
#include <vector>

namespace diractime {

/// Single-direction share of the spherical time uncertainty.
inline constexpr double kDirectionFactor = 1.0 / (4.0 * std::numbers::pi);

/// Measured reference point used to calibrate (v_gp / c)^2.
struct CalibrationPoint {
    double lab_time_s = 40e-18;
    double width_au = 13.0;
};

struct TunnelingScenario {
    double ip = 0.5792;    ///< ionization potential, Hartree
    double z_eff = 1.0;
    double field = 0.04;   ///< peak field, atomic units
    CalibrationPoint calibration;
    double direction_factor = kDirectionFactor;
};

struct TunnelingResult {
    double x_entrance = 0.0;  ///< a.u.
    double x_exit = 0.0;      ///< a.u.
    double width_au = 0.0;
    double width_angstrom = 0.0;
    double internal_time_s = 0.0;
    double lab_time_s = 0.0;
    double velocity_ratio = 0.0;  ///< (v_gp / c)^2
};

struct Calibration {
    double velocity_ratio = 0.0;        ///< (v_gp / c)^2
    double group_velocity_mps = 0.0;    ///< v_gp = d_ref / Y_ref
    double inverse_ratio() const { return 1.0 / velocity_ratio; }
};

/// Throws ValidationError for non-positive inputs, OverBarrierError when
/// 4 Z F / Ip^2 > 1.
void validate_scenario(const TunnelingScenario& sc);

/// (entrance, exit), entrance <= exit.
std::pair<double, double> barrier_points(const TunnelingScenario& sc);
double barrier_width(const TunnelingScenario& sc);

/// Field at which the barrier has width `width_au` (inverse of barrier_width).
double field_for_width(double ip, double z_eff, double width_au);

double internal_time(double width_au, double direction_factor = kDirectionFactor);

/// v_gp = d_ref / Y_ref and (v_gp / c)^2 from a measured (time, width) pair.
Calibration calibrate_velocity(double lab_time_s, double width_au);
Calibration calibrate_velocity(const CalibrationPoint& point);

/// Requires velocity_ratio in (0, 1].
double lab_time(double width_au, double velocity_ratio,
                double direction_factor = kDirectionFactor);

TunnelingResult evaluate(const TunnelingScenario& sc, double velocity_ratio);

struct FieldRange {
    double min = 0.02;
    double max = 0.08;
    int count = 7;
};

struct SweepRow {
    double field = 0.0;
    bool over_barrier = false;
    double width_au = 0.0;
    double width_angstrom = 0.0;
    double internal_time_as = 0.0;
    double lab_time_as = 0.0;
};

/// Rows ordered by field. Over-barrier fields produce flagged rows with NaN outputs.
std::vector<SweepRow> intensity_sweep(double ip, double z_eff, double velocity_ratio,
                                      const FieldRange& range,
                                      double direction_factor = kDirectionFactor);

SweepRow sweep_row(double ip, double z_eff, double velocity_ratio, double field,
                   double direction_factor = kDirectionFactor);

/// Header: F_au,width_au,width_angstrom,internal_time_as,lab_time_as
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace diractime
