#include "diractime/tunneling.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>

#include "diractime/errors.hpp"
#include "diractime/format.hpp"
#include "diractime/units.hpp"

namespace diractime {

namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

// Ip^2 - 4 Z F, with round-off at the double root snapped to zero.
double discriminant(const TunnelingScenario& sc) {
    const double ip2 = sc.ip * sc.ip;
    const double d = ip2 - 4.0 * sc.z_eff * sc.field;
    if (d < 0.0 && d > -1e-14 * ip2) return 0.0;
    return d;
}

}  // namespace

void validate_scenario(const TunnelingScenario& sc) {
    if (!positive_finite(sc.ip)) throw ValidationError("tunneling: ip must be positive");
    if (!positive_finite(sc.z_eff)) throw ValidationError("tunneling: z_eff must be positive");
    if (!positive_finite(sc.field)) throw ValidationError("tunneling: field must be positive");
    if (!positive_finite(sc.direction_factor)) {
        throw ValidationError("tunneling: direction factor must be positive");
    }
    if (discriminant(sc) < 0.0) {
        throw OverBarrierError("tunneling: no tunneling barrier at this intensity (4 Z F / Ip^2 = " +
                               format_double(4.0 * sc.z_eff * sc.field / (sc.ip * sc.ip)) +
                               " > 1)");
    }
}

std::pair<double, double> barrier_points(const TunnelingScenario& sc) {
    validate_scenario(sc);
    const double root = std::sqrt(discriminant(sc));
    // Larger root directly, smaller one from the product Z / F (no cancellation).
    const double exit = (sc.ip + root) / (2.0 * sc.field);
    const double entrance = sc.z_eff / (sc.field * exit);
    return {entrance, exit};
}

double barrier_width(const TunnelingScenario& sc) {
    validate_scenario(sc);
    const double q = 4.0 * sc.z_eff * sc.field / (sc.ip * sc.ip);
    return (sc.ip / sc.field) * std::sqrt(std::max(0.0, 1.0 - q));
}

double field_for_width(double ip, double z_eff, double width_au) {
    if (!positive_finite(ip) || !positive_finite(z_eff)) {
        throw ValidationError("tunneling: ip and z_eff must be positive");
    }
    if (!(width_au >= 0.0) || !std::isfinite(width_au)) {
        throw ValidationError("tunneling: width must be non-negative");
    }
    if (width_au == 0.0) return ip * ip / (4.0 * z_eff);
    // d^2 F^2 + 4 Z F - Ip^2 = 0, positive root in the cancellation-free form.
    const double root = std::sqrt(4.0 * z_eff * z_eff + width_au * width_au * ip * ip);
    return ip * ip / (2.0 * z_eff + root);
}

double internal_time(double width_au, double direction_factor) {
    if (!(width_au >= 0.0) || !std::isfinite(width_au)) {
        throw ValidationError("tunneling: width must be non-negative");
    }
    return direction_factor * units::bohr_to_meter(width_au) / units::kSpeedOfLight;
}

Calibration calibrate_velocity(double lab_time_s, double width_au) {
    if (!positive_finite(lab_time_s) || !positive_finite(width_au)) {
        throw ValidationError("tunneling: calibration time and width must be positive");
    }
    Calibration c;
    c.group_velocity_mps = units::bohr_to_meter(width_au) / lab_time_s;
    const double beta = c.group_velocity_mps / units::kSpeedOfLight;
    c.velocity_ratio = beta * beta;
    return c;
}

Calibration calibrate_velocity(const CalibrationPoint& point) {
    return calibrate_velocity(point.lab_time_s, point.width_au);
}

double lab_time(double width_au, double velocity_ratio, double direction_factor) {
    if (!(velocity_ratio > 0.0 && velocity_ratio <= 1.0)) {
        throw ValidationError("tunneling: velocity ratio must lie in (0, 1], got " +
                              format_double(velocity_ratio));
    }
    return internal_time(width_au, direction_factor) / velocity_ratio;
}

TunnelingResult evaluate(const TunnelingScenario& sc, double velocity_ratio) {
    TunnelingResult r;
    std::tie(r.x_entrance, r.x_exit) = barrier_points(sc);
    r.width_au = barrier_width(sc);
    r.width_angstrom = units::bohr_to_angstrom(r.width_au);
    r.internal_time_s = internal_time(r.width_au, sc.direction_factor);
    r.lab_time_s = lab_time(r.width_au, velocity_ratio, sc.direction_factor);
    r.velocity_ratio = velocity_ratio;
    return r;
}

SweepRow sweep_row(double ip, double z_eff, double velocity_ratio, double field,
                   double direction_factor) {
    SweepRow row;
    row.field = field;
    TunnelingScenario sc;
    sc.ip = ip;
    sc.z_eff = z_eff;
    sc.field = field;
    sc.direction_factor = direction_factor;
    try {
        const TunnelingResult r = evaluate(sc, velocity_ratio);
        row.width_au = r.width_au;
        row.width_angstrom = r.width_angstrom;
        row.internal_time_as = units::seconds_to_attoseconds(r.internal_time_s);
        row.lab_time_as = units::seconds_to_attoseconds(r.lab_time_s);
    } catch (const OverBarrierError&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.over_barrier = true;
        row.width_au = row.width_angstrom = row.internal_time_as = row.lab_time_as = nan;
    }
    return row;
}

std::vector<SweepRow> intensity_sweep(double ip, double z_eff, double velocity_ratio,
                                      const FieldRange& range, double direction_factor) {
    if (range.count < 1) throw ValidationError("tunneling: sweep needs at least one field value");
    if (!positive_finite(range.min) || !positive_finite(range.max) || range.max < range.min) {
        throw ValidationError("tunneling: sweep range must satisfy 0 < min <= max");
    }
    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(range.count));
    for (int i = 0; i < range.count; ++i) {
        const double field =
            range.count == 1 ? range.min
                             : range.min + (range.max - range.min) * i / (range.count - 1);
        rows.push_back(sweep_row(ip, z_eff, velocity_ratio, field, direction_factor));
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    write_csv_row(out, {"F_au", "width_au", "width_angstrom", "internal_time_as", "lab_time_as"});
    for (const auto& row : rows) {
        write_csv_row(out, {format_double(row.field), format_double(row.width_au),
                            format_double(row.width_angstrom), format_double(row.internal_time_as),
                            format_double(row.lab_time_as)});
    }
}

}  // namespace diractime
