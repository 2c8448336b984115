#include "diractime/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "diractime/errors.hpp"
#include "diractime/format.hpp"
#include "diractime/numeric.hpp"
#include "diractime/parallel.hpp"

namespace diractime {

namespace {

// Momentum-space Gaussian tails beyond this many standard deviations are
// treated as zero when checking that the packet fits the momentum lattice.
constexpr double kMomentumBandSigmas = 10.0;

void validate_spec(const PacketSpec& spec, const GridSpec& grid) {
    if (!(spec.width > 0.0) || !std::isfinite(spec.width)) {
        throw ValidationError("wavepacket: width must be positive and finite");
    }
    if (!spec.center.allFinite() || !spec.mean_momentum.allFinite()) {
        throw ValidationError("wavepacket: center and mean momentum must be finite");
    }
    if (spec.spinor_seed.squaredNorm() == 0.0 || !spec.spinor_seed.allFinite()) {
        throw ValidationError("wavepacket: spinor seed must be non-zero and finite");
    }
    for (int a = grid.dim(); a < 3; ++a) {
        if (spec.center[a] != 0.0 || spec.mean_momentum[a] != 0.0) {
            throw ValidationError(
                "wavepacket: center and momentum must vanish along axes the grid does not have");
        }
    }
    if (spec.width < 4.0 * grid.spacing()) {
        throw GuardError("wavepacket: width " + format_double(spec.width) +
                         " under-resolved; need width >= 4 * spacing = " +
                         format_double(4.0 * grid.spacing()));
    }
    if (spec.width > grid.box_length() / 8.0) {
        throw GuardError("wavepacket: width " + format_double(spec.width) +
                         " too wide; need width <= box_length / 8 = " +
                         format_double(grid.box_length() / 8.0));
    }
    const double band = kMomentumBandSigmas / (2.0 * spec.width);
    for (int a = 0; a < grid.dim(); ++a) {
        if (std::abs(spec.mean_momentum[a]) + band > grid.max_wavenumber()) {
            throw GuardError("wavepacket: mean momentum " + format_double(spec.mean_momentum[a]) +
                             " not resolved by the momentum lattice (max wavenumber " +
                             format_double(grid.max_wavenumber()) + ")");
        }
    }
}

}  // namespace

SpinorField apply_modewise(const SpinorField& f,
                           const std::function<Matrix4c<double>(const ModeMatrix<double>&)>& fn) {
    const GridSpec& grid = f.grid();
    const SpinorArray& in = f.momentum_view();
    SpinorArray out(4, in.cols());
    parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const auto mode = mode_hamiltonian<double>(grid.site_momentum(s));
            out.col(s).noalias() = fn(mode) * in.col(s);
        }
    });
    return SpinorField::from_momentum(grid, std::move(out));
}

SpinorField apply_hamiltonian(const SpinorField& f) {
    return apply_modewise(f, [](const ModeMatrix<double>& m) { return m.h; });
}

SpinorField project(const SpinorField& f, EnergyBranch branch) {
    return apply_modewise(f, [branch](const ModeMatrix<double>& m) {
        const auto [plus, minus] = energy_projectors(m);
        return branch == EnergyBranch::kPositive ? plus : minus;
    });
}

SpinorField normalized(const SpinorField& f) {
    const double norm = f.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw GuardError("wavepacket: cannot normalize a zero or non-finite field");
    }
    SpinorField out = SpinorField::from_momentum(f.grid(), f.momentum_view() / norm);
    return out;
}

double positive_energy_fraction(const SpinorField& f) {
    const GridSpec& grid = f.grid();
    const SpinorArray& psi = f.momentum_view();
    CompensatedSum positive;
    CompensatedSum total;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const auto mode = mode_hamiltonian<double>(grid.site_momentum(s));
        const double weight = psi.col(s).squaredNorm();
        const double energy_term = psi.col(s).dot(mode.h * psi.col(s)).real() / mode.energy;
        positive.add(0.5 * (weight + energy_term));
        total.add(weight);
    }
    return positive.value() / total.value();
}

double localization_fraction(const SpinorField& f) {
    const GridSpec& grid = f.grid();
    const SpinorArray& psi = f.position_view();
    const double limit = grid.guard_half_width();
    CompensatedSum inside;
    CompensatedSum total;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const double weight = psi.col(s).squaredNorm();
        total.add(weight);
        if ((grid.site_position(s).array().abs() <= limit).all()) inside.add(weight);
    }
    return inside.value() / total.value();
}

void check_localization(const SpinorField& f, const char* context) {
    const double fraction = localization_fraction(f);
    if (fraction < kLocalizationThreshold) {
        throw GuardError(std::string(context) + ": packet reached boundary (" +
                         format_double(fraction) +
                         " of the probability inside the guard region) - shorten horizon or "
                         "enlarge box");
    }
}

SpinorField sample_field(const GridSpec& grid,
                         const std::function<Spinor(const Eigen::Vector3d&)>& value) {
    SpinorArray position(4, static_cast<Eigen::Index>(grid.size()));
    for (std::size_t s = 0; s < grid.size(); ++s) {
        position.col(s) = value(grid.site_position(s));
    }
    if (!position.allFinite()) {
        throw ValidationError("wavepacket: sampled field has non-finite values");
    }
    SpinorField f = to_position(normalized(SpinorField::from_position(grid, position)));
    check_localization(f, "wavepacket");
    return f;
}

PacketSpec random_packet_spec(const GridSpec& grid, std::mt19937_64& rng, double max_momentum) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    const double guard = grid.guard_half_width();
    const double lo = 4.0 * grid.spacing();
    const double hi = std::min(grid.box_length() / 8.0, guard / 5.5);
    if (hi < lo) {
        throw ValidationError("wavepacket: grid too coarse for a localized random packet");
    }
    PacketSpec spec;
    spec.width = uniform(lo, hi);
    const double room = 0.5 * (guard - 4.5 * spec.width);
    const double band = kMomentumBandSigmas / (2.0 * spec.width);
    const double pmax = std::max(0.0, std::min(max_momentum, grid.max_wavenumber() - band - 0.05));
    for (int a = 0; a < grid.dim(); ++a) {
        spec.center[a] = uniform(-room, room);
        spec.mean_momentum[a] = uniform(-pmax, pmax);
    }
    std::normal_distribution<double> normal;
    for (int c = 0; c < 4; ++c) spec.spinor_seed[c] = Complex(normal(rng), normal(rng));
    return spec;
}

SpinorField build_packet(const PacketSpec& spec, const GridSpec& grid) {
    validate_spec(spec, grid);
    const double inv_four_var = 1.0 / (4.0 * spec.width * spec.width);
    const Spinor seed = spec.spinor_seed;
    SpinorArray position(4, static_cast<Eigen::Index>(grid.size()));
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const Eigen::Vector3d r = grid.site_position(s);
        const double envelope = std::exp(-(r - spec.center).squaredNorm() * inv_four_var);
        const double phase = spec.mean_momentum.dot(r);
        position.col(s) = (envelope * Complex(std::cos(phase), std::sin(phase))) * seed;
    }
    SpinorField f = SpinorField::from_position(grid, std::move(position));
    if (spec.project_positive) {
        const double before = f.norm();
        f = project(f, EnergyBranch::kPositive);
        if (f.norm() <= 1e-12 * before) {
            throw GuardError(
                "wavepacket: field vanished after positive-energy projection (seed orthogonal "
                "to the positive branch)");
        }
    }
    f = to_position(normalized(f));
    check_localization(f, "wavepacket");
    return f;
}

void write_snapshot(std::ostream& out, const SpinorField& f) {
    const SpinorField g = to_position(f);
    const GridSpec& grid = g.grid();
    out << grid.dim() << ' ' << grid.n() << ' ' << format_double(grid.box_length()) << '\n';
    const SpinorArray& psi = g.position_view();
    for (std::size_t s = 0; s < grid.size(); ++s) {
        out << s;
        for (int c = 0; c < 4; ++c) {
            out << ' ' << format_double(psi(c, s).real()) << ' ' << format_double(psi(c, s).imag());
        }
        out << '\n';
    }
}

}  // namespace diractime
