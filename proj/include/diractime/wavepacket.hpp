#pragma once

#include <functional>
#include <iosfwd>
#include <random>

#include <Eigen/Dense>

#include "diractime/dirac_core.hpp"
#include "diractime/grid.hpp"
#include "diractime/spinor_field.hpp"

namespace diractime {

using Spinor = Vector4c<double>;

/// Gaussian packet exp(-(r - center)^2 / 4 width^2 + i p0.r) * seed, so that
/// width^2 is the position variance per axis.
struct PacketSpec {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double width = 10.0;
    Eigen::Vector3d mean_momentum = Eigen::Vector3d::Zero();
    Spinor spinor_seed = Spinor(1.0, 0.0, 0.0, 0.0);
    bool project_positive = true;
};

enum class EnergyBranch { kPositive, kNegative };

/// Fraction of probability that must stay inside the guard region.
inline constexpr double kLocalizationThreshold = 0.9999;

SpinorField build_packet(const PacketSpec& spec, const GridSpec& grid);

/// Random Gaussian packet that passes every guard of build_packet on `grid`:
/// width, center and momentum drawn inside the resolvable ranges, random
/// complex seed. |p0| per axis is capped at `max_momentum`.
PacketSpec random_packet_spec(const GridSpec& grid, std::mt19937_64& rng,
                              double max_momentum = 2.0);

/// Samples an arbitrary position-space spinor function and normalizes it.
/// Checks localization but not resolution.
SpinorField sample_field(const GridSpec& grid,
                         const std::function<Spinor(const Eigen::Vector3d&)>& value);

/// Mode-wise Lambda_(+/-) psi(k); not renormalized.
SpinorField project(const SpinorField& f, EnergyBranch branch);

SpinorField normalized(const SpinorField& f);

/// sum_k ||Lambda_+ psi(k)||^2 / ||psi||^2.
double positive_energy_fraction(const SpinorField& f);

/// Probability inside the centered half-volume sub-box (position view required).
double localization_fraction(const SpinorField& f);

/// Throws GuardError naming `context` when the localization fraction is
/// below kLocalizationThreshold.
void check_localization(const SpinorField& f, const char* context);

/// Applies m(k) = fn(mode) to every momentum mode.
SpinorField apply_modewise(const SpinorField& f,
                           const std::function<Matrix4c<double>(const ModeMatrix<double>&)>& fn);

/// h(k) psi(k) mode by mode.
SpinorField apply_hamiltonian(const SpinorField& f);

/// Text snapshot of the position view: header "dim n L", then one line per
/// site with the linear index and the 8 real numbers (re, im per component).
void write_snapshot(std::ostream& out, const SpinorField& f);

}  // namespace diractime
