#pragma once

#include <complex>
#include <memory>

#include <Eigen/Dense>

#include "diractime/grid.hpp"

namespace diractime {

using Complex = std::complex<double>;

/// One 4-spinor per lattice site, one column per site.
using SpinorArray = Eigen::Matrix<Complex, 4, Eigen::Dynamic>;

/// Unitary DFT between views. The momentum view is the coefficient of the
/// plane wave exp(i k.x) on the shifted lattice x_j = -L/2 + j dx, so both
/// views are discrete-normalized (sum |psi|^2 = 1, no dx weights).
SpinorArray position_to_momentum(const GridSpec& grid, const SpinorArray& position);
SpinorArray momentum_to_position(const GridSpec& grid, const SpinorArray& momentum);

/// Immutable spinor field. The momentum view is canonical; the position view
/// is an optional cache filled by `to_position`. Copies share storage.
class SpinorField {
public:
    static SpinorField from_momentum(const GridSpec& grid, SpinorArray momentum);
    /// Builds the momentum view by transform and keeps `position` as the cache.
    static SpinorField from_position(const GridSpec& grid, SpinorArray position);

    const GridSpec& grid() const { return grid_; }
    const SpinorArray& momentum_view() const { return *momentum_; }
    bool has_position_view() const { return static_cast<bool>(position_); }
    /// Throws std::logic_error when the cache is absent; call `to_position` first.
    const SpinorArray& position_view() const;

    /// sqrt(sum |psi|^2) over the momentum view (compensated summation).
    double norm() const;

    SpinorField with_position_view() const;

private:
    SpinorField(const GridSpec& grid, std::shared_ptr<const SpinorArray> momentum,
                std::shared_ptr<const SpinorArray> position);

    GridSpec grid_;
    std::shared_ptr<const SpinorArray> momentum_;
    std::shared_ptr<const SpinorArray> position_;
};

/// Returns `f` with the position view materialized.
SpinorField to_position(const SpinorField& f);

/// <a|b> summed over sites and components with compensated summation.
Complex inner_product(const SpinorArray& a, const SpinorArray& b);

/// sum |psi|^2.
double squared_norm(const SpinorArray& a);

}  // namespace diractime
