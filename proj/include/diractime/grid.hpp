#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace diractime {

/// Upper bound on n^dim; 2^24 sites is ~256 MiB per spinor view.
inline constexpr std::size_t kMaxGridSites = std::size_t{1} << 24;

/// Uniform periodic grid, 1D or 3D, n points per axis over [-L/2, L/2).
///
/// Sites are stored with x fastest: idx = ix + n (iy + n iz). Momentum-space
/// arrays use the same linear index in FFT order, so mode m along an axis
/// carries wavenumber 2 pi m' / L with m' = m for m < n/2 and m - n otherwise.
class GridSpec {
public:
    /// Validates: dim in {1, 3}, n >= 16 and a power of two, L > 0, n^dim <= cap.
    GridSpec(int dim, int n, double box_length);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double box_length() const { return box_length_; }
    double spacing() const { return box_length_ / n_; }
    double momentum_step() const;
    double max_wavenumber() const;
    std::size_t size() const { return size_; }

    double coordinate(int j) const { return -0.5 * box_length_ + j * spacing(); }
    double wavenumber(int m) const;

    Eigen::Vector3d site_position(std::size_t idx) const;
    Eigen::Vector3d site_momentum(std::size_t idx) const;

    /// Half-width of the centered sub-box holding half of the box volume
    /// (L/4 in 1D). Probability outside it is what the localization guard limits.
    double guard_half_width() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int dim_;
    int n_;
    double box_length_;
    std::size_t size_;
};

}  // namespace diractime
