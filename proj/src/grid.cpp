#include "diractime/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "diractime/errors.hpp"

namespace diractime {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

GridSpec::GridSpec(int dim, int n, double box_length)
    : dim_(dim), n_(n), box_length_(box_length), size_(0) {
    if (dim != 1 && dim != 3) {
        throw ValidationError("wavepacket: dim must be 1 or 3");
    }
    if (n < 16 || !is_power_of_two(n)) {
        throw ValidationError("wavepacket: n must be a power of two >= 16");
    }
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        throw ValidationError("wavepacket: box_length must be positive and finite");
    }
    std::size_t sites = 1;
    for (int a = 0; a < dim; ++a) {
        sites *= static_cast<std::size_t>(n);
    }
    if (sites > kMaxGridSites) {
        throw ValidationError("wavepacket: grid of " + std::to_string(sites) +
                              " sites exceeds the memory cap of " +
                              std::to_string(kMaxGridSites));
    }
    size_ = sites;
}

double GridSpec::momentum_step() const { return 2.0 * std::numbers::pi / box_length_; }

double GridSpec::max_wavenumber() const { return std::numbers::pi * n_ / box_length_; }

double GridSpec::wavenumber(int m) const {
    const int signed_m = m < n_ / 2 ? m : m - n_;
    return signed_m * momentum_step();
}

Eigen::Vector3d GridSpec::site_position(std::size_t idx) const {
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    const auto n = static_cast<std::size_t>(n_);
    for (int a = 0; a < dim_; ++a) {
        r[a] = coordinate(static_cast<int>(idx % n));
        idx /= n;
    }
    return r;
}

Eigen::Vector3d GridSpec::site_momentum(std::size_t idx) const {
    Eigen::Vector3d k = Eigen::Vector3d::Zero();
    const auto n = static_cast<std::size_t>(n_);
    for (int a = 0; a < dim_; ++a) {
        k[a] = wavenumber(static_cast<int>(idx % n));
        idx /= n;
    }
    return k;
}

double GridSpec::guard_half_width() const {
    return 0.5 * box_length_ * std::pow(0.5, 1.0 / dim_);
}

}  // namespace diractime
