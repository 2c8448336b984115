#include "diractime/spinor_field.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "diractime/errors.hpp"
#include "diractime/numeric.hpp"

namespace diractime {

namespace {

enum class Direction { kForward, kInverse };

// Transforms every line of every component along each axis in place.
void transform(const GridSpec& grid, SpinorArray& data, Direction direction) {
    const int n = grid.n();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::FFT<double> fft;
    std::vector<Complex> line(n), out(n);
    Complex* raw = data.data();

    const std::size_t sites = grid.size();
    std::size_t stride = 1;  // in sites
    for (int axis = 0; axis < grid.dim(); ++axis) {
        const std::size_t lines = sites / n;
        for (std::size_t l = 0; l < lines; ++l) {
            // Decompose the line index into the part below and above `axis`.
            const std::size_t low = l % stride;
            const std::size_t high = l / stride;
            const std::size_t base = low + high * stride * n;
            for (int c = 0; c < 4; ++c) {
                for (int j = 0; j < n; ++j) {
                    line[j] = raw[4 * (base + j * stride) + c];
                }
                if (direction == Direction::kForward) {
                    fft.fwd(out, line);
                    for (int m = 0; m < n; ++m) {
                        const double sign = (m & 1) ? -scale : scale;
                        raw[4 * (base + m * stride) + c] = sign * out[m];
                    }
                } else {
                    for (int m = 0; m < n; ++m) {
                        if (m & 1) line[m] = -line[m];
                    }
                    fft.inv(out, line);
                    const double inv_scale = static_cast<double>(n) * scale;
                    for (int j = 0; j < n; ++j) {
                        raw[4 * (base + j * stride) + c] = inv_scale * out[j];
                    }
                }
            }
        }
        stride *= n;
    }
}

void check_shape(const GridSpec& grid, const SpinorArray& a) {
    if (static_cast<std::size_t>(a.cols()) != grid.size()) {
        throw ValidationError("wavepacket: spinor array has " + std::to_string(a.cols()) +
                              " sites, grid expects " + std::to_string(grid.size()));
    }
}

}  // namespace

SpinorArray position_to_momentum(const GridSpec& grid, const SpinorArray& position) {
    check_shape(grid, position);
    SpinorArray out = position;
    transform(grid, out, Direction::kForward);
    return out;
}

SpinorArray momentum_to_position(const GridSpec& grid, const SpinorArray& momentum) {
    check_shape(grid, momentum);
    SpinorArray out = momentum;
    transform(grid, out, Direction::kInverse);
    return out;
}

SpinorField::SpinorField(const GridSpec& grid, std::shared_ptr<const SpinorArray> momentum,
                         std::shared_ptr<const SpinorArray> position)
    : grid_(grid), momentum_(std::move(momentum)), position_(std::move(position)) {}

SpinorField SpinorField::from_momentum(const GridSpec& grid, SpinorArray momentum) {
    check_shape(grid, momentum);
    return SpinorField(grid, std::make_shared<const SpinorArray>(std::move(momentum)), nullptr);
}

SpinorField SpinorField::from_position(const GridSpec& grid, SpinorArray position) {
    auto momentum = std::make_shared<const SpinorArray>(position_to_momentum(grid, position));
    return SpinorField(grid, std::move(momentum),
                       std::make_shared<const SpinorArray>(std::move(position)));
}

const SpinorArray& SpinorField::position_view() const {
    if (!position_) {
        throw std::logic_error("wavepacket: position view not materialized; call to_position");
    }
    return *position_;
}

double SpinorField::norm() const { return std::sqrt(squared_norm(*momentum_)); }

SpinorField SpinorField::with_position_view() const {
    if (position_) return *this;
    return SpinorField(grid_, momentum_,
                       std::make_shared<const SpinorArray>(momentum_to_position(grid_, *momentum_)));
}

SpinorField to_position(const SpinorField& f) { return f.with_position_view(); }

Complex inner_product(const SpinorArray& a, const SpinorArray& b) {
    CompensatedComplexSum sum;
    for (Eigen::Index s = 0; s < a.cols(); ++s) {
        sum.add(a.col(s).dot(b.col(s)));
    }
    return sum.value();
}

double squared_norm(const SpinorArray& a) {
    CompensatedSum sum;
    for (Eigen::Index s = 0; s < a.cols(); ++s) {
        sum.add(a.col(s).squaredNorm());
    }
    return sum.value();
}

}  // namespace diractime
