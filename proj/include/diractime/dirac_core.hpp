#pragma once

// Free Dirac algebra in the Dirac-Pauli representation, natural units
// (hbar = c = m0 = 1). Everything here is a pure function of its inputs.

#include <array>
#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "diractime/errors.hpp"

namespace diractime {

template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

template <typename Scalar>
using Vector4c = Eigen::Matrix<std::complex<Scalar>, 4, 1>;

template <typename Scalar>
using Vector3r = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
struct DiracMatrixSet {
    std::array<Matrix4c<Scalar>, 3> alpha;
    Matrix4c<Scalar> beta;
    /// Spin matrices Sigma_i = diag(sigma_i, sigma_i); s = Sigma / 2.
    std::array<Matrix4c<Scalar>, 3> sigma;
};

/// Dirac-Pauli representation: beta = diag(1, 1, -1, -1), alpha_i with the
/// Pauli matrix sigma_i in both off-diagonal 2x2 blocks.
template <typename Scalar = double>
DiracMatrixSet<Scalar> make_dirac_matrices() {
    using C = std::complex<Scalar>;
    const C one(1, 0), i(0, 1);

    std::array<Eigen::Matrix<C, 2, 2>, 3> pauli;
    pauli[0] << 0, one, one, 0;
    pauli[1] << 0, -i, i, 0;
    pauli[2] << one, 0, 0, -one;

    DiracMatrixSet<Scalar> set;
    set.beta.setZero();
    set.beta.diagonal() << one, one, -one, -one;
    for (int a = 0; a < 3; ++a) {
        set.alpha[a].setZero();
        set.alpha[a].template topRightCorner<2, 2>() = pauli[a];
        set.alpha[a].template bottomLeftCorner<2, 2>() = pauli[a];
        set.sigma[a].setZero();
        set.sigma[a].template topLeftCorner<2, 2>() = pauli[a];
        set.sigma[a].template bottomRightCorner<2, 2>() = pauli[a];
    }
    return set;
}

/// Shared immutable instance; construction is thread-safe (magic static).
template <typename Scalar = double>
const DiracMatrixSet<Scalar>& dirac_matrices() {
    static const DiracMatrixSet<Scalar> set = make_dirac_matrices<Scalar>();
    return set;
}

/// Per-momentum free Hamiltonian h(k) = alpha.k + beta with E(k) = sqrt(k^2 + 1).
template <typename Scalar>
struct ModeMatrix {
    Vector3r<Scalar> k;
    Matrix4c<Scalar> h;
    Scalar energy;
};

template <typename Scalar>
ModeMatrix<Scalar> mode_hamiltonian(const Vector3r<Scalar>& k) {
    if (!k.allFinite()) {
        throw ValidationError("dirac_core: momentum components must be finite");
    }
    const auto& d = dirac_matrices<Scalar>();
    ModeMatrix<Scalar> m;
    m.k = k;
    m.h = d.beta;
    for (int a = 0; a < 3; ++a) {
        if (k[a] != Scalar(0)) m.h += k[a] * d.alpha[a];
    }
    m.energy = std::sqrt(k.squaredNorm() + Scalar(1));
    return m;
}

/// Lambda_(+/-) = (E I +/- h) / 2E.
template <typename Scalar>
std::pair<Matrix4c<Scalar>, Matrix4c<Scalar>> energy_projectors(const ModeMatrix<Scalar>& m) {
    const Matrix4c<Scalar> id = Matrix4c<Scalar>::Identity();
    const Matrix4c<Scalar> scaled = m.h / m.energy;
    return {(id + scaled) / Scalar(2), (id - scaled) / Scalar(2)};
}

/// exp(-i h t) = cos(E t) I - i sin(E t) h / E, exact because h^2 = E^2 I.
template <typename Scalar>
Matrix4c<Scalar> mode_propagator(const ModeMatrix<Scalar>& m, Scalar t) {
    if (!std::isfinite(t)) {
        throw ValidationError("dirac_core: propagation time must be finite");
    }
    const Scalar phase = m.energy * t;
    const std::complex<Scalar> sine(0, -std::sin(phase) / m.energy);
    return std::cos(phase) * Matrix4c<Scalar>::Identity() + sine * m.h;
}

/// h^-1 = h / E^2 (E >= 1, so always defined).
template <typename Scalar>
Matrix4c<Scalar> inverse_hamiltonian(const ModeMatrix<Scalar>& m) {
    return m.h / (m.energy * m.energy);
}

}  // namespace diractime
