#pragma once

// Shared generators for the unit tests. Randomness always flows through
// slc::Rng so failures reproduce across platforms.

#include <complex>

#include <Eigen/Dense>

#include <slc/sampling.hpp>

namespace testutil {

using Complex = std::complex<double>;

inline double urand(slc::Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.uniform01();
}

// (a + a^H)/2 of a random complex matrix; exactly Hermitian as stored because
// complex addition and conjugation commute entrywise.
inline Eigen::MatrixXcd random_hermitian(int n, slc::Rng& rng, double scale = 1.0) {
    Eigen::MatrixXcd a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            a(r, c) = Complex(urand(rng, -scale, scale), urand(rng, -scale, scale));
    Eigen::MatrixXcd h = 0.5 * (a + a.adjoint().eval());
    return h;
}

inline Eigen::VectorXcd random_state(int n, slc::Rng& rng) {
    Eigen::VectorXcd v(n);
    for (int r = 0; r < n; ++r) v(r) = Complex(urand(rng, -1.0, 1.0), urand(rng, -1.0, 1.0));
    v.normalize();
    return v;
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testutil
