#pragma once

// Core quantum types and operations on small (dim 2/4) systems.
// Convention: all Hamiltonians are H/hbar with entries in 1/ns (no 2*pi
// factor), time in ns. Basis: |g> = (1,0)^T, sigma_z|g> = +|g>. For two-qubit
// systems, qubit 1 is the left tensor factor.

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace slc {

using Complex = std::complex<double>;
using QuantumState = Eigen::VectorXcd;
using HermitianOperator = Eigen::MatrixXcd;
using Propagator = Eigen::MatrixXcd;

inline Eigen::Matrix2cd pauli(char axis) {
    Eigen::Matrix2cd m;
    switch (axis) {
        case 'x': m << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0); break;
        case 'y': m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0); break;
        case 'z': m << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0); break;
        default: throw std::invalid_argument("pauli: axis must be 'x', 'y' or 'z'");
    }
    return m;
}

inline Eigen::MatrixXcd identity(int dim) {
    return Eigen::MatrixXcd::Identity(dim, dim);
}

inline Eigen::MatrixXcd tensor(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

// exp(-i*h*dt) through the spectral decomposition of the Hermitian h.
inline Propagator step_propagator(const HermitianOperator& h, double dt) {
    if (h.rows() != h.cols()) throw std::invalid_argument("step_propagator: h must be square");
    if (!(dt > 0.0)) throw std::invalid_argument("step_propagator: dt must be > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("step_propagator: eigensolver failed");
    const Eigen::VectorXd& lam = es.eigenvalues();
    Eigen::VectorXcd phase(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        phase(i) = std::exp(Complex(0.0, -dt * lam(i)));
    const Eigen::MatrixXcd& v = es.eigenvectors();
    return v * phase.asDiagonal() * v.adjoint();
}

// Piecewise-constant evolution; schedule[k] acts on interval k with width dt.
// Returns all states psi_0..psi_M (size schedule.size()+1, psi_0 = input).
inline std::vector<QuantumState> evolve_states(const QuantumState& psi0,
                                               const std::vector<HermitianOperator>& schedule,
                                               double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
    if (std::abs(psi0.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("evolve: state must be normalized");
    std::vector<QuantumState> states;
    states.reserve(schedule.size() + 1);
    states.push_back(psi0);
    for (const auto& h : schedule) {
        if (h.rows() != psi0.size() || h.cols() != psi0.size())
            throw std::invalid_argument("evolve: dimension mismatch");
        states.push_back(step_propagator(h, dt) * states.back());
    }
    return states;
}

inline QuantumState evolve(const QuantumState& psi0,
                           const std::vector<HermitianOperator>& schedule,
                           double dt) {
    return evolve_states(psi0, schedule, dt).back();
}

// |<a|b>|; insensitive to global phase of either argument.
inline double fidelity(const QuantumState& a, const QuantumState& b) {
    if (a.size() != b.size()) throw std::invalid_argument("fidelity: dimension mismatch");
    // For unit vectors the true value is <= 1; anything above is propagator
    // rounding drift, so it is cut off rather than reported.
    return std::min(std::abs(a.dot(b)), 1.0);
}

}  // namespace slc
