#pragma once

// The three superconducting-qubit model families and their Hamiltonian
// assembly. Every coefficient is an angular frequency in 1/ns; a channel or
// drift bound to a fluctuation parameter is scaled by that parameter's
// theta(t) (see Profile in sampling.hpp).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "slc/field.hpp"
#include "slc/quantum.hpp"
#include "slc/sampling.hpp"

namespace slc {

// H contribution: theta_b(t) * sign * u_c(t) * generator.
struct ControlChannel {
    std::string name;
    Eigen::MatrixXcd generator;
    double sign = 1.0;  // +1 or -1
    double lo = 0.0, hi = 0.0;
    int binding = -1;  // index into QubitModel::params, -1 = unfluctuated
};

// H contribution: theta_b(t) * coefficient * generator.
struct DriftTerm {
    Eigen::MatrixXcd generator;
    double coefficient = 0.0;
    int binding = -1;
};

struct QubitModel {
    std::string id;
    int dim = 0;
    double T = 0.0;
    int intervals = 0;  // M
    QuantumState psi0;
    QuantumState target;
    std::vector<DriftTerm> drifts;
    std::vector<ControlChannel> channels;
    std::vector<FluctuationParameter> params;

    void set_bound_all(double theta) {
        for (auto& p : params) p.bound = theta;
    }
    void set_bound(const std::string& group, double theta) {
        bool found = false;
        for (auto& p : params)
            if (p.group == group) { p.bound = theta; found = true; }
        if (!found) throw std::invalid_argument("set_bound: unknown group " + group);
    }
    std::vector<std::string> groups() const { return detail::group_names(params); }
};

inline void validate(const QubitModel& m) {
    if (m.dim != 2 && m.dim != 4) throw std::invalid_argument("model: dim must be 2 or 4");
    if (!(m.T > 0.0) || m.intervals < 1) throw std::invalid_argument("model: bad horizon");
    if (m.psi0.size() != m.dim || m.target.size() != m.dim)
        throw std::invalid_argument("model: state dimension mismatch");
    if (std::abs(m.psi0.norm() - 1.0) > 1e-9 || std::abs(m.target.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("model: states must be normalized");
    if (m.channels.empty()) throw std::invalid_argument("model: at least one channel required");
    for (const auto& c : m.channels) {
        if (c.generator.rows() != m.dim || c.generator.cols() != m.dim)
            throw std::invalid_argument("model: generator dimension mismatch");
        if (c.sign != 1.0 && c.sign != -1.0) throw std::invalid_argument("model: sign must be +-1");
        if (!(c.lo < c.hi)) throw std::invalid_argument("model: channel bounds empty");
        if (c.binding < -1 || c.binding >= static_cast<int>(m.params.size()))
            throw std::invalid_argument("model: channel binding out of range");
    }
    for (const auto& d : m.drifts) {
        if (d.generator.rows() != m.dim || d.generator.cols() != m.dim)
            throw std::invalid_argument("model: generator dimension mismatch");
        if (d.binding < -1 || d.binding >= static_cast<int>(m.params.size()))
            throw std::invalid_argument("model: drift binding out of range");
    }
}

// H(t) for one time point: controls[c] is the value of channel c, sample
// supplies every fluctuation parameter, t is the evaluation time (interval
// midpoint during propagation).
inline HermitianOperator assemble_hamiltonian(const QubitModel& m,
                                              const std::vector<double>& controls,
                                              const FluctuationSample& sample, double t) {
    if (controls.size() != m.channels.size())
        throw std::invalid_argument("assemble: one control value per channel required");
    if (sample.values.size() != m.params.size())
        throw std::invalid_argument("assemble: one sample value per parameter required");
    auto theta = [&](int binding) {
        if (binding < 0) return 1.0;
        return profile_value(m.params[binding], sample.values[binding], t);
    };
    HermitianOperator h = HermitianOperator::Zero(m.dim, m.dim);
    for (const auto& d : m.drifts) h += (theta(d.binding) * d.coefficient) * d.generator;
    for (std::size_t c = 0; c < m.channels.size(); ++c) {
        const auto& ch = m.channels[c];
        if (controls[c] < ch.lo || controls[c] > ch.hi)
            throw std::invalid_argument("assemble: control out of bounds on channel " + ch.name);
        h += (theta(ch.binding) * ch.sign * controls[c]) * ch.generator;
    }
    return h;
}

enum class SingleQubitTarget { excited, superposition };

// Charge qubit: H = theta_z u_z sigma_z - theta_x u_x sigma_x,
// u_z in [0,40], u_x in [0,9.1], T = 1 ns, M = 100, |g> -> target.
inline QubitModel single_charge_qubit(SingleQubitTarget target) {
    QubitModel m;
    m.id = target == SingleQubitTarget::excited ? "single_charge_excited"
                                                : "single_charge_superposition";
    m.dim = 2;
    m.T = 1.0;
    m.intervals = 100;
    m.psi0 = QuantumState::Zero(2);
    m.psi0(0) = 1.0;
    m.target = QuantumState::Zero(2);
    if (target == SingleQubitTarget::excited) {
        m.target(1) = 1.0;
    } else {
        m.target(0) = m.target(1) = 1.0 / std::sqrt(2.0);
    }
    m.params = {{"theta_z", "theta_z", 0.0, Distribution::uniform, Profile::constant},
                {"theta_x", "theta_x", 0.0, Distribution::uniform, Profile::constant}};
    m.channels.push_back({"u_z", pauli('z'), +1.0, 0.0, 40.0, 0});
    m.channels.push_back({"u_x", pauli('x'), -1.0, 0.0, 9.1, 1});
    return m;
}

// Two capacitively coupled charge qubits with time-varying fluctuations
// theta_j(t) = 1 - vartheta_j cos(t); theta_1=theta_2 and theta_3=theta_4
// are tied, the sigma_x sigma_x coupling channel chi is unfluctuated.
inline QubitModel coupled_charge_qubits() {
    QubitModel m;
    m.id = "coupled_charge";
    m.dim = 4;
    m.T = 2.0;
    m.intervals = 200;
    m.psi0 = QuantumState(4);
    m.psi0 << Complex(0.7, 0.0), Complex(0.1, 0.0), Complex(0.0, 0.7), Complex(0.0, 0.1);
    m.target = QuantumState(4);
    m.target << Complex(0.7, 0.0), Complex(0.1, 0.0), Complex(0.0, 0.7), Complex(0.0, -0.1);
    m.params = {{"theta_1", "theta_12", 0.0, Distribution::uniform, Profile::cosine_modulated},
                {"theta_2", "theta_12", 0.0, Distribution::uniform, Profile::cosine_modulated},
                {"theta_3", "theta_34", 0.0, Distribution::uniform, Profile::cosine_modulated},
                {"theta_4", "theta_34", 0.0, Distribution::uniform, Profile::cosine_modulated}};
    const Eigen::MatrixXcd sz1 = tensor(pauli('z'), identity(2));
    const Eigen::MatrixXcd sz2 = tensor(identity(2), pauli('z'));
    const Eigen::MatrixXcd sx1 = tensor(pauli('x'), identity(2));
    const Eigen::MatrixXcd sx2 = tensor(identity(2), pauli('x'));
    m.channels.push_back({"f1", sz1, +1.0, 0.0, 40.0, 0});
    m.channels.push_back({"f2", sz2, +1.0, 0.0, 40.0, 1});
    m.channels.push_back({"chi", tensor(pauli('x'), pauli('x')), -1.0, -0.5, 0.5, -1});
    m.drifts.push_back({sx1, -9.1, 2});
    m.drifts.push_back({sx2, -9.1, 3});
    return m;
}

// Two inductively coupled phase qubits; fixed sigma_x drives (omega_3 =
// omega_4 = 2), tunable splittings omega_1, omega_2 and coupling Omega_c with
// the sigma_z sigma_z/30 correction. theta_1 = theta_2 tied, theta_3 on the
// coupling; fluctuations are constant in time, tested as truncated Gaussians.
inline QubitModel coupled_phase_qubits() {
    QubitModel m;
    m.id = "coupled_phase";
    m.dim = 4;
    m.T = 50.0;
    m.intervals = 200;
    m.psi0 = QuantumState::Zero(4);
    m.psi0(0) = m.psi0(2) = 1.0 / std::sqrt(2.0);  // (|g,g> + |e,g>)/sqrt(2)
    m.target = QuantumState::Zero(4);
    m.target(0) = m.target(3) = 1.0 / std::sqrt(2.0);  // (|g,g> + |e,e>)/sqrt(2)
    m.params = {{"theta_1", "theta_12", 0.0, Distribution::truncated_gaussian, Profile::constant},
                {"theta_2", "theta_12", 0.0, Distribution::truncated_gaussian, Profile::constant},
                {"theta_3", "theta_3", 0.0, Distribution::truncated_gaussian, Profile::constant}};
    const Eigen::MatrixXcd half_sz1 = 0.5 * tensor(pauli('z'), identity(2));
    const Eigen::MatrixXcd half_sz2 = 0.5 * tensor(identity(2), pauli('z'));
    const Eigen::MatrixXcd half_sx1 = 0.5 * tensor(pauli('x'), identity(2));
    const Eigen::MatrixXcd half_sx2 = 0.5 * tensor(identity(2), pauli('x'));
    const Eigen::MatrixXcd coupling =
        0.5 * (tensor(pauli('x'), pauli('x')) + tensor(pauli('z'), pauli('z')) / 30.0);
    m.channels.push_back({"omega1", half_sz1, +1.0, 0.0, 5.0, 0});
    m.channels.push_back({"omega2", half_sz2, +1.0, 0.0, 5.0, 1});
    m.channels.push_back({"omega_c", coupling, +1.0, -0.1, 0.1, 2});
    m.drifts.push_back({half_sx1, 2.0, -1});
    m.drifts.push_back({half_sx2, 2.0, -1});
    return m;
}

enum class ModelKind {
    single_charge_excited,
    single_charge_superposition,
    coupled_charge,
    coupled_phase
};

inline QubitModel make_model(ModelKind kind) {
    switch (kind) {
        case ModelKind::single_charge_excited:
            return single_charge_qubit(SingleQubitTarget::excited);
        case ModelKind::single_charge_superposition:
            return single_charge_qubit(SingleQubitTarget::superposition);
        case ModelKind::coupled_charge: return coupled_charge_qubits();
        case ModelKind::coupled_phase: return coupled_phase_qubits();
    }
    throw std::invalid_argument("make_model: unknown kind");
}

inline ModelKind model_kind_from_id(const std::string& id) {
    if (id == "single_charge_excited") return ModelKind::single_charge_excited;
    if (id == "single_charge_superposition") return ModelKind::single_charge_superposition;
    if (id == "coupled_charge") return ModelKind::coupled_charge;
    if (id == "coupled_phase") return ModelKind::coupled_phase;
    throw std::invalid_argument("unknown model id: " + id);
}

// The published starting guesses, sampled at interval midpoints and clamped
// into the channel boxes (the phase-qubit omega formula dips below 0).
inline ControlField reference_initial_field(const QubitModel& m) {
    ControlField f;
    f.T = m.T;
    f.intervals = m.intervals;
    for (const auto& c : m.channels) {
        f.names.push_back(c.name);
        f.lo.push_back(c.lo);
        f.hi.push_back(c.hi);
    }
    f.values.resize(static_cast<std::size_t>(f.channels()) * f.intervals);
    const ModelKind kind = model_kind_from_id(m.id);
    for (int k = 0; k < f.intervals; ++k) {
        const double t = f.midpoint(k);
        switch (kind) {
            case ModelKind::single_charge_excited:
            case ModelKind::single_charge_superposition:
                f.at(0, k) = std::sin(t) + std::cos(t) + 20.0;
                f.at(1, k) = std::sin(t) + std::cos(t) + 5.0;
                break;
            case ModelKind::coupled_charge:
                f.at(0, k) = std::sin(t) + std::cos(t) + 5.0;
                f.at(1, k) = std::sin(t) + std::cos(t) + 5.0;
                f.at(2, k) = 0.25 * std::sin(t);
                break;
            case ModelKind::coupled_phase:
                f.at(0, k) = std::sin(t) + std::cos(t) + 0.5;
                f.at(1, k) = std::sin(t) + std::cos(t) + 0.5;
                f.at(2, k) = 0.05 + 0.05 * std::sin(t);
                break;
        }
    }
    return clamp(std::move(f));
}

}  // namespace slc
