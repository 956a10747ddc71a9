#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <slc/quantum.hpp>

#include "helpers.hpp"
#include "oracles.hpp"

using slc::Complex;
using slc::HermitianOperator;
using slc::QuantumState;
using testutil::max_abs_diff;

TEST_CASE("pauli matrices take the stated values", "[quantum]") {
    const auto sx = slc::pauli('x');
    const auto sy = slc::pauli('y');
    const auto sz = slc::pauli('z');
    CHECK(sx(0, 0) == Complex(0, 0));
    CHECK(sx(0, 1) == Complex(1, 0));
    CHECK(sx(1, 0) == Complex(1, 0));
    CHECK(sx(1, 1) == Complex(0, 0));
    CHECK(sy(0, 1) == Complex(0, -1));
    CHECK(sy(1, 0) == Complex(0, 1));
    CHECK(sz(0, 0) == Complex(1, 0));
    CHECK(sz(1, 1) == Complex(-1, 0));
    CHECK_THROWS_AS(slc::pauli('q'), std::invalid_argument);

    // sigma_z |g> = +|g> with |g> = (1,0)^T.
    QuantumState g(2);
    g << 1.0, 0.0;
    CHECK((sz * g - g).norm() == 0.0);
}

TEST_CASE("tensor products order qubit 1 as the left factor", "[quantum]") {
    const auto i2 = slc::identity(2);
    CHECK(max_abs_diff(slc::tensor(i2, i2), slc::identity(4)) == 0.0);

    const auto sz1 = slc::tensor(slc::pauli('z'), i2);
    Eigen::Vector4d diag;
    for (int i = 0; i < 4; ++i) diag(i) = sz1(i, i).real();
    CHECK(diag(0) == 1.0);
    CHECK(diag(1) == 1.0);
    CHECK(diag(2) == -1.0);
    CHECK(diag(3) == -1.0);

    const auto sxsx = slc::tensor(slc::pauli('x'), slc::pauli('x'));
    CHECK(sxsx(0, 3) == Complex(1, 0));
    CHECK(sxsx(1, 2) == Complex(1, 0));
    CHECK(sxsx(0, 0) == Complex(0, 0));
    CHECK(sxsx.cwiseAbs().sum() == 4.0);
}

TEST_CASE("hermitian constructions are conjugate-symmetric exactly as stored", "[quantum]") {
    slc::Rng rng(11);
    for (int it = 0; it < 200; ++it) {
        const int n = it % 2 ? 2 : 4;
        const auto h = testutil::random_hermitian(n, rng, 10.0);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                CHECK(h(r, c) == std::conj(h(c, r)));
            }
    }
}

TEST_CASE("step propagator of a diagonal hamiltonian is a pure phase", "[quantum]") {
    const double a = 3.25, dt = 0.17;
    const auto u = slc::step_propagator(a * slc::pauli('z'), dt);
    const Complex expect = std::exp(Complex(0.0, -a * dt));
    CHECK(std::abs(u(0, 0) - expect) < 1e-14);
    CHECK(std::abs(u(1, 1) - std::conj(expect)) < 1e-14);
    CHECK(std::abs(u(0, 1)) < 1e-15);
    CHECK(std::abs(u(1, 0)) < 1e-15);
}

TEST_CASE("step propagator matches the pauli-x rotation formula", "[quantum]") {
    const double g = 2.5, dt = 0.3;
    // exp(-i g dt sigma_x) = cos(g dt) I - i sin(g dt) sigma_x
    const auto u = slc::step_propagator(g * slc::pauli('x'), dt);
    CHECK(std::abs(u(0, 0) - Complex(std::cos(g * dt), 0)) < 1e-14);
    CHECK(std::abs(u(0, 1) - Complex(0, -std::sin(g * dt))) < 1e-14);
    CHECK(std::abs(u(1, 0) - Complex(0, -std::sin(g * dt))) < 1e-14);
    CHECK(std::abs(u(1, 1) - Complex(std::cos(g * dt), 0)) < 1e-14);
}

TEST_CASE("step propagator matches a z-x rotation closed form", "[quantum]") {
    slc::Rng rng(12);
    for (int it = 0; it < 100; ++it) {
        const double a = testutil::urand(rng, -20.0, 20.0);
        const double b = testutil::urand(rng, -10.0, 10.0);
        const double dt = testutil::urand(rng, 0.001, 1.0);
        const auto u = slc::step_propagator(a * slc::pauli('z') + b * slc::pauli('x'), dt);
        const auto ref = oracle::rotation_zx(a, b, dt);
        CHECK(max_abs_diff(u, ref) < 1e-8);
    }
}

TEST_CASE("step propagator matches a series exponential on random hamiltonians", "[quantum]") {
    slc::Rng rng(13);
    for (int it = 0; it < 200; ++it) {
        const int n = it % 2 ? 2 : 4;
        const auto h = testutil::random_hermitian(n, rng, 5.0);
        const double dt = testutil::urand(rng, 0.001, 1.0);
        const auto u = slc::step_propagator(h, dt);
        const auto ref = oracle::expm_series(Complex(0.0, -dt) * h);
        CHECK(max_abs_diff(u, ref) < 1e-8);
    }
}

TEST_CASE("step propagator is unitary within 1e-10", "[quantum]") {
    slc::Rng rng(14);
    const int trials = 100000;
    double worst = 0.0;
    for (int it = 0; it < trials; ++it) {
        const int n = it % 2 ? 2 : 4;
        const auto h = testutil::random_hermitian(n, rng, 40.0);
        const double dt = testutil::urand(rng, 1e-6, 1.0);
        const auto u = slc::step_propagator(h, dt);
        const double dev = max_abs_diff(u * u.adjoint(), slc::identity(n));
        if (dev > worst) worst = dev;
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("step propagator rejects bad input", "[quantum]") {
    CHECK_THROWS_AS(slc::step_propagator(slc::pauli('z'), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(slc::step_propagator(slc::pauli('z'), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(slc::step_propagator(Eigen::MatrixXcd::Zero(2, 3), 0.1),
                    std::invalid_argument);
}

TEST_CASE("evolution over an empty schedule returns the initial state", "[quantum]") {
    QuantumState psi0(2);
    psi0 << Complex(0.6, 0.0), Complex(0.0, 0.8);
    const auto states = slc::evolve_states(psi0, {}, 0.5);
    REQUIRE(states.size() == 1);
    CHECK((states[0] - psi0).norm() == 0.0);
    CHECK((slc::evolve(psi0, {}, 0.5) - psi0).norm() == 0.0);
}

TEST_CASE("evolution applies steps left to right and preserves norm", "[quantum]") {
    slc::Rng rng(15);
    for (int it = 0; it < 50; ++it) {
        const int n = it % 2 ? 2 : 4;
        std::vector<HermitianOperator> schedule;
        for (int k = 0; k < 8; ++k) schedule.push_back(testutil::random_hermitian(n, rng, 8.0));
        const double dt = testutil::urand(rng, 0.01, 0.5);
        const auto psi0 = testutil::random_state(n, rng);

        const auto states = slc::evolve_states(psi0, schedule, dt);
        REQUIRE(states.size() == schedule.size() + 1);
        for (const auto& s : states) CHECK(std::abs(s.norm() - 1.0) < 1e-10);

        // Splitting the schedule and chaining evolve reproduces the same path.
        std::vector<HermitianOperator> head(schedule.begin(), schedule.begin() + 3);
        std::vector<HermitianOperator> tail(schedule.begin() + 3, schedule.end());
        const auto mid = slc::evolve(psi0, head, dt);
        const auto chained = slc::evolve(mid, tail, dt);
        CHECK((chained - states.back()).norm() < 1e-12);
    }
}

TEST_CASE("a resonant x pulse transfers ground to excited", "[quantum]") {
    // H = -g sigma_x for time t rotates |g> to |e> when g t = pi/2.
    const double g = 5.0;
    const double t = 0.5 * M_PI / g;
    QuantumState psi0(2), e(2);
    psi0 << 1.0, 0.0;
    e << 0.0, 1.0;
    std::vector<HermitianOperator> schedule(10, -g * slc::pauli('x'));
    const auto psi = slc::evolve(psi0, schedule, t / 10.0);
    CHECK(slc::fidelity(psi, e) > 1.0 - 1e-12);
}

TEST_CASE("evolution validates its arguments", "[quantum]") {
    QuantumState psi0(2);
    psi0 << 1.0, 0.0;
    QuantumState unnormalized(2);
    unnormalized << 1.0, 1.0;
    std::vector<HermitianOperator> schedule{slc::pauli('z')};
    CHECK_THROWS_AS(slc::evolve(psi0, schedule, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(slc::evolve(unnormalized, schedule, 0.1), std::invalid_argument);
    std::vector<HermitianOperator> wrong{slc::identity(4)};
    CHECK_THROWS_AS(slc::evolve(psi0, wrong, 0.1), std::invalid_argument);
}

TEST_CASE("fidelity matches hand-computed overlaps", "[quantum]") {
    QuantumState g(2), e(2), plus(2);
    g << 1.0, 0.0;
    e << 0.0, 1.0;
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CHECK(slc::fidelity(g, g) == 1.0);
    CHECK(slc::fidelity(g, e) == 0.0);
    CHECK(std::abs(slc::fidelity(g, plus) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(slc::fidelity(plus, e) - 1.0 / std::sqrt(2.0)) < 1e-15);
    QuantumState a(3);
    CHECK_THROWS_AS(slc::fidelity(g, a), std::invalid_argument);
}

TEST_CASE("fidelity ignores global phase and stays in [0,1]", "[quantum]") {
    slc::Rng rng(16);
    for (int it = 0; it < 1000; ++it) {
        const int n = it % 2 ? 2 : 4;
        const auto a = testutil::random_state(n, rng);
        const auto b = testutil::random_state(n, rng);
        const double f = slc::fidelity(a, b);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        const double alpha = testutil::urand(rng, -M_PI, M_PI);
        const Complex phase = std::exp(Complex(0.0, alpha));
        // Exact in real arithmetic; the per-component multiply rounds, so
        // allow a few ulp.
        CHECK(std::abs(slc::fidelity((phase * a).eval(), b) - f) < 8e-16);
        CHECK(slc::fidelity(a, b) == slc::fidelity(b, a));
    }
}
