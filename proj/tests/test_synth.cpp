// Copyright 2026 The qecstep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include "qecstep/report.hpp"
#include "qecstep/synth.hpp"

using namespace qecstep;

namespace {

double block_residual(const SynthesisPlan& plan) {
    Matrix u = compose(plan);
    Matrix target = pauli_exp(plan.target, plan.effective_angle);
    return phase_aligned_distance(u, target);
}

double residual_slope(const std::function<SynthesisPlan(double)>& make,
                      const std::vector<double>& eps_values) {
    std::vector<double> res;
    for (double e : eps_values) res.push_back(block_residual(make(e)));
    return fit_loglog(eps_values, res).slope;
}

}  // namespace

TEST_CASE("generator products hit the advertised multi-body targets") {
    SynthesisPlan lx = sigma_lx_step(2, 0.1);
    PhaseCode code;
    CHECK(lx.target.str() == code.logical_x().str());
    CHECK(lx.target.phase_pow() == 0);
    CHECK(lx.target.is_hermitian());

    SynthesisPlan in7 = inner_7th(0.1);
    PauliString t3_expected(3, {{0, Axis::Z}, {1, Axis::Z}, {2, Axis::X}});
    CHECK(in7.target.str() == t3_expected.str());

    SynthesisPlan c4 = cnot_4body(0.1);
    PauliString t4_expected(4, {{0, Axis::Z}, {1, Axis::Z}, {2, Axis::Z}, {3, Axis::X}});
    CHECK(c4.target.str() == t4_expected.str());

    // Every factor of every plan is at most two-local.
    for (const SynthesisPlan* p : {&lx, &in7, &c4})
        for (const auto& f : p->factors) CHECK(f.op.weight() <= 2);
}

TEST_CASE("commutator construction rejects bad generator pairs") {
    PauliString a(2, {{0, Axis::Z}});
    PauliString commuting(2, {{1, Axis::X}});
    CHECK_THROWS_AS(block_2nd(a, commuting, 0.1), std::invalid_argument);
    PauliString phased = a.with_phase_pow(1);  // i Z1: not Hermitian
    PauliString b(2, {{0, Axis::X}, {1, Axis::Z}});
    CHECK_THROWS_AS(block_2nd(phased, b, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(inner_7th(0.6), std::invalid_argument);
}

TEST_CASE("2nd-order block: residual O(eps^3)") {
    std::vector<double> eps = {0.02, 0.04, 0.08, 0.16};
    double slope = residual_slope([](double e) { return sigma_lx_step(2, e); }, eps);
    CHECK(std::abs(slope - 3.0) < 0.2);
}

TEST_CASE("3rd-order block: residual O(eps^4)") {
    std::vector<double> eps = {0.02, 0.04, 0.08, 0.16};
    double slope = residual_slope([](double e) { return sigma_lx_step(3, e); }, eps);
    CHECK(std::abs(slope - 4.0) < 0.2);
}

TEST_CASE("7th-order block: residual O(eps^8) with corrected angle") {
    std::vector<double> eps = {0.1, 0.14, 0.2, 0.28};
    double slope = residual_slope([](double e) { return inner_7th(e); }, eps);
    CHECK(std::abs(slope - 8.0) < 0.4);

    // Without the eps^4/eps^6 angle corrections the distance is only O(eps^4):
    // the 8th-order claim genuinely relies on Phi(eps).
    std::vector<double> naive;
    for (double e : eps) {
        SynthesisPlan p = inner_7th(e);
        naive.push_back(phase_aligned_distance(compose(p), pauli_exp(p.target, -2 * e * e)));
    }
    CHECK(std::abs(fit_loglog(eps, naive).slope - 4.0) < 0.3);
}

TEST_CASE("four-body composite: residual O(eps^4)") {
    std::vector<double> eps = {0.05, 0.08, 0.12, 0.2};
    double slope = residual_slope([](double e) { return cnot_4body(e); }, eps);
    CHECK(std::abs(slope - 4.0) < 0.3);
}

TEST_CASE("effective angle value and Newton inversion") {
    // Phi(0.1) = 2e-2 - (8/3)e-4 - (56/45)e-6.
    CHECK(std::abs(inner_7th_angle(0.1) - 0.019732088888888888) < 1e-15);
    for (double phi : {1e-4, 1e-3, 1e-2, 0.05}) {
        double eps = qecstep::detail::solve_inner_eps(phi);
        CHECK(std::abs(inner_7th_angle(eps) - phi) < 1e-13);
        CHECK(eps > 0.0);
        CHECK(eps < 0.5);
    }
    CHECK_THROWS_AS(qecstep::detail::solve_inner_eps(-0.1), std::invalid_argument);
}

TEST_CASE("three-body exponential realizes e^{+i phi T3} both signs") {
    PauliString a1(3, {{0, Axis::Z}, {1, Axis::X}});
    PauliString a2(3, {{1, Axis::Y}, {2, Axis::X}});
    PauliString t3 = PauliString(3, {{0, Axis::Z}, {1, Axis::Z}, {2, Axis::X}});
    for (double phi : {0.03, -0.03}) {
        SynthesisPlan p = qecstep::detail::three_body_exponential(a1, a2, phi);
        CHECK(phase_aligned_distance(compose(p), pauli_exp(t3, -phi)) < 1e-5);
    }
}

TEST_CASE("plan inverse composes to the identity") {
    SynthesisPlan p = cnot_4body(0.13);
    Matrix u = compose(p) * compose(p.inverse());
    CHECK(max_abs(u - Matrix::Identity(16, 16)) < 1e-12);
}

TEST_CASE("execute agrees with dense composition") {
    SynthesisPlan p = sigma_lx_step(3, 0.17);
    auto rng = derive_rng(21, "synth-exec", 0);
    Vector psi(8);
    for (int i = 0; i < 8; ++i) psi(i) = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
    psi.normalize();
    CHECK((execute(p, psi) - compose(p) * psi).norm() < 1e-13);
}

TEST_CASE("composed sigma_Lx steps converge to the logical rotation") {
    PhaseCode code;
    Vector psi0 = code.logical_zero();
    Vector ideal = pauli_exp_apply(code.logical_x(), M_PI / 2.0, psi0);
    double prev = 1.0;
    for (int n : {50, 200}) {
        SynthesisPlan step = sigma_lx_step(3, sigma_lx_epsilon(n));
        Vector psi = psi0;
        for (int k = 0; k < n; ++k) psi = execute(step, psi);
        double inf = 1.0 - state_overlap(ideal, psi);
        CHECK(inf < prev);
        prev = inf;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("composed CNOT steps converge to the logical CNOT") {
    PhaseCode code;
    Vector psi0 = kron_vec(code.logical_one(), code.logical_zero());
    Vector ideal = cnot_unitary(true) * psi0;
    SynthesisPlan step = cnot_step(3, 100);
    Vector psi = psi0;
    for (int k = 0; k < 100; ++k) psi = execute(step, psi);
    CHECK(1.0 - state_overlap(ideal, psi) < 1e-3);
    for (const auto& f : step.factors) CHECK(f.op.weight() <= 2);
}

TEST_CASE("fidelity sweep emits one row per (N, initial state)") {
    auto rows = fidelity_sweep(SynthGate::LogicalSigmaX, {10, 20, 40, 80}, 2);
    CHECK(rows.size() == 4 * 2);
    for (auto& r : rows) {
        CHECK(r.gate == "sigma_lx");
        CHECK(r.infidelity >= 0.0);
        CHECK(r.infidelity < 1.0);
        CHECK(std::abs(r.epsilon - sigma_lx_epsilon(r.n_steps)) < 1e-15);
    }
    auto crows = fidelity_sweep(SynthGate::LogicalCnot, {8, 16, 32, 64}, 3);
    CHECK(crows.size() == 4 * 4);
    CHECK_THROWS_AS(fidelity_sweep(SynthGate::LogicalSigmaX, {10}, 5), std::invalid_argument);
    CHECK_THROWS_AS(fidelity_sweep(SynthGate::LogicalSigmaX, {0}, 2), std::invalid_argument);
}
