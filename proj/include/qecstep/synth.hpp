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

#pragma once

#include <string>

#include "qecstep/gates.hpp"

namespace qecstep {

/// One exponential factor exp(-i angle P).
struct SynthFactor {
    PauliString op;
    double angle;
};

/// Ordered two-body exponential factors approximating a multi-body
/// exponential. Factors are stored in application order (factors[0] acts on
/// the state first). The composed product approximates
/// exp(-i effective_angle * target) with residual O(eps^residual_order).
struct SynthesisPlan {
    int n_qubits = 0;
    std::vector<SynthFactor> factors;
    PauliString target = PauliString(1);
    double effective_angle = 0.0;
    int residual_order = 0;

    void check_locality() const {
        for (auto& f : factors)
            if (f.op.weight() > 2)
                throw std::logic_error("SynthesisPlan: factor with support > 2 qubits");
    }

    SynthesisPlan inverse() const {
        SynthesisPlan inv = *this;
        std::reverse(inv.factors.begin(), inv.factors.end());
        for (auto& f : inv.factors) f.angle = -f.angle;
        inv.effective_angle = -effective_angle;
        return inv;
    }

    void append(const SynthesisPlan& other) {
        factors.insert(factors.end(), other.factors.begin(), other.factors.end());
    }
};

inline Vector execute(const SynthesisPlan& plan, Vector state) {
    for (auto& f : plan.factors) state = pauli_exp_apply(f.op, f.angle, state);
    return state;
}

inline Matrix compose(const SynthesisPlan& plan) {
    const Eigen::Index d = Eigen::Index(1) << plan.n_qubits;
    Matrix u = Matrix::Identity(d, d);
    for (auto& f : plan.factors) u = pauli_exp(f.op, f.angle) * u;
    return u;
}

namespace detail {

/// For anticommuting Hermitian Paulis A, B the product AB carries phase
/// +/-i; the Hermitian target is T = -i A B.
inline PauliString commutator_target(const PauliString& a, const PauliString& b) {
    if (!a.is_hermitian() || !b.is_hermitian())
        throw std::invalid_argument("synthesis generators must be Hermitian Paulis");
    if (a.commutes_with(b))
        throw std::invalid_argument("synthesis generators commute: no target generated");
    PauliString p = a * b;
    return p.with_phase_pow(p.phase_pow() + 3);  // multiply by -i
}

inline void require_two_local(const PauliString& p, const char* who) {
    if (p.weight() > 2) throw std::invalid_argument(std::string(who) + ": generator not 2-local");
}

}  // namespace detail

/// Four-factor group commutator
///   e^{-iA eps} e^{-iB eps} e^{iA eps} e^{iB eps}
///     = 1 - 2i eps^2 T + O(eps^3),  T = -i A B.
inline SynthesisPlan block_2nd(const PauliString& a, const PauliString& b, double eps) {
    detail::require_two_local(a, "block_2nd");
    detail::require_two_local(b, "block_2nd");
    SynthesisPlan plan;
    plan.n_qubits = a.n_qubits();
    plan.target = detail::commutator_target(a, b);
    plan.effective_angle = 2 * eps * eps;
    plan.residual_order = 3;
    plan.factors = {{b, -eps}, {a, -eps}, {b, eps}, {a, eps}};
    plan.check_locality();
    return plan;
}

/// Third-order refinement: the 2nd-order block preceded (in product order,
/// i.e. applied first) by e^{-2i eps^3 B} e^{2i eps^3 A}.
inline SynthesisPlan block_3rd(const PauliString& a, const PauliString& b, double eps) {
    SynthesisPlan plan = block_2nd(a, b, eps);
    const double e3 = 2 * eps * eps * eps;
    plan.factors.insert(plan.factors.begin(), {{a, -e3}, {b, e3}});
    plan.residual_order = 4;
    return plan;
}

/// Effective rotation angle of the 7th-order block.
inline double inner_7th_angle(double eps) {
    const double e2 = eps * eps;
    return 2 * e2 - (8.0 / 3.0) * e2 * e2 - (56.0 / 45.0) * e2 * e2 * e2;
}

/// Eight-factor expansion approximating e^{+i Phi(eps) T}, T = -i A B, with
/// Phi(eps) = 2 eps^2 - 8 eps^4 / 3 - 56 eps^6 / 45 and residual O(eps^8):
///   e^{i eps A} e^{-i eps B} e^{-i eps A} e^{i eps B}
///   e^{i(6 eps^5 - 92 eps^7 / 15) A} e^{-i(2 eps^5 - 188 eps^7 / 15) B}
///   e^{-2i eps^3 A} e^{-2i eps^3 B}.
/// The eps^7 coefficients are fixed by requiring the BCH defect at seventh
/// order to vanish; a defect of i eps^7 (28 A / 3 - 4 B / 3) remains with any
/// other choice and degrades the composite to O(eps^7).
inline SynthesisPlan inner_7th(const PauliString& a, const PauliString& b, double eps) {
    if (std::abs(eps) >= 0.5)
        throw std::invalid_argument("inner_7th: |eps| >= 0.5 (effective angle not monotone)");
    detail::require_two_local(a, "inner_7th");
    detail::require_two_local(b, "inner_7th");
    SynthesisPlan plan;
    plan.n_qubits = a.n_qubits();
    plan.target = detail::commutator_target(a, b);
    plan.effective_angle = -inner_7th_angle(eps);
    plan.residual_order = 8;
    const double e3 = eps * eps * eps;
    const double e5 = e3 * eps * eps;
    const double e7 = e5 * eps * eps;
    plan.factors = {{b, 2 * e3},
                    {a, 2 * e3},
                    {b, 2 * e5 - 188.0 / 15.0 * e7},
                    {a, -(6 * e5 - 92.0 / 15.0 * e7)},
                    {b, -eps},
                    {a, eps},
                    {b, eps},
                    {a, -eps}};
    plan.check_locality();
    return plan;
}

/// The paper's inner block on sigma_{1,z} sigma_{2,x} and
/// sigma_{2,y} sigma_{3,x}, targeting sigma_{1,z} sigma_{2,z} sigma_{3,x}.
inline SynthesisPlan inner_7th(double eps) {
    PauliString a(3, {{0, Axis::Z}, {1, Axis::X}});
    PauliString b(3, {{1, Axis::Y}, {2, Axis::X}});
    return inner_7th(a, b, eps);
}

namespace detail {

/// Solves inner_7th_angle(eps) = phi for the (positive) block parameter.
inline double solve_inner_eps(double phi) {
    if (phi <= 0) throw std::invalid_argument("solve_inner_eps: phi <= 0");
    double eps = std::sqrt(phi / 2.0);
    for (int it = 0; it < 60; ++it) {
        double e2 = eps * eps;
        double f = inner_7th_angle(eps) - phi;
        double df = 4 * eps - (32.0 / 3.0) * eps * e2 - (336.0 / 45.0) * eps * e2 * e2;
        double step = f / df;
        eps -= step;
        if (std::abs(step) < 1e-16) break;
    }
    if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("solve_inner_eps: phi out of range");
    return eps;
}

/// A plan realizing e^{+i phi T3}, T3 = -i A1 A2, entirely from two-body
/// factors via the 7th-order block.
inline SynthesisPlan three_body_exponential(const PauliString& a1, const PauliString& a2,
                                            double phi) {
    if (phi == 0) {
        SynthesisPlan empty;
        empty.n_qubits = a1.n_qubits();
        empty.target = commutator_target(a1, a2);
        empty.effective_angle = 0.0;
        empty.residual_order = 8;
        return empty;
    }
    if (phi > 0) return inner_7th(a1, a2, solve_inner_eps(phi));
    return inner_7th(a1, a2, solve_inner_eps(-phi)).inverse();
}

}  // namespace detail

/// Group-commutator block on a three-body generator T3 = -i A1 A2 (realized
/// through 7th-order inner blocks) against a two-body B, targeting
/// e^{-2i eps^2 T4} with T4 = -i T3 B and residual O(eps^4):
///   e^{-i eps T3} e^{-i eps B} e^{i eps T3} e^{i eps B}
///   e^{-2i eps^3 B} e^{2i eps^3 T3}.
inline SynthesisPlan four_body_block(const PauliString& a1, const PauliString& a2,
                                     const PauliString& b, double eps) {
    if (std::abs(eps) >= 0.5) throw std::invalid_argument("four_body_block: |eps| >= 0.5");
    detail::require_two_local(b, "four_body_block");
    PauliString t3 = detail::commutator_target(a1, a2);
    SynthesisPlan plan;
    plan.n_qubits = a1.n_qubits();
    plan.target = detail::commutator_target(t3, b);
    plan.effective_angle = 2 * eps * eps;
    plan.residual_order = 4;

    const double e3 = 2 * eps * eps * eps;
    SynthesisPlan t3_pos = detail::three_body_exponential(a1, a2, eps);       // e^{+i eps T3}
    SynthesisPlan t3_neg = t3_pos.inverse();                                  // e^{-i eps T3}
    SynthesisPlan t3_corr = detail::three_body_exponential(a1, a2, e3);       // e^{+2i eps^3 T3}

    // Application order is the reverse of the written product.
    plan.append(t3_corr);
    plan.factors.push_back({b, e3});
    plan.factors.push_back({b, -eps});
    plan.append(t3_pos);
    plan.factors.push_back({b, eps});
    plan.append(t3_neg);
    plan.check_locality();
    return plan;
}

/// The paper's four-qubit composite: inner generator
/// sigma_{1,z} sigma_{2,z} sigma_{3,x} (from sigma_{1,z} sigma_{2,x} and
/// sigma_{2,y} sigma_{3,x}) against sigma_{3,y} sigma_{4,x}, targeting
/// e^{-2i eps^2 sigma_{1,z} sigma_{2,z} sigma_{3,z} sigma_{4,x}}.
inline SynthesisPlan cnot_4body(double eps) {
    PauliString a1(4, {{0, Axis::Z}, {1, Axis::X}});
    PauliString a2(4, {{1, Axis::Y}, {2, Axis::X}});
    PauliString b(4, {{2, Axis::Y}, {3, Axis::X}});
    return four_body_block(a1, a2, b, eps);
}

// ---------------------------------------------------------------------------
// Fidelity sweeps (the figures' measurement).

enum class SynthGate { LogicalSigmaX, LogicalCnot };

struct SweepRow {
    std::string gate;
    int order = 0;
    int n_steps = 0;
    double epsilon = 0.0;
    std::string initial_state;
    double infidelity = 0.0;
};

/// One step of the synthesized logical sigma_x: a single (2nd or 3rd order)
/// commutator block advancing the Z1 Z2 Z3 rotation by 2 eps^2.
inline SynthesisPlan sigma_lx_step(int order, double eps) {
    PauliString a(3, {{0, Axis::Z}, {1, Axis::X}});
    PauliString b(3, {{1, Axis::Y}, {2, Axis::Z}});
    return order == 2 ? block_2nd(a, b, eps) : block_3rd(a, b, eps);
}

/// One step of the synthesized logical CNOT on six qubits. The end-time
/// unitary factors into commuting exponentials
///   U = e^{-i pi/4} e^{i(pi/4) X1} e^{i(pi/4) Z4 Z5 Z6} e^{-i(pi/4) X1 Z4 Z5 Z6},
/// each advanced by 1/N of its angle per step: the one-body factor exactly,
/// the three-body factor through a 7th-order inner block, and the four-body
/// factor through the commutator block of `four_body_block` (2nd or 3rd
/// order outer expansion).
inline SynthesisPlan cnot_step(int order, int n_steps) {
    const double phi = M_PI / 4.0 / n_steps;
    SynthesisPlan plan;
    plan.n_qubits = 6;
    plan.target = PauliString(6);  // informational only; the step is composite
    plan.residual_order = order + 1;

    // e^{+i phi X1}: physical one-body rotation.
    plan.factors.push_back({PauliString::single(6, 0, Axis::X), -phi});

    // e^{+i phi Z4 Z5 Z6}.
    PauliString a1(6, {{3, Axis::Z}, {4, Axis::X}});
    PauliString a2(6, {{4, Axis::Y}, {5, Axis::Z}});
    plan.append(detail::three_body_exponential(a1, a2, phi));

    // e^{-i phi X1 Z4 Z5 Z6}: four-body commutator block with 2 eps^2 = phi.
    PauliString b1(6, {{0, Axis::X}, {3, Axis::X}});
    PauliString b2(6, {{3, Axis::Y}, {4, Axis::X}});
    PauliString c(6, {{4, Axis::Y}, {5, Axis::Z}});
    const double eps = std::sqrt(phi / 2.0);
    SynthesisPlan fb = four_body_block(b1, b2, c, eps);
    if (order == 2) {
        // Drop the eps^3 correction factors of the outer block (the leading
        // e^{+2i eps^3 T3} sub-plan and the e^{-2i eps^3 B} factor).
        size_t corr_len =
            detail::three_body_exponential(b1, b2, 2 * eps * eps * eps).factors.size() + 1;
        fb.factors.erase(fb.factors.begin(), fb.factors.begin() + corr_len);
        fb.residual_order = 3;
    }
    plan.append(fb);
    plan.check_locality();
    return plan;
}

/// Per-block parameter for realizing total angle pi/2 on the logical
/// sigma_x target in n blocks of effective angle 2 eps^2 each.
inline double sigma_lx_epsilon(int n_steps) { return std::sqrt(M_PI / (4.0 * n_steps)); }

inline std::vector<SweepRow> fidelity_sweep(SynthGate gate, const std::vector<int>& n_values,
                                            int order) {
    if (order != 2 && order != 3) throw std::invalid_argument("fidelity_sweep: order must be 2 or 3");
    PhaseCode code;
    std::vector<SweepRow> rows;

    if (gate == SynthGate::LogicalSigmaX) {
        std::vector<std::pair<std::string, Vector>> inits = {{"0", code.logical_zero()},
                                                             {"1", code.logical_one()}};
        PauliString t = code.logical_x();
        for (int n : n_values) {
            if (n < 1) throw std::invalid_argument("fidelity_sweep: N < 1");
            const double eps = sigma_lx_epsilon(n);
            SynthesisPlan step = sigma_lx_step(order, eps);
            for (auto& [label, psi0] : inits) {
                Vector psi = psi0;
                for (int k = 0; k < n; ++k) psi = execute(step, std::move(psi));
                Vector ideal = pauli_exp_apply(t, M_PI / 2.0, psi0);
                rows.push_back({"sigma_lx", order, n, eps, label, 1.0 - state_overlap(ideal, psi)});
            }
        }
        return rows;
    }

    Matrix ideal_u = cnot_unitary(true);
    std::vector<std::pair<std::string, Vector>> inits;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            inits.emplace_back(std::to_string(a) + std::to_string(b),
                               kron_vec(a ? code.logical_one() : code.logical_zero(),
                                        b ? code.logical_one() : code.logical_zero()));
    for (int n : n_values) {
        if (n < 1) throw std::invalid_argument("fidelity_sweep: N < 1");
        SynthesisPlan step = cnot_step(order, n);
        const double eps = std::sqrt(M_PI / (8.0 * n));
        for (auto& [label, psi0] : inits) {
            Vector psi = psi0;
            for (int k = 0; k < n; ++k) psi = execute(step, psi);
            Vector ideal = ideal_u * psi0;
            rows.push_back({"cnot", order, n, eps, label, 1.0 - state_overlap(ideal, psi)});
        }
    }
    return rows;
}

}  // namespace qecstep
