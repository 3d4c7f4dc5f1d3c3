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

#include <array>
#include <optional>

#include "qecstep/matrix.hpp"
#include "qecstep/rng.hpp"

namespace qecstep {

/// Stabilizer measurement outcome: one bit per generator, 1 = eigenvalue -1.
struct Syndrome {
    int bit1 = 0;
    int bit2 = 0;
    bool trivial() const { return bit1 == 0 && bit2 == 0; }
    bool operator==(const Syndrome& o) const { return bit1 == o.bit1 && bit2 == o.bit2; }
};

/// Embeds a Pauli string into a larger register at a qubit offset.
inline PauliString shifted(const PauliString& p, int n_total, int offset) {
    std::vector<std::pair<int, Axis>> ops;
    for (auto& [q, a] : p.factors()) ops.emplace_back(q + offset, a);
    return PauliString(n_total, std::move(ops), p.phase_pow());
}

/// The triple-repetition phase-error-correcting code:
///   |m>_L = (x)_k (|0> + (-1)^m |1>)/sqrt(2),
/// stabilized by X1 X2 and X2 X3, with logical sigma_z = X1 and logical
/// sigma_x = Z1 Z2 Z3.
class PhaseCode {
public:
    static constexpr int n_physical = 3;

    PhaseCode() {
        Vector plus(2), minus(2);
        plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
        zero_l_ = kron_vec(kron_vec(plus, plus), plus);
        one_l_ = kron_vec(kron_vec(minus, minus), minus);
    }

    const Vector& logical_zero() const { return zero_l_; }
    const Vector& logical_one() const { return one_l_; }

    std::array<PauliString, 2> stabilizers() const {
        return {PauliString(3, {{0, Axis::X}, {1, Axis::X}}),
                PauliString(3, {{1, Axis::X}, {2, Axis::X}})};
    }

    PauliString logical_z() const { return PauliString::single(3, 0, Axis::X); }
    PauliString logical_x() const {
        return PauliString(3, {{0, Axis::Z}, {1, Axis::Z}, {2, Axis::Z}});
    }
    /// +i sigma_Lx sigma_Lz, which is Hermitian (= -Y1 Z2 Z3).
    PauliString logical_y() const {
        PauliString p = logical_x() * logical_z();
        return p.with_phase_pow(p.phase_pow() + 1);
    }

    Vector encode(Complex alpha, Complex beta) const {
        if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-10)
            throw std::invalid_argument("encode: |alpha|^2 + |beta|^2 != 1");
        return alpha * zero_l_ + beta * one_l_;
    }

    /// P = |0_L><0_L| + |1_L><1_L|.
    OperatorMatrix code_projector() const {
        Matrix p = zero_l_ * zero_l_.adjoint() + one_l_ * one_l_.adjoint();
        return OperatorMatrix({2, 2, 2}, std::move(p));
    }

    /// Correction named by the syndrome table:
    /// (0,0) -> I, (1,0) -> Z1, (1,1) -> Z2, (0,1) -> Z3.
    std::optional<PauliString> correction_for(const Syndrome& s) const {
        if (s.trivial()) return std::nullopt;
        int q = s.bit1 ? (s.bit2 ? 1 : 0) : 2;
        return PauliString::single(3, q, Axis::Z);
    }

private:
    Vector zero_l_, one_l_;
};

/// Projective measurement of one Hermitian Pauli with +/-1 spectrum on a
/// pure state. Returns the sampled bit (1 = eigenvalue -1) and projects.
inline int measure_pauli(const PauliString& s, Vector& psi, std::mt19937_64& rng,
                         double zero_tol = 1e-14) {
    Vector sv = s.apply(psi);
    Vector plus = 0.5 * (psi + sv);
    double p_plus = plus.squaredNorm();
    int bit = uniform01(rng) < p_plus ? 0 : 1;
    Vector proj = bit == 0 ? plus : Vector(0.5 * (psi - sv));
    double n = proj.norm();
    if (n < zero_tol) throw std::runtime_error("measure_pauli: impossible-outcome projection");
    psi = proj / n;
    return bit;
}

/// Density-matrix variant.
inline int measure_pauli(const PauliString& s, StateMatrix& rho, std::mt19937_64& rng,
                         double zero_tol = 1e-14) {
    Matrix sd = s.dense();
    Matrix id = Matrix::Identity(sd.rows(), sd.cols());
    Matrix proj_p = 0.5 * (id + sd);
    double p_plus = (proj_p * rho.m).trace().real();
    int bit = uniform01(rng) < p_plus ? 0 : 1;
    Matrix proj = bit == 0 ? proj_p : Matrix(0.5 * (id - sd));
    Matrix post = proj * rho.m * proj;
    double tr = post.trace().real();
    if (tr < zero_tol) throw std::runtime_error("measure_pauli: impossible-outcome projection");
    rho.m = post / tr;
    return bit;
}

/// Measures both stabilizer generators of a code block starting at `offset`
/// in an n_total-qubit register.
template <typename State>
inline Syndrome measure_syndrome(const PhaseCode& code, State& state, std::mt19937_64& rng,
                                 int n_total = 3, int offset = 0) {
    auto gens = code.stabilizers();
    Syndrome s;
    s.bit1 = measure_pauli(shifted(gens[0], n_total, offset), state, rng);
    s.bit2 = measure_pauli(shifted(gens[1], n_total, offset), state, rng);
    return s;
}

template <typename State>
inline void recover(const PhaseCode& code, State& state, const Syndrome& s, int n_total = 3,
                    int offset = 0) {
    auto corr = code.correction_for(s);
    if (!corr) return;
    PauliString c = shifted(*corr, n_total, offset);
    if constexpr (std::is_same_v<State, Vector>) {
        state = c.apply(state);
    } else {
        Matrix cd = c.dense();
        state.m = cd * state.m * cd.adjoint();
    }
}

}  // namespace qecstep
