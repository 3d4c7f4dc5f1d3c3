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

#include <memory>
#include <optional>
#include <vector>

#include "qecstep/matrix.hpp"
#include "qecstep/rng.hpp"

namespace qecstep {

/// System (x) environment noise model: one two-level bath mode per system
/// qubit, linearly coupled. Joint tensor layout: system qubits first, then
/// bath modes, all dimension 2.
///
/// H_E = sum_k omega_k n_k,  H_int = sum_k S_k (x) (a_k + a_k^dagger),
/// with S_k a system Pauli (sigma_z for the dephasing bath). The vacuum
/// environment satisfies Tr_E{H_int (I (x) rho_E)} = 0, so the first-order
/// term of the perturbative expansion vanishes.
class BathModel {
public:
    BathModel(int n_sys, std::vector<double> frequencies, std::vector<PauliString> couplings,
              double lambda, std::optional<StateMatrix> env_init = std::nullopt)
        : n_sys_(n_sys), freqs_(std::move(frequencies)), couplings_(std::move(couplings)),
          lambda_(lambda) {
        if (n_sys < 1) throw std::invalid_argument("BathModel: n_sys < 1");
        if (lambda < 0) throw std::invalid_argument("BathModel: lambda < 0");
        if (static_cast<int>(freqs_.size()) != n_sys || static_cast<int>(couplings_.size()) != n_sys)
            throw std::invalid_argument("BathModel: need one frequency and coupling per system qubit");
        for (auto& s : couplings_)
            if (s.n_qubits() != n_sys || !s.is_hermitian())
                throw std::invalid_argument("BathModel: coupling must be a Hermitian system Pauli");

        const Eigen::Index ds = sys_dim(), de = env_dim();
        std::vector<int> joint_dims(2 * n_sys_, 2);

        // Bath-only pieces: number operator and a + a^dagger per mode.
        Matrix he_bath = Matrix::Zero(de, de);
        Matrix hint = Matrix::Zero(ds * de, ds * de);
        for (int k = 0; k < n_sys_; ++k) {
            PauliString n_k = PauliString::single(n_sys_, k, Axis::Z);  // on bath register
            Matrix num = 0.5 * (Matrix::Identity(de, de) - n_k.dense());
            he_bath += freqs_[k] * num;
            Matrix x_k = PauliString::single(n_sys_, k, Axis::X).dense();  // lower + raise
            hint += kron2(couplings_[k].dense(), x_k);
        }
        h_env_ = OperatorMatrix(joint_dims, extend_left(he_bath, ds));
        h_int_ = OperatorMatrix(joint_dims, std::move(hint));

        if (env_init) {
            if (env_init->total_dim() != de)
                throw std::invalid_argument("BathModel: env_init dimension mismatch");
            check_state(*env_init);
            env_init_ = *env_init;
        } else {
            env_init_ = pure_state(std::vector<int>(n_sys_, 2), basis_state(de, 0));
        }

        // First-order-vanishing condition for the supplied environment state.
        Matrix joint_env = extend_left(env_init_.m, ds);
        StateMatrix prod(joint_dims, h_int_.m * joint_env);
        std::vector<int> keep(n_sys_);
        for (int i = 0; i < n_sys_; ++i) keep[i] = i;
        StateMatrix tr = partial_trace(prod, keep);
        if (max_abs(tr.m) > 1e-12)
            throw std::invalid_argument("BathModel: Tr_E{H_int env_init} != 0");

        env_prop_ = std::make_shared<HermitianPropagator>(h_env_.m);
    }

    int n_sys() const { return n_sys_; }
    double lambda() const { return lambda_; }
    const std::vector<double>& frequencies() const { return freqs_; }
    const std::vector<PauliString>& couplings() const { return couplings_; }
    Eigen::Index sys_dim() const { return Eigen::Index(1) << n_sys_; }
    Eigen::Index env_dim() const { return Eigen::Index(1) << n_sys_; }
    std::vector<int> joint_dims() const { return std::vector<int>(2 * n_sys_, 2); }
    std::vector<int> sys_dims() const { return std::vector<int>(n_sys_, 2); }

    const OperatorMatrix& h_env() const { return h_env_; }
    const OperatorMatrix& h_int() const { return h_int_; }
    const StateMatrix& env_init() const { return env_init_; }

    /// True when env_init is the default vacuum (a pure state), enabling
    /// state-vector trajectories.
    bool env_is_vacuum() const {
        Vector vac = basis_state(env_dim(), 0);
        return max_abs(env_init_.m - vac * vac.adjoint()) < 1e-14;
    }

    /// U_E(t) on the joint space (identity on the system register).
    Matrix env_unitary(double t) const { return env_prop_->at(t); }

    /// Total joint Hamiltonian for a system gate Hamiltonian H_S (which may
    /// be empty for a memory qubit).
    Matrix total_h(const Matrix& h_sys) const {
        Matrix h = h_env_.m + lambda_ * h_int_.m;
        if (h_sys.size() > 0) {
            if (h_sys.rows() != sys_dim())
                throw std::invalid_argument("BathModel::total_h: H_S dimension mismatch");
            h += extend_right(h_sys, env_dim());
        }
        return h;
    }

private:
    int n_sys_;
    std::vector<double> freqs_;
    std::vector<PauliString> couplings_;
    double lambda_;
    OperatorMatrix h_env_, h_int_;
    StateMatrix env_init_;
    std::shared_ptr<HermitianPropagator> env_prop_;
};

/// Default mode frequencies 1.0 + 0.1 k, breaking degeneracy.
inline std::vector<double> default_frequencies(int n_sys) {
    std::vector<double> f(n_sys);
    for (int k = 0; k < n_sys; ++k) f[k] = 1.0 + 0.1 * k;
    return f;
}

inline BathModel build_dephasing_bath(int n_sys, std::vector<double> frequencies, double lambda) {
    std::vector<PauliString> couplings;
    couplings.reserve(n_sys);
    for (int k = 0; k < n_sys; ++k)
        couplings.push_back(PauliString::single(n_sys, k, Axis::Z));
    return BathModel(n_sys, std::move(frequencies), std::move(couplings), lambda);
}

inline BathModel build_dephasing_bath(int n_sys, double lambda) {
    return build_dephasing_bath(n_sys, default_frequencies(n_sys), lambda);
}

/// H_I(t) = U_E^dagger(t) H_int U_E(t).
inline OperatorMatrix interaction_picture_h(const BathModel& bath, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("interaction_picture_h: t not finite");
    Matrix ue = bath.env_unitary(t);
    return OperatorMatrix(bath.joint_dims(), ue.adjoint() * bath.h_int().m * ue);
}

/// H~_I(t) = U_S^dagger(t) H_I(t) U_S(t), with the system unitary extended by
/// the identity on the bath register.
inline OperatorMatrix gate_frame_h(const BathModel& bath, const Matrix& h_sys, double t) {
    OperatorMatrix hi = interaction_picture_h(bath, t);
    if (h_sys.size() == 0) return hi;
    if (h_sys.rows() != bath.sys_dim() || h_sys.cols() != bath.sys_dim())
        throw std::invalid_argument("gate_frame_h: H_S must act on the system factors only");
    Matrix us = extend_right(expm_hermitian(h_sys, t), bath.env_dim());
    return OperatorMatrix(bath.joint_dims(), us.adjoint() * hi.m * us);
}

/// Monte-Carlo surrogate: independent per-qubit Pauli flips at each step.
struct StochasticChannel {
    Axis error_axis = Axis::Z;
    double p = 0.0;
    uint64_t seed = 0;

    StochasticChannel() = default;
    StochasticChannel(Axis a, double prob, uint64_t s) : error_axis(a), p(prob), seed(s) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("StochasticChannel: p outside [0,1]");
    }
};

inline std::vector<int> sample_errors(const StochasticChannel& ch, int n_sys,
                                      std::mt19937_64& rng) {
    std::vector<int> flipped;
    for (int q = 0; q < n_sys; ++q)
        if (uniform01(rng) < ch.p) flipped.push_back(q);
    return flipped;
}

}  // namespace qecstep
