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

#include "qecstep/bath.hpp"
#include "qecstep/quadrature.hpp"

namespace qecstep {

/// Inner integration limit of the nested-commutator term. The unscaled
/// double integral runs over the triangle 0 <= t'' <= t', which rescales to
/// v <= u; with the full-square limit the term vanishes identically by
/// antisymmetry of the commutator under u <-> v. Both variants are provided
/// so the choice can be validated against the exact-evolution oracle; the
/// triangular one reproduces the O(lambda^3) residual and is the default.
enum class InnerLimit { Triangular, FullSquare };

/// Second-order error superoperator in precomputed form.
///
/// The full-square double commutator collapses exactly:
///   int du dv [H(u), [rho, H(v)]] = [M, [rho, M]],  M = int_0^1 H~_I(ut) du,
/// and the nested term is [K, rho] with a rho-independent matrix K, so the
/// kernel reduces to two fixed operators on the joint space.
struct SuperopKernel {
    std::vector<int> dims;
    Matrix first_moment;   // M
    Matrix comm_integral;  // K (zero for the full-square variant)
    InnerLimit variant = InnerLimit::Triangular;
    double t = 0.0;

    Matrix apply(const Matrix& rho) const {
        if (rho.rows() != first_moment.rows())
            throw std::invalid_argument("SuperopKernel::apply: dimension mismatch");
        const Matrix& m = first_moment;
        Matrix inner = rho * m - m * rho;       // [rho, M]
        Matrix out = m * inner - inner * m;     // [M, [rho, M]]
        out -= comm_integral * rho - rho * comm_integral;
        return out;
    }
};

namespace detail {

/// Samples H~_I(tau) = W(tau)^dagger H_int W(tau), W = U_E U_S, reusing the
/// cached propagators.
class GateFrameSampler {
public:
    GateFrameSampler(const BathModel& bath, const Matrix& h_sys)
        : bath_(bath), has_gate_(h_sys.size() > 0) {
        if (has_gate_) {
            if (h_sys.rows() != bath.sys_dim())
                throw std::invalid_argument("GateFrameSampler: H_S must act on system factors");
            sys_prop_.emplace(h_sys);
        }
    }

    Matrix at(double tau) const {
        Matrix w = bath_.env_unitary(tau);
        if (has_gate_) w = extend_right(sys_prop_->at(tau), bath_.env_dim()) * w;
        return w.adjoint() * bath_.h_int().m * w;
    }

private:
    const BathModel& bath_;
    bool has_gate_;
    std::optional<HermitianPropagator> sys_prop_;
};

}  // namespace detail

inline SuperopKernel error_superop(const BathModel& bath, const Matrix& h_sys, double t,
                                   const QuadratureSpec& quad = {},
                                   InnerLimit variant = InnerLimit::Triangular) {
    if (t <= 0) throw std::invalid_argument("error_superop: t <= 0");
    detail::GateFrameSampler sampler(bath, h_sys);
    const Eigen::Index d = bath.sys_dim() * bath.env_dim();

    QuadratureRule line = gauss_legendre_unit(quad.nodes_per_axis);
    Matrix m = Matrix::Zero(d, d);
    std::vector<Matrix> h_u(line.size());
    for (size_t i = 0; i < line.size(); ++i) {
        h_u[i] = sampler.at(line.nodes[i] * t);
        m += line.weights[i] * h_u[i];
    }

    Matrix k = Matrix::Zero(d, d);
    if (variant == InnerLimit::Triangular) {
        // Collapsed rule: v = u s, one fresh sample per (i, j) pair.
        for (size_t i = 0; i < line.size(); ++i) {
            Matrix inner = Matrix::Zero(d, d);
            for (size_t j = 0; j < line.size(); ++j) {
                Matrix h_v = sampler.at(line.nodes[i] * line.nodes[j] * t);
                inner += line.weights[j] * h_v;
            }
            Matrix comm = h_u[i] * inner - inner * h_u[i];
            k += line.weights[i] * line.nodes[i] * comm;
        }
    }
    // Full-square variant: sum_ij w_i w_j [H_i, H_j] = [M, M] = 0.

    SuperopKernel kern;
    kern.dims = bath.joint_dims();
    kern.first_moment = std::move(m);
    kern.comm_integral = std::move(k);
    kern.variant = variant;
    kern.t = t;
    return kern;
}

/// C_1(t) = -i int_0^t dt' H~_I(t') = -i t M.
inline OperatorMatrix c1(const BathModel& bath, const Matrix& h_sys, double t,
                         const QuadratureSpec& quad = {}) {
    if (t < 0) throw std::invalid_argument("c1: t < 0");
    const Eigen::Index d = bath.sys_dim() * bath.env_dim();
    if (t == 0) return OperatorMatrix(bath.joint_dims(), Matrix::Zero(d, d));
    SuperopKernel kern = error_superop(bath, h_sys, t, quad);
    return OperatorMatrix(bath.joint_dims(), Complex(0, -t) * kern.first_moment);
}

/// C_2(t) = (1/2) C_1(t)^2 - (1/2) t^2 K, with K the triangular-domain
/// commutator integral.
inline OperatorMatrix c2(const BathModel& bath, const Matrix& h_sys, double t,
                         const QuadratureSpec& quad = {}) {
    if (t < 0) throw std::invalid_argument("c2: t < 0");
    const Eigen::Index d = bath.sys_dim() * bath.env_dim();
    if (t == 0) return OperatorMatrix(bath.joint_dims(), Matrix::Zero(d, d));
    SuperopKernel kern = error_superop(bath, h_sys, t, quad, InnerLimit::Triangular);
    Matrix c1m = Complex(0, -t) * kern.first_moment;
    return OperatorMatrix(bath.joint_dims(), 0.5 * c1m * c1m - 0.5 * t * t * kern.comm_integral);
}

/// Two-term second-order prediction of the reduced state,
///   rho_S(t) = U_S rho U_S^dag
///            + (1/2) lambda^2 t^2 U_S Tr_E{ E_S(t) (rho (x) rho_E) } U_S^dag.
/// The O(lambda^3) trace defect is left in place as a diagnostic.
inline StateMatrix predict_state(const StateMatrix& rho_s0, const BathModel& bath,
                                 const Matrix& h_sys, double t, const QuadratureSpec& quad = {},
                                 InnerLimit variant = InnerLimit::Triangular) {
    if (rho_s0.total_dim() != bath.sys_dim())
        throw std::invalid_argument("predict_state: system state dimension mismatch");
    check_state(rho_s0, 1e-10, 1e-8, -1e-8);

    Matrix us = h_sys.size() > 0 ? expm_hermitian(h_sys, t)
                                 : Matrix(Matrix::Identity(bath.sys_dim(), bath.sys_dim()));
    Matrix ideal = us * rho_s0.m * us.adjoint();

    const double lambda = bath.lambda();
    if (lambda == 0.0) return StateMatrix(rho_s0.dims, std::move(ideal));

    SuperopKernel kern = error_superop(bath, h_sys, t, quad, variant);
    Matrix joint = kron2(rho_s0.m, bath.env_init().m);
    StateMatrix err(bath.joint_dims(), kern.apply(joint));
    std::vector<int> keep(bath.n_sys());
    for (int i = 0; i < bath.n_sys(); ++i) keep[i] = i;
    Matrix err_s = partial_trace(err, keep).m;

    Matrix out = ideal + 0.5 * lambda * lambda * t * t * us * err_s * us.adjoint();
    return StateMatrix(rho_s0.dims, std::move(out));
}

/// || H~_I(dt) - H_I(dt) || in spectral norm; O(N^{-1}) for dt = t_g / N.
inline double step_commutation_residual(const BathModel& bath, const Matrix& h_sys, double dt) {
    if (dt < 0) throw std::invalid_argument("step_commutation_residual: dt < 0");
    if (dt == 0) return 0.0;
    OperatorMatrix tilde = gate_frame_h(bath, h_sys, dt);
    OperatorMatrix plain = interaction_picture_h(bath, dt);
    return spectral_norm(tilde.m - plain.m);
}

/// Exact reduced evolution: joint exponential of H_S + H_E + lambda H_int,
/// then the partial trace. The oracle of record for every perturbative claim.
inline StateMatrix exact_reduced_state(const StateMatrix& rho_s0, const BathModel& bath,
                                       const Matrix& h_sys, double t) {
    if (rho_s0.total_dim() != bath.sys_dim())
        throw std::invalid_argument("exact_reduced_state: system state dimension mismatch");
    Matrix u = expm_hermitian(bath.total_h(h_sys), t);
    Matrix joint = kron2(rho_s0.m, bath.env_init().m);
    StateMatrix evolved(bath.joint_dims(), u * joint * u.adjoint());
    std::vector<int> keep(bath.n_sys());
    for (int i = 0; i < bath.n_sys(); ++i) keep[i] = i;
    return partial_trace(evolved, keep);
}

}  // namespace qecstep
