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

#include <Eigen/Dense>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qecstep/pauli.hpp"

namespace qecstep {

/// Dense complex square matrix with declared tensor-factor dimensions.
struct OperatorMatrix {
    std::vector<int> dims;
    Matrix m;

    OperatorMatrix() = default;
    OperatorMatrix(std::vector<int> d, Matrix mat) : dims(std::move(d)), m(std::move(mat)) {
        const Eigen::Index side = total_dim();
        if (m.rows() != side || m.cols() != side)
            throw std::invalid_argument("OperatorMatrix: entries do not match dims");
        for (int di : dims)
            if (di < 2) throw std::invalid_argument("OperatorMatrix: factor dim < 2");
    }

    Eigen::Index total_dim() const {
        Eigen::Index d = 1;
        for (int di : dims) d *= di;
        return d;
    }
    int n_factors() const { return static_cast<int>(dims.size()); }
};

/// Density matrix with the same layout as OperatorMatrix.
using StateMatrix = OperatorMatrix;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double tol = 1e-12) {
    return max_abs(m - m.adjoint()) < tol;
}

inline bool is_unitary(const Matrix& m, double tol = 1e-12) {
    return max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())) < tol;
}

inline double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

inline double trace_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

/// Checks StateMatrix invariants: Hermitian, unit trace, positive spectrum.
inline void check_state(const StateMatrix& rho, double herm_tol = 1e-12,
                        double trace_tol = 1e-10, double eig_floor = -1e-10) {
    if (!is_hermitian(rho.m, herm_tol))
        throw std::invalid_argument("StateMatrix: not Hermitian");
    if (std::abs(rho.m.trace().real() - 1.0) > trace_tol || std::abs(rho.m.trace().imag()) > trace_tol)
        throw std::invalid_argument("StateMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < eig_floor)
        throw std::invalid_argument("StateMatrix: negative eigenvalue");
}

inline Matrix kron2(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline OperatorMatrix kron(const std::vector<OperatorMatrix>& factors) {
    if (factors.empty()) throw std::invalid_argument("kron: empty factor list");
    std::vector<int> dims;
    Matrix m = factors[0].m;
    dims = factors[0].dims;
    for (size_t k = 1; k < factors.size(); ++k) {
        m = kron2(m, factors[k].m);
        dims.insert(dims.end(), factors[k].dims.begin(), factors[k].dims.end());
    }
    return OperatorMatrix(std::move(dims), std::move(m));
}

inline Vector kron_vec(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// Dense realization of a Pauli string as a one-qubit-per-factor operator.
inline OperatorMatrix dense(const PauliString& p) {
    return OperatorMatrix(std::vector<int>(p.n_qubits(), 2), p.dense());
}

/// Closed-form exponential exp(-i theta P), valid because P^2 = I when the
/// phase is +/-1.
inline Matrix pauli_exp(const PauliString& p, double theta) {
    if (p.phase_pow() % 2 != 0)
        throw std::invalid_argument("pauli_exp: phase +/-i (P^2 = -I breaks the closed form)");
    const Eigen::Index dim = Eigen::Index(1) << p.n_qubits();
    return std::cos(theta) * Matrix::Identity(dim, dim) + Complex(0, -1) * std::sin(theta) * p.dense();
}

/// Applies exp(-i theta P) to a state vector.
inline Vector pauli_exp_apply(const PauliString& p, double theta, const Vector& v) {
    if (p.phase_pow() % 2 != 0)
        throw std::invalid_argument("pauli_exp_apply: phase +/-i");
    return std::cos(theta) * v + Complex(0, -1) * std::sin(theta) * p.apply(v);
}

/// Eigendecomposition of a Hermitian operator, reusable across many times t.
class HermitianPropagator {
public:
    explicit HermitianPropagator(const Matrix& h, double herm_tol = 1e-10) {
        if (!is_hermitian(h, herm_tol))
            throw std::invalid_argument("HermitianPropagator: operator not Hermitian");
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
    }

    /// U(t) = V exp(-i Lambda t) V^dagger.
    Matrix at(double t) const {
        Eigen::VectorXcd ph(evals_.size());
        for (Eigen::Index i = 0; i < evals_.size(); ++i)
            ph(i) = std::exp(Complex(0, -evals_(i) * t));
        return evecs_ * ph.asDiagonal() * evecs_.adjoint();
    }

    const Eigen::VectorXd& eigenvalues() const { return evals_; }

private:
    Eigen::VectorXd evals_;
    Matrix evecs_;
};

inline Matrix expm_hermitian(const Matrix& h, double t) {
    return HermitianPropagator(h).at(t);
}

inline OperatorMatrix expm_hermitian(const OperatorMatrix& h, double t) {
    return OperatorMatrix(h.dims, expm_hermitian(h.m, t));
}

/// Partial trace keeping the listed tensor factors (in their original order).
inline StateMatrix partial_trace(const StateMatrix& rho, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
    const int nf = rho.n_factors();
    std::vector<bool> kept(nf, false);
    for (int k : keep) {
        if (k < 0 || k >= nf) throw std::invalid_argument("partial_trace: invalid factor index");
        if (kept[k]) throw std::invalid_argument("partial_trace: duplicate factor index");
        kept[k] = true;
    }
    std::vector<int> out_dims;
    for (int f = 0; f < nf; ++f)
        if (kept[f]) out_dims.push_back(rho.dims[f]);

    // Strides of each factor in the flattened index (factor 0 most significant).
    std::vector<Eigen::Index> stride(nf, 1);
    for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * rho.dims[f + 1];
    std::vector<Eigen::Index> out_stride;
    {
        Eigen::Index s = 1;
        for (int f = nf - 1; f >= 0; --f)
            if (kept[f]) {
                out_stride.insert(out_stride.begin(), s);
                s *= rho.dims[f];
            }
    }

    Eigen::Index out_dim = 1;
    for (int d : out_dims) out_dim *= d;
    Matrix out = Matrix::Zero(out_dim, out_dim);

    const Eigen::Index dim = rho.total_dim();
    std::vector<int> ridx(nf), cidx(nf);
    for (Eigen::Index r = 0; r < dim; ++r) {
        Eigen::Index rr = r;
        for (int f = 0; f < nf; ++f) { ridx[f] = static_cast<int>(rr / stride[f]); rr %= stride[f]; }
        for (Eigen::Index c = 0; c < dim; ++c) {
            Eigen::Index cc = c;
            bool diag = true;
            for (int f = 0; f < nf; ++f) {
                cidx[f] = static_cast<int>(cc / stride[f]);
                cc %= stride[f];
                if (!kept[f] && cidx[f] != ridx[f]) { diag = false; break; }
            }
            if (!diag) continue;
            Eigen::Index ro = 0, co = 0;
            int ok = 0;
            for (int f = 0; f < nf; ++f)
                if (kept[f]) {
                    ro += ridx[f] * out_stride[ok];
                    co += cidx[f] * out_stride[ok];
                    ++ok;
                }
            out(ro, co) += rho.m(r, c);
        }
    }
    return StateMatrix(std::move(out_dims), std::move(out));
}

inline double state_fidelity(const StateMatrix& rho, const Vector& psi) {
    if (rho.m.rows() != psi.size())
        throw std::invalid_argument("state_fidelity: dimension mismatch");
    return (psi.adjoint() * rho.m * psi)(0, 0).real();
}

inline double state_overlap(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("state_overlap: dimension mismatch");
    return std::norm(a.dot(b));
}

/// |Tr(U^dagger V)| / d; invariant under a global phase on either argument.
inline double gate_fidelity(const Matrix& u, const Matrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("gate_fidelity: dimension mismatch");
    return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

/// Distance to the nearest global-phase multiple, in spectral norm.
inline double phase_aligned_distance(const Matrix& u, const Matrix& target) {
    Complex tr = (target.adjoint() * u).trace();
    Complex ph = std::abs(tr) > 1e-300 ? tr / std::abs(tr) : Complex(1, 0);
    return spectral_norm(u / ph - target);
}

inline Vector basis_state(Eigen::Index dim, Eigen::Index k) {
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return v;
}

inline StateMatrix pure_state(std::vector<int> dims, const Vector& psi) {
    return StateMatrix(std::move(dims), psi * psi.adjoint());
}

/// Embeds an operator acting on a contiguous leading/trailing factor range.
/// `sys` acts on the first factors of a space whose remaining factors have
/// total dimension env_dim.
inline Matrix extend_right(const Matrix& sys, Eigen::Index env_dim) {
    return kron2(sys, Matrix::Identity(env_dim, env_dim));
}

inline Matrix extend_left(const Matrix& env, Eigen::Index sys_dim) {
    return kron2(Matrix::Identity(sys_dim, sys_dim), env);
}

}  // namespace qecstep
