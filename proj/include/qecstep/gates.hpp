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

#include "qecstep/code.hpp"

namespace qecstep {

/// H_rot(theta, phi) = omega0 (sz cos(theta) + sx sin(theta)cos(phi)
///                             + sy sin(theta)sin(phi)).
/// The sigma_y coefficient carries the sign that makes
/// exp(-i H_rot t_g) = U_rot(theta, phi, phi_rot) with t_g = phi_rot/omega0,
/// i.e. sy = +i sx sz. The logical variant substitutes the code's logical
/// Paulis, which keeps the same algebra.
inline OperatorMatrix rot_hamiltonian(double theta, double phi, double omega0, bool logical) {
    PauliString sz = logical ? PhaseCode().logical_z() : PauliString::single(1, 0, Axis::Z);
    PauliString sx = logical ? PhaseCode().logical_x() : PauliString::single(1, 0, Axis::X);
    PauliString sy_base = sx * sz;
    PauliString sy = sy_base.with_phase_pow(sy_base.phase_pow() + 1);  // +i sx sz
    Matrix h = omega0 * (std::cos(theta) * sz.dense() +
                         std::sin(theta) * std::cos(phi) * sx.dense() +
                         std::sin(theta) * std::sin(phi) * sy.dense());
    return OperatorMatrix(std::vector<int>(sz.n_qubits(), 2), std::move(h));
}

/// U_rot(theta, phi, phi_rot) = cos(phi_rot) - i sin(phi_rot) n.sigma.
inline Matrix rot_unitary(double theta, double phi, double phi_rot, bool logical) {
    OperatorMatrix h = rot_hamiltonian(theta, phi, 1.0, logical);
    Matrix id = Matrix::Identity(h.m.rows(), h.m.cols());
    return std::cos(phi_rot) * id + Complex(0, -1) * std::sin(phi_rot) * h.m;
}

/// H_CNOT = omega0 ((1 - s1z)/2)((1 - s2x)/2); qubit/block 1 is the control.
/// The logical variant acts on six physical qubits (block 1 = qubits 1-3,
/// block 2 = qubits 4-6); its cross term s_L1,z s_L2,x is the four-body
/// string X1 Z4 Z5 Z6.
inline OperatorMatrix cnot_hamiltonian(double omega0, bool logical) {
    int n = logical ? 6 : 2;
    PhaseCode code;
    PauliString s1z = logical ? shifted(code.logical_z(), 6, 0) : PauliString::single(2, 0, Axis::Z);
    PauliString s2x = logical ? shifted(code.logical_x(), 6, 3) : PauliString::single(2, 1, Axis::X);
    const Eigen::Index d = Eigen::Index(1) << n;
    Matrix id = Matrix::Identity(d, d);
    Matrix h = omega0 * 0.25 * (id - s1z.dense()) * (id - s2x.dense());
    return OperatorMatrix(std::vector<int>(n, 2), std::move(h));
}

/// U_CNOT = (1 + s1z)/2 + ((1 - s1z)/2) s2x.
inline Matrix cnot_unitary(bool logical) {
    PhaseCode code;
    PauliString s1z = logical ? shifted(code.logical_z(), 6, 0) : PauliString::single(2, 0, Axis::Z);
    PauliString s2x = logical ? shifted(code.logical_x(), 6, 3) : PauliString::single(2, 1, Axis::X);
    const Eigen::Index d = Eigen::Index(1) << (logical ? 6 : 2);
    Matrix id = Matrix::Identity(d, d);
    return 0.5 * (id + s1z.dense()) + 0.5 * (id - s1z.dense()) * s2x.dense();
}

enum class GateKind { Rotation, Cnot };

struct GateSpec {
    GateKind kind = GateKind::Rotation;
    double theta = 0.0;
    double phi = 0.0;
    double phi_rot = M_PI / 2;  // target rotation angle
    double omega0 = 1.0;
    bool logical = false;

    static GateSpec rotation(double theta, double phi, double phi_rot, double omega0 = 1.0,
                             bool logical = false) {
        return GateSpec{GateKind::Rotation, theta, phi, phi_rot, omega0, logical};
    }
    static GateSpec cnot(double omega0 = 1.0, bool logical = false) {
        return GateSpec{GateKind::Cnot, 0, 0, 0, omega0, logical};
    }

    double t_g() const {
        double tg = kind == GateKind::Rotation ? phi_rot / omega0 : M_PI / omega0;
        if (tg <= 0) throw std::invalid_argument("GateSpec: t_g <= 0");
        return tg;
    }

    int n_qubits() const {
        if (kind == GateKind::Rotation) return logical ? 3 : 1;
        return logical ? 6 : 2;
    }

    int n_blocks() const { return kind == GateKind::Cnot ? 2 : 1; }

    OperatorMatrix hamiltonian() const {
        return kind == GateKind::Rotation ? rot_hamiltonian(theta, phi, omega0, logical)
                                          : cnot_hamiltonian(omega0, logical);
    }

    /// Exact end-time unitary of the intended gate, for fidelity references.
    Matrix ideal_unitary() const {
        return kind == GateKind::Rotation ? rot_unitary(theta, phi, phi_rot, logical)
                                          : cnot_unitary(logical);
    }
};

/// U_S(t) = exp(-i H_g t) for t within the gate window.
inline Matrix gate_unitary(const GateSpec& g, double t) {
    if (t < 0 || t > g.t_g() * (1 + 1e-12))
        throw std::invalid_argument("gate_unitary: t outside [0, t_g]");
    return expm_hermitian(g.hamiltonian().m, t);
}

/// Projector onto the code subspace of every block of a logical gate.
inline Matrix code_projector_blocks(int n_blocks) {
    PhaseCode code;
    Matrix p = code.code_projector().m;
    Matrix out = p;
    for (int b = 1; b < n_blocks; ++b) out = kron2(out, p);
    return out;
}

/// Max norm of the out-of-code component of U_S(t) |codeword> over the
/// sampled times and all code basis words.
inline double subspace_leakage(const GateSpec& g, const std::vector<double>& sample_times) {
    if (!g.logical) throw std::invalid_argument("subspace_leakage: gate must be logical");
    PhaseCode code;
    Matrix proj = code_projector_blocks(g.n_blocks());
    const Eigen::Index d = proj.rows();
    Matrix id = Matrix::Identity(d, d);

    std::vector<Vector> words;
    if (g.n_blocks() == 1) {
        words = {code.logical_zero(), code.logical_one()};
    } else {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                words.push_back(kron_vec(a ? code.logical_one() : code.logical_zero(),
                                         b ? code.logical_one() : code.logical_zero()));
    }

    HermitianPropagator prop(g.hamiltonian().m);
    double worst = 0.0;
    for (double t : sample_times) {
        Matrix u = prop.at(t);
        for (const auto& w : words)
            worst = std::max(worst, ((id - proj) * (u * w)).norm());
    }
    return worst;
}

}  // namespace qecstep
