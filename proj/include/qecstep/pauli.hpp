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
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qecstep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Axis { X, Y, Z };

inline char axis_char(Axis a) {
    switch (a) {
        case Axis::X: return 'X';
        case Axis::Y: return 'Y';
        case Axis::Z: return 'Z';
    }
    return '?';
}

/// Signed tensor product of single-qubit Pauli factors. The phase is kept
/// exact as a power of i, so products of Pauli strings never leave the set
/// {+1, +i, -1, -i} and closure under multiplication is exact.
class PauliString {
public:
    explicit PauliString(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1) throw std::invalid_argument("PauliString: n_qubits < 1");
    }

    PauliString(int n_qubits, std::vector<std::pair<int, Axis>> ops, int phase_pow = 0)
        : PauliString(n_qubits) {
        phase_pow_ = ((phase_pow % 4) + 4) % 4;
        for (auto& [q, a] : ops) {
            if (q < 0 || q >= n_qubits_)
                throw std::invalid_argument("PauliString: qubit index out of range");
            if (factors_.count(q))
                throw std::invalid_argument("PauliString: duplicate qubit index");
            factors_[q] = a;
        }
    }

    static PauliString identity(int n_qubits) { return PauliString(n_qubits); }

    static PauliString single(int n_qubits, int qubit, Axis a) {
        return PauliString(n_qubits, {{qubit, a}});
    }

    int n_qubits() const { return n_qubits_; }
    const std::map<int, Axis>& factors() const { return factors_; }
    int weight() const { return static_cast<int>(factors_.size()); }

    /// Phase as i^k with k in {0,1,2,3}.
    int phase_pow() const { return phase_pow_; }
    Complex phase() const {
        static const Complex table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return table[phase_pow_];
    }

    bool is_hermitian() const { return phase_pow_ % 2 == 0; }

    PauliString with_phase_pow(int k) const {
        PauliString p = *this;
        p.phase_pow_ = ((k % 4) + 4) % 4;
        return p;
    }

    PauliString operator-() const { return with_phase_pow(phase_pow_ + 2); }

    PauliString adjoint() const {
        // Factors are Hermitian; only the phase conjugates.
        return with_phase_pow(-phase_pow_);
    }

    PauliString operator*(const PauliString& other) const {
        if (other.n_qubits_ != n_qubits_)
            throw std::invalid_argument("PauliString: size mismatch in product");
        PauliString out(n_qubits_);
        out.phase_pow_ = (phase_pow_ + other.phase_pow_) % 4;
        out.factors_ = factors_;
        for (auto& [q, b] : other.factors_) {
            auto it = out.factors_.find(q);
            if (it == out.factors_.end()) {
                out.factors_[q] = b;
                continue;
            }
            Axis a = it->second;
            if (a == b) {
                out.factors_.erase(it);
                continue;
            }
            // sigma_a sigma_b = +/- i sigma_c for a != b.
            out.phase_pow_ = (out.phase_pow_ + (cyclic_follows(a, b) ? 1 : 3)) % 4;
            it->second = third_axis(a, b);
        }
        return out;
    }

    bool commutes_with(const PauliString& other) const {
        if (other.n_qubits_ != n_qubits_)
            throw std::invalid_argument("PauliString: size mismatch");
        int anti = 0;
        for (auto& [q, a] : factors_) {
            auto it = other.factors_.find(q);
            if (it != other.factors_.end() && it->second != a) ++anti;
        }
        return anti % 2 == 0;
    }

    /// Dense 2^n x 2^n realization, phase included.
    Matrix dense() const {
        const Eigen::Index dim = Eigen::Index(1) << n_qubits_;
        Matrix m = Matrix::Zero(dim, dim);
        const Complex ph = phase();
        for (Eigen::Index col = 0; col < dim; ++col) {
            Eigen::Index row = col;
            Complex amp = ph;
            for (auto& [q, a] : factors_) {
                // Qubit 0 is the leftmost tensor factor (most significant bit).
                const Eigen::Index bit = Eigen::Index(1) << (n_qubits_ - 1 - q);
                const bool set = (col & bit) != 0;
                switch (a) {
                    case Axis::X: row ^= bit; break;
                    case Axis::Y:
                        row ^= bit;
                        amp *= set ? Complex(0, -1) : Complex(0, 1);
                        break;
                    case Axis::Z:
                        if (set) amp = -amp;
                        break;
                }
            }
            m(row, col) = amp;
        }
        return m;
    }

    /// Applies the string to a state vector without building the dense matrix.
    Vector apply(const Vector& v) const {
        const Eigen::Index dim = Eigen::Index(1) << n_qubits_;
        if (v.size() != dim) throw std::invalid_argument("PauliString::apply: dim mismatch");
        Vector out = Vector::Zero(dim);
        const Complex ph = phase();
        for (Eigen::Index col = 0; col < dim; ++col) {
            Eigen::Index row = col;
            Complex amp = ph;
            for (auto& [q, a] : factors_) {
                const Eigen::Index bit = Eigen::Index(1) << (n_qubits_ - 1 - q);
                const bool set = (col & bit) != 0;
                switch (a) {
                    case Axis::X: row ^= bit; break;
                    case Axis::Y:
                        row ^= bit;
                        amp *= set ? Complex(0, -1) : Complex(0, 1);
                        break;
                    case Axis::Z:
                        if (set) amp = -amp;
                        break;
                }
            }
            out(row) += amp * v(col);
        }
        return out;
    }

    std::string str() const {
        static const char* ph[4] = {"+", "+i", "-", "-i"};
        std::string s = ph[phase_pow_];
        if (factors_.empty()) return s + "I";
        for (auto& [q, a] : factors_) {
            s += axis_char(a);
            s += std::to_string(q);
        }
        return s;
    }

    bool operator==(const PauliString& o) const {
        return n_qubits_ == o.n_qubits_ && phase_pow_ == o.phase_pow_ && factors_ == o.factors_;
    }

private:
    static bool cyclic_follows(Axis a, Axis b) {
        // True for (X,Y), (Y,Z), (Z,X): sigma_a sigma_b = +i sigma_c.
        return (a == Axis::X && b == Axis::Y) || (a == Axis::Y && b == Axis::Z) ||
               (a == Axis::Z && b == Axis::X);
    }
    static Axis third_axis(Axis a, Axis b) {
        int used = static_cast<int>(a) + static_cast<int>(b);
        // X=0, Y=1, Z=2: the missing axis index is 3 - (a+b).
        return static_cast<Axis>(3 - used);
    }

    int n_qubits_;
    std::map<int, Axis> factors_;
    int phase_pow_ = 0;
};

}  // namespace qecstep
