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

#include "qecstep/code.hpp"

using namespace qecstep;

TEST_CASE("codewords are stabilized and orthonormal") {
    PhaseCode code;
    CHECK(std::abs(code.logical_zero().norm() - 1.0) < 1e-14);
    CHECK(std::abs(code.logical_one().norm() - 1.0) < 1e-14);
    CHECK(std::abs(code.logical_zero().dot(code.logical_one())) < 1e-14);
    for (auto& s : code.stabilizers()) {
        CHECK((s.apply(code.logical_zero()) - code.logical_zero()).norm() < 1e-14);
        CHECK((s.apply(code.logical_one()) - code.logical_one()).norm() < 1e-14);
    }
}

TEST_CASE("logical Paulis satisfy the Pauli algebra and act correctly") {
    PhaseCode code;
    Matrix lx = code.logical_x().dense();
    Matrix ly = code.logical_y().dense();
    Matrix lz = code.logical_z().dense();
    Matrix id = Matrix::Identity(8, 8);

    // Pauli1: involutions and Hermiticity.
    for (auto& m : {lx, ly, lz}) {
        CHECK(max_abs(m * m - id) < 1e-14);
        CHECK(is_hermitian(m, 1e-14));
    }
    // Pauli2: cyclic products with the +i orientation.
    CHECK(max_abs(lx * ly - Complex(0, 1) * lz) < 1e-14);
    CHECK(max_abs(ly * lz - Complex(0, 1) * lx) < 1e-14);
    CHECK(max_abs(lz * lx - Complex(0, 1) * ly) < 1e-14);
    // Anticommutation.
    CHECK(max_abs(lx * lz + lz * lx) < 1e-14);

    // Action on codewords.
    CHECK((lz * code.logical_zero() - code.logical_zero()).norm() < 1e-14);
    CHECK((lz * code.logical_one() + code.logical_one()).norm() < 1e-14);
    CHECK((lx * code.logical_zero() - code.logical_one()).norm() < 1e-14);
    CHECK((lx * code.logical_one() - code.logical_zero()).norm() < 1e-14);

    // Logical operators commute with the stabilizer group.
    for (auto& s : code.stabilizers()) {
        CHECK(code.logical_x().commutes_with(s));
        CHECK(code.logical_y().commutes_with(s));
        CHECK(code.logical_z().commutes_with(s));
    }
}

TEST_CASE("Knill-Laflamme conditions for the single-Z error set") {
    PhaseCode code;
    std::vector<Matrix> errors = {Matrix::Identity(8, 8)};
    for (int q = 0; q < 3; ++q) errors.push_back(PauliString::single(3, q, Axis::Z).dense());
    std::array<Vector, 2> words = {code.logical_zero(), code.logical_one()};

    for (size_t a = 0; a < errors.size(); ++a)
        for (size_t b = 0; b < errors.size(); ++b) {
            Matrix eab = errors[a].adjoint() * errors[b];
            Complex c00 = words[0].dot(eab * words[0]);
            Complex c11 = words[1].dot(eab * words[1]);
            Complex c01 = words[0].dot(eab * words[1]);
            CHECK(std::abs(c00 - c11) < 1e-14);  // diagonal elements agree
            CHECK(std::abs(c01) < 1e-14);        // no off-diagonal mixing
            // Distinct single-Z errors are perfectly distinguishable here.
            double expected = a == b ? 1.0 : 0.0;
            CHECK(std::abs(c00 - expected) < 1e-14);
        }
}

TEST_CASE("syndrome table identifies each single-qubit Z error") {
    PhaseCode code;
    auto rng = derive_rng(3, "code-syndrome", 0);
    std::array<Syndrome, 3> expected = {Syndrome{1, 0}, Syndrome{1, 1}, Syndrome{0, 1}};
    for (int q = 0; q < 3; ++q) {
        Vector psi = code.encode(Complex(0.8), Complex(0.0, 0.6));
        psi = PauliString::single(3, q, Axis::Z).apply(psi);
        Syndrome s = measure_syndrome(code, psi, rng);
        CHECK(s == expected[q]);
        auto corr = code.correction_for(s);
        REQUIRE(corr.has_value());
        CHECK(corr->factors().count(q) == 1);
    }
    CHECK_FALSE(code.correction_for(Syndrome()).has_value());
}

TEST_CASE("recovery restores random encoded states to fidelity 1") {
    PhaseCode code;
    for (int trial = 0; trial < 25; ++trial) {
        auto rng = derive_rng(3, "code-recover", trial);
        double a = uniform01(rng), ph = 2 * M_PI * uniform01(rng);
        Complex alpha(std::sqrt(a));
        Complex beta = std::sqrt(1 - a) * Complex(std::cos(ph), std::sin(ph));
        Vector clean = code.encode(alpha, beta);
        int q = static_cast<int>(uniform01(rng) * 3);
        Vector psi = PauliString::single(3, q, Axis::Z).apply(clean);
        Syndrome s = measure_syndrome(code, psi, rng);
        recover(code, psi, s);
        CHECK(state_overlap(clean, psi) > 1.0 - 1e-10);
    }
}

TEST_CASE("uncorrected logical errors pass the syndrome silently") {
    PhaseCode code;
    auto rng = derive_rng(3, "code-logical", 0);
    Vector psi = code.encode(Complex(1.0), Complex(0.0));
    psi = code.logical_x().apply(psi);  // Z1 Z2 Z3: weight-3, undetectable
    Syndrome s = measure_syndrome(code, psi, rng);
    CHECK(s.trivial());
    CHECK(state_overlap(code.logical_one(), psi) > 1.0 - 1e-12);
}

TEST_CASE("two-qubit Z errors are miscorrected into a logical error") {
    PhaseCode code;
    auto rng = derive_rng(3, "code-double", 0);
    Vector clean = code.encode(Complex(1.0), Complex(0.0));
    Vector psi = PauliString::single(3, 0, Axis::Z).apply(clean);
    psi = PauliString::single(3, 1, Axis::Z).apply(psi);
    Syndrome s = measure_syndrome(code, psi, rng);
    CHECK((s == Syndrome{0, 1}));  // looks like Z3
    recover(code, psi, s);
    // Net operator Z1 Z2 Z3 = logical sigma_x.
    CHECK(state_overlap(code.logical_one(), psi) > 1.0 - 1e-12);
}

TEST_CASE("measurement projects and renormalizes on mixed states") {
    PhaseCode code;
    auto rng = derive_rng(3, "code-density", 0);
    Vector psi = code.encode(Complex(0.6), Complex(0.8));
    psi = PauliString::single(3, 2, Axis::Z).apply(psi);
    StateMatrix rho({2, 2, 2}, Matrix(psi * psi.adjoint()));
    Syndrome s = measure_syndrome(code, rho, rng);
    CHECK((s == Syndrome{0, 1}));
    recover(code, rho, s, 3, 0);
    Vector clean = code.encode(Complex(0.6), Complex(0.8));
    CHECK(std::abs((clean.adjoint() * rho.m * clean)(0, 0).real() - 1.0) < 1e-12);
}

TEST_CASE("shifted embedding and offset blocks") {
    PhaseCode code;
    PauliString s = shifted(code.stabilizers()[0], 6, 3);
    CHECK(s.n_qubits() == 6);
    CHECK(s.factors().count(3) == 1);
    CHECK(s.factors().count(4) == 1);

    // Correct an error on block 2 of a 6-qubit register.
    auto rng = derive_rng(3, "code-offset", 0);
    Vector block1 = code.logical_zero();
    Vector clean2 = code.encode(Complex(0.6), Complex(0.8));
    Vector joint = kron_vec(block1, PauliString::single(3, 1, Axis::Z).apply(clean2));
    Syndrome s1 = measure_syndrome(code, joint, rng, 6, 0);
    CHECK(s1.trivial());
    Syndrome s2 = measure_syndrome(code, joint, rng, 6, 3);
    CHECK((s2 == Syndrome{1, 1}));
    recover(code, joint, s2, 6, 3);
    CHECK(state_overlap(kron_vec(block1, clean2), joint) > 1.0 - 1e-12);
}

TEST_CASE("encode rejects non-normalized amplitudes") {
    PhaseCode code;
    CHECK_THROWS_AS(code.encode(Complex(1.0), Complex(0.5)), std::invalid_argument);
}
