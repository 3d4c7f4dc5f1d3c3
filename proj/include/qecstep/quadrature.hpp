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

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qecstep {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial with the Chebyshev-based initial guess.
inline QuadratureRule gauss_legendre_std(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

/// Gauss-Legendre rule mapped to [0, 1].
inline QuadratureRule gauss_legendre_unit(int n) {
    QuadratureRule r = gauss_legendre_std(n);
    for (size_t i = 0; i < r.size(); ++i) {
        r.nodes[i] = 0.5 * (r.nodes[i] + 1.0);
        r.weights[i] *= 0.5;
    }
    return r;
}

struct TriangleRule {
    // Nodes (u, v) with 0 <= v <= u <= 1 and weights for the collapsed
    // product rule: v = u s, Jacobian u.
    std::vector<double> u, v, w;
    size_t size() const { return u.size(); }
};

/// Product Gauss-Legendre rule on the triangle {0 <= v <= u <= 1}.
inline TriangleRule gauss_legendre_triangle(int n) {
    QuadratureRule line = gauss_legendre_unit(n);
    TriangleRule tri;
    tri.u.reserve(size_t(n) * n);
    tri.v.reserve(size_t(n) * n);
    tri.w.reserve(size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            tri.u.push_back(line.nodes[i]);
            tri.v.push_back(line.nodes[i] * line.nodes[j]);
            tri.w.push_back(line.weights[i] * line.weights[j] * line.nodes[i]);
        }
    return tri;
}

/// Quadrature configuration shared by the perturbative integrals.
struct QuadratureSpec {
    int nodes_per_axis = 32;

    QuadratureSpec() = default;
    explicit QuadratureSpec(int n) : nodes_per_axis(n) {
        if (n < 4) throw std::invalid_argument("QuadratureSpec: node count < 4");
    }
};

}  // namespace qecstep
