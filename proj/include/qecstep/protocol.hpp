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

#include <cstdlib>
#include <thread>

#include "qecstep/bath.hpp"
#include "qecstep/gates.hpp"
#include "qecstep/perturbation.hpp"
#include "qecstep/report.hpp"

namespace qecstep {

inline int max_threads() {
    if (const char* env = std::getenv("QECSTEP_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

/// Runs f(i) for i in [0, n) across threads; every iteration owns its output
/// slot, so the aggregate is independent of the schedule.
template <typename F>
inline void parallel_for(long long n, F&& f) {
    int nt = std::min<long long>(max_threads(), n);
    if (nt <= 1) {
        for (long long i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(nt);
    for (int t = 0; t < nt; ++t)
        threads.emplace_back([&, t] {
            for (long long i = t; i < n; i += nt) f(i);
        });
    for (auto& th : threads) th.join();
}

enum class NoiseBackend { ExactBath, Stochastic };

/// Stepped gate-correct-repeat protocol configuration. The stochastic
/// surrogate applies, per step, independent per-qubit phase flips with
/// probability p_correctable = (lambda dt)^2 (calibrated to the exact bath's
/// first-order excitation probability) and a syndrome-invisible logical
/// error with probability p_uncorrectable = (lambda dt)^2 / (2N), the
/// O(N^{-1})-suppressed share of the per-step error budget.
struct ProtocolConfig {
    GateSpec gate = GateSpec::rotation(0.0, 0.0, M_PI / 2, 1.0, true);
    bool memory_only = false;  // H_S = 0 baseline over the same duration
    int n_steps = 1;
    NoiseBackend backend = NoiseBackend::Stochastic;
    double lambda = 0.0;
    std::vector<double> frequencies;  // exact backend; defaults to 1 + 0.1k
    bool reset_bath_each_step = false;
    std::optional<double> p_correctable;
    std::optional<double> p_uncorrectable;
    // Prefactor on the default p_uncorrectable. The surrogate's constant is
    // not fixed by the calibration (only the (lambda dt)^2 / N shape is), so
    // sweeps may raise it to make the lambda^3 tail resolvable at finite
    // trial counts without touching the fitted exponent.
    double uncorrectable_scale = 1.0;
    std::optional<Vector> initial;  // defaults to |0_L> (per block)
    long long trials = 10000;
    uint64_t seed = 1;
    std::optional<double> failure_threshold;  // infidelity budget; default lambda^2 t_g^2

    double t_g() const { return gate.t_g(); }
    double dt() const { return gate.t_g() / n_steps; }

    double p_corr() const {
        if (p_correctable) return *p_correctable;
        double x = lambda * dt();
        return std::min(1.0, x * x);
    }
    double p_uncorr() const {
        if (p_uncorrectable) return *p_uncorrectable;
        double x = lambda * dt();
        return std::min(1.0, uncorrectable_scale * x * x / (2.0 * n_steps));
    }
    double fail_threshold() const {
        if (failure_threshold) return *failure_threshold;
        // Floor keeps roundoff-level infidelity from registering as failure
        // when lambda is zero or tiny.
        return std::max(lambda * lambda * t_g() * t_g(), 1e-12);
    }

    void validate() const {
        if (n_steps < 1) throw std::invalid_argument("ProtocolConfig: N < 1");
        if (lambda < 0) throw std::invalid_argument("ProtocolConfig: lambda < 0");
        if (trials < 1) throw std::invalid_argument("ProtocolConfig: trials < 1");
        if (!gate.logical) throw std::invalid_argument("ProtocolConfig: gate must be logical");
        if (backend == NoiseBackend::ExactBath && gate.n_qubits() != 3)
            throw std::invalid_argument(
                "ProtocolConfig: exact bath supports single-block (3-qubit) gates only; "
                "use the stochastic backend for the logical CNOT");
    }
};

struct StepRecord {
    long long trial = 0;
    int step = 0;
    Syndrome syndrome_block1, syndrome_block2;
    bool corrected = false;
};

struct ProtocolResult {
    long long trials = 0;
    int n_steps = 0;
    long long total_corrections = 0;
    long long failed_trials = 0;
    long long triggered_trials = 0;  // trials with at least one correction
    double mean_corrections = 0.0;
    double mean_fidelity = 0.0;
    RateInterval correction_trigger;  // per-trial rate of >= 1 correction
    RateInterval failure;
    std::vector<StepRecord> records;
};

namespace detail {

struct TrialOutcome {
    int corrections = 0;
    bool failed = false;
    double fidelity = 0.0;
    std::vector<StepRecord> records;
};

inline Vector default_initial(const GateSpec& gate) {
    PhaseCode code;
    if (gate.n_blocks() == 1) return code.logical_zero();
    return kron_vec(code.logical_zero(), code.logical_zero());
}

/// <ideal| rho_S |ideal> for a joint system (x) environment pure state.
inline double reduced_fidelity(const Vector& joint, const Vector& ideal_sys,
                               Eigen::Index env_dim) {
    double f = 0.0;
    for (Eigen::Index e = 0; e < env_dim; ++e) {
        Complex amp = 0.0;
        for (Eigen::Index s = 0; s < ideal_sys.size(); ++s)
            amp += std::conj(ideal_sys(s)) * joint(s * env_dim + e);
        f += std::norm(amp);
    }
    return f;
}

}  // namespace detail

inline ProtocolResult run_protocol(const ProtocolConfig& cfg) {
    cfg.validate();
    PhaseCode code;
    const int n_sys = cfg.gate.n_qubits();
    const int n_blocks = cfg.gate.n_blocks();
    const Eigen::Index sys_dim = Eigen::Index(1) << n_sys;
    Vector psi0 = cfg.initial ? *cfg.initial : detail::default_initial(cfg.gate);
    if (psi0.size() != sys_dim) throw std::invalid_argument("run_protocol: initial state dim");

    Matrix h_sys = cfg.memory_only ? Matrix(Matrix::Zero(sys_dim, sys_dim))
                                   : cfg.gate.hamiltonian().m;
    Vector ideal = cfg.memory_only ? psi0 : Vector(expm_hermitian(h_sys, cfg.t_g()) * psi0);

    const double threshold = cfg.fail_threshold();
    std::vector<detail::TrialOutcome> outcomes(cfg.trials);

    if (cfg.backend == NoiseBackend::Stochastic) {
        Matrix u_step = cfg.memory_only ? Matrix(Matrix::Identity(sys_dim, sys_dim))
                                        : expm_hermitian(h_sys, cfg.dt());
        const double p_z = cfg.p_corr();
        const double p_u = cfg.p_uncorr();
        // Logical-error surrogate: X on the first qubit of a block commutes
        // with both stabilizers, so it is invisible to the syndrome.
        std::vector<PauliString> logical_errors;
        for (int b = 0; b < n_blocks; ++b)
            logical_errors.push_back(PauliString::single(n_sys, 3 * b, Axis::X));

        parallel_for(cfg.trials, [&](long long trial) {
            auto rng = derive_rng(cfg.seed, "protocol-stochastic", trial);
            detail::TrialOutcome out;
            Vector psi = psi0;
            for (int step = 0; step < cfg.n_steps; ++step) {
                psi = u_step * psi;
                for (int q = 0; q < n_sys; ++q)
                    if (uniform01(rng) < p_z)
                        psi = PauliString::single(n_sys, q, Axis::Z).apply(psi);
                if (uniform01(rng) < p_u) {
                    int b = n_blocks == 1 ? 0 : static_cast<int>(uniform01(rng) * n_blocks);
                    psi = logical_errors[b].apply(psi);
                }
                StepRecord rec{trial, step, {}, {}, false};
                for (int b = 0; b < n_blocks; ++b) {
                    Syndrome s = measure_syndrome(code, psi, rng, n_sys, 3 * b);
                    (b == 0 ? rec.syndrome_block1 : rec.syndrome_block2) = s;
                    if (!s.trivial()) {
                        recover(code, psi, s, n_sys, 3 * b);
                        ++out.corrections;
                        rec.corrected = true;
                    }
                }
                out.records.push_back(rec);
            }
            out.fidelity = state_overlap(ideal, psi);
            out.failed = out.fidelity < 1.0 - threshold;
            outcomes[trial] = std::move(out);
        });
    } else {
        std::vector<double> freqs =
            cfg.frequencies.empty() ? default_frequencies(n_sys) : cfg.frequencies;
        BathModel bath = build_dephasing_bath(n_sys, freqs, cfg.lambda);
        if (!bath.env_is_vacuum())
            throw std::invalid_argument("run_protocol: exact backend needs a pure (vacuum) bath");
        const Eigen::Index env_dim = bath.env_dim();
        const int n_joint = 2 * n_sys;  // bath modes join the register as qubits
        Matrix u_step = expm_hermitian(bath.total_h(h_sys), cfg.dt());
        Vector vac = basis_state(env_dim, 0);

        parallel_for(cfg.trials, [&](long long trial) {
            auto rng = derive_rng(cfg.seed, "protocol-exact", trial);
            detail::TrialOutcome out;
            Vector psi = kron_vec(psi0, vac);
            for (int step = 0; step < cfg.n_steps; ++step) {
                psi = u_step * psi;
                StepRecord rec{trial, step, {}, {}, false};
                Syndrome s = measure_syndrome(code, psi, rng, n_joint, 0);
                rec.syndrome_block1 = s;
                if (!s.trivial()) {
                    recover(code, psi, s, n_joint, 0);
                    ++out.corrections;
                    rec.corrected = true;
                }
                if (cfg.reset_bath_each_step) {
                    // Measure each mode in its number basis and return it to
                    // vacuum; in distribution this equals trace-and-replace.
                    for (int m = 0; m < n_sys; ++m) {
                        int bit = measure_pauli(PauliString::single(n_joint, n_sys + m, Axis::Z),
                                                psi, rng);
                        if (bit == 1)
                            psi = PauliString::single(n_joint, n_sys + m, Axis::X).apply(psi);
                    }
                }
                out.records.push_back(rec);
            }
            out.fidelity = detail::reduced_fidelity(psi, ideal, env_dim);
            out.failed = out.fidelity < 1.0 - threshold;
            outcomes[trial] = std::move(out);
        });
    }

    ProtocolResult res;
    res.trials = cfg.trials;
    res.n_steps = cfg.n_steps;
    for (long long i = 0; i < cfg.trials; ++i) {
        auto& o = outcomes[i];
        res.total_corrections += o.corrections;
        if (o.corrections > 0) ++res.triggered_trials;
        if (o.failed) ++res.failed_trials;
        res.mean_fidelity += o.fidelity;
    }
    res.mean_corrections = static_cast<double>(res.total_corrections) / cfg.trials;
    res.mean_fidelity /= static_cast<double>(cfg.trials);
    res.correction_trigger = wilson_interval(res.triggered_trials, cfg.trials);
    res.failure = wilson_interval(res.failed_trials, cfg.trials);
    // Records are kept in trial order; capped, since full per-step detail is
    // only useful for small diagnostic runs.
    for (long long i = 0; i < std::min<long long>(cfg.trials, 64); ++i)
        res.records.insert(res.records.end(), outcomes[i].records.begin(),
                           outcomes[i].records.end());
    return res;
}

/// Deterministic per-step probability of a nontrivial syndrome for the exact
/// bath, following the trivial-syndrome branch. Used to calibrate and to
/// cross-check the stochastic surrogate where sampling cannot resolve the
/// rates.
inline std::vector<double> expected_trigger_profile(const ProtocolConfig& cfg) {
    ProtocolConfig c = cfg;
    c.backend = NoiseBackend::ExactBath;
    c.validate();
    PhaseCode code;
    const int n_sys = cfg.gate.n_qubits();
    const int n_joint = 2 * n_sys;
    std::vector<double> freqs =
        cfg.frequencies.empty() ? default_frequencies(n_sys) : cfg.frequencies;
    BathModel bath = build_dephasing_bath(n_sys, freqs, cfg.lambda);
    Matrix h_sys = cfg.memory_only
                       ? Matrix(Matrix::Zero(bath.sys_dim(), bath.sys_dim()))
                       : cfg.gate.hamiltonian().m;
    Matrix u_step = expm_hermitian(bath.total_h(h_sys), cfg.dt());
    Vector psi0 = cfg.initial ? *cfg.initial : detail::default_initial(cfg.gate);
    Vector psi = kron_vec(psi0, basis_state(bath.env_dim(), 0));

    auto gens = code.stabilizers();
    Matrix proj = Matrix::Identity(psi.size(), psi.size());
    for (auto& g : gens) {
        Matrix gd = shifted(g, n_joint, 0).dense();
        proj = 0.5 * (Matrix::Identity(psi.size(), psi.size()) + gd) * proj;
    }

    std::vector<double> trigger(cfg.n_steps);
    for (int step = 0; step < cfg.n_steps; ++step) {
        psi = u_step * psi;
        Vector kept = proj * psi;
        double p_keep = kept.squaredNorm();
        trigger[step] = 1.0 - p_keep;
        psi = kept / std::sqrt(p_keep);
    }
    return trigger;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct ScalingRow {
    double lambda = 0.0;
    int n_steps = 0;
    std::string backend;
    double mean_corrections = 0.0;
    double correction_trigger = 0.0;
    double failure_rate = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
    long long trials = 0;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    std::optional<SlopeFit> corrections_fit;  // vs the sweep axis
    std::optional<SlopeFit> failure_fit;
    bool rates_resolved = true;  // false when a rate had too few events
};

namespace detail {

inline ScalingRow row_from(const ProtocolConfig& cfg, const ProtocolResult& r) {
    ScalingRow row;
    row.lambda = cfg.lambda;
    row.n_steps = cfg.n_steps;
    row.backend = cfg.backend == NoiseBackend::Stochastic ? "stochastic" : "exact";
    row.mean_corrections = r.mean_corrections;
    row.correction_trigger = r.correction_trigger.rate;
    row.failure_rate = r.failure.rate;
    row.ci_low = r.failure.low;
    row.ci_high = r.failure.high;
    row.trials = r.trials;
    return row;
}

inline void fit_axis(ScalingTable& table, const std::vector<double>& axis) {
    std::vector<double> corr, fail, ax_c, ax_f;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].mean_corrections > 0) {
            ax_c.push_back(axis[i]);
            corr.push_back(table.rows[i].mean_corrections);
        }
        if (table.rows[i].failure_rate > 0) {
            ax_f.push_back(axis[i]);
            fail.push_back(table.rows[i].failure_rate);
        }
        double expected_events =
            table.rows[i].mean_corrections * static_cast<double>(table.rows[i].trials);
        if (expected_events < 25) table.rates_resolved = false;
    }
    if (ax_c.size() >= 4) table.corrections_fit = fit_loglog(ax_c, corr);
    if (ax_f.size() >= 4) table.failure_fit = fit_loglog(ax_f, fail);
}

}  // namespace detail

/// Fixed lambda, varying step count N.
inline ScalingTable sweep_steps(const ProtocolConfig& base, const std::vector<int>& n_values) {
    if (n_values.size() < 4)
        throw std::invalid_argument("sweep_steps: need >= 4 N values");
    double lo = *std::min_element(n_values.begin(), n_values.end());
    double hi = *std::max_element(n_values.begin(), n_values.end());
    if (hi / lo < 10.0) throw std::invalid_argument("sweep_steps: N values must span a decade");
    ScalingTable table;
    std::vector<double> axis;
    for (int n : n_values) {
        ProtocolConfig cfg = base;
        cfg.n_steps = n;
        table.rows.push_back(detail::row_from(cfg, run_protocol(cfg)));
        axis.push_back(static_cast<double>(n));
    }
    detail::fit_axis(table, axis);
    return table;
}

enum class StepRule { Fixed, InverseSqrtLambda };

/// Varying lambda; N either fixed or chosen as round(lambda^{-1/2}).
inline ScalingTable sweep_lambda(const ProtocolConfig& base, const std::vector<double>& lambdas,
                                 StepRule rule) {
    if (lambdas.size() < 4) throw std::invalid_argument("sweep_lambda: need >= 4 lambda values");
    ScalingTable table;
    std::vector<double> axis;
    for (double lam : lambdas) {
        ProtocolConfig cfg = base;
        cfg.lambda = lam;
        if (rule == StepRule::InverseSqrtLambda)
            cfg.n_steps = std::max(1, static_cast<int>(std::lround(1.0 / std::sqrt(lam))));
        table.rows.push_back(detail::row_from(cfg, run_protocol(cfg)));
        axis.push_back(lam);
    }
    detail::fit_axis(table, axis);
    return table;
}

struct ControlComparison {
    ProtocolResult gate_run;
    ProtocolResult memory_run;
    double failure_z_score = 0.0;  // two-sample z for the failure rates
};

/// Runs a gate whose Hamiltonian commutes with the bath coupling and the
/// memory-only baseline over the same duration; with commuting noise the
/// errors seen at step boundaries are plain phase flips and the two failure
/// rates should be statistically indistinguishable.
inline ControlComparison commuting_gate_control(const ProtocolConfig& cfg) {
    ProtocolConfig c = cfg;
    c.backend = NoiseBackend::ExactBath;
    c.validate();
    std::vector<double> freqs =
        cfg.frequencies.empty() ? default_frequencies(cfg.gate.n_qubits()) : cfg.frequencies;
    BathModel bath = build_dephasing_bath(cfg.gate.n_qubits(), freqs, cfg.lambda);
    Matrix h_ext = extend_right(cfg.gate.hamiltonian().m, bath.env_dim());
    Matrix comm = h_ext * bath.h_int().m - bath.h_int().m * h_ext;
    if (spectral_norm(comm) > 1e-10)
        throw std::invalid_argument("commuting_gate_control: gate does not commute with H_int");

    ControlComparison res;
    res.gate_run = run_protocol(c);
    ProtocolConfig mem = c;
    mem.memory_only = true;
    res.memory_run = run_protocol(mem);

    double p1 = res.gate_run.failure.rate, p2 = res.memory_run.failure.rate;
    double n1 = static_cast<double>(res.gate_run.trials), n2 = static_cast<double>(res.memory_run.trials);
    double pooled = (p1 * n1 + p2 * n2) / (n1 + n2);
    double se = std::sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2));
    res.failure_z_score = se > 0 ? (p1 - p2) / se : 0.0;
    return res;
}

}  // namespace qecstep
