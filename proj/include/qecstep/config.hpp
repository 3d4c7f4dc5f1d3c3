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

#include <fstream>
#include <set>

#include <json.hpp>

#include "qecstep/perturbation.hpp"
#include "qecstep/protocol.hpp"
#include "qecstep/synth.hpp"

namespace qecstep {

using nlohmann::json;

namespace detail {

/// Strict-mode guard: every key of `j` must be in `allowed`; typos in physics
/// parameters must fail loudly, not silently fall back to defaults.
inline void require_known_keys(const json& j, const std::string& ctx,
                               const std::set<std::string>& allowed) {
    if (!j.is_object()) throw std::invalid_argument("config: " + ctx + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + ctx);
}

template <typename T>
inline void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
inline void read_optional(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace detail

struct GateConfig {
    std::string kind = "rotation";  // "rotation" | "cnot"
    double theta = 0.0;
    double phi = 0.0;
    double phi_rot = M_PI / 2;
    double omega0 = 1.0;
    bool logical = true;

    GateSpec to_spec() const {
        if (kind == "rotation") return GateSpec::rotation(theta, phi, phi_rot, omega0, logical);
        if (kind == "cnot") return GateSpec::cnot(omega0, logical);
        throw std::invalid_argument("config: gate.kind must be 'rotation' or 'cnot'");
    }

    static GateConfig from_json(const json& j) {
        detail::require_known_keys(j, "gate",
                                   {"kind", "theta", "phi", "phi_rot", "omega0", "logical"});
        GateConfig g;
        detail::read_field(j, "kind", g.kind);
        detail::read_field(j, "theta", g.theta);
        detail::read_field(j, "phi", g.phi);
        detail::read_field(j, "phi_rot", g.phi_rot);
        detail::read_field(j, "omega0", g.omega0);
        detail::read_field(j, "logical", g.logical);
        g.to_spec();  // validates kind
        return g;
    }
    json to_json() const {
        return {{"kind", kind},     {"theta", theta},   {"phi", phi},
                {"phi_rot", phi_rot}, {"omega0", omega0}, {"logical", logical}};
    }
};

struct BathConfig {
    std::vector<double> frequencies;  // empty -> 1 + 0.1k defaults
    double lambda = 0.01;

    static BathConfig from_json(const json& j) {
        detail::require_known_keys(j, "bath", {"frequencies", "lambda"});
        BathConfig b;
        detail::read_field(j, "frequencies", b.frequencies);
        detail::read_field(j, "lambda", b.lambda);
        if (b.lambda < 0) throw std::invalid_argument("config: bath.lambda < 0");
        return b;
    }
    json to_json() const { return {{"frequencies", frequencies}, {"lambda", lambda}}; }
};

struct PerturbConfig {
    std::vector<double> lambda_values;  // log-spaced sweep axis
    double t = 1.0;                     // evolution time for the residual test
    int quadrature_nodes = 32;
    std::string inner_limit = "triangular";  // "triangular" | "full_square"

    InnerLimit variant() const {
        if (inner_limit == "triangular") return InnerLimit::Triangular;
        if (inner_limit == "full_square") return InnerLimit::FullSquare;
        throw std::invalid_argument(
            "config: perturb.inner_limit must be 'triangular' or 'full_square'");
    }

    static PerturbConfig from_json(const json& j) {
        detail::require_known_keys(j, "perturb",
                                   {"lambda_values", "t", "quadrature_nodes", "inner_limit"});
        PerturbConfig p;
        detail::read_field(j, "lambda_values", p.lambda_values);
        detail::read_field(j, "t", p.t);
        detail::read_field(j, "quadrature_nodes", p.quadrature_nodes);
        detail::read_field(j, "inner_limit", p.inner_limit);
        p.variant();  // validates
        return p;
    }
    json to_json() const {
        return {{"lambda_values", lambda_values},
                {"t", t},
                {"quadrature_nodes", quadrature_nodes},
                {"inner_limit", inner_limit}};
    }
};

struct SynthConfig {
    std::vector<std::string> gates = {"sigma_lx"};  // "sigma_lx" | "cnot"
    std::vector<int> orders = {2, 3};
    std::vector<int> n_values;

    static SynthConfig from_json(const json& j) {
        detail::require_known_keys(j, "synth", {"gates", "orders", "n_values"});
        SynthConfig s;
        detail::read_field(j, "gates", s.gates);
        detail::read_field(j, "orders", s.orders);
        detail::read_field(j, "n_values", s.n_values);
        for (auto& g : s.gates)
            if (g != "sigma_lx" && g != "cnot")
                throw std::invalid_argument("config: synth.gates entries must be 'sigma_lx' or 'cnot'");
        for (int o : s.orders)
            if (o != 2 && o != 3)
                throw std::invalid_argument("config: synth.orders entries must be 2 or 3");
        return s;
    }
    json to_json() const {
        return {{"gates", gates}, {"orders", orders}, {"n_values", n_values}};
    }
};

struct ProtocolSection {
    std::string backend = "stochastic";  // "stochastic" | "exact"
    std::string sweep = "steps";         // "steps" | "lambda" | "single"
    std::vector<int> n_values;
    std::vector<double> lambda_values;
    std::string step_rule = "fixed";  // "fixed" | "inverse_sqrt_lambda"
    int n_steps = 1;
    long long trials = 10000;
    bool reset_bath_each_step = false;
    bool memory_only = false;
    std::optional<double> failure_threshold;
    std::optional<double> p_correctable;
    std::optional<double> p_uncorrectable;
    double uncorrectable_scale = 1.0;

    NoiseBackend backend_kind() const {
        if (backend == "stochastic") return NoiseBackend::Stochastic;
        if (backend == "exact") return NoiseBackend::ExactBath;
        throw std::invalid_argument("config: protocol.backend must be 'stochastic' or 'exact'");
    }
    StepRule rule() const {
        if (step_rule == "fixed") return StepRule::Fixed;
        if (step_rule == "inverse_sqrt_lambda") return StepRule::InverseSqrtLambda;
        throw std::invalid_argument(
            "config: protocol.step_rule must be 'fixed' or 'inverse_sqrt_lambda'");
    }

    static ProtocolSection from_json(const json& j) {
        detail::require_known_keys(
            j, "protocol",
            {"backend", "sweep", "n_values", "lambda_values", "step_rule", "n_steps", "trials",
             "reset_bath_each_step", "memory_only", "failure_threshold", "p_correctable",
             "p_uncorrectable", "uncorrectable_scale"});
        ProtocolSection p;
        detail::read_field(j, "backend", p.backend);
        detail::read_field(j, "sweep", p.sweep);
        detail::read_field(j, "n_values", p.n_values);
        detail::read_field(j, "lambda_values", p.lambda_values);
        detail::read_field(j, "step_rule", p.step_rule);
        detail::read_field(j, "n_steps", p.n_steps);
        detail::read_field(j, "trials", p.trials);
        detail::read_field(j, "reset_bath_each_step", p.reset_bath_each_step);
        detail::read_field(j, "memory_only", p.memory_only);
        detail::read_optional(j, "failure_threshold", p.failure_threshold);
        detail::read_optional(j, "p_correctable", p.p_correctable);
        detail::read_optional(j, "p_uncorrectable", p.p_uncorrectable);
        detail::read_field(j, "uncorrectable_scale", p.uncorrectable_scale);
        p.backend_kind();  // validate enums
        p.rule();
        if (p.sweep != "steps" && p.sweep != "lambda" && p.sweep != "single")
            throw std::invalid_argument("config: protocol.sweep must be 'steps', 'lambda' or 'single'");
        return p;
    }
    json to_json() const {
        json j = {{"backend", backend},
                  {"sweep", sweep},
                  {"n_values", n_values},
                  {"lambda_values", lambda_values},
                  {"step_rule", step_rule},
                  {"n_steps", n_steps},
                  {"trials", trials},
                  {"reset_bath_each_step", reset_bath_each_step},
                  {"memory_only", memory_only},
                  {"uncorrectable_scale", uncorrectable_scale}};
        j["failure_threshold"] = failure_threshold ? json(*failure_threshold) : json(nullptr);
        j["p_correctable"] = p_correctable ? json(*p_correctable) : json(nullptr);
        j["p_uncorrectable"] = p_uncorrectable ? json(*p_uncorrectable) : json(nullptr);
        return j;
    }
};

struct ExperimentConfig {
    std::string command;  // "" -> taken from the CLI subcommand
    uint64_t seed = 1;
    GateConfig gate;
    BathConfig bath;
    PerturbConfig perturb;
    SynthConfig synth;
    ProtocolSection protocol;

    static ExperimentConfig from_json(const json& j) {
        detail::require_known_keys(
            j, "config root", {"command", "seed", "gate", "bath", "perturb", "synth", "protocol"});
        ExperimentConfig c;
        detail::read_field(j, "command", c.command);
        if (!c.command.empty() && c.command != "verify" && c.command != "perturb" &&
            c.command != "synth" && c.command != "protocol")
            throw std::invalid_argument("config: command must be verify|perturb|synth|protocol");
        detail::read_field(j, "seed", c.seed);
        if (j.contains("gate")) c.gate = GateConfig::from_json(j.at("gate"));
        if (j.contains("bath")) c.bath = BathConfig::from_json(j.at("bath"));
        if (j.contains("perturb")) c.perturb = PerturbConfig::from_json(j.at("perturb"));
        if (j.contains("synth")) c.synth = SynthConfig::from_json(j.at("synth"));
        if (j.contains("protocol")) c.protocol = ProtocolSection::from_json(j.at("protocol"));
        return c;
    }

    json to_json() const {
        return {{"command", command},       {"seed", seed},
                {"gate", gate.to_json()},   {"bath", bath.to_json()},
                {"perturb", perturb.to_json()}, {"synth", synth.to_json()},
                {"protocol", protocol.to_json()}};
    }

    static ExperimentConfig load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("config: cannot open " + path);
        json j;
        try {
            f >> j;
        } catch (const json::parse_error& e) {
            throw std::runtime_error("config: parse error in " + path + ": " + e.what());
        }
        return from_json(j);
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("config: cannot open " + path);
        f << to_json().dump(2) << '\n';
    }

    /// Protocol run assembled from this config; lambda and N may be overridden
    /// by sweep drivers.
    ProtocolConfig protocol_run() const {
        ProtocolConfig p;
        p.gate = gate.to_spec();
        p.memory_only = protocol.memory_only;
        p.n_steps = protocol.n_steps;
        p.backend = protocol.backend_kind();
        p.lambda = bath.lambda;
        p.frequencies = bath.frequencies;
        p.reset_bath_each_step = protocol.reset_bath_each_step;
        p.p_correctable = protocol.p_correctable;
        p.p_uncorrectable = protocol.p_uncorrectable;
        p.uncorrectable_scale = protocol.uncorrectable_scale;
        p.trials = protocol.trials;
        p.seed = seed;
        p.failure_threshold = protocol.failure_threshold;
        return p;
    }
};

}  // namespace qecstep
