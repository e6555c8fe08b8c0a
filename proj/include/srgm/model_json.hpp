#pragma once

// JSON form of ModelSpec:
//   { "kind": "ge4", "params": { "a": 368, "b": 0.292, "proportions": [...],
//     "exec": { "curve": "exponential", "alpha": 1, "gamma": 0.05 } } }

#include <string>

#include <json.hpp>

#include "srgm/model.hpp"

namespace srgm {

inline std::string to_string(CurveShape c) {
    return c == CurveShape::Exponential ? "exponential" : "rayleigh";
}

inline CurveShape parse_curve(const std::string& s) {
    if (s == "exponential") return CurveShape::Exponential;
    if (s == "rayleigh") return CurveShape::Rayleigh;
    throw InvalidSpec("unknown execution curve '" + s + "'");
}

inline nlohmann::json to_json(const ModelSpec& spec) {
    nlohmann::json params = nlohmann::json::object();
    const ModelParams& m = spec.params;
    if (m.a) params["a"] = *m.a;
    if (m.b) params["b"] = *m.b;
    if (m.r) params["r"] = *m.r;
    if (m.p) params["p"] = *m.p;
    if (m.q) params["q"] = *m.q;
    if (m.beta) params["beta"] = *m.beta;
    if (m.proportions) params["proportions"] = *m.proportions;
    if (m.exec)
        params["exec"] = {{"curve", to_string(m.exec->shape)},
                          {"alpha", m.exec->total_instructions},
                          {"gamma", m.exec->rate}};
    return {{"kind", spec.kind.name()}, {"params", params}};
}

/// Parses and validates. Unknown parameter names are rejected.
inline ModelSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("params"))
        throw InvalidSpec("model spec must be an object with 'kind' and 'params'");
    ModelSpec spec;
    spec.kind = ModelKind::parse(j.at("kind").get<std::string>());
    const auto& params = j.at("params");
    if (!params.is_object()) throw InvalidSpec("'params' must be an object");
    ModelParams& m = spec.params;
    for (const auto& [name, value] : params.items()) {
        auto number = [&]() {
            if (!value.is_number()) throw InvalidSpec("parameter '" + name + "' must be a number");
            return value.get<double>();
        };
        if (name == "a") m.a = number();
        else if (name == "b") m.b = number();
        else if (name == "r") m.r = number();
        else if (name == "p") m.p = number();
        else if (name == "q") m.q = number();
        else if (name == "beta") m.beta = number();
        else if (name == "proportions") {
            if (!value.is_array()) throw InvalidSpec("'proportions' must be an array");
            std::vector<double> props;
            for (const auto& v : value) {
                if (!v.is_number()) throw InvalidSpec("proportions must be numbers");
                props.push_back(v.get<double>());
            }
            m.proportions = std::move(props);
        } else if (name == "exec") {
            if (!value.is_object() || !value.contains("curve") || !value.contains("alpha") ||
                !value.contains("gamma"))
                throw InvalidSpec("'exec' needs curve, alpha and gamma");
            m.exec = ExecutionCurve{parse_curve(value.at("curve").get<std::string>()),
                                    value.at("alpha").get<double>(),
                                    value.at("gamma").get<double>()};
        } else {
            throw InvalidSpec("unknown parameter '" + name + "'");
        }
    }
    validate(spec);
    return spec;
}

}  // namespace srgm
