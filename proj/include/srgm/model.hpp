#pragma once

// Mean value functions, failure intensities and remaining-fault laws for the
// NHPP software reliability growth model families.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srgm/erlang.hpp"
#include "srgm/error.hpp"

namespace srgm {

enum class Family {
    GoelOkumoto,
    DelayedS,
    InflectionS,
    KapurGarg,
    ErlangGE,
    LogisticGE,
    ObjectOriented,
};

enum class CurveShape { Exponential, Rayleigh };

inline constexpr int kMaxStages = 6;

/// Model family tag. `stages` is meaningful for ErlangGE / LogisticGE and
/// `curve` for ObjectOriented; both are ignored otherwise.
struct ModelKind {
    Family family = Family::GoelOkumoto;
    int stages = 1;
    CurveShape curve = CurveShape::Exponential;

    static constexpr ModelKind goel_okumoto() { return {Family::GoelOkumoto}; }
    static constexpr ModelKind delayed_s() { return {Family::DelayedS}; }
    static constexpr ModelKind inflection_s() { return {Family::InflectionS}; }
    static constexpr ModelKind kapur_garg() { return {Family::KapurGarg}; }
    static constexpr ModelKind erlang(int n) { return {Family::ErlangGE, n}; }
    static constexpr ModelKind logistic(int n) { return {Family::LogisticGE, n}; }
    static constexpr ModelKind object_oriented(CurveShape c) {
        return {Family::ObjectOriented, 3, c};
    }

    bool multi_type() const noexcept {
        return family == Family::ErlangGE || family == Family::LogisticGE ||
               family == Family::ObjectOriented;
    }

    /// Number of fault complexity types the family distinguishes.
    int type_count() const noexcept {
        switch (family) {
            case Family::ErlangGE:
            case Family::LogisticGE: return stages;
            case Family::ObjectOriented: return 3;
            default: return 1;
        }
    }

    /// Short name used on the command line and in JSON ("go", "ge4l", "oo-ray", ...).
    std::string name() const {
        switch (family) {
            case Family::GoelOkumoto: return "go";
            case Family::DelayedS: return "dss";
            case Family::InflectionS: return "iss";
            case Family::KapurGarg: return "kg";
            case Family::ErlangGE: return "ge" + std::to_string(stages);
            case Family::LogisticGE: return "ge" + std::to_string(stages) + "l";
            case Family::ObjectOriented:
                return curve == CurveShape::Exponential ? "oo-exp" : "oo-ray";
        }
        return "?";
    }

    static ModelKind parse(std::string_view s) {
        if (s == "go") return goel_okumoto();
        if (s == "dss") return delayed_s();
        if (s == "iss") return inflection_s();
        if (s == "kg") return kapur_garg();
        if (s == "oo-exp") return object_oriented(CurveShape::Exponential);
        if (s == "oo-ray") return object_oriented(CurveShape::Rayleigh);
        if (s.size() >= 3 && s.size() <= 4 && s.substr(0, 2) == "ge" && s[2] >= '1' &&
            s[2] <= '0' + kMaxStages) {
            const int n = s[2] - '0';
            if (s.size() == 3) return erlang(n);
            if (s[3] == 'l') return logistic(n);
        }
        throw InvalidSpec("unknown model kind '" + std::string(s) + "'");
    }

    friend bool operator==(const ModelKind& l, const ModelKind& r) noexcept {
        if (l.family != r.family) return false;
        if (l.family == Family::ErlangGE || l.family == Family::LogisticGE)
            return l.stages == r.stages;
        if (l.family == Family::ObjectOriented) return l.curve == r.curve;
        return true;
    }
};

/// Cumulative instruction execution W(t) driving the object-oriented model.
/// Exponential: W = alpha (1 - e^{-gamma t}); Rayleigh: W = alpha (1 - e^{-gamma t^2 / 2}).
struct ExecutionCurve {
    CurveShape shape = CurveShape::Exponential;
    double total_instructions = 1.0;  // alpha
    double rate = 1.0;                // gamma

    double cumulative(double t) const {
        const double e = shape == CurveShape::Exponential ? rate * t : 0.5 * rate * t * t;
        return -total_instructions * std::expm1(-e);
    }

    double derivative(double t) const {
        if (shape == CurveShape::Exponential)
            return total_instructions * rate * std::exp(-rate * t);
        return total_instructions * rate * t * std::exp(-0.5 * rate * t * t);
    }

    friend bool operator==(const ExecutionCurve&, const ExecutionCurve&) = default;
};

/// Named parameters; which ones must be present depends on the family.
///
///  go, dss        a, b
///  iss            a, b, r (inflection, in (0, 1])
///  kg             a, p, q
///  geN            a, b, proportions[N]
///  geNl           a, b, proportions[N], beta
///  oo-exp/oo-ray  a, b, p, q, r (instruction shares), proportions[3], exec
struct ModelParams {
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> r;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<double> beta;
    std::optional<std::vector<double>> proportions;
    std::optional<ExecutionCurve> exec;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct ModelSpec {
    ModelKind kind;
    ModelParams params;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline constexpr double kSimplexTolerance = 1e-9;

namespace detail {

inline bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
inline bool unit_closed(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

struct FieldRule {
    bool a = true, b = false, r = false, p = false, q = false, beta = false;
    bool proportions = false, exec = false;
};

inline FieldRule required_fields(const ModelKind& k) {
    switch (k.family) {
        case Family::GoelOkumoto:
        case Family::DelayedS: return {.b = true};
        case Family::InflectionS: return {.b = true, .r = true};
        case Family::KapurGarg: return {.p = true, .q = true};
        case Family::ErlangGE: return {.b = true, .proportions = true};
        case Family::LogisticGE: return {.b = true, .beta = true, .proportions = true};
        case Family::ObjectOriented:
            return {.b = true, .r = true, .p = true, .q = true, .proportions = true, .exec = true};
    }
    return {};
}

template <class T>
void check_presence(const std::optional<T>& v, bool required, const char* name,
                    const std::string& kind) {
    if (required && !v) throw InvalidSpec(kind + ": missing parameter '" + name + "'");
    if (!required && v) throw InvalidSpec(kind + ": unexpected parameter '" + name + "'");
}

}  // namespace detail

/// Throws InvalidSpec unless `spec` carries exactly the parameters its family
/// needs and every value lies in its admissible range.
inline void validate(const ModelSpec& spec) {
    const ModelKind& k = spec.kind;
    const ModelParams& m = spec.params;
    if ((k.family == Family::ErlangGE || k.family == Family::LogisticGE) &&
        (k.stages < 1 || k.stages > kMaxStages))
        throw InvalidSpec("stage count must be between 1 and 6");

    const std::string kind = k.name();
    const auto rule = detail::required_fields(k);
    detail::check_presence(m.a, rule.a, "a", kind);
    detail::check_presence(m.b, rule.b, "b", kind);
    detail::check_presence(m.r, rule.r, "r", kind);
    detail::check_presence(m.p, rule.p, "p", kind);
    detail::check_presence(m.q, rule.q, "q", kind);
    detail::check_presence(m.beta, rule.beta, "beta", kind);
    detail::check_presence(m.proportions, rule.proportions, "proportions", kind);
    detail::check_presence(m.exec, rule.exec, "exec", kind);

    if (!detail::finite_positive(*m.a)) throw InvalidSpec(kind + ": a must be > 0");
    if (m.b && !detail::finite_positive(*m.b)) throw InvalidSpec(kind + ": b must be > 0");
    if (m.beta && !(std::isfinite(*m.beta) && *m.beta >= 0.0))
        throw InvalidSpec(kind + ": beta must be >= 0");

    if (k.family == Family::InflectionS && !(std::isfinite(*m.r) && *m.r > 0.0 && *m.r <= 1.0))
        throw InvalidSpec(kind + ": r must lie in (0, 1]");
    if (k.family == Family::KapurGarg) {
        if (!detail::finite_positive(*m.p)) throw InvalidSpec(kind + ": p must be > 0");
        if (!(std::isfinite(*m.q) && *m.q >= 0.0)) throw InvalidSpec(kind + ": q must be >= 0");
    }
    if (k.family == Family::ObjectOriented) {
        if (!detail::unit_closed(*m.p) || !detail::unit_closed(*m.q) || !detail::unit_closed(*m.r))
            throw InvalidSpec(kind + ": instruction shares p, q, r must lie in [0, 1]");
        if (std::abs(*m.p + *m.q + *m.r - 1.0) > kSimplexTolerance)
            throw InvalidSpec(kind + ": instruction shares p + q + r must equal 1");
        const ExecutionCurve& e = *m.exec;
        if (e.shape != k.curve) throw InvalidSpec(kind + ": execution curve does not match kind");
        if (!detail::finite_positive(e.total_instructions) || !detail::finite_positive(e.rate))
            throw InvalidSpec(kind + ": execution curve alpha and gamma must be > 0");
    }
    if (m.proportions) {
        const auto& props = *m.proportions;
        if (static_cast<int>(props.size()) != k.type_count())
            throw InvalidSpec(kind + ": expected " + std::to_string(k.type_count()) +
                              " proportions, got " + std::to_string(props.size()));
        double sum = 0.0;
        for (double v : props) {
            if (!detail::unit_closed(v)) throw InvalidSpec(kind + ": proportions must lie in [0, 1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kSimplexTolerance)
            throw InvalidSpec(kind + ": proportions must sum to 1");
    }
}

/// A validated spec unpacked into plain numbers for repeated evaluation.
/// Per-type quantities follow the family's own decomposition; single-type
/// families report one component.
class Model {
public:
    explicit Model(const ModelSpec& spec) : kind_(spec.kind) {
        validate(spec);
        const ModelParams& m = spec.params;
        a_ = *m.a;
        switch (kind_.family) {
            case Family::GoelOkumoto:
            case Family::DelayedS: b_ = *m.b; break;
            case Family::InflectionS:
                b_ = *m.b;
                psi_ = (1.0 - *m.r) / *m.r;
                break;
            case Family::KapurGarg:
                b_ = *m.p + *m.q;
                psi_ = *m.q / *m.p;
                break;
            case Family::ErlangGE:
                b_ = *m.b;
                weights_ = *m.proportions;
                break;
            case Family::LogisticGE:
                b_ = *m.b;
                beta_ = *m.beta;
                weights_ = *m.proportions;
                break;
            case Family::ObjectOriented:
                b_ = *m.b;
                weights_ = *m.proportions;
                shares_ = {*m.p, *m.q, *m.r};
                exec_ = *m.exec;
                break;
        }
        if (weights_.empty()) weights_ = {1.0};
    }

    const ModelKind& kind() const noexcept { return kind_; }
    int type_count() const noexcept { return static_cast<int>(weights_.size()); }
    double fault_content() const noexcept { return a_; }
    std::span<const double> proportions() const noexcept { return weights_; }

    /// m(infinity). Equals `a` except for the object-oriented family, whose
    /// finite instruction budget caps detection below `a`.
    double asymptote() const {
        if (kind_.family != Family::ObjectOriented) return a_;
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            s += weights_[i] * erlang_stage_cdf(i + 1, b_ * shares_[i] * exec_.total_instructions);
        return a_ * s;
    }

    /// Expected faults removed by time t, split by type.
    void removed_by_type(double t, std::span<double> out) const {
        check_time(t);
        switch (kind_.family) {
            case Family::GoelOkumoto: out[0] = -a_ * std::expm1(-b_ * t); return;
            case Family::DelayedS: out[0] = a_ * erlang_stage_cdf(2, b_ * t); return;
            case Family::InflectionS:
            case Family::KapurGarg: {
                const double e = std::exp(-b_ * t);
                out[0] = -a_ * std::expm1(-b_ * t) / (1.0 + psi_ * e);
                return;
            }
            case Family::ErlangGE:
                for (int i = 0; i < type_count(); ++i)
                    out[i] = a_ * weights_[i] * erlang_stage_cdf(i + 1, b_ * t);
                return;
            case Family::LogisticGE: {
                const double learn = 1.0 / (1.0 + beta_ * std::exp(-b_ * t));
                out[0] = a_ * weights_[0] * erlang_stage_cdf(1, b_ * t);
                for (int i = 1; i < type_count(); ++i)
                    out[i] = learn * a_ * weights_[i] * erlang_stage_cdf(i + 1, b_ * t);
                return;
            }
            case Family::ObjectOriented: {
                const double w = exec_.cumulative(t);
                for (int i = 0; i < 3; ++i)
                    out[i] = a_ * weights_[i] * erlang_stage_cdf(i + 1, b_ * shares_[i] * w);
                return;
            }
        }
    }

    /// a * p_i - m_i(t), evaluated through the upper tails so it stays accurate
    /// when m_i(t) is close to a * p_i.
    void remaining_by_type(double t, std::span<double> out) const {
        check_time(t);
        switch (kind_.family) {
            case Family::GoelOkumoto: out[0] = a_ * std::exp(-b_ * t); return;
            case Family::DelayedS: out[0] = a_ * erlang_stage_survival(2, b_ * t); return;
            case Family::InflectionS:
            case Family::KapurGarg: {
                const double e = std::exp(-b_ * t);
                out[0] = a_ * e * (1.0 + psi_) / (1.0 + psi_ * e);
                return;
            }
            case Family::ErlangGE:
                for (int i = 0; i < type_count(); ++i)
                    out[i] = a_ * weights_[i] * erlang_stage_survival(i + 1, b_ * t);
                return;
            case Family::LogisticGE: {
                const double be = beta_ * std::exp(-b_ * t);
                out[0] = a_ * weights_[0] * erlang_stage_survival(1, b_ * t);
                for (int i = 1; i < type_count(); ++i)
                    out[i] = a_ * weights_[i] * (be + erlang_stage_survival(i + 1, b_ * t)) /
                             (1.0 + be);
                return;
            }
            case Family::ObjectOriented: {
                const double w = exec_.cumulative(t);
                for (int i = 0; i < 3; ++i)
                    out[i] = a_ * weights_[i] * erlang_stage_survival(i + 1, b_ * shares_[i] * w);
                return;
            }
        }
    }

    /// Per-type contribution to dm/dt.
    void intensity_by_type(double t, std::span<double> out) const {
        check_time(t);
        switch (kind_.family) {
            case Family::GoelOkumoto: out[0] = a_ * b_ * std::exp(-b_ * t); return;
            case Family::DelayedS: out[0] = a_ * b_ * erlang_stage_pdf(2, b_ * t); return;
            case Family::InflectionS:
            case Family::KapurGarg: {
                const double e = std::exp(-b_ * t);
                const double d = 1.0 + psi_ * e;
                out[0] = a_ * b_ * e * (1.0 + psi_) / (d * d);
                return;
            }
            case Family::ErlangGE:
                for (int i = 0; i < type_count(); ++i)
                    out[i] = a_ * weights_[i] * b_ * erlang_stage_pdf(i + 1, b_ * t);
                return;
            case Family::LogisticGE: {
                const double x = b_ * t;
                const double be = beta_ * std::exp(-x);
                const double learn = 1.0 / (1.0 + be);
                const double learn_rate = b_ * be * learn * learn;
                out[0] = a_ * weights_[0] * b_ * erlang_stage_pdf(1, x);
                for (int i = 1; i < type_count(); ++i)
                    out[i] = a_ * weights_[i] *
                             (learn_rate * erlang_stage_cdf(i + 1, x) +
                              learn * b_ * erlang_stage_pdf(i + 1, x));
                return;
            }
            case Family::ObjectOriented: {
                const double w = exec_.cumulative(t);
                const double dw = exec_.derivative(t);
                for (int i = 0; i < 3; ++i) {
                    const double rate = b_ * shares_[i];
                    out[i] = a_ * weights_[i] * erlang_stage_pdf(i + 1, rate * w) * rate * dw;
                }
                return;
            }
        }
    }

    double removed(double t) const { return sum_of(&Model::removed_by_type, t); }
    double remaining(double t) const { return sum_of(&Model::remaining_by_type, t); }
    double intensity(double t) const { return sum_of(&Model::intensity_by_type, t); }

private:
    static void check_time(double t) {
        if (!(t >= 0.0)) throw DomainError("time must be >= 0");
    }

    double sum_of(void (Model::*part)(double, std::span<double>) const, double t) const {
        double buf[kMaxStages];
        const std::span<double> out(buf, weights_.size());
        (this->*part)(t, out);
        double s = 0.0;
        for (double v : out) s += v;
        return s;
    }

    ModelKind kind_;
    double a_ = 0.0;
    double b_ = 0.0;
    double psi_ = 0.0;
    double beta_ = 0.0;
    std::vector<double> weights_;
    std::array<double, 3> shares_{};
    ExecutionCurve exec_;
};

/// Expected cumulative faults removed in (0, t].
inline double mvf(const ModelSpec& spec, double t) { return Model(spec).removed(t); }

/// Failure intensity dm/dt.
inline double intensity(const ModelSpec& spec, double t) { return Model(spec).intensity(t); }

/// Expected number of faults still latent at t, a - m(t). For the
/// object-oriented family `a` (not the instruction-limited asymptote) is used.
inline double remaining_mean(const ModelSpec& spec, double t) {
    return Model(spec).remaining(t);
}

/// Poisson pmf of the remaining fault count at t:
///   P[N(t) = k] = mu^k / k! * exp(-mu),  mu = remaining_mean(spec, t).
inline double poisson_pmf(double mean, long k) {
    if (k < 0) throw DomainError("count must be >= 0");
    if (!(mean >= 0.0)) throw DomainError("poisson mean must be >= 0");
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k) * std::log(mean) - mean -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

inline double remaining_count_pmf(const ModelSpec& spec, double t, long k) {
    if (k < 0) throw DomainError("count must be >= 0");
    return poisson_pmf(remaining_mean(spec, t), k);
}

}  // namespace srgm
