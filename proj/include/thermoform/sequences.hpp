#pragma once

// Sequence families (a_n) with prefix sums s_n = a_0 + ... + a_{n-1}: an
// explicit head followed by the tail a_n = slope + beta log(n / (n + 1)).

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "renewal.hpp"

namespace thermoform {

class RealizedSequence {
public:
    /// a_0..a_{cut-1} from `head`, then the closed-form tail from index cut =
    /// max(1, head size). An empty head means a_0 = 0.
    RealizedSequence(std::vector<double> head, double beta, double slope = 0.0)
        : head_(std::move(head)), beta_(beta), slope_(slope) {
        if (head_.empty()) head_.push_back(0.0);
        if (!(beta_ >= 0.0)) throw std::domain_error("RealizedSequence: tail exponent must be >= 0");
        for (double a : head_)
            if (!std::isfinite(a)) throw std::domain_error("RealizedSequence: head values must be finite");
        rebuild();
    }

    long cut() const noexcept { return static_cast<long>(head_.size()); }
    double beta() const noexcept { return beta_; }
    double slope() const noexcept { return slope_; }
    const std::vector<double>& head() const noexcept { return head_; }

    double a(long n) const {
        if (n < 0) throw std::domain_error("a: negative index");
        if (n < cut()) return head_[n];
        const double nd = static_cast<double>(n);
        return slope_ + beta_ * std::log(nd / (nd + 1.0));
    }

    /// s_n = a_0 + ... + a_{n-1}; closed form beyond the head.
    double s(long n) const {
        if (n < 0) throw std::domain_error("s: negative index");
        if (n <= cut()) return prefix_[n];
        const double nd = static_cast<double>(n), nc = static_cast<double>(cut());
        return prefix_.back() + slope_ * (nd - nc) + beta_ * std::log(nc / nd);
    }

    /// kappa with s_n = slope n - beta log n + kappa exactly for n >= cut.
    double kappa() const {
        const double nc = static_cast<double>(cut());
        return prefix_.back() - slope_ * nc + beta_ * std::log(nc);
    }

    TailForm envelope() const { return {slope_, beta_, kappa(), 0.0, cut()}; }

    /// a_n -> 0, as required of a grid function.
    bool vanishing() const { return slope_ == 0.0; }

    /// Copy with a_k replaced; indices past the head first materialise the tail.
    RealizedSequence with_value(long k, double value) const {
        std::vector<double> h = head_;
        for (long n = cut(); n <= k; ++n) h.push_back(a(n));
        h[k] = value;
        return RealizedSequence(std::move(h), beta_, slope_);
    }

    /// Writes n, a_n, s_n for n = 1..n_max as CSV.
    void write_table(std::ostream& out, long n_max) const {
        out << "n,a_n,s_n\n";
        char buf[96];
        for (long n = 1; n <= n_max; ++n) {
            std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", n, a(n), s(n));
            out << buf;
        }
    }

private:
    void rebuild() {
        prefix_.assign(1, 0.0);
        for (double a : head_) prefix_.push_back(prefix_.back() + a);
    }

    std::vector<double> head_;
    double beta_;
    double slope_;
    std::vector<double> prefix_;  ///< s_0..s_cut
};

/// Pure tail a_n = gamma log(n / (n + 1)) from index n_cut on, zeros before.
inline RealizedSequence build_tail(double gamma, long n_cut = 1) {
    if (!(gamma > 1.0)) throw std::domain_error("build_tail: gamma must exceed 1");
    if (n_cut < 1) throw std::domain_error("build_tail: n_cut must be >= 1");
    return RealizedSequence(std::vector<double>(n_cut, 0.0), gamma);
}

/// Head override a_k = b for 0 <= k < K.
inline std::vector<double> hofbauer_head(double b, long K) {
    if (K < 0) throw std::domain_error("hofbauer_head: K must be >= 0");
    return std::vector<double>(K, b);
}

inline double default_normalization_target(Family family) { return family == Family::Grid ? 2.0 : 1.0; }

inline RenewalModel realize_model(const RealizedSequence& seq, Family family) {
    RenewalSpec s;
    if (family == Family::Grid) {
        s.log_base = -std::log(2.0);
        s.log_rate = std::log(2.0);
        s.bad_entropy = std::log(2.0);
    }
    s.induced = [seq](long n) { return seq.s(n); };
    s.tail = seq.envelope();
    s.label = std::string(to_string(family));
    return RenewalModel(std::move(s));
}

/// Certified sum of e^{s_n} over n >= 1.
inline CertifiedSum exp_sum(const RealizedSequence& seq, const EngineOptions& opt = {}) {
    return certified_G(realize_model(seq, Family::Hofbauer), 1.0, 0.0, opt);
}

struct Normalization {
    RealizedSequence sequence;
    double shift = 0.0;        ///< constant added to a_1
    CertifiedSum total;        ///< sum e^{s_n} after the shift
};

/// Shifts a_1 so that sum_n e^{s_n} equals `target`. Solved in closed form:
/// the shift scales every term with n >= 2 by the same factor.
inline Normalization normalize(const RealizedSequence& seq, double target, const EngineOptions& opt = {}) {
    if (!(target > 0.0)) throw std::domain_error("normalize: target must be positive");
    RealizedSequence cur = seq.cut() >= 2 ? seq : seq.with_value(1, seq.a(1));
    const double first = std::exp(cur.a(0));
    if (!(target > first))
        throw std::domain_error("normalize: e^{a_0} already reaches the target; lower a_0 through a head override");
    double shift = 0.0;
    CertifiedSum total = exp_sum(cur, opt);
    for (int it = 0; it < 4; ++it) {
        if (total.diverges()) throw std::domain_error("normalize: sum of e^{s_n} diverges");
        if (total.lower <= target && target <= total.upper && total.width() <= 1e-12) break;
        const double rest = total.mid() - first;
        const double step = std::log((target - first) / rest);
        shift += step;
        cur = cur.with_value(1, cur.a(1) + step);
        total = exp_sum(cur, opt);
    }
    if (!(total.lower <= target && target <= total.upper) && std::abs(total.mid() - target) > 1e-12)
        throw IndeterminateError("normalize: could not reach the target within 1e-12");
    return {cur, shift, total};
}

inline Normalization normalize(const RealizedSequence& seq, Family family, const EngineOptions& opt = {}) {
    return normalize(seq, default_normalization_target(family), opt);
}

struct DfuPerturbation {
    RealizedSequence sequence;
    double delta = 0.0;
    double delta_prime = 0.0;
    CertifiedSum half_total;   ///< (1/2) sum e^{s_n} after the change
};

/// a_0 <- delta and a_1 <- a_1 + delta' with (1/2) e^delta + (1/2) e^{delta + delta'} = 1.
inline DfuPerturbation dfu_perturb(const RealizedSequence& seq, double delta, const EngineOptions& opt = {}) {
    if (!(delta > 0.0 && delta < std::log(2.0))) throw std::domain_error("dfu_perturb: delta must lie in (0, log 2)");
    if (seq.a(0) != 0.0) throw std::domain_error("dfu_perturb: expects a_0 = 0 on input");
    const double dp = std::log(2.0 - std::exp(delta)) - delta;
    if (!(2.0 * delta + dp < 0.0)) throw std::logic_error("dfu_perturb: 2 delta + delta' must be negative");
    RealizedSequence out = seq.with_value(0, delta).with_value(1, seq.a(1) + dp);
    const CertifiedSum total = exp_sum(out, opt);
    CertifiedSum half = total;
    half.lower *= 0.5;
    half.upper *= 0.5;
    if (std::abs(half.mid() - 1.0) > 1e-12 + half.width())
        throw std::domain_error("dfu_perturb: input was not normalised (sum over n >= 2 of e^{s_n} must be 1)");
    return {out, delta, dp, half};
}

struct SequenceSpec {
    Family family = Family::Grid;
    double gamma = 3.0;
    double tail_slope = 0.0;
    std::vector<double> head;
    std::optional<double> delta;
    std::optional<double> normalization_target;  ///< family default when unset
    bool normalized = true;
};

struct SequenceBuild {
    RealizedSequence sequence;
    std::optional<Normalization> normalization;
    std::optional<DfuPerturbation> perturbation;
    RenewalModel model;
};

/// Head and tail, then normalisation, then the optional (delta, delta') step.
inline SequenceBuild realize(const SequenceSpec& spec, const EngineOptions& opt = {}) {
    if (spec.tail_slope == 0.0 && spec.gamma != 0.0 && !(spec.gamma > 1.0))
        throw std::domain_error("realize: gamma must exceed 1");
    RealizedSequence seq(spec.head, spec.gamma, spec.tail_slope);
    std::optional<Normalization> norm;
    if (spec.normalized) {
        norm = normalize(seq, spec.normalization_target.value_or(default_normalization_target(spec.family)), opt);
        seq = norm->sequence;
    }
    std::optional<DfuPerturbation> dfu;
    if (spec.delta) {
        dfu = dfu_perturb(seq, *spec.delta, opt);
        seq = dfu->sequence;
    }
    RenewalModel model = realize_model(seq, spec.family);
    return {seq, norm, dfu, model};
}

} // namespace thermoform
