#pragma once

// Finite Markov shifts: words, cylinders, periodic orbits, Birkhoff sums and
// the variation of locally constant potentials.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermoform {

using Symbol = int;
using Word = std::vector<Symbol>;

/// Square 0/1 pattern stored row-major; entry (i, j) set iff j may follow i.
using BooleanMatrix = std::vector<std::uint8_t>;

namespace detail {

inline BooleanMatrix boolean_product(const BooleanMatrix& a, const BooleanMatrix& b, int n) {
    BooleanMatrix c(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            if (!a[i * n + k]) continue;
            for (int j = 0; j < n; ++j) {
                if (b[k * n + j]) c[i * n + j] = 1;
            }
        }
    }
    return c;
}

} // namespace detail

/// Smallest N in [1, n_max] with every entry of pattern^N positive, if any.
inline std::optional<int> first_positive_power(const BooleanMatrix& pattern, int n, int n_max) {
    if (n <= 0) return std::nullopt;
    BooleanMatrix power = pattern;
    for (int k = 1; k <= n_max; ++k) {
        if (std::all_of(power.begin(), power.end(), [](std::uint8_t v) { return v != 0; })) return k;
        if (k < n_max) power = detail::boolean_product(power, pattern, n);
    }
    return std::nullopt;
}

class FiniteShift {
public:
    /// `transitions[i][j] != 0` iff symbol j may follow symbol i.
    explicit FiniteShift(const std::vector<std::vector<int>>& transitions) {
        size_ = static_cast<int>(transitions.size());
        if (size_ < 1) throw std::domain_error("FiniteShift: alphabet must be non-empty");
        pattern_.assign(static_cast<std::size_t>(size_) * size_, 0);
        for (int i = 0; i < size_; ++i) {
            if (static_cast<int>(transitions[i].size()) != size_)
                throw std::domain_error("FiniteShift: transition matrix must be square");
            for (int j = 0; j < size_; ++j) {
                const int v = transitions[i][j];
                if (v != 0 && v != 1) throw std::domain_error("FiniteShift: entries must be 0 or 1");
                pattern_[i * size_ + j] = static_cast<std::uint8_t>(v);
            }
        }
        for (int i = 0; i < size_; ++i) {
            bool row = false, col = false;
            for (int j = 0; j < size_; ++j) {
                row = row || pattern_[i * size_ + j];
                col = col || pattern_[j * size_ + i];
            }
            if (!row) throw std::domain_error("FiniteShift: row " + std::to_string(i) + " is all zeros");
            if (!col) throw std::domain_error("FiniteShift: column " + std::to_string(i) + " is all zeros");
        }
    }

    static FiniteShift full(int m) {
        return FiniteShift(std::vector<std::vector<int>>(m, std::vector<int>(m, 1)));
    }

    /// Renewal shift on {0, ..., max_symbol}: 0 -> 0, 0 -> n, n -> n-1.
    static FiniteShift renewal(int max_symbol) {
        const int m = max_symbol + 1;
        std::vector<std::vector<int>> t(m, std::vector<int>(m, 0));
        for (int n = 0; n < m; ++n) t[0][n] = 1;
        for (int n = 1; n < m; ++n) t[n][n - 1] = 1;
        return FiniteShift(t);
    }

    int alphabet_size() const noexcept { return size_; }

    bool allows(Symbol a, Symbol b) const {
        check_symbol(a);
        check_symbol(b);
        return pattern_[a * size_ + b] != 0;
    }

    const BooleanMatrix& pattern() const noexcept { return pattern_; }

    void check_symbol(Symbol s) const {
        if (s < 0 || s >= size_)
            throw std::domain_error("symbol " + std::to_string(s) + " outside alphabet of size " +
                                    std::to_string(size_));
    }

    /// Sub-shift on the given symbols, relabelled 0..k-1 in the given order.
    FiniteShift restricted(std::span<const Symbol> symbols) const {
        std::vector<std::vector<int>> t(symbols.size(), std::vector<int>(symbols.size(), 0));
        for (std::size_t i = 0; i < symbols.size(); ++i)
            for (std::size_t j = 0; j < symbols.size(); ++j) t[i][j] = allows(symbols[i], symbols[j]) ? 1 : 0;
        return FiniteShift(t);
    }

    friend bool operator==(const FiniteShift&, const FiniteShift&) = default;

private:
    int size_ = 0;
    BooleanMatrix pattern_;
};

inline bool is_admissible(const Word& word, const FiniteShift& shift) {
    for (Symbol s : word) shift.check_symbol(s);
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
        if (!shift.allows(word[i], word[i + 1])) return false;
    return true;
}

/// Admissible and closes up: the last symbol may be followed by the first.
inline bool is_cyclically_admissible(const Word& word, const FiniteShift& shift) {
    if (word.empty() || !is_admissible(word, shift)) return false;
    return shift.allows(word.back(), word.front());
}

struct MixingVerdict {
    bool mixing = false;
    int exponent = 0;     ///< smallest N with a positive N-th power; 0 when not mixing
    int checked_up_to = 0;
};

inline MixingVerdict is_topologically_mixing(const FiniteShift& shift, int n_max) {
    if (n_max < 1) throw std::domain_error("is_topologically_mixing: n_max must be >= 1");
    const auto n = first_positive_power(shift.pattern(), shift.alphabet_size(), n_max);
    return n ? MixingVerdict{true, *n, n_max} : MixingVerdict{false, 0, n_max};
}

namespace detail {

template <class Visit>
void extend_words(const FiniteShift& shift, Word& prefix, int length, Visit& visit) {
    if (static_cast<int>(prefix.size()) == length) {
        visit(prefix);
        return;
    }
    for (Symbol s = 0; s < shift.alphabet_size(); ++s) {
        if (!prefix.empty() && !shift.allows(prefix.back(), s)) continue;
        prefix.push_back(s);
        extend_words(shift, prefix, length, visit);
        prefix.pop_back();
    }
}

} // namespace detail

/// All admissible words of the given length, in lexicographic order.
inline std::vector<Word> admissible_words(const FiniteShift& shift, int length) {
    std::vector<Word> out;
    if (length < 1) return out;
    Word prefix;
    prefix.reserve(length);
    auto visit = [&](const Word& w) { out.push_back(w); };
    detail::extend_words(shift, prefix, length, visit);
    return out;
}

/// Words w of length n with every transition allowed, including w[n-1] -> w[0].
/// Each word is one point of period n. Lexicographic order.
inline std::vector<Word> enumerate_periodic_words(const FiniteShift& shift, int n,
                                                  std::optional<Symbol> first_symbol = std::nullopt) {
    if (n < 1) throw std::domain_error("enumerate_periodic_words: n must be >= 1");
    if (first_symbol) shift.check_symbol(*first_symbol);
    std::vector<Word> out;
    Word prefix;
    prefix.reserve(n);
    auto visit = [&](const Word& w) {
        if (shift.allows(w.back(), w.front())) out.push_back(w);
    };
    if (first_symbol) {
        prefix.push_back(*first_symbol);
        detail::extend_words(shift, prefix, n, visit);
    } else {
        detail::extend_words(shift, prefix, n, visit);
    }
    return out;
}

/// Potential depending on the first `depth` symbols; one value (nats) per
/// admissible depth-word.
class LocallyConstantPotential {
public:
    LocallyConstantPotential(FiniteShift shift, int depth, std::map<Word, double> values)
        : shift_(std::move(shift)), depth_(depth), values_(std::move(values)) {
        if (depth_ < 1) throw std::domain_error("LocallyConstantPotential: depth must be >= 1");
        const auto words = admissible_words(shift_, depth_);
        for (const auto& w : words) {
            const auto it = values_.find(w);
            if (it == values_.end()) throw std::domain_error("LocallyConstantPotential: missing value for an admissible word");
            if (!std::isfinite(it->second)) throw std::domain_error("LocallyConstantPotential: values must be finite");
        }
        if (values_.size() != words.size())
            throw std::domain_error("LocallyConstantPotential: value given for an inadmissible or wrong-length word");
    }

    static LocallyConstantPotential zero(const FiniteShift& shift, int depth = 1) {
        std::map<Word, double> v;
        for (auto& w : admissible_words(shift, depth)) v.emplace(std::move(w), 0.0);
        return {shift, depth, std::move(v)};
    }

    /// Depth-1 potential from one value per symbol.
    static LocallyConstantPotential from_symbols(const FiniteShift& shift, std::span<const double> per_symbol) {
        if (static_cast<int>(per_symbol.size()) != shift.alphabet_size())
            throw std::domain_error("from_symbols: need one value per symbol");
        std::map<Word, double> v;
        for (Symbol s = 0; s < shift.alphabet_size(); ++s) v.emplace(Word{s}, per_symbol[s]);
        return {shift, 1, std::move(v)};
    }

    int depth() const noexcept { return depth_; }
    const FiniteShift& shift() const noexcept { return shift_; }
    const std::map<Word, double>& values() const noexcept { return values_; }

    double value(const Word& context) const {
        const auto it = values_.find(context);
        if (it == values_.end()) throw std::domain_error("potential: context word is not admissible");
        return it->second;
    }

    LocallyConstantPotential scaled(double t) const {
        auto v = values_;
        for (auto& [w, x] : v) x *= t;
        return {shift_, depth_, std::move(v)};
    }

private:
    FiniteShift shift_;
    int depth_;
    std::map<Word, double> values_;
};

/// S_n phi at the periodic point (w)^infinity; depth contexts wrap around.
inline double birkhoff_sum(const LocallyConstantPotential& potential, const Word& cyclic_word) {
    const int n = static_cast<int>(cyclic_word.size());
    if (n < 1) throw std::domain_error("birkhoff_sum: empty word");
    if (!is_cyclically_admissible(cyclic_word, potential.shift()))
        throw std::domain_error("birkhoff_sum: word is not cyclically admissible");
    const int k = potential.depth();
    Word context(k);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) context[j] = cyclic_word[(i + j) % n];
        sum += potential.value(context);
    }
    return sum;
}

/// V_n: sup |phi(x) - phi(y)| over x, y sharing their first n symbols.
inline double variation(const LocallyConstantPotential& potential, int n) {
    if (n < 1) throw std::domain_error("variation: n must be >= 1");
    if (n >= potential.depth()) return 0.0;
    double v = 0.0;
    // Every admissible word extends (no zero rows), so grouping depth-words by
    // their n-prefix covers all pairs.
    std::map<Word, std::pair<double, double>> range;
    for (const auto& [w, x] : potential.values()) {
        Word prefix(w.begin(), w.begin() + n);
        auto [it, fresh] = range.try_emplace(prefix, x, x);
        if (!fresh) {
            it->second.first = std::min(it->second.first, x);
            it->second.second = std::max(it->second.second, x);
        }
    }
    for (const auto& [p, r] : range) v = std::max(v, r.second - r.first);
    return v;
}

/// V_n for a grid-type potential sampled by its level values a_0, a_1, ...:
/// points agreeing on n symbols without reaching the renewal symbol take
/// values in {a_j : j >= n} together with 0 on the bad set.
inline double variation(std::span<const double> level_values, int n) {
    if (n < 1) throw std::domain_error("variation: n must be >= 1");
    double lo = 0.0, hi = 0.0;
    for (std::size_t j = static_cast<std::size_t>(n); j < level_values.size(); ++j) {
        lo = std::min(lo, level_values[j]);
        hi = std::max(hi, level_values[j]);
    }
    return hi - lo;
}

} // namespace thermoform
