#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "thermoform/symbolic.hpp"

using namespace thermoform;

namespace {

std::vector<std::vector<int>> renewal_matrix(int m) {
    std::vector<std::vector<int>> t(m, std::vector<int>(m, 0));
    for (int n = 0; n < m; ++n) t[0][n] = 1;
    for (int n = 1; n < m; ++n) t[n][n - 1] = 1;
    return t;
}

// Random 0/1 matrix without empty rows or columns.
std::vector<std::vector<int>> random_matrix(std::mt19937& rng, int m) {
    std::bernoulli_distribution coin(0.45);
    std::vector<std::vector<int>> t(m, std::vector<int>(m, 0));
    for (auto& row : t)
        for (auto& x : row) x = coin(rng) ? 1 : 0;
    for (int i = 0; i < m; ++i) {
        bool row = false, col = false;
        for (int j = 0; j < m; ++j) {
            row = row || t[i][j];
            col = col || t[j][i];
        }
        if (!row || !col) t[i][i] = 1;
    }
    return t;
}

long trace_of_power(const std::vector<std::vector<int>>& a, int n) {
    const std::size_t m = a.size();
    std::vector<std::vector<long>> p(m, std::vector<long>(m, 0));
    for (std::size_t i = 0; i < m; ++i) p[i][i] = 1;
    for (int k = 0; k < n; ++k) {
        std::vector<std::vector<long>> q(m, std::vector<long>(m, 0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t l = 0; l < m; ++l)
                if (p[i][l])
                    for (std::size_t j = 0; j < m; ++j) q[i][j] += p[i][l] * a[l][j];
        p = std::move(q);
    }
    long tr = 0;
    for (std::size_t i = 0; i < m; ++i) tr += p[i][i];
    return tr;
}

LocallyConstantPotential random_potential(std::mt19937& rng, const FiniteShift& shift, int depth) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::map<Word, double> v;
    for (auto& w : admissible_words(shift, depth)) v.emplace(std::move(w), u(rng));
    return {shift, depth, std::move(v)};
}

} // namespace

TEST(Admissibility, FullShiftAdmitsEverything) {
    EXPECT_TRUE(is_admissible({0, 1, 0}, FiniteShift::full(2)));
}

TEST(Admissibility, RenewalShift) {
    const FiniteShift r(renewal_matrix(4));
    EXPECT_EQ(r, FiniteShift::renewal(3));
    EXPECT_TRUE(is_admissible({0, 3, 2, 1, 0}, r));
    EXPECT_FALSE(is_admissible({1, 3}, r));
}

TEST(Admissibility, SymbolOutOfRange) {
    EXPECT_THROW(is_admissible({0, 2}, FiniteShift::full(2)), std::domain_error);
}

TEST(Mixing, Verdicts) {
    const auto full = is_topologically_mixing(FiniteShift::full(3), 10);
    EXPECT_TRUE(full.mixing);
    EXPECT_EQ(full.exponent, 1);

    const FiniteShift split({{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}});
    for (int n : {1, 5, 40}) EXPECT_FALSE(is_topologically_mixing(split, n).mixing);

    const FiniteShift swap({{0, 1}, {1, 0}});
    EXPECT_FALSE(is_topologically_mixing(swap, 50).mixing);

    const FiniteShift golden({{1, 1}, {1, 0}});
    EXPECT_EQ(is_topologically_mixing(golden, 10).exponent, 2);
}

TEST(PeriodicWords, Examples) {
    EXPECT_EQ(enumerate_periodic_words(FiniteShift::full(2), 3).size(), 8u);
    const auto w = enumerate_periodic_words(FiniteShift::full(3), 2, 2);
    ASSERT_EQ(w.size(), 3u);
    for (const auto& x : w) EXPECT_EQ(x.front(), 2);
    EXPECT_TRUE(enumerate_periodic_words(FiniteShift({{0, 1}, {1, 0}}), 3).empty());
}

TEST(PeriodicWords, LexicographicOrder) {
    const auto w = enumerate_periodic_words(FiniteShift::full(2), 4);
    EXPECT_TRUE(std::is_sorted(w.begin(), w.end()));
}

TEST(PeriodicWords, CountEqualsTraceOfPower) {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 12; ++trial) {
        const int m = 2 + trial % 5;
        const auto a = random_matrix(rng, m);
        const FiniteShift shift(a);
        for (int n = 1; n <= (m <= 3 ? 12 : 8); ++n)
            EXPECT_EQ(static_cast<long>(enumerate_periodic_words(shift, n).size()), trace_of_power(a, n))
                << "m=" << m << " n=" << n;
    }
}

TEST(PeriodicWords, FullShiftCount) {
    for (int m = 1; m <= 4; ++m)
        for (int n = 1; n <= 6; ++n)
            EXPECT_EQ(enumerate_periodic_words(FiniteShift::full(m), n).size(), static_cast<std::size_t>(std::pow(m, n)));
}

TEST(Birkhoff, Examples) {
    const FiniteShift full2 = FiniteShift::full(2);
    EXPECT_EQ(birkhoff_sum(LocallyConstantPotential::zero(full2, 2), {0, 1, 1, 0}), 0.0);

    const double p = 0.3, q = 0.7;
    const std::vector<double> phi = {std::log(p), std::log(q)};
    const auto bern = LocallyConstantPotential::from_symbols(full2, phi);
    EXPECT_DOUBLE_EQ(birkhoff_sum(bern, {0, 0, 1}), 2 * std::log(p) + std::log(q));

    // Depth 2 on (0,1,1): contexts 01, 11, 10 cyclically.
    const LocallyConstantPotential d2(full2, 2, {{{0, 0}, 0.5}, {{0, 1}, 1.0}, {{1, 0}, 2.0}, {{1, 1}, 4.0}});
    EXPECT_DOUBLE_EQ(birkhoff_sum(d2, {0, 1, 1}), 7.0);
}

TEST(Birkhoff, InadmissibleCycleThrows) {
    const FiniteShift golden({{1, 1}, {1, 0}});
    EXPECT_THROW(birkhoff_sum(LocallyConstantPotential::zero(golden), {1, 1}), std::domain_error);
    EXPECT_THROW(birkhoff_sum(LocallyConstantPotential::zero(golden), {1, 0, 1}), std::domain_error);
}

TEST(Birkhoff, RotationInvariant) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const FiniteShift shift(random_matrix(rng, 3 + trial % 3));
        const auto pot = random_potential(rng, shift, 1 + trial % 3);
        for (int n = 1; n <= 7; ++n) {
            for (const auto& w : enumerate_periodic_words(shift, n)) {
                const double base = birkhoff_sum(pot, w);
                Word r = w;
                for (int k = 1; k < n; ++k) {
                    std::rotate(r.begin(), r.begin() + 1, r.end());
                    EXPECT_NEAR(birkhoff_sum(pot, r), base, 1e-12);
                }
            }
        }
    }
}

TEST(Potential, RejectsMissingOrExtraValues) {
    const FiniteShift golden({{1, 1}, {1, 0}});
    EXPECT_THROW(LocallyConstantPotential(golden, 2, {{{0, 0}, 0.0}, {{0, 1}, 0.0}}), std::domain_error);
    EXPECT_THROW(LocallyConstantPotential(golden, 2, {{{0, 0}, 0.0}, {{0, 1}, 0.0}, {{1, 0}, 0.0}, {{1, 1}, 0.0}}),
                 std::domain_error);
    EXPECT_NO_THROW(LocallyConstantPotential(golden, 2, {{{0, 0}, 0.0}, {{0, 1}, 0.0}, {{1, 0}, 0.0}}));
}

TEST(Variation, Examples) {
    const FiniteShift full2 = FiniteShift::full(2);
    const std::vector<double> phi = {-1.0, 3.0};
    EXPECT_EQ(variation(LocallyConstantPotential::from_symbols(full2, phi), 2), 0.0);

    const LocallyConstantPotential d2(full2, 2, {{{0, 0}, 0.0}, {{0, 1}, 1.0}, {{1, 0}, 2.0}, {{1, 1}, 3.0}});
    // Brute force over pairs of depth-2 words sharing the first symbol.
    double brute = 0.0;
    for (const auto& [a, x] : d2.values())
        for (const auto& [b, y] : d2.values())
            if (a[0] == b[0]) brute = std::max(brute, std::abs(x - y));
    EXPECT_DOUBLE_EQ(variation(d2, 1), brute);
    EXPECT_DOUBLE_EQ(brute, 1.0);
}

TEST(Variation, NonIncreasing) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const FiniteShift shift(random_matrix(rng, 3));
        const auto pot = random_potential(rng, shift, 4);
        for (int n = 1; n < 5; ++n) EXPECT_GE(variation(pot, n), variation(pot, n + 1));
    }
}

TEST(Variation, GridValuesVanish) {
    std::vector<double> a;
    for (int n = 0; n < 2000; ++n) a.push_back(n == 0 ? 0.0 : 3.0 * std::log(n / (n + 1.0)));
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {1, 10, 100, 1000}) {
        const double v = variation(a, n);
        EXPECT_LE(v, prev);
        prev = v;
    }
    EXPECT_LT(variation(a, 1000), 0.01);
}
