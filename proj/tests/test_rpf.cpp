#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thermoform/rpf.hpp"

using namespace thermoform;

namespace {

using Dense = std::vector<std::vector<double>>;

Dense dense(const TransferMatrix& tm) {
    Dense d(tm.size(), std::vector<double>(tm.size(), 0.0));
    for (int i = 0; i < tm.size(); ++i)
        for (const auto& e : tm.rows[i]) d[i][e.col] = e.weight;
    return d;
}

Dense multiply(const Dense& a, const Dense& b) {
    const std::size_t n = a.size();
    Dense c(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

double trace(const Dense& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) t += a[i][i];
    return t;
}

FiniteShift random_mixing_shift(std::mt19937& rng, int m) {
    std::bernoulli_distribution coin(0.6);
    for (;;) {
        std::vector<std::vector<int>> t(m, std::vector<int>(m, 0));
        for (auto& row : t)
            for (auto& x : row) x = coin(rng);
        bool ok = true;
        for (int i = 0; i < m && ok; ++i) {
            bool row = false, col = false;
            for (int j = 0; j < m; ++j) {
                row = row || t[i][j];
                col = col || t[j][i];
            }
            ok = row && col;
        }
        if (!ok) continue;
        FiniteShift s(t);
        if (is_topologically_mixing(s, m * m).mixing) return s;
    }
}

LocallyConstantPotential random_potential(std::mt19937& rng, const FiniteShift& shift, int depth) {
    std::uniform_real_distribution<double> u(-1.5, 1.0);
    std::map<Word, double> v;
    for (auto& w : admissible_words(shift, depth)) v.emplace(std::move(w), u(rng));
    return {shift, depth, std::move(v)};
}

LocallyConstantPotential bernoulli(double p) {
    const std::vector<double> phi = {std::log(p), std::log(1.0 - p)};
    return LocallyConstantPotential::from_symbols(FiniteShift::full(2), phi);
}

} // namespace

TEST(TransferMatrix, Examples) {
    const auto full = FiniteShift::full(2);
    const auto tm = build_transfer_matrix(full, LocallyConstantPotential::zero(full));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_EQ(tm.entry(i, j), 1.0);

    const auto b = build_transfer_matrix(full, bernoulli(0.3));
    EXPECT_DOUBLE_EQ(b.entry(0, 0), 0.3);
    EXPECT_DOUBLE_EQ(b.entry(1, 0), 0.3);
    EXPECT_DOUBLE_EQ(b.entry(0, 1), 0.7);

    const auto r = FiniteShift::renewal(5);
    const auto rt = build_transfer_matrix(r, LocallyConstantPotential::zero(r));
    ASSERT_EQ(rt.size(), 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) EXPECT_EQ(rt.entry(i, j), (i == 0 || j == i - 1) ? 1.0 : 0.0) << i << "," << j;
}

TEST(Rpf, FullShiftZeroPotential) {
    const auto full = FiniteShift::full(2);
    const auto s = solve_rpf(build_transfer_matrix(full, LocallyConstantPotential::zero(full)));
    EXPECT_NEAR(s.pressure, std::log(2.0), 1e-12);
    EXPECT_NEAR(s.h[0], s.h[1], 1e-12);
    EXPECT_NEAR(s.m[0], 0.5, 1e-12);
    EXPECT_NEAR(s.m[1], 0.5, 1e-12);
}

TEST(Rpf, BernoulliCylinders) {
    for (double p : {0.3, 0.5, 0.9}) {
        const auto pot = bernoulli(p);
        const auto tm = build_transfer_matrix(FiniteShift::full(2), pot);
        const auto s = solve_rpf(tm);
        EXPECT_NEAR(s.pressure, 0.0, 1e-12);
        for (const Word& w : admissible_words(FiniteShift::full(2), 5)) {
            double product = 1.0;
            for (Symbol x : w) product *= x == 0 ? p : 1.0 - p;
            EXPECT_NEAR(cylinder_mass(tm, s, w), product, 1e-12);
        }
        EXPECT_NEAR(gibbs_constant_check(s, FiniteShift::full(2), pot, 8), 1.0, 1e-10);
    }
}

TEST(Rpf, GoldenMean) {
    const FiniteShift golden({{1, 1}, {1, 0}});
    const auto s0 = solve_rpf(build_transfer_matrix(golden, LocallyConstantPotential::zero(golden)));
    EXPECT_NEAR(s0.pressure, std::log((1.0 + std::sqrt(5.0)) / 2.0), 1e-12);

    // Perron root of [[1, e^-1], [1, 0]]: lambda^2 - lambda - e^-1 = 0.
    const std::vector<double> phi = {0.0, -1.0};
    const auto pot = LocallyConstantPotential::from_symbols(golden, phi);
    const double lambda = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * std::exp(-1.0)));
    const auto grid = std::vector<double>{0.0, 1.0};
    const auto c = pressure_curve_finite(golden, pot, grid);
    EXPECT_NEAR(c.p[0], std::log((1.0 + std::sqrt(5.0)) / 2.0), 1e-12);
    EXPECT_NEAR(c.p[1], std::log(lambda), 1e-12);
}

TEST(Rpf, GibbsConstantStable) {
    const FiniteShift golden({{1, 1}, {1, 0}});
    const auto pot = LocallyConstantPotential::zero(golden);
    const auto s = solve_rpf(build_transfer_matrix(golden, pot));
    const double k6 = gibbs_constant_check(s, golden, pot, 6);
    const double k10 = gibbs_constant_check(s, golden, pot, 10);
    EXPECT_TRUE(std::isfinite(k10));
    EXPECT_LT(k10, 3.0);
    EXPECT_NEAR(k6, k10, 1e-9);
}

TEST(Rpf, TraceMatchesPeriodicWordSum) {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 6; ++trial) {
        const FiniteShift shift = random_mixing_shift(rng, 3 + trial % 2);
        const auto pot = random_potential(rng, shift, 1 + trial % 2);
        const auto tm = build_transfer_matrix(shift, pot);
        const auto s = solve_rpf(tm);
        const Dense t = dense(tm);
        Dense power = t;
        for (int n = 1; n <= 12; ++n) {
            double sum = 0.0;
            for (const auto& w : enumerate_periodic_words(shift, n)) sum += std::exp(birkhoff_sum(pot, w));
            EXPECT_NEAR(trace(power), sum, 1e-12 * sum) << "trial " << trial << " n " << n;
            if (n == 12) {
                EXPECT_NEAR(std::log(trace(power)) / n, s.pressure, 0.2);
            }
            power = multiply(power, t);
        }
        // (1/n) log tr T^n converges to the pressure.
        for (int n = 13; n <= 200; ++n) power = multiply(power, t);
        EXPECT_NEAR(std::log(trace(power)) / 201.0, s.pressure, 0.02);
    }
}

TEST(Rpf, ResidualsAndVariationalIdentity) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const FiniteShift shift = random_mixing_shift(rng, 2 + trial % 4);
        const auto pot = random_potential(rng, shift, 1 + trial % 3);
        const auto tm = build_transfer_matrix(shift, pot);
        const auto s = solve_rpf(tm, 1e-12);
        EXPECT_LE(s.residual, 1e-12);
        EXPECT_NEAR(equilibrium_entropy(tm, s) + equilibrium_integral(tm, s, pot), s.pressure, 1e-8);
        double mass = 0.0;
        for (double x : s.mu) mass += x;
        EXPECT_NEAR(mass, 1.0, 1e-12);
    }
}

TEST(Rpf, CurveConvexAndDerivativeMatchesFiniteDifference) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const FiniteShift shift = random_mixing_shift(rng, 3);
        const auto pot = random_potential(rng, shift, 2);
        const auto grid = linspace(-3.0, 3.0, 61);
        const auto c = pressure_curve_finite(shift, pot, grid);
        EXPECT_GE(min_second_difference(c.t, c.p), -1e-9);
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double fd = (c.p[i + 1] - c.p[i - 1]) / (grid[i + 1] - grid[i - 1]);
            EXPECT_NEAR(c.derivatives[i].value.mid(), fd, 0.05);
        }
    }
}

TEST(Rpf, NonMixingRejected) {
    const FiniteShift split({{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}});
    EXPECT_THROW(solve_rpf(build_transfer_matrix(split, LocallyConstantPotential::zero(split))), std::domain_error);
    const FiniteShift swap({{0, 1}, {1, 0}});
    EXPECT_THROW(solve_rpf(build_transfer_matrix(swap, LocallyConstantPotential::zero(swap))), std::domain_error);
    const auto p = check_primitive(build_transfer_matrix(swap, LocallyConstantPotential::zero(swap)));
    EXPECT_TRUE(p.irreducible);
    EXPECT_EQ(p.period, 2);
}

TEST(Components, DisjointFullShifts) {
    const FiniteShift split({{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}});
    const auto comps = decompose_components(split);
    ASSERT_EQ(comps.size(), 2u);
    const std::vector<double> psi = {-1.0, -1.0, -2.0, -2.0};
    const auto pot = LocallyConstantPotential::from_symbols(split, psi);
    const auto grid = linspace(-2.0, 2.0, 11);
    const auto c = pressure_curve_components(split, pot, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_NEAR(c.p[i], std::max(-grid[i], -2.0 * grid[i]) + std::log(2.0), 1e-10);
    ASSERT_EQ(c.transitions.size(), 1u);
    EXPECT_NEAR(c.transitions[0].t, 0.0, 1e-10);

    const auto at0 = component_pressure(split, pot.scaled(0.0));
    EXPECT_EQ(at0.maximizers.size(), 2u);
    EXPECT_NEAR(at0.pressure, std::log(2.0), 1e-12);
    EXPECT_EQ(component_pressure(split, pot.scaled(1.0)).maximizers.size(), 1u);
}

TEST(Components, BridgeAndTransientSymbols) {
    // 0,1 full; 1 -> 2; 2,3 full; 4 only passes through.
    const FiniteShift s({{1, 1, 0, 0, 1}, {1, 1, 1, 0, 0}, {0, 0, 1, 1, 0}, {0, 0, 1, 1, 0}, {0, 0, 1, 0, 0}});
    const auto comps = decompose_components(s);
    ASSERT_EQ(comps.size(), 2u);
    const std::vector<double> psi = {-1.0, -1.0, -2.0, -2.0, 5.0};
    const auto pot = LocallyConstantPotential::from_symbols(s, psi);
    EXPECT_NEAR(component_pressure(s, pot.scaled(-1.0)).pressure, 2.0 + std::log(2.0), 1e-12);
}

TEST(Components, SingleComponentMatchesRpf) {
    std::mt19937 rng(3);
    const FiniteShift shift = random_mixing_shift(rng, 4);
    const auto pot = random_potential(rng, shift, 2);
    const auto cp = component_pressure(shift, pot);
    ASSERT_EQ(cp.components.size(), 1u);
    EXPECT_NEAR(cp.pressure, solve_rpf(build_transfer_matrix(shift, pot)).pressure, 1e-12);
}

TEST(Components, PeriodicComponent) {
    const FiniteShift swap({{0, 1}, {1, 0}});
    const std::vector<double> psi = {0.5, -0.25};
    const auto cp = component_pressure(swap, LocallyConstantPotential::from_symbols(swap, psi));
    ASSERT_EQ(cp.components.size(), 1u);
    EXPECT_EQ(cp.components[0].period, 2);
    EXPECT_NEAR(cp.pressure, 0.5 * (0.5 - 0.25), 1e-12);
}
