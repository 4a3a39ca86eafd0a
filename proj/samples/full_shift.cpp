// Pressure and equilibrium state of a Bernoulli potential on the full 2-shift.

#include <cmath>
#include <cstdio>
#include <vector>

#include "thermoform/thermoform.hpp"

using namespace thermoform;

int main() {
    const double q = 0.3;
    const FiniteShift shift = FiniteShift::full(2);
    const std::vector<double> phi = {std::log(q), std::log(1.0 - q)};
    const auto potential = LocallyConstantPotential::from_symbols(shift, phi);

    const auto tm = build_transfer_matrix(shift, potential);
    const RPFSolution s = solve_rpf(tm);
    std::printf("P = %.3e after %ld iterations (residual %.1e)\n", s.pressure, s.iterations, s.residual);
    std::printf("entropy %.15f, integral of phi %.15f\n", equilibrium_entropy(tm, s), equilibrium_integral(tm, s, potential));

    for (const Word& w : {Word{0}, Word{0, 1}, Word{1, 1, 0}}) {
        double product = 1.0;
        for (Symbol x : w) product *= x == 0 ? q : 1.0 - q;
        std::printf("mu[");
        for (Symbol x : w) std::printf("%d", x);
        std::printf("] = %.15f   product %.15f\n", cylinder_mass(tm, s, w), product);
    }

    const auto grid = linspace(-2.0, 2.0, 9);
    const PressureCurve c = pressure_curve_finite(shift, potential, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        std::printf("t = %5.2f  p = %.12f  Dp = %.12f\n", c.t[i], c.p[i], c.derivatives[i].value.mid());
}
