// A geometric renewal model solved directly and through finite truncations.

#include <cstdio>

#include "thermoform/thermoform.hpp"

using namespace thermoform;

int main() {
    const double c = 0.5, t = 0.5;
    const RenewalModel model = geometric_model(Family::Hofbauer, c);
    const PressureSolution sol = solve_pressure(model, t);
    std::printf("renewal engine: p = %.15f in [%.15f, %.15f]\n", sol.p, sol.bracket.lower, sol.bracket.upper);

    for (int depth : {2, 5, 10, 20, 40}) {
        const auto [shift, potential] = truncated_realization(model, t, depth);
        const RPFSolution s = solve_rpf(build_transfer_matrix(shift, potential));
        std::printf("depth %3d: p = %.15f  gap %.2e\n", depth, s.pressure, sol.p - s.pressure);
    }

    const auto z = partition_sums(model, t, 10);
    for (int n = 1; n <= 10; ++n) std::printf("Z_%d = %.10f\n", n, z[n]);
}
