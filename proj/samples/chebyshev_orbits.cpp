// Pressure of -t log|f'| for the Chebyshev map from periodic-orbit sums.

#include <cstdio>
#include <vector>

#include "thermoform/thermoform.hpp"

using namespace thermoform;

int main() {
    const IntervalMap map = IntervalMap::chebyshev();
    const auto table = periodic_table(map, 14);
    std::vector<double> ts, ps;
    for (double t = -3.0; t <= 1.0 + 1e-9; t += 0.25) {
        const GurevichEstimate g = gurevich_estimate(table, t);
        std::printf("t = %5.2f  raw %.8f  aitken %.8f  exact %.8f\n", t, g.raw.back(), g.extrapolated,
                    chebyshev_pressure_exact(t));
        ts.push_back(t);
        ps.push_back(g.extrapolated);
    }
    const KinkFit k = fit_two_slopes(ts, ps);
    std::printf("kink at t = %.4f, slopes %.4f | %.4f\n", k.kink, k.slope_left, k.slope_right);
}
