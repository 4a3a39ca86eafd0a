// A grid potential on the doubling map whose pressure is flat at log 2 on a
// bounded interval [1, t1].

#include <cstdio>

#include "thermoform/thermoform.hpp"

using namespace thermoform;

int main() {
    SequenceSpec spec;
    spec.family = Family::Grid;
    spec.gamma = 3.0;
    spec.delta = 0.2;
    const SequenceBuild b = realize(spec);
    std::printf("a_0 = %.6f  a_1 = %.6f  delta' = %.6f\n", b.sequence.a(0), b.sequence.a(1), b.perturbation->delta_prime);

    const auto flat = locate_flat_interval(b.model, {0.0, 6.0});
    if (!flat || flat->right_unbounded) {
        std::printf("no bounded flat interval in [0, 6]\n");
        return 1;
    }
    const TransitionPair ends = smoothness_at_flat_ends(b.model, *flat);
    std::printf("flat on [%.10f, %.10f]\n", flat->t0(), flat->t1());
    std::printf("onset %s (return time %.6f), end %s (return time %.6f)\n", to_string(ends.onset.smoothness).data(),
                ends.onset.return_time.mid(), to_string(ends.end.smoothness).data(), ends.end.return_time.mid());

    for (double t : {0.5, 0.5 * (1.0 + flat->t1()), flat->t1() + 0.5}) {
        const Classification c = classify(b.model, t);
        std::printf("t = %.4f  p = %.12f  %s\n", t, c.pressure.p, to_string(c.recurrence).data());
    }

    const double t = 0.5 * (1.0 + flat->t1());
    const TransienceWitness w = cyr_sarig_witness(b.model, t);
    std::printf("u0 = %.10f: bonus %.4f moves p by %.2e, bonus %.4f by %.2e\n", w.u0.mid(), w.probe_small, w.shift_small,
                w.probe_large, w.shift_large);
}
