// Plants a community in a small synthetic graph and searches for it.

#include <cstdio>

#include "tempocom/detect.hpp"
#include "tempocom/synth.hpp"

int main() {
    tempocom::SynthConfig sc;
    sc.n = 200;
    sc.T = 100;
    sc.planted_density = 1.0;
    sc.seed = 7;
    const auto syn = tempocom::generate(sc);

    tempocom::RunConfig rc;
    rc.alpha = 0.2;
    const auto st = tempocom::detect(syn.graph, rc);

    std::printf("planted [%d, %d], %zu nodes\n", syn.planted.interval.start, syn.planted.interval.end,
                syn.planted.nodes.size());
    for (const auto& c : st.communities) {
        std::printf("phi %.5f  [%d, %d]  %zu nodes\n", c.phi, c.interval.start, c.interval.end, c.nodes.size());
    }
    std::printf("pruned %.1f%% of %zu intervals\n", 100.0 * st.pruned_fraction(), st.verdicts.size());
}
