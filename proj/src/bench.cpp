#include "xda/bench.hpp"

#include <algorithm>
#include <chrono>

#include "xda/error.hpp"

namespace xda {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

MixedGraph syn_b_graph() {
    MixedGraph g({"X", "Y", "Z"});
    g.set_edge("X", "Y", Mark::Tail, Mark::Arrow);
    g.set_edge("Y", "Z", Mark::Tail, Mark::Arrow);
    return g;
}

SynBRun run_syn_b(const SynBInstance& inst, Aggregate agg) {
    static const MixedGraph g = syn_b_graph();
    SynBRun run;
    const auto t0 = Clock::now();
    try {
        ExplainResult r = explain(inst.data, g, inst.query(agg));
        run.seconds = since(t0);
        if (!r.explanations.empty() && r.explanations.front().dimension == "Y") {
            run.answered = true;
            run.f1 = compare_sets(r.explanations.front().values, inst.truth).f1;
        }
    } catch (const QueryError&) {
        run.seconds = since(t0);
    }
    return run;
}

SynBCell run_syn_b_cell(const SynBConfig& cfg, Aggregate agg, const std::vector<std::uint64_t>& seeds) {
    SynBCell cell;
    cell.config = cfg;
    cell.agg = agg;
    cell.min_f1 = 1.0;
    for (auto seed : seeds) {
        const SynBRun run = run_syn_b(gen_syn_b(cfg, seed), agg);
        cell.mean_f1 += run.f1;
        cell.min_f1 = std::min(cell.min_f1, run.f1);
        cell.mean_seconds += run.seconds;
        cell.max_seconds = std::max(cell.max_seconds, run.seconds);
        ++cell.runs;
    }
    if (cell.runs) {
        cell.mean_f1 /= static_cast<double>(cell.runs);
        cell.mean_seconds /= static_cast<double>(cell.runs);
    } else {
        cell.min_f1 = 0.0;
    }
    return cell;
}

SynAComparison compare_on_syn_a(std::size_t n_vars, std::uint64_t seed, const SynAConfig& cfg,
                                const LearnerConfig& lcfg) {
    const SynAInstance inst = gen_syn_a(n_vars, seed, cfg);
    SynAComparison c;
    c.vars = n_vars;
    c.seed = seed;
    c.fd_proportion = inst.fd_proportion();

    auto t0 = Clock::now();
    const AugmentedPag xl = learn(inst.data, lcfg);
    c.xlearner_seconds = since(t0);
    c.xlearner = compare_graphs(xl.graph, inst.truth);

    t0 = Clock::now();
    const MixedGraph plain = fci(inst.data, lcfg);
    c.fci_seconds = since(t0);
    c.fci = compare_graphs(plain, inst.truth);
    return c;
}

}  // namespace xda
