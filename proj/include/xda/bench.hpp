#pragma once

#include <cstdint>
#include <vector>

#include "xda/learner.hpp"
#include "xda/synth.hpp"

namespace xda {

/// The generating structure of a SYN-B instance: X -> Y -> Z.
MixedGraph syn_b_graph();

struct SynBRun {
    double f1 = 0.0;
    double seconds = 0.0;
    bool answered = false;
};

/// Explains the templated query and scores the top explanation against the injected filters.
SynBRun run_syn_b(const SynBInstance& inst, Aggregate agg);

struct SynBCell {
    SynBConfig config;
    Aggregate agg = Aggregate::Sum;
    std::size_t runs = 0;
    double mean_f1 = 0.0;
    double min_f1 = 0.0;
    double mean_seconds = 0.0;
    double max_seconds = 0.0;
};

SynBCell run_syn_b_cell(const SynBConfig& cfg, Aggregate agg, const std::vector<std::uint64_t>& seeds);

struct SynAComparison {
    std::size_t vars = 0;
    std::uint64_t seed = 0;
    double fd_proportion = 0.0;
    GraphScore xlearner;
    GraphScore fci;
    double xlearner_seconds = 0.0;
    double fci_seconds = 0.0;
};

SynAComparison compare_on_syn_a(std::size_t n_vars, std::uint64_t seed, const SynAConfig& cfg,
                                const LearnerConfig& lcfg = {});

}  // namespace xda
