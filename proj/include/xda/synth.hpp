#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "xda/dataset.hpp"
#include "xda/explainer.hpp"
#include "xda/fd.hpp"
#include "xda/mixed_graph.hpp"

namespace xda {

using Rng = std::mt19937_64;

std::vector<double> sample_dirichlet(Rng& rng, std::size_t k, double concentration);
std::size_t sample_categorical(Rng& rng, const std::vector<double>& probs);

struct SynAConfig {
    std::size_t rows = 5000;
    /// Expected number of neighbours per node in the random DAG.
    double expected_degree = 2.0;
    /// Overrides expected_degree when set (probability of each forward edge).
    std::optional<double> edge_probability;
    std::size_t min_cardinality = 2;
    std::size_t max_cardinality = 4;
    double dirichlet = 1.0;
    double mask_fraction = 0.05;
    /// Share of observed leaves that receive FD children.
    double fd_leaf_fraction = 1.0;
    std::size_t fd_children_per_leaf = 2;

    nlohmann::json to_json() const;
};

struct SynAInstance {
    Dataset data;
    MixedGraph dag;  ///< generating DAG over all variables, masked ones included
    MixedGraph truth;
    FDGraph fd;
    std::vector<std::string> masked;
    std::uint64_t seed = 0;
    SynAConfig config;

    /// Share of dataset columns that are FD children.
    double fd_proportion() const;
};

SynAInstance gen_syn_a(std::size_t n_vars, std::uint64_t seed, const SynAConfig& cfg = {});

/// PAG of the MAG over `observed`, from d-separation in `dag` and the full orientation rules.
MixedGraph oracle_pag(const MixedGraph& dag, const std::vector<std::string>& observed);

struct SynBConfig {
    std::size_t rows = 10000;
    std::size_t cardinality = 10;
    std::size_t k = 3;
    double mu = 10.0;
    double mu_star = 60.0;
    double stddev = 10.0;
    /// Odds boost of ground-truth values of Y under X = x1.
    double boost = 4.0;
    /// Upper bound on the share of abnormal rows under X = x1.
    double max_truth_share = 0.5;

    nlohmann::json to_json() const;
};

struct SynBInstance {
    Dataset data;
    std::vector<std::string> truth;
    SynBConfig config;
    std::uint64_t seed = 0;

    WhyQuery query(Aggregate agg) const;
    nlohmann::json truth_json() const;
};

SynBInstance gen_syn_b(const SynBConfig& cfg, std::uint64_t seed);

/// City -> State -> Country lookup table with uniformly drawn cities.
Dataset gen_cityinfo(std::size_t rows, std::uint64_t seed, std::size_t cities = 50, std::size_t states = 10,
                     std::size_t countries = 3);

struct GraphScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Adjacency plus arrowhead-endpoint agreement between an estimate and the truth.
GraphScore compare_graphs(const MixedGraph& estimated, const MixedGraph& truth);

struct SetScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

SetScore compare_sets(const std::vector<std::string>& found, const std::vector<std::string>& truth);

}  // namespace xda
