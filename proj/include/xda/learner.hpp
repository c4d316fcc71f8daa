#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xda/dataset.hpp"
#include "xda/fd.hpp"
#include "xda/independence.hpp"
#include "xda/mixed_graph.hpp"

namespace xda {

struct LearnerConfig {
    double alpha = 0.05;
    std::size_t max_cond_size = 3;
    std::size_t bins = 5;
    /// Path-length cap for rule searches; 0 picks the default for the graph size.
    std::size_t path_cap = 0;
    bool ext_d_sep_pass = true;
    CiStatistic statistic = CiStatistic::GSquared;

    void validate() const;
};

/// Separating sets keyed by unordered node-index pair.
class SepSetMap {
public:
    void set(int a, int b, std::set<int> s);
    bool contains(int a, int b) const;
    const std::set<int>& get(int a, int b) const;
    std::size_t size() const { return sets_.size(); }
    const std::map<std::pair<int, int>, std::set<int>>& entries() const { return sets_; }

private:
    std::map<std::pair<int, int>, std::set<int>> sets_;
};

/// Answers "is x independent of y given z" over node indices.
using CiOracle = std::function<bool(int x, int y, const std::vector<int>& z)>;

/// Oracle over the categorical columns `vars` of `d` (node i is vars[i]), with a result cache.
CiOracle data_oracle(const Dataset& d, const std::vector<std::string>& vars, const LearnerConfig& cfg);

struct SkeletonResult {
    MixedGraph skeleton;
    SepSetMap sepsets;
};

SkeletonResult fci_skeleton(const std::vector<std::string>& vars, const CiOracle& oracle,
                            const LearnerConfig& cfg = {});
SkeletonResult fci_skeleton(const Dataset& d, const std::vector<std::string>& vars,
                            const LearnerConfig& cfg = {});

/// Unshielded-collider orientation followed by the ten orientation rules to a fixpoint.
MixedGraph fci_orient(const MixedGraph& skeleton, const SepSetMap& sepsets, std::size_t path_cap = 0);

struct Stage1Result {
    MixedGraph skeleton;
    std::vector<std::pair<std::string, std::string>> edges;  ///< (parent, child)
    std::vector<std::string> remaining;
};

Stage1Result stage1_fd_skeleton(const FDGraph& fd, const Dataset& d);
MixedGraph orient_fd_edges(const MixedGraph& s2, const FDGraph& fd);

enum class Provenance { Fci, Fd };

struct AugmentedPag {
    MixedGraph graph;
    std::vector<std::pair<std::string, std::string>> fd_edges;
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> sepsets;
    std::map<std::pair<std::string, std::string>, Provenance> provenance;

    nlohmann::json to_json() const;
    static AugmentedPag from_json(const nlohmann::json& j);
};

/// Measures are discretized in place, FD nodes are linked through stage 1,
/// and the remaining variables go through FCI.
AugmentedPag learn(const Dataset& d, const FDGraph& fd, const LearnerConfig& cfg = {});
AugmentedPag learn(const Dataset& d, const LearnerConfig& cfg = {});

/// Plain FCI over every column, ignoring functional dependencies.
MixedGraph fci(const Dataset& d, const LearnerConfig& cfg = {});

}  // namespace xda
