#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xda/dataset.hpp"

namespace xda {

/// Functional dependencies among the dimensions of a dataset.
///
/// `edges` holds every detected dependency X -> Y between retained columns,
/// including transitively implied ones. Columns that are mutually determined
/// by an earlier column are not nodes; they appear in `redundant` mapped to
/// their representative.
struct FDGraph {
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    std::map<std::string, int> depth;
    std::map<std::string, std::string> redundant;

    bool has_edge(const std::string& from, const std::string& to) const;
    std::vector<std::string> parents(const std::string& node) const;
    std::vector<std::string> children(const std::string& node) const;
    bool is_root(const std::string& node) const;
    /// Nodes touching at least one FD edge.
    std::vector<std::string> fd_nodes() const;
    bool empty() const { return edges.empty(); }

    /// Recomputes `depth` as the longest path from a root; throws GraphError on a cycle.
    void compute_depth();
    nlohmann::json to_json() const;
};

/// True iff every value of `x` co-occurs with exactly one value of `y`.
bool determines(const Column& x, const Column& y);

FDGraph discover_fds(const Dataset& d);

}  // namespace xda
