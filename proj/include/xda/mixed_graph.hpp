#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace xda {

enum class Mark : std::uint8_t { None, Tail, Arrow, Circle };

const char* to_string(Mark m);
Mark parse_mark(const std::string& text);

/// Directed mixed graph with endpoint marks, stored as a dense mark matrix.
///
/// `mark(u, v)` is the mark at the `v` end of the edge between `u` and `v`
/// (Mark::None when not adjacent). So `u -> v` reads mark(v, u) == Tail and
/// mark(u, v) == Arrow.
class MixedGraph {
public:
    MixedGraph() = default;
    explicit MixedGraph(std::vector<std::string> nodes);

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& nodes() const { return names_; }
    const std::string& name(int v) const { return names_.at(static_cast<std::size_t>(v)); }
    int index(const std::string& name) const;
    std::optional<int> find(const std::string& name) const;
    bool has_node(const std::string& name) const { return find(name).has_value(); }
    int add_node(const std::string& name);

    Mark mark(int u, int v) const { return marks_[static_cast<std::size_t>(u) * n_ + v]; }
    void set_mark(int u, int v, Mark m);
    bool adjacent(int u, int v) const { return u != v && mark(u, v) != Mark::None; }
    /// Adds or replaces the edge; `at_u` and `at_v` are the marks at each end.
    void set_edge(int u, int v, Mark at_u, Mark at_v);
    void set_edge(const std::string& u, const std::string& v, Mark at_u, Mark at_v);
    void remove_edge(int u, int v);
    std::vector<int> neighbors(int v) const;
    std::size_t edge_count() const;
    /// Each edge once as (u, v) with u < v by index.
    std::vector<std::pair<int, int>> edges() const;

    bool is_directed(int u, int v) const { return mark(v, u) == Mark::Tail && mark(u, v) == Mark::Arrow; }
    bool is_bidirected(int u, int v) const { return mark(v, u) == Mark::Arrow && mark(u, v) == Mark::Arrow; }
    bool has_circles() const;
    bool is_collider(int a, int b, int c) const;

    std::vector<int> parents(int v) const;
    std::vector<int> children(int v) const;
    /// Strict ancestors / descendants along tail-to-arrow edges.
    std::set<int> ancestors(int v) const;
    std::set<int> descendants(int v) const;
    /// Nodes with a potentially directed path (no arrowhead against the direction) to v.
    std::set<int> possible_ancestors(int v) const;

    MixedGraph skeleton() const;
    /// Subgraph on the given nodes, in the order supplied.
    MixedGraph induced(const std::vector<std::string>& keep) const;

    nlohmann::json to_json() const;
    static MixedGraph from_json(const nlohmann::json& j);

    bool operator==(const MixedGraph& other) const;

private:
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::vector<Mark> marks_;
    std::size_t n_ = 0;
};

MixedGraph skeleton_of(const MixedGraph& g);

/// m-separation on a MAG; throws GraphError if circle marks are present.
bool m_separated(const MixedGraph& g, int x, int y, const std::set<int>& z);
bool m_separated(const MixedGraph& g, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z);
/// Separation that must hold under every reading of circle marks: a circle
/// never blocks a path. Equals m_separated on graphs without circles.
bool m_separated_conservative(const MixedGraph& g, int x, int y, const std::set<int>& z);
bool m_separated_conservative(const MixedGraph& g, const std::string& x, const std::string& y,
                              const std::vector<std::string>& z);

std::set<int> possible_d_sep(const MixedGraph& g, int x, int y);
std::set<int> ext_d_sep(const MixedGraph& g, int x, int y);

using Path = std::vector<int>;

/// Default cap on path length (in nodes) for the path finders.
std::size_t default_path_cap(std::size_t node_count);

/// Discriminating paths (theta, ..., alpha, beta, gamma) for beta, ending with the given triple.
std::vector<Path> find_discriminating_paths(const MixedGraph& g, int alpha, int beta, int gamma,
                                            std::size_t max_len = 0, std::size_t max_paths = SIZE_MAX);
std::vector<Path> find_uncovered_pd_paths(const MixedGraph& g, int from, int to,
                                          std::size_t max_len = 0, std::size_t max_paths = SIZE_MAX);
std::vector<Path> find_uncovered_circle_paths(const MixedGraph& g, int from, int to,
                                              std::size_t max_len = 0, std::size_t max_paths = SIZE_MAX);

enum class PathKind { PotentiallyDirected, Circle };

/// True if an uncovered path of the given kind extends `prefix` to `to`.
/// The prefix must already satisfy the kind and uncovered constraints.
bool uncovered_path_exists(const MixedGraph& g, const Path& prefix, int to, PathKind kind,
                           std::size_t max_len = 0);

/// Ancestral with no directed or almost directed cycle, arrow/tail marks only,
/// and (for at most 12 nodes) maximal.
bool validate_mag(const MixedGraph& g);
bool has_directed_cycle(const MixedGraph& g);

}  // namespace xda
