#include "xda/fd.hpp"

#include <algorithm>
#include <functional>

#include "xda/error.hpp"

namespace xda {

bool FDGraph::has_edge(const std::string& from, const std::string& to) const {
    return std::find(edges.begin(), edges.end(), std::make_pair(from, to)) != edges.end();
}

std::vector<std::string> FDGraph::parents(const std::string& node) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : edges)
        if (b == node) out.push_back(a);
    return out;
}

std::vector<std::string> FDGraph::children(const std::string& node) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : edges)
        if (a == node) out.push_back(b);
    return out;
}

bool FDGraph::is_root(const std::string& node) const { return parents(node).empty(); }

std::vector<std::string> FDGraph::fd_nodes() const {
    std::vector<std::string> out;
    for (const auto& n : nodes)
        if (std::any_of(edges.begin(), edges.end(),
                        [&](const auto& e) { return e.first == n || e.second == n; }))
            out.push_back(n);
    return out;
}

void FDGraph::compute_depth() {
    depth.clear();
    std::map<std::string, int> state;
    std::function<int(const std::string&)> visit = [&](const std::string& n) -> int {
        auto& s = state[n];
        if (s == 1) throw GraphError("functional dependency graph has a cycle at " + n);
        if (s == 2) return depth.at(n);
        s = 1;
        int d = 0;
        for (const auto& p : parents(n)) d = std::max(d, visit(p) + 1);
        state[n] = 2;
        depth[n] = d;
        return d;
    };
    for (const auto& n : nodes) visit(n);
}

nlohmann::json FDGraph::to_json() const {
    nlohmann::json e = nlohmann::json::array();
    for (const auto& [a, b] : edges) e.push_back({a, b});
    return {{"nodes", nodes}, {"edges", e}, {"depth", depth}, {"redundant", redundant}};
}

bool determines(const Column& x, const Column& y) {
    constexpr std::uint32_t unset = UINT32_MAX;
    std::vector<std::uint32_t> image(x.cardinality(), unset);
    auto xc = x.codes();
    auto yc = y.codes();
    for (std::size_t r = 0; r < xc.size(); ++r) {
        auto& slot = image[xc[r]];
        if (slot == unset) slot = yc[r];
        else if (slot != yc[r]) return false;
    }
    return true;
}

FDGraph discover_fds(const Dataset& d) {
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < d.column_count(); ++i)
        if (d.column(i).is_dimension()) dims.push_back(i);

    const std::size_t k = dims.size();
    std::vector<std::vector<char>> det(k, std::vector<char>(k, 0));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if (a != b) det[a][b] = determines(d.column(dims[a]), d.column(dims[b]));

    FDGraph g;
    std::vector<char> dropped(k, 0);
    for (std::size_t a = 0; a < k; ++a) {
        if (dropped[a]) continue;
        for (std::size_t b = a + 1; b < k; ++b)
            if (!dropped[b] && det[a][b] && det[b][a]) {
                dropped[b] = 1;
                g.redundant[d.column(dims[b]).name()] = d.column(dims[a]).name();
            }
    }
    for (std::size_t a = 0; a < k; ++a)
        if (!dropped[a]) g.nodes.push_back(d.column(dims[a]).name());
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if (!dropped[a] && !dropped[b] && det[a][b])
                g.edges.emplace_back(d.column(dims[a]).name(), d.column(dims[b]).name());
    g.compute_depth();
    return g;
}

}  // namespace xda
