#include <algorithm>

#include "xda/error.hpp"
#include "xda/learner.hpp"

namespace xda {

Stage1Result stage1_fd_skeleton(const FDGraph& fd, const Dataset& d) {
    FDGraph g = fd;
    g.compute_depth();

    std::vector<std::string> order;
    for (const auto& c : d.columns())
        if (std::find(g.nodes.begin(), g.nodes.end(), c.name()) != g.nodes.end()) order.push_back(c.name());
    auto position = [&](const std::string& n) {
        return std::find(order.begin(), order.end(), n) - order.begin();
    };

    std::vector<std::string> pending;
    for (const auto& n : order)
        if (!g.is_root(n)) pending.push_back(n);
    // Deepest first; equal depth follows column order.
    std::stable_sort(pending.begin(), pending.end(),
                     [&](const std::string& a, const std::string& b) { return g.depth.at(a) > g.depth.at(b); });

    Stage1Result out;
    out.skeleton = MixedGraph(order);
    for (const auto& x : pending) {
        auto parents = g.parents(x);
        std::sort(parents.begin(), parents.end(),
                  [&](const std::string& a, const std::string& b) { return position(a) < position(b); });
        std::string best;
        std::size_t best_card = SIZE_MAX;
        for (const auto& p : parents) {
            std::size_t card = d.column(p).cardinality();
            if (card < best_card) {
                best_card = card;
                best = p;
            }
        }
        out.skeleton.set_edge(best, x, Mark::Circle, Mark::Circle);
        out.edges.emplace_back(best, x);
    }
    for (const auto& c : d.columns()) {
        const auto& n = c.name();
        if (fd.redundant.count(n)) continue;
        bool in_fd = std::find(order.begin(), order.end(), n) != order.end();
        if (!in_fd || g.is_root(n)) out.remaining.push_back(n);
    }
    return out;
}

MixedGraph orient_fd_edges(const MixedGraph& s2, const FDGraph& fd) {
    MixedGraph g = s2;
    for (auto [u, v] : s2.edges()) {
        const auto& a = s2.name(u);
        const auto& b = s2.name(v);
        if (fd.has_edge(a, b)) g.set_edge(u, v, Mark::Tail, Mark::Arrow);
        else if (fd.has_edge(b, a)) g.set_edge(u, v, Mark::Arrow, Mark::Tail);
        else throw GraphError("skeleton edge " + a + " - " + b + " has no functional dependency");
    }
    return g;
}

namespace {

std::pair<std::string, std::string> ordered(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

nlohmann::json AugmentedPag::to_json() const {
    nlohmann::json j = graph.to_json();
    nlohmann::json fe = nlohmann::json::array();
    auto sorted_fd = fd_edges;
    std::sort(sorted_fd.begin(), sorted_fd.end());
    for (const auto& [a, b] : sorted_fd) fe.push_back({a, b});
    j["fd_edges"] = fe;
    nlohmann::json ss = nlohmann::json::object();
    for (const auto& [k, v] : sepsets) ss[k.first + "," + k.second] = v;
    j["sepsets"] = ss;
    return j;
}

AugmentedPag AugmentedPag::from_json(const nlohmann::json& j) {
    AugmentedPag p;
    p.graph = MixedGraph::from_json(j);
    try {
        if (j.contains("fd_edges"))
            for (const auto& e : j.at("fd_edges"))
                p.fd_edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        if (j.contains("sepsets"))
            for (const auto& [k, v] : j.at("sepsets").items()) {
                auto comma = k.find(',');
                if (comma == std::string::npos) throw GraphError("bad sepset key: " + k);
                p.sepsets[ordered(k.substr(0, comma), k.substr(comma + 1))] = v.get<std::vector<std::string>>();
            }
    } catch (const nlohmann::json::exception& ex) {
        throw GraphError(std::string("malformed graph JSON: ") + ex.what());
    }
    for (auto [u, v] : p.graph.edges()) p.provenance[ordered(p.graph.name(u), p.graph.name(v))] = Provenance::Fci;
    for (const auto& [a, b] : p.fd_edges) {
        if (!p.graph.has_node(a) || !p.graph.has_node(b) || !p.graph.is_directed(p.graph.index(a), p.graph.index(b)))
            throw GraphError("fd edge " + a + " -> " + b + " is not a directed edge of the graph");
        p.provenance[ordered(a, b)] = Provenance::Fd;
    }
    return p;
}

AugmentedPag learn(const Dataset& d, const FDGraph& fd, const LearnerConfig& cfg) {
    cfg.validate();
    const Dataset dd = discretize_measures(d, cfg.bins);

    Stage1Result s1 = stage1_fd_skeleton(fd, dd);
    SkeletonResult sk = fci_skeleton(dd, s1.remaining, cfg);
    MixedGraph g1 = fci_orient(sk.skeleton, sk.sepsets, cfg.path_cap);
    MixedGraph g2 = orient_fd_edges(s1.skeleton, fd);

    AugmentedPag out;
    out.graph = MixedGraph(dd.column_names());
    for (auto [u, v] : g1.edges()) {
        const auto& a = g1.name(u);
        const auto& b = g1.name(v);
        out.graph.set_edge(a, b, g1.mark(v, u), g1.mark(u, v));
        out.provenance[ordered(a, b)] = Provenance::Fci;
    }
    auto add_fd = [&](const std::string& a, const std::string& b) {
        out.graph.set_edge(a, b, Mark::Tail, Mark::Arrow);
        out.fd_edges.emplace_back(a, b);
        out.provenance[ordered(a, b)] = Provenance::Fd;
    };
    for (auto [u, v] : g2.edges()) {
        if (g2.is_directed(u, v)) add_fd(g2.name(u), g2.name(v));
        else add_fd(g2.name(v), g2.name(u));
    }
    for (const auto& [dup, rep] : fd.redundant)
        if (dd.has_column(dup) && dd.has_column(rep)) add_fd(rep, dup);
    for (const auto& [k, s] : sk.sepsets.entries()) {
        std::vector<std::string> names;
        for (int i : s) names.push_back(sk.skeleton.name(i));
        std::sort(names.begin(), names.end());
        out.sepsets[ordered(sk.skeleton.name(k.first), sk.skeleton.name(k.second))] = names;
    }
    return out;
}

AugmentedPag learn(const Dataset& d, const LearnerConfig& cfg) {
    const Dataset dd = discretize_measures(d, cfg.bins);
    return learn(dd, discover_fds(dd), cfg);
}

MixedGraph fci(const Dataset& d, const LearnerConfig& cfg) {
    const Dataset dd = discretize_measures(d, cfg.bins);
    SkeletonResult sk = fci_skeleton(dd, dd.column_names(), cfg);
    return fci_orient(sk.skeleton, sk.sepsets, cfg.path_cap);
}

}  // namespace xda
