#include <algorithm>
#include <deque>

#include "xda/mixed_graph.hpp"

namespace xda {

namespace {

bool on_path(const Path& p, int v) { return std::find(p.begin(), p.end(), v) != p.end(); }

bool pd_edge(const MixedGraph& g, int a, int b) {
    return g.mark(b, a) != Mark::Arrow && g.mark(a, b) != Mark::Tail;
}

bool circle_edge(const MixedGraph& g, int a, int b) {
    return g.mark(a, b) == Mark::Circle && g.mark(b, a) == Mark::Circle;
}

// Extends `path` depth-first until it reaches `to`. Returns false once `visit` asks to stop.
template <class EdgeOk, class Visit>
bool extend(const MixedGraph& g, Path& path, int to, EdgeOk edge_ok, bool uncovered, std::size_t max_len,
            Visit& visit) {
    const int cur = path.back();
    if (cur == to) return visit(path);
    if (path.size() >= max_len) return true;
    for (int next : g.neighbors(cur)) {
        if (on_path(path, next) || !edge_ok(cur, next)) continue;
        if (uncovered && path.size() >= 2 && g.adjacent(path[path.size() - 2], next)) continue;
        path.push_back(next);
        bool go_on = extend(g, path, to, edge_ok, uncovered, max_len, visit);
        path.pop_back();
        if (!go_on) return false;
    }
    return true;
}

template <class EdgeOk>
std::vector<Path> collect(const MixedGraph& g, int from, int to, EdgeOk edge_ok, std::size_t max_len,
                          std::size_t max_paths) {
    std::vector<Path> out;
    if (from == to || max_paths == 0) return out;
    if (max_len == 0) max_len = default_path_cap(g.size());
    Path path{from};
    auto visit = [&](const Path& p) {
        out.push_back(p);
        return out.size() < max_paths;
    };
    extend(g, path, to, edge_ok, true, max_len, visit);
    return out;
}

}  // namespace

std::size_t default_path_cap(std::size_t node_count) { return node_count <= 30 ? node_count : 8; }

std::set<int> possible_d_sep(const MixedGraph& g, int x, int y) {
    std::set<int> found;
    std::set<std::pair<int, int>> seen;
    std::deque<std::pair<int, int>> queue;
    for (int w : g.neighbors(x)) {
        found.insert(w);
        seen.emplace(x, w);
        queue.emplace_back(x, w);
    }
    while (!queue.empty()) {
        auto [prev, cur] = queue.front();
        queue.pop_front();
        for (int next : g.neighbors(cur)) {
            if (next == prev || next == x) continue;
            const bool collider = g.mark(prev, cur) == Mark::Arrow && g.mark(next, cur) == Mark::Arrow;
            const bool marked_noncollider = g.mark(prev, cur) == Mark::Tail || g.mark(next, cur) == Mark::Tail;
            const bool triangle = g.adjacent(prev, next);
            if (!collider && !(triangle && !marked_noncollider)) continue;
            if (seen.emplace(cur, next).second) {
                found.insert(next);
                queue.emplace_back(cur, next);
            }
        }
    }
    found.erase(x);
    found.erase(y);
    return found;
}

std::set<int> ext_d_sep(const MixedGraph& g, int x, int y) {
    auto a = possible_d_sep(g, x, y);
    auto b = possible_d_sep(g, y, x);
    a.insert(b.begin(), b.end());
    return a;
}

std::vector<Path> find_discriminating_paths(const MixedGraph& g, int alpha, int beta, int gamma,
                                            std::size_t max_len, std::size_t max_paths) {
    std::vector<Path> out;
    if (!g.adjacent(alpha, beta) || !g.adjacent(beta, gamma) || !g.adjacent(alpha, gamma)) return out;
    if (!g.is_directed(alpha, gamma) || g.mark(beta, alpha) != Mark::Arrow) return out;
    if (max_len == 0) max_len = default_path_cap(g.size());

    // Paths are built backwards: reversed = [gamma, beta, alpha, ...].
    std::deque<Path> queue{{gamma, beta, alpha}};
    while (!queue.empty() && out.size() < max_paths) {
        Path p = std::move(queue.front());
        queue.pop_front();
        const int cur = p.back();
        if (p.size() >= max_len) continue;
        for (int w : g.neighbors(cur)) {
            if (on_path(p, w) || g.mark(w, cur) != Mark::Arrow) continue;
            if (!g.adjacent(w, gamma)) {
                Path found(p.rbegin(), p.rend());
                found.insert(found.begin(), w);
                out.push_back(std::move(found));
                if (out.size() >= max_paths) break;
            } else if (g.mark(cur, w) == Mark::Arrow && g.is_directed(w, gamma)) {
                Path next = p;
                next.push_back(w);
                queue.push_back(std::move(next));
            }
        }
    }
    return out;
}

bool uncovered_path_exists(const MixedGraph& g, const Path& prefix, int to, PathKind kind,
                           std::size_t max_len) {
    if (prefix.empty()) return false;
    if (max_len == 0) max_len = default_path_cap(g.size());
    bool found = false;
    auto visit = [&](const Path&) {
        found = true;
        return false;
    };
    Path path = prefix;
    if (kind == PathKind::Circle)
        extend(g, path, to, [&](int a, int b) { return circle_edge(g, a, b); }, true, max_len, visit);
    else
        extend(g, path, to, [&](int a, int b) { return pd_edge(g, a, b); }, true, max_len, visit);
    return found;
}

std::vector<Path> find_uncovered_pd_paths(const MixedGraph& g, int from, int to, std::size_t max_len,
                                          std::size_t max_paths) {
    return collect(g, from, to, [&](int a, int b) { return pd_edge(g, a, b); }, max_len, max_paths);
}

std::vector<Path> find_uncovered_circle_paths(const MixedGraph& g, int from, int to, std::size_t max_len,
                                              std::size_t max_paths) {
    return collect(g, from, to, [&](int a, int b) { return circle_edge(g, a, b); }, max_len, max_paths);
}

}  // namespace xda
