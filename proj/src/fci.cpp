#include <algorithm>
#include <memory>
#include <unordered_map>

#include "xda/error.hpp"
#include "xda/learner.hpp"

namespace xda {

void LearnerConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
    if (bins < 2) throw Error("bins must be at least 2");
}

namespace {

std::pair<int, int> key(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

// Calls f on every size-k subset of items (lexicographic order) until f returns true.
template <class F>
bool any_subset(const std::vector<int>& items, std::size_t k, F f) {
    if (k > items.size()) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<int> subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
        if (f(subset)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

void SepSetMap::set(int a, int b, std::set<int> s) { sets_[key(a, b)] = std::move(s); }
bool SepSetMap::contains(int a, int b) const { return sets_.count(key(a, b)) > 0; }
const std::set<int>& SepSetMap::get(int a, int b) const {
    auto it = sets_.find(key(a, b));
    if (it == sets_.end()) throw GraphError("no separating set recorded for pair");
    return it->second;
}

CiOracle data_oracle(const Dataset& d, const std::vector<std::string>& vars, const LearnerConfig& cfg) {
    std::vector<const Column*> cols;
    for (const auto& v : vars) cols.push_back(&d.column(v));
    CiOptions opts;
    opts.alpha = cfg.alpha;
    opts.statistic = cfg.statistic;
    auto cache = std::make_shared<std::map<std::vector<int>, bool>>();
    return [cols, opts, cache](int x, int y, const std::vector<int>& z) {
        std::vector<int> k{std::min(x, y), std::max(x, y)};
        std::vector<int> zs = z;
        std::sort(zs.begin(), zs.end());
        k.insert(k.end(), zs.begin(), zs.end());
        if (auto it = cache->find(k); it != cache->end()) return it->second;
        std::vector<const Column*> zc;
        for (int i : zs) zc.push_back(cols[i]);
        bool indep = ci_test(*cols[k[0]], *cols[k[1]], zc, opts).independent;
        cache->emplace(std::move(k), indep);
        return indep;
    };
}

SkeletonResult fci_skeleton(const std::vector<std::string>& vars, const CiOracle& oracle,
                            const LearnerConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(vars.size());
    MixedGraph g(vars);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.set_edge(u, v, Mark::Circle, Mark::Circle);
    SepSetMap sep;

    for (std::size_t level = 0; level <= cfg.max_cond_size; ++level) {
        std::vector<std::vector<int>> adj(n);
        for (int v = 0; v < n; ++v) adj[v] = g.neighbors(v);
        bool any_testable = false;
        std::vector<std::pair<int, int>> removals;
        for (int x = 0; x < n; ++x)
            for (int y : adj[x]) {
                if (sep.contains(x, y)) continue;
                std::vector<int> cand;
                for (int v : adj[x])
                    if (v != y) cand.push_back(v);
                if (cand.size() < level) continue;
                any_testable = true;
                any_subset(cand, level, [&](const std::vector<int>& s) {
                    if (!oracle(x, y, s)) return false;
                    sep.set(x, y, std::set<int>(s.begin(), s.end()));
                    removals.emplace_back(x, y);
                    return true;
                });
            }
        for (auto [x, y] : removals) g.remove_edge(x, y);
        if (!any_testable) break;
    }

    if (cfg.ext_d_sep_pass && g.edge_count() > 0) {
        MixedGraph oriented = g;
        for (int b = 0; b < n; ++b) {
            auto nb = g.neighbors(b);
            for (std::size_t i = 0; i < nb.size(); ++i)
                for (std::size_t j = i + 1; j < nb.size(); ++j) {
                    int a = nb[i], c = nb[j];
                    if (g.adjacent(a, c) || !sep.contains(a, c) || sep.get(a, c).count(b)) continue;
                    oriented.set_mark(a, b, Mark::Arrow);
                    oriented.set_mark(c, b, Mark::Arrow);
                }
        }
        std::vector<std::pair<int, int>> removals;
        for (auto [x, y] : g.edges()) {
            auto pool = ext_d_sep(oriented, x, y);
            std::vector<int> items(pool.begin(), pool.end());
            for (std::size_t k = 0; k <= std::min(cfg.max_cond_size, items.size()); ++k) {
                bool done = any_subset(items, k, [&](const std::vector<int>& s) {
                    if (!oracle(x, y, s)) return false;
                    sep.set(x, y, std::set<int>(s.begin(), s.end()));
                    removals.emplace_back(x, y);
                    return true;
                });
                if (done) break;
            }
        }
        for (auto [x, y] : removals) g.remove_edge(x, y);
    }
    return {g.skeleton(), std::move(sep)};
}

SkeletonResult fci_skeleton(const Dataset& d, const std::vector<std::string>& vars, const LearnerConfig& cfg) {
    return fci_skeleton(vars, data_oracle(d, vars, cfg), cfg);
}

namespace {

class Orienter {
public:
    Orienter(MixedGraph& g, const SepSetMap& sep, std::size_t cap) : g_(g), sep_(sep), cap_(cap) {
        n_ = static_cast<int>(g.size());
    }

    void colliders() {
        const MixedGraph before = g_;
        for (int b = 0; b < n_; ++b) {
            auto nb = before.neighbors(b);
            for (std::size_t i = 0; i < nb.size(); ++i)
                for (std::size_t j = i + 1; j < nb.size(); ++j) {
                    int a = nb[i], c = nb[j];
                    if (before.adjacent(a, c) || !sep_.contains(a, c) || sep_.get(a, c).count(b)) continue;
                    g_.set_mark(a, b, Mark::Arrow);
                    g_.set_mark(c, b, Mark::Arrow);
                }
        }
    }

    void run() {
        colliders();
        while (true) {
            while (r1() | r2() | r3() | r4()) {
            }
            bool later = false;
            while (r5() | r6() | r7() | r8() | r9() | r10()) later = true;
            if (!later) break;
        }
    }

private:
    Mark m(int u, int v) const { return g_.mark(u, v); }
    bool adj(int u, int v) const { return g_.adjacent(u, v); }
    bool set(int u, int v, Mark mk) {
        if (m(u, v) == mk) return false;
        g_.set_mark(u, v, mk);
        return true;
    }

    bool r1() {
        bool changed = false;
        for (int b = 0; b < n_; ++b)
            for (int a : g_.neighbors(b)) {
                if (m(a, b) != Mark::Arrow) continue;
                for (int c : g_.neighbors(b)) {
                    if (c == a || adj(a, c) || m(c, b) != Mark::Circle) continue;
                    changed |= set(c, b, Mark::Tail);
                    changed |= set(b, c, Mark::Arrow);
                }
            }
        return changed;
    }

    bool r2() {
        bool changed = false;
        for (int a = 0; a < n_; ++a)
            for (int c : g_.neighbors(a)) {
                if (m(a, c) != Mark::Circle) continue;
                for (int b : g_.neighbors(a)) {
                    if (b == c || !adj(b, c)) continue;
                    bool first = g_.is_directed(a, b) && m(b, c) == Mark::Arrow;
                    bool second = m(a, b) == Mark::Arrow && g_.is_directed(b, c);
                    if (first || second) {
                        changed |= set(a, c, Mark::Arrow);
                        break;
                    }
                }
            }
        return changed;
    }

    bool r3() {
        bool changed = false;
        for (int b = 0; b < n_; ++b) {
            auto nb = g_.neighbors(b);
            for (int t : nb) {
                if (m(t, b) != Mark::Circle) continue;
                bool fire = false;
                for (std::size_t i = 0; i < nb.size() && !fire; ++i)
                    for (std::size_t j = i + 1; j < nb.size() && !fire; ++j) {
                        int a = nb[i], c = nb[j];
                        if (a == t || c == t || adj(a, c)) continue;
                        if (m(a, b) != Mark::Arrow || m(c, b) != Mark::Arrow) continue;
                        if (!adj(a, t) || !adj(c, t)) continue;
                        fire = m(a, t) == Mark::Circle && m(c, t) == Mark::Circle;
                    }
                if (fire) changed |= set(t, b, Mark::Arrow);
            }
        }
        return changed;
    }

    bool r4() {
        bool changed = false;
        for (int b = 0; b < n_; ++b)
            for (int c : g_.neighbors(b)) {
                if (m(c, b) != Mark::Circle) continue;
                for (int a : g_.neighbors(b)) {
                    if (a == c || !adj(a, c)) continue;
                    auto paths = find_discriminating_paths(g_, a, b, c, cap_, 1);
                    if (paths.empty()) continue;
                    const int theta = paths.front().front();
                    if (!sep_.contains(theta, c)) continue;
                    if (sep_.get(theta, c).count(b)) {
                        changed |= set(c, b, Mark::Tail);
                        changed |= set(b, c, Mark::Arrow);
                    } else {
                        changed |= set(a, b, Mark::Arrow);
                        changed |= set(b, a, Mark::Arrow);
                        changed |= set(c, b, Mark::Arrow);
                        changed |= set(b, c, Mark::Arrow);
                    }
                    break;
                }
            }
        return changed;
    }

    bool circle_circle(int u, int v) const { return m(u, v) == Mark::Circle && m(v, u) == Mark::Circle; }

    bool r5() {
        bool changed = false;
        for (auto [a, b] : g_.edges()) {
            if (!circle_circle(a, b)) continue;
            for (int c : g_.neighbors(a)) {
                if (c == b || !circle_circle(a, c) || adj(c, b)) continue;
                for (int t : g_.neighbors(b)) {
                    if (t == a || t == c || !circle_circle(b, t) || adj(a, t)) continue;
                    auto paths = find_uncovered_circle_paths(g_, c, t, cap_, SIZE_MAX);
                    for (auto& inner : paths) {
                        if (std::find(inner.begin(), inner.end(), a) != inner.end() ||
                            std::find(inner.begin(), inner.end(), b) != inner.end())
                            continue;
                        Path p{a};
                        p.insert(p.end(), inner.begin(), inner.end());
                        p.push_back(b);
                        if (!uncovered(p)) continue;
                        set(a, b, Mark::Tail);
                        set(b, a, Mark::Tail);
                        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
                            set(p[i], p[i + 1], Mark::Tail);
                            set(p[i + 1], p[i], Mark::Tail);
                        }
                        changed = true;
                        break;
                    }
                    if (!circle_circle(a, b)) break;
                }
                if (!circle_circle(a, b)) break;
            }
        }
        return changed;
    }

    bool uncovered(const Path& p) const {
        for (std::size_t i = 1; i + 1 < p.size(); ++i)
            if (adj(p[i - 1], p[i + 1])) return false;
        return true;
    }

    bool r6() {
        bool changed = false;
        for (int b = 0; b < n_; ++b) {
            bool has_undirected = false;
            for (int a : g_.neighbors(b))
                has_undirected |= m(a, b) == Mark::Tail && m(b, a) == Mark::Tail;
            if (!has_undirected) continue;
            for (int c : g_.neighbors(b))
                if (m(c, b) == Mark::Circle) changed |= set(c, b, Mark::Tail);
        }
        return changed;
    }

    bool r7() {
        bool changed = false;
        for (int b = 0; b < n_; ++b)
            for (int a : g_.neighbors(b)) {
                if (!(m(b, a) == Mark::Tail && m(a, b) == Mark::Circle)) continue;
                for (int c : g_.neighbors(b))
                    if (c != a && !adj(a, c) && m(c, b) == Mark::Circle) changed |= set(c, b, Mark::Tail);
            }
        return changed;
    }

    bool circle_arrow(int a, int c) const { return m(c, a) == Mark::Circle && m(a, c) == Mark::Arrow; }

    bool r8() {
        bool changed = false;
        for (int a = 0; a < n_; ++a)
            for (int c : g_.neighbors(a)) {
                if (!circle_arrow(a, c)) continue;
                for (int b : g_.neighbors(a)) {
                    if (b == c || !g_.is_directed(b, c)) continue;
                    bool via = g_.is_directed(a, b) || (m(b, a) == Mark::Tail && m(a, b) == Mark::Circle);
                    if (via) {
                        changed |= set(c, a, Mark::Tail);
                        break;
                    }
                }
            }
        return changed;
    }

    bool pd(int u, int v) const { return m(v, u) != Mark::Arrow && m(u, v) != Mark::Tail; }

    bool r9() {
        bool changed = false;
        for (int a = 0; a < n_; ++a)
            for (int c : g_.neighbors(a)) {
                if (!circle_arrow(a, c)) continue;
                for (int b : g_.neighbors(a)) {
                    if (b == c || adj(b, c) || !pd(a, b)) continue;
                    if (uncovered_path_exists(g_, Path{a, b}, c, PathKind::PotentiallyDirected, cap_)) {
                        changed |= set(c, a, Mark::Tail);
                        break;
                    }
                }
            }
        return changed;
    }

    bool r10() {
        bool changed = false;
        for (int a = 0; a < n_; ++a)
            for (int c : g_.neighbors(a)) {
                if (!circle_arrow(a, c)) continue;
                std::vector<int> pars;
                for (int p : g_.parents(c))
                    if (p != a) pars.push_back(p);
                if (pars.size() < 2) continue;
                // firsts[i]: neighbours mu of a starting an uncovered p.d. path a, mu, ..., pars[i]
                std::vector<std::vector<int>> firsts(pars.size());
                for (std::size_t i = 0; i < pars.size(); ++i)
                    for (int mu : g_.neighbors(a)) {
                        if (mu == c || !pd(a, mu)) continue;
                        if (mu == pars[i] ||
                            uncovered_path_exists(g_, Path{a, mu}, pars[i], PathKind::PotentiallyDirected, cap_))
                            firsts[i].push_back(mu);
                    }
                bool fire = false;
                for (std::size_t i = 0; i < pars.size() && !fire; ++i)
                    for (std::size_t j = i + 1; j < pars.size() && !fire; ++j)
                        for (int mu : firsts[i])
                            for (int om : firsts[j])
                                if (mu != om && !adj(mu, om)) fire = true;
                if (fire) changed |= set(c, a, Mark::Tail);
            }
        return changed;
    }

    MixedGraph& g_;
    const SepSetMap& sep_;
    std::size_t cap_;
    int n_ = 0;
};

}  // namespace

MixedGraph fci_orient(const MixedGraph& skeleton, const SepSetMap& sepsets, std::size_t path_cap) {
    MixedGraph g = skeleton.skeleton();
    Orienter o(g, sepsets, path_cap == 0 ? default_path_cap(g.size()) : path_cap);
    o.run();
    return g;
}

}  // namespace xda
