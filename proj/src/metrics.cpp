#include <algorithm>
#include <set>
#include <tuple>

#include "xda/synth.hpp"

namespace xda {

namespace {

using NamedPair = std::pair<std::string, std::string>;

std::set<NamedPair> adjacency_set(const MixedGraph& g) {
    std::set<NamedPair> out;
    for (auto [u, v] : g.edges()) out.insert(std::minmax(g.name(u), g.name(v)));
    return out;
}

// Arrowheads as (tail end, head end) name pairs.
std::set<NamedPair> arrowhead_set(const MixedGraph& g) {
    std::set<NamedPair> out;
    for (auto [u, v] : g.edges()) {
        if (g.mark(u, v) == Mark::Arrow) out.emplace(g.name(u), g.name(v));
        if (g.mark(v, u) == Mark::Arrow) out.emplace(g.name(v), g.name(u));
    }
    return out;
}

template <typename Set>
std::size_t overlap(const Set& a, const Set& b) {
    std::size_t n = 0;
    for (const auto& x : a) n += b.count(x);
    return n;
}

double f1_of(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

}  // namespace

GraphScore compare_graphs(const MixedGraph& estimated, const MixedGraph& truth) {
    const auto ea = adjacency_set(estimated), ta = adjacency_set(truth);
    const auto eh = arrowhead_set(estimated), th = arrowhead_set(truth);
    const double correct = static_cast<double>(overlap(ea, ta) + overlap(eh, th));
    const double asserted = static_cast<double>(ea.size() + eh.size());
    const double actual = static_cast<double>(ta.size() + th.size());
    GraphScore s;
    s.precision = asserted > 0 ? correct / asserted : (actual == 0 ? 1.0 : 0.0);
    s.recall = actual > 0 ? correct / actual : (asserted == 0 ? 1.0 : 0.0);
    s.f1 = f1_of(s.precision, s.recall);
    return s;
}

SetScore compare_sets(const std::vector<std::string>& found, const std::vector<std::string>& truth) {
    const std::set<std::string> f(found.begin(), found.end()), t(truth.begin(), truth.end());
    const double hit = static_cast<double>(overlap(f, t));
    SetScore s;
    s.precision = f.empty() ? 0.0 : hit / static_cast<double>(f.size());
    s.recall = t.empty() ? 0.0 : hit / static_cast<double>(t.size());
    s.f1 = f1_of(s.precision, s.recall);
    return s;
}

}  // namespace xda
