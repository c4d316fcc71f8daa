#include "xda/translator.hpp"

#include <algorithm>
#include <deque>

#include "xda/error.hpp"

namespace xda {

const char* to_string(Semantics s) {
    switch (s) {
        case Semantics::NoExplainability: return "NoExplainability";
        case Semantics::CausalExplanation: return "CausalExplanation";
        case Semantics::NonCausalExplanation: return "NonCausalExplanation";
    }
    return "?";
}

bool almost_ancestor(const MixedGraph& g, int x, int target) {
    std::vector<char> seen(g.size(), 0);
    std::deque<int> queue{x};
    seen[x] = 1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : g.neighbors(u)) {
            if (seen[v] || g.mark(u, v) != Mark::Arrow) continue;
            Mark tail = g.mark(v, u);
            if (tail != Mark::Tail && tail != Mark::Circle) continue;
            if (v == target) return true;
            seen[v] = 1;
            queue.push_back(v);
        }
    }
    return false;
}

XdaSemantics classify_variable(const MixedGraph& g, const std::string& x, const std::string& measure,
                               const std::string& foreground, const std::vector<std::string>& background) {
    if (x == measure || x == foreground || std::find(background.begin(), background.end(), x) != background.end())
        throw QueryError("variable " + x + " is part of the query itself");
    const int xi = g.index(x);
    const int mi = g.index(measure);
    std::set<int> z{g.index(foreground)};
    for (const auto& b : background) z.insert(g.index(b));
    z.erase(xi);
    z.erase(mi);

    if (m_separated_conservative(g, xi, mi, z)) return {Semantics::NoExplainability, 1};
    if (g.is_directed(xi, mi)) return {Semantics::CausalExplanation, 2};
    if (g.ancestors(mi).count(xi)) return {Semantics::CausalExplanation, 3};
    if (g.mark(mi, xi) == Mark::Circle && g.mark(xi, mi) == Mark::Arrow) return {Semantics::CausalExplanation, 4};
    if (almost_ancestor(g, xi, mi)) return {Semantics::CausalExplanation, 5};
    return {Semantics::NonCausalExplanation, 6};
}

std::map<std::string, XdaSemantics> translate(const MixedGraph& g, const std::string& measure,
                                              const std::string& foreground,
                                              const std::vector<std::string>& background) {
    std::map<std::string, XdaSemantics> out;
    for (const auto& n : g.nodes()) {
        if (n == measure || n == foreground ||
            std::find(background.begin(), background.end(), n) != background.end())
            continue;
        out[n] = classify_variable(g, n, measure, foreground, background);
    }
    return out;
}

nlohmann::json translation_to_json(const std::map<std::string, XdaSemantics>& t) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, s] : t) j[name] = {{"semantics", to_string(s.semantics)}, {"rule", s.rule_name()}};
    return j;
}

}  // namespace xda
