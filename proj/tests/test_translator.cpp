#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "xda/error.hpp"
#include "xda/translator.hpp"

using namespace xda;

namespace {

constexpr Mark T = Mark::Tail;
constexpr Mark A = Mark::Arrow;
constexpr Mark C = Mark::Circle;

// Location o-> Smoking <-o Stress, Smoking -> LungCancer -> Surgery, LungCancer -> Survival.
MixedGraph lung_cancer_pag() {
    MixedGraph g({"Location", "Smoking", "Stress", "LungCancer", "Surgery", "Survival"});
    g.set_edge("Location", "Smoking", C, A);
    g.set_edge("Stress", "Smoking", C, A);
    g.set_edge("Smoking", "LungCancer", T, A);
    g.set_edge("LungCancer", "Surgery", T, A);
    g.set_edge("LungCancer", "Survival", T, A);
    return g;
}

}  // namespace

TEST_CASE("lung cancer example") {
    auto t = translate(lung_cancer_pag(), "LungCancer", "Location", {});
    CHECK(t.size() == 4);
    CHECK(t.at("Smoking") == XdaSemantics{Semantics::CausalExplanation, 2});
    CHECK(t.at("Stress") == XdaSemantics{Semantics::CausalExplanation, 5});
    CHECK(t.at("Surgery").semantics == Semantics::NonCausalExplanation);
    CHECK(t.at("Survival").semantics == Semantics::NonCausalExplanation);
    CHECK(t.at("Surgery").rule_name() == "R6");
}

TEST_CASE("rule 1: the only path runs through the foreground as a non-collider") {
    MixedGraph g({"X", "F", "M"});
    g.set_edge("X", "F", T, A);
    g.set_edge("F", "M", T, A);
    CHECK(classify_variable(g, "X", "M", "F", {}) == XdaSemantics{Semantics::NoExplainability, 1});
}

TEST_CASE("rule 4: almost parent") {
    MixedGraph g({"X", "F", "M"});
    g.set_edge("X", "M", C, A);
    g.set_edge("F", "M", T, A);
    CHECK(classify_variable(g, "X", "M", "F", {}) == XdaSemantics{Semantics::CausalExplanation, 4});
}

TEST_CASE("rule 3 and bidirected chains") {
    MixedGraph g({"X", "W", "M", "F", "B"});
    g.set_edge("X", "W", T, A);
    g.set_edge("W", "M", T, A);
    g.set_edge("F", "M", T, A);
    g.set_edge("B", "M", A, A);
    auto t = translate(g, "M", "F", {});
    CHECK(t.at("X") == XdaSemantics{Semantics::CausalExplanation, 3});
    CHECK(t.at("W") == XdaSemantics{Semantics::CausalExplanation, 2});
    CHECK(t.at("B") == XdaSemantics{Semantics::NonCausalExplanation, 6});
}

TEST_CASE("an isolated measure leaves nothing explainable") {
    MixedGraph g = lung_cancer_pag();
    g.add_node("Cost");
    auto t = translate(g, "Cost", "Location", {});
    for (const auto& [name, s] : t) CHECK(s.semantics == Semantics::NoExplainability);
}

TEST_CASE("errors") {
    MixedGraph g = lung_cancer_pag();
    CHECK_THROWS_AS(classify_variable(g, "Location", "LungCancer", "Location", {}), QueryError);
    CHECK_THROWS_AS(classify_variable(g, "Nope", "LungCancer", "Location", {}), GraphError);
    CHECK_THROWS_AS(classify_variable(g, "Smoking", "LungCancer", "Nope", {}), GraphError);
}

TEST_CASE("background variables are excluded and condition the separation test") {
    MixedGraph g = lung_cancer_pag();
    auto t = translate(g, "Survival", "Location", {"LungCancer"});
    CHECK_FALSE(t.count("LungCancer"));
    CHECK(t.at("Smoking").semantics == Semantics::NoExplainability);
    CHECK(t.at("Surgery").semantics == Semantics::NoExplainability);
}

TEST_CASE("json form") {
    auto j = translation_to_json(translate(lung_cancer_pag(), "LungCancer", "Location", {}));
    CHECK(j["Smoking"]["semantics"] == "CausalExplanation");
    CHECK(j["Smoking"]["rule"] == "R2");
}

TEST_CASE("property: translation agrees with literal rule evaluation on random PAGs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 6 + static_cast<int>(rng() % 5);
        MixedGraph g = oracle::random_partial(rng, n, 0.3);
        const int m = static_cast<int>(rng() % n);
        int f = static_cast<int>(rng() % n);
        while (f == m) f = static_cast<int>(rng() % n);
        std::vector<int> b;
        std::vector<std::string> bnames;
        for (int v = 0; v < n; ++v)
            if (v != m && v != f && rng() % 6 == 0) b.push_back(v), bnames.push_back(g.name(v));
        auto t = translate(g, g.name(m), g.name(f), bnames);
        CHECK(t.size() == static_cast<std::size_t>(n - 2) - b.size());
        for (const auto& [name, s] : t) {
            const int x = g.index(name);
            const int rule = oracle::table3_rule(g, x, m, f, b);
            CHECK_MESSAGE(s.rule == rule, "trial " << trial << " " << name);
            CHECK(s.semantics == (rule == 1   ? Semantics::NoExplainability
                                  : rule <= 5 ? Semantics::CausalExplanation
                                              : Semantics::NonCausalExplanation));
        }
    }
}

TEST_CASE("property: rule 1 dominates and directed ancestors of a rule-3 cause are causal") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 7;
        MixedGraph g = oracle::random_ancestral(rng, n, 0.3, 0.15);
        const int m = n - 1, f = static_cast<int>(rng() % (n - 1));
        auto t = translate(g, g.name(m), g.name(f), {});
        const auto an_m = oracle::ancestors(g, m);
        for (const auto& [name, s] : t) {
            const int x = g.index(name);
            if (oracle::m_separated(g, x, m, {f})) CHECK(s.semantics == Semantics::NoExplainability);
            if (s.rule != 3) continue;
            // Every node on a directed path x -> ... -> m is an ancestor of m; it must not be non-causal.
            for (int w : g.descendants(x))
                if (an_m.count(w) && t.count(g.name(w)))
                    CHECK(t.at(g.name(w)).semantics != Semantics::NonCausalExplanation);
        }
        // Classification does not depend on enumeration order.
        std::vector<std::string> order = g.nodes();
        std::shuffle(order.begin(), order.end(), rng);
        MixedGraph h = g.induced(order);
        CHECK(translate(h, g.name(m), g.name(f), {}) == t);
    }
}
