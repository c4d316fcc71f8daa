#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "xda/mixed_graph.hpp"

namespace xda {

enum class Semantics { NoExplainability, CausalExplanation, NonCausalExplanation };

const char* to_string(Semantics s);

struct XdaSemantics {
    Semantics semantics = Semantics::NonCausalExplanation;
    int rule = 6;  ///< 1..6, the translation rule that fired

    std::string rule_name() const { return "R" + std::to_string(rule); }
    bool operator==(const XdaSemantics&) const = default;
};

XdaSemantics classify_variable(const MixedGraph& g, const std::string& x, const std::string& measure,
                               const std::string& foreground, const std::vector<std::string>& background);

/// Classifies every node other than the measure, foreground and background.
std::map<std::string, XdaSemantics> translate(const MixedGraph& g, const std::string& measure,
                                              const std::string& foreground,
                                              const std::vector<std::string>& background);

nlohmann::json translation_to_json(const std::map<std::string, XdaSemantics>& t);

/// x reaches target through edges that are -> or o-> toward the target.
bool almost_ancestor(const MixedGraph& g, int x, int target);

}  // namespace xda
