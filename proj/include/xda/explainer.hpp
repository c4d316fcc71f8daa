#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xda/dataset.hpp"
#include "xda/learner.hpp"
#include "xda/translator.hpp"

namespace xda {

/// Difference of an aggregate between two sibling subspaces that differ on `foreground`.
struct WhyQuery {
    std::string measure;
    Aggregate agg = Aggregate::Sum;
    std::string foreground;
    std::string v1;
    std::string v2;
    Subspace background;
    /// Absolute threshold; when unset, epsilon_frac * delta is used.
    std::optional<double> epsilon;
    double epsilon_frac = 0.1;
    /// Conciseness weight; when unset, 1/m per dimension.
    std::optional<double> sigma;

    std::vector<std::string> background_dims() const;
};

/// A validated query oriented so that delta > 0.
struct PreparedQuery {
    WhyQuery query;
    double delta = 0.0;
    double epsilon = 0.0;
    bool swapped = false;
};

/// Canonicalizes and validates a query; throws QueryError when it cannot be answered.
PreparedQuery prepare_query(const Dataset& d, WhyQuery q);

/// Per-filter sums and counts of one dimension inside the two sibling subspaces.
class DeltaDecomposition {
public:
    DeltaDecomposition(const Dataset& d, const PreparedQuery& q, const std::string& dimension);

    const std::string& dimension() const { return dimension_; }
    Aggregate agg() const { return agg_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<std::string>& values() const { return values_; }
    /// Category codes of the filters in the column of `dimension`.
    const std::vector<std::uint32_t>& codes() const { return codes_; }

    double a(std::size_t i) const { return cnt1_[i]; }
    double b(std::size_t i) const { return cnt2_[i]; }
    double sum1(std::size_t i) const { return sum1_[i]; }
    double sum2(std::size_t i) const { return sum2_[i]; }
    double total_a() const { return total_cnt1_; }
    double total_b() const { return total_cnt2_; }

    /// Delta over the whole data (always > 0 for a prepared query).
    double delta() const;
    /// Delta(D_p) for filter i; NaN for AVG when one side has no rows.
    double delta_of(std::size_t i) const;
    /// Delta(D - D_P) for the filters flagged in `removed`; NaN for AVG if a side becomes empty.
    double delta_without(const std::vector<char>& removed) const;
    double delta_without(const std::vector<std::size_t>& removed) const;
    /// Delta(D_P) for the filters flagged in `kept`.
    double delta_within(const std::vector<std::size_t>& kept) const;

private:
    std::string dimension_;
    Aggregate agg_;
    std::vector<std::string> values_;
    std::vector<std::uint32_t> codes_;
    std::vector<double> sum1_, sum2_, cnt1_, cnt2_;
    double total_sum1_ = 0, total_sum2_ = 0, total_cnt1_ = 0, total_cnt2_ = 0;
};

enum class ExplanationType { Causal, NonCausal };
const char* to_string(ExplanationType t);

struct Explanation {
    ExplanationType type = ExplanationType::NonCausal;
    std::string dimension;
    std::vector<std::string> values;
    std::optional<BinRange> range;
    /// Lower bound on W-Responsibility from the reported contingency (exact for brute force).
    double responsibility = 0.0;
    /// The closed-form estimate (1 + t + d_P) / (1 + t)^2.
    double responsibility_estimate = 0.0;
    double score = 0.0;
    std::vector<std::string> contingency;
    double delta_before = 0.0;
    double delta_after = 0.0;
    /// Indices into the decomposition, for tests.
    std::vector<std::size_t> filter_indices;
    std::vector<std::size_t> contingency_indices;

    nlohmann::json to_json() const;
};

enum class Causality { Counterfactual, Actual, Neither };

Causality check_w_causality(const DeltaDecomposition& dd, double epsilon, const std::vector<std::size_t>& p,
                            const std::vector<std::size_t>& gamma);
/// 1 / (1 + |gamma|_W); throws QueryError unless gamma is a valid contingency for p.
double responsibility(const DeltaDecomposition& dd, double epsilon, const std::vector<std::size_t>& p,
                      const std::vector<std::size_t>& gamma);
/// |gamma|_W, normalized by Delta(D) and truncated at zero.
double contingency_weight(const DeltaDecomposition& dd, const std::vector<std::size_t>& p,
                          const std::vector<std::size_t>& gamma);

/// Filters sorted by Delta_i descending, non-positive ones dropped, cut at the
/// first prefix whose removal brings Delta within epsilon. Empty if no prefix does.
std::vector<std::size_t> canonical_predicate(const DeltaDecomposition& dd, double epsilon);

double default_sigma(const DeltaDecomposition& dd, const PreparedQuery& q);

std::optional<Explanation> optimize_sum(const DeltaDecomposition& dd, const PreparedQuery& q);
/// Greedy construction for AVG: at most min(m, 1/sigma) filters, each step removing the filter
/// that minimizes the remaining difference. Empty if the difference never reaches epsilon.
std::vector<std::size_t> avg_canonical_predicate(const DeltaDecomposition& dd, double epsilon, double sigma,
                                                 bool homogeneous);
std::optional<Explanation> optimize_avg(const DeltaDecomposition& dd, const PreparedQuery& q, bool homogeneous);
std::optional<Explanation> brute_force(const DeltaDecomposition& dd, const PreparedQuery& q,
                                       std::size_t cap = 15);

/// Exact W-Responsibility of p by exhaustive contingency search (0 if not an actual cause).
double exact_responsibility(const DeltaDecomposition& dd, double epsilon, const std::vector<std::size_t>& p);

bool is_homogeneous(const MixedGraph& g, const WhyQuery& q, const std::string& x);

std::map<std::string, XdaSemantics> translate(const MixedGraph& g, const WhyQuery& q);

struct ExplainOptions {
    std::size_t bins = 5;
    /// Keep only the first `top` explanations when set.
    std::optional<std::size_t> top;
};

struct ExplainResult {
    double delta = 0.0;
    double epsilon = 0.0;
    bool swapped = false;
    std::vector<Explanation> explanations;
    std::map<std::string, XdaSemantics> semantics;

    nlohmann::json to_json() const;
};

ExplainResult explain(const Dataset& d, const MixedGraph& g, const WhyQuery& q, const ExplainOptions& opts = {});

}  // namespace xda
