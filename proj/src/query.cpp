#include <algorithm>
#include <cmath>
#include <limits>

#include "xda/error.hpp"
#include "xda/explainer.hpp"

namespace xda {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double side_mean_delta(double s1, double c1, double s2, double c2) {
    if (c1 <= 0 || c2 <= 0) return kNaN;
    return s1 / c1 - s2 / c2;
}

}  // namespace

std::vector<std::string> WhyQuery::background_dims() const {
    std::vector<std::string> out;
    for (const auto& f : background.filters()) out.push_back(f.dimension);
    return out;
}

PreparedQuery prepare_query(const Dataset& d, WhyQuery q) {
    const Column& m = d.column(q.measure);
    if (!m.is_measure()) throw QueryError("target " + q.measure + " is not a measure");
    if (q.agg == Aggregate::Count) throw QueryError("why-queries support SUM and AVG only");
    const Column& f = d.column(q.foreground);
    if (!f.is_dimension()) throw QueryError("foreground " + q.foreground + " is not categorical");
    if (q.v1 == q.v2) throw QueryError("foreground values must differ");
    if (!f.code_of(q.v1) || !f.code_of(q.v2))
        throw QueryError("foreground value not present in " + q.foreground);
    for (const auto& b : q.background.filters()) {
        if (b.dimension == q.foreground) throw QueryError("background constrains the foreground variable");
        if (b.dimension == q.measure) throw QueryError("background constrains the target measure");
        if (!d.column(b.dimension).is_dimension())
            throw QueryError("background dimension " + b.dimension + " is not categorical");
    }
    if (q.sigma && !(*q.sigma > 0.0 && *q.sigma <= 1.0)) throw QueryError("sigma must lie in (0, 1]");
    if (q.epsilon && *q.epsilon < 0.0) throw QueryError("epsilon must be non-negative");
    if (!q.epsilon && !(q.epsilon_frac >= 0.0 && q.epsilon_frac < 1.0))
        throw QueryError("epsilon_frac must lie in [0, 1)");

    auto in_b = match_rows(d, q.background);
    auto fcodes = f.codes();
    const auto c1 = *f.code_of(q.v1), c2 = *f.code_of(q.v2);
    auto vals = m.values();
    double s1 = 0, s2 = 0, n1 = 0, n2 = 0;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        if (!in_b[r]) continue;
        if (fcodes[r] == c1) s1 += vals[r], n1 += 1;
        else if (fcodes[r] == c2) s2 += vals[r], n2 += 1;
    }
    double delta;
    if (q.agg == Aggregate::Sum) {
        delta = s1 - s2;
    } else {
        if (n1 == 0 || n2 == 0) throw QueryError("AVG over an empty sibling subspace");
        delta = s1 / n1 - s2 / n2;
    }
    PreparedQuery p;
    if (delta < 0) {
        std::swap(q.v1, q.v2);
        delta = -delta;
        p.swapped = true;
    }
    p.delta = delta;
    p.epsilon = q.epsilon ? *q.epsilon : q.epsilon_frac * delta;
    p.query = std::move(q);
    if (!(p.delta > p.epsilon)) throw QueryError("no difference to explain: delta does not exceed epsilon");
    return p;
}

DeltaDecomposition::DeltaDecomposition(const Dataset& d, const PreparedQuery& q, const std::string& dimension)
    : dimension_(dimension), agg_(q.query.agg) {
    const Column& x = d.column(dimension);
    if (!x.is_dimension()) throw QueryError("explanation dimension " + dimension + " is not categorical");
    const Column& f = d.column(q.query.foreground);
    const Column& m = d.column(q.query.measure);
    auto in_b = match_rows(d, q.query.background);
    const auto c1 = *f.code_of(q.query.v1), c2 = *f.code_of(q.query.v2);
    auto fcodes = f.codes();
    auto xcodes = x.codes();
    auto vals = m.values();

    const std::size_t k = x.cardinality();
    std::vector<double> s1(k, 0), s2(k, 0), n1(k, 0), n2(k, 0);
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        if (!in_b[r]) continue;
        if (fcodes[r] == c1) s1[xcodes[r]] += vals[r], n1[xcodes[r]] += 1;
        else if (fcodes[r] == c2) s2[xcodes[r]] += vals[r], n2[xcodes[r]] += 1;
    }
    for (std::uint32_t c = 0; c < k; ++c) {
        if (n1[c] + n2[c] == 0) continue;
        codes_.push_back(c);
        values_.push_back(x.categories()[c]);
        sum1_.push_back(s1[c]);
        sum2_.push_back(s2[c]);
        cnt1_.push_back(n1[c]);
        cnt2_.push_back(n2[c]);
        total_sum1_ += s1[c];
        total_sum2_ += s2[c];
        total_cnt1_ += n1[c];
        total_cnt2_ += n2[c];
    }
}

double DeltaDecomposition::delta() const { return delta_without(std::vector<std::size_t>{}); }

double DeltaDecomposition::delta_of(std::size_t i) const {
    if (agg_ == Aggregate::Sum) return sum1_[i] - sum2_[i];
    return side_mean_delta(sum1_[i], cnt1_[i], sum2_[i], cnt2_[i]);
}

double DeltaDecomposition::delta_without(const std::vector<char>& removed) const {
    double s1 = total_sum1_, s2 = total_sum2_, n1 = total_cnt1_, n2 = total_cnt2_;
    for (std::size_t i = 0; i < removed.size(); ++i)
        if (removed[i]) s1 -= sum1_[i], s2 -= sum2_[i], n1 -= cnt1_[i], n2 -= cnt2_[i];
    if (agg_ == Aggregate::Sum) return s1 - s2;
    return side_mean_delta(s1, n1, s2, n2);
}

double DeltaDecomposition::delta_without(const std::vector<std::size_t>& removed) const {
    std::vector<char> mask(size(), 0);
    for (auto i : removed) mask.at(i) = 1;
    return delta_without(mask);
}

double DeltaDecomposition::delta_within(const std::vector<std::size_t>& kept) const {
    double s1 = 0, s2 = 0, n1 = 0, n2 = 0;
    for (auto i : kept) s1 += sum1_[i], s2 += sum2_[i], n1 += cnt1_[i], n2 += cnt2_[i];
    if (agg_ == Aggregate::Sum) return s1 - s2;
    return side_mean_delta(s1, n1, s2, n2);
}

namespace {

void require_disjoint(const std::vector<std::size_t>& p, const std::vector<std::size_t>& gamma) {
    for (auto i : p)
        if (std::find(gamma.begin(), gamma.end(), i) != gamma.end())
            throw QueryError("predicate and contingency overlap");
}

std::vector<std::size_t> joined(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// NaN (an emptied AVG side) never satisfies a threshold comparison.
bool within(double v, double eps) { return v <= eps; }
bool above(double v, double eps) { return v > eps; }

}  // namespace

Causality check_w_causality(const DeltaDecomposition& dd, double epsilon, const std::vector<std::size_t>& p,
                            const std::vector<std::size_t>& gamma) {
    require_disjoint(p, gamma);
    if (above(dd.delta(), epsilon) && within(dd.delta_without(p), epsilon)) return Causality::Counterfactual;
    if (!gamma.empty() && within(dd.delta_without(joined(p, gamma)), epsilon) &&
        above(dd.delta_without(gamma), epsilon))
        return Causality::Actual;
    return Causality::Neither;
}

double contingency_weight(const DeltaDecomposition& dd, const std::vector<std::size_t>& p,
                          const std::vector<std::size_t>& gamma) {
    if (gamma.empty()) return 0.0;
    double w = (dd.delta_without(p) - dd.delta_without(joined(p, gamma))) / dd.delta();
    return std::max(w, 0.0);
}

double responsibility(const DeltaDecomposition& dd, double epsilon, const std::vector<std::size_t>& p,
                      const std::vector<std::size_t>& gamma) {
    if (check_w_causality(dd, epsilon, p, gamma) == Causality::Neither)
        throw QueryError("contingency is not valid for the predicate");
    return 1.0 / (1.0 + contingency_weight(dd, p, gamma));
}

std::vector<std::size_t> canonical_predicate(const DeltaDecomposition& dd, double epsilon) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < dd.size(); ++i)
        if (dd.delta_of(i) > 0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dd.delta_of(a) > dd.delta_of(b); });
    std::vector<char> removed(dd.size(), 0);
    std::vector<std::size_t> prefix;
    for (auto i : order) {
        if (within(dd.delta_without(removed), epsilon)) break;
        removed[i] = 1;
        prefix.push_back(i);
    }
    if (prefix.empty() || !within(dd.delta_without(removed), epsilon)) return {};
    return prefix;
}

double default_sigma(const DeltaDecomposition& dd, const PreparedQuery& q) {
    if (q.query.sigma) return *q.query.sigma;
    return dd.size() == 0 ? 1.0 : 1.0 / static_cast<double>(dd.size());
}

}  // namespace xda
