#include <algorithm>
#include <bit>
#include <cmath>

#include "xda/error.hpp"
#include "xda/explainer.hpp"

namespace xda {

const char* to_string(ExplanationType t) { return t == ExplanationType::Causal ? "causal" : "non-causal"; }

nlohmann::json Explanation::to_json() const {
    nlohmann::json j;
    j["type"] = to_string(type);
    j["dimension"] = dimension;
    j["values"] = values;
    if (range) j["range"] = {{"lo", range->lo}, {"hi", range->hi}};
    else j["range"] = nullptr;
    j["responsibility"] = responsibility;
    j["score"] = score;
    j["contingency"] = contingency;
    j["delta_before"] = delta_before;
    j["delta_after"] = delta_after;
    return j;
}

nlohmann::json ExplainResult::to_json() const {
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& e : explanations) ex.push_back(e.to_json());
    return {{"delta", delta}, {"epsilon", epsilon}, {"swapped", swapped}, {"explanations", ex},
            {"semantics", translation_to_json(semantics)}};
}

namespace {

Explanation make_explanation(const DeltaDecomposition& dd, std::vector<std::size_t> p, std::vector<std::size_t> gamma,
                             double rho, double estimate, double sigma) {
    Explanation e;
    e.dimension = dd.dimension();
    std::sort(p.begin(), p.end());
    std::sort(gamma.begin(), gamma.end());
    for (auto i : p) e.values.push_back(dd.values()[i]);
    for (auto i : gamma) e.contingency.push_back(dd.values()[i]);
    e.responsibility = rho;
    e.responsibility_estimate = estimate;
    e.score = rho - sigma * static_cast<double>(p.size());
    e.delta_before = dd.delta();
    e.delta_after = dd.delta_without(p);
    e.filter_indices = std::move(p);
    e.contingency_indices = std::move(gamma);
    return e;
}

std::vector<std::size_t> minus(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out;
    for (auto i : a)
        if (std::find(b.begin(), b.end(), i) == b.end()) out.push_back(i);
    return out;
}

}  // namespace

std::optional<Explanation> optimize_sum(const DeltaDecomposition& dd, const PreparedQuery& q) {
    if (dd.agg() != Aggregate::Sum) throw QueryError("optimize_sum needs a SUM query");
    const double delta = dd.delta();
    if (!(delta > q.epsilon)) return std::nullopt;
    auto pc = canonical_predicate(dd, q.epsilon);
    if (pc.empty()) return std::nullopt;

    const double sigma = default_sigma(dd, q);
    double tau = 0;
    for (auto i : pc) tau += dd.delta_of(i);
    const double t = tau / delta;
    const double c3 = sigma * delta / ((1 + t) * (1 + t));

    std::vector<std::size_t> best;
    for (auto i : pc)
        if (dd.delta_of(i) > c3) best.push_back(i);
    if (best.empty()) best.push_back(pc.front());
    auto gamma = minus(pc, best);

    double d_p = 0;
    for (auto i : best) d_p += dd.delta_of(i);
    d_p /= delta;
    const double rho = 1.0 / (1.0 + contingency_weight(dd, best, gamma));
    const double estimate = (1 + t + d_p) / ((1 + t) * (1 + t));
    return make_explanation(dd, best, gamma, rho, estimate, sigma);
}

std::vector<std::size_t> avg_canonical_predicate(const DeltaDecomposition& dd, double eps, double sigma,
                                                 bool homogeneous) {
    const std::size_t m = dd.size();
    const std::size_t cap = std::min<std::size_t>(m, static_cast<std::size_t>(std::floor(1.0 / sigma + 1e-9)));

    std::vector<char> removed(m, 0);
    std::vector<std::size_t> pc;
    for (std::size_t r = 0; r < cap; ++r) {
        const double cur = dd.delta_without(removed);
        if (cur <= eps) break;
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < m; ++i)
            if (!removed[i]) cand.push_back(i);
        if (homogeneous) {
            std::vector<std::size_t> pruned;
            for (auto i : cand)
                if (dd.delta_of(i) > cur) pruned.push_back(i);
            if (!pruned.empty()) cand = std::move(pruned);
        }
        std::optional<std::size_t> pick;
        double best = 0;
        for (auto i : cand) {
            removed[i] = 1;
            const double v = dd.delta_without(removed);
            removed[i] = 0;
            if (std::isnan(v)) continue;
            if (!pick || v < best) {
                pick = i;
                best = v;
            }
        }
        if (!pick) break;
        removed[*pick] = 1;
        pc.push_back(*pick);
    }
    if (pc.empty() || !(dd.delta_without(removed) <= eps)) return {};
    return pc;
}

std::optional<Explanation> optimize_avg(const DeltaDecomposition& dd, const PreparedQuery& q, bool homogeneous) {
    const double eps = q.epsilon;
    if (!(dd.delta() > eps)) return std::nullopt;
    const double sigma = default_sigma(dd, q);
    const auto pc = avg_canonical_predicate(dd, eps, sigma, homogeneous);
    if (pc.empty()) return std::nullopt;

    std::optional<Explanation> out;
    for (std::size_t k = 1; k <= pc.size(); ++k) {
        std::vector<std::size_t> p(pc.begin(), pc.begin() + static_cast<long>(k));
        std::vector<std::size_t> gamma(pc.begin() + static_cast<long>(k), pc.end());
        const double rho = 1.0 / (1.0 + contingency_weight(dd, p, gamma));
        auto e = make_explanation(dd, p, gamma, rho, rho, sigma);
        if (!out || e.score > out->score) out = std::move(e);
    }
    return out;
}

namespace {

// Exact responsibility of `p` given precomputed Delta(D - D_mask) for every mask.
double exact_rho(const std::vector<double>& table, std::uint32_t p, std::uint32_t full, double eps) {
    const double base = table[0];
    if (table[p] <= eps) return 1.0;
    const std::uint32_t rest = full & ~p;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t g = rest; g; g = (g - 1) & rest) {
        const double with = table[p | g];
        if (!(with <= eps) || !(table[g] > eps)) continue;
        best = std::min(best, std::max((table[p] - with) / base, 0.0));
    }
    return std::isinf(best) ? 0.0 : 1.0 / (1.0 + best);
}

std::vector<double> delta_table(const DeltaDecomposition& dd) {
    const std::size_t m = dd.size();
    std::vector<double> table(std::size_t{1} << m);
    std::vector<char> removed(m);
    for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
        for (std::size_t i = 0; i < m; ++i) removed[i] = (mask >> i) & 1u;
        table[mask] = dd.delta_without(removed);
    }
    return table;
}

std::vector<std::size_t> bits(std::uint32_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; mask; ++i, mask >>= 1)
        if (mask & 1u) out.push_back(i);
    return out;
}

}  // namespace

double exact_responsibility(const DeltaDecomposition& dd, double epsilon, const std::vector<std::size_t>& p) {
    if (dd.size() > 20) throw QueryError("too many filters for exact responsibility");
    std::uint32_t mask = 0;
    for (auto i : p) mask |= 1u << i;
    const auto table = delta_table(dd);
    if (!(table[0] > epsilon)) return 0.0;
    return exact_rho(table, mask, static_cast<std::uint32_t>(table.size() - 1), epsilon);
}

std::optional<Explanation> brute_force(const DeltaDecomposition& dd, const PreparedQuery& q, std::size_t cap) {
    const std::size_t m = dd.size();
    if (m > cap) throw QueryError("brute force limited to " + std::to_string(cap) + " filters");
    if (m == 0) return std::nullopt;
    const double eps = q.epsilon;
    const double sigma = default_sigma(dd, q);
    const auto table = delta_table(dd);
    if (!(table[0] > eps)) return std::nullopt;
    const auto full = static_cast<std::uint32_t>(table.size() - 1);

    std::uint32_t best_mask = 0;
    double best_score = 0, best_rho = 0;
    for (std::uint32_t p = 1; p <= full; ++p) {
        const double rho = exact_rho(table, p, full, eps);
        if (rho <= 0) continue;
        const double score = rho - sigma * std::popcount(p);
        const bool better = best_mask == 0 || score > best_score + 1e-12 ||
                            (std::abs(score - best_score) <= 1e-12 && std::popcount(p) < std::popcount(best_mask));
        if (better) {
            best_mask = p;
            best_score = score;
            best_rho = rho;
        }
    }
    if (best_mask == 0) return std::nullopt;

    // Report the contingency achieving the minimum.
    const auto pv = bits(best_mask);
    std::vector<std::size_t> gamma;
    if (table[best_mask] > eps) {
        const std::uint32_t rest = full & ~best_mask;
        double w_best = std::numeric_limits<double>::infinity();
        for (std::uint32_t g = rest; g; g = (g - 1) & rest) {
            const double with = table[best_mask | g];
            if (!(with <= eps) || !(table[g] > eps)) continue;
            double w = std::max((table[best_mask] - with) / table[0], 0.0);
            if (w < w_best) w_best = w, gamma = bits(g);
        }
    }
    return make_explanation(dd, pv, gamma, best_rho, best_rho, sigma);
}

bool is_homogeneous(const MixedGraph& g, const WhyQuery& q, const std::string& x) {
    auto xi = g.find(x);
    auto fi = g.find(q.foreground);
    if (!xi || !fi) return false;
    std::set<int> z;
    for (const auto& b : q.background_dims())
        if (auto bi = g.find(b)) z.insert(*bi);
    z.erase(*xi);
    z.erase(*fi);
    return m_separated_conservative(g, *xi, *fi, z);
}

std::map<std::string, XdaSemantics> translate(const MixedGraph& g, const WhyQuery& q) {
    return translate(g, q.measure, q.foreground, q.background_dims());
}

ExplainResult explain(const Dataset& d, const MixedGraph& g, const WhyQuery& q, const ExplainOptions& opts) {
    PreparedQuery pq = prepare_query(d, q);
    ExplainResult res;
    res.delta = pq.delta;
    res.epsilon = pq.epsilon;
    res.swapped = pq.swapped;
    res.semantics = translate(g, pq.query);

    struct Ranked {
        Explanation e;
        std::size_t order;
    };
    std::vector<Ranked> ranked;
    for (std::size_t ci = 0; ci < d.column_count(); ++ci) {
        const Column& col = d.column(ci);
        auto it = res.semantics.find(col.name());
        if (it == res.semantics.end() || it->second.semantics == Semantics::NoExplainability) continue;

        Dataset work = d;
        std::string dim = col.name();
        if (col.is_measure()) {
            dim = col.name() + "_bin";
            if (d.has_column(dim)) continue;
            work = d.with_column(discretize_column(col, opts.bins, dim));
        }
        DeltaDecomposition dd(work, pq, dim);
        if (dd.size() == 0) continue;
        std::optional<Explanation> e = pq.query.agg == Aggregate::Sum
                                           ? optimize_sum(dd, pq)
                                           : optimize_avg(dd, pq, is_homogeneous(g, pq.query, col.name()));
        if (!e) continue;
        e->type = it->second.semantics == Semantics::CausalExplanation ? ExplanationType::Causal
                                                                        : ExplanationType::NonCausal;
        const Column& binned = work.column(dim);
        if (binned.is_binned()) {
            std::vector<std::uint32_t> codes;
            for (auto i : e->filter_indices) codes.push_back(dd.codes()[i]);
            std::sort(codes.begin(), codes.end());
            if (codes.back() - codes.front() + 1 == codes.size())
                e->range = BinRange{binned.bins()[codes.front()].lo, binned.bins()[codes.back()].hi};
        }
        ranked.push_back({std::move(*e), ci});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.e.score != b.e.score) return a.e.score > b.e.score;
        if (a.e.type != b.e.type) return a.e.type == ExplanationType::Causal;
        return a.order < b.order;
    });
    for (auto& r : ranked) res.explanations.push_back(std::move(r.e));
    if (opts.top && res.explanations.size() > *opts.top) res.explanations.resize(*opts.top);
    return res;
}

}  // namespace xda
