#include "xda/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xda/error.hpp"
#include "xda/learner.hpp"

namespace xda {

std::vector<double> sample_dirichlet(Rng& rng, std::size_t k, double concentration) {
    std::gamma_distribution<double> gamma(concentration, 1.0);
    std::vector<double> p(k);
    double total = 0;
    for (auto& v : p) total += (v = gamma(rng));
    if (total <= 0) return std::vector<double>(k, 1.0 / static_cast<double>(k));
    for (auto& v : p) v /= total;
    return p;
}

std::size_t sample_categorical(Rng& rng, const std::vector<double>& probs) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double x = u(rng), acc = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (x < acc) return i;
    }
    return probs.size() - 1;
}

nlohmann::json SynAConfig::to_json() const {
    nlohmann::json j = {{"rows", rows},
                        {"expected_degree", expected_degree},
                        {"min_cardinality", min_cardinality},
                        {"max_cardinality", max_cardinality},
                        {"dirichlet", dirichlet},
                        {"mask_fraction", mask_fraction},
                        {"fd_leaf_fraction", fd_leaf_fraction},
                        {"fd_children_per_leaf", fd_children_per_leaf}};
    if (edge_probability) j["edge_probability"] = *edge_probability;
    return j;
}

double SynAInstance::fd_proportion() const {
    if (data.column_count() == 0) return 0.0;
    std::size_t children = 0;
    for (const auto& n : data.column_names())
        if (n.find("_fd") != std::string::npos) ++children;
    return static_cast<double>(children) / static_cast<double>(data.column_count());
}

namespace {

std::string value_name(std::size_t i) { return "s" + std::to_string(i); }

std::vector<std::string> labels(std::size_t k) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(value_name(i));
    return out;
}

}  // namespace

MixedGraph oracle_pag(const MixedGraph& dag, const std::vector<std::string>& observed) {
    const int n = static_cast<int>(observed.size());
    MixedGraph skel(observed);
    SepSetMap sep;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const int x = dag.index(observed[a]), y = dag.index(observed[b]);
            std::set<int> anc = dag.ancestors(x);
            auto ay = dag.ancestors(y);
            anc.insert(ay.begin(), ay.end());
            std::set<int> z, zs;
            for (int c = 0; c < n; ++c) {
                const int v = dag.index(observed[c]);
                if (c != a && c != b && anc.count(v)) {
                    z.insert(v);
                    zs.insert(c);
                }
            }
            if (m_separated(dag, x, y, z)) sep.set(a, b, zs);
            else skel.set_edge(a, b, Mark::Circle, Mark::Circle);
        }
    return fci_orient(skel, sep);
}

SynAInstance gen_syn_a(std::size_t n_vars, std::uint64_t seed, const SynAConfig& cfg) {
    if (n_vars < 4) throw Error("SYN-A needs at least 4 variables");
    if (cfg.min_cardinality < 2 || cfg.max_cardinality < cfg.min_cardinality)
        throw Error("invalid cardinality range");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::string> names;
    for (std::size_t i = 0; i < n_vars; ++i) names.push_back("V" + std::to_string(i));
    MixedGraph dag(names);
    const double p = cfg.edge_probability ? *cfg.edge_probability
                                          : std::min(1.0, cfg.expected_degree / static_cast<double>(n_vars - 1));
    for (std::size_t i = 0; i < n_vars; ++i)
        for (std::size_t j = i + 1; j < n_vars; ++j)
            if (unit(rng) < p) dag.set_edge(static_cast<int>(i), static_cast<int>(j), Mark::Tail, Mark::Arrow);

    std::uniform_int_distribution<std::size_t> card_dist(cfg.min_cardinality, cfg.max_cardinality);
    std::vector<std::size_t> card(n_vars);
    for (auto& c : card) c = card_dist(rng);

    // cpt[v][config] is a distribution over v's values; configs use mixed radix over parents.
    std::vector<std::vector<int>> parents(n_vars);
    std::vector<std::vector<std::vector<double>>> cpt(n_vars);
    for (std::size_t v = 0; v < n_vars; ++v) {
        parents[v] = dag.parents(static_cast<int>(v));
        std::size_t configs = 1;
        for (int pa : parents[v]) configs *= card[pa];
        for (std::size_t c = 0; c < configs; ++c) cpt[v].push_back(sample_dirichlet(rng, card[v], cfg.dirichlet));
    }

    std::vector<std::vector<std::uint32_t>> values(n_vars, std::vector<std::uint32_t>(cfg.rows));
    for (std::size_t r = 0; r < cfg.rows; ++r)
        for (std::size_t v = 0; v < n_vars; ++v) {
            std::size_t config = 0;
            for (int pa : parents[v]) config = config * card[pa] + values[pa][r];
            values[v][r] = static_cast<std::uint32_t>(sample_categorical(rng, cpt[v][config]));
        }

    const std::size_t n_mask = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg.mask_fraction * static_cast<double>(n_vars))));
    std::vector<std::size_t> perm(n_vars);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<char> is_masked(n_vars, 0);
    for (std::size_t i = 0; i < n_mask; ++i) is_masked[perm[i]] = 1;

    SynAInstance inst;
    inst.seed = seed;
    inst.config = cfg;
    inst.dag = dag;
    std::vector<std::string> observed;
    for (std::size_t v = 0; v < n_vars; ++v) {
        if (is_masked[v]) inst.masked.push_back(names[v]);
        else observed.push_back(names[v]);
    }
    MixedGraph pag = oracle_pag(dag, observed);

    std::vector<Column> cols;
    for (std::size_t v = 0; v < n_vars; ++v)
        if (!is_masked[v]) cols.push_back(Column::dimension(names[v], labels(card[v]), values[v]));

    std::vector<std::size_t> leaves;
    for (std::size_t v = 0; v < n_vars; ++v)
        if (!is_masked[v] && dag.children(static_cast<int>(v)).empty()) leaves.push_back(v);
    std::shuffle(leaves.begin(), leaves.end(), rng);
    std::size_t n_fd_leaves = static_cast<std::size_t>(std::llround(cfg.fd_leaf_fraction * static_cast<double>(leaves.size())));
    if (cfg.fd_leaf_fraction > 0 && n_fd_leaves == 0 && !leaves.empty()) n_fd_leaves = 1;
    leaves.resize(std::min(n_fd_leaves, leaves.size()));
    std::sort(leaves.begin(), leaves.end());

    std::vector<std::string> all_nodes = observed;
    std::vector<std::pair<std::string, std::string>> fd_edges;
    for (std::size_t leaf : leaves)
        for (std::size_t c = 0; c < cfg.fd_children_per_leaf; ++c) {
            std::uniform_int_distribution<std::size_t> child_card_dist(2, card[leaf]);
            const std::size_t k = child_card_dist(rng);
            std::vector<std::uint32_t> src(card[leaf]);
            std::iota(src.begin(), src.end(), 0);
            std::shuffle(src.begin(), src.end(), rng);
            std::vector<std::uint32_t> map(card[leaf]);
            std::uniform_int_distribution<std::uint32_t> any(0, static_cast<std::uint32_t>(k - 1));
            for (std::size_t i = 0; i < src.size(); ++i)
                map[src[i]] = i < k ? static_cast<std::uint32_t>(i) : any(rng);
            std::vector<std::uint32_t> codes(cfg.rows);
            for (std::size_t r = 0; r < cfg.rows; ++r) codes[r] = map[values[leaf][r]];
            const std::string name = names[leaf] + "_fd" + std::to_string(c + 1);
            cols.push_back(Column::dimension(name, labels(k), std::move(codes)));
            all_nodes.push_back(name);
            fd_edges.emplace_back(names[leaf], name);
        }

    inst.truth = MixedGraph(all_nodes);
    for (auto [u, v] : pag.edges()) inst.truth.set_edge(pag.name(u), pag.name(v), pag.mark(v, u), pag.mark(u, v));
    for (const auto& [a, b] : fd_edges) inst.truth.set_edge(a, b, Mark::Tail, Mark::Arrow);

    inst.data = Dataset(std::move(cols));
    inst.fd.nodes = all_nodes;
    inst.fd.edges = fd_edges;
    inst.fd.compute_depth();
    return inst;
}

nlohmann::json SynBConfig::to_json() const {
    return {{"rows", rows}, {"cardinality", cardinality}, {"k", k},           {"mu", mu},
            {"mu_star", mu_star}, {"std", stddev},        {"boost", boost},
            {"max_truth_share", max_truth_share}};
}

WhyQuery SynBInstance::query(Aggregate agg) const {
    WhyQuery q;
    q.measure = "Z";
    q.agg = agg;
    q.foreground = "X";
    q.v1 = "x1";
    q.v2 = "x2";
    return q;
}

nlohmann::json SynBInstance::truth_json() const {
    return {{"dimension", "Y"}, {"values", truth}, {"query", {{"measure", "Z"}, {"foreground", {{"dim", "X"}, {"v1", "x1"}, {"v2", "x2"}}}}}};
}

SynBInstance gen_syn_b(const SynBConfig& cfg, std::uint64_t seed) {
    if (cfg.k == 0 || cfg.k >= cfg.cardinality) throw Error("SYN-B needs 0 < k < cardinality");
    if (cfg.rows == 0) throw Error("SYN-B needs at least one row");
    if (!(cfg.boost >= 1.0)) throw Error("SYN-B boost must be at least 1");
    if (!(cfg.max_truth_share > 0.0 && cfg.max_truth_share < 1.0)) throw Error("max_truth_share must lie in (0, 1)");
    Rng rng(seed);
    const std::size_t c = cfg.cardinality;

    std::vector<std::size_t> ids(c);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<char> is_truth(c, 0);
    for (std::size_t i = 0; i < cfg.k; ++i) is_truth[ids[i]] = 1;

    // Y | x2: non-truth values follow a Dirichlet draw; the truth values share their prior
    // mean k / c evenly, capped so abnormal rows stay a minority under x1.
    auto p2 = sample_dirichlet(rng, c, 1.0);
    double rest = 0;
    for (std::size_t j = 0; j < c; ++j)
        if (!is_truth[j]) rest += p2[j];
    const double s = cfg.max_truth_share;
    const double t2_cap = s / (cfg.boost - (cfg.boost - 1.0) * s);
    const double t2 = std::min(static_cast<double>(cfg.k) / static_cast<double>(c), t2_cap);
    for (std::size_t j = 0; j < c; ++j)
        p2[j] = is_truth[j] ? t2 / static_cast<double>(cfg.k) : p2[j] * (1.0 - t2) / rest;
    // Y | x1 boosts the truth values; P(X = x1) keeps the expected non-truth counts equal.
    const double norm = 1.0 + (cfg.boost - 1.0) * t2;
    std::vector<double> p1(c);
    for (std::size_t j = 0; j < c; ++j) p1[j] = p2[j] * (is_truth[j] ? cfg.boost : 1.0) / norm;
    const double pi = norm / (1.0 + norm);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> high(cfg.mu_star, cfg.stddev), low(cfg.mu, cfg.stddev);
    std::vector<std::uint32_t> xs(cfg.rows), ys(cfg.rows);
    std::vector<double> zs(cfg.rows);
    for (std::size_t r = 0; r < cfg.rows; ++r) {
        const bool x1 = unit(rng) < pi;
        xs[r] = x1 ? 0 : 1;
        ys[r] = static_cast<std::uint32_t>(sample_categorical(rng, x1 ? p1 : p2));
        zs[r] = is_truth[ys[r]] ? high(rng) : low(rng);
    }

    std::vector<std::string> ylabels;
    for (std::size_t j = 0; j < c; ++j) ylabels.push_back("y" + std::to_string(j));
    SynBInstance inst;
    inst.config = cfg;
    inst.seed = seed;
    for (std::size_t j = 0; j < c; ++j)
        if (is_truth[j]) inst.truth.push_back(ylabels[j]);
    inst.data = Dataset({Column::dimension("X", {"x1", "x2"}, std::move(xs)),
                         Column::dimension("Y", ylabels, std::move(ys)), Column::measure("Z", std::move(zs))});
    return inst;
}

Dataset gen_cityinfo(std::size_t rows, std::uint64_t seed, std::size_t cities, std::size_t states,
                     std::size_t countries) {
    if (countries == 0 || states < countries || cities < states) throw Error("cityinfo needs cities >= states >= countries >= 1");
    Rng rng(seed);
    auto surjection = [&](std::size_t from, std::size_t to) {
        std::vector<std::uint32_t> m(from);
        for (std::size_t i = 0; i < from; ++i) m[i] = static_cast<std::uint32_t>(i % to);
        std::shuffle(m.begin(), m.end(), rng);
        return m;
    };
    auto city_state = surjection(cities, states);
    auto state_country = surjection(states, countries);
    auto names = [](const std::string& prefix, std::size_t k) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < k; ++i) out.push_back(prefix + (i < 10 ? "0" : "") + std::to_string(i));
        return out;
    };
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(cities - 1));
    std::vector<std::uint32_t> c(rows), s(rows), k(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        c[r] = pick(rng);
        s[r] = city_state[c[r]];
        k[r] = state_country[s[r]];
    }
    return Dataset({Column::dimension("City", names("city", cities), std::move(c)),
                    Column::dimension("State", names("state", states), std::move(s)),
                    Column::dimension("Country", names("country", countries), std::move(k))});
}

}  // namespace xda
