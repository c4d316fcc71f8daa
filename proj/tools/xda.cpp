#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xda/bench.hpp"
#include "xda/error.hpp"
#include "xda/explainer.hpp"
#include "xda/learner.hpp"
#include "xda/service.hpp"
#include "xda/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw xda::Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw xda::Error("cannot write " + path.string());
    out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct LearnArgs {
    std::string data, out;
    double alpha = 0.05;
    std::size_t bins = 5, max_cond = 3;
    bool agnostic = false;
};

int cmd_learn(const LearnArgs& a) {
    xda::LearnerConfig cfg;
    cfg.alpha = a.alpha;
    cfg.bins = a.bins;
    cfg.max_cond_size = a.max_cond;
    cfg.validate();
    const xda::Dataset d = xda::load_csv(a.data);
    json out;
    xda::MixedGraph g;
    if (a.agnostic) {
        g = xda::fci(d, cfg);
        out = g.to_json();
    } else {
        xda::AugmentedPag pag = xda::learn(d, cfg);
        g = pag.graph;
        out = pag.to_json();
    }
    if (!a.out.empty()) write_text(a.out, dump(out));
    else std::cout << dump(out);
    std::cerr << g.size() << " nodes, " << g.edge_count() << " edges\n";
    for (auto [u, v] : g.edges())
        std::cerr << "  " << g.name(u) << " " << xda::to_string(g.mark(v, u)) << "-" << xda::to_string(g.mark(u, v))
                  << " " << g.name(v) << "\n";
    return 0;
}

struct ExplainArgs {
    std::string data, graph, measure, agg = "sum", dim, v1, v2, out;
    std::vector<std::string> background;
    double epsilon_frac = 0.1;
    std::optional<double> sigma;
    std::optional<std::size_t> top;
    std::size_t bins = 5;
};

int cmd_explain(const ExplainArgs& a) {
    const xda::Dataset d = xda::load_csv(a.data);
    const xda::AugmentedPag pag = xda::AugmentedPag::from_json(json::parse(slurp(a.graph)));
    xda::WhyQuery q;
    q.measure = a.measure;
    q.agg = xda::parse_aggregate(a.agg);
    q.foreground = a.dim;
    q.v1 = a.v1;
    q.v2 = a.v2;
    q.epsilon_frac = a.epsilon_frac;
    q.sigma = a.sigma;
    std::vector<xda::Filter> bg;
    for (const auto& kv : a.background) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw xda::QueryError("background filter must read dim=value: " + kv);
        bg.push_back({kv.substr(0, eq), kv.substr(eq + 1)});
    }
    q.background = xda::Subspace(std::move(bg));
    xda::ExplainOptions opts;
    opts.bins = a.bins;
    opts.top = a.top;
    const xda::ExplainResult r = xda::explain(d, pag.graph, q, opts);

    if (!r.explanations.empty()) {
        std::printf("delta %.6g  epsilon %.6g%s\n", r.delta, r.epsilon, r.swapped ? "  (v1/v2 swapped)" : "");
        std::printf("%-4s %-11s %-16s %-8s %-8s %s\n", "rank", "type", "dimension", "resp", "score", "values");
        std::size_t rank = 1;
        for (const auto& e : r.explanations) {
            std::string vals;
            for (const auto& v : e.values) vals += (vals.empty() ? "" : ",") + v;
            if (e.range) vals += " [" + std::to_string(e.range->lo) + ", " + std::to_string(e.range->hi) + ")";
            std::printf("%-4zu %-11s %-16s %-8.4f %-8.4f %s\n", rank++, xda::to_string(e.type), e.dimension.c_str(),
                        e.responsibility, e.score, vals.c_str());
        }
    }
    if (!a.out.empty()) write_text(a.out, dump(r.to_json()));
    return 0;
}

struct SynthArgs {
    std::string out;
    std::uint64_t seed = 1;
    std::size_t vars = 10;
    xda::SynAConfig a;
    xda::SynBConfig b;
};

int cmd_synth_a(const SynthArgs& s) {
    const xda::SynAInstance inst = xda::gen_syn_a(s.vars, s.seed, s.a);
    fs::create_directories(s.out);
    xda::write_csv(inst.data, (fs::path(s.out) / "data.csv").string());
    write_text(fs::path(s.out) / "truth_graph.json", dump(inst.truth.to_json()));
    write_text(fs::path(s.out) / "truth_explanation.json",
               dump({{"masked", inst.masked}, {"fd", inst.fd.to_json()}, {"dag", inst.dag.to_json()}}));
    json params = s.a.to_json();
    params["generator"] = "syn-a";
    params["vars"] = s.vars;
    params["seed"] = s.seed;
    write_text(fs::path(s.out) / "params.json", dump(params));
    return 0;
}

int cmd_synth_b(const SynthArgs& s) {
    const xda::SynBInstance inst = xda::gen_syn_b(s.b, s.seed);
    fs::create_directories(s.out);
    xda::write_csv(inst.data, (fs::path(s.out) / "data.csv").string());
    write_text(fs::path(s.out) / "truth_graph.json", dump(xda::syn_b_graph().to_json()));
    write_text(fs::path(s.out) / "truth_explanation.json", dump(inst.truth_json()));
    json params = s.b.to_json();
    params["generator"] = "syn-b";
    params["seed"] = s.seed;
    write_text(fs::path(s.out) / "params.json", dump(params));
    return 0;
}

struct BenchArgs {
    std::string suite = "syn-b";
    std::size_t seeds = 10;
    std::string out;
};

std::vector<std::uint64_t> seed_list(std::size_t n, std::uint64_t base) {
    std::vector<std::uint64_t> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(base + i);
    return s;
}

int cmd_bench(const BenchArgs& a) {
    std::ostringstream csv;
    if (a.suite == "syn-b") {
        csv << "rows,cardinality,agg,runs,mean_f1,min_f1,mean_seconds,max_seconds\n";
        for (std::size_t rows : {10000, 100000})
            for (std::size_t card : {10, 20, 50, 100})
                for (auto agg : {xda::Aggregate::Sum, xda::Aggregate::Avg}) {
                    xda::SynBConfig cfg;
                    cfg.rows = rows;
                    cfg.cardinality = card;
                    const auto c = xda::run_syn_b_cell(cfg, agg, seed_list(a.seeds, 1000));
                    csv << rows << "," << card << "," << xda::to_string(agg) << "," << c.runs << "," << c.mean_f1
                        << "," << c.min_f1 << "," << c.mean_seconds << "," << c.max_seconds << "\n";
                    std::cerr << "." << std::flush;
                }
    } else if (a.suite == "sensitivity") {
        csv << "gap,agg,runs,mean_f1,min_f1,mean_seconds\n";
        for (double gap : {5.0, 10.0, 30.0, 100.0})
            for (auto agg : {xda::Aggregate::Sum, xda::Aggregate::Avg}) {
                xda::SynBConfig cfg;
                cfg.mu_star = cfg.mu + gap;
                const auto c = xda::run_syn_b_cell(cfg, agg, seed_list(a.seeds, 2000));
                csv << gap << "," << xda::to_string(agg) << "," << c.runs << "," << c.mean_f1 << "," << c.min_f1
                    << "," << c.mean_seconds << "\n";
                std::cerr << "." << std::flush;
            }
    } else if (a.suite == "syn-a") {
        csv << "vars,seed,fd_leaf_fraction,fd_proportion,xl_precision,xl_recall,xl_f1,fci_precision,fci_recall,"
               "fci_f1,xl_seconds,fci_seconds\n";
        for (double frac : {0.2, 0.5, 1.0})
            for (std::size_t i = 0; i < a.seeds; ++i) {
                xda::SynAConfig cfg;
                cfg.fd_leaf_fraction = frac;
                const std::size_t vars = 10 + (i * 5) % 21;
                const auto c = xda::compare_on_syn_a(vars, 3000 + i, cfg);
                csv << vars << "," << c.seed << "," << frac << "," << c.fd_proportion << "," << c.xlearner.precision
                    << "," << c.xlearner.recall << "," << c.xlearner.f1 << "," << c.fci.precision << ","
                    << c.fci.recall << "," << c.fci.f1 << "," << c.xlearner_seconds << "," << c.fci_seconds << "\n";
                std::cerr << "." << std::flush;
            }
    } else {
        throw xda::Error("unknown bench suite " + a.suite);
    }
    std::cerr << "\n";
    if (!a.out.empty()) write_text(a.out, csv.str());
    else std::cout << csv.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explainable data analysis: causal graph learning and why-query explanations"};
    app.require_subcommand(1);

    LearnArgs la;
    auto* learn = app.add_subcommand("learn", "Learn a causal graph from a CSV file");
    learn->add_option("--data", la.data, "Input CSV")->required();
    learn->add_option("--out", la.out, "Output graph JSON (stdout when omitted)");
    learn->add_option("--alpha", la.alpha, "Significance level of the CI tests")->check(CLI::Range(0.0, 1.0));
    learn->add_option("--bins", la.bins, "Equal-frequency bins for measures")->check(CLI::PositiveNumber);
    learn->add_option("--max-cond", la.max_cond, "Largest conditioning set");
    learn->add_flag("--agnostic", la.agnostic, "Plain FCI, ignoring functional dependencies");

    ExplainArgs ea;
    auto* expl = app.add_subcommand("explain", "Answer a why-query against a learned graph");
    expl->add_option("--data", ea.data, "Input CSV")->required();
    expl->add_option("--graph", ea.graph, "Graph JSON written by learn")->required();
    expl->add_option("--measure", ea.measure, "Target measure")->required();
    expl->add_option("--agg", ea.agg, "sum or avg")->check(CLI::IsMember({"sum", "avg", "SUM", "AVG"}));
    expl->add_option("--dim", ea.dim, "Foreground dimension")->required();
    expl->add_option("--v1", ea.v1, "First foreground value")->required();
    expl->add_option("--v2", ea.v2, "Second foreground value")->required();
    expl->add_option("--background", ea.background, "Background filters dim=value");
    expl->add_option("--epsilon-frac", ea.epsilon_frac, "Threshold as a fraction of the difference");
    expl->add_option("--sigma", ea.sigma, "Conciseness weight in (0, 1]");
    expl->add_option("--top", ea.top, "Number of explanations to keep");
    expl->add_option("--bins", ea.bins, "Bins for measures used as explanations")->check(CLI::PositiveNumber);
    expl->add_option("--out", ea.out, "Write the result JSON here");

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark instance");
    synth->require_subcommand(1);
    auto* syn_a = synth->add_subcommand("syn-a", "Random DAG with latent variables and FD children");
    auto* syn_b = synth->add_subcommand("syn-b", "X -> Y -> Z with injected abnormal filters");
    for (auto* s : {syn_a, syn_b}) {
        s->add_option("--seed", sa.seed, "Random seed");
        s->add_option("--out", sa.out, "Output directory")->required();
    }
    syn_a->add_option("--vars", sa.vars, "Number of variables (masked ones included)");
    syn_a->add_option("--rows", sa.a.rows, "Rows");
    syn_a->add_option("--degree", sa.a.expected_degree, "Expected degree of the random DAG");
    syn_a->add_option("--edge-probability", sa.a.edge_probability, "Edge probability (overrides --degree)");
    syn_a->add_option("--fd-fraction", sa.a.fd_leaf_fraction, "Share of leaves receiving FD children");
    syn_b->add_option("--rows", sa.b.rows, "Rows");
    syn_b->add_option("--cardinality", sa.b.cardinality, "Cardinality of Y");
    syn_b->add_option("--k", sa.b.k, "Number of abnormal values of Y");
    syn_b->add_option("--mu", sa.b.mu, "Mean of Z for normal values");
    syn_b->add_option("--mu-star", sa.b.mu_star, "Mean of Z for abnormal values");
    syn_b->add_option("--std", sa.b.stddev, "Standard deviation of Z");
    syn_b->add_option("--boost", sa.b.boost, "Odds boost of abnormal values under x1");
    syn_b->add_option("--max-truth-share", sa.b.max_truth_share, "Cap on the abnormal share under x1");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Run a benchmark suite and print CSV");
    bench->add_option("suite", ba.suite, "syn-b, sensitivity or syn-a")->check(CLI::IsMember({"syn-b", "sensitivity", "syn-a"}));
    bench->add_option("--seeds", ba.seeds, "Seeds per cell");
    bench->add_option("--out", ba.out, "Output CSV");

    std::string host = "127.0.0.1", store;
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port");
    serve->add_option("--store", store, "Directory for persisted sessions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*learn) return cmd_learn(la);
        if (*expl) return cmd_explain(ea);
        if (*syn_a) return cmd_synth_a(sa);
        if (*syn_b) return cmd_synth_b(sa);
        if (*bench) return cmd_bench(ba);
        if (*serve) {
            xda::Service service(store.empty() ? std::nullopt : std::optional<std::string>(store));
            std::cerr << "listening on " << host << ":" << port << "\n";
            return xda::serve(service, host, port);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
