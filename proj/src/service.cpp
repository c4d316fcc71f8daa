#include "xda/service.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>

#include "xda/error.hpp"

namespace xda {

namespace fs = std::filesystem;
using nlohmann::json;

LearnerConfig learner_config_from_json(const json& j) {
    LearnerConfig cfg;
    if (j.is_null()) return cfg;
    if (!j.is_object()) throw QueryError("config must be an object");
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.max_cond_size = j.value("max_cond", cfg.max_cond_size);
    cfg.bins = j.value("bins", cfg.bins);
    cfg.path_cap = j.value("path_cap", cfg.path_cap);
    cfg.ext_d_sep_pass = j.value("ext_d_sep", cfg.ext_d_sep_pass);
    const std::string stat = j.value("statistic", std::string("g2"));
    if (stat == "g2") cfg.statistic = CiStatistic::GSquared;
    else if (stat == "chi2") cfg.statistic = CiStatistic::ChiSquared;
    else throw QueryError("statistic must be g2 or chi2");
    cfg.validate();
    return cfg;
}

json learner_config_to_json(const LearnerConfig& cfg) {
    return {{"alpha", cfg.alpha},
            {"max_cond", cfg.max_cond_size},
            {"bins", cfg.bins},
            {"path_cap", cfg.path_cap},
            {"ext_d_sep", cfg.ext_d_sep_pass},
            {"statistic", cfg.statistic == CiStatistic::GSquared ? "g2" : "chi2"}};
}

WhyQuery why_query_from_json(const json& j) {
    if (!j.is_object()) throw QueryError("request body must be an object");
    WhyQuery q;
    q.measure = j.at("measure").get<std::string>();
    q.agg = parse_aggregate(j.value("agg", std::string("sum")));
    const json& f = j.at("foreground");
    q.foreground = f.at("dim").get<std::string>();
    q.v1 = f.at("v1").get<std::string>();
    q.v2 = f.at("v2").get<std::string>();
    std::vector<Filter> bg;
    if (j.contains("background"))
        for (const auto& b : j.at("background"))
            bg.push_back({b.at("dim").get<std::string>(), b.at("value").get<std::string>()});
    q.background = Subspace(std::move(bg));
    if (j.contains("epsilon_frac")) q.epsilon_frac = j.at("epsilon_frac").get<double>();
    if (j.contains("epsilon")) q.epsilon = j.at("epsilon").get<double>();
    if (j.contains("sigma")) q.sigma = j.at("sigma").get<double>();
    return q;
}

namespace {

ApiResponse error(int status, const std::string& message) { return {status, {{"error", message}}}; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + p.string());
        out << text;
    }
    fs::rename(tmp, p);
}

CsvOptions hints_from_schema(const json& schema) {
    CsvOptions o;
    for (const auto& c : schema.at("columns"))
        o.kind_hints[c.at("name").get<std::string>()] =
            c.at("kind").get<std::string>() == "measure" ? ColumnKind::Measure : ColumnKind::Dimension;
    return o;
}

}  // namespace

Service::Service(std::optional<std::string> persist_dir) : dir_(std::move(persist_dir)) {
    if (dir_) {
        fs::create_directories(*dir_);
        load();
    }
}

ApiResponse Service::health() const { return {200, {{"status", "ok"}}}; }

std::size_t Service::session_count() const {
    std::shared_lock lock(mu_);
    return sessions_.size();
}

std::shared_ptr<const Session> Service::find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

ApiResponse Service::upload(std::string_view csv) {
    auto s = std::make_shared<Session>();
    try {
        s->data = parse_csv(csv);
        s->fd = discover_fds(s->data);
    } catch (const Error& e) {
        return error(400, e.what());
    }
    {
        std::unique_lock lock(mu_);
        s->id = "ds" + std::to_string(next_id_++);
        sessions_[s->id] = s;
    }
    persist_session(*s);
    persist_index();
    return {201, {{"id", s->id}, {"schema", s->data.schema_json()}}};
}

ApiResponse Service::learn(const std::string& id, std::string_view body) {
    auto cur = find(id);
    if (!cur) return error(404, "unknown dataset " + id);
    LearnerConfig cfg;
    try {
        json j = body.empty() ? json(nullptr) : json::parse(body);
        if (j.is_object() && j.contains("config")) j = j.at("config");
        cfg = learner_config_from_json(j);
    } catch (const json::exception& e) {
        return error(400, e.what());
    } catch (const Error& e) {
        return error(400, e.what());
    }
    auto next = std::make_shared<Session>(*cur);
    next->config = cfg;
    try {
        next->graph = xda::learn(next->data, next->fd, cfg);
    } catch (const Error& e) {
        return error(422, e.what());
    }
    {
        std::unique_lock lock(mu_);
        sessions_[id] = next;
    }
    persist_session(*next);
    persist_index();
    return {200, next->graph->to_json()};
}

ApiResponse Service::graph(const std::string& id) const {
    auto s = find(id);
    if (!s) return error(404, "unknown dataset " + id);
    if (!s->graph) return error(409, "no graph learned for " + id);
    return {200, s->graph->to_json()};
}

ApiResponse Service::why(const std::string& id, std::string_view body) const {
    auto s = find(id);
    if (!s) return error(404, "unknown dataset " + id);
    if (!s->graph) return error(409, "learn a graph before asking why-queries");
    WhyQuery q;
    ExplainOptions opts;
    opts.bins = s->config.bins;
    try {
        json j = json::parse(body);
        q = why_query_from_json(j);
        if (j.contains("top")) {
            const long top = j.at("top").get<long>();
            if (top < 0) return error(400, "top must be non-negative");
            opts.top = static_cast<std::size_t>(top);
        }
    } catch (const json::exception& e) {
        return error(400, e.what());
    } catch (const Error& e) {
        return error(400, e.what());
    }
    try {
        ExplainResult r = explain(s->data, s->graph->graph, q, opts);
        return {200, r.to_json()};
    } catch (const Error& e) {
        return error(422, e.what());
    }
}

void Service::persist_index() const {
    if (!dir_) return;
    json index = json::object();
    {
        std::shared_lock lock(mu_);
        json ids = json::array();
        for (const auto& [id, s] : sessions_) ids.push_back(id);
        index["sessions"] = ids;
        index["next_id"] = next_id_;
    }
    write_file(fs::path(*dir_) / "sessions.json", index.dump(2));
}

void Service::persist_session(const Session& s) const {
    if (!dir_) return;
    const fs::path d = fs::path(*dir_) / s.id;
    fs::create_directories(d);
    write_file(d / "data.csv", to_csv(s.data));
    write_file(d / "schema.json", s.data.schema_json().dump(2));
    write_file(d / "config.json", learner_config_to_json(s.config).dump(2));
    if (s.graph) write_file(d / "graph.json", s.graph->to_json().dump(2));
}

void Service::load() {
    const fs::path index_path = fs::path(*dir_) / "sessions.json";
    if (!fs::exists(index_path)) return;
    const json index = json::parse(read_file(index_path));
    next_id_ = index.value("next_id", std::size_t{1});
    for (const auto& idj : index.at("sessions")) {
        const std::string id = idj.get<std::string>();
        const fs::path d = fs::path(*dir_) / id;
        auto s = std::make_shared<Session>();
        s->id = id;
        s->data = parse_csv(read_file(d / "data.csv"), hints_from_schema(json::parse(read_file(d / "schema.json"))));
        s->fd = discover_fds(s->data);
        if (fs::exists(d / "config.json")) s->config = learner_config_from_json(json::parse(read_file(d / "config.json")));
        if (fs::exists(d / "graph.json")) s->graph = AugmentedPag::from_json(json::parse(read_file(d / "graph.json")));
        sessions_[id] = s;
    }
}

void Service::mount(httplib::Server& server) {
    auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Get("/v1/health", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, health()); });
    server.Post("/v1/datasets", [this, reply](const httplib::Request& req, httplib::Response& res) {
        if (req.is_multipart_form_data()) {
            if (!req.has_file("file")) return reply(res, error(400, "multipart upload needs a 'file' part"));
            return reply(res, upload(req.get_file_value("file").content));
        }
        reply(res, upload(req.body));
    });
    server.Post(R"(/v1/datasets/([^/]+)/learn)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, learn(req.matches[1], req.body));
    });
    server.Get(R"(/v1/datasets/([^/]+)/graph)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, graph(req.matches[1]));
    });
    server.Post(R"(/v1/datasets/([^/]+)/why)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, why(req.matches[1], req.body));
    });
}

int serve(Service& service, const std::string& host, int port) {
    httplib::Server server;
    service.mount(server);
    return server.listen(host, port) ? 0 : 1;
}

}  // namespace xda
