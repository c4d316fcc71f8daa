#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "xda/dataset.hpp"
#include "xda/independence.hpp"
#include "xda/service.hpp"
#include "xda/synth.hpp"

using namespace xda;
using nlohmann::json;

namespace {

std::string syn_b_csv(std::uint64_t seed, std::vector<std::string>* truth = nullptr) {
    SynBConfig cfg;
    cfg.rows = 4000;
    auto inst = gen_syn_b(cfg, seed);
    if (truth) *truth = inst.truth;
    return to_csv(inst.data);
}

const char* kWhy = R"({"measure":"Z","agg":"sum","foreground":{"dim":"X","v1":"x1","v2":"x2"}})";

std::string upload_id(Service& svc, const std::string& csv) {
    auto r = svc.upload(csv);
    REQUIRE(r.status == 201);
    return r.body["id"].get<std::string>();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("health") {
    Service svc;
    auto r = svc.health();
    CHECK(r.status == 200);
    CHECK(r.body == json{{"status", "ok"}});
}

TEST_CASE("upload") {
    Service svc;
    auto r = svc.upload("City,State\nc1,s1\nc2,s1\nc3,s2\n");
    CHECK(r.status == 201);
    CHECK(r.body["id"] == "ds1");
    CHECK(r.body["schema"]["columns"].size() == 2);
    CHECK(svc.upload("a,b\n1,2\n").body["id"] == "ds2");
    CHECK(svc.session_count() == 2);

    CHECK(svc.upload("").status == 400);
    CHECK(svc.upload("a,b\n1\n").status == 400);
    CHECK(svc.session_count() == 2);
}

TEST_CASE("learn errors") {
    Service svc;
    const auto id = upload_id(svc, syn_b_csv(1));
    CHECK(svc.learn("ds99", "").status == 404);
    CHECK(svc.learn(id, "{not json").status == 400);
    CHECK(svc.learn(id, R"({"config":{"alpha":2}})").status == 400);
    CHECK(svc.learn(id, R"({"config":{"statistic":"t"}})").status == 400);
    CHECK(svc.learn(id, R"({"config":{"bins":1}})").status == 400);
    CHECK(svc.graph(id).status == 409);
}

TEST_CASE("graph and why status codes") {
    Service svc;
    const auto id = upload_id(svc, syn_b_csv(2));
    CHECK(svc.graph("nope").status == 404);
    CHECK(svc.why("nope", kWhy).status == 404);
    CHECK(svc.why(id, kWhy).status == 409);

    auto learned = svc.learn(id, R"({"config":{"alpha":0.01}})");
    REQUIRE(learned.status == 200);
    auto g = svc.graph(id);
    CHECK(g.status == 200);
    CHECK(g.body == learned.body);
    CHECK(g.body["nodes"].size() == 3);

    CHECK(svc.why(id, "[").status == 400);
    CHECK(svc.why(id, R"({"agg":"sum"})").status == 400);
    CHECK(svc.why(id, R"({"measure":"Z","agg":"median","foreground":{"dim":"X","v1":"x1","v2":"x2"}})").status == 400);
    CHECK(svc.why(id, R"({"measure":"Z","foreground":{"dim":"X","v1":"x1","v2":"x2"},"top":-1})").status == 400);
    // Well-formed but degenerate queries.
    CHECK(svc.why(id, R"({"measure":"Z","foreground":{"dim":"X","v1":"x1","v2":"x1"}})").status == 422);
    CHECK(svc.why(id, R"({"measure":"Y","foreground":{"dim":"X","v1":"x1","v2":"x2"}})").status == 422);
    CHECK(svc.why(id, R"({"measure":"Z","foreground":{"dim":"X","v1":"x1","v2":"x9"}})").status == 422);
    CHECK(svc.why(id, R"({"measure":"Z","foreground":{"dim":"X","v1":"x1","v2":"x2"},"epsilon_frac":1.5})").status == 422);
}

TEST_CASE("upload, learn and why on SYN-B ranks the ground truth first") {
    Service svc;
    std::vector<std::string> truth;
    const auto id = upload_id(svc, syn_b_csv(3, &truth));
    auto learned = svc.learn(id, "");
    REQUIRE(learned.status == 200);
    // Three observed variables in a chain leave every mark undetermined: X o-o Y o-o Z.
    CHECK(learned.body["edges"].size() == 2);
    for (const auto& e : learned.body["edges"]) {
        CHECK(e["mark_u"] == "circle");
        CHECK(e["mark_v"] == "circle");
    }

    for (const char* agg : {"sum", "avg"}) {
        json q = json::parse(kWhy);
        q["agg"] = agg;
        reset_ci_test_count();
        auto r = svc.why(id, q.dump());
        CHECK(ci_test_count() == 0);
        REQUIRE(r.status == 200);
        CHECK(r.body["delta"].get<double>() > 0);
        CHECK(r.body["swapped"] == false);
        REQUIRE_FALSE(r.body["explanations"].empty());
        const auto& top = r.body["explanations"][0];
        CHECK(top["dimension"] == "Y");
        CHECK(top["type"] == "non-causal");
        CHECK(r.body["semantics"]["Y"]["rule"] == "R6");
        auto values = top["values"].get<std::vector<std::string>>();
        std::sort(values.begin(), values.end());
        auto expected = truth;
        std::sort(expected.begin(), expected.end());
        CHECK(values == expected);
    }

    json q = json::parse(kWhy);
    q["top"] = 0;
    auto none = svc.why(id, q.dump());
    CHECK(none.status == 200);
    CHECK(none.body["explanations"].empty());

    // Swapping the foreground values flips the reported orientation.
    q = json::parse(kWhy);
    q["foreground"]["v1"] = "x2";
    q["foreground"]["v2"] = "x1";
    CHECK(svc.why(id, q.dump()).body["swapped"] == true);
}

TEST_CASE("sessions persist across restarts") {
    TempDir dir("xda_service_persist");
    std::string id;
    json graph;
    {
        Service svc(dir.path.string());
        id = upload_id(svc, syn_b_csv(4));
        upload_id(svc, "a,b\nx,y\n");
        auto r = svc.learn(id, R"({"config":{"alpha":0.02,"bins":4}})");
        REQUIRE(r.status == 200);
        graph = r.body;
    }
    Service again(dir.path.string());
    CHECK(again.session_count() == 2);
    auto g = again.graph(id);
    CHECK(g.status == 200);
    CHECK(g.body == graph);
    CHECK(again.graph("ds2").status == 409);
    CHECK(again.why(id, kWhy).status == 200);
    CHECK(again.upload("a\n1\n").body["id"] == "ds3");
}

TEST_CASE("HTTP endpoints over a real socket") {
    Service svc;
    httplib::Server server;
    svc.mount(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client cli("127.0.0.1", port);
    auto health = cli.Get("/v1/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(json::parse(health->body)["status"] == "ok");

    std::vector<std::string> truth;
    httplib::MultipartFormDataItems items = {{"file", syn_b_csv(5, &truth), "synb.csv", "text/csv"}};
    auto up = cli.Post("/v1/datasets", items);
    REQUIRE(up);
    CHECK(up->status == 201);
    const auto id = json::parse(up->body)["id"].get<std::string>();

    auto raw = cli.Post("/v1/datasets", "a,b\n1,2\n", "text/csv");
    REQUIRE(raw);
    CHECK(raw->status == 201);

    httplib::MultipartFormDataItems wrong = {{"other", "a\n1\n", "x.csv", "text/csv"}};
    auto bad = cli.Post("/v1/datasets", wrong);
    REQUIRE(bad);
    CHECK(bad->status == 400);

    auto early = cli.Post("/v1/datasets/" + id + "/why", kWhy, "application/json");
    REQUIRE(early);
    CHECK(early->status == 409);

    auto learned = cli.Post("/v1/datasets/" + id + "/learn", "{}", "application/json");
    REQUIRE(learned);
    CHECK(learned->status == 200);
    auto g = cli.Get("/v1/datasets/" + id + "/graph");
    REQUIRE(g);
    CHECK(g->status == 200);
    CHECK(g->get_header_value("Content-Type") == "application/json");

    auto why = cli.Post("/v1/datasets/" + id + "/why", kWhy, "application/json");
    REQUIRE(why);
    CHECK(why->status == 200);
    auto top = json::parse(why->body)["explanations"][0]["values"].get<std::vector<std::string>>();
    std::sort(top.begin(), top.end());
    std::sort(truth.begin(), truth.end());
    CHECK(top == truth);

    auto missing = cli.Get("/v1/datasets/ds42/graph");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    server.stop();
    worker.join();
}

TEST_CASE("config json round trip") {
    LearnerConfig cfg;
    cfg.alpha = 0.03;
    cfg.bins = 7;
    cfg.statistic = CiStatistic::ChiSquared;
    auto back = learner_config_from_json(learner_config_to_json(cfg));
    CHECK(back.alpha == 0.03);
    CHECK(back.bins == 7);
    CHECK(back.statistic == CiStatistic::ChiSquared);
    CHECK(learner_config_from_json(nullptr).alpha == LearnerConfig{}.alpha);

    auto q = why_query_from_json(json::parse(
        R"({"measure":"Z","agg":"avg","foreground":{"dim":"X","v1":"a","v2":"b"},"background":[{"dim":"Y","value":"y1"}],"epsilon_frac":0.1})"));
    CHECK(q.agg == Aggregate::Avg);
    CHECK(q.background.filters().size() == 1);
    CHECK(q.epsilon_frac == 0.1);
}
