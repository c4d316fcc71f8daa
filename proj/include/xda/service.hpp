#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "xda/dataset.hpp"
#include "xda/explainer.hpp"
#include "xda/fd.hpp"
#include "xda/learner.hpp"

namespace httplib {
class Server;
}

namespace xda {

struct Session {
    std::string id;
    Dataset data;
    FDGraph fd;
    std::optional<AugmentedPag> graph;
    LearnerConfig config;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

LearnerConfig learner_config_from_json(const nlohmann::json& j);
nlohmann::json learner_config_to_json(const LearnerConfig& cfg);
/// Parses a why-request body; throws nlohmann::json::exception or QueryError on malformed input.
WhyQuery why_query_from_json(const nlohmann::json& j);

/// Session store behind the HTTP endpoints. Handlers are plain methods so
/// they can be exercised without a socket.
class Service {
public:
    /// With a directory, sessions are written there and reloaded on construction.
    explicit Service(std::optional<std::string> persist_dir = std::nullopt);

    ApiResponse health() const;
    ApiResponse upload(std::string_view csv);
    ApiResponse learn(const std::string& id, std::string_view body);
    ApiResponse graph(const std::string& id) const;
    ApiResponse why(const std::string& id, std::string_view body) const;

    std::size_t session_count() const;
    void mount(httplib::Server& server);

private:
    std::shared_ptr<const Session> find(const std::string& id) const;
    void persist_index() const;
    void persist_session(const Session& s) const;
    void load();

    std::optional<std::string> dir_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<const Session>> sessions_;
    std::size_t next_id_ = 1;
};

/// Blocks serving the API on host:port.
int serve(Service& service, const std::string& host, int port);

}  // namespace xda
