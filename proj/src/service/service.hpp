#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "orchestrator.hpp"

namespace forest {

struct ServiceOptions {
    size_t max_sessions = 64;
    std::chrono::seconds idle_timeout{30 * 60};
    std::string cors_origin = "*";
    // Defaults for sessions; a request's "options" object overrides them.
    SynthesisOptions synthesis;
};

// Session registry and JSON endpoints:
//   POST /api/sessions             {valid[], invalid[], conditional_invalid[], options} -> 201 {id}
//   GET  /api/sessions/{id}        -> snapshot
//   POST /api/sessions/{id}/answer {valid} -> 204
//   POST /api/eval                 {regex, conditions[], input}
class SessionService {
public:
    explicit SessionService(ServiceOptions options = {});
    ~SessionService();
    SessionService(const SessionService&) = delete;
    SessionService& operator=(const SessionService&) = delete;

    // Blocks until server().stop() is called.
    bool listen(const std::string& host, int port);
    httplib::Server& server() { return server_; }

    // Sessions that have not reached done or failed.
    size_t active_sessions();
    size_t stored_sessions();
    // Drops sessions idle for longer than the idle timeout.
    void evict_idle();

private:
    struct Session;

    std::shared_ptr<Session> lookup(const std::string& id);
    void routes();

    ServiceOptions options_;
    std::mutex mu_;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
    uint64_t counter_ = 0;
    httplib::Server server_;
};

// {matches, captures|null, satisfies_conditions|null} for one input.
nlohmann::json evaluate(const RegexValidation& v, std::string_view input);
// Parses an /api/eval body {regex, conditions[], input} and evaluates it.
// Throws FormatError on a bad regex or condition.
nlohmann::json evaluate(const nlohmann::json& request);

}  // namespace forest
