#include "service.hpp"

#include <condition_variable>
#include <deque>
#include <random>
#include <thread>

#include "regex_engine.hpp"

namespace forest {

using nlohmann::json;

namespace {

json conditions_json(const std::vector<CaptureCondition>& conds)
{
    json out = json::array();
    for (const auto& c : conds)
        out.push_back(to_string(c));
    return out;
}

json stats_json(const SessionStats& s)
{
    return {{"programs_enumerated", s.programs_enumerated}, {"questions", s.questions}, {"seconds", s.seconds},
            {"question_cap_hit", s.question_cap_hit}};
}

std::vector<std::string> string_list(const json& body, const char* key)
{
    if (!body.contains(key))
        return {};
    const json& v = body.at(key);
    if (!v.is_array())
        throw FormatError(std::string(key) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string())
            throw FormatError(std::string(key) + " must be an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

SynthesisOptions apply_options(const json& o, SynthesisOptions base)
{
    if (o.is_null())
        return base;
    if (!o.is_object())
        throw FormatError("options must be an object");
    auto flag = [&](const char* key, bool& dst) {
        if (o.contains(key)) {
            if (!o[key].is_boolean())
                throw FormatError(std::string(key) + " must be a boolean");
            dst = o[key].get<bool>();
        }
    };
    if (o.contains("mode")) {
        auto m = o["mode"].is_string() ? o["mode"].get<std::string>() : "";
        if (m == "multitree")
            base.mode = SearchMode::MultiTree;
        else if (m == "ktree")
            base.mode = SearchMode::KTree;
        else
            throw FormatError("mode must be multitree or ktree");
    }
    bool pruning = base.pruning.any();
    flag("pruning", pruning);
    if (!pruning)
        base.pruning = PruningOptions::none();
    flag("split", base.split);
    flag("accept_first", base.accept_first);
    if (o.contains("timeout")) {
        if (!o["timeout"].is_number() || o["timeout"].get<double>() <= 0)
            throw FormatError("timeout must be a positive number");
        base.timeout_seconds = o["timeout"].get<double>();
    }
    if (o.contains("max_questions")) {
        if (!o["max_questions"].is_number_integer() || o["max_questions"].get<int>() < 0)
            throw FormatError("max_questions must be a non-negative integer");
        base.max_questions = o["max_questions"].get<int>();
    }
    return base;
}

void send_json(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message)
{
    send_json(res, status, {{"error", message}});
}

std::string new_id(uint64_t counter)
{
    static std::mutex mu;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mu);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016llx%04llx", static_cast<unsigned long long>(rng()),
                  static_cast<unsigned long long>(counter & 0xffff));
    return buf;
}

}  // namespace

struct SessionService::Session {
    std::string id;
    std::unique_ptr<SynthesisSession> synth;
    std::shared_ptr<std::atomic<bool>> stop = std::make_shared<std::atomic<bool>>(false);

    std::mutex mu;
    std::condition_variable cv;
    std::deque<bool> answers;
    bool cancelled = false;

    // snapshot, guarded by mu
    std::string state = "running";
    std::optional<std::string> question;
    std::string phase;
    json result;
    json stats = stats_json({});
    json transcript = json::array();
    std::string reason;
    bool best_effort = false;
    std::chrono::steady_clock::time_point last_access = std::chrono::steady_clock::now();

    std::thread worker;

    ~Session()
    {
        {
            std::lock_guard lock(mu);
            cancelled = true;
            stop->store(true);
        }
        cv.notify_all();
        if (worker.joinable())
            worker.join();
    }

    bool terminal()
    {
        std::lock_guard lock(mu);
        return state == "done" || state == "failed";
    }

    void record(const Step& step)
    {
        const auto& s = *synth;
        stats = stats_json(s.stats());
        transcript = json::array();
        for (const auto& t : s.transcript())
            transcript.push_back({{"question", t.question},
                                  {"phase", t.captures ? "captures" : "regex"},
                                  {"valid", t.valid}});
        switch (step.kind) {
        case Step::Kind::Question:
            state = "awaiting_answer";
            question = step.question;
            phase = s.phase() == Phase::CaptureDisambiguation ? "captures" : "regex";
            break;
        case Step::Kind::Done:
        case Step::Kind::BestEffort:
            state = "done";
            best_effort = step.kind == Step::Kind::BestEffort;
            result = {{"regex", emit(s.result()->regex)}, {"conditions", conditions_json(s.result()->conditions)}};
            break;
        case Step::Kind::Failed:
            state = "failed";
            reason = step.reason;
            break;
        }
    }

    void run()
    {
        while (true) {
            Step step = synth->advance();
            std::unique_lock lock(mu);
            record(step);
            if (step.kind != Step::Kind::Question)
                return;
            cv.wait(lock, [&] { return cancelled || !answers.empty(); });
            if (cancelled) {
                synth->abort();
                state = "failed";
                question.reset();
                reason = "aborted";
                return;
            }
            bool valid = answers.front();
            answers.pop_front();
            lock.unlock();
            synth->answer(valid);
        }
    }

    json snapshot()
    {
        std::lock_guard lock(mu);
        last_access = std::chrono::steady_clock::now();
        json out = {{"id", id}, {"state", state}, {"stats", stats}, {"transcript", transcript}};
        out["question"] = question ? json{{"text", *question}, {"phase", phase}} : json(nullptr);
        out["result"] = result.is_null() ? json(nullptr) : result;
        if (state == "done")
            out["best_effort"] = best_effort;
        if (state == "failed")
            out["reason"] = reason;
        return out;
    }

    // False when no question is pending.
    bool answer(bool valid)
    {
        {
            std::lock_guard lock(mu);
            last_access = std::chrono::steady_clock::now();
            if (state != "awaiting_answer")
                return false;
            answers.push_back(valid);
            state = "running";
            question.reset();
        }
        cv.notify_all();
        return true;
    }
};

json evaluate(const json& request)
{
    if (!request.is_object() || !request.contains("regex") || !request["regex"].is_string() ||
        !request.contains("input") || !request["input"].is_string())
        throw FormatError("expected {regex, conditions[], input}");
    RegexValidation v;
    try {
        v.regex = parse_regex(request["regex"].get<std::string>());
    } catch (const RegexError& e) {
        throw FormatError(e.what());
    }
    for (const auto& c : string_list(request, "conditions")) {
        v.conditions.push_back(parse_condition(c));
        if (v.conditions.back().group >= count_groups(v.regex))
            throw FormatError("condition '" + c + "' names a missing group");
    }
    return evaluate(v, request["input"].get<std::string>());
}

json evaluate(const RegexValidation& v, std::string_view input)
{
    json out;
    Verdict verdict = classify(v, input);
    out["matches"] = verdict != Verdict::RejectFormat;
    if (verdict == Verdict::RejectFormat) {
        out["captures"] = nullptr;
        out["satisfies_conditions"] = nullptr;
        return out;
    }
    Captures caps = extract_captures(v.regex, input);
    out["captures"] = caps.status == Captures::Status::Ok ? json(caps.values) : json(nullptr);
    out["satisfies_conditions"] = verdict == Verdict::Accept;
    return out;
}

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) { routes(); }

SessionService::~SessionService()
{
    server_.stop();
    std::unordered_map<std::string, std::shared_ptr<Session>> drop;
    {
        std::lock_guard lock(mu_);
        drop.swap(sessions_);
    }
}

bool SessionService::listen(const std::string& host, int port) { return server_.listen(host, port); }

size_t SessionService::active_sessions()
{
    std::lock_guard lock(mu_);
    size_t n = 0;
    for (auto& [id, s] : sessions_)
        n += !s->terminal();
    return n;
}

size_t SessionService::stored_sessions()
{
    std::lock_guard lock(mu_);
    return sessions_.size();
}

void SessionService::evict_idle()
{
    std::vector<std::shared_ptr<Session>> drop;
    {
        std::lock_guard lock(mu_);
        auto now = std::chrono::steady_clock::now();
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            bool idle;
            {
                std::lock_guard slock(it->second->mu);
                idle = now - it->second->last_access > options_.idle_timeout;
            }
            if (idle) {
                drop.push_back(it->second);
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
    }
    // joined here, outside the registry lock
    drop.clear();
}

std::shared_ptr<SessionService::Session> SessionService::lookup(const std::string& id)
{
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

void SessionService::routes()
{
    server_.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                 {"Access-Control-Allow-Headers", "Content-Type"}});
    server_.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server_.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        evict_idle();
        auto session = std::make_shared<Session>();
        try {
            json body = json::parse(req.body);
            if (!body.is_object())
                throw FormatError("expected a JSON object");
            ExampleSet examples = make_example_set(string_list(body, "valid"), string_list(body, "invalid"),
                                                   string_list(body, "conditional_invalid"));
            SynthesisOptions so = apply_options(body.value("options", json(nullptr)), options_.synthesis);
            so.stop = session->stop;
            session->synth = std::make_unique<SynthesisSession>(std::move(examples), so);
        } catch (const std::exception& e) {
            send_error(res, 400, e.what());
            return;
        }
        {
            std::lock_guard lock(mu_);
            size_t active = 0;
            for (auto& [id, s] : sessions_)
                active += !s->terminal();
            if (active >= options_.max_sessions) {
                send_error(res, 503, "session limit reached");
                return;
            }
            session->id = new_id(++counter_);
            sessions_.emplace(session->id, session);
            session->worker = std::thread([s = session.get()] { s->run(); });
        }
        send_json(res, 201, {{"id", session->id}});
    });

    server_.Get(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto s = lookup(req.matches[1]);
        if (!s) {
            send_error(res, 404, "unknown session");
            return;
        }
        send_json(res, 200, s->snapshot());
    });

    server_.Post(R"(/api/sessions/([^/]+)/answer)", [this](const httplib::Request& req, httplib::Response& res) {
        auto s = lookup(req.matches[1]);
        if (!s) {
            send_error(res, 404, "unknown session");
            return;
        }
        bool valid;
        try {
            json body = json::parse(req.body);
            if (!body.is_object() || !body.contains("valid") || !body["valid"].is_boolean())
                throw FormatError("expected {\"valid\": boolean}");
            valid = body["valid"].get<bool>();
        } catch (const std::exception& e) {
            send_error(res, 400, e.what());
            return;
        }
        if (!s->answer(valid)) {
            send_error(res, 409, "no pending question");
            return;
        }
        res.status = 204;
    });

    server_.Post("/api/eval", [](const httplib::Request& req, httplib::Response& res) {
        try {
            send_json(res, 200, evaluate(json::parse(req.body)));
        } catch (const std::exception& e) {
            send_error(res, 400, e.what());
        }
    });
}

}  // namespace forest
