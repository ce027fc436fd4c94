#include "forest/forest.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "bench.hpp"
#include "json.hpp"
#include "orchestrator.hpp"
#include "regex_engine.hpp"
#include "service.hpp"

using namespace forest;
using nlohmann::json;

struct forest_options {
    SuiteOptions suite;
    ServiceOptions service;
};

struct forest_session {
    std::unique_ptr<SynthesisSession> session;
    std::string regex;
    std::vector<std::string> conditions;
};

struct forest_validation {
    RegexValidation v;
};

namespace {

thread_local std::string last_error;

forest_status fail(forest_status s, std::string message)
{
    last_error = std::move(message);
    return s;
}

// Maps exceptions escaping the core to status codes.
template <typename F>
forest_status guarded(F&& f)
{
    try {
        last_error.clear();
        return f();
    } catch (const FormatError& e) {
        return fail(FOREST_E_FORMAT, e.what());
    } catch (const RegexError& e) {
        return fail(FOREST_E_FORMAT, e.what());
    } catch (const GenerationError& e) {
        return fail(FOREST_E_GENERATION, e.what());
    } catch (const SessionError& e) {
        return fail(FOREST_E_STATE, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(FOREST_E_IO, e.what());
    } catch (const std::exception& e) {
        return fail(FOREST_E_INTERNAL, e.what());
    } catch (...) {
        return fail(FOREST_E_INTERNAL, "unknown error");
    }
}

char* copy_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out)
        std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

bool parse_switch(const std::string& v, bool& out)
{
    if (v == "on" || v == "true" || v == "1")
        out = true;
    else if (v == "off" || v == "false" || v == "0")
        out = false;
    else
        return false;
    return true;
}

std::vector<std::string> to_list(const char* const* items, size_t n)
{
    std::vector<std::string> out;
    for (size_t i = 0; i < n; ++i)
        out.emplace_back(items[i] ? items[i] : "");
    return out;
}

forest_status make_session(ExampleSet examples, const forest_options* options, forest_session** out)
{
    SynthesisOptions so = options ? options->suite.synthesis : SynthesisOptions{};
    if (options)
        so.timeout_seconds = options->suite.timeout_seconds;
    auto* s = new forest_session;
    s->session = std::make_unique<SynthesisSession>(std::move(examples), so);
    *out = s;
    return FOREST_OK;
}

void refresh(forest_session* s)
{
    const auto& r = s->session->result();
    s->regex = r ? emit(r->regex) : "";
    s->conditions.clear();
    if (r)
        for (const auto& c : r->conditions)
            s->conditions.push_back(to_string(c));
}

}  // namespace

extern "C" {

const char* forest_version(void) { return "1.0.0"; }

const char* forest_status_name(forest_status status)
{
    switch (status) {
    case FOREST_OK:
        return "ok";
    case FOREST_E_ARGUMENT:
        return "invalid argument";
    case FOREST_E_FORMAT:
        return "format error";
    case FOREST_E_STATE:
        return "invalid state";
    case FOREST_E_IO:
        return "i/o error";
    case FOREST_E_GENERATION:
        return "generation error";
    case FOREST_E_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char* forest_last_error(void) { return last_error.c_str(); }

void forest_string_free(char* s) { std::free(s); }

forest_status forest_options_new(forest_options** out)
{
    if (!out)
        return fail(FOREST_E_ARGUMENT, "null output");
    return guarded([&] {
        *out = new forest_options;
        // interactive default; benchmarks pass their own timeout
        (*out)->suite.timeout_seconds = (*out)->suite.synthesis.timeout_seconds;
        return FOREST_OK;
    });
}

void forest_options_free(forest_options* options) { delete options; }

forest_status forest_options_set(forest_options* options, const char* key, const char* value)
{
    if (!options || !key || !value)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&]() -> forest_status {
        const std::string k = key;
        const std::string v = value;
        auto& so = options->suite.synthesis;
        auto bad = [&] { return fail(FOREST_E_ARGUMENT, "bad value '" + v + "' for option " + k); };
        auto number = [&](double& dst, double min) {
            char* end = nullptr;
            double d = std::strtod(v.c_str(), &end);
            if (v.empty() || *end != '\0' || !(d >= min))
                return false;
            dst = d;
            return true;
        };
        double d = 0;
        bool b = false;
        if (k == "mode") {
            if (v == "multitree")
                so.mode = SearchMode::MultiTree;
            else if (v == "ktree")
                so.mode = SearchMode::KTree;
            else
                return bad();
        } else if (k == "pruning") {
            if (!parse_switch(v, b))
                return bad();
            so.pruning = b ? PruningOptions{} : PruningOptions::none();
        } else if (k == "split") {
            if (!parse_switch(v, so.split))
                return bad();
        } else if (k == "accept_first") {
            if (!parse_switch(v, so.accept_first))
                return bad();
        } else if (k == "timeout") {
            if (!number(d, 0))
                return bad();
            options->suite.timeout_seconds = d;
        } else if (k == "max_questions") {
            if (!number(d, 0))
                return bad();
            so.max_questions = static_cast<int>(d);
        } else if (k == "solver") {
            so.solver = v == "builtin" ? "" : v;
        } else if (k == "solver_timeout") {
            if (!number(d, 0))
                return bad();
            so.solver_timeout = d;
        } else if (k == "seed") {
            if (!number(d, 0))
                return bad();
            options->suite.seed = static_cast<uint64_t>(d);
        } else if (k == "subsample") {
            if (!number(d, 0))
                return bad();
            options->suite.subsample = static_cast<size_t>(d);
        } else if (k == "jobs") {
            if (!number(d, 1))
                return bad();
            options->suite.jobs = static_cast<unsigned>(d);
        } else if (k == "held_out") {
            if (!number(d, 1))
                return bad();
            options->suite.held_out_per_list = static_cast<size_t>(d);
        } else if (k == "max_sessions") {
            if (!number(d, 1))
                return bad();
            options->service.max_sessions = static_cast<size_t>(d);
        } else if (k == "idle_timeout") {
            if (!number(d, 1))
                return bad();
            options->service.idle_timeout = std::chrono::seconds(static_cast<long>(d));
        } else if (k == "cors_origin") {
            options->service.cors_origin = v;
        } else {
            return fail(FOREST_E_ARGUMENT, "unknown option " + k);
        }
        return FOREST_OK;
    });
}

forest_status forest_session_new(const char* const* valid, size_t n_valid, const char* const* invalid,
                                 size_t n_invalid, const char* const* conditional_invalid, size_t n_conditional_invalid,
                                 const forest_options* options, forest_session** out)
{
    if (!out || (n_valid && !valid) || (n_invalid && !invalid) || (n_conditional_invalid && !conditional_invalid))
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] {
        return make_session(make_example_set(to_list(valid, n_valid), to_list(invalid, n_invalid),
                                             to_list(conditional_invalid, n_conditional_invalid)),
                            options, out);
    });
}

forest_status forest_session_from_text(const char* examples, const forest_options* options, forest_session** out)
{
    if (!examples || !out)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] { return make_session(parse_benchmark(examples), options, out); });
}

void forest_session_free(forest_session* session) { delete session; }

forest_status forest_session_advance(forest_session* session, forest_step* out)
{
    if (!session || !out)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] {
        Step step = session->session->advance();
        refresh(session);
        switch (step.kind) {
        case Step::Kind::Question:
            *out = FOREST_STEP_QUESTION;
            break;
        case Step::Kind::Done:
            *out = FOREST_STEP_DONE;
            break;
        case Step::Kind::BestEffort:
            *out = FOREST_STEP_BEST_EFFORT;
            break;
        case Step::Kind::Failed:
            *out = FOREST_STEP_FAILED;
            break;
        }
        return FOREST_OK;
    });
}

const char* forest_session_question(const forest_session* session)
{
    if (!session || !session->session->pending_question())
        return nullptr;
    return session->session->pending_question()->c_str();
}

forest_phase forest_session_phase(const forest_session* session)
{
    if (!session)
        return FOREST_PHASE_FAILED;
    switch (session->session->phase()) {
    case Phase::RegexSearch:
        return FOREST_PHASE_REGEX_SEARCH;
    case Phase::RegexDisambiguation:
        return FOREST_PHASE_REGEX_QUESTION;
    case Phase::CaptureSearch:
        return FOREST_PHASE_CAPTURE_SEARCH;
    case Phase::CaptureDisambiguation:
        return FOREST_PHASE_CAPTURE_QUESTION;
    case Phase::Done:
        return FOREST_PHASE_DONE;
    case Phase::Failed:
        return FOREST_PHASE_FAILED;
    }
    return FOREST_PHASE_FAILED;
}

forest_status forest_session_answer(forest_session* session, int valid)
{
    if (!session)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] {
        session->session->answer(valid != 0);
        return FOREST_OK;
    });
}

forest_status forest_session_abort(forest_session* session)
{
    if (!session)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] {
        session->session->abort();
        return FOREST_OK;
    });
}

const char* forest_session_regex(const forest_session* session)
{
    if (!session || !session->session->result())
        return nullptr;
    return session->regex.c_str();
}

size_t forest_session_condition_count(const forest_session* session)
{
    return session ? session->conditions.size() : 0;
}

const char* forest_session_condition(const forest_session* session, size_t i)
{
    if (!session || i >= session->conditions.size())
        return nullptr;
    return session->conditions[i].c_str();
}

size_t forest_session_transcript_count(const forest_session* session)
{
    return session ? session->session->transcript().size() : 0;
}

forest_status forest_session_transcript_entry(const forest_session* session, size_t i, const char** question,
                                              int* captures, int* valid)
{
    if (!session)
        return fail(FOREST_E_ARGUMENT, "null argument");
    const auto& t = session->session->transcript();
    if (i >= t.size())
        return fail(FOREST_E_ARGUMENT, "transcript index out of range");
    if (question)
        *question = t[i].question.c_str();
    if (captures)
        *captures = t[i].captures;
    if (valid)
        *valid = t[i].valid;
    return FOREST_OK;
}

const char* forest_session_failure(const forest_session* session)
{
    return session ? session->session->failure().c_str() : "";
}

forest_status forest_session_stats(const forest_session* session, forest_stats* out)
{
    if (!session || !out)
        return fail(FOREST_E_ARGUMENT, "null argument");
    const auto& s = session->session->stats();
    out->programs_enumerated = s.programs_enumerated;
    out->questions = s.questions;
    out->regex_questions = s.regex_questions;
    out->capture_questions = s.capture_questions;
    out->seconds = s.seconds;
    out->question_cap_hit = s.question_cap_hit ? 1 : 0;
    return FOREST_OK;
}

forest_status forest_session_json(const forest_session* session, char** out)
{
    if (!session || !out)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] {
        const auto& s = *session->session;
        json j;
        j["regex"] = s.result() ? json(session->regex) : json(nullptr);
        j["conditions"] = session->conditions;
        j["stats"] = {{"programs_enumerated", s.stats().programs_enumerated},
                      {"questions", s.stats().questions},
                      {"seconds", s.stats().seconds},
                      {"question_cap_hit", s.stats().question_cap_hit}};
        j["transcript"] = json::array();
        for (const auto& t : s.transcript())
            j["transcript"].push_back(
                {{"question", t.question}, {"phase", t.captures ? "captures" : "regex"}, {"valid", t.valid}});
        j["state"] = phase_name(s.phase());
        j["best_effort"] = s.best_effort();
        j["reason"] = s.failure();
        *out = copy_string(j.dump());
        return FOREST_OK;
    });
}

forest_status forest_validation_parse(const char* text, forest_validation** out)
{
    if (!text || !out)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new forest_validation{parse_validation(text)};
        return FOREST_OK;
    });
}

void forest_validation_free(forest_validation* validation) { delete validation; }

forest_status forest_validation_classify(const forest_validation* validation, const char* input, forest_verdict* out)
{
    if (!validation || !input || !out)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] {
        switch (classify(validation->v, input)) {
        case Verdict::Accept:
            *out = FOREST_ACCEPT;
            break;
        case Verdict::RejectFormat:
            *out = FOREST_REJECT_FORMAT;
            break;
        case Verdict::RejectConditions:
            *out = FOREST_REJECT_CONDITIONS;
            break;
        }
        return FOREST_OK;
    });
}

forest_status forest_validation_eval_json(const forest_validation* validation, const char* input, char** out)
{
    if (!validation || !input || !out)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] {
        *out = copy_string(evaluate(validation->v, input).dump());
        return FOREST_OK;
    });
}

forest_status forest_generate_examples(const forest_validation* truth, size_t n_valid, size_t n_invalid,
                                       size_t n_conditional_invalid, uint64_t seed, char** out)
{
    if (!truth || !out)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&] {
        ExampleSet ex = generate_examples(truth->v, {n_valid, n_invalid, n_conditional_invalid}, seed);
        *out = copy_string(serialize_benchmark(ex));
        return FOREST_OK;
    });
}

forest_status forest_bench_run(const char* corpus_dir, const char* modes, const forest_options* options, char** table,
                               char** csv)
{
    if (!corpus_dir || !modes)
        return fail(FOREST_E_ARGUMENT, "null argument");
    return guarded([&]() -> forest_status {
        std::vector<BenchMode> list;
        std::string m = modes;
        size_t start = 0;
        while (start <= m.size()) {
            size_t end = m.find(',', start);
            if (end == std::string::npos)
                end = m.size();
            std::string name = m.substr(start, end - start);
            auto mode = parse_mode(name);
            if (!mode)
                return fail(FOREST_E_ARGUMENT, "unknown mode '" + name + "'");
            list.push_back(*mode);
            start = end + 1;
        }
        if (!std::filesystem::is_directory(corpus_dir))
            return fail(FOREST_E_IO, std::string("not a directory: ") + corpus_dir);
        std::vector<std::pair<std::string, std::string>> errors;
        auto cases = load_corpus(corpus_dir, &errors);
        SuiteOptions so = options ? options->suite : SuiteOptions{};
        if (!options)
            so.timeout_seconds = 60;
        SuiteReport report = run_suite(cases, list, so);
        std::string text = report.to_table();
        for (const auto& [name, msg] : errors)
            text += "skipped " + name + ": " + msg + "\n";
        if (table)
            *table = copy_string(text);
        if (csv)
            *csv = copy_string(report.to_csv());
        return FOREST_OK;
    });
}

forest_status forest_serve(const char* host, int port, const forest_options* options)
{
    if (!host || port < 0 || port > 65535)
        return fail(FOREST_E_ARGUMENT, "bad host or port");
    return guarded([&]() -> forest_status {
        ServiceOptions so = options ? options->service : ServiceOptions{};
        if (options) {
            so.synthesis = options->suite.synthesis;
            so.synthesis.timeout_seconds = options->suite.timeout_seconds;
        }
        SessionService service(so);
        if (!service.listen(host, port))
            return fail(FOREST_E_IO, "cannot listen on " + std::string(host) + ":" + std::to_string(port));
        return FOREST_OK;
    });
}

}  // extern "C"
