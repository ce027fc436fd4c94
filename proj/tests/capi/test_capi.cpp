#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "forest/forest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

const char* const kValid[] = {"19/08/1996", "26/10/1998", "22/09/2000", "01/12/2001", "29/09/2003", "31/08/2015"};
const char* const kInvalid[] = {"19/08/96", "26-10-1998", "22.09.2000", "1/12/2001", "29/9/2003", "2015/08/31"};
const char* const kConditional[] = {"33/08/1996", "26/00/1998", "22/13/2000",
                                    "00/12/2001", "12/31/2003", "52/03/2015"};

const char* const kTruth = "([0-9]{2})/([0-9]{2})/[0-9]{4}\n$0<=31\n$0>=1\n$1<=12\n$1>=1\n";

std::string take(char* s)
{
    std::string out = s ? s : "";
    forest_string_free(s);
    return out;
}

// Answers every question with the truth: pattern questions by the regex
// alone, value questions by the whole validation.
forest_step drive(forest_session* s, const forest_validation* truth)
{
    forest_step step;
    while (true) {
        REQUIRE(forest_session_advance(s, &step) == FOREST_OK);
        if (step != FOREST_STEP_QUESTION)
            return step;
        const char* q = forest_session_question(s);
        REQUIRE(q != nullptr);
        forest_verdict v;
        REQUIRE(forest_validation_classify(truth, q, &v) == FOREST_OK);
        bool valid = forest_session_phase(s) == FOREST_PHASE_CAPTURE_QUESTION ? v == FOREST_ACCEPT
                                                                              : v != FOREST_REJECT_FORMAT;
        REQUIRE(forest_session_answer(s, valid) == FOREST_OK);
    }
}

}  // namespace

TEST_CASE("date validation through the C interface")
{
    forest_validation* truth = nullptr;
    REQUIRE(forest_validation_parse(kTruth, &truth) == FOREST_OK);
    forest_session* s = nullptr;
    REQUIRE(forest_session_new(kValid, 6, kInvalid, 6, kConditional, 6, nullptr, &s) == FOREST_OK);
    CHECK(forest_session_regex(s) == nullptr);

    CHECK(drive(s, truth) == FOREST_STEP_DONE);
    CHECK(forest_session_phase(s) == FOREST_PHASE_DONE);
    CHECK(std::string(forest_session_regex(s)) == "([0-9]{2})/([0-9]{2})/[0-9]{4}");
    REQUIRE(forest_session_condition_count(s) == 4);
    std::vector<std::string> conds;
    for (size_t i = 0; i < 4; ++i)
        conds.push_back(forest_session_condition(s, i));
    CHECK(conds == std::vector<std::string>{"$0 <= 31", "$0 >= 1", "$1 <= 12", "$1 >= 1"});
    CHECK(forest_session_condition(s, 4) == nullptr);
    CHECK(std::string(forest_session_failure(s)).empty());

    forest_stats st;
    REQUIRE(forest_session_stats(s, &st) == FOREST_OK);
    CHECK(st.questions == st.regex_questions + st.capture_questions);
    CHECK(st.programs_enumerated > 0);
    CHECK(st.question_cap_hit == 0);
    CHECK(forest_session_transcript_count(s) == static_cast<size_t>(st.questions));
    const char* q = nullptr;
    int captures = -1;
    int valid = -1;
    REQUIRE(forest_session_transcript_entry(s, 0, &q, &captures, &valid) == FOREST_OK);
    CHECK(q != nullptr);
    CHECK(forest_session_transcript_entry(s, 1000, nullptr, nullptr, nullptr) == FOREST_E_ARGUMENT);

    char* raw = nullptr;
    REQUIRE(forest_session_json(s, &raw) == FOREST_OK);
    json j = json::parse(take(raw));
    CHECK(j["regex"] == "([0-9]{2})/([0-9]{2})/[0-9]{4}");
    CHECK(j["conditions"].size() == 4);
    for (auto key : {"programs_enumerated", "questions", "seconds"})
        CHECK(j["stats"].contains(key));
    CHECK(j["transcript"].size() == static_cast<size_t>(st.questions));

    forest_session_free(s);
    forest_validation_free(truth);
}

TEST_CASE("sessions from example text and session errors")
{
    forest_session* s = nullptr;
    CHECK(forest_session_from_text("no header\n", nullptr, &s) == FOREST_E_FORMAT);
    CHECK(s == nullptr);
    CHECK(std::string(forest_last_error()).find("header") != std::string::npos);
    CHECK(forest_session_from_text(nullptr, nullptr, &s) == FOREST_E_ARGUMENT);

    REQUIRE(forest_session_from_text("++\n19/08/1996\n26/10/1998\n--\n19-08-1996\n", nullptr, &s) == FOREST_OK);
    CHECK(forest_session_answer(s, 1) == FOREST_E_STATE);
    forest_step step;
    REQUIRE(forest_session_advance(s, &step) == FOREST_OK);
    if (step == FOREST_STEP_QUESTION) {
        CHECK(forest_session_advance(s, &step) == FOREST_E_STATE);
        CHECK(forest_session_abort(s) == FOREST_OK);
        CHECK(forest_session_phase(s) == FOREST_PHASE_FAILED);
        CHECK(std::string(forest_session_failure(s)) == "aborted");
    }
    forest_session_free(s);
    forest_session_free(nullptr);
}

TEST_CASE("options")
{
    forest_options* o = nullptr;
    REQUIRE(forest_options_new(&o) == FOREST_OK);
    CHECK(forest_options_set(o, "mode", "ktree") == FOREST_OK);
    CHECK(forest_options_set(o, "mode", "fast") == FOREST_E_ARGUMENT);
    CHECK(forest_options_set(o, "pruning", "off") == FOREST_OK);
    CHECK(forest_options_set(o, "pruning", "maybe") == FOREST_E_ARGUMENT);
    CHECK(forest_options_set(o, "pruning", "on") == FOREST_OK);
    CHECK(forest_options_set(o, "timeout", "-1") == FOREST_E_ARGUMENT);
    CHECK(forest_options_set(o, "colour", "blue") == FOREST_E_ARGUMENT);
    CHECK(forest_options_set(o, nullptr, "x") == FOREST_E_ARGUMENT);
    CHECK(forest_options_set(o, "accept_first", "on") == FOREST_OK);

    forest_session* s = nullptr;
    REQUIRE(forest_session_new(kValid, 6, kInvalid, 6, nullptr, 0, o, &s) == FOREST_OK);
    forest_step step;
    REQUIRE(forest_session_advance(s, &step) == FOREST_OK);
    CHECK(step == FOREST_STEP_DONE);
    CHECK(forest_session_transcript_count(s) == 0);
    forest_session_free(s);

    REQUIRE(forest_options_set(o, "timeout", "0.000001") == FOREST_OK);
    REQUIRE(forest_options_set(o, "accept_first", "off") == FOREST_OK);
    REQUIRE(forest_options_set(o, "mode", "multitree") == FOREST_OK);
    REQUIRE(forest_session_new(kValid, 6, kInvalid, 6, nullptr, 0, o, &s) == FOREST_OK);
    REQUIRE(forest_session_advance(s, &step) == FOREST_OK);
    CHECK((step == FOREST_STEP_FAILED || step == FOREST_STEP_BEST_EFFORT));
    forest_session_free(s);
    forest_options_free(o);
}

TEST_CASE("validations")
{
    forest_validation* v = nullptr;
    CHECK(forest_validation_parse("([0-9]", &v) == FOREST_E_FORMAT);
    CHECK(forest_validation_parse("([0-9])\n$2<=4\n", &v) == FOREST_E_FORMAT);
    REQUIRE(forest_validation_parse(kTruth, &v) == FOREST_OK);
    forest_verdict verdict;
    REQUIRE(forest_validation_classify(v, "19/08/1996", &verdict) == FOREST_OK);
    CHECK(verdict == FOREST_ACCEPT);
    REQUIRE(forest_validation_classify(v, "33/08/1996", &verdict) == FOREST_OK);
    CHECK(verdict == FOREST_REJECT_CONDITIONS);
    REQUIRE(forest_validation_classify(v, "19-08-1996", &verdict) == FOREST_OK);
    CHECK(verdict == FOREST_REJECT_FORMAT);

    char* raw = nullptr;
    REQUIRE(forest_validation_eval_json(v, "33/08/1996", &raw) == FOREST_OK);
    json j = json::parse(take(raw));
    CHECK(j["matches"] == true);
    CHECK(j["captures"] == json::array({33, 8}));
    CHECK(j["satisfies_conditions"] == false);

    REQUIRE(forest_generate_examples(v, 4, 4, 2, 11, &raw) == FOREST_OK);
    std::string text = take(raw);
    forest_session* s = nullptr;
    REQUIRE(forest_session_from_text(text.c_str(), nullptr, &s) == FOREST_OK);
    forest_session_free(s);
    forest_validation_free(v);

    REQUIRE(forest_validation_parse("[0-9]{2}", &v) == FOREST_OK);
    CHECK(forest_generate_examples(v, 2, 2, 1, 1, &raw) == FOREST_E_GENERATION);
    forest_validation_free(v);
}

TEST_CASE("benchmark entry point")
{
    char* table = nullptr;
    CHECK(forest_bench_run("/nonexistent/corpus", "multitree", nullptr, &table, nullptr) == FOREST_E_IO);
    CHECK(forest_bench_run(FOREST_CASES_DIR, "warp", nullptr, &table, nullptr) == FOREST_E_ARGUMENT);
}

TEST_CASE("status names and version")
{
    CHECK(std::string(forest_version()) == "1.0.0");
    CHECK(std::string(forest_status_name(FOREST_OK)) != std::string(forest_status_name(FOREST_E_STATE)));
}
