#include <sstream>

#include "../support/fixtures.hpp"
#include "doctest.h"
#include "orchestrator.hpp"
#include "regex_engine.hpp"

using namespace forest;

namespace {

ExampleSet date_examples(bool conditional)
{
    return make_example_set(fixtures::kDateValid, fixtures::kDateInvalid,
                            conditional ? fixtures::kDateConditional : std::vector<std::string>{});
}

RegexValidation date_truth()
{
    return parse_validation("([0-9]{2})/([0-9]{2})/[0-9]{4}\n$0<=31 && $0>=1 && $1<=12 && $1>=1\n");
}

}  // namespace

TEST_CASE("date regex with a ground-truth oracle")
{
    GroundTruthOracle oracle(date_truth());
    auto out = run(date_examples(false), {}, oracle);
    REQUIRE(out.kind == Step::Kind::Done);
    REQUIRE(out.result);
    CHECK(equivalent(out.result->regex, parse_regex("[0-9]{2}/[0-9]{2}/[0-9]{4}")));
    CHECK(out.result->conditions.empty());
    CHECK(validate(*out.result, out.final_examples).ok());
    CHECK(out.stats.capture_questions == 0);
    CHECK(out.stats.regex_questions <= 20);
    CHECK(out.stats.shape.find("static") != std::string::npos);
    // every answer is honoured by the result
    for (const auto& t : out.transcript)
        CHECK(full_match(out.result->regex, std::string_view(t.question)) == t.valid);
}

TEST_CASE("date validation with conditions")
{
    GroundTruthOracle oracle(date_truth());
    auto out = run(date_examples(true), {}, oracle);
    REQUIRE(out.kind == Step::Kind::Done);
    REQUIRE(out.result);
    CHECK(emit(out.result->regex) == "([0-9]{2})/([0-9]{2})/[0-9]{4}");
    std::vector<CaptureCondition> expected;
    for (auto t : {"$0<=31", "$0>=1", "$1<=12", "$1>=1"})
        expected.push_back(parse_condition(t));
    std::sort(expected.begin(), expected.end());
    CHECK(out.result->conditions == expected);
    CHECK(validate(*out.result, out.final_examples).ok());
    // 32 first, then the month's lower bound is bisected: 4, 2, 1
    CHECK(out.stats.capture_questions == 4);
    bool asked_32 = false;
    for (const auto& t : out.transcript)
        if (t.captures && t.question == "32/08/1996") {
            asked_32 = true;
            CHECK_FALSE(t.valid);
        }
    CHECK(asked_32);
}

TEST_CASE("dynamic-only mode solves the date with more programs")
{
    GroundTruthOracle oracle(date_truth());
    auto fixed = run(date_examples(false), {}, oracle);
    SynthesisOptions o;
    o.split = false;
    auto dynamic = run(date_examples(false), o, oracle);
    REQUIRE(dynamic.kind == Step::Kind::Done);
    CHECK(equivalent(dynamic.result->regex, parse_regex("[0-9]{2}/[0-9]{2}/[0-9]{4}")));
    CHECK(dynamic.stats.shape.find("dynamic") != std::string::npos);
    CHECK(fixed.stats.programs_enumerated < dynamic.stats.programs_enumerated);
}

TEST_CASE("single character case")
{
    AcceptFirstOracle oracle;
    auto out = run(make_example_set({"a"}, {"b"}, {}), {}, oracle);
    REQUIRE(out.kind == Step::Kind::Done);
    CHECK(full_match(out.result->regex, std::string_view("a")));
    CHECK_FALSE(full_match(out.result->regex, std::string_view("b")));
    CHECK(out.stats.questions == 0);
    CHECK(out.result->conditions.empty());
}

TEST_CASE("session protocol")
{
    SynthesisSession s(date_examples(true), {});
    CHECK_THROWS_AS(s.answer(true), SessionError);
    GroundTruthOracle oracle(date_truth());
    int steps = 0;
    while (true) {
        Step st = s.advance();
        if (st.kind != Step::Kind::Question)
            break;
        ++steps;
        CHECK(s.pending_question().has_value());
        CHECK((s.phase() == Phase::RegexDisambiguation || s.phase() == Phase::CaptureDisambiguation));
        CHECK_THROWS_AS(s.advance(), SessionError);
        s.answer(*oracle.classify(st.question, s.phase() == Phase::CaptureDisambiguation));
        CHECK_FALSE(s.pending_question().has_value());
        CHECK_THROWS_AS(s.answer(true), SessionError);
    }
    CHECK(s.phase() == Phase::Done);
    CHECK(steps == s.stats().questions);
    CHECK(static_cast<size_t>(steps) == s.transcript().size());
    // terminal state is sticky
    CHECK(s.advance().kind == Step::Kind::Done);
    REQUIRE(s.result());
    CHECK(validate(*s.result(), s.examples()).ok());
}

TEST_CASE("abort and failures")
{
    SynthesisSession s(date_examples(false), {});
    Step st = s.advance();
    REQUIRE(st.kind == Step::Kind::Question);
    s.abort();
    CHECK(s.phase() == Phase::Failed);
    CHECK(s.advance().kind == Step::Kind::Failed);

    AcceptFirstOracle first;
    auto unmatched = run(make_example_set({"12", "34"}, {"1"}, {"/"}), {}, first);
    CHECK(unmatched.kind == Step::Kind::Failed);
    CHECK(unmatched.reason.find("\"/\"") != std::string::npos);

    SynthesisOptions o;
    o.timeout_seconds = 0;
    auto late = run(date_examples(false), o, first);
    CHECK(late.kind == Step::Kind::Failed);
    CHECK(late.reason == "timeout");

    // no separating conditions: same captured value on both sides
    auto clash = run(make_example_set({"10", "20"}, {"a"}, {"010"}), {}, first);
    CHECK(clash.kind == Step::Kind::Failed);
}

TEST_CASE("a divider at an example's edge leaves a partly empty column")
{
    // "1" divides all three, splitting 12345 into "", "1", "2345"
    auto ex = make_example_set({"12345", "90210", "00501"}, {"1234", "123456"}, {});
    AcceptFirstOracle first;
    auto out = run(ex, {}, first);
    REQUIRE(out.kind == Step::Kind::Done);
    CHECK(validate(*out.result, ex).ok());
}

TEST_CASE("question cap keeps the incumbent")
{
    GroundTruthOracle oracle(date_truth());
    SynthesisOptions o;
    o.max_questions = 0;
    auto out = run(date_examples(true), o, oracle);
    REQUIRE(out.kind == Step::Kind::Done);
    CHECK(out.stats.questions == 0);
    CHECK(out.stats.question_cap_hit);
    CHECK(validate(*out.result, out.final_examples).ok());

    auto free_run = run(date_examples(true), {}, oracle);
    CHECK_FALSE(free_run.stats.question_cap_hit);
}

TEST_CASE("pruning never enumerates more than no pruning on a small case")
{
    auto ex = make_example_set({"ab", "abab", "ababab"}, {"a", "aba", "b"}, {});
    AcceptFirstOracle first;
    auto with = run(ex, {}, first);
    SynthesisOptions o;
    o.pruning = PruningOptions::none();
    auto without = run(ex, o, first);
    REQUIRE(with.kind == Step::Kind::Done);
    REQUIRE(without.kind == Step::Kind::Done);
    CHECK(with.stats.programs_enumerated <= without.stats.programs_enumerated);
    CHECK(validate(*with.result, ex).ok());
    CHECK(validate(*without.result, ex).ok());
}

TEST_CASE("interactive oracle reads y/n")
{
    std::istringstream in("maybe\ny\nno\n");
    std::ostringstream out;
    InteractiveOracle o(in, out);
    CHECK(o.classify("19/08/1996", false) == std::optional<bool>(true));
    CHECK(o.classify("32/08/1996", true) == std::optional<bool>(false));
    CHECK_FALSE(o.classify("x", false).has_value());
    CHECK(out.str().find("\"19/08/1996\"") != std::string::npos);
    CHECK(out.str().find("Value question") != std::string::npos);
}
