#include <algorithm>
#include <functional>
#include <random>

#include "../support/fixtures.hpp"
#include "capture_synth.hpp"
#include "doctest.h"
#include "regex_engine.hpp"

using namespace forest;

namespace {

const BackendFactory kBuiltin = [] { return smt::make_builtin_backend(); };

Regex date_regex() { return parse_regex("[0-9]{2}/[0-9]{2}/[0-9]{4}"); }

ConditionSet conds(std::initializer_list<const char*> texts)
{
    ConditionSet out;
    for (auto t : texts)
        out.push_back(parse_condition(t));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("atomic decomposition splits top-level concatenation")
{
    auto atoms = atomic_decompose(date_regex());
    REQUIRE(atoms.size() == 5);
    CHECK(emit(atoms[0]) == "[0-9]{2}");
    CHECK(emit(atoms[1]) == "/");
    CHECK(emit(atoms[4]) == "[0-9]{4}");
    CHECK(atomic_decompose(parse_regex("a|b")).size() == 1);
    CHECK(atomic_decompose(parse_regex("[0-9]+")).size() == 1);
}

TEST_CASE("placements are ordered, disjoint and complete")
{
    for (size_t L = 1; L <= 5; ++L)
        for (size_t g = 1; g <= L; ++g) {
            auto ps = enumerate_placements(L, g);
            // intervals correspond to choosing 2g boundaries with first < last <= next first
            size_t brute = 0;
            std::function<void(size_t, size_t)> count = [&](size_t start, size_t left) {
                if (left == 0) {
                    ++brute;
                    return;
                }
                for (size_t a = start; a < L; ++a)
                    for (size_t b = a + 1; b <= L; ++b)
                        count(b, left - 1);
            };
            count(0, g);
            CHECK(ps.size() == brute);
            for (size_t i = 1; i < ps.size(); ++i)
                CHECK(ps[i - 1].groups < ps[i].groups);
        }
    CHECK(enumerate_placements(3, 4).empty());

    auto atoms = atomic_decompose(date_regex());
    CHECK(emit(place_groups(atoms, enumerate_placements(5, 1).front())) == "([0-9]{2})/[0-9]{2}/[0-9]{4}");
    GroupPlacement three{{{0, 1}, {2, 3}, {4, 5}}};
    auto g3 = enumerate_placements(5, 3);
    CHECK(std::find(g3.begin(), g3.end(), three) != g3.end());
    CHECK(emit(place_groups(atoms, three)) == "([0-9]{2})/([0-9]{2})/([0-9]{4})");
    GroupPlacement wide{{{0, 3}}};
    CHECK(emit(place_groups(atoms, wide)) == "([0-9]{2}/[0-9]{2})/[0-9]{4}");
}

TEST_CASE("a capture value below a bound renders as an integer comparison")
{
    // $0 <= b with capture 27 becomes 27 <= b, i.e. b >= 27
    CHECK(smt::to_smtlib(smt::ge(smt::IntVar{3}, 27)) == "(>= i3 27)");
    CHECK(smt::to_smtlib(smt::le(smt::IntVar{3}, -2)) == "(<= i3 (- 2))");
}

TEST_CASE("capture collection reports non-matching and non-numeric examples")
{
    Regex g = parse_regex("([0-9]{2})/([0-9]{2})/[0-9]{4}");
    auto c = collect_captures(g, fixtures::kDateValid, fixtures::kDateConditional);
    REQUIRE(c.status == CaptureCollection::Status::Ok);
    CHECK(c.table.groups == 2);
    CHECK(c.table.valid[0] == std::vector<int64_t>{19, 8});
    CHECK(c.table.invalid[4] == std::vector<int64_t>{12, 31});

    auto bad = collect_captures(g, fixtures::kDateValid, {"1/1/2000"});
    CHECK(bad.status == CaptureCollection::Status::NoMatch);
    CHECK(bad.offending == "1/1/2000");

    auto text = collect_captures(parse_regex("([a-z]+)"), {"abc"}, {});
    CHECK(text.status == CaptureCollection::Status::NonNumeric);
}

TEST_CASE("date conditions")
{
    Regex g = parse_regex("([0-9]{2})/([0-9]{2})/[0-9]{4}");
    auto backend = smt::make_builtin_backend();
    auto out = synthesize_conditions(g, fixtures::kDateValid, fixtures::kDateConditional, *backend);
    REQUIRE(out.status == ConditionOutcome::Status::Ok);
    CHECK(out.conditions == conds({"$0<=31", "$0>=1", "$1<=12", "$1>=8"}));

    auto choice = choose_placement(date_regex(), fixtures::kDateValid, fixtures::kDateConditional, kBuiltin);
    REQUIRE(choice);
    CHECK(emit(choice->regex) == "([0-9]{2})/([0-9]{2})/[0-9]{4}");
    CHECK(choice->conditions == out.conditions);
}

TEST_CASE("no conditional invalid examples gives the empty set")
{
    Regex g = parse_regex("([0-9]{2})/[0-9]{2}/[0-9]{4}");
    auto backend = smt::make_builtin_backend();
    auto out = synthesize_conditions(g, fixtures::kDateValid, {}, *backend);
    REQUIRE(out.status == ConditionOutcome::Status::Ok);
    CHECK(out.conditions.empty());
}

TEST_CASE("infeasible when an invalid capture equals a valid one")
{
    Regex g = parse_regex("([0-9]{2})");
    auto backend = smt::make_builtin_backend();
    auto out = synthesize_conditions(g, {"10", "20", "30"}, {"25"}, *backend);
    CHECK(out.status == ConditionOutcome::Status::Infeasible);
}

TEST_CASE("condition sets are cardinality minimal (brute force)")
{
    std::mt19937 rng(11);
    for (int round = 0; round < 40; ++round) {
        CaptureTable t;
        t.groups = 1 + rng() % 2;
        auto row = [&] {
            std::vector<int64_t> r;
            for (size_t g = 0; g < t.groups; ++g)
                r.push_back(static_cast<int64_t>(rng() % 12));
            return r;
        };
        for (int i = 0; i < 4; ++i)
            t.valid.push_back(row());
        for (int i = 0; i < 3; ++i) {
            auto r = row();
            if (std::find(t.valid.begin(), t.valid.end(), r) == t.valid.end())
                t.invalid.push_back(r);
        }
        // candidate conditions: every bound in [-1, 12] for each group and op
        std::vector<CaptureCondition> cand;
        for (size_t g = 0; g < t.groups; ++g)
            for (auto op : {CompareOp::LE, CompareOp::GE})
                for (int64_t b = -1; b <= 12; ++b)
                    cand.push_back({g, op, b});
        // smallest separating size over sets with at most one condition per (group, op)
        size_t best = 99;
        std::function<void(size_t, ConditionSet&)> search = [&](size_t i, ConditionSet& cur) {
            if (cur.size() >= best)
                return;
            if (separates(cur, t)) {
                best = cur.size();
                return;
            }
            if (i == cand.size())
                return;
            search(i + 1, cur);
            bool clash = std::any_of(cur.begin(), cur.end(), [&](const CaptureCondition& c) {
                return c.group == cand[i].group && c.op == cand[i].op;
            });
            if (!clash) {
                cur.push_back(cand[i]);
                search(i + 1, cur);
                cur.pop_back();
            }
        };
        ConditionSet empty;
        search(0, empty);

        auto backend = smt::make_builtin_backend();
        ConditionSystem sys(*backend, t);
        auto got = sys.minimal();
        if (best == 99) {
            CHECK_FALSE(got);
            continue;
        }
        REQUIRE(got);
        CHECK(got->size() == best);
        CHECK(separates(*got, t));
        CHECK(tighten(*got, t) == *got);
        if (auto alt = sys.alternative(*got)) {
            CHECK(alt->size() == got->size());
            CHECK(*alt != *got);
            CHECK(separates(*alt, t));
        }
    }
}

TEST_CASE("alternative prefers the loosest bounds")
{
    CaptureTable t;
    t.groups = 2;
    for (const auto* x : {"19/08", "26/10", "22/09", "01/12", "29/09", "31/08"})
        t.valid.push_back({std::stoi(std::string(x).substr(0, 2)), std::stoi(std::string(x).substr(3))});
    t.invalid = {{33, 8}, {26, 0}, {22, 13}, {0, 12}, {12, 31}, {52, 3}};
    auto backend = smt::make_builtin_backend();
    ConditionSystem sys(*backend, t);
    auto cur = sys.minimal();
    REQUIRE(cur);
    auto alt = sys.alternative(*cur);
    REQUIRE(alt);
    CHECK(*alt == conds({"$0<=32", "$0>=1", "$1<=12", "$1>=1"}));
}

TEST_CASE("distinguishing strings for condition sets")
{
    Regex g = parse_regex("([0-9]{2})/([0-9]{2})/[0-9]{4}");
    auto s1 = conds({"$0<=31", "$0>=1", "$1<=12", "$1>=8"});

    auto month = distinguish_conditions(s1, conds({"$0<=31", "$0>=1", "$1<=12", "$1>=1"}), fixtures::kDateValid, g,
                                        kBuiltin);
    REQUIRE(month);
    // halfway between 7 (just below $1>=8) and 1
    CHECK(*month == "19/04/1996");

    auto day = distinguish_conditions(conds({"$0<=31", "$0>=1", "$1<=12", "$1>=1"}),
                                      conds({"$0<=32", "$0>=1", "$1<=12", "$1>=1"}), fixtures::kDateValid, g, kBuiltin);
    REQUIRE(day);
    CHECK(*day == "32/08/1996");

    CHECK_FALSE(distinguish_conditions(s1, s1, fixtures::kDateValid, g, kBuiltin));
    // semantically equal but syntactically different sets
    CHECK_FALSE(distinguish_conditions(conds({"$0<=31"}), conds({"$0<=31", "$0>=0"}), fixtures::kDateValid, g,
                                       kBuiltin));
    // values that cannot be spliced into a two-digit field
    CHECK_THROWS_AS(distinguish_conditions(conds({"$0<=200"}), conds({"$0<=150"}), fixtures::kDateValid, g, kBuiltin),
                    DistinguishError);
}

TEST_CASE("distinguishing values separate the sets (property)")
{
    std::mt19937 rng(5);
    for (int round = 0; round < 60; ++round) {
        auto random_set = [&] {
            ConditionSet s;
            for (size_t g = 0; g < 2; ++g)
                for (auto op : {CompareOp::LE, CompareOp::GE})
                    if (rng() % 2)
                        s.push_back({g, op, static_cast<int64_t>(rng() % 20)});
            return s;
        };
        auto a = random_set();
        auto b = random_set();
        std::vector<int64_t> base{static_cast<int64_t>(rng() % 20), static_cast<int64_t>(rng() % 20)};
        auto backend = smt::make_builtin_backend();
        auto v = distinguishing_values(a, b, 2, base, *backend);
        auto sat = [&](const ConditionSet& s, const std::vector<int64_t>& x) {
            return std::all_of(s.begin(), s.end(), [&](const CaptureCondition& c) { return c.holds(x[c.group]); });
        };
        // brute force over non-negative values in [0, 25]
        bool differ = false;
        for (int64_t x = 0; x <= 25 && !differ; ++x)
            for (int64_t y = 0; y <= 25 && !differ; ++y)
                differ = sat(a, {x, y}) != sat(b, {x, y});
        CHECK(v.has_value() == differ);
        if (v) {
            CHECK(sat(a, *v) != sat(b, *v));
            CHECK((*v)[0] >= 0);
            CHECK((*v)[1] >= 0);
        }
    }
}
