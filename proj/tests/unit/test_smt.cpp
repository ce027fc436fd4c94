#include <random>
#include <set>

#include "doctest.h"
#include "smt/backend.hpp"
#include "smt/sat_solver.hpp"

using namespace forest::smt;

namespace {

std::vector<std::string> backends()
{
    std::vector<std::string> out{"builtin"};
    std::string ext = find_smtlib_solver();
    if (!ext.empty())
        out.push_back(ext);
    return out;
}

std::unique_ptr<Backend> open(const std::string& which)
{
    return which == "builtin" ? make_builtin_backend() : make_smtlib_backend(which);
}

bool brute_sat(int nvars, const std::vector<std::vector<int>>& clauses)
{
    for (uint32_t m = 0; m < (1u << nvars); ++m) {
        bool all = true;
        for (const auto& c : clauses) {
            bool sat = false;
            for (int l : c) {
                int v = std::abs(l) - 1;
                bool val = (m >> v) & 1;
                sat = sat || (l > 0 ? val : !val);
            }
            all = all && sat;
        }
        if (all)
            return true;
    }
    return false;
}

}  // namespace

TEST_CASE("cdcl agrees with brute force on random 3-SAT")
{
    std::mt19937 rng(3);
    auto far = SatSolver::Clock::now() + std::chrono::hours(1);
    for (int round = 0; round < 400; ++round) {
        int n = 4 + static_cast<int>(rng() % 9);
        int m = static_cast<int>(n * (3.5 + (rng() % 20) / 10.0));
        std::vector<std::vector<int>> clauses;
        SatSolver s;
        for (int v = 0; v < n; ++v)
            s.new_var();
        for (int c = 0; c < m; ++c) {
            std::vector<int> cl;
            std::vector<SatSolver::Lit> lits;
            for (int k = 0; k < 3; ++k) {
                int v = static_cast<int>(rng() % static_cast<unsigned>(n));
                bool neg = rng() & 1;
                cl.push_back(neg ? -(v + 1) : v + 1);
                lits.push_back(neg ? SatSolver::negative(v) : SatSolver::pos(v));
            }
            clauses.push_back(cl);
            s.add_clause(lits);
        }
        auto r = s.solve({}, far);
        bool expected = brute_sat(n, clauses);
        REQUIRE((r == SatSolver::Result::Sat) == expected);
        if (r == SatSolver::Result::Sat) {
            for (const auto& c : clauses) {
                bool sat = false;
                for (int l : c)
                    sat = sat || (s.model_value(std::abs(l) - 1) == (l > 0));
                CHECK(sat);
            }
        }
    }
}

TEST_CASE("pigeonhole instances are refuted")
{
    for (int holes = 2; holes <= 6; ++holes) {
        int pigeons = holes + 1;
        SatSolver s;
        auto var = [&](int p, int h) { return p * holes + h; };
        for (int i = 0; i < pigeons * holes; ++i)
            s.new_var();
        for (int p = 0; p < pigeons; ++p) {
            std::vector<SatSolver::Lit> c;
            for (int h = 0; h < holes; ++h)
                c.push_back(SatSolver::pos(var(p, h)));
            s.add_clause(c);
        }
        for (int h = 0; h < holes; ++h)
            for (int a = 0; a < pigeons; ++a)
                for (int b = a + 1; b < pigeons; ++b)
                    s.add_clause({SatSolver::negative(var(a, h)), SatSolver::negative(var(b, h))});
        CHECK(s.solve({}, SatSolver::Clock::now() + std::chrono::minutes(1)) == SatSolver::Result::Unsat);
    }
}

TEST_CASE("solver deadline surfaces as timeout")
{
    SatSolver s;
    int holes = 11;
    int pigeons = holes + 1;
    for (int i = 0; i < pigeons * holes; ++i)
        s.new_var();
    for (int p = 0; p < pigeons; ++p) {
        std::vector<SatSolver::Lit> c;
        for (int h = 0; h < holes; ++h)
            c.push_back(SatSolver::pos(p * holes + h));
        s.add_clause(c);
    }
    for (int h = 0; h < holes; ++h)
        for (int a = 0; a < pigeons; ++a)
            for (int b = a + 1; b < pigeons; ++b)
                s.add_clause({SatSolver::negative(a * holes + h), SatSolver::negative(b * holes + h)});
    CHECK(s.solve({}, SatSolver::Clock::now() + std::chrono::milliseconds(50)) == SatSolver::Result::Timeout);

    auto b = make_builtin_backend();
    b->set_timeout(0.05);
    std::vector<std::vector<BoolVar>> x(12, std::vector<BoolVar>(11));
    for (auto& row : x)
        for (auto& v : row)
            v = b->new_bool();
    for (auto& row : x) {
        std::vector<Term> any_hole;
        for (auto& v : row)
            any_hole.push_back(lit(v));
        b->add(any(any_hole));
    }
    for (int h = 0; h < 11; ++h) {
        std::vector<Term> col;
        for (int p = 0; p < 12; ++p)
            col.push_back(lit(x[static_cast<size_t>(p)][static_cast<size_t>(h)]));
        b->add(at_most(1, col));
    }
    CHECK_THROWS_AS(b->check(), SolverTimeout);
}

TEST_CASE("integer equalities")
{
    for (const auto& which : backends()) {
        CAPTURE(which);
        auto b = open(which);
        IntVar x = b->new_int({1, 2, 3, 4, 5});
        b->add(eq(x, 3));
        REQUIRE(b->check() == CheckResult::Sat);
        CHECK(b->model().value(x) == 3);
        b->add(eq(x, 4));
        CHECK(b->check() == CheckResult::Unsat);
    }
}

TEST_CASE("push and pop scope assertions")
{
    for (const auto& which : backends()) {
        CAPTURE(which);
        auto b = open(which);
        IntVar x = b->new_int({0, 1, 2, 3});
        IntVar y = b->new_int({0, 1, 2, 3});
        b->add(eq(x, y));
        b->push();
        b->add(le(x, 1));
        b->add(ge(y, 2));
        CHECK(b->check() == CheckResult::Unsat);
        b->pop();
        REQUIRE(b->check() == CheckResult::Sat);
        CHECK(b->model().value(x) == b->model().value(y));
        b->push();
        b->add(in(x, {2, 3}));
        b->add(neg(eq(y, 3)));
        REQUIRE(b->check() == CheckResult::Sat);
        CHECK(b->model().value(x) == 2);
        b->pop();
    }
}

TEST_CASE("blocking clauses enumerate every model once")
{
    for (const auto& which : backends()) {
        CAPTURE(which);
        auto b = open(which);
        IntVar x = b->new_int({0, 1, 2});
        IntVar y = b->new_int({0, 1, 2});
        b->add(implies(eq(x, 0), eq(y, 0)));
        std::set<std::pair<int64_t, int64_t>> seen;
        while (b->check() == CheckResult::Sat) {
            auto m = b->model();
            auto key = std::make_pair(m.value(x), m.value(y));
            CHECK(seen.insert(key).second);
            b->add(any({neg(eq(x, key.first)), neg(eq(y, key.second))}));
        }
        CHECK(seen.size() == 7);
    }
}

TEST_CASE("maximize with symmetric soft clauses")
{
    for (const auto& which : backends()) {
        CAPTURE(which);
        auto b = open(which);
        BoolVar a = b->new_bool();
        BoolVar c = b->new_bool();
        b->add(any({lit(a), lit(c)}));
        auto r = maximize(*b, {neg(lit(a)), neg(lit(c))});
        REQUIRE(r.status == CheckResult::Sat);
        CHECK(r.satisfied == 1);
        CHECK(r.model.value(a) != r.model.value(c));
    }
}

TEST_CASE("maximize without soft clauses is check")
{
    auto b = make_builtin_backend();
    IntVar x = b->new_int({4, 7});
    b->add(ge(x, 5));
    auto r = maximize(*b, {});
    REQUIRE(r.status == CheckResult::Sat);
    CHECK(r.model.value(x) == 7);
    b->add(le(x, 4));
    CHECK(maximize(*b, {}).status == CheckResult::Unsat);
}

TEST_CASE("maximize is optimal against subset enumeration")
{
    std::mt19937 rng(9);
    for (const auto& which : backends()) {
        CAPTURE(which);
        int rounds = which == "builtin" ? 150 : 20;
        for (int round = 0; round < rounds; ++round) {
            auto b = open(which);
            const int n = 5;
            std::vector<BoolVar> v;
            for (int i = 0; i < n; ++i)
                v.push_back(b->new_bool());
            auto random_lit = [&]() {
                Term t = lit(v[rng() % n]);
                return (rng() & 1) ? neg(t) : t;
            };
            std::vector<Term> hard;
            for (int i = 0; i < 4; ++i)
                hard.push_back(any({random_lit(), random_lit(), random_lit()}));
            std::vector<Term> soft;
            for (int i = 0; i < 6; ++i)
                soft.push_back((rng() & 1) ? random_lit() : all({random_lit(), random_lit()}));
            for (const auto& h : hard)
                b->add(h);
            auto r = maximize(*b, soft);

            size_t best = 0;
            bool feasible = false;
            for (uint32_t m = 0; m < (1u << n); ++m) {
                Model model;
                for (int i = 0; i < n; ++i)
                    model.bools.push_back(static_cast<char>((m >> i) & 1));
                bool ok = true;
                for (const auto& h : hard)
                    ok = ok && evaluate(h, model);
                if (!ok)
                    continue;
                feasible = true;
                size_t count = 0;
                for (const auto& s : soft)
                    count += evaluate(s, model) ? 1 : 0;
                best = std::max(best, count);
            }
            REQUIRE((r.status == CheckResult::Sat) == feasible);
            if (feasible)
                CHECK(r.satisfied == best);
        }
    }
}

TEST_CASE("integer variable equality and cardinality")
{
    for (const auto& which : backends()) {
        CAPTURE(which);
        auto b = open(which);
        IntVar x = b->new_int({-2, 0, 5});
        IntVar y = b->new_int({0, 5, 9});
        b->add(eq(x, y));
        b->add(neg(eq(y, 0)));
        REQUIRE(b->check() == CheckResult::Sat);
        CHECK(b->model().value(x) == 5);
        std::vector<BoolVar> bs;
        std::vector<Term> ts;
        for (int i = 0; i < 6; ++i) {
            bs.push_back(b->new_bool());
            ts.push_back(lit(bs.back()));
        }
        b->add(at_most(2, ts));
        b->add(lit(bs[0]));
        b->add(lit(bs[5]));
        REQUIRE(b->check() == CheckResult::Sat);
        for (int i = 1; i < 5; ++i)
            CHECK_FALSE(b->model().value(bs[static_cast<size_t>(i)]));
    }
}

TEST_CASE("smtlib rendering")
{
    IntVar x{0};
    BoolVar a{1};
    CHECK(to_smtlib(le(x, -3)) == "(<= i0 (- 3))");
    CHECK(to_smtlib(implies(lit(a), ge(x, 2))) == "(=> b1 (>= i0 2))");
    CHECK(to_smtlib(at_most(1, {lit(a), neg(lit(a))})) == "(<= (+ (ite b1 1 0) (ite (not b1) 1 0)) 1)");
}
