#include <map>
#include <set>

#include "../support/fixtures.hpp"
#include "doctest.h"
#include "enumerator.hpp"
#include "regex_engine.hpp"
#include "splitter.hpp"

using namespace forest;

namespace {

std::vector<OpKind> all_ops() { return {std::begin(kAllOperators), std::end(kAllOperators)}; }

// Independent well-typedness check over a raw k-tree assignment.
bool well_typed(const DslSpec& dsl, const std::vector<int>& a)
{
    const int N = static_cast<int>(a.size());
    auto type_of = [&](int i) { return dsl.symbol(a[static_cast<size_t>(i - 1)]).type(); };
    if (type_of(1) != SymType::Re)
        return false;
    for (int i = 1; i <= N; ++i) {
        const Symbol& s = dsl.symbol(a[static_cast<size_t>(i - 1)]);
        if (2 * i > N) {
            if (s.kind == Symbol::Kind::Operator)
                return false;
            continue;
        }
        for (int j = 0; j < 2; ++j)
            if (type_of(2 * i + j) != s.param_type(j))
                return false;
    }
    return true;
}

std::set<std::vector<int>> brute_force_programs(const DslSpec& dsl, int nodes)
{
    std::set<std::vector<int>> out;
    std::vector<int> a(static_cast<size_t>(nodes), 0);
    for (;;) {
        if (well_typed(dsl, a))
            out.insert(a);
        size_t k = 0;
        while (k < a.size() && ++a[k] == dsl.size())
            a[k++] = 0;
        if (k == a.size())
            break;
    }
    return out;
}

std::vector<MultiTreeProgram> enumerate_all(const DslSpec& dsl, TreeShape shape, PruningOptions pruning)
{
    auto backend = smt::make_builtin_backend();
    Enumerator e(*backend, dsl, shape, pruning);
    std::vector<MultiTreeProgram> out;
    while (auto p = e.next())
        out.push_back(*p);
    return out;
}

std::string fingerprint(const Regex& r, const std::u32string& alphabet, size_t max_len)
{
    std::string bits;
    std::vector<std::u32string> layer{U""};
    for (size_t len = 0; len <= max_len; ++len) {
        std::vector<std::u32string> next;
        for (const auto& s : layer) {
            bits += full_match(r, s) ? '1' : '0';
            for (char32_t c : alphabet)
                next.push_back(s + c);
        }
        layer.swap(next);
    }
    return bits;
}

bool contains_pair(const Regex& r, NodeKind parent, NodeKind child)
{
    for (const auto& c : r.children) {
        if (r.kind == parent && c.kind == child)
            return true;
        if (contains_pair(c, parent, child))
            return true;
    }
    return false;
}

bool has_idempotent_union(const Regex& r)
{
    if (r.kind == NodeKind::Union && r.children[0] == r.children[1])
        return true;
    for (const auto& c : r.children)
        if (has_idempotent_union(c))
            return true;
    return false;
}

}  // namespace

TEST_CASE("dynamic schedule order")
{
    ShapeSchedule s(ScheduleMode::Dynamic, ShapeLimits{6, 1000});
    std::vector<std::pair<int, int>> got;
    std::vector<int> counts;
    for (int i = 0; i < 50; ++i) {
        auto shape = s.next();
        REQUIRE(shape.has_value());
        got.emplace_back(shape->n, shape->d);
        counts.push_back(shape->node_count());
    }
    std::vector<std::pair<int, int>> first6(got.begin(), got.begin() + 6);
    CHECK(first6 == std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {1, 3}, {3, 2}, {4, 2}, {2, 3}});
    CHECK(std::vector<int>(counts.begin(), counts.begin() + 6) == std::vector<int>{3, 6, 7, 9, 12, 14});
    CHECK(std::is_sorted(counts.begin(), counts.end()));
    auto at15 = std::find(got.begin(), got.end(), std::make_pair(5, 2));
    auto at15b = std::find(got.begin(), got.end(), std::make_pair(1, 4));
    REQUIRE(at15 != got.end());
    REQUIRE(at15b != got.end());
    CHECK(at15 < at15b);
}

TEST_CASE("static and ktree schedules")
{
    ShapeSchedule s(ScheduleMode::Static, ShapeLimits{4, 40}, 5);
    CHECK(*s.next() == TreeShape{5, 2});
    CHECK(*s.next() == TreeShape{5, 3});
    CHECK(*s.next() == TreeShape{5, 4});
    CHECK_FALSE(s.next().has_value());
    ShapeSchedule k(ScheduleMode::KTree, ShapeLimits{3, 40});
    CHECK(*k.next() == TreeShape{1, 2});
    CHECK(*k.next() == TreeShape{1, 3});
    CHECK_FALSE(k.next().has_value());
    ShapeSchedule capped(ScheduleMode::Dynamic, ShapeLimits{6, 12});
    int last = 0;
    while (auto shape = capped.next())
        last = shape->node_count();
    CHECK(last == 12);
}

TEST_CASE("encoding without pruning equals brute-force typed assignments")
{
    std::vector<DslSpec> dsls = {
        DslSpec(U"a", {}, {}, all_ops()),
        DslSpec(U"ab", {}, {}, all_ops()),
        DslSpec(U"a", {}, {RangeLit::Exact(2), RangeLit::Between(0, 2)}, all_ops()),
        DslSpec(U"0", {CharClass::Digit}, {RangeLit::Exact(2)}, all_ops()),
    };
    for (const auto& dsl : dsls) {
        for (int d : {2, 3}) {
            auto expected = brute_force_programs(dsl, (1 << d) - 1);
            std::set<std::vector<int>> got;
            for (const auto& p : enumerate_all(dsl, TreeShape{1, d}, PruningOptions::none())) {
                CHECK(got.insert(p.assignment[0]).second);
                CHECK(well_typed(dsl, p.assignment[0]));
            }
            CHECK(got == expected);
        }
    }
}

TEST_CASE("single literal DSL at depth two")
{
    DslSpec dsl(U"a", {}, {RangeLit::Exact(2)}, all_ops());
    auto programs = enumerate_all(dsl, TreeShape{1, 2}, PruningOptions::none());
    auto backend = smt::make_builtin_backend();
    Enumerator e(*backend, dsl, TreeShape{1, 2}, PruningOptions::none());
    std::set<std::string> emitted;
    for (const auto& p : programs)
        emitted.insert(emit(e.decode(p)));
    CHECK(emitted == std::set<std::string>{"a", "a*", "a+", "a?", "a|a", "aa", "a{2}"});
    auto pruned = enumerate_all(dsl, TreeShape{1, 2}, PruningOptions{});
    CHECK(pruned.size() == programs.size() - 1);
}

TEST_CASE("children constraints of the date DSL")
{
    auto dsl = build_dsl(fixtures::u32(fixtures::kDateValid));
    const int range = *dsl.op_id(OpKind::Range);
    auto programs = enumerate_all(dsl, TreeShape{1, 2}, PruningOptions::none());
    size_t ranged = 0;
    for (const auto& p : programs) {
        CHECK(well_typed(dsl, p.assignment[0]));
        for (size_t leaf = 1; leaf < 3; ++leaf)
            CHECK(dsl.symbol(p.assignment[0][leaf]).kind != Symbol::Kind::Operator);
        if (p.assignment[0][0] == range) {
            ++ranged;
            CHECK(dsl.symbol(p.assignment[0][1]).type() == SymType::Re);
            CHECK(dsl.symbol(p.assignment[0][2]).kind == Symbol::Kind::RangeLiteral);
        }
    }
    const size_t re_terminals = dsl.literals().size() + dsl.classes().size();
    CHECK(ranged == re_terminals * dsl.range_literals().size());
}

TEST_CASE("encode rejects a DSL without regex terminals")
{
    DslSpec empty(U"", {}, {}, all_ops());
    auto backend = smt::make_builtin_backend();
    CHECK_THROWS_AS(Enumerator(*backend, empty, TreeShape{1, 2}, PruningOptions{}), EncodingError);
}

TEST_CASE("pruning removes redundant shapes")
{
    DslSpec dsl(U"a", {}, {RangeLit::Exact(2), RangeLit::Between(0, 2)}, all_ops());
    auto backend = smt::make_builtin_backend();
    Enumerator e(*backend, dsl, TreeShape{1, 3}, PruningOptions{});
    size_t pruned_count = 0;
    while (auto p = e.next()) {
        ++pruned_count;
        Regex r = e.decode(*p);
        CHECK_FALSE(contains_pair(r, NodeKind::Plus, NodeKind::Option));
        CHECK_FALSE(contains_pair(r, NodeKind::Kleene, NodeKind::Kleene));
        CHECK_FALSE(contains_pair(r, NodeKind::Range, NodeKind::Kleene));
        CHECK_FALSE(has_idempotent_union(r));
    }
    auto all = enumerate_all(dsl, TreeShape{1, 3}, PruningOptions::none());
    CHECK(pruned_count < all.size());
}

TEST_CASE("every pruned program has a retained equivalent")
{
    DslSpec dsl(U"ab", {}, {RangeLit::Exact(2), RangeLit::Between(0, 2)}, all_ops());
    auto b1 = smt::make_builtin_backend();
    auto b2 = smt::make_builtin_backend();
    Enumerator full(*b1, dsl, TreeShape{1, 3}, PruningOptions::none());
    Enumerator pruned(*b2, dsl, TreeShape{1, 3}, PruningOptions{});

    std::set<std::vector<int>> kept;
    std::map<std::string, std::vector<Regex>> by_print;
    // programs of depth 2 are retained too (smaller shapes come first)
    auto shallow = enumerate_all(dsl, TreeShape{1, 2}, PruningOptions{});
    {
        auto b3 = smt::make_builtin_backend();
        Enumerator small(*b3, dsl, TreeShape{1, 2}, PruningOptions{});
        for (const auto& p : shallow) {
            Regex r = small.decode(p);
            by_print[fingerprint(r, U"ab", 5)].push_back(r);
        }
    }
    while (auto p = pruned.next()) {
        kept.insert(p->assignment[0]);
        Regex r = pruned.decode(*p);
        by_print[fingerprint(r, U"ab", 5)].push_back(r);
    }
    size_t removed = 0;
    while (auto p = full.next()) {
        if (kept.count(p->assignment[0]))
            continue;
        ++removed;
        Regex r = full.decode(*p);
        const auto& bucket = by_print[fingerprint(r, U"ab", 5)];
        bool found = std::any_of(bucket.begin(), bucket.end(), [&](const Regex& k) { return equivalent(k, r); });
        CHECK_MESSAGE(found, emit(r));
    }
    CHECK(removed > 0);
}

TEST_CASE("blocking union swaps")
{
    DslSpec dsl(U"ab", {}, {}, all_ops());
    const int u = *dsl.op_id(OpKind::Union);
    const int a = *dsl.id_of(Symbol{Symbol::Kind::Literal, U'a'});
    const int b = *dsl.id_of(Symbol{Symbol::Kind::Literal, U'b'});
    const size_t total = enumerate_all(dsl, TreeShape{1, 2}, PruningOptions::none()).size();

    auto backend = smt::make_builtin_backend();
    Enumerator e(*backend, dsl, TreeShape{1, 2}, PruningOptions::none());
    MultiTreeProgram ab{TreeShape{1, 2}, {{u, a, b}}};
    PruningOptions swaps = PruningOptions::none();
    swaps.union_commutativity = true;
    auto backend2 = smt::make_builtin_backend();
    Enumerator with_swaps(*backend2, dsl, TreeShape{1, 2}, swaps);
    with_swaps.block_equivalent(ab);
    size_t left = 0;
    while (auto p = with_swaps.next()) {
        ++left;
        CHECK(emit(with_swaps.decode(*p)) != "a|b");
        CHECK(emit(with_swaps.decode(*p)) != "b|a");
    }
    CHECK(left == total - 2);

    e.block_equivalent(ab);
    size_t plain = 0;
    while (e.next())
        ++plain;
    CHECK(plain == total - 1);
}

TEST_CASE("two union nodes block four assignments")
{
    DslSpec dsl(U"ab", {}, {}, all_ops());
    const int u = *dsl.op_id(OpKind::Union);
    const int c = *dsl.op_id(OpKind::Concat);
    const int a = *dsl.id_of(Symbol{Symbol::Kind::Literal, U'a'});
    const int b = *dsl.id_of(Symbol{Symbol::Kind::Literal, U'b'});
    PruningOptions swaps = PruningOptions::none();
    swaps.union_commutativity = true;
    const size_t total = enumerate_all(dsl, TreeShape{1, 3}, PruningOptions::none()).size();
    auto backend = smt::make_builtin_backend();
    Enumerator e(*backend, dsl, TreeShape{1, 3}, swaps);
    // (a|b)(b|a) has two unions
    MultiTreeProgram p{TreeShape{1, 3}, {{c, u, u, a, b, b, a}}};
    e.block_equivalent(p);
    size_t left = 0;
    while (e.next())
        ++left;
    CHECK(left == total - 4);
}

TEST_CASE("consecutive programs differ and decode well-typed")
{
    auto dsl = build_dsl({U"ab1", U"c2"});
    auto backend = smt::make_builtin_backend();
    Enumerator e(*backend, dsl, TreeShape{2, 2}, PruningOptions{});
    std::optional<MultiTreeProgram> prev;
    for (int i = 0; i < 300; ++i) {
        auto p = e.next();
        REQUIRE(p.has_value());
        for (const auto& tree : p->assignment)
            CHECK(well_typed(dsl, tree));
        if (prev)
            CHECK_FALSE(*prev == *p);
        CHECK_NOTHROW(e.decode(*p));
        prev = p;
    }
    CHECK(e.programs() == 300);
}

TEST_CASE("relaxed blocks only remove failing programs")
{
    DslSpec dsl(U"ab0", {CharClass::Lower, CharClass::DigitLower},
                {RangeLit::Exact(2), RangeLit::Between(0, 2), RangeLit::Between(1, 3)}, all_ops());
    auto all = enumerate_all(dsl, TreeShape{1, 3}, PruningOptions::none());
    auto backend = smt::make_builtin_backend();
    Enumerator e(*backend, dsl, TreeShape{1, 3}, PruningOptions::none());
    const Regex any_star = Regex::star(Regex::char_class(CharClass::Any));
    const Regex none = Regex::char_class(CharClass::None);
    fixtures::RegexGen gen(17);
    size_t checked = 0;
    size_t widened = 0;
    for (int round = 0; round < 80; ++round) {
        const auto& p = all[gen.idx(all.size())];
        std::u32string x = gen.string(U"ab0c", 4);
        bool accepts = full_match(e.decode(p), x);
        const Regex& hole = accepts ? none : any_star;
        auto r = e.relax(
            p, [&](const Relaxation& m) { return full_match(e.decode_relaxed(p, 0, m, hole), x) == accepts; }, !accepts);
        for (size_t i = 0; i < r.keep[0].size(); ++i)
            widened += r.allowed[0][i].size() > 1 ? 1 : 0;
        for (const auto& q : all) {
            bool member = true;
            for (size_t i = 0; i < r.keep[0].size() && member; ++i) {
                if (!r.keep[0][i])
                    continue;
                const auto& allowed = r.allowed[0][i];
                member = allowed.empty() ? q.assignment[0][i] == p.assignment[0][i]
                                         : std::find(allowed.begin(), allowed.end(), q.assignment[0][i]) != allowed.end();
            }
            if (member) {
                CHECK(full_match(e.decode(q), x) == accepts);
                ++checked;
            }
        }
    }
    CHECK(checked > 80);
    CHECK(widened > 0);
}

TEST_CASE("static date shape reaches the expected program")
{
    auto valid = fixtures::u32(fixtures::kDateValid);
    auto s = split(valid);
    REQUIRE(s.n == 5);
    std::vector<TreeSlot> slots;
    std::vector<std::vector<std::u32string>> columns(s.n);
    for (size_t col = 0; col < s.n; ++col) {
        for (const auto& f : s.fields)
            columns[col].push_back(f[col]);
        if (s.divider_column[col])
            slots.push_back(TreeSlot{std::nullopt, Regex::text(columns[col][0])});
        else
            slots.push_back(TreeSlot{build_dsl(columns[col]), std::nullopt});
    }
    auto backend = smt::make_builtin_backend();
    Enumerator e(*backend, slots, 2, PruningOptions{});
    const Regex any_star = Regex::star(Regex::char_class(CharClass::Any));
    bool found = false;
    int steps = 0;
    while (auto p = e.next()) {
        ++steps;
        bool all_fields = true;
        for (size_t t = 0; t < s.n && all_fields; ++t) {
            if (!slots[t].dsl)
                continue;
            Regex tree = e.decode_tree(*p, t);
            for (const auto& f : columns[t]) {
                if (full_match(tree, f))
                    continue;
                all_fields = false;
                auto r = e.relax(
                    *p, [&](const Relaxation& m) { return !full_match(e.decode_relaxed(*p, t, m, any_star), f); }, true);
                for (size_t o = 0; o < s.n; ++o)
                    if (o != t)
                        std::fill(r.keep[o].begin(), r.keep[o].end(), 0);
                e.block_partial(*p, r);
                break;
            }
        }
        if (all_fields && emit(e.decode(*p)) == "[0-9]{2}/[0-9]{2}/[0-9]{4}") {
            found = true;
            break;
        }
    }
    CHECK(found);
    MESSAGE("programs until target: " << steps);
}
