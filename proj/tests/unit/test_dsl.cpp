#include <set>

#include "../support/fixtures.hpp"
#include "doctest.h"
#include "dsl.hpp"

using namespace forest;

namespace {

std::set<CharClass> classes_of(const DslSpec& d) { return {d.classes().begin(), d.classes().end()}; }

}  // namespace

TEST_CASE("date DSL")
{
    auto dsl = build_dsl(fixtures::u32(fixtures::kDateValid));
    CHECK(dsl.max_length() == 10);
    CHECK(dsl.literals().find(U'/') != std::u32string::npos);
    CHECK(classes_of(dsl) == std::set<CharClass>{CharClass::Digit});
    std::set<int> exact;
    size_t between = 0;
    for (const auto& r : dsl.range_literals()) {
        if (r.exact())
            exact.insert(r.min);
        else
            ++between;
    }
    CHECK(exact == std::set<int>{2, 3, 4, 5, 6, 7, 8, 9, 10});
    // pairs 0 <= m < n <= 10 minus (0,1)
    CHECK(between == 55 - 1);
    CHECK(dsl.symbol(0).kind == Symbol::Kind::Epsilon);
}

TEST_CASE("single letter DSL")
{
    auto dsl = build_dsl({U"a"});
    CHECK(dsl.max_length() == 1);
    CHECK(dsl.range_literals().empty());
    CHECK_FALSE(dsl.op_id(OpKind::Range).has_value());
    CHECK(dsl.literals() == U"a");
    CHECK(classes_of(dsl) == std::set<CharClass>{CharClass::Lower});
}

TEST_CASE("single digit DSL")
{
    auto dsl = build_dsl({U"7"});
    CHECK(classes_of(dsl) == std::set<CharClass>{CharClass::Digit});
}

TEST_CASE("classes need every part represented")
{
    CHECK(classes_of(build_dsl({U"a1"})) ==
          std::set<CharClass>{CharClass::Digit, CharClass::Lower, CharClass::DigitLower, CharClass::HexLower});
    CHECK(classes_of(build_dsl({U"z1"})) ==
          std::set<CharClass>{CharClass::Digit, CharClass::Lower, CharClass::DigitLower});
    CHECK(classes_of(build_dsl({U"K1A 0B1"})) == std::set<CharClass>{CharClass::Digit, CharClass::Upper,
                                                                     CharClass::DigitUpper, CharClass::HexUpper});
    CHECK(classes_of(build_dsl({U"aB9"})).size() == 9);
    CHECK(build_dsl({U"-/"}).classes().empty());
}

TEST_CASE("ids are a bijection with epsilon at zero")
{
    auto dsl = build_dsl({U"ab-12", U"Zz"});
    for (int id = 0; id < dsl.size(); ++id) {
        auto back = dsl.id_of(dsl.symbol(id));
        REQUIRE(back.has_value());
        CHECK(*back == id);
    }
    CHECK(dsl.ids_of_type(SymType::Epsilon) == std::vector<int>{0});
}

TEST_CASE("every example character is covered by a terminal")
{
    std::vector<std::u32string> valid{U"x-9", U"Q.q", U"€5"};
    auto dsl = build_dsl(valid);
    for (const auto& s : valid)
        for (char32_t c : s)
            CHECK(dsl.literals().find(c) != std::u32string::npos);
}

TEST_CASE("shrinking the valid set never grows the DSL")
{
    std::vector<std::u32string> all{U"ab12", U"CD-3", U"x"};
    auto big = build_dsl(all);
    for (size_t drop = 0; drop < all.size(); ++drop) {
        auto sub = all;
        sub.erase(sub.begin() + static_cast<long>(drop));
        auto small = build_dsl(sub);
        CHECK(small.size() <= big.size());
        for (int id = 0; id < small.size(); ++id)
            CHECK(big.id_of(small.symbol(id)).has_value());
    }
}

TEST_CASE("empty valid set is rejected")
{
    CHECK_THROWS_AS(build_dsl({}), DslError);
}
