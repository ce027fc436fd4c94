#include "doctest.h"
#include "utf8.hpp"

using namespace forest;

TEST_CASE("utf8 round trip")
{
    std::string s = "a\xC3\xA9\xE2\x82\xAC\xF0\x9F\x98\x80";
    auto cps = utf8::decode(s);
    REQUIRE(cps.size() == 4);
    CHECK(cps[1] == U'é');
    CHECK(cps[2] == U'€');
    CHECK(cps[3] == U'\U0001F600');
    CHECK(utf8::encode(cps) == s);
}

TEST_CASE("utf8 rejects malformed input")
{
    CHECK_FALSE(utf8::is_valid("\xC3"));
    CHECK_FALSE(utf8::is_valid("\xC0\xAF"));
    CHECK_FALSE(utf8::is_valid("\xED\xA0\x80"));
    CHECK_THROWS_AS(utf8::decode("\xFF"), utf8::DecodeError);
    CHECK(utf8::is_valid(""));
}
