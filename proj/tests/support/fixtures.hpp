#pragma once

#include <random>
#include <string>
#include <vector>

#include "regex_ast.hpp"
#include "spec_model.hpp"
#include "utf8.hpp"

namespace fixtures {

inline const std::vector<std::string> kDateValid = {"19/08/1996", "26/10/1998", "22/09/2000",
                                                    "01/12/2001", "29/09/2003", "31/08/2015"};
inline const std::vector<std::string> kDateInvalid = {"19/08/96",  "26-10-1998", "22.09.2000",
                                                      "1/12/2001", "29/9/2003",  "2015/08/31"};
inline const std::vector<std::string> kDateConditional = {"33/08/1996", "26/00/1998", "22/13/2000",
                                                          "00/12/2001", "12/31/2003", "52/03/2015"};

inline std::vector<std::u32string> u32(const std::vector<std::string>& v)
{
    std::vector<std::u32string> out;
    for (const auto& s : v)
        out.push_back(forest::utf8::decode(s));
    return out;
}

inline std::string narrow(const std::u32string& s) { return forest::utf8::encode(s); }

// Random regex over a small alphabet, used by oracle tests.
class RegexGen {
public:
    explicit RegexGen(uint32_t seed, std::u32string literals = U"ab0.") : rng_(seed), lits_(std::move(literals)) {}

    forest::Regex make(int depth)
    {
        using forest::Regex;
        std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
        switch (pick(rng_)) {
        case 0: return Regex::literal(lits_[idx(lits_.size())]);
        case 1: return Regex::char_class(forest::kClassFamily[idx(std::size(forest::kClassFamily))]);
        case 2: return Regex::alt(make(depth - 1), make(depth - 1));
        case 3:
        case 4: return Regex::concat(make(depth - 1), make(depth - 1));
        case 5: return Regex::star(make(depth - 1));
        case 6: return Regex::plus(make(depth - 1));
        case 7: return Regex::option(make(depth - 1));
        default: {
            int m = static_cast<int>(idx(3));
            int n = m + 1 + static_cast<int>(idx(2));
            forest::RangeLit lit = idx(2) == 0 ? forest::RangeLit::Exact(m + 2) : forest::RangeLit::Between(m, n);
            if (!lit.valid())
                lit = forest::RangeLit::Exact(2);
            return Regex::repeat(make(depth - 1), lit);
        }
        }
    }

    std::u32string string(const std::u32string& alphabet, size_t max_len)
    {
        std::u32string s;
        size_t len = idx(max_len + 1);
        for (size_t i = 0; i < len; ++i)
            s += alphabet[idx(alphabet.size())];
        return s;
    }

    size_t idx(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }

    std::mt19937& rng() { return rng_; }

private:
    std::mt19937 rng_;
    std::u32string lits_;
};

}  // namespace fixtures
