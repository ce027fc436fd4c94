#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace forest {

// Fixed character class family, in DSL id order.
enum class CharClass : uint8_t {
    Digit,          // [0-9]
    Upper,          // [A-Z]
    Lower,          // [a-z]
    DigitUpper,     // [0-9A-Z]
    DigitLower,     // [0-9a-z]
    Alpha,          // [A-Za-z]
    Alnum,          // [0-9A-Za-z]
    HexUpper,       // [0-9A-F]
    HexLower,       // [0-9a-f]
    // Internal classes used only when relaxing programs during verification.
    // They never appear in a DSL and cannot be emitted.
    Any,
    None,
};

inline constexpr std::array<CharClass, 9> kClassFamily = {
    CharClass::Digit,    CharClass::Upper,      CharClass::Lower,
    CharClass::DigitUpper, CharClass::DigitLower, CharClass::Alpha,
    CharClass::Alnum,    CharClass::HexUpper,   CharClass::HexLower,
};

bool class_contains(CharClass cls, char32_t c);
std::string_view class_syntax(CharClass cls);

struct RangeLit {
    int min = 0;
    int max = 0;  // max == min for an exact {m}
    bool exact() const { return min == max; }
    static RangeLit Exact(int m) { return {m, m}; }
    static RangeLit Between(int m, int n) { return {m, n}; }
    bool valid() const;
    friend bool operator==(const RangeLit&, const RangeLit&) = default;
    friend auto operator<=>(const RangeLit&, const RangeLit&) = default;
};

std::string to_string(const RangeLit& lit);

enum class NodeKind : uint8_t {
    Union,
    Concat,
    Kleene,
    Plus,
    Option,
    Range,
    Literal,
    Class,
    Group,
};

// Value-semantic regex tree. Concat nodes hold two or more children; unary
// nodes hold exactly one; Union holds exactly two.
struct Regex {
    NodeKind kind = NodeKind::Literal;
    char32_t ch = 0;
    CharClass cls = CharClass::Digit;
    RangeLit range;
    std::vector<Regex> children;

    static Regex literal(char32_t c);
    static Regex char_class(CharClass c);
    static Regex alt(Regex l, Regex r);
    static Regex concat(std::vector<Regex> parts);
    static Regex concat(Regex a, Regex b);
    static Regex star(Regex r);
    static Regex plus(Regex r);
    static Regex option(Regex r);
    static Regex repeat(Regex r, RangeLit lit);
    static Regex group(Regex r);
    // Literal string as a concatenation of character literals (or one literal).
    static Regex text(std::u32string_view s);

    bool is_leaf() const { return kind == NodeKind::Literal || kind == NodeKind::Class; }
    const Regex& child() const { return children.front(); }

    friend bool operator==(const Regex&, const Regex&) = default;
};

// Flattens nested Concat nodes so no Concat has a Concat child.
Regex flatten(const Regex& r);

size_t count_groups(const Regex& r);
bool has_groups(const Regex& r);
Regex strip_groups(const Regex& r);
size_t node_count(const Regex& r);

// Every character appearing as a literal anywhere in the tree.
std::u32string literal_chars(const Regex& r);

}  // namespace forest
