#include "regex_ast.hpp"

#include <algorithm>
#include <cassert>

namespace forest {

namespace {

bool digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool upper(char32_t c) { return c >= U'A' && c <= U'Z'; }
bool lower(char32_t c) { return c >= U'a' && c <= U'z'; }

}  // namespace

bool class_contains(CharClass cls, char32_t c)
{
    switch (cls) {
    case CharClass::Digit: return digit(c);
    case CharClass::Upper: return upper(c);
    case CharClass::Lower: return lower(c);
    case CharClass::DigitUpper: return digit(c) || upper(c);
    case CharClass::DigitLower: return digit(c) || lower(c);
    case CharClass::Alpha: return upper(c) || lower(c);
    case CharClass::Alnum: return digit(c) || upper(c) || lower(c);
    case CharClass::HexUpper: return digit(c) || (c >= U'A' && c <= U'F');
    case CharClass::HexLower: return digit(c) || (c >= U'a' && c <= U'f');
    case CharClass::Any: return true;
    case CharClass::None: return false;
    }
    return false;
}

std::string_view class_syntax(CharClass cls)
{
    switch (cls) {
    case CharClass::Digit: return "[0-9]";
    case CharClass::Upper: return "[A-Z]";
    case CharClass::Lower: return "[a-z]";
    case CharClass::DigitUpper: return "[0-9A-Z]";
    case CharClass::DigitLower: return "[0-9a-z]";
    case CharClass::Alpha: return "[A-Za-z]";
    case CharClass::Alnum: return "[0-9A-Za-z]";
    case CharClass::HexUpper: return "[0-9A-F]";
    case CharClass::HexLower: return "[0-9a-f]";
    case CharClass::Any: return "<any>";
    case CharClass::None: return "<none>";
    }
    return "";
}

bool RangeLit::valid() const
{
    if (exact())
        return min >= 2;
    return min >= 0 && min < max && !(min == 0 && max == 1);
}

std::string to_string(const RangeLit& lit)
{
    if (lit.exact())
        return "{" + std::to_string(lit.min) + "}";
    return "{" + std::to_string(lit.min) + "," + std::to_string(lit.max) + "}";
}

Regex Regex::literal(char32_t c)
{
    Regex r;
    r.kind = NodeKind::Literal;
    r.ch = c;
    return r;
}

Regex Regex::char_class(CharClass c)
{
    Regex r;
    r.kind = NodeKind::Class;
    r.cls = c;
    return r;
}

Regex Regex::alt(Regex l, Regex rr)
{
    Regex r;
    r.kind = NodeKind::Union;
    r.children.push_back(std::move(l));
    r.children.push_back(std::move(rr));
    return r;
}

Regex Regex::concat(std::vector<Regex> parts)
{
    assert(!parts.empty());
    if (parts.size() == 1)
        return std::move(parts.front());
    Regex r;
    r.kind = NodeKind::Concat;
    r.children = std::move(parts);
    return r;
}

Regex Regex::concat(Regex a, Regex b)
{
    std::vector<Regex> parts;
    parts.push_back(std::move(a));
    parts.push_back(std::move(b));
    return concat(std::move(parts));
}

namespace {

Regex unary(NodeKind kind, Regex child)
{
    Regex r;
    r.kind = kind;
    r.children.push_back(std::move(child));
    return r;
}

}  // namespace

Regex Regex::star(Regex r) { return unary(NodeKind::Kleene, std::move(r)); }
Regex Regex::plus(Regex r) { return unary(NodeKind::Plus, std::move(r)); }
Regex Regex::option(Regex r) { return unary(NodeKind::Option, std::move(r)); }
Regex Regex::group(Regex r) { return unary(NodeKind::Group, std::move(r)); }

Regex Regex::repeat(Regex r, RangeLit lit)
{
    Regex out = unary(NodeKind::Range, std::move(r));
    out.range = lit;
    return out;
}

Regex Regex::text(std::u32string_view s)
{
    assert(!s.empty());
    std::vector<Regex> parts;
    for (char32_t c : s)
        parts.push_back(literal(c));
    return concat(std::move(parts));
}

Regex flatten(const Regex& r)
{
    Regex out = r;
    out.children.clear();
    for (const auto& c : r.children) {
        Regex fc = flatten(c);
        if (r.kind == NodeKind::Concat && fc.kind == NodeKind::Concat) {
            for (auto& g : fc.children)
                out.children.push_back(std::move(g));
        } else {
            out.children.push_back(std::move(fc));
        }
    }
    return out;
}

size_t count_groups(const Regex& r)
{
    size_t n = r.kind == NodeKind::Group ? 1 : 0;
    for (const auto& c : r.children)
        n += count_groups(c);
    return n;
}

bool has_groups(const Regex& r) { return count_groups(r) > 0; }

Regex strip_groups(const Regex& r)
{
    if (r.kind == NodeKind::Group)
        return strip_groups(r.child());
    Regex out = r;
    for (auto& c : out.children)
        c = strip_groups(c);
    return flatten(out);
}

size_t node_count(const Regex& r)
{
    size_t n = 1;
    for (const auto& c : r.children)
        n += node_count(c);
    return n;
}

std::u32string literal_chars(const Regex& r)
{
    std::u32string out;
    auto walk = [&](auto&& self, const Regex& n) -> void {
        if (n.kind == NodeKind::Literal && out.find(n.ch) == std::u32string::npos)
            out.push_back(n.ch);
        for (const auto& c : n.children)
            self(self, c);
    };
    walk(walk, r);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace forest
