#include "dsl.hpp"

#include "utf8.hpp"

#include <algorithm>

namespace forest {

std::string_view op_name(OpKind op)
{
    switch (op) {
    case OpKind::Union: return "union";
    case OpKind::Concat: return "concat";
    case OpKind::Kleene: return "kleene";
    case OpKind::Plus: return "plus";
    case OpKind::Option: return "option";
    case OpKind::Range: return "range";
    }
    return "?";
}

SymType Symbol::type() const
{
    switch (kind) {
    case Kind::Epsilon: return SymType::Epsilon;
    case Kind::RangeLiteral: return SymType::RangeLit;
    default: return SymType::Re;
    }
}

int Symbol::arity() const
{
    if (kind != Kind::Operator)
        return 0;
    switch (op) {
    case OpKind::Union:
    case OpKind::Concat:
    case OpKind::Range: return 2;
    default: return 1;
    }
}

SymType Symbol::param_type(int j) const
{
    if (j >= arity())
        return SymType::Epsilon;
    if (op == OpKind::Range && j == 1)
        return SymType::RangeLit;
    return SymType::Re;
}

std::string Symbol::describe() const
{
    switch (kind) {
    case Kind::Epsilon: return "ε";
    case Kind::Literal: return "'" + utf8::encode(ch) + "'";
    case Kind::Class: return std::string(class_syntax(cls));
    case Kind::RangeLiteral: return to_string(lit);
    case Kind::Operator: return std::string(op_name(op));
    }
    return "?";
}

DslSpec::DslSpec(std::u32string literals, std::vector<CharClass> classes, std::vector<RangeLit> range_literals,
                 std::vector<OpKind> operators)
    : literals_(std::move(literals)), classes_(std::move(classes)), range_literals_(std::move(range_literals)),
      operators_(std::move(operators))
{
    std::sort(literals_.begin(), literals_.end());
    literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
    if (range_literals_.empty())
        operators_.erase(std::remove(operators_.begin(), operators_.end(), OpKind::Range), operators_.end());
    else if (std::find(operators_.begin(), operators_.end(), OpKind::Range) == operators_.end())
        range_literals_.clear();
    for (const auto& lit : range_literals_)
        if (!lit.valid())
            throw DslError("invalid range literal " + to_string(lit));

    symbols_.push_back(Symbol{});
    for (char32_t c : literals_) {
        Symbol s;
        s.kind = Symbol::Kind::Literal;
        s.ch = c;
        symbols_.push_back(s);
    }
    for (CharClass c : classes_) {
        Symbol s;
        s.kind = Symbol::Kind::Class;
        s.cls = c;
        symbols_.push_back(s);
    }
    for (const RangeLit& lit : range_literals_) {
        Symbol s;
        s.kind = Symbol::Kind::RangeLiteral;
        s.lit = lit;
        symbols_.push_back(s);
    }
    for (OpKind op : operators_) {
        Symbol s;
        s.kind = Symbol::Kind::Operator;
        s.op = op;
        symbols_.push_back(s);
    }
    for (int id = 0; id < size(); ++id) {
        by_type_[static_cast<size_t>(symbols_[static_cast<size_t>(id)].type())].push_back(id);
        if (symbols_[static_cast<size_t>(id)].kind != Symbol::Kind::Operator)
            leaf_ids_.push_back(id);
    }
    for (const auto& lit : range_literals_)
        max_length_ = std::max(max_length_, lit.max);
}

std::optional<int> DslSpec::id_of(const Symbol& s) const
{
    auto it = std::find(symbols_.begin(), symbols_.end(), s);
    if (it == symbols_.end())
        return std::nullopt;
    return static_cast<int>(it - symbols_.begin());
}

std::optional<int> DslSpec::op_id(OpKind op) const
{
    Symbol s;
    s.kind = Symbol::Kind::Operator;
    s.op = op;
    return id_of(s);
}

std::vector<RangeLit> range_literals_for(int l)
{
    std::vector<RangeLit> out;
    for (int m = 2; m <= l; ++m)
        out.push_back(RangeLit::Exact(m));
    for (int m = 0; m <= l; ++m)
        for (int n = m + 1; n <= l; ++n)
            if (!(m == 0 && n == 1))
                out.push_back(RangeLit::Between(m, n));
    return out;
}

DslSpec build_dsl(const std::vector<std::u32string>& valid)
{
    if (valid.empty())
        throw DslError("cannot build a DSL without valid examples");
    std::u32string chars;
    int l = 0;
    for (const auto& s : valid) {
        if (s.empty())
            throw DslError("valid examples must be non-empty");
        chars += s;
        l = std::max(l, static_cast<int>(s.size()));
    }
    std::sort(chars.begin(), chars.end());
    chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
    // A class joins when each of its parts (digits, upper, lower, or the hex
    // letters) holds an example character: digits alone give only [0-9].
    auto present = [&](char32_t lo, char32_t hi) {
        return std::any_of(chars.begin(), chars.end(), [&](char32_t c) { return c >= lo && c <= hi; });
    };
    const bool digit = present(U'0', U'9');
    const bool upper = present(U'A', U'Z');
    const bool lower = present(U'a', U'z');
    auto admitted = [&](CharClass cls) {
        switch (cls) {
        case CharClass::Digit: return digit;
        case CharClass::Upper: return upper;
        case CharClass::Lower: return lower;
        case CharClass::DigitUpper: return digit && upper;
        case CharClass::DigitLower: return digit && lower;
        case CharClass::Alpha: return upper && lower;
        case CharClass::Alnum: return digit && upper && lower;
        case CharClass::HexUpper: return digit && present(U'A', U'F');
        case CharClass::HexLower: return digit && present(U'a', U'f');
        default: return false;
        }
    };
    std::vector<CharClass> classes;
    for (CharClass cls : kClassFamily)
        if (admitted(cls))
            classes.push_back(cls);
    DslSpec dsl(chars, classes, range_literals_for(l),
                std::vector<OpKind>(std::begin(kAllOperators), std::end(kAllOperators)));
    dsl.max_length_ = l;
    return dsl;
}

}  // namespace forest
