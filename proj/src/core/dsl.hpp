#pragma once

#include "regex_ast.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace forest {

enum class OpKind : uint8_t { Union, Concat, Kleene, Plus, Option, Range };

inline constexpr OpKind kAllOperators[] = {OpKind::Union, OpKind::Concat, OpKind::Kleene,
                                           OpKind::Plus,  OpKind::Option, OpKind::Range};

std::string_view op_name(OpKind op);

enum class SymType : uint8_t { Epsilon, Re, RangeLit };

// One production of the DSL: ε, a terminal, or a typed operator.
struct Symbol {
    enum class Kind : uint8_t { Epsilon, Literal, Class, RangeLiteral, Operator };
    Kind kind = Kind::Epsilon;
    char32_t ch = 0;
    CharClass cls = CharClass::Digit;
    RangeLit lit;
    OpKind op = OpKind::Union;

    SymType type() const;
    int arity() const;
    // Type of parameter j (0-based); Epsilon beyond the arity.
    SymType param_type(int j) const;
    std::string describe() const;

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

class DslError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Per-problem DSL with a fixed id bijection: ε = 0, then literals by code
// point, classes in family order, exact range literals ascending, between
// range literals lexicographically, then operators.
class DslSpec {
public:
    DslSpec() = default;
    DslSpec(std::u32string literals, std::vector<CharClass> classes, std::vector<RangeLit> range_literals,
            std::vector<OpKind> operators);

    static constexpr int k = 2;

    int size() const { return static_cast<int>(symbols_.size()); }
    const Symbol& symbol(int id) const { return symbols_.at(static_cast<size_t>(id)); }
    std::optional<int> id_of(const Symbol& s) const;
    std::optional<int> op_id(OpKind op) const;

    // Ids of every symbol of the given type (Epsilon -> {0}).
    const std::vector<int>& ids_of_type(SymType t) const { return by_type_[static_cast<size_t>(t)]; }
    // ε plus every terminal (the symbols allowed at leaves).
    const std::vector<int>& leaf_ids() const { return leaf_ids_; }

    const std::u32string& literals() const { return literals_; }
    const std::vector<CharClass>& classes() const { return classes_; }
    const std::vector<RangeLit>& range_literals() const { return range_literals_; }
    const std::vector<OpKind>& operators() const { return operators_; }
    int max_length() const { return max_length_; }

    friend bool operator==(const DslSpec& a, const DslSpec& b) { return a.symbols_ == b.symbols_; }

private:
    friend DslSpec build_dsl(const std::vector<std::u32string>& valid);

    std::u32string literals_;
    std::vector<CharClass> classes_;
    std::vector<RangeLit> range_literals_;
    std::vector<OpKind> operators_;
    std::vector<Symbol> symbols_;
    std::vector<int> by_type_[3];
    std::vector<int> leaf_ids_;
    int max_length_ = 0;
};

// Range literals admissible for a longest-example length l.
std::vector<RangeLit> range_literals_for(int l);

DslSpec build_dsl(const std::vector<std::u32string>& valid);

}  // namespace forest
