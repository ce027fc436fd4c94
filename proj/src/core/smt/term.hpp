#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace forest::smt {

struct BoolVar {
    int id = -1;
};
struct IntVar {
    int id = -1;
};

enum class Op : uint8_t {
    True,
    False,
    Bool,
    Not,
    And,
    Or,
    Implies,
    Iff,
    IntEq,     // var = value
    IntLe,     // var <= value
    IntGe,     // var >= value
    IntIn,     // var in values
    IntEqInt,  // var = var2
    AtMost,    // at most `value` of kids hold; assertion-level only
};

struct Node;
using Term = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::True;
    int var = -1;
    int var2 = -1;
    int64_t value = 0;
    std::vector<int64_t> values;
    std::vector<Term> kids;
};

Term top();
Term bottom();
Term lit(BoolVar v);
Term eq(IntVar v, int64_t value);
Term le(IntVar v, int64_t value);
Term ge(IntVar v, int64_t value);
Term in(IntVar v, std::vector<int64_t> values);
Term eq(IntVar a, IntVar b);
Term neg(Term t);
Term all(std::vector<Term> ts);
Term any(std::vector<Term> ts);
Term implies(Term a, Term b);
Term iff(Term a, Term b);
Term at_most(int64_t k, std::vector<Term> ts);

// Values of declared variables, indexed by variable id.
struct Model {
    std::vector<int64_t> ints;
    std::vector<char> bools;

    int64_t value(IntVar v) const { return ints.at(static_cast<size_t>(v.id)); }
    bool value(BoolVar v) const { return bools.at(static_cast<size_t>(v.id)) != 0; }
};

bool evaluate(const Term& t, const Model& m);

}  // namespace forest::smt
