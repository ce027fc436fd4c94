#include "term.hpp"

#include <algorithm>
#include <stdexcept>

namespace forest::smt {

namespace {

Term make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Term int_node(Op op, IntVar v, int64_t value)
{
    Node n;
    n.op = op;
    n.var = v.id;
    n.value = value;
    return make(std::move(n));
}

}  // namespace

Term top()
{
    Node n;
    n.op = Op::True;
    static const Term t = make(n);
    return t;
}

Term bottom()
{
    Node n;
    n.op = Op::False;
    static const Term t = make(n);
    return t;
}

Term lit(BoolVar v)
{
    Node n;
    n.op = Op::Bool;
    n.var = v.id;
    return make(std::move(n));
}

Term eq(IntVar v, int64_t value) { return int_node(Op::IntEq, v, value); }
Term le(IntVar v, int64_t value) { return int_node(Op::IntLe, v, value); }
Term ge(IntVar v, int64_t value) { return int_node(Op::IntGe, v, value); }

Term in(IntVar v, std::vector<int64_t> values)
{
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.empty())
        return bottom();
    if (values.size() == 1)
        return eq(v, values.front());
    Node n;
    n.op = Op::IntIn;
    n.var = v.id;
    n.values = std::move(values);
    return make(std::move(n));
}

Term eq(IntVar a, IntVar b)
{
    Node n;
    n.op = Op::IntEqInt;
    n.var = a.id;
    n.var2 = b.id;
    return make(std::move(n));
}

Term neg(Term t)
{
    if (t->op == Op::True)
        return bottom();
    if (t->op == Op::False)
        return top();
    if (t->op == Op::Not)
        return t->kids.front();
    Node n;
    n.op = Op::Not;
    n.kids.push_back(std::move(t));
    return make(std::move(n));
}

namespace {

Term nary(Op op, std::vector<Term> ts)
{
    const Op unit = op == Op::And ? Op::True : Op::False;
    const Op absorbing = op == Op::And ? Op::False : Op::True;
    std::vector<Term> kept;
    for (auto& t : ts) {
        if (t->op == absorbing)
            return absorbing == Op::True ? top() : bottom();
        if (t->op == unit)
            continue;
        if (t->op == op) {
            for (const auto& k : t->kids)
                kept.push_back(k);
        } else {
            kept.push_back(std::move(t));
        }
    }
    if (kept.empty())
        return unit == Op::True ? top() : bottom();
    if (kept.size() == 1)
        return kept.front();
    Node n;
    n.op = op;
    n.kids = std::move(kept);
    return make(std::move(n));
}

}  // namespace

Term all(std::vector<Term> ts) { return nary(Op::And, std::move(ts)); }
Term any(std::vector<Term> ts) { return nary(Op::Or, std::move(ts)); }

Term implies(Term a, Term b)
{
    if (a->op == Op::False || b->op == Op::True)
        return top();
    if (a->op == Op::True)
        return b;
    Node n;
    n.op = Op::Implies;
    n.kids = {std::move(a), std::move(b)};
    return make(std::move(n));
}

Term iff(Term a, Term b)
{
    Node n;
    n.op = Op::Iff;
    n.kids = {std::move(a), std::move(b)};
    return make(std::move(n));
}

Term at_most(int64_t k, std::vector<Term> ts)
{
    Node n;
    n.op = Op::AtMost;
    n.value = k;
    n.kids = std::move(ts);
    return make(std::move(n));
}

bool evaluate(const Term& t, const Model& m)
{
    auto iv = [&](int id) { return m.ints.at(static_cast<size_t>(id)); };
    switch (t->op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Bool: return m.bools.at(static_cast<size_t>(t->var)) != 0;
    case Op::Not: return !evaluate(t->kids[0], m);
    case Op::And:
        return std::all_of(t->kids.begin(), t->kids.end(), [&](const Term& k) { return evaluate(k, m); });
    case Op::Or:
        return std::any_of(t->kids.begin(), t->kids.end(), [&](const Term& k) { return evaluate(k, m); });
    case Op::Implies: return !evaluate(t->kids[0], m) || evaluate(t->kids[1], m);
    case Op::Iff: return evaluate(t->kids[0], m) == evaluate(t->kids[1], m);
    case Op::IntEq: return iv(t->var) == t->value;
    case Op::IntLe: return iv(t->var) <= t->value;
    case Op::IntGe: return iv(t->var) >= t->value;
    case Op::IntIn: return std::binary_search(t->values.begin(), t->values.end(), iv(t->var));
    case Op::IntEqInt: return iv(t->var) == iv(t->var2);
    case Op::AtMost: {
        int64_t count = std::count_if(t->kids.begin(), t->kids.end(), [&](const Term& k) { return evaluate(k, m); });
        return count <= t->value;
    }
    }
    throw std::logic_error("unknown term");
}

}  // namespace forest::smt
