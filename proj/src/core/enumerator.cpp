#include "enumerator.hpp"

#include <algorithm>
#include <map>

namespace forest {

using smt::Term;

ShapeSchedule::ShapeSchedule(ScheduleMode mode, ShapeLimits limits, int static_n)
    : mode_(mode), limits_(limits), static_n_(static_n)
{
}

std::optional<TreeShape> ShapeSchedule::next()
{
    if (mode_ != ScheduleMode::Dynamic) {
        if (depth_ > limits_.max_depth)
            return std::nullopt;
        int n = mode_ == ScheduleMode::Static ? static_n_ : 1;
        return TreeShape{n, depth_++};
    }
    while (pending_.empty()) {
        if (++nodes_ > limits_.max_nodes)
            return std::nullopt;
        for (int d = 2; d <= limits_.max_depth; ++d) {
            int per = (1 << d) - 1;
            if (nodes_ % per == 0)
                pending_.push_back(TreeShape{nodes_ / per, d});
        }
    }
    TreeShape s = pending_.front();
    pending_.erase(pending_.begin());
    return s;
}

Enumerator::Enumerator(smt::Backend& backend, std::vector<TreeSlot> trees, int depth, PruningOptions pruning)
    : backend_(backend), trees_(std::move(trees)), shape_{static_cast<int>(trees_.size()), depth}, pruning_(pruning)
{
    if (trees_.empty())
        throw EncodingError("no trees to encode");
    encode();
    assert_pruning();
}

Enumerator::Enumerator(smt::Backend& backend, const DslSpec& dsl, TreeShape shape, PruningOptions pruning)
    : Enumerator(backend, std::vector<TreeSlot>(static_cast<size_t>(shape.n), TreeSlot{dsl, std::nullopt}), shape.d,
                 pruning)
{
}

void Enumerator::encode()
{
    const int N = shape_.nodes_per_tree();
    vars_.resize(trees_.size());
    for (size_t t = 0; t < trees_.size(); ++t) {
        if (!searched(t))
            continue;
        const DslSpec& dsl = *trees_[t].dsl;
        bool has_re_terminal = false;
        for (int id : dsl.ids_of_type(SymType::Re))
            has_re_terminal = has_re_terminal || dsl.symbol(id).kind != Symbol::Kind::Operator;
        if (!has_re_terminal)
            throw EncodingError("DSL has no regex-typed terminal");

        std::vector<int64_t> all_ids;
        for (int id = 0; id < dsl.size(); ++id)
            all_ids.push_back(id);
        std::vector<int64_t> leaf_ids(dsl.leaf_ids().begin(), dsl.leaf_ids().end());
        auto as64 = [](const std::vector<int>& v) { return std::vector<int64_t>(v.begin(), v.end()); };

        for (int i = 1; i <= N; ++i)
            vars_[t].push_back(backend_.new_int(is_leaf(i) ? leaf_ids : all_ids));

        for (int i = 1; i <= N; ++i) {
            if (is_leaf(i)) {
                backend_.add(smt::in(var(t, i), leaf_ids));
                continue;
            }
            for (int p = 0; p < dsl.size(); ++p) {
                const Symbol& s = dsl.symbol(p);
                for (int j = 0; j < DslSpec::k; ++j) {
                    int child = 2 * i + j;
                    backend_.add(smt::implies(smt::eq(var(t, i), p),
                                              smt::in(var(t, child), as64(dsl.ids_of_type(s.param_type(j))))));
                }
            }
        }
        backend_.add(smt::in(var(t, 1), as64(dsl.ids_of_type(SymType::Re))));
    }
}

namespace {

// (r{inner}){outer} as a single range literal, when the set of repetition
// counts is one contiguous interval.
std::optional<RangeLit> compose_ranges(RangeLit outer, RangeLit inner)
{
    const int a = inner.min;
    const int b = inner.max;
    const int c = outer.min;
    const int d = outer.max;
    for (int k = c; k < d; ++k)
        if ((k + 1) * a > k * b + 1)
            return std::nullopt;
    RangeLit lit{c * a, d * b};
    if (!lit.valid())
        return std::nullopt;
    return lit;
}

}  // namespace

void Enumerator::assert_pruning()
{
    const int N = shape_.nodes_per_tree();
    for (size_t t = 0; t < trees_.size(); ++t) {
        if (!searched(t))
            continue;
        const DslSpec& dsl = *trees_[t].dsl;
        std::vector<int> quantifiers;
        for (OpKind op : {OpKind::Kleene, OpKind::Plus, OpKind::Option})
            if (auto id = dsl.op_id(op))
                quantifiers.push_back(*id);
        auto kleene = dsl.op_id(OpKind::Kleene);
        auto option = dsl.op_id(OpKind::Option);
        auto range = dsl.op_id(OpKind::Range);
        auto union_id = dsl.op_id(OpKind::Union);

        std::map<RangeLit, int> lit_ids;
        for (int id : dsl.ids_of_type(SymType::RangeLit))
            lit_ids.emplace(dsl.symbol(id).lit, id);
        std::vector<int64_t> low_between;
        for (const auto& [lit, id] : lit_ids)
            if (!lit.exact() && lit.min <= 1)
                low_between.push_back(id);
        // outer literal id -> inner literal ids whose composition is one literal
        std::vector<std::pair<int, std::vector<int64_t>>> reducible;
        for (const auto& [outer, outer_id] : lit_ids) {
            std::vector<int64_t> inner_ids;
            for (const auto& [inner, inner_id] : lit_ids) {
                auto composed = compose_ranges(outer, inner);
                if (composed && lit_ids.count(*composed))
                    inner_ids.push_back(inner_id);
            }
            if (!inner_ids.empty())
                reducible.emplace_back(outer_id, std::move(inner_ids));
        }

        for (int i = 1; i <= N; ++i) {
            if (is_leaf(i))
                continue;
            const int c = 2 * i;
            const bool child_internal = !is_leaf(c);
            auto forbid_pair = [&](int parent, int child) {
                backend_.add(smt::neg(smt::all({smt::eq(var(t, i), parent), smt::eq(var(t, c), child)})));
            };

            if (pruning_.quantifier_nesting && child_internal)
                for (int p : quantifiers)
                    for (int q : quantifiers)
                        forbid_pair(p, q);

            if (pruning_.range_quantifier && child_internal && range) {
                if (kleene)
                    forbid_pair(*range, *kleene);
                if (option)
                    forbid_pair(*range, *option);
                if (!low_between.empty())
                    for (int p : quantifiers)
                        backend_.add(smt::neg(smt::all({smt::eq(var(t, i), p), smt::eq(var(t, c), *range),
                                                        smt::in(var(t, 2 * c + 1), low_between)})));
            }

            if (pruning_.nested_range && child_internal && range)
                for (const auto& [outer_id, inner_ids] : reducible)
                    backend_.add(smt::neg(smt::all({smt::eq(var(t, i), *range), smt::eq(var(t, c), *range),
                                                    smt::eq(var(t, c + 1), outer_id),
                                                    smt::in(var(t, 2 * c + 1), inner_ids)})));

            if (pruning_.union_idempotence && union_id) {
                std::vector<Term> differs;
                for (int width = 1, left = c, right = c + 1; left <= N; width *= 2, left *= 2, right *= 2)
                    for (int j = 0; j < width; ++j)
                        differs.push_back(smt::neg(smt::eq(var(t, left + j), var(t, right + j))));
                backend_.add(smt::implies(smt::eq(var(t, i), *union_id), smt::any(differs)));
            }
        }
    }
}

std::optional<MultiTreeProgram> Enumerator::next()
{
    bool any_searched = false;
    for (size_t t = 0; t < trees_.size(); ++t)
        any_searched = any_searched || searched(t);

    if (backend_.check() == smt::CheckResult::Unsat)
        return std::nullopt;
    MultiTreeProgram p;
    p.shape = shape_;
    p.assignment.resize(trees_.size());
    const auto& m = backend_.model();
    for (size_t t = 0; t < trees_.size(); ++t)
        if (searched(t))
            for (const auto& v : vars_[t])
                p.assignment[t].push_back(static_cast<int>(m.value(v)));
    ++programs_;
    if (any_searched)
        block_assignment(p.assignment, nullptr);
    else
        backend_.add(smt::bottom());
    return p;
}

void Enumerator::block_assignment(const std::vector<std::vector<int>>& a, const Relaxation* r)
{
    std::vector<Term> lits;
    for (size_t t = 0; t < trees_.size(); ++t) {
        if (!searched(t))
            continue;
        for (size_t i = 0; i < a[t].size(); ++i) {
            if (r && !r->keep[t][i])
                continue;
            if (r && !r->allowed[t][i].empty())
                lits.push_back(smt::neg(
                    smt::in(vars_[t][i], std::vector<int64_t>(r->allowed[t][i].begin(), r->allowed[t][i].end()))));
            else
                lits.push_back(smt::neg(smt::eq(vars_[t][i], a[t][i])));
        }
    }
    backend_.add(smt::any(std::move(lits)));
}

void Enumerator::block_partial(const MultiTreeProgram& p, const Relaxation& r) { block_assignment(p.assignment, &r); }

void Enumerator::block_equivalent(const MultiTreeProgram& p)
{
    if (!pruning_.union_commutativity) {
        block_assignment(p.assignment, nullptr);
        return;
    }
    const int N = shape_.nodes_per_tree();
    std::vector<std::pair<size_t, int>> unions;
    for (size_t t = 0; t < trees_.size(); ++t) {
        if (!searched(t))
            continue;
        auto u = trees_[t].dsl->op_id(OpKind::Union);
        if (!u)
            continue;
        for (int i = N; i >= 1; --i)
            if (!is_leaf(i) && p.assignment[t][static_cast<size_t>(i - 1)] == *u)
                unions.emplace_back(t, i);
    }
    // deepest first so that each ancestor swap moves already-swapped subtrees
    const size_t count = std::min<size_t>(unions.size(), 10);
    for (uint32_t mask = 0; mask < (1u << count); ++mask) {
        auto a = p.assignment;
        for (size_t k = 0; k < count; ++k) {
            if (!((mask >> k) & 1))
                continue;
            auto [t, u] = unions[k];
            for (int width = 1, left = 2 * u, right = 2 * u + 1; left <= N; width *= 2, left *= 2, right *= 2)
                for (int j = 0; j < width; ++j)
                    std::swap(a[t][static_cast<size_t>(left + j - 1)], a[t][static_cast<size_t>(right + j - 1)]);
        }
        block_assignment(a, nullptr);
    }
}

Relaxation Enumerator::exact(const MultiTreeProgram& p, bool wider) const
{
    Relaxation r;
    r.wider = wider;
    for (size_t t = 0; t < trees_.size(); ++t) {
        const size_t n = p.assignment[t].size();
        r.keep.emplace_back(n, 1);
        r.allowed.emplace_back(n);
        r.leaf.emplace_back(n);
        r.range.emplace_back(n);
    }
    return r;
}

Regex Enumerator::decode_node(const MultiTreeProgram& p, size_t tree, int node, const Relaxation* r,
                              const Regex* hole) const
{
    const auto idx = static_cast<size_t>(node - 1);
    auto kept = [&](int i) { return !r || r->keep[tree][static_cast<size_t>(i - 1)]; };
    if (!kept(node))
        return *hole;
    if (r && r->leaf[tree][idx])
        return *r->leaf[tree][idx];
    const DslSpec& dsl = *trees_[tree].dsl;
    const Symbol& s = dsl.symbol(p.assignment[tree][idx]);
    switch (s.kind) {
    case Symbol::Kind::Literal: return Regex::literal(s.ch);
    case Symbol::Kind::Class: return Regex::char_class(s.cls);
    case Symbol::Kind::Epsilon:
    case Symbol::Kind::RangeLiteral: throw EncodingError("ill-typed program at node " + std::to_string(node));
    case Symbol::Kind::Operator: break;
    }
    auto left = [&] { return decode_node(p, tree, 2 * node, r, hole); };
    auto right = [&] { return decode_node(p, tree, 2 * node + 1, r, hole); };
    switch (s.op) {
    case OpKind::Union: return Regex::alt(left(), right());
    case OpKind::Concat: return Regex::concat(left(), right());
    case OpKind::Kleene: return Regex::star(left());
    case OpKind::Plus: return Regex::plus(left());
    case OpKind::Option: return Regex::option(left());
    case OpKind::Range: {
        const auto lit_idx = static_cast<size_t>(2 * node);
        if (!kept(2 * node + 1))
            return r->wider ? Regex::star(left()) : *hole;
        if (r && r->range[tree][lit_idx])
            return Regex::repeat(left(), *r->range[tree][lit_idx]);
        const Symbol& lit = dsl.symbol(p.assignment[tree][lit_idx]);
        if (lit.kind != Symbol::Kind::RangeLiteral)
            throw EncodingError("range without a range literal");
        return Regex::repeat(left(), lit.lit);
    }
    }
    throw EncodingError("unknown operator");
}

Regex Enumerator::decode_tree(const MultiTreeProgram& p, size_t tree) const
{
    if (!searched(tree))
        return *trees_[tree].fixed;
    return flatten(decode_node(p, tree, 1, nullptr, nullptr));
}

Regex Enumerator::decode_relaxed(const MultiTreeProgram& p, size_t tree, const Relaxation& r, const Regex& hole) const
{
    if (!searched(tree))
        return *trees_[tree].fixed;
    return flatten(decode_node(p, tree, 1, &r, &hole));
}

Regex Enumerator::decode(const MultiTreeProgram& p) const
{
    if (trees_.size() == 1)
        return decode_tree(p, 0);
    std::vector<Regex> parts;
    for (size_t t = 0; t < trees_.size(); ++t)
        parts.push_back(decode_tree(p, t));
    return flatten(Regex::concat(std::move(parts)));
}

SymType Enumerator::expected_type(const MultiTreeProgram& p, size_t tree, int node) const
{
    if (node == 1)
        return SymType::Re;
    const Symbol& parent = trees_[tree].dsl->symbol(p.assignment[tree][static_cast<size_t>(node / 2 - 1)]);
    return parent.param_type(node % 2);
}

namespace {

// Class membership over ASCII, which covers every class of the family.
bool class_subset(CharClass a, CharClass b)
{
    for (char32_t c = 0; c < 128; ++c)
        if (class_contains(a, c) && !class_contains(b, c))
            return false;
    return true;
}

size_t class_size(CharClass c)
{
    size_t n = 0;
    for (char32_t x = 0; x < 128; ++x)
        n += class_contains(c, x) ? 1 : 0;
    return n;
}

bool covers(CharClass hull, const Symbol& s)
{
    return s.kind == Symbol::Kind::Literal ? class_contains(hull, s.ch) : class_subset(s.cls, hull);
}

}  // namespace

Relaxation Enumerator::relax(const MultiTreeProgram& p, const std::function<bool(const Relaxation&)>& still_fails,
                             bool wider) const
{
    Relaxation r = exact(p, wider);
    const int N = shape_.nodes_per_tree();
    auto drop = [&](Relaxation& m, size_t t, int node) {
        for (int width = 1, first = node; first <= N; width *= 2, first *= 2)
            for (int j = 0; j < width; ++j)
                m.keep[t][static_cast<size_t>(first + j - 1)] = 0;
    };
    auto level_order = [&](const std::function<void(size_t, int)>& visit) {
        for (int level = 0; level < shape_.d; ++level)
            for (size_t t = 0; t < trees_.size(); ++t)
                if (searched(t))
                    for (int node = 1 << level; node < (2 << level); ++node)
                        visit(t, node);
    };

    level_order([&](size_t t, int node) {
        const auto idx = static_cast<size_t>(node - 1);
        int id = p.assignment[t][idx];
        if (!r.keep[t][idx] || id == 0 || expected_type(p, t, node) != SymType::Re)
            return;
        Relaxation trial = r;
        drop(trial, t, node);
        if (still_fails(trial)) {
            r = std::move(trial);
            return;
        }
        const Symbol& s = trees_[t].dsl->symbol(id);
        if (wider && s.kind == Symbol::Kind::Operator && s.op == OpKind::Range &&
            r.keep[t][static_cast<size_t>(2 * node)]) {
            trial = r;
            trial.keep[t][static_cast<size_t>(2 * node)] = 0;
            if (still_fails(trial))
                r = std::move(trial);
        }
    });

    // value sets for the remaining terminals and range literals
    level_order([&](size_t t, int node) {
        const auto idx = static_cast<size_t>(node - 1);
        if (!r.keep[t][idx])
            return;
        const DslSpec& dsl = *trees_[t].dsl;
        const int id = p.assignment[t][idx];
        const Symbol& s = dsl.symbol(id);
        if (s.kind == Symbol::Kind::Literal || s.kind == Symbol::Kind::Class) {
            if (wider) {
                std::vector<CharClass> hulls{CharClass::Any};
                for (CharClass c : kClassFamily)
                    if (covers(c, s) && !(s.kind == Symbol::Kind::Class && s.cls == c))
                        hulls.push_back(c);
                std::stable_sort(hulls.begin() + 1, hulls.end(),
                                 [](CharClass a, CharClass b) { return class_size(a) > class_size(b); });
                for (CharClass h : hulls) {
                    r.leaf[t][idx] = Regex::char_class(h);
                    if (still_fails(r)) {
                        for (int v = 0; v < dsl.size(); ++v) {
                            const Symbol& o = dsl.symbol(v);
                            if ((o.kind == Symbol::Kind::Literal || o.kind == Symbol::Kind::Class) && covers(h, o))
                                r.allowed[t][idx].push_back(v);
                        }
                        return;
                    }
                }
                r.leaf[t][idx].reset();
                return;
            }
            // narrower: one character stands for every class containing it
            std::u32string chars;
            if (s.kind == Symbol::Kind::Literal) {
                chars.push_back(s.ch);
            } else {
                for (char32_t c : dsl.literals())
                    if (class_contains(s.cls, c))
                        chars.push_back(c);
            }
            for (char32_t c : chars) {
                if (s.kind == Symbol::Kind::Class) {
                    r.leaf[t][idx] = Regex::literal(c);
                    if (!still_fails(r))
                        continue;
                }
                for (int v = 0; v < dsl.size(); ++v) {
                    const Symbol& o = dsl.symbol(v);
                    if ((o.kind == Symbol::Kind::Literal && o.ch == c) ||
                        (o.kind == Symbol::Kind::Class && class_contains(o.cls, c)))
                        r.allowed[t][idx].push_back(v);
                }
                return;
            }
            r.leaf[t][idx].reset();
            return;
        }
        if (s.kind != Symbol::Kind::RangeLiteral)
            return;
        const RangeLit own = s.lit;
        auto members = [&](auto&& in) {
            std::vector<int> ids;
            for (int v : dsl.ids_of_type(SymType::RangeLit))
                if (in(dsl.symbol(v).lit))
                    ids.push_back(v);
            return ids;
        };
        if (wider) {
            int lo = own.min;
            int hi = own.max;
            const int top = std::max(dsl.max_length(), hi);
            for (int h = top; h > hi; --h) {
                r.range[t][idx] = RangeLit{lo, h};
                if (still_fails(r)) {
                    hi = h;
                    break;
                }
            }
            for (int l = 0; l < lo; ++l) {
                r.range[t][idx] = RangeLit{l, hi};
                if (still_fails(r)) {
                    lo = l;
                    break;
                }
            }
            r.range[t][idx] = RangeLit{lo, hi};
            r.allowed[t][idx] = members([&](const RangeLit& x) { return lo <= x.min && x.max <= hi; });
            return;
        }
        int best_k = -1;
        size_t best = 0;
        for (int k = own.min; k <= own.max; ++k) {
            r.range[t][idx] = RangeLit{k, k};
            if (!still_fails(r))
                continue;
            size_t n = members([&](const RangeLit& x) { return x.min <= k && k <= x.max; }).size();
            if (n > best) {
                best = n;
                best_k = k;
            }
        }
        if (best_k < 0) {
            r.range[t][idx].reset();
            return;
        }
        r.range[t][idx] = RangeLit{best_k, best_k};
        r.allowed[t][idx] = members([&](const RangeLit& x) { return x.min <= best_k && best_k <= x.max; });
    });
    return r;
}

}  // namespace forest
