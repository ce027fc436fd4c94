#include "capture_synth.hpp"

#include <algorithm>
#include <set>

#include "regex_engine.hpp"

namespace forest {

using smt::Term;

std::vector<Regex> atomic_decompose(const Regex& r)
{
    Regex flat = flatten(r);
    if (flat.kind == NodeKind::Concat)
        return flat.children;
    return {flat};
}

namespace {

void placements_from(size_t atoms, size_t g, size_t start, GroupPlacement& current, std::vector<GroupPlacement>& out)
{
    if (current.groups.size() == g) {
        out.push_back(current);
        return;
    }
    for (size_t first = start; first < atoms; ++first)
        for (size_t last = first + 1; last <= atoms; ++last) {
            current.groups.emplace_back(first, last);
            placements_from(atoms, g, last, current, out);
            current.groups.pop_back();
        }
}

}  // namespace

std::vector<GroupPlacement> enumerate_placements(size_t atoms, size_t g)
{
    std::vector<GroupPlacement> out;
    if (g == 0 || g > atoms)
        return out;
    GroupPlacement current;
    placements_from(atoms, g, 0, current, out);
    return out;
}

Regex place_groups(const std::vector<Regex>& atoms, const GroupPlacement& p)
{
    std::vector<Regex> parts;
    size_t next_group = 0;
    for (size_t i = 0; i < atoms.size();) {
        if (next_group < p.groups.size() && p.groups[next_group].first == i) {
            auto [first, last] = p.groups[next_group++];
            std::vector<Regex> inside(atoms.begin() + static_cast<long>(first), atoms.begin() + static_cast<long>(last));
            parts.push_back(Regex::group(inside.size() == 1 ? inside[0] : Regex::concat(std::move(inside))));
            i = last;
        } else {
            parts.push_back(atoms[i++]);
        }
    }
    return flatten(parts.size() == 1 ? parts[0] : Regex::concat(std::move(parts)));
}

CaptureCollection collect_captures(const Regex& with_groups, const std::vector<std::string>& valid,
                                   const std::vector<std::string>& conditional_invalid)
{
    CaptureCollection out;
    CaptureMatcher matcher(with_groups);
    out.table.groups = matcher.group_count();
    auto take = [&](const std::vector<std::string>& examples, std::vector<std::vector<int64_t>>& rows) {
        for (const auto& x : examples) {
            Captures c = matcher.extract(x);
            if (c.status != Captures::Status::Ok) {
                out.status = c.status == Captures::Status::NoMatch ? CaptureCollection::Status::NoMatch
                                                                   : CaptureCollection::Status::NonNumeric;
                out.offending = x;
                return false;
            }
            rows.push_back(c.values);
        }
        return true;
    };
    if (take(valid, out.table.valid))
        take(conditional_invalid, out.table.invalid);
    return out;
}

bool separates(const ConditionSet& s, const CaptureTable& table)
{
    auto ok = [&](const std::vector<int64_t>& row) {
        return std::all_of(s.begin(), s.end(), [&](const CaptureCondition& c) { return c.holds(row.at(c.group)); });
    };
    return std::all_of(table.valid.begin(), table.valid.end(), ok) &&
           std::none_of(table.invalid.begin(), table.invalid.end(), ok);
}

ConditionSet tighten(const ConditionSet& s, const CaptureTable& table)
{
    ConditionSet out = s;
    for (auto& c : out) {
        if (table.valid.empty())
            continue;
        int64_t lo = table.valid[0][c.group];
        int64_t hi = lo;
        for (const auto& row : table.valid) {
            lo = std::min(lo, row[c.group]);
            hi = std::max(hi, row[c.group]);
        }
        c.bound = c.op == CompareOp::LE ? hi : lo;
    }
    std::sort(out.begin(), out.end());
    return out;
}

ConditionSystem::ConditionSystem(smt::Backend& backend, const CaptureTable& table) : backend_(backend), table_(table)
{
    const size_t G = table_.groups;
    domain_.resize(G);
    for (size_t g = 0; g < G; ++g) {
        std::set<int64_t> values;
        for (const auto* rows : {&table_.valid, &table_.invalid})
            for (const auto& row : *rows)
                for (int64_t d = -1; d <= 1; ++d)
                    values.insert(row[g] + d);
        if (values.empty())
            values.insert(0);
        domain_[g].assign(values.begin(), values.end());
    }
    for (size_t c = 0; c < 2 * G; ++c) {
        used_.push_back(backend_.new_bool());
        bound_.push_back(backend_.new_int(domain_[c / 2]));
    }
    // s_{cap,x} <-> AND over the two conditions on cap of (u -> cond holds)
    auto satisfied = [&](const std::vector<int64_t>& row, size_t g) {
        smt::BoolVar s = backend_.new_bool();
        std::vector<Term> parts;
        for (size_t c = 2 * g; c < 2 * g + 2; ++c)
            parts.push_back(smt::implies(smt::lit(used_[c]), holds(c, row[g])));
        backend_.add(smt::iff(smt::lit(s), smt::all(parts)));
        return s;
    };
    for (const auto& row : table_.valid)
        for (size_t g = 0; g < G; ++g)
            backend_.add(smt::lit(satisfied(row, g)));
    for (const auto& row : table_.invalid) {
        std::vector<Term> violated;
        for (size_t g = 0; g < G; ++g)
            violated.push_back(smt::neg(smt::lit(satisfied(row, g))));
        backend_.add(smt::any(violated));
    }
}

Term ConditionSystem::holds(size_t cond, int64_t value) const
{
    // "$g <= b" holds iff value <= b; "$g >= b" iff value >= b
    return cond % 2 == 0 ? smt::ge(bound_[cond], value) : smt::le(bound_[cond], value);
}

ConditionSet ConditionSystem::read(const smt::Model& m) const
{
    ConditionSet out;
    for (size_t c = 0; c < used_.size(); ++c)
        if (m.value(used_[c]))
            out.push_back(CaptureCondition{c / 2, c % 2 == 0 ? CompareOp::LE : CompareOp::GE, m.value(bound_[c])});
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<ConditionSet> ConditionSystem::minimal()
{
    std::vector<Term> soft;
    for (auto u : used_)
        soft.push_back(smt::neg(smt::lit(u)));
    auto r = smt::maximize(backend_, soft);
    if (r.status == smt::CheckResult::Unsat)
        return std::nullopt;
    return tighten(read(r.model), table_);
}

std::optional<ConditionSet> ConditionSystem::alternative(const ConditionSet& current)
{
    backend_.push();
    struct Pop {
        smt::Backend& b;
        ~Pop() { b.pop(); }
    } guard{backend_};

    std::vector<Term> used_terms;
    for (auto u : used_)
        used_terms.push_back(smt::lit(u));
    backend_.add(smt::at_most(static_cast<int64_t>(current.size()), used_terms));
    std::vector<Term> differs;
    for (size_t c = 0; c < used_.size(); ++c) {
        auto it = std::find_if(current.begin(), current.end(), [&](const CaptureCondition& k) {
            return k.group == c / 2 && (k.op == CompareOp::LE) == (c % 2 == 0);
        });
        if (it == current.end())
            differs.push_back(smt::lit(used_[c]));
        else
            differs.push_back(smt::any({smt::neg(smt::lit(used_[c])), smt::neg(smt::eq(bound_[c], it->bound))}));
    }
    backend_.add(smt::any(differs));
    if (backend_.check() == smt::CheckResult::Unsat)
        return std::nullopt;

    const smt::Model first = backend_.model();
    for (size_t c = 0; c < used_.size(); ++c)
        backend_.add(first.value(used_[c]) ? smt::lit(used_[c]) : smt::neg(smt::lit(used_[c])));
    for (size_t c = 0; c < used_.size(); ++c) {
        if (!first.value(used_[c]))
            continue;
        std::vector<int64_t> order = domain_[c / 2];
        if (c % 2 == 0)
            std::reverse(order.begin(), order.end());
        for (int64_t v : order) {
            backend_.push();
            backend_.add(smt::eq(bound_[c], v));
            bool ok = backend_.check() == smt::CheckResult::Sat;
            backend_.pop();
            if (ok) {
                backend_.add(smt::eq(bound_[c], v));
                break;
            }
        }
    }
    if (backend_.check() == smt::CheckResult::Unsat)
        return std::nullopt;
    return read(backend_.model());
}

ConditionOutcome synthesize_conditions(const Regex& with_groups, const std::vector<std::string>& valid,
                                       const std::vector<std::string>& conditional_invalid, smt::Backend& backend)
{
    ConditionOutcome out;
    auto collected = collect_captures(with_groups, valid, conditional_invalid);
    if (collected.status != CaptureCollection::Status::Ok) {
        out.status = collected.status == CaptureCollection::Status::NoMatch ? ConditionOutcome::Status::NoMatch
                                                                            : ConditionOutcome::Status::NonNumeric;
        out.offending = collected.offending;
        return out;
    }
    ConditionSystem system(backend, collected.table);
    auto s = system.minimal();
    if (!s)
        return out;
    out.status = ConditionOutcome::Status::Ok;
    out.conditions = *s;
    return out;
}

std::optional<PlacementChoice> choose_placement(const Regex& regex, const std::vector<std::string>& valid,
                                                const std::vector<std::string>& conditional_invalid,
                                                const BackendFactory& factory, size_t max_groups)
{
    auto atoms = atomic_decompose(strip_groups(regex));
    for (size_t g = 1; g <= std::min(max_groups, atoms.size()); ++g) {
        std::optional<PlacementChoice> best;
        for (const auto& placement : enumerate_placements(atoms.size(), g)) {
            Regex grouped = place_groups(atoms, placement);
            auto collected = collect_captures(grouped, valid, conditional_invalid);
            if (collected.status != CaptureCollection::Status::Ok)
                continue;
            auto backend = factory();
            ConditionSystem system(*backend, collected.table);
            auto s = system.minimal();
            if (s && (!best || s->size() < best->conditions.size()))
                best = PlacementChoice{placement, grouped, *s};
        }
        if (best)
            return best;
    }
    return std::nullopt;
}

std::optional<std::vector<int64_t>> distinguishing_values(const ConditionSet& s1, const ConditionSet& s2, size_t groups,
                                                          const std::vector<int64_t>& base, smt::Backend& backend)
{
    ConditionSet only1;
    ConditionSet only2;
    ConditionSet shared;
    for (const auto& c : s1)
        (std::find(s2.begin(), s2.end(), c) != s2.end() ? shared : only1).push_back(c);
    for (const auto& c : s2)
        if (std::find(s1.begin(), s1.end(), c) == s1.end())
            only2.push_back(c);
    if (only1.empty() && only2.empty())
        return std::nullopt;

    // Where both sets bound the same group and side, aim halfway between
    // just outside s1 and s2's bound, so repeated questions bisect.
    std::vector<std::pair<size_t, int64_t>> targets;
    for (const auto& k : only1) {
        int64_t outside = k.op == CompareOp::LE ? k.bound + 1 : k.bound - 1;
        auto other = std::find_if(only2.begin(), only2.end(),
                                  [&](const CaptureCondition& o) { return o.group == k.group && o.op == k.op; });
        if (other != only2.end())
            outside = outside + (other->bound - outside) / 2;
        if (outside >= 0)
            targets.emplace_back(k.group, outside);
    }

    std::vector<smt::IntVar> c;
    for (size_t g = 0; g < groups; ++g) {
        std::set<int64_t> dom{0, base.at(g)};
        for (const auto* set : {&s1, &s2})
            for (const auto& k : *set)
                if (k.group == g)
                    for (int64_t d = -1; d <= 1; ++d)
                        if (k.bound + d >= 0)
                            dom.insert(k.bound + d);
        for (const auto& [tg, v] : targets)
            if (tg == g)
                dom.insert(v);
        c.push_back(backend.new_int({dom.begin(), dom.end()}));
    }
    auto term = [&](const CaptureCondition& k) {
        return k.op == CompareOp::LE ? smt::le(c[k.group], k.bound) : smt::ge(c[k.group], k.bound);
    };
    for (const auto& k : shared)
        backend.add(term(k));
    std::vector<Term> t1;
    std::vector<Term> t2;
    for (const auto& k : only1)
        t1.push_back(term(k));
    for (const auto& k : only2)
        t2.push_back(term(k));
    backend.add(smt::neg(smt::iff(smt::all(t1), smt::all(t2))));
    // weights: base value 3, target 2, an s2-only bound 1
    std::vector<Term> prefer;
    for (size_t g = 0; g < groups; ++g)
        for (int w = 0; w < 3; ++w)
            prefer.push_back(smt::eq(c[g], base[g]));
    for (const auto& [g, v] : targets)
        for (int w = 0; w < 2; ++w)
            prefer.push_back(smt::eq(c[g], v));
    for (const auto& k : only2)
        prefer.push_back(smt::eq(c[k.group], k.bound));
    auto r = smt::maximize(backend, prefer);
    if (r.status == smt::CheckResult::Unsat)
        return std::nullopt;
    std::vector<int64_t> values;
    for (auto v : c)
        values.push_back(r.model.value(v));
    return values;
}

std::optional<std::string> distinguish_conditions(const ConditionSet& s1, const ConditionSet& s2,
                                                  const std::vector<std::string>& valid, const Regex& with_groups,
                                                  const BackendFactory& factory)
{
    CaptureMatcher matcher(with_groups);
    bool any_base = false;
    for (const auto& x : valid) {
        Captures base = matcher.extract(x);
        if (base.status != Captures::Status::Ok)
            continue;
        any_base = true;
        auto backend = factory();
        auto values = distinguishing_values(s1, s2, matcher.group_count(), base.values, *backend);
        if (!values)
            return std::nullopt;
        std::string spliced = x;
        for (size_t g = matcher.group_count(); g-- > 0;) {
            if ((*values)[g] == base.values[g])
                continue;
            std::string text = std::to_string((*values)[g]);
            const size_t width = base.texts[g].size();
            if (text.size() < width)
                text.insert(0, width - text.size(), '0');
            auto [from, to] = base.spans[g];
            spliced.replace(from, to - from, text);
        }
        Captures check = matcher.extract(spliced);
        if (check.status == Captures::Status::Ok && check.values == *values && full_match(with_groups, std::string_view(spliced)))
            return spliced;
    }
    if (!any_base)
        throw DistinguishError("no valid example matches the grouped regex");
    throw DistinguishError("distinguishing capture values do not fit any valid example");
}

}  // namespace forest
