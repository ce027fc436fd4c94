#include "sat_solver.hpp"

#include <algorithm>
#include <cmath>

namespace forest::smt {

int SatSolver::new_var()
{
    int v = num_vars();
    assign_.push_back(kUndef);
    levels_.push_back(0);
    reasons_.push_back(kNoReason);
    phase_.push_back(0);
    seen_.push_back(0);
    activity_.push_back(0.0);
    heap_pos_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
}

bool SatSolver::add_clause(std::vector<Lit> lits)
{
    if (!ok_)
        return false;
    backtrack(0);
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<Lit> kept;
    kept.reserve(lits.size());
    for (size_t i = 0; i < lits.size(); ++i) {
        if (i + 1 < lits.size() && lits[i + 1] == flip(lits[i]))
            return true;  // tautology
        int8_t v = value(lits[i]);
        if (v == 1)
            return true;
        if (v == 0)
            continue;
        kept.push_back(lits[i]);
    }
    if (kept.empty()) {
        ok_ = false;
        return false;
    }
    ++num_problem_clauses_;
    if (kept.size() == 1) {
        enqueue(kept[0], kNoReason);
        if (propagate() != kNoReason) {
            ok_ = false;
            return false;
        }
        return true;
    }
    attach(std::move(kept), false);
    return true;
}

int SatSolver::attach(std::vector<Lit> lits, bool learnt)
{
    int cref;
    if (!free_refs_.empty()) {
        cref = free_refs_.back();
        free_refs_.pop_back();
    } else {
        cref = static_cast<int>(clauses_.size());
        clauses_.emplace_back();
    }
    Clause& c = clauses_[static_cast<size_t>(cref)];
    c.lits = std::move(lits);
    c.learnt = learnt;
    c.removed = false;
    c.activity = 0;
    watches_[static_cast<size_t>(flip(c.lits[0]))].push_back({cref, c.lits[1]});
    watches_[static_cast<size_t>(flip(c.lits[1]))].push_back({cref, c.lits[0]});
    if (learnt) {
        learnt_refs_.push_back(cref);
        bump_clause(c);
    }
    return cref;
}

void SatSolver::enqueue(Lit l, int reason)
{
    auto v = static_cast<size_t>(var_of(l));
    assign_[v] = static_cast<int8_t>((l & 1) ? 0 : 1);
    levels_[v] = level();
    reasons_[v] = reason;
    trail_.push_back(l);
}

int SatSolver::propagate()
{
    int confl = kNoReason;
    while (qhead_ < trail_.size()) {
        Lit p = trail_[qhead_++];
        Lit false_lit = flip(p);
        auto& ws = watches_[static_cast<size_t>(p)];
        size_t i = 0;
        size_t j = 0;
        while (i < ws.size()) {
            Watcher w = ws[i++];
            if (value(w.blocker) == 1) {
                ws[j++] = w;
                continue;
            }
            Clause& c = clauses_[static_cast<size_t>(w.cref)];
            if (c.removed)
                continue;
            if (c.lits[0] == false_lit)
                std::swap(c.lits[0], c.lits[1]);
            Lit first = c.lits[0];
            if (first != w.blocker && value(first) == 1) {
                ws[j++] = {w.cref, first};
                continue;
            }
            bool moved = false;
            for (size_t k = 2; k < c.lits.size(); ++k) {
                if (value(c.lits[k]) != 0) {
                    std::swap(c.lits[1], c.lits[k]);
                    watches_[static_cast<size_t>(flip(c.lits[1]))].push_back({w.cref, first});
                    moved = true;
                    break;
                }
            }
            if (moved)
                continue;
            ws[j++] = {w.cref, first};
            if (value(first) == 0) {
                confl = w.cref;
                qhead_ = trail_.size();
                while (i < ws.size())
                    ws[j++] = ws[i++];
            } else {
                enqueue(first, w.cref);
            }
        }
        ws.resize(j);
        if (confl != kNoReason)
            break;
    }
    return confl;
}

bool SatSolver::redundant(Lit l) const
{
    int r = reasons_[static_cast<size_t>(var_of(l))];
    if (r == kNoReason)
        return false;
    const Clause& c = clauses_[static_cast<size_t>(r)];
    for (size_t k = 1; k < c.lits.size(); ++k) {
        auto v = static_cast<size_t>(var_of(c.lits[k]));
        if (!seen_[v] && levels_[v] > 0)
            return false;
    }
    return true;
}

void SatSolver::analyze(int confl, std::vector<Lit>& learnt, int& bt_level)
{
    int path = 0;
    Lit p = -1;
    learnt.clear();
    learnt.push_back(-1);
    size_t index = trail_.size();
    do {
        Clause& c = clauses_[static_cast<size_t>(confl)];
        if (c.learnt)
            bump_clause(c);
        for (size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
            Lit q = c.lits[k];
            auto v = static_cast<size_t>(var_of(q));
            if (!seen_[v] && levels_[v] > 0) {
                bump_var(static_cast<int>(v));
                seen_[v] = 1;
                if (levels_[v] >= level())
                    ++path;
                else
                    learnt.push_back(q);
            }
        }
        while (!seen_[static_cast<size_t>(var_of(trail_[--index]))]) {
        }
        p = trail_[index];
        confl = reasons_[static_cast<size_t>(var_of(p))];
        seen_[static_cast<size_t>(var_of(p))] = 0;
        --path;
    } while (path > 0);
    learnt[0] = flip(p);

    std::vector<Lit> original(learnt.begin() + 1, learnt.end());
    size_t out = 1;
    for (size_t k = 1; k < learnt.size(); ++k)
        if (!redundant(learnt[k]))
            learnt[out++] = learnt[k];
    learnt.resize(out);
    for (Lit l : original)
        seen_[static_cast<size_t>(var_of(l))] = 0;

    bt_level = 0;
    if (learnt.size() > 1) {
        size_t best = 1;
        for (size_t k = 2; k < learnt.size(); ++k)
            if (levels_[static_cast<size_t>(var_of(learnt[k]))] > levels_[static_cast<size_t>(var_of(learnt[best]))])
                best = k;
        std::swap(learnt[1], learnt[best]);
        bt_level = levels_[static_cast<size_t>(var_of(learnt[1]))];
    }
}

void SatSolver::backtrack(int lvl)
{
    if (level() <= lvl)
        return;
    size_t stop = static_cast<size_t>(trail_lim_[static_cast<size_t>(lvl)]);
    for (size_t k = trail_.size(); k-- > stop;) {
        auto v = static_cast<size_t>(var_of(trail_[k]));
        phase_[v] = assign_[v] == 1 ? 1 : 0;
        assign_[v] = kUndef;
        reasons_[v] = kNoReason;
        if (heap_pos_[v] < 0)
            heap_insert(static_cast<int>(v));
    }
    trail_.resize(stop);
    trail_lim_.resize(static_cast<size_t>(lvl));
    qhead_ = trail_.size();
}

bool SatSolver::locked(int cref) const
{
    const Clause& c = clauses_[static_cast<size_t>(cref)];
    auto v = static_cast<size_t>(var_of(c.lits[0]));
    return value(c.lits[0]) == 1 && reasons_[v] == cref;
}

void SatSolver::reduce_learnts()
{
    std::vector<int> live;
    for (int r : learnt_refs_)
        if (!clauses_[static_cast<size_t>(r)].removed)
            live.push_back(r);
    std::sort(live.begin(), live.end(), [&](int a, int b) {
        return clauses_[static_cast<size_t>(a)].activity < clauses_[static_cast<size_t>(b)].activity;
    });
    size_t half = live.size() / 2;
    std::vector<int> keep;
    bool any_removed = false;
    for (size_t k = 0; k < live.size(); ++k) {
        Clause& c = clauses_[static_cast<size_t>(live[k])];
        if (k < half && c.lits.size() > 2 && !locked(live[k])) {
            c.removed = true;
            any_removed = true;
        } else {
            keep.push_back(live[k]);
        }
    }
    learnt_refs_ = std::move(keep);
    if (!any_removed)
        return;
    for (auto& ws : watches_)
        ws.erase(std::remove_if(ws.begin(), ws.end(),
                                [&](const Watcher& w) { return clauses_[static_cast<size_t>(w.cref)].removed; }),
                 ws.end());
    for (size_t r = 0; r < clauses_.size(); ++r) {
        Clause& c = clauses_[r];
        if (c.removed && !c.lits.empty()) {
            c.lits.clear();
            c.lits.shrink_to_fit();
            free_refs_.push_back(static_cast<int>(r));
        }
    }
}

void SatSolver::bump_var(int v)
{
    auto i = static_cast<size_t>(v);
    activity_[i] += var_inc_;
    if (activity_[i] > 1e100) {
        for (auto& a : activity_)
            a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[i] >= 0)
        heap_up(static_cast<size_t>(heap_pos_[i]));
}

void SatSolver::bump_clause(Clause& c)
{
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
        for (int r : learnt_refs_)
            clauses_[static_cast<size_t>(r)].activity *= 1e-20;
        clause_inc_ *= 1e-20;
    }
}

void SatSolver::decay()
{
    var_inc_ /= 0.95;
    clause_inc_ /= 0.999;
}

void SatSolver::heap_insert(int v)
{
    heap_pos_[static_cast<size_t>(v)] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
}

int SatSolver::heap_pop()
{
    int top = heap_.front();
    heap_pos_[static_cast<size_t>(top)] = -1;
    int last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_[0] = last;
        heap_pos_[static_cast<size_t>(last)] = 0;
        heap_down(0);
    }
    return top;
}

void SatSolver::heap_up(size_t i)
{
    int v = heap_[i];
    while (i > 0) {
        size_t parent = (i - 1) / 2;
        if (!heap_less(v, heap_[parent]))
            break;
        heap_[i] = heap_[parent];
        heap_pos_[static_cast<size_t>(heap_[i])] = static_cast<int>(i);
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[static_cast<size_t>(v)] = static_cast<int>(i);
}

void SatSolver::heap_down(size_t i)
{
    int v = heap_[i];
    for (;;) {
        size_t child = 2 * i + 1;
        if (child >= heap_.size())
            break;
        if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child]))
            ++child;
        if (!heap_less(heap_[child], v))
            break;
        heap_[i] = heap_[child];
        heap_pos_[static_cast<size_t>(heap_[i])] = static_cast<int>(i);
        i = child;
    }
    heap_[i] = v;
    heap_pos_[static_cast<size_t>(v)] = static_cast<int>(i);
}

double SatSolver::luby(double y, int x)
{
    int size = 1;
    int seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    return std::pow(y, seq);
}

SatSolver::Result SatSolver::solve(const std::vector<Lit>& assumptions, Clock::time_point deadline)
{
    if (!ok_)
        return Result::Unsat;
    backtrack(0);
    if (propagate() != kNoReason) {
        ok_ = false;
        return Result::Unsat;
    }
    max_learnts_ = std::max(max_learnts_, std::max(2000.0, static_cast<double>(num_problem_clauses_) / 3.0));

    std::vector<Lit> learnt;
    uint64_t steps = 0;
    for (int restart = 0;; ++restart) {
        const auto budget = static_cast<uint64_t>(luby(2.0, restart) * 100.0);
        uint64_t local = 0;
        for (;;) {
            int confl = propagate();
            if (confl != kNoReason) {
                ++conflicts_;
                ++local;
                if (level() == 0) {
                    ok_ = false;
                    return Result::Unsat;
                }
                int bt = 0;
                analyze(confl, learnt, bt);
                backtrack(bt);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], kNoReason);
                } else {
                    int cref = attach(learnt, true);
                    enqueue(learnt[0], cref);
                }
                decay();
                if ((conflicts_ & 255) == 0 && Clock::now() > deadline) {
                    backtrack(0);
                    return Result::Timeout;
                }
                continue;
            }
            if (local >= budget) {
                backtrack(0);
                max_learnts_ *= 1.05;
                break;
            }
            if (static_cast<double>(learnt_refs_.size()) >= max_learnts_ + static_cast<double>(trail_.size()))
                reduce_learnts();

            Lit next = -1;
            while (static_cast<size_t>(level()) < assumptions.size()) {
                Lit a = assumptions[static_cast<size_t>(level())];
                int8_t v = value(a);
                if (v == 1) {
                    trail_lim_.push_back(static_cast<int>(trail_.size()));
                } else if (v == 0) {
                    backtrack(0);
                    return Result::Unsat;
                } else {
                    next = a;
                    break;
                }
            }
            if (next == -1) {
                int chosen = -1;
                while (!heap_.empty()) {
                    int v = heap_pop();
                    if (assign_[static_cast<size_t>(v)] == kUndef) {
                        chosen = v;
                        break;
                    }
                }
                if (chosen < 0) {
                    model_.assign(assign_.size(), 0);
                    for (size_t v = 0; v < assign_.size(); ++v)
                        model_[v] = assign_[v] == 1 ? 1 : 0;
                    backtrack(0);
                    return Result::Sat;
                }
                next = phase_[static_cast<size_t>(chosen)] ? pos(chosen) : negative(chosen);
            }
            trail_lim_.push_back(static_cast<int>(trail_.size()));
            enqueue(next, kNoReason);
            if ((++steps & 1023) == 0 && Clock::now() > deadline) {
                backtrack(0);
                return Result::Timeout;
            }
        }
    }
}

}  // namespace forest::smt
