#include <algorithm>
#include <map>
#include <unordered_map>

#include "backend.hpp"
#include "sat_solver.hpp"

namespace forest::smt {

namespace {

using Lit = SatSolver::Lit;

class SatBackend final : public Backend {
public:
    SatBackend()
    {
        int t = sat_.new_var();
        true_lit_ = SatSolver::pos(t);
        sat_.add_clause({true_lit_});
    }

    BoolVar new_bool() override
    {
        bools_.push_back(sat_.new_var());
        return BoolVar{static_cast<int>(bools_.size()) - 1};
    }

    IntVar new_int(std::vector<int64_t> domain) override
    {
        std::sort(domain.begin(), domain.end());
        domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
        if (domain.empty())
            throw SolverError("builtin solver needs a finite integer domain");
        IntInfo info;
        info.domain = std::move(domain);
        std::vector<Lit> onehot;
        for (size_t k = 0; k < info.domain.size(); ++k) {
            info.vars.push_back(sat_.new_var());
            onehot.push_back(SatSolver::pos(info.vars.back()));
        }
        sat_.add_clause(onehot);
        at_most_k(onehot, 1, -1);
        ints_.push_back(std::move(info));
        return IntVar{static_cast<int>(ints_.size()) - 1};
    }

    void add(const Term& t) override
    {
        Lit guard = scopes_.empty() ? -1 : SatSolver::negative(scopes_.back());
        assert_term(t, guard);
    }

    void push() override { scopes_.push_back(sat_.new_var()); }

    void pop() override
    {
        if (scopes_.empty())
            throw SolverError("pop without matching push");
        sat_.add_clause({SatSolver::negative(scopes_.back())});
        scopes_.pop_back();
    }

    CheckResult check() override
    {
        std::vector<Lit> assumptions;
        for (int s : scopes_)
            assumptions.push_back(SatSolver::pos(s));
        auto deadline = SatSolver::Clock::now() +
                        std::chrono::duration_cast<SatSolver::Clock::duration>(std::chrono::duration<double>(timeout_));
        auto r = sat_.solve(assumptions, deadline);
        if (r == SatSolver::Result::Timeout)
            throw SolverTimeout("solver timed out");
        if (r == SatSolver::Result::Unsat)
            return CheckResult::Unsat;
        model_.bools.assign(bools_.size(), 0);
        for (size_t b = 0; b < bools_.size(); ++b)
            model_.bools[b] = sat_.model_value(bools_[b]) ? 1 : 0;
        model_.ints.assign(ints_.size(), 0);
        for (size_t i = 0; i < ints_.size(); ++i) {
            const auto& info = ints_[i];
            for (size_t k = 0; k < info.vars.size(); ++k)
                if (sat_.model_value(info.vars[k])) {
                    model_.ints[i] = info.domain[k];
                    break;
                }
        }
        return CheckResult::Sat;
    }

    const Model& model() const override { return model_; }
    std::string name() const override { return "builtin"; }

private:
    struct IntInfo {
        std::vector<int64_t> domain;
        std::vector<int> vars;
    };

    void clause(std::vector<Lit> lits, Lit guard)
    {
        if (guard >= 0)
            lits.push_back(guard);
        sat_.add_clause(std::move(lits));
    }

    // Sequential-counter encoding of sum(lits) <= k.
    void at_most_k(const std::vector<Lit>& lits, int64_t k, Lit guard)
    {
        const size_t n = lits.size();
        if (k < 0) {
            clause({}, guard);
            return;
        }
        if (static_cast<size_t>(k) >= n)
            return;
        if (k == 0) {
            for (Lit l : lits)
                clause({SatSolver::flip(l)}, guard);
            return;
        }
        if (k == 1 && n <= 5) {
            for (size_t a = 0; a < n; ++a)
                for (size_t b = a + 1; b < n; ++b)
                    clause({SatSolver::flip(lits[a]), SatSolver::flip(lits[b])}, guard);
            return;
        }
        const auto K = static_cast<size_t>(k);
        std::vector<std::vector<Lit>> s(n - 1, std::vector<Lit>(K));
        for (auto& row : s)
            for (auto& x : row)
                x = SatSolver::pos(sat_.new_var());
        auto nx = [&](size_t i) { return SatSolver::flip(lits[i]); };
        clause({nx(0), s[0][0]}, guard);
        for (size_t j = 1; j < K; ++j)
            clause({SatSolver::flip(s[0][j])}, guard);
        for (size_t i = 1; i + 1 < n; ++i) {
            clause({nx(i), s[i][0]}, guard);
            clause({SatSolver::flip(s[i - 1][0]), s[i][0]}, guard);
            for (size_t j = 1; j < K; ++j) {
                clause({nx(i), SatSolver::flip(s[i - 1][j - 1]), s[i][j]}, guard);
                clause({SatSolver::flip(s[i - 1][j]), s[i][j]}, guard);
            }
            clause({nx(i), SatSolver::flip(s[i - 1][K - 1])}, guard);
        }
        clause({nx(n - 1), SatSolver::flip(s[n - 2][K - 1])}, guard);
    }

    void assert_term(const Term& t, Lit guard)
    {
        switch (t->op) {
        case Op::True: return;
        case Op::And:
            for (const auto& k : t->kids)
                assert_term(k, guard);
            return;
        case Op::Or: {
            std::vector<Lit> lits;
            for (const auto& k : t->kids)
                lits.push_back(to_lit(k));
            clause(std::move(lits), guard);
            return;
        }
        case Op::Implies:
            clause({SatSolver::flip(to_lit(t->kids[0])), to_lit(t->kids[1])}, guard);
            return;
        case Op::AtMost: {
            std::vector<Lit> lits;
            for (const auto& k : t->kids)
                lits.push_back(to_lit(k));
            at_most_k(lits, t->value, guard);
            return;
        }
        case Op::Not:
            if (t->kids[0]->op == Op::And) {
                std::vector<Lit> lits;
                for (const auto& k : t->kids[0]->kids)
                    lits.push_back(SatSolver::flip(to_lit(k)));
                clause(std::move(lits), guard);
                return;
            }
            break;
        default: break;
        }
        clause({to_lit(t)}, guard);
    }

    Lit set_lit(int var, const std::vector<size_t>& idx)
    {
        const auto& info = ints_.at(static_cast<size_t>(var));
        if (idx.empty())
            return SatSolver::flip(true_lit_);
        if (idx.size() == info.vars.size())
            return true_lit_;
        if (idx.size() == 1)
            return SatSolver::pos(info.vars[idx[0]]);
        if (idx.size() + 1 == info.vars.size()) {
            for (size_t k = 0; k < info.vars.size(); ++k)
                if (std::find(idx.begin(), idx.end(), k) == idx.end())
                    return SatSolver::negative(info.vars[k]);
        }
        auto key = std::make_pair(var, idx);
        auto it = set_memo_.find(key);
        if (it != set_memo_.end())
            return it->second;
        Lit y = SatSolver::pos(sat_.new_var());
        std::vector<Lit> big{SatSolver::flip(y)};
        for (size_t k : idx) {
            Lit x = SatSolver::pos(info.vars[k]);
            big.push_back(x);
            sat_.add_clause({SatSolver::flip(x), y});
        }
        sat_.add_clause(big);
        set_memo_.emplace(std::move(key), y);
        return y;
    }

    template <typename Pred>
    Lit int_lit(int var, Pred pred)
    {
        const auto& info = ints_.at(static_cast<size_t>(var));
        std::vector<size_t> idx;
        for (size_t k = 0; k < info.domain.size(); ++k)
            if (pred(info.domain[k]))
                idx.push_back(k);
        return set_lit(var, idx);
    }

    Lit to_lit(const Term& t)
    {
        switch (t->op) {
        case Op::True: return true_lit_;
        case Op::False: return SatSolver::flip(true_lit_);
        case Op::Bool: return SatSolver::pos(bools_.at(static_cast<size_t>(t->var)));
        case Op::Not: return SatSolver::flip(to_lit(t->kids[0]));
        case Op::IntEq: return int_lit(t->var, [&](int64_t v) { return v == t->value; });
        case Op::IntLe: return int_lit(t->var, [&](int64_t v) { return v <= t->value; });
        case Op::IntGe: return int_lit(t->var, [&](int64_t v) { return v >= t->value; });
        case Op::IntIn:
            return int_lit(t->var,
                           [&](int64_t v) { return std::binary_search(t->values.begin(), t->values.end(), v); });
        case Op::AtMost: throw SolverError("cardinality constraints are only supported as assertions");
        default: break;
        }
        auto it = memo_.find(t.get());
        if (it != memo_.end())
            return it->second;
        Lit y = SatSolver::pos(sat_.new_var());
        Lit ny = SatSolver::flip(y);
        switch (t->op) {
        case Op::And:
        case Op::Or: {
            bool conj = t->op == Op::And;
            std::vector<Lit> big{conj ? y : ny};
            for (const auto& k : t->kids) {
                Lit l = to_lit(k);
                if (conj) {
                    sat_.add_clause({ny, l});
                    big.push_back(SatSolver::flip(l));
                } else {
                    sat_.add_clause({y, SatSolver::flip(l)});
                    big.push_back(l);
                }
            }
            sat_.add_clause(big);
            break;
        }
        case Op::Implies: {
            Lit a = to_lit(t->kids[0]);
            Lit b = to_lit(t->kids[1]);
            sat_.add_clause({ny, SatSolver::flip(a), b});
            sat_.add_clause({y, a});
            sat_.add_clause({y, SatSolver::flip(b)});
            break;
        }
        case Op::Iff: {
            Lit a = to_lit(t->kids[0]);
            Lit b = to_lit(t->kids[1]);
            Lit na = SatSolver::flip(a);
            Lit nb = SatSolver::flip(b);
            sat_.add_clause({ny, na, b});
            sat_.add_clause({ny, a, nb});
            sat_.add_clause({y, a, b});
            sat_.add_clause({y, na, nb});
            break;
        }
        case Op::IntEqInt: {
            const auto& A = ints_.at(static_cast<size_t>(t->var));
            const auto& B = ints_.at(static_cast<size_t>(t->var2));
            for (size_t k = 0; k < A.domain.size(); ++k) {
                Lit xa = SatSolver::pos(A.vars[k]);
                auto pos = std::lower_bound(B.domain.begin(), B.domain.end(), A.domain[k]);
                if (pos == B.domain.end() || *pos != A.domain[k]) {
                    sat_.add_clause({ny, SatSolver::flip(xa)});
                    continue;
                }
                Lit xb = SatSolver::pos(B.vars[static_cast<size_t>(pos - B.domain.begin())]);
                sat_.add_clause({ny, SatSolver::flip(xa), xb});
                sat_.add_clause({y, SatSolver::flip(xa), SatSolver::flip(xb)});
            }
            break;
        }
        default: throw SolverError("unsupported term");
        }
        memo_.emplace(t.get(), y);
        keep_.push_back(t);
        return y;
    }

    SatSolver sat_;
    Lit true_lit_ = 0;
    std::vector<int> bools_;
    std::vector<IntInfo> ints_;
    std::vector<int> scopes_;
    std::unordered_map<const Node*, Lit> memo_;
    std::vector<Term> keep_;
    std::map<std::pair<int, std::vector<size_t>>, Lit> set_memo_;
    Model model_;
};

}  // namespace

std::unique_ptr<Backend> make_builtin_backend() { return std::make_unique<SatBackend>(); }

}  // namespace forest::smt
