#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

namespace forest::smt {

// Conflict-driven clause-learning SAT solver with two watched literals,
// VSIDS branching, phase saving, Luby restarts and solving under assumptions.
// A literal is 2*var for the positive phase and 2*var+1 for the negative one.
class SatSolver {
public:
    using Lit = int;
    using Clock = std::chrono::steady_clock;

    enum class Result { Sat, Unsat, Timeout };

    static Lit pos(int var) { return 2 * var; }
    static Lit negative(int var) { return 2 * var + 1; }
    static Lit flip(Lit l) { return l ^ 1; }
    static int var_of(Lit l) { return l >> 1; }

    int new_var();
    int num_vars() const { return static_cast<int>(assign_.size()); }
    size_t num_clauses() const { return num_problem_clauses_; }

    // Returns false once the clause set is unsatisfiable at the root level.
    bool add_clause(std::vector<Lit> lits);

    Result solve(const std::vector<Lit>& assumptions, Clock::time_point deadline);

    // Valid after solve() returned Sat.
    bool model_value(int var) const { return model_[static_cast<size_t>(var)] != 0; }
    bool model_value_lit(Lit l) const { return model_value(var_of(l)) != static_cast<bool>(l & 1); }

    uint64_t conflicts() const { return conflicts_; }

private:
    static constexpr int8_t kUndef = -1;
    static constexpr int kNoReason = -1;

    struct Clause {
        std::vector<Lit> lits;
        double activity = 0;
        bool learnt = false;
        bool removed = false;
    };
    struct Watcher {
        int cref;
        Lit blocker;
    };

    // 1 true, 0 false, -1 unassigned
    int8_t value(Lit l) const
    {
        int8_t a = assign_[static_cast<size_t>(var_of(l))];
        if (a == kUndef)
            return kUndef;
        return static_cast<int8_t>(a ^ (l & 1));
    }
    int level() const { return static_cast<int>(trail_lim_.size()); }

    void enqueue(Lit l, int reason);
    int propagate();
    void analyze(int confl, std::vector<Lit>& learnt, int& bt_level);
    bool redundant(Lit l) const;
    void backtrack(int lvl);
    int attach(std::vector<Lit> lits, bool learnt);
    void reduce_learnts();
    bool locked(int cref) const;

    void bump_var(int v);
    void bump_clause(Clause& c);
    void decay();

    void heap_insert(int v);
    int heap_pop();
    void heap_up(size_t i);
    void heap_down(size_t i);
    bool heap_less(int a, int b) const { return activity_[static_cast<size_t>(a)] > activity_[static_cast<size_t>(b)]; }

    static double luby(double y, int x);

    std::vector<Clause> clauses_;
    std::vector<std::vector<Watcher>> watches_;
    std::vector<int8_t> assign_;
    std::vector<int> levels_;
    std::vector<int> reasons_;
    std::vector<char> phase_;
    std::vector<char> seen_;
    std::vector<double> activity_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    size_t qhead_ = 0;
    std::vector<int> heap_;
    std::vector<int> heap_pos_;
    std::vector<char> model_;
    std::vector<int> learnt_refs_;
    std::vector<int> free_refs_;

    double var_inc_ = 1.0;
    double clause_inc_ = 1.0;
    double max_learnts_ = 0;
    uint64_t conflicts_ = 0;
    size_t num_problem_clauses_ = 0;
    bool ok_ = true;
};

}  // namespace forest::smt
