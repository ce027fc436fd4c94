#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regex_ast.hpp"
#include "smt/backend.hpp"
#include "spec_model.hpp"

namespace forest {

// Top-level concatenation units of a group-free regex.
std::vector<Regex> atomic_decompose(const Regex& r);

struct GroupPlacement {
    // Half-open atom index intervals [first, last), increasing and disjoint.
    std::vector<std::pair<size_t, size_t>> groups;
    friend bool operator==(const GroupPlacement&, const GroupPlacement&) = default;
};

// All placements of exactly g groups over `atoms` units, ordered
// lexicographically by interval bounds.
std::vector<GroupPlacement> enumerate_placements(size_t atoms, size_t g);

Regex place_groups(const std::vector<Regex>& atoms, const GroupPlacement& p);

// Integer captures of every valid and conditional-invalid example.
struct CaptureTable {
    size_t groups = 0;
    std::vector<std::vector<int64_t>> valid;
    std::vector<std::vector<int64_t>> invalid;
};

struct CaptureCollection {
    enum class Status { Ok, NoMatch, NonNumeric };
    Status status = Status::Ok;
    CaptureTable table;
    std::string offending;
};

CaptureCollection collect_captures(const Regex& with_groups, const std::vector<std::string>& valid,
                                   const std::vector<std::string>& conditional_invalid);

using ConditionSet = std::vector<CaptureCondition>;

// All valid rows satisfy the set and every invalid row violates it.
bool separates(const ConditionSet& s, const CaptureTable& table);

// Moves each bound onto the valid captures: <= to the max, >= to the min.
ConditionSet tighten(const ConditionSet& s, const CaptureTable& table);

// Condition-selection system over one capture table.
class ConditionSystem {
public:
    ConditionSystem(smt::Backend& backend, const CaptureTable& table);

    // Cardinality-minimal separating set with tightened bounds; nullopt
    // when no set separates the examples.
    std::optional<ConditionSet> minimal();

    // Another separating set of the same size, different from `current`,
    // with every bound as loose as the examples allow.
    std::optional<ConditionSet> alternative(const ConditionSet& current);

private:
    smt::Term holds(size_t cond, int64_t value) const;
    ConditionSet read(const smt::Model& m) const;

    smt::Backend& backend_;
    CaptureTable table_;
    std::vector<smt::BoolVar> used_;
    std::vector<smt::IntVar> bound_;
    std::vector<std::vector<int64_t>> domain_;
};

struct ConditionOutcome {
    enum class Status { Ok, Infeasible, NoMatch, NonNumeric };
    Status status = Status::Infeasible;
    ConditionSet conditions;
    std::string offending;
};

ConditionOutcome synthesize_conditions(const Regex& with_groups, const std::vector<std::string>& valid,
                                       const std::vector<std::string>& conditional_invalid, smt::Backend& backend);

using BackendFactory = std::function<std::unique_ptr<smt::Backend>()>;

struct PlacementChoice {
    GroupPlacement placement;
    Regex regex;
    ConditionSet conditions;
};

// Fewest groups first (up to max_groups); among the feasible placements of
// that size, the one needing the fewest conditions, earliest on ties.
std::optional<PlacementChoice> choose_placement(const Regex& regex, const std::vector<std::string>& valid,
                                                const std::vector<std::string>& conditional_invalid,
                                                const BackendFactory& factory, size_t max_groups = 4);

class DistinguishError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Capture values satisfying exactly one of the two sets. Preference goes to
// the captures of `base`, then to the bounds of conditions only in s2.
std::optional<std::vector<int64_t>> distinguishing_values(const ConditionSet& s1, const ConditionSet& s2, size_t groups,
                                                          const std::vector<int64_t>& base, smt::Backend& backend);

// String classified differently by the two condition sets, built by splicing
// distinguishing capture values into a valid example; nullopt when the sets
// agree on every integer. Throws DistinguishError when no valid example can
// carry the values.
std::optional<std::string> distinguish_conditions(const ConditionSet& s1, const ConditionSet& s2,
                                                  const std::vector<std::string>& valid, const Regex& with_groups,
                                                  const BackendFactory& factory);

}  // namespace forest
