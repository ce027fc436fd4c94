#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "term.hpp"

namespace forest::smt {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverTimeout : public SolverError {
public:
    using SolverError::SolverError;
};

enum class CheckResult { Sat, Unsat };

// Incremental constraint solver over booleans and bounded integers.
class Backend {
public:
    virtual ~Backend() = default;

    virtual BoolVar new_bool() = 0;
    // The builtin backend needs a finite domain; SMT-LIB backends accept an
    // empty domain as an unbounded integer.
    virtual IntVar new_int(std::vector<int64_t> domain) = 0;
    virtual void add(const Term& t) = 0;
    virtual void push() = 0;
    virtual void pop() = 0;
    // Throws SolverTimeout when the per-check time limit elapses.
    virtual CheckResult check() = 0;
    virtual const Model& model() const = 0;
    virtual std::string name() const = 0;

    void set_timeout(double seconds) { timeout_ = seconds; }
    double timeout() const { return timeout_; }

protected:
    double timeout_ = 10.0;
};

std::unique_ptr<Backend> make_builtin_backend();
// `command` is run through /bin/sh and must speak SMT-LIB v2 on stdin/stdout.
std::unique_ptr<Backend> make_smtlib_backend(const std::string& command);

// "" or "builtin" selects the in-process solver. Anything else names an
// SMT-LIB solver binary or full command line; z3 and cvc5 get their
// interactive flags appended when given as bare paths.
std::unique_ptr<Backend> make_backend(const std::string& solver);

// First z3 or cvc5 found on PATH, as a ready-to-run command, or "".
std::string find_smtlib_solver();

std::string to_smtlib(const Term& t);

struct MaxResult {
    CheckResult status = CheckResult::Unsat;
    Model model;
    size_t satisfied = 0;
};

// Satisfies every hard constraint already asserted on `backend` and as many
// `soft` terms as possible (unit weights). Linear search on a cardinality
// bound over fresh relaxation booleans; the backend is left as it was except
// for the relaxation clauses, which are inert once their indicators are free.
MaxResult maximize(Backend& backend, const std::vector<Term>& soft);

}  // namespace forest::smt
