#include "backend.hpp"

namespace forest::smt {

MaxResult maximize(Backend& backend, const std::vector<Term>& soft)
{
    MaxResult out;
    std::vector<Term> relax;
    for (const auto& s : soft) {
        BoolVar r = backend.new_bool();
        backend.add(any({s, lit(r)}));
        relax.push_back(lit(r));
    }
    auto violated = [&](const Model& m) {
        size_t n = 0;
        for (const auto& s : soft)
            if (!evaluate(s, m))
                ++n;
        return n;
    };
    if (backend.check() == CheckResult::Unsat)
        return out;
    out.status = CheckResult::Sat;
    out.model = backend.model();
    size_t cost = violated(out.model);
    while (cost > 0) {
        backend.push();
        backend.add(at_most(static_cast<int64_t>(cost) - 1, relax));
        CheckResult r;
        try {
            r = backend.check();
        } catch (...) {
            try {
                backend.pop();
            } catch (const SolverError&) {
            }
            throw;
        }
        if (r == CheckResult::Unsat) {
            backend.pop();
            break;
        }
        out.model = backend.model();
        cost = violated(out.model);
        backend.pop();
    }
    out.satisfied = soft.size() - cost;
    return out;
}

}  // namespace forest::smt
