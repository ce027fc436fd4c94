#include "orchestrator.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "regex_engine.hpp"
#include "utf8.hpp"

namespace forest {

std::string_view phase_name(Phase p)
{
    switch (p) {
    case Phase::RegexSearch: return "regex_search";
    case Phase::RegexDisambiguation: return "regex_disambiguation";
    case Phase::CaptureSearch: return "capture_search";
    case Phase::CaptureDisambiguation: return "capture_disambiguation";
    case Phase::Done: return "done";
    case Phase::Failed: return "failed";
    }
    return "unknown";
}

namespace {

// Smaller tree first, then shorter concrete syntax.
bool simpler(const Regex& a, const Regex& b)
{
    const size_t na = node_count(a);
    const size_t nb = node_count(b);
    if (na != nb)
        return na < nb;
    const std::string ea = emit(a);
    const std::string eb = emit(b);
    return ea.size() != eb.size() ? ea.size() < eb.size() : ea < eb;
}

}  // namespace

struct SynthesisSession::RegexStage {
    ScheduleMode mode = ScheduleMode::Dynamic;
    std::optional<ShapeSchedule> schedule;
    std::optional<SplitResult> split;
    // static mode: per column, the field strings of every splittable valid example
    std::vector<std::vector<std::u32string>> columns;
    std::vector<TreeSlot> slots;
    std::vector<std::optional<Regex>> column_union;
    std::optional<DslSpec> dsl;

    std::vector<std::u32string> valid;
    std::vector<std::u32string> invalid;
    std::u32string chars;

    std::unique_ptr<smt::Backend> backend;
    std::unique_ptr<Enumerator> enumerator;
    uint64_t counted = 0;

    std::optional<Regex> incumbent;
    std::optional<Regex> challenger;
    std::u32string witness;

    void add_chars(const std::u32string& s)
    {
        for (char32_t c : s)
            if (chars.find(c) == std::u32string::npos)
                chars.push_back(c);
    }

    void add_column_example(const std::u32string& x)
    {
        if (!split)
            return;
        if (auto fields = split->split_one(x))
            for (size_t col = 0; col < columns.size(); ++col)
                columns[col].push_back((*fields)[col]);
    }

    void setup_static()
    {
        columns.assign(split->n, {});
        for (const auto& f : split->fields)
            for (size_t col = 0; col < split->n; ++col)
                columns[col].push_back(f[col]);
        for (size_t col = 0; col < split->n; ++col) {
            const auto& c = columns[col];
            if (split->divider_column[col]) {
                slots.push_back(TreeSlot{std::nullopt, Regex::text(c.front())});
                column_union.emplace_back();
                continue;
            }
            // a column may be empty in some examples; the DSL comes from the rest
            std::vector<std::u32string> filled;
            std::copy_if(c.begin(), c.end(), std::back_inserter(filled), [](const auto& f) { return !f.empty(); });
            slots.push_back(TreeSlot{build_dsl(filled), std::nullopt});
            std::set<std::u32string> distinct(c.begin(), c.end());
            if (distinct.count(U"")) {
                column_union.emplace_back();
                continue;
            }
            std::optional<Regex> u;
            for (const auto& s : distinct)
                u = u ? Regex::alt(*u, Regex::text(s)) : Regex::text(s);
            column_union.push_back(u);
        }
    }

    void switch_to_dynamic(const ShapeLimits& limits)
    {
        mode = ScheduleMode::Dynamic;
        split.reset();
        columns.clear();
        slots.clear();
        column_union.clear();
        dsl = build_dsl(valid);
        schedule.emplace(ScheduleMode::Dynamic, limits);
    }

    void close_shape()
    {
        enumerator.reset();
        backend.reset();
    }

    // Checks p against the examples; with `generalize`, failures get a
    // generalized block.
    bool verify(const MultiTreeProgram& p, bool generalize)
    {
        Enumerator& e = *enumerator;
        const Regex any_star = Regex::star(Regex::char_class(CharClass::Any));
        const Regex none = Regex::char_class(CharClass::None);
        const size_t trees = e.trees().size();

        if (mode == ScheduleMode::Static) {
            for (size_t t = 0; t < trees; ++t) {
                if (!e.trees()[t].dsl)
                    continue;
                Regex tree = e.decode_tree(p, t);
                for (const auto& f : columns[t]) {
                    if (full_match(tree, f))
                        continue;
                    if (!generalize)
                        return false;
                    auto r = e.relax(
                        p, [&](const Relaxation& m) { return !full_match(e.decode_relaxed(p, t, m, any_star), f); },
                        true);
                    for (size_t o = 0; o < trees; ++o)
                        if (o != t)
                            std::fill(r.keep[o].begin(), r.keep[o].end(), 0);
                    e.block_partial(p, r);
                    return false;
                }
            }
        }

        auto relaxed = [&](const Relaxation& m, const Regex& hole, bool use_columns) {
            std::vector<Regex> parts;
            for (size_t t = 0; t < trees; ++t) {
                if (e.trees()[t].fixed)
                    parts.push_back(*e.trees()[t].fixed);
                else if (use_columns && mode == ScheduleMode::Static && !m.keep[t][0] && column_union[t])
                    parts.push_back(*column_union[t]);
                else
                    parts.push_back(e.decode_relaxed(p, t, m, hole));
            }
            return parts.size() == 1 ? parts[0] : Regex::concat(std::move(parts));
        };

        Regex whole = e.decode(p);
        for (const auto& x : valid) {
            if (full_match(whole, x))
                continue;
            if (!generalize)
                return false;
            auto r = e.relax(p, [&](const Relaxation& m) { return !full_match(relaxed(m, any_star, false), x); }, true);
            e.block_partial(p, r);
            return false;
        }
        for (const auto& x : invalid) {
            if (!full_match(whole, x))
                continue;
            if (!generalize)
                return false;
            auto r = e.relax(p, [&](const Relaxation& m) { return full_match(relaxed(m, none, true), x); }, false);
            e.block_partial(p, r);
            return false;
        }
        return true;
    }
};

SynthesisSession::SynthesisSession(ExampleSet examples, SynthesisOptions options)
    : examples_(std::move(examples)), options_(std::move(options)), regex_(std::make_unique<RegexStage>())
{
}

SynthesisSession::~SynthesisSession() = default;

double SynthesisSession::elapsed() const
{
    return elapsed_before_ + std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
}

bool SynthesisSession::timed_out() const
{
    return elapsed() >= options_.timeout_seconds || (options_.stop && options_.stop->load());
}

std::unique_ptr<smt::Backend> SynthesisSession::backend() const
{
    auto b = smt::make_backend(options_.solver);
    b->set_timeout(std::max(0.05, std::min(options_.solver_timeout, options_.timeout_seconds - elapsed())));
    return b;
}

BackendFactory SynthesisSession::factory() const
{
    return [this] { return backend(); };
}

Step SynthesisSession::advance()
{
    if (pending_)
        throw SessionError("a question is pending");
    if (phase_ == Phase::Done || phase_ == Phase::Failed)
        return terminal_;
    started_ = std::chrono::steady_clock::now();
    Step s;
    try {
        s = phase_ == Phase::RegexSearch ? run_regex_search() : run_capture_search();
    } catch (const smt::SolverTimeout&) {
        s = timeout_step();
    } catch (const std::exception& e) {
        s = fail(e.what());
    }
    elapsed_before_ = elapsed();
    stats_.seconds = elapsed_before_;
    return s;
}

void SynthesisSession::answer(bool valid)
{
    if (!pending_)
        throw SessionError("no question is pending");
    const std::string w = *pending_;
    pending_.reset();
    if (phase_ == Phase::RegexDisambiguation) {
        transcript_.push_back({w, false, valid});
        RegexStage& st = *regex_;
        const std::u32string w32 = utf8::decode(w);
        st.add_chars(w32);
        if (valid) {
            examples_.valid.push_back(w);
            st.valid.push_back(w32);
            st.add_column_example(w32);
        } else {
            examples_.invalid.push_back(w);
            st.invalid.push_back(w32);
        }
        if (full_match(*st.incumbent, w32) != valid)
            st.incumbent = st.challenger;
        st.challenger.reset();
        phase_ = Phase::RegexSearch;
    } else if (phase_ == Phase::CaptureDisambiguation) {
        transcript_.push_back({w, true, valid});
        (valid ? examples_.valid : examples_.conditional_invalid).push_back(w);
        phase_ = Phase::CaptureSearch;
    } else {
        throw SessionError("no question is pending");
    }
}

void SynthesisSession::abort(std::string reason)
{
    pending_.reset();
    fail(std::move(reason));
}

Step SynthesisSession::fail(std::string reason)
{
    phase_ = Phase::Failed;
    failure_ = reason;
    regex_.reset();
    terminal_ = Step{Step::Kind::Failed, "", std::move(reason)};
    return terminal_;
}

Step SynthesisSession::finish(RegexValidation v)
{
    phase_ = Phase::Done;
    result_ = std::move(v);
    regex_.reset();
    terminal_ = Step{best_effort_ ? Step::Kind::BestEffort : Step::Kind::Done, "", best_effort_ ? "timeout" : ""};
    return terminal_;
}

Step SynthesisSession::timeout_step()
{
    best_effort_ = true;
    if (grouped_ && conditions_)
        return finish({*grouped_, *conditions_});
    if (regex_result_)
        return finish({*regex_result_, {}});
    if (regex_ && regex_->incumbent)
        return finish({flatten(*regex_->incumbent), {}});
    best_effort_ = false;
    return fail("timeout");
}

Step SynthesisSession::run_regex_search()
{
    RegexStage& st = *regex_;
    if (!st.schedule) {
        for (const auto& x : examples_.valid) {
            st.valid.push_back(utf8::decode(x));
            st.add_chars(st.valid.back());
        }
        for (const auto& x : examples_.invalid) {
            st.invalid.push_back(utf8::decode(x));
            st.add_chars(st.invalid.back());
        }
        if (options_.mode == SearchMode::KTree) {
            st.mode = ScheduleMode::KTree;
            st.dsl = build_dsl(st.valid);
            st.schedule.emplace(ScheduleMode::KTree, options_.limits);
        } else {
            if (options_.split) {
                SplitResult s = split(st.valid, st.invalid);
                if (s.n > 1 && !s.dividers.empty())
                    st.split = std::move(s);
            }
            if (st.split) {
                st.mode = ScheduleMode::Static;
                st.setup_static();
                st.schedule.emplace(ScheduleMode::Static, options_.limits, static_cast<int>(st.split->n));
            } else {
                st.switch_to_dynamic(options_.limits);
            }
        }
    }

    while (true) {
        if (timed_out())
            return timeout_step();
        if (!st.enumerator) {
            if (st.incumbent)
                return settle_regex();
            std::optional<TreeShape> shape = st.schedule->next();
            if (!shape && st.mode == ScheduleMode::Static) {
                st.switch_to_dynamic(options_.limits);
                shape = st.schedule->next();
            }
            if (!shape)
                return fail("search space exhausted without a regex consistent with the examples");
            st.backend = backend();
            try {
                if (st.mode == ScheduleMode::Static)
                    st.enumerator =
                        std::make_unique<Enumerator>(*st.backend, st.slots, shape->d, options_.pruning);
                else
                    st.enumerator = std::make_unique<Enumerator>(*st.backend, *st.dsl, *shape, options_.pruning);
            } catch (const EncodingError&) {
                st.close_shape();
                continue;
            }
            st.counted = 0;
            stats_.shape = "(" + std::to_string(shape->n) + "," + std::to_string(shape->d) + ") " +
                           (st.mode == ScheduleMode::Static    ? "static"
                            : st.mode == ScheduleMode::Dynamic ? "dynamic"
                                                               : "ktree");
        }

        std::optional<MultiTreeProgram> p;
        try {
            p = st.enumerator->next();
        } catch (const smt::SolverTimeout&) {
            if (timed_out())
                return timeout_step();
        }
        stats_.programs_enumerated += st.enumerator->programs() - st.counted;
        st.counted = st.enumerator->programs();
        if (!p || st.counted > options_.max_programs_per_shape) {
            st.close_shape();
            continue;
        }
        const bool ok = st.verify(*p, options_.pruning.generalized_blocking);
        st.enumerator->block_equivalent(*p);
        if (!ok)
            continue;
        Regex candidate = flatten(st.enumerator->decode(*p));
        if (!st.incumbent) {
            st.incumbent = candidate;
            if (options_.accept_first)
                return settle_regex();
            continue;
        }
        std::vector<std::u32string> anchors;
        for (const auto& v : examples_.valid)
            anchors.push_back(utf8::decode(v));
        auto w = nearest_distinguishing_input(*st.incumbent, candidate,
                                              SessionAlphabet::for_pair(*st.incumbent, candidate, st.chars), anchors);
        if (!w) {
            if (simpler(candidate, *st.incumbent))
                st.incumbent = candidate;
            continue;
        }
        if (stats_.regex_questions >= options_.max_questions) {
            stats_.question_cap_hit = true;
            return settle_regex();
        }
        st.challenger = candidate;
        pending_ = utf8::encode(*w);
        phase_ = Phase::RegexDisambiguation;
        ++stats_.questions;
        ++stats_.regex_questions;
        return Step{Step::Kind::Question, *pending_, ""};
    }
}

Step SynthesisSession::settle_regex()
{
    regex_result_ = flatten(*regex_->incumbent);
    regex_.reset();
    if (examples_.conditional_invalid.empty())
        return finish({*regex_result_, {}});
    for (const auto& x : examples_.conditional_invalid)
        if (!full_match(*regex_result_, std::string_view(x)))
            return fail("conditional invalid example \"" + x + "\" does not match " + emit(*regex_result_));
    phase_ = Phase::CaptureSearch;
    return run_capture_search();
}

Step SynthesisSession::run_capture_search()
{
    const BackendFactory make = factory();
    if (!grouped_) {
        auto choice = choose_placement(*regex_result_, examples_.valid, examples_.conditional_invalid, make,
                                       options_.max_groups);
        if (!choice)
            return fail("no capture conditions separate the valid and conditional invalid examples");
        grouped_ = choice->regex;
        conditions_ = choice->conditions;
    }
    if (timed_out())
        return timeout_step();

    auto collected = collect_captures(*grouped_, examples_.valid, examples_.conditional_invalid);
    if (collected.status != CaptureCollection::Status::Ok)
        return fail("example \"" + collected.offending + "\" has no integer captures");
    auto system_backend = make();
    ConditionSystem system(*system_backend, collected.table);
    if (separates(*conditions_, collected.table)) {
        conditions_ = tighten(*conditions_, collected.table);
    } else {
        auto fresh = system.minimal();
        if (!fresh)
            return fail("no capture conditions separate the valid and conditional invalid examples");
        conditions_ = *fresh;
    }
    auto alt = options_.accept_first ? std::nullopt : system.alternative(*conditions_);
    if (!alt)
        return finish({*grouped_, *conditions_});
    if (stats_.capture_questions >= options_.max_questions) {
        stats_.question_cap_hit = true;
        return finish({*grouped_, *conditions_});
    }
    std::optional<std::string> w;
    try {
        w = distinguish_conditions(*conditions_, *alt, examples_.valid, *grouped_, make);
    } catch (const DistinguishError&) {
        return finish({*grouped_, *conditions_});
    }
    if (!w)
        return finish({*grouped_, *conditions_});
    pending_ = *w;
    phase_ = Phase::CaptureDisambiguation;
    ++stats_.questions;
    ++stats_.capture_questions;
    return Step{Step::Kind::Question, *pending_, ""};
}

std::optional<bool> GroundTruthOracle::classify(const std::string& question, bool captures)
{
    Verdict v = forest::classify(truth_, question);
    return captures ? v == Verdict::Accept : v != Verdict::RejectFormat;
}

std::optional<bool> InteractiveOracle::classify(const std::string& question, bool captures)
{
    std::string line;
    while (true) {
        out_ << (captures ? "Value question" : "Pattern question") << ": is \"" << question << "\" valid? [y/n] "
             << std::flush;
        if (!std::getline(in_, line))
            return std::nullopt;
        if (line == "y" || line == "Y" || line == "yes")
            return true;
        if (line == "n" || line == "N" || line == "no")
            return false;
    }
}

RunOutcome run(const ExampleSet& examples, SynthesisOptions options, AnswerOracle& oracle)
{
    if (!oracle.asks())
        options.accept_first = true;
    SynthesisSession session(examples, options);
    RunOutcome out;
    while (true) {
        Step step = session.advance();
        if (step.kind == Step::Kind::Question) {
            auto a = oracle.classify(step.question, session.phase() == Phase::CaptureDisambiguation);
            if (!a) {
                session.abort();
                out.kind = Step::Kind::Failed;
                out.reason = "aborted";
                break;
            }
            session.answer(*a);
            continue;
        }
        out.kind = step.kind;
        out.reason = step.reason;
        break;
    }
    out.result = session.result();
    out.stats = session.stats();
    out.transcript = session.transcript();
    out.final_examples = session.examples();
    return out;
}

}  // namespace forest
