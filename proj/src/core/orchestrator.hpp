#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "capture_synth.hpp"
#include "dsl.hpp"
#include "enumerator.hpp"
#include "spec_model.hpp"
#include "splitter.hpp"

namespace forest {

enum class SearchMode { MultiTree, KTree };

struct SynthesisOptions {
    SearchMode mode = SearchMode::MultiTree;
    // Static multi-tree when the valid examples have dividing substrings.
    bool split = true;
    PruningOptions pruning;
    ShapeLimits limits;
    double timeout_seconds = 3600;
    uint64_t max_programs_per_shape = 100000;
    // Per stage.
    int max_questions = 20;
    // Keep the first solution of each stage without asking anything.
    bool accept_first = false;
    std::string solver;
    double solver_timeout = 10;
    size_t max_groups = 4;
    // Set from another thread to end the run as if it had timed out.
    std::shared_ptr<const std::atomic<bool>> stop;
};

enum class Phase { RegexSearch, RegexDisambiguation, CaptureSearch, CaptureDisambiguation, Done, Failed };

std::string_view phase_name(Phase p);

struct SessionStats {
    uint64_t programs_enumerated = 0;
    int questions = 0;
    int regex_questions = 0;
    int capture_questions = 0;
    double seconds = 0;
    // A stage stopped at max_questions with its incumbent.
    bool question_cap_hit = false;
    // Shape of the last enumerated multi-tree, e.g. "(5,2) static".
    std::string shape;
};

struct TranscriptEntry {
    std::string question;
    bool captures = false;  // asked while choosing conditions
    bool valid = false;
};

struct Step {
    enum class Kind { Question, Done, Failed, BestEffort };
    Kind kind = Kind::Failed;
    std::string question;
    std::string reason;
};

class SessionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// One interactive synthesis run. advance() works until it needs an answer
// or the run ends; answer() feeds the user's classification back.
class SynthesisSession {
public:
    SynthesisSession(ExampleSet examples, SynthesisOptions options);
    ~SynthesisSession();
    SynthesisSession(const SynthesisSession&) = delete;
    SynthesisSession& operator=(const SynthesisSession&) = delete;

    Step advance();
    // Throws SessionError when no question is pending.
    void answer(bool valid);
    void abort(std::string reason = "aborted");

    Phase phase() const { return phase_; }
    const std::optional<std::string>& pending_question() const { return pending_; }
    const std::optional<RegexValidation>& result() const { return result_; }
    bool best_effort() const { return best_effort_; }
    const std::string& failure() const { return failure_; }
    const SessionStats& stats() const { return stats_; }
    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
    const ExampleSet& examples() const { return examples_; }

private:
    struct RegexStage;

    Step run_regex_search();
    Step run_capture_search();
    Step settle_regex();
    Step finish(RegexValidation v);
    Step fail(std::string reason);
    Step timeout_step();
    bool timed_out() const;
    double elapsed() const;
    std::unique_ptr<smt::Backend> backend() const;
    BackendFactory factory() const;

    ExampleSet examples_;
    SynthesisOptions options_;
    Phase phase_ = Phase::RegexSearch;
    std::optional<std::string> pending_;
    std::optional<RegexValidation> result_;
    bool best_effort_ = false;
    std::string failure_;
    Step terminal_;
    SessionStats stats_;
    std::vector<TranscriptEntry> transcript_;
    std::chrono::steady_clock::time_point started_;
    double elapsed_before_ = 0;

    std::unique_ptr<RegexStage> regex_;
    std::optional<Regex> regex_result_;

    // capture stage
    std::optional<Regex> grouped_;
    std::optional<ConditionSet> conditions_;
};

class AnswerOracle {
public:
    virtual ~AnswerOracle() = default;
    // nullopt aborts the session.
    virtual std::optional<bool> classify(const std::string& question, bool captures) = 0;
    // False for oracles that never want to be asked.
    virtual bool asks() const { return true; }
};

// Answers from a hidden reference validation. Pattern questions are judged
// by the regex alone, value questions by regex and conditions.
class GroundTruthOracle : public AnswerOracle {
public:
    explicit GroundTruthOracle(RegexValidation truth) : truth_(std::move(truth)) {}
    std::optional<bool> classify(const std::string& question, bool captures) override;

private:
    RegexValidation truth_;
};

class AcceptFirstOracle : public AnswerOracle {
public:
    std::optional<bool> classify(const std::string&, bool) override { return std::nullopt; }
    bool asks() const override { return false; }
};

// Prints the question quoted and reads y/n; end of input aborts.
class InteractiveOracle : public AnswerOracle {
public:
    InteractiveOracle(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
    std::optional<bool> classify(const std::string& question, bool captures) override;

private:
    std::istream& in_;
    std::ostream& out_;
};

struct RunOutcome {
    Step::Kind kind = Step::Kind::Failed;
    std::optional<RegexValidation> result;
    std::string reason;
    SessionStats stats;
    std::vector<TranscriptEntry> transcript;
    ExampleSet final_examples;
};

RunOutcome run(const ExampleSet& examples, SynthesisOptions options, AnswerOracle& oracle);

}  // namespace forest
