#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orchestrator.hpp"
#include "spec_model.hpp"

namespace forest {

struct BenchmarkCase {
    std::string name;
    ExampleSet examples;
    RegexValidation truth;
};

// Reads cases/<name>/examples.txt and cases/<name>/truth.txt. Throws
// FormatError when a file is missing or malformed, or when the truth
// misclassifies one of its own examples.
BenchmarkCase load_case(const std::filesystem::path& dir);
// Every subdirectory holding an examples.txt, sorted by name. Cases that fail
// to load are reported through `errors` (name, message) and skipped.
std::vector<BenchmarkCase> load_corpus(const std::filesystem::path& dir,
                                       std::vector<std::pair<std::string, std::string>>* errors = nullptr);

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExampleCounts {
    size_t valid = 6;
    size_t invalid = 6;
    size_t conditional_invalid = 0;
};

// Seeded sampling: valid strings from the truth's language (conditions
// holding), invalid ones by mutating valid strings until the pattern fails,
// conditional invalid ones among matching strings that break a condition.
// Strings in `exclude` are never returned.
ExampleSet generate_examples(const RegexValidation& truth, ExampleCounts counts, uint64_t seed,
                             const std::vector<std::string>& exclude = {});

// Fraction of a fresh generated sample that `result` accepts or rejects like
// `truth`. Training strings are excluded from the sample.
double held_out_accuracy(const RegexValidation& result, const RegexValidation& truth, const ExampleSet& training,
                         uint64_t seed, size_t per_list = 40);

enum class BenchMode { MultiTree, KTree, NoPruning, DynamicOnly };

std::string_view mode_name(BenchMode m);
std::optional<BenchMode> parse_mode(std::string_view name);
SynthesisOptions mode_options(BenchMode m, SynthesisOptions base);

struct SuiteOptions {
    double timeout_seconds = 60;
    uint64_t seed = 1;
    // At most this many valid / invalid / conditional invalid examples,
    // chosen by seed; 0 keeps every example.
    size_t subsample = 0;
    size_t held_out_per_list = 40;
    unsigned jobs = 1;
    SynthesisOptions synthesis;
};

struct CaseResult {
    std::string name;
    BenchMode mode = BenchMode::MultiTree;
    Step::Kind kind = Step::Kind::Failed;
    double seconds = 0;
    uint64_t programs = 0;
    int questions = 0;
    std::optional<double> accuracy;
    std::string regex;
    std::string conditions;
    std::string reason;
    // Stopped at the question cap; the result is unconfirmed.
    bool capped = false;

    bool solved() const { return kind == Step::Kind::Done && !capped; }
};

struct SuiteReport {
    double timeout_seconds = 0;
    std::vector<BenchMode> modes;
    std::vector<CaseResult> results;

    const CaseResult* find(const std::string& name, BenchMode mode) const;
    // Cases solved within `seconds`.
    size_t solved_within(BenchMode mode, double seconds) const;
    std::string to_csv() const;
    // Per-case rows followed by solved counts under 10 s, 60 s and the
    // timeout for each mode.
    std::string to_table() const;
};

CaseResult run_case(const BenchmarkCase& c, BenchMode mode, const SuiteOptions& options);
SuiteReport run_suite(const std::vector<BenchmarkCase>& cases, const std::vector<BenchMode>& modes,
                      const SuiteOptions& options);

}  // namespace forest
