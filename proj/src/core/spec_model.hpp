#pragma once

#include "regex_ast.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace forest {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The three example lists, UTF-8 encoded.
struct ExampleSet {
    std::vector<std::string> valid;
    std::vector<std::string> invalid;
    std::vector<std::string> conditional_invalid;

    friend bool operator==(const ExampleSet&, const ExampleSet&) = default;
};

// Deduplicates within each list (first occurrence kept) and checks the
// cross-list invariants. Throws FormatError.
ExampleSet make_example_set(std::vector<std::string> valid, std::vector<std::string> invalid,
                            std::vector<std::string> conditional_invalid);

// Sectioned text format: "++" valid, "--" invalid, "+-" conditional invalid.
// One example per line; a leading backslash is dropped and the rest taken
// verbatim, which is how empty or header-like examples are written.
ExampleSet parse_benchmark(std::string_view text);
std::string serialize_benchmark(const ExampleSet& examples);

enum class CompareOp : uint8_t { LE, GE };

struct CaptureCondition {
    size_t group = 0;
    CompareOp op = CompareOp::LE;
    int64_t bound = 0;

    bool holds(int64_t value) const { return op == CompareOp::LE ? value <= bound : value >= bound; }
    friend bool operator==(const CaptureCondition&, const CaptureCondition&) = default;
    friend auto operator<=>(const CaptureCondition&, const CaptureCondition&) = default;
};

std::string to_string(const CaptureCondition& c);
CaptureCondition parse_condition(std::string_view text);
// Joins with " ∧ " (display) or " && " (machine-readable).
std::string format_conditions(const std::vector<CaptureCondition>& conds, bool ascii);

struct RegexValidation {
    Regex regex;
    std::vector<CaptureCondition> conditions;
};

// First non-empty line is the regex; each further line holds one or more
// conditions separated by "&&" or "∧".
RegexValidation parse_validation(std::string_view text);
std::string serialize_validation(const RegexValidation& v);

enum class Verdict { Accept, RejectFormat, RejectConditions };

// How a validation classifies one input string.
Verdict classify(const RegexValidation& v, std::string_view input);

enum class ExampleKind { Valid, Invalid, ConditionalInvalid };

struct ExampleReport {
    std::string text;
    ExampleKind kind;
    bool passed;
    std::string reason;
};

struct ValidationReport {
    std::vector<ExampleReport> entries;
    bool ok() const;
    size_t failures() const;
};

ValidationReport validate(const RegexValidation& v, const ExampleSet& examples);

}  // namespace forest
