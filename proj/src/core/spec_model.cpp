#include "spec_model.hpp"

#include "regex_engine.hpp"
#include "utf8.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace forest {

namespace {

std::vector<std::string> dedup(std::vector<std::string> xs)
{
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (auto& x : xs)
        if (seen.insert(x).second)
            out.push_back(std::move(x));
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

ExampleSet make_example_set(std::vector<std::string> valid, std::vector<std::string> invalid,
                            std::vector<std::string> conditional_invalid)
{
    ExampleSet ex{dedup(std::move(valid)), dedup(std::move(invalid)), dedup(std::move(conditional_invalid))};
    if (ex.valid.empty())
        throw FormatError("at least one valid example is required");
    for (const auto* list : {&ex.valid, &ex.invalid, &ex.conditional_invalid})
        for (const auto& s : *list)
            if (!utf8::is_valid(s))
                throw FormatError("example is not valid UTF-8");
    for (const auto& s : ex.valid)
        if (s.empty())
            throw FormatError("empty string is not allowed as a valid example");
    for (const auto& s : ex.conditional_invalid)
        if (s.empty())
            throw FormatError("empty string is not allowed as a conditional invalid example");
    std::set<std::string> v(ex.valid.begin(), ex.valid.end());
    std::set<std::string> i(ex.invalid.begin(), ex.invalid.end());
    for (const auto& s : ex.invalid)
        if (v.count(s))
            throw FormatError("example '" + s + "' is both valid and invalid");
    for (const auto& s : ex.conditional_invalid)
        if (v.count(s) || i.count(s))
            throw FormatError("example '" + s + "' appears in more than one section");
    return ex;
}

ExampleSet parse_benchmark(std::string_view text)
{
    std::vector<std::string> valid, invalid, cond;
    std::vector<std::string>* current = nullptr;
    bool saw_valid = false;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        if (line.front() == '\\') {
            // escaped example: taken verbatim after the backslash
            if (current == nullptr)
                throw FormatError("line " + std::to_string(line_no) + ": example before any section header");
            current->emplace_back(line.substr(1));
        } else if (line == "++") {
            current = &valid;
            saw_valid = true;
        } else if (line == "--") {
            current = &invalid;
        } else if (line == "+-") {
            current = &cond;
        } else if (line.size() <= 3 && line.find_first_not_of("+-") == std::string_view::npos) {
            throw FormatError("line " + std::to_string(line_no) + ": malformed section header '" +
                              std::string(line) + "'");
        } else if (current == nullptr) {
            throw FormatError("line " + std::to_string(line_no) + ": example before any section header");
        } else {
            current->emplace_back(line);
        }
    }
    if (!saw_valid)
        throw FormatError("missing '++' section");
    return make_example_set(std::move(valid), std::move(invalid), std::move(cond));
}

namespace {

std::string serialize_line(const std::string& s)
{
    if (s.find('\n') != std::string::npos)
        throw FormatError("example '" + s + "' spans several lines");
    bool header_like = s.size() <= 3 && s.find_first_not_of("+-") == std::string::npos;
    if (header_like || s.front() == '\\' || s.back() == '\r')
        return "\\" + s + "\n";
    return s + "\n";
}

}  // namespace

std::string serialize_benchmark(const ExampleSet& examples)
{
    std::string out = "++\n";
    for (const auto& s : examples.valid)
        out += serialize_line(s);
    if (!examples.invalid.empty()) {
        out += "--\n";
        for (const auto& s : examples.invalid)
            out += serialize_line(s);
    }
    if (!examples.conditional_invalid.empty()) {
        out += "+-\n";
        for (const auto& s : examples.conditional_invalid)
            out += serialize_line(s);
    }
    return out;
}

std::string to_string(const CaptureCondition& c)
{
    return "$" + std::to_string(c.group) + (c.op == CompareOp::LE ? " <= " : " >= ") + std::to_string(c.bound);
}

CaptureCondition parse_condition(std::string_view text)
{
    std::string_view s = trim(text);
    auto bad = [&] { return FormatError("malformed capture condition '" + std::string(text) + "'"); };
    if (s.empty() || s.front() != '$')
        throw bad();
    s.remove_prefix(1);
    CaptureCondition c;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), c.group);
    if (ec != std::errc{})
        throw bad();
    s = trim(s.substr(static_cast<size_t>(p - s.data())));
    if (s.rfind("<=", 0) == 0) {
        c.op = CompareOp::LE;
        s.remove_prefix(2);
    } else if (s.rfind(">=", 0) == 0) {
        c.op = CompareOp::GE;
        s.remove_prefix(2);
    } else if (s.rfind("≤", 0) == 0) {
        c.op = CompareOp::LE;
        s.remove_prefix(std::string_view("≤").size());
    } else if (s.rfind("≥", 0) == 0) {
        c.op = CompareOp::GE;
        s.remove_prefix(std::string_view("≥").size());
    } else {
        throw bad();
    }
    s = trim(s);
    auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), c.bound);
    if (ec2 != std::errc{} || q != s.data() + s.size())
        throw bad();
    return c;
}

std::string format_conditions(const std::vector<CaptureCondition>& conds, bool ascii)
{
    std::string out;
    for (size_t i = 0; i < conds.size(); ++i) {
        if (i)
            out += ascii ? " && " : " ∧ ";
        out += to_string(conds[i]);
    }
    return out;
}

RegexValidation parse_validation(std::string_view text)
{
    RegexValidation v;
    bool have_regex = false;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::string_view l = trim(line);
        if (l.empty())
            continue;
        if (!have_regex) {
            v.regex = parse_regex(l);
            have_regex = true;
            continue;
        }
        std::string rest(l);
        for (std::string sep : {"&&", "∧"}) {
            size_t at;
            while ((at = rest.find(sep)) != std::string::npos)
                rest.replace(at, sep.size(), "\n");
        }
        std::istringstream parts(rest);
        std::string part;
        while (std::getline(parts, part))
            if (!trim(part).empty())
                v.conditions.push_back(parse_condition(part));
    }
    if (!have_regex)
        throw FormatError("validation file has no regex line");
    size_t groups = count_groups(v.regex);
    for (const auto& c : v.conditions)
        if (c.group >= groups)
            throw FormatError("condition " + to_string(c) + " refers to a missing group");
    return v;
}

std::string serialize_validation(const RegexValidation& v)
{
    std::string out = emit(v.regex) + "\n";
    for (const auto& c : v.conditions)
        out += to_string(c) + "\n";
    return out;
}

Verdict classify(const RegexValidation& v, std::string_view input)
{
    if (!full_match(v.regex, input))
        return Verdict::RejectFormat;
    if (v.conditions.empty())
        return Verdict::Accept;
    Captures caps = extract_captures(v.regex, input);
    if (caps.status != Captures::Status::Ok)
        return Verdict::RejectConditions;
    for (const auto& c : v.conditions)
        if (!c.holds(caps.values.at(c.group)))
            return Verdict::RejectConditions;
    return Verdict::Accept;
}

bool ValidationReport::ok() const { return failures() == 0; }

size_t ValidationReport::failures() const
{
    return static_cast<size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return !e.passed; }));
}

ValidationReport validate(const RegexValidation& v, const ExampleSet& examples)
{
    ValidationReport report;
    for (const auto& s : examples.valid) {
        Verdict verdict = classify(v, s);
        report.entries.push_back({s, ExampleKind::Valid, verdict == Verdict::Accept,
                                  verdict == Verdict::RejectFormat ? "valid example does not match the regex"
                                  : verdict == Verdict::RejectConditions ? "valid example violates a capture condition"
                                                                         : ""});
    }
    for (const auto& s : examples.invalid) {
        bool matched = full_match(v.regex, s);
        report.entries.push_back({s, ExampleKind::Invalid, !matched,
                                  matched ? "invalid example matches the regex" : ""});
    }
    for (const auto& s : examples.conditional_invalid) {
        Verdict verdict = classify(v, s);
        std::string reason;
        if (verdict == Verdict::RejectFormat)
            reason = "conditional invalid example does not match the regex";
        else if (verdict == Verdict::Accept)
            reason = "conditional invalid example satisfies every capture condition";
        report.entries.push_back({s, ExampleKind::ConditionalInvalid, verdict == Verdict::RejectConditions, reason});
    }
    return report;
}

}  // namespace forest
