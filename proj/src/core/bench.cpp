#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "regex_engine.hpp"
#include "utf8.hpp"

namespace forest {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw FormatError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Portable bounded draw; std distributions differ between libraries.
size_t pick(std::mt19937_64& rng, size_t n) { return n == 0 ? 0 : static_cast<size_t>(rng() % n); }

const std::u32string& class_pool(CharClass cls)
{
    static const auto pools = [] {
        std::vector<std::u32string> out;
        for (int c = 0; c <= static_cast<int>(CharClass::None); ++c) {
            std::u32string s;
            for (char32_t ch = 0x20; ch < 0x7f; ++ch)
                if (class_contains(static_cast<CharClass>(c), ch))
                    s.push_back(ch);
            out.push_back(s);
        }
        return out;
    }();
    return pools[static_cast<size_t>(cls)];
}

void sample(const Regex& r, std::mt19937_64& rng, std::u32string& out)
{
    auto repeat = [&](size_t lo, size_t hi) {
        size_t k = lo + pick(rng, hi - lo + 1);
        for (size_t i = 0; i < k; ++i)
            sample(r.child(), rng, out);
    };
    switch (r.kind) {
    case NodeKind::Literal:
        out.push_back(r.ch);
        break;
    case NodeKind::Class: {
        const auto& pool = class_pool(r.cls);
        if (!pool.empty())
            out.push_back(pool[pick(rng, pool.size())]);
        break;
    }
    case NodeKind::Concat:
        for (const auto& c : r.children)
            sample(c, rng, out);
        break;
    case NodeKind::Union:
        sample(r.children[pick(rng, r.children.size())], rng, out);
        break;
    case NodeKind::Kleene:
        repeat(0, 3);
        break;
    case NodeKind::Plus:
        repeat(1, 3);
        break;
    case NodeKind::Option:
        repeat(0, 1);
        break;
    case NodeKind::Range:
        repeat(static_cast<size_t>(r.range.min), static_cast<size_t>(r.range.max));
        break;
    case NodeKind::Group:
        sample(r.child(), rng, out);
        break;
    }
}

std::u32string mutate(std::u32string s, std::mt19937_64& rng, const std::u32string& alphabet)
{
    char32_t c = alphabet[pick(rng, alphabet.size())];
    size_t at = pick(rng, s.size() + 1);
    switch (s.empty() ? 1 : pick(rng, 6)) {
    case 0:
        s.erase(std::min(at, s.size() - 1), 1);
        break;
    case 1:
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(at), c);
        break;
    case 2:
        s[std::min(at, s.size() - 1)] = c;
        break;
    case 3: {
        size_t i = std::min(at, s.size() - 1);
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(i), s[i]);
        break;
    }
    case 4:
        s.resize(pick(rng, s.size()));
        break;
    default:
        s.push_back(c);
        break;
    }
    return s;
}

std::string status_name(const CaseResult& r)
{
    switch (r.kind) {
    case Step::Kind::Done:
        return r.capped ? "capped" : "solved";
    case Step::Kind::BestEffort:
        return "best-effort";
    default:
        return r.reason == "timeout" ? "timeout" : "failed";
    }
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> subsample(std::vector<std::string> list, size_t n, std::mt19937_64& rng)
{
    if (n == 0 || list.size() <= n)
        return list;
    for (size_t i = list.size() - 1; i > 0; --i)
        std::swap(list[i], list[pick(rng, i + 1)]);
    list.resize(n);
    return list;
}

}  // namespace

BenchmarkCase load_case(const fs::path& dir)
{
    BenchmarkCase c;
    c.name = dir.filename().string();
    c.examples = parse_benchmark(read_file(dir / "examples.txt"));
    c.truth = parse_validation(read_file(dir / "truth.txt"));
    auto report = validate(c.truth, c.examples);
    if (!report.ok()) {
        for (const auto& e : report.entries)
            if (!e.passed)
                throw FormatError(c.name + ": truth misclassifies \"" + e.text + "\"");
    }
    return c;
}

std::vector<BenchmarkCase> load_corpus(const fs::path& dir, std::vector<std::pair<std::string, std::string>>* errors)
{
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory() && fs::exists(e.path() / "examples.txt"))
            dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    std::vector<BenchmarkCase> out;
    for (const auto& d : dirs) {
        try {
            out.push_back(load_case(d));
        } catch (const std::exception& ex) {
            if (errors)
                errors->emplace_back(d.filename().string(), ex.what());
        }
    }
    return out;
}

ExampleSet generate_examples(const RegexValidation& truth, ExampleCounts counts, uint64_t seed,
                             const std::vector<std::string>& exclude)
{
    if (counts.valid == 0)
        throw GenerationError("at least one valid example is required");
    if (counts.conditional_invalid > 0 && truth.conditions.empty())
        throw GenerationError("conditional invalid examples need a truth with conditions");

    std::mt19937_64 rng(seed);
    std::set<std::string> seen(exclude.begin(), exclude.end());
    const size_t budget = 2000 + 400 * (counts.valid + counts.invalid + counts.conditional_invalid);

    std::vector<std::string> valid;
    std::vector<std::string> cond;
    std::vector<std::u32string> valid_u32;
    for (size_t tries = 0; tries < budget && (valid.size() < counts.valid || cond.size() < counts.conditional_invalid);
         ++tries) {
        std::u32string s;
        sample(truth.regex, rng, s);
        std::string text = utf8::encode(s);
        if (seen.count(text))
            continue;
        Verdict v = classify(truth, text);
        if (v == Verdict::Accept && valid.size() < counts.valid) {
            valid.push_back(text);
            valid_u32.push_back(s);
            seen.insert(text);
        } else if (v == Verdict::RejectConditions && cond.size() < counts.conditional_invalid) {
            cond.push_back(text);
            seen.insert(text);
        }
    }
    if (valid.size() < counts.valid)
        throw GenerationError("language too small for " + std::to_string(counts.valid) + " valid examples");
    if (cond.size() < counts.conditional_invalid)
        throw GenerationError("could not sample " + std::to_string(counts.conditional_invalid) +
                              " conditional invalid examples");

    std::u32string alphabet = U"0123456789aZ-/.: ";
    for (char32_t c : literal_chars(truth.regex))
        if (alphabet.find(c) == std::u32string::npos)
            alphabet.push_back(c);
    std::vector<std::string> invalid;
    for (size_t tries = 0; tries < budget && invalid.size() < counts.invalid; ++tries) {
        std::u32string s = mutate(valid_u32[pick(rng, valid_u32.size())], rng, alphabet);
        if (pick(rng, 3) == 0)
            s = mutate(s, rng, alphabet);
        std::string text = utf8::encode(s);
        if (seen.count(text) || classify(truth, text) != Verdict::RejectFormat)
            continue;
        invalid.push_back(text);
        seen.insert(text);
    }
    if (invalid.size() < counts.invalid)
        throw GenerationError("could not sample " + std::to_string(counts.invalid) + " invalid examples");
    return make_example_set(valid, invalid, cond);
}

double held_out_accuracy(const RegexValidation& result, const RegexValidation& truth, const ExampleSet& training,
                         uint64_t seed, size_t per_list)
{
    std::vector<std::string> exclude = training.valid;
    exclude.insert(exclude.end(), training.invalid.begin(), training.invalid.end());
    exclude.insert(exclude.end(), training.conditional_invalid.begin(), training.conditional_invalid.end());
    ExampleCounts counts{per_list, per_list, truth.conditions.empty() ? 0 : per_list};
    ExampleSet held;
    // Small languages may not offer per_list fresh strings; shrink until they do.
    while (true) {
        try {
            held = generate_examples(truth, counts, seed ^ 0x9e3779b97f4a7c15ULL, exclude);
            break;
        } catch (const GenerationError&) {
            if (counts.valid <= 1)
                return 1.0;
            counts.valid /= 2;
            counts.invalid = std::max<size_t>(counts.invalid / 2, 1);
            counts.conditional_invalid /= 2;
        }
    }
    size_t agree = 0;
    size_t total = 0;
    for (const auto* list : {&held.valid, &held.invalid, &held.conditional_invalid})
        for (const auto& s : *list) {
            ++total;
            agree += (classify(result, s) == Verdict::Accept) == (classify(truth, s) == Verdict::Accept);
        }
    return total == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(total);
}

std::string_view mode_name(BenchMode m)
{
    switch (m) {
    case BenchMode::MultiTree:
        return "multitree";
    case BenchMode::KTree:
        return "ktree";
    case BenchMode::NoPruning:
        return "no-pruning";
    case BenchMode::DynamicOnly:
        return "dynamic-only";
    }
    return "?";
}

std::optional<BenchMode> parse_mode(std::string_view name)
{
    for (auto m : {BenchMode::MultiTree, BenchMode::KTree, BenchMode::NoPruning, BenchMode::DynamicOnly})
        if (mode_name(m) == name)
            return m;
    return std::nullopt;
}

SynthesisOptions mode_options(BenchMode m, SynthesisOptions base)
{
    switch (m) {
    case BenchMode::MultiTree:
        break;
    case BenchMode::KTree:
        base.mode = SearchMode::KTree;
        break;
    case BenchMode::NoPruning:
        base.pruning = PruningOptions::none();
        break;
    case BenchMode::DynamicOnly:
        base.split = false;
        break;
    }
    return base;
}

CaseResult run_case(const BenchmarkCase& c, BenchMode mode, const SuiteOptions& options)
{
    CaseResult r;
    r.name = c.name;
    r.mode = mode;
    ExampleSet examples = c.examples;
    if (options.subsample > 0) {
        std::mt19937_64 rng(options.seed);
        examples.valid = subsample(examples.valid, options.subsample, rng);
        examples.invalid = subsample(examples.invalid, options.subsample, rng);
        examples.conditional_invalid = subsample(examples.conditional_invalid, options.subsample, rng);
    }
    SynthesisOptions so = mode_options(mode, options.synthesis);
    so.timeout_seconds = options.timeout_seconds;
    GroundTruthOracle oracle(c.truth);
    try {
        RunOutcome out = run(examples, so, oracle);
        r.kind = out.kind;
        r.reason = out.reason;
        r.seconds = out.stats.seconds;
        r.programs = out.stats.programs_enumerated;
        r.questions = out.stats.questions;
        r.capped = out.stats.question_cap_hit;
        if (out.result) {
            r.regex = emit(out.result->regex);
            r.conditions = format_conditions(out.result->conditions, true);
            r.accuracy = held_out_accuracy(*out.result, c.truth, out.final_examples, options.seed,
                                           options.held_out_per_list);
        }
    } catch (const std::exception& ex) {
        r.kind = Step::Kind::Failed;
        r.reason = ex.what();
    }
    return r;
}

SuiteReport run_suite(const std::vector<BenchmarkCase>& cases, const std::vector<BenchMode>& modes,
                      const SuiteOptions& options)
{
    SuiteReport report;
    report.timeout_seconds = options.timeout_seconds;
    report.modes = modes;
    report.results.resize(cases.size() * modes.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < report.results.size(); i = next++)
            report.results[i] = run_case(cases[i / modes.size()], modes[i % modes.size()], options);
    };
    unsigned jobs = std::max(1u, options.jobs);
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    return report;
}

const CaseResult* SuiteReport::find(const std::string& name, BenchMode mode) const
{
    for (const auto& r : results)
        if (r.name == name && r.mode == mode)
            return &r;
    return nullptr;
}

size_t SuiteReport::solved_within(BenchMode mode, double seconds) const
{
    return static_cast<size_t>(std::count_if(results.begin(), results.end(), [&](const CaseResult& r) {
        return r.mode == mode && r.solved() && r.seconds <= seconds;
    }));
}

std::string SuiteReport::to_csv() const
{
    std::ostringstream out;
    out << "case,mode,status,seconds,programs,questions,accuracy,regex,conditions,reason\n";
    for (const auto& r : results) {
        out << csv_field(r.name) << ',' << mode_name(r.mode) << ',' << status_name(r) << ',' << std::fixed
            << std::setprecision(3) << r.seconds << ',' << r.programs << ',' << r.questions << ',';
        if (r.accuracy)
            out << std::setprecision(4) << *r.accuracy;
        out << ',' << csv_field(r.regex) << ',' << csv_field(r.conditions) << ',' << csv_field(r.reason) << '\n';
    }
    return out.str();
}

std::string SuiteReport::to_table() const
{
    std::ostringstream out;
    size_t name_w = 4;
    for (const auto& r : results)
        name_w = std::max(name_w, r.name.size());
    out << std::left << std::setw(static_cast<int>(name_w)) << "case" << "  " << std::setw(12) << "mode"
        << std::setw(12) << "status" << std::right << std::setw(9) << "seconds" << std::setw(10) << "programs"
        << std::setw(6) << "q" << std::setw(9) << "acc" << "  regex\n";
    for (const auto& r : results) {
        out << std::left << std::setw(static_cast<int>(name_w)) << r.name << "  " << std::setw(12) << mode_name(r.mode)
            << std::setw(12) << status_name(r) << std::right << std::fixed << std::setprecision(2) << std::setw(9)
            << r.seconds << std::setw(10) << r.programs << std::setw(6) << r.questions << std::setw(9);
        if (r.accuracy)
            out << std::setprecision(3) << *r.accuracy;
        else
            out << "-";
        out << "  " << r.regex;
        if (!r.conditions.empty())
            out << "  [" << r.conditions << "]";
        out << '\n';
    }
    out << "\nsolved (held-out accuracy is agreement with the reference on fresh generated strings)\n";
    out << std::left << std::setw(14) << "mode" << std::right << std::setw(8) << "<=10s" << std::setw(8) << "<=60s"
        << std::setw(12) << "<=timeout" << std::setw(8) << "cases\n";
    for (auto m : modes) {
        size_t total = static_cast<size_t>(
            std::count_if(results.begin(), results.end(), [&](const CaseResult& r) { return r.mode == m; }));
        out << std::left << std::setw(14) << mode_name(m) << std::right << std::setw(8) << solved_within(m, 10)
            << std::setw(8) << solved_within(m, 60) << std::setw(12) << solved_within(m, timeout_seconds)
            << std::setw(7) << total << '\n';
    }
    return out.str();
}

}  // namespace forest
