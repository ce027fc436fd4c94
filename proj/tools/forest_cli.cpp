#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "forest/forest.h"

namespace {

// sysexits
constexpr int kExitDone = 0;
constexpr int kExitFailed = 2;
constexpr int kExitBestEffort = 3;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitIo = 66;

struct Exit {
    int code;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "forest: cannot read " << path << "\n";
        throw Exit{kExitIo};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Exits with `code` after printing the library's message.
void check(forest_status s, int code)
{
    if (s == FOREST_OK)
        return;
    std::cerr << "forest: " << forest_last_error() << "\n";
    throw Exit{code};
}

int status_exit(forest_status s) { return s == FOREST_E_IO ? kExitIo : s == FOREST_E_FORMAT ? kExitData : kExitUsage; }

struct OptionsDeleter {
    void operator()(forest_options* o) const { forest_options_free(o); }
};
struct SessionDeleter {
    void operator()(forest_session* s) const { forest_session_free(s); }
};
struct ValidationDeleter {
    void operator()(forest_validation* v) const { forest_validation_free(v); }
};
using Options = std::unique_ptr<forest_options, OptionsDeleter>;
using Session = std::unique_ptr<forest_session, SessionDeleter>;
using Validation = std::unique_ptr<forest_validation, ValidationDeleter>;

struct Common {
    std::string mode = "multitree";
    bool no_pruning = false;
    bool no_split = false;
    std::optional<double> timeout;
    std::string solver;
    std::optional<int> max_questions;
};

Options make_options(const Common& c, double default_timeout)
{
    forest_options* raw = nullptr;
    check(forest_options_new(&raw), kExitUsage);
    Options o(raw);
    auto set = [&](const char* k, const std::string& v) {
        forest_status s = forest_options_set(o.get(), k, v.c_str());
        if (s != FOREST_OK) {
            std::cerr << "forest: " << forest_last_error() << "\n";
            throw Exit{kExitUsage};
        }
    };
    set("mode", c.mode);
    set("pruning", c.no_pruning ? "off" : "on");
    set("split", c.no_split ? "off" : "on");
    set("timeout", std::to_string(c.timeout.value_or(default_timeout)));
    std::string solver = c.solver;
    if (solver.empty())
        if (const char* env = std::getenv("FOREST_SOLVER"))
            solver = env;
    if (!solver.empty())
        set("solver", solver);
    if (c.max_questions)
        set("max_questions", std::to_string(*c.max_questions));
    return o;
}

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--mode", c.mode, "Search mode")->check(CLI::IsMember({"multitree", "ktree"}));
    app->add_flag("--no-pruning", c.no_pruning, "Disable pruning constraints and generalized blocking");
    app->add_flag("--no-split", c.no_split, "Force the dynamic multi-tree schedule");
    app->add_option("--timeout", c.timeout, "Time budget in seconds")->check(CLI::PositiveNumber);
    app->add_option("--solver", c.solver, "SMT-LIB solver binary, or 'builtin' (env FOREST_SOLVER)");
    app->add_option("--max-questions", c.max_questions, "Question cap per stage")->check(CLI::NonNegativeNumber);
}

int synth(const std::string& input, const std::string& interaction, const std::string& format, const Common& common)
{
    std::string examples = read_file(input);
    Validation oracle;
    bool accept_first = interaction == "accept-first";
    if (interaction.rfind("oracle:", 0) == 0) {
        std::string text = read_file(interaction.substr(7));
        forest_validation* v = nullptr;
        forest_status s = forest_validation_parse(text.c_str(), &v);
        if (s != FOREST_OK) {
            std::cerr << "forest: oracle file: " << forest_last_error() << "\n";
            throw Exit{kExitUsage};
        }
        oracle.reset(v);
    } else if (interaction != "tty" && !accept_first) {
        std::cerr << "forest: --interaction must be tty, oracle:<file> or accept-first\n";
        throw Exit{kExitUsage};
    }

    Options options = make_options(common, 3600);
    if (accept_first)
        check(forest_options_set(options.get(), "accept_first", "on"), kExitUsage);
    forest_session* raw = nullptr;
    check(forest_session_from_text(examples.c_str(), options.get(), &raw), kExitData);
    Session session(raw);

    forest_step step = FOREST_STEP_FAILED;
    while (true) {
        check(forest_session_advance(session.get(), &step), kExitFailed);
        if (step != FOREST_STEP_QUESTION)
            break;
        const std::string q = forest_session_question(session.get());
        const bool captures = forest_session_phase(session.get()) == FOREST_PHASE_CAPTURE_QUESTION;
        std::optional<bool> answer;
        if (oracle) {
            forest_verdict v;
            check(forest_validation_classify(oracle.get(), q.c_str(), &v), kExitFailed);
            answer = captures ? v == FOREST_ACCEPT : v != FOREST_REJECT_FORMAT;
        } else {
            std::string line;
            while (!answer) {
                std::cerr << (captures ? "Value question" : "Pattern question") << ": is \"" << q
                          << "\" valid? [y/n] " << std::flush;
                if (!std::getline(std::cin, line))
                    break;
                if (line == "y" || line == "yes")
                    answer = true;
                else if (line == "n" || line == "no")
                    answer = false;
            }
            if (!answer) {
                std::cerr << "\n";
                forest_session_abort(session.get());
                step = FOREST_STEP_FAILED;
                break;
            }
        }
        check(forest_session_answer(session.get(), *answer), kExitFailed);
    }

    if (format == "json") {
        char* json = nullptr;
        check(forest_session_json(session.get(), &json), kExitFailed);
        std::cout << json << "\n";
        forest_string_free(json);
    } else {
        forest_stats st{};
        forest_session_stats(session.get(), &st);
        if (const char* regex = forest_session_regex(session.get())) {
            std::cout << "regex: " << regex << "\n";
            size_t n = forest_session_condition_count(session.get());
            std::cout << "conditions:";
            if (n == 0)
                std::cout << " none";
            for (size_t i = 0; i < n; ++i)
                std::cout << (i ? " && " : " ") << forest_session_condition(session.get(), i);
            std::cout << "\n";
        }
        if (step == FOREST_STEP_BEST_EFFORT)
            std::cout << "note: timed out, best candidate so far\n";
        if (st.question_cap_hit)
            std::cout << "note: question cap reached, result not fully disambiguated\n";
        std::cout << "stats: programs=" << st.programs_enumerated << " questions=" << st.questions
                  << " (pattern " << st.regex_questions << ", value " << st.capture_questions
                  << ") seconds=" << st.seconds << "\n";
        size_t n = forest_session_transcript_count(session.get());
        if (n > 0)
            std::cout << "transcript:\n";
        for (size_t i = 0; i < n; ++i) {
            const char* q = nullptr;
            int captures = 0;
            int valid = 0;
            forest_session_transcript_entry(session.get(), i, &q, &captures, &valid);
            std::cout << "  " << (captures ? "value   " : "pattern ") << '"' << q << "\" -> "
                      << (valid ? "valid" : "invalid") << "\n";
        }
    }
    if (step == FOREST_STEP_FAILED) {
        std::cerr << "forest: synthesis failed: " << forest_session_failure(session.get()) << "\n";
        return kExitFailed;
    }
    return step == FOREST_STEP_BEST_EFFORT ? kExitBestEffort : kExitDone;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interactive synthesis of regex validations from examples"};
    app.require_subcommand(1);
    app.set_version_flag("--version", forest_version());

    Common common;
    std::string input;
    std::string interaction = "tty";
    std::string format = "text";
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize a validation from an example file");
    synth_cmd->add_option("--input,-i", input, "Example file")->required();
    synth_cmd->add_option("--interaction", interaction, "tty, oracle:<validation-file> or accept-first");
    synth_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    add_common(synth_cmd, common);

    std::string host = "127.0.0.1";
    int port = 8080;
    int max_sessions = 64;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP session API");
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port,-p", port, "Port")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--max-sessions", max_sessions, "Concurrent session cap")->check(CLI::PositiveNumber);
    add_common(serve_cmd, common);

    std::string corpus = "cases";
    std::string modes = "multitree,no-pruning,dynamic-only,ktree";
    std::string csv_path;
    uint64_t seed = 1;
    size_t subsample = 0;
    unsigned jobs = 1;
    auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark corpus with reference oracles");
    bench_cmd->add_option("--corpus", corpus, "Directory of cases/<name>/{examples,truth}.txt");
    bench_cmd->add_option("--modes", modes, "Comma-separated: multitree, ktree, no-pruning, dynamic-only");
    bench_cmd->add_option("--csv", csv_path, "Also write the report as CSV");
    bench_cmd->add_option("--seed", seed, "Seed for subsampling and held-out samples");
    bench_cmd->add_option("--subsample", subsample, "Keep at most N examples per list (0 keeps all)");
    bench_cmd->add_option("--jobs,-j", jobs, "Cases run in parallel")->check(CLI::PositiveNumber);
    add_common(bench_cmd, common);

    std::string truth_path;
    size_t n_valid = 6;
    size_t n_invalid = 6;
    size_t n_cond = 0;
    auto* gen_cmd = app.add_subcommand("generate", "Sample an example file from a reference validation");
    gen_cmd->add_option("--truth", truth_path, "Validation file")->required();
    gen_cmd->add_option("--valid", n_valid, "Valid examples");
    gen_cmd->add_option("--invalid", n_invalid, "Invalid examples");
    gen_cmd->add_option("--conditional", n_cond, "Conditional invalid examples");
    gen_cmd->add_option("--seed", seed, "Sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*synth_cmd)
            return synth(input, interaction, format, common);

        if (*serve_cmd) {
            Options options = make_options(common, 600);
            check(forest_options_set(options.get(), "max_sessions", std::to_string(max_sessions).c_str()), kExitUsage);
            std::cerr << "listening on http://" << host << ":" << port << "\n";
            forest_status s = forest_serve(host.c_str(), port, options.get());
            check(s, status_exit(s));
            return kExitDone;
        }

        if (*bench_cmd) {
            Options options = make_options(common, 60);
            check(forest_options_set(options.get(), "seed", std::to_string(seed).c_str()), kExitUsage);
            check(forest_options_set(options.get(), "subsample", std::to_string(subsample).c_str()), kExitUsage);
            check(forest_options_set(options.get(), "jobs", std::to_string(jobs).c_str()), kExitUsage);
            char* table = nullptr;
            char* csv = nullptr;
            forest_status s = forest_bench_run(corpus.c_str(), modes.c_str(), options.get(), &table, &csv);
            check(s, status_exit(s));
            std::cout << table;
            if (!csv_path.empty()) {
                std::ofstream out(csv_path);
                out << csv;
                if (!out) {
                    std::cerr << "forest: cannot write " << csv_path << "\n";
                    forest_string_free(table);
                    forest_string_free(csv);
                    return kExitIo;
                }
            }
            forest_string_free(table);
            forest_string_free(csv);
            return kExitDone;
        }

        if (*gen_cmd) {
            std::string text = read_file(truth_path);
            forest_validation* raw = nullptr;
            check(forest_validation_parse(text.c_str(), &raw), kExitData);
            Validation truth(raw);
            char* out = nullptr;
            check(forest_generate_examples(truth.get(), n_valid, n_invalid, n_cond, seed, &out), kExitData);
            std::cout << out;
            forest_string_free(out);
            return kExitDone;
        }
    } catch (const Exit& e) {
        return e.code;
    }
    return kExitUsage;
}
