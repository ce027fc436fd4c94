#pragma once

#include "regex_ast.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace forest {

class RegexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Repetition bounds above this are rejected when building automata.
inline constexpr int kMaxRepeat = 64;

// Concrete syntax. Precedence parentheses are emitted as "(?:...)" so that
// "(...)" always denotes a capturing group.
std::string emit(const Regex& r);

// Same language as emit() but safe for std::regex (ECMAScript) running over
// UTF-8 bytes: non-ASCII literals are wrapped so quantifiers bind the whole
// code point.
std::string emit_ecmascript(const Regex& r);

// Parses the emitted grammar. Throws RegexError. The result has flattened
// Concat nodes, so parse(emit(r)) == flatten(r).
Regex parse_regex(std::string_view text);

// Thompson automaton over character predicates.
class Nfa {
public:
    explicit Nfa(const Regex& r);

    using StateSet = std::vector<int>;  // sorted, epsilon-closed

    bool accepts(std::u32string_view s) const;
    StateSet start() const;
    StateSet step(const StateSet& set, char32_t c) const;
    bool accepting(const StateSet& set) const;
    size_t size() const { return states_.size(); }

private:
    struct State {
        int eps[2] = {-1, -1};
        int next = -1;  // labeled transition target
        bool is_class = false;
        char32_t ch = 0;
        CharClass cls = CharClass::None;
    };
    struct Frag {
        int in;
        int out;
    };

    int add_state();
    Frag build(const Regex& r);
    Frag build_copy(const Regex& r, int copies);
    void close(StateSet& set) const;
    bool label_matches(const State& s, char32_t c) const;

    std::vector<State> states_;
    int start_ = -1;
    int accept_ = -1;
};

bool full_match(const Regex& r, std::u32string_view s);
bool full_match(const Regex& r, std::string_view utf8_text);
bool nullable(const Regex& r);

// Finite alphabet over which languages are compared: every explicit
// character, one representative per membership atom of the class family,
// and one character outside every class (when one exists).
struct SessionAlphabet {
    std::u32string symbols;
    std::u32string explicit_chars;

    static SessionAlphabet build(std::u32string explicit_chars);
    // Alphabet of the literal characters of both regexes plus `extra`.
    static SessionAlphabet for_pair(const Regex& a, const Regex& b, std::u32string_view extra = {});
};

// Shortest string (ties: smallest symbol order) accepted by exactly one of
// the two regexes; nullopt when the languages agree over the alphabet.
std::optional<std::u32string> distinguishing_input(const Regex& r1, const Regex& r2,
                                                   const SessionAlphabet& alphabet);
std::optional<std::u32string> distinguishing_input(const Regex& r1, const Regex& r2);

// A distinguishing string at the least edit distance (insertions, deletions,
// substitutions) from one of the anchors; ties go to the earlier anchor.
// Witnesses close to known examples tell more candidates apart per answer
// than the shortest one. nullopt when the languages agree over the alphabet.
std::optional<std::u32string> nearest_distinguishing_input(const Regex& r1, const Regex& r2,
                                                           const SessionAlphabet& alphabet,
                                                           const std::vector<std::u32string>& anchors);

bool equivalent(const Regex& r1, const Regex& r2);

struct Captures {
    enum class Status { Ok, NoMatch, NonNumeric };
    Status status = Status::NoMatch;
    std::vector<int64_t> values;
    std::vector<std::string> texts;
    // Byte offsets of each group in the UTF-8 input.
    std::vector<std::pair<size_t, size_t>> spans;
};

// Integer capture extraction through std::regex on the emitted syntax.
class CaptureMatcher {
public:
    explicit CaptureMatcher(const Regex& with_groups);
    Captures extract(std::string_view utf8_text) const;
    size_t group_count() const { return groups_; }

private:
    std::regex re_;
    size_t groups_;
};

Captures extract_captures(const Regex& with_groups, std::string_view utf8_text);

}  // namespace forest
