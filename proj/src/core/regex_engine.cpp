#include "regex_engine.hpp"

#include "utf8.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

namespace forest {

// ---------------------------------------------------------------------------
// Emission

namespace {

constexpr std::u32string_view kMeta = U"\\^$.|?*+()[]{}";

int precedence(const Regex& r)
{
    switch (r.kind) {
    case NodeKind::Union: return 0;
    case NodeKind::Concat: return 1;
    case NodeKind::Kleene:
    case NodeKind::Plus:
    case NodeKind::Option:
    case NodeKind::Range: return 2;
    default: return 3;
    }
}

struct Emitter {
    bool ecmascript = false;
    std::string out;

    void wrapped(const Regex& r, int min_prec)
    {
        if (precedence(r) < min_prec) {
            out += "(?:";
            node(r);
            out += ")";
        } else {
            node(r);
        }
    }

    void node(const Regex& r)
    {
        switch (r.kind) {
        case NodeKind::Union:
            wrapped(r.children[0], 0);
            out += "|";
            wrapped(r.children[1], 1);  // keeps right-nested unions explicit
            break;
        case NodeKind::Concat:
            for (const auto& c : r.children)
                wrapped(c, c.kind == NodeKind::Concat ? 1 : 1);
            break;
        case NodeKind::Kleene:
            wrapped(r.child(), 3);
            out += "*";
            break;
        case NodeKind::Plus:
            wrapped(r.child(), 3);
            out += "+";
            break;
        case NodeKind::Option:
            wrapped(r.child(), 3);
            out += "?";
            break;
        case NodeKind::Range:
            wrapped(r.child(), 3);
            out += to_string(r.range);
            break;
        case NodeKind::Group:
            out += "(";
            node(r.child());
            out += ")";
            break;
        case NodeKind::Class:
            if (r.cls == CharClass::Any || r.cls == CharClass::None)
                throw RegexError("internal character class cannot be emitted");
            out += class_syntax(r.cls);
            break;
        case NodeKind::Literal:
            if (kMeta.find(r.ch) != std::u32string_view::npos) {
                out += '\\';
                out += static_cast<char>(r.ch);
            } else if (ecmascript && r.ch >= 0x80) {
                out += "(?:" + utf8::encode(r.ch) + ")";
            } else {
                out += utf8::encode(r.ch);
            }
            break;
        }
    }
};

}  // namespace

std::string emit(const Regex& r)
{
    Emitter e;
    e.node(r);
    return e.out;
}

std::string emit_ecmascript(const Regex& r)
{
    Emitter e;
    e.ecmascript = true;
    e.node(r);
    return e.out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
public:
    explicit Parser(std::u32string text) : s_(std::move(text)) {}

    Regex run()
    {
        if (s_.empty())
            fail("empty pattern");
        Regex r = alternation();
        if (pos_ != s_.size())
            fail("unexpected ')'");
        return flatten(r);
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw RegexError("regex parse error at " + std::to_string(pos_) + ": " + what);
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char32_t peek() const { return s_[pos_]; }

    Regex alternation()
    {
        Regex left = sequence();
        while (!at_end() && peek() == U'|') {
            ++pos_;
            left = Regex::alt(std::move(left), sequence());
        }
        return left;
    }

    Regex sequence()
    {
        std::vector<Regex> parts;
        while (!at_end() && peek() != U'|' && peek() != U')')
            parts.push_back(postfix());
        if (parts.empty())
            fail("empty alternative");
        return Regex::concat(std::move(parts));
    }

    int number()
    {
        size_t start = pos_;
        long v = 0;
        while (!at_end() && peek() >= U'0' && peek() <= U'9') {
            v = v * 10 + (peek() - U'0');
            if (v > 100000)
                fail("repetition bound too large");
            ++pos_;
        }
        if (pos_ == start)
            fail("expected number");
        return static_cast<int>(v);
    }

    Regex postfix()
    {
        Regex a = atom();
        if (at_end())
            return a;
        char32_t c = peek();
        if (c == U'*') {
            ++pos_;
            a = Regex::star(std::move(a));
        } else if (c == U'+') {
            ++pos_;
            a = Regex::plus(std::move(a));
        } else if (c == U'?') {
            ++pos_;
            a = Regex::option(std::move(a));
        } else if (c == U'{') {
            ++pos_;
            int m = number();
            int n = m;
            if (!at_end() && peek() == U',') {
                ++pos_;
                n = number();
            }
            if (at_end() || peek() != U'}')
                fail("expected '}'");
            ++pos_;
            if (n < m)
                fail("repetition bounds out of order");
            if (n == 0)
                fail("repetition of zero");
            if (m == 1 && n == 1) {
                // r{1} is r
            } else if (m == 0 && n == 1) {
                a = Regex::option(std::move(a));
            } else {
                a = Regex::repeat(std::move(a), RangeLit{m, n});
            }
        } else {
            return a;
        }
        if (!at_end() && (peek() == U'*' || peek() == U'+' || peek() == U'?' || peek() == U'{'))
            fail("stacked quantifier; use (?:...)");
        return a;
    }

    Regex atom()
    {
        char32_t c = peek();
        if (c == U'(') {
            ++pos_;
            bool capture = true;
            if (s_.compare(pos_, 2, U"?:") == 0) {
                pos_ += 2;
                capture = false;
            }
            if (capture && group_depth_ > 0)
                fail("nested capturing groups are not supported");
            if (capture)
                ++group_depth_;
            Regex inner = alternation();
            if (capture)
                --group_depth_;
            if (at_end() || peek() != U')')
                fail("expected ')'");
            ++pos_;
            return capture ? Regex::group(std::move(inner)) : inner;
        }
        if (c == U'[') {
            for (CharClass cls : kClassFamily) {
                auto syn = class_syntax(cls);
                std::u32string wide(syn.begin(), syn.end());
                if (s_.compare(pos_, wide.size(), wide) == 0) {
                    pos_ += wide.size();
                    return Regex::char_class(cls);
                }
            }
            fail("unsupported character class");
        }
        if (c == U'\\') {
            ++pos_;
            if (at_end())
                fail("dangling escape");
            char32_t e = peek();
            ++pos_;
            if (kMeta.find(e) == std::u32string_view::npos && e != U'/' && e != U'-')
                fail("unsupported escape");
            return Regex::literal(e);
        }
        if (kMeta.find(c) != std::u32string_view::npos)
            fail("unexpected metacharacter");
        ++pos_;
        return Regex::literal(c);
    }

    std::u32string s_;
    size_t pos_ = 0;
    int group_depth_ = 0;
};

}  // namespace

Regex parse_regex(std::string_view text)
{
    std::u32string wide;
    try {
        wide = utf8::decode(text);
    } catch (const utf8::DecodeError& e) {
        throw RegexError(e.what());
    }
    return Parser(std::move(wide)).run();
}

// ---------------------------------------------------------------------------
// Thompson NFA

Nfa::Nfa(const Regex& r)
{
    Frag f = build(r);
    start_ = f.in;
    accept_ = f.out;
}

int Nfa::add_state()
{
    states_.emplace_back();
    return static_cast<int>(states_.size()) - 1;
}

Nfa::Frag Nfa::build_copy(const Regex& r, int copies)
{
    // Sequential copies of r; copies >= 1.
    Frag first = build(r);
    int out = first.out;
    for (int i = 1; i < copies; ++i) {
        Frag f = build(r);
        states_[out].eps[0] = f.in;
        out = f.out;
    }
    return {first.in, out};
}

Nfa::Frag Nfa::build(const Regex& r)
{
    switch (r.kind) {
    case NodeKind::Literal:
    case NodeKind::Class: {
        int a = add_state();
        int b = add_state();
        states_[a].next = b;
        states_[a].is_class = r.kind == NodeKind::Class;
        states_[a].ch = r.ch;
        states_[a].cls = r.cls;
        return {a, b};
    }
    case NodeKind::Group:
        return build(r.child());
    case NodeKind::Concat: {
        Frag first = build(r.children[0]);
        int out = first.out;
        for (size_t i = 1; i < r.children.size(); ++i) {
            Frag f = build(r.children[i]);
            states_[out].eps[0] = f.in;
            out = f.out;
        }
        return {first.in, out};
    }
    case NodeKind::Union: {
        int a = add_state();
        Frag l = build(r.children[0]);
        Frag rr = build(r.children[1]);
        int b = add_state();
        states_[a].eps[0] = l.in;
        states_[a].eps[1] = rr.in;
        states_[l.out].eps[0] = b;
        states_[rr.out].eps[0] = b;
        return {a, b};
    }
    case NodeKind::Kleene: {
        int a = add_state();
        Frag c = build(r.child());
        int b = add_state();
        states_[a].eps[0] = c.in;
        states_[a].eps[1] = b;
        states_[c.out].eps[0] = c.in;
        states_[c.out].eps[1] = b;
        return {a, b};
    }
    case NodeKind::Plus: {
        Frag c = build(r.child());
        int b = add_state();
        states_[c.out].eps[0] = c.in;
        states_[c.out].eps[1] = b;
        return {c.in, b};
    }
    case NodeKind::Option: {
        int a = add_state();
        Frag c = build(r.child());
        int b = add_state();
        states_[a].eps[0] = c.in;
        states_[a].eps[1] = b;
        states_[c.out].eps[0] = b;
        return {a, b};
    }
    case NodeKind::Range: {
        const RangeLit& lit = r.range;
        if (lit.max > kMaxRepeat || lit.min > kMaxRepeat)
            throw RegexError("repetition bound exceeds " + std::to_string(kMaxRepeat));
        int a = add_state();
        int cur = a;
        for (int i = 0; i < lit.min; ++i) {
            Frag f = build(r.child());
            states_[cur].eps[0] = f.in;
            cur = f.out;
        }
        int end = add_state();
        // Optional copies: each may skip straight to the end.
        for (int i = lit.min; i < lit.max; ++i) {
            Frag f = build(r.child());
            states_[cur].eps[0] = f.in;
            states_[cur].eps[1] = end;
            cur = f.out;
        }
        states_[cur].eps[0] = end;
        return {a, end};
    }
    }
    throw RegexError("unknown node kind");
}

bool Nfa::label_matches(const State& s, char32_t c) const
{
    return s.is_class ? class_contains(s.cls, c) : s.ch == c;
}

void Nfa::close(StateSet& set) const
{
    std::vector<char> seen(states_.size(), 0);
    std::vector<int> stack;
    for (int s : set) {
        if (!seen[s]) {
            seen[s] = 1;
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int e : states_[s].eps) {
            if (e >= 0 && !seen[e]) {
                seen[e] = 1;
                stack.push_back(e);
            }
        }
    }
    set.clear();
    for (size_t i = 0; i < seen.size(); ++i)
        if (seen[i])
            set.push_back(static_cast<int>(i));
}

Nfa::StateSet Nfa::start() const
{
    StateSet s{start_};
    close(s);
    return s;
}

Nfa::StateSet Nfa::step(const StateSet& set, char32_t c) const
{
    StateSet next;
    for (int s : set) {
        const State& st = states_[s];
        if (st.next >= 0 && label_matches(st, c))
            next.push_back(st.next);
    }
    close(next);
    return next;
}

bool Nfa::accepting(const StateSet& set) const
{
    return std::binary_search(set.begin(), set.end(), accept_);
}

bool Nfa::accepts(std::u32string_view s) const
{
    StateSet cur = start();
    for (char32_t c : s) {
        if (cur.empty())
            return false;
        cur = step(cur, c);
    }
    return accepting(cur);
}

bool full_match(const Regex& r, std::u32string_view s) { return Nfa(r).accepts(s); }

bool full_match(const Regex& r, std::string_view utf8_text)
{
    return full_match(r, utf8::decode(utf8_text));
}

bool nullable(const Regex& r) { return full_match(r, std::u32string_view{}); }

// ---------------------------------------------------------------------------
// Alphabet and distinguishing inputs

SessionAlphabet SessionAlphabet::build(std::u32string explicit_chars)
{
    std::sort(explicit_chars.begin(), explicit_chars.end());
    explicit_chars.erase(std::unique(explicit_chars.begin(), explicit_chars.end()),
                         explicit_chars.end());
    SessionAlphabet a;
    a.explicit_chars = explicit_chars;
    a.symbols = explicit_chars;

    auto is_explicit = [&](char32_t c) {
        return std::binary_search(explicit_chars.begin(), explicit_chars.end(), c);
    };
    std::map<unsigned, char32_t> atoms;  // membership signature -> representative
    for (char32_t c = 0x20; c < 0x7F; ++c) {
        if (is_explicit(c))
            continue;
        unsigned sig = 0;
        for (size_t i = 0; i < kClassFamily.size(); ++i)
            if (class_contains(kClassFamily[i], c))
                sig |= 1u << i;
        atoms.emplace(sig, c);  // keeps the smallest character per atom
    }
    std::u32string reps;
    for (auto& [sig, rep] : atoms)
        if (sig != 0)
            reps.push_back(rep);
    std::sort(reps.begin(), reps.end());
    a.symbols += reps;
    if (auto it = atoms.find(0); it != atoms.end())
        a.symbols.push_back(it->second);
    return a;
}

SessionAlphabet SessionAlphabet::for_pair(const Regex& x, const Regex& y, std::u32string_view extra)
{
    std::u32string chars = literal_chars(x) + literal_chars(y);
    chars += extra;
    return build(std::move(chars));
}

std::optional<std::u32string> distinguishing_input(const Regex& r1, const Regex& r2,
                                                   const SessionAlphabet& alphabet)
{
    Nfa a(r1);
    Nfa b(r2);
    using Key = std::pair<Nfa::StateSet, Nfa::StateSet>;
    std::map<Key, int> index;
    std::vector<Key> nodes;
    std::vector<std::pair<int, char32_t>> parent;
    std::deque<int> queue;

    auto differs = [&](const Key& k) { return a.accepting(k.first) != b.accepting(k.second); };
    auto witness = [&](int id) {
        std::u32string w;
        while (parent[id].first >= 0) {
            w.push_back(parent[id].second);
            id = parent[id].first;
        }
        std::reverse(w.begin(), w.end());
        return w;
    };

    Key start{a.start(), b.start()};
    index.emplace(start, 0);
    nodes.push_back(start);
    parent.emplace_back(-1, 0);
    if (differs(start))
        return std::u32string{};
    queue.push_back(0);
    constexpr size_t kStateCap = 500000;
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        for (char32_t c : alphabet.symbols) {
            Key next{a.step(nodes[id].first, c), b.step(nodes[id].second, c)};
            if (next.first.empty() && next.second.empty())
                continue;  // both dead: never distinguishes
            auto [it, inserted] = index.emplace(next, static_cast<int>(nodes.size()));
            if (!inserted)
                continue;
            nodes.push_back(next);
            parent.emplace_back(id, c);
            if (differs(next))
                return witness(it->second);
            if (nodes.size() > kStateCap)
                throw RegexError("product automaton too large");
            queue.push_back(it->second);
        }
    }
    return std::nullopt;
}

std::optional<std::u32string> distinguishing_input(const Regex& r1, const Regex& r2)
{
    return distinguishing_input(r1, r2, SessionAlphabet::for_pair(r1, r2));
}

std::optional<std::u32string> nearest_distinguishing_input(const Regex& r1, const Regex& r2,
                                                           const SessionAlphabet& alphabet,
                                                           const std::vector<std::u32string>& anchors)
{
    if (anchors.empty())
        return distinguishing_input(r1, r2, alphabet);
    Nfa a(r1);
    Nfa b(r2);
    using Key = std::pair<Nfa::StateSet, Nfa::StateSet>;
    auto differs = [&](const Key& k) { return a.accepting(k.first) != b.accepting(k.second); };
    constexpr size_t kStateCap = 500000;

    std::optional<std::u32string> best;
    size_t best_cost = std::numeric_limits<size_t>::max();
    for (const auto& anchor : anchors) {
        // 0-1 BFS over (anchor position, product state); each edit costs 1.
        struct Node {
            size_t pos;
            Key key;
            size_t cost;
            int parent;
            std::optional<char32_t> emitted;
        };
        std::vector<Node> nodes;
        std::map<std::pair<size_t, Key>, size_t> settled_cost;
        std::deque<int> queue;
        auto push = [&](size_t pos, Key key, size_t cost, int parent, std::optional<char32_t> c) {
            if (key.first.empty() && key.second.empty())
                return;
            auto [it, inserted] = settled_cost.emplace(std::make_pair(pos, key), cost);
            if (!inserted) {
                if (it->second <= cost)
                    return;
                it->second = cost;
            }
            nodes.push_back({pos, std::move(key), cost, parent, c});
            if (nodes.size() > kStateCap)
                throw RegexError("product automaton too large");
            int id = static_cast<int>(nodes.size() - 1);
            if (parent >= 0 && cost == nodes[static_cast<size_t>(parent)].cost)
                queue.push_front(id);
            else
                queue.push_back(id);
        };
        push(0, Key{a.start(), b.start()}, 0, -1, std::nullopt);
        while (!queue.empty()) {
            int id = queue.front();
            queue.pop_front();
            const Node n = nodes[static_cast<size_t>(id)];
            if (n.cost >= best_cost)
                break;
            if (settled_cost.at({n.pos, n.key}) < n.cost)
                continue;
            if (n.pos == anchor.size() && differs(n.key)) {
                std::u32string w;
                for (int at = id; at >= 0; at = nodes[static_cast<size_t>(at)].parent)
                    if (nodes[static_cast<size_t>(at)].emitted)
                        w.push_back(*nodes[static_cast<size_t>(at)].emitted);
                std::reverse(w.begin(), w.end());
                best = w;
                best_cost = n.cost;
                break;
            }
            if (n.pos < anchor.size()) {
                char32_t keep = anchor[n.pos];
                push(n.pos + 1, Key{a.step(n.key.first, keep), b.step(n.key.second, keep)}, n.cost, id, keep);
                push(n.pos + 1, n.key, n.cost + 1, id, std::nullopt);  // delete
                for (char32_t c : alphabet.symbols)
                    if (c != keep)
                        push(n.pos + 1, Key{a.step(n.key.first, c), b.step(n.key.second, c)}, n.cost + 1, id, c);
            }
            for (char32_t c : alphabet.symbols)  // insert
                push(n.pos, Key{a.step(n.key.first, c), b.step(n.key.second, c)}, n.cost + 1, id, c);
        }
        if (best_cost == 0)
            break;
    }
    return best;
}

bool equivalent(const Regex& r1, const Regex& r2) { return !distinguishing_input(r1, r2).has_value(); }

// ---------------------------------------------------------------------------
// Captures

CaptureMatcher::CaptureMatcher(const Regex& with_groups)
    : re_(emit_ecmascript(with_groups), std::regex::ECMAScript | std::regex::optimize),
      groups_(count_groups(with_groups))
{
}

Captures CaptureMatcher::extract(std::string_view utf8_text) const
{
    Captures out;
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(utf8_text.begin(), utf8_text.end(), m, re_)) {
        out.status = Captures::Status::NoMatch;
        return out;
    }
    out.status = Captures::Status::Ok;
    for (size_t g = 1; g <= groups_; ++g) {
        std::string text = m[g].matched ? m[g].str() : std::string{};
        size_t begin = m[g].matched ? static_cast<size_t>(m.position(g)) : 0;
        out.spans.emplace_back(begin, begin + text.size());
        out.texts.push_back(text);
        bool numeric = !text.empty() && text.size() <= 18 &&
                       std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
        if (!numeric) {
            out.status = Captures::Status::NonNumeric;
            out.values.push_back(0);
            continue;
        }
        out.values.push_back(std::stoll(text));
    }
    return out;
}

Captures extract_captures(const Regex& with_groups, std::string_view utf8_text)
{
    return CaptureMatcher(with_groups).extract(utf8_text);
}

}  // namespace forest
