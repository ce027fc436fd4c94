#include "splitter.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace forest {

namespace {

struct Occurrence {
    size_t pos;
    size_t len;
    size_t token;  // index into the selection list
    bool operator<(const Occurrence& o) const { return pos < o.pos; }
};

bool alnum(char32_t c)
{
    return (c >= U'0' && c <= U'9') || (c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z');
}

// Greedy occurrences of `pat` that avoid already-claimed positions.
std::vector<size_t> free_occurrences(const std::u32string& text, const std::u32string& pat,
                                     const std::vector<Occurrence>& claimed)
{
    std::vector<char> used(text.size(), 0);
    for (const auto& o : claimed)
        std::fill(used.begin() + static_cast<long>(o.pos), used.begin() + static_cast<long>(o.pos + o.len), 1);
    std::vector<size_t> out;
    size_t i = 0;
    while (i + pat.size() <= text.size()) {
        if (text.compare(i, pat.size(), pat) == 0 &&
            std::none_of(used.begin() + static_cast<long>(i), used.begin() + static_cast<long>(i + pat.size()),
                         [](char u) { return u != 0; })) {
            out.push_back(i);
            i += pat.size();
        } else {
            ++i;
        }
    }
    return out;
}

std::vector<Occurrence> replay(const std::u32string& text, const std::vector<std::u32string>& selection)
{
    std::vector<Occurrence> occ;
    for (size_t t = 0; t < selection.size(); ++t)
        for (size_t p : free_occurrences(text, selection[t], occ))
            occ.push_back({p, selection[t].size(), t});
    std::sort(occ.begin(), occ.end());
    return occ;
}

std::vector<size_t> token_sequence(const std::vector<Occurrence>& occ)
{
    std::vector<size_t> seq;
    for (const auto& o : occ)
        seq.push_back(o.token);
    return seq;
}

std::vector<std::u32string> raw_fields(const std::u32string& text, const std::vector<Occurrence>& occ)
{
    std::vector<std::u32string> fields;
    size_t at = 0;
    for (const auto& o : occ) {
        fields.push_back(text.substr(at, o.pos - at));
        fields.push_back(text.substr(o.pos, o.len));
        at = o.pos + o.len;
    }
    fields.push_back(text.substr(at));
    return fields;
}

}  // namespace

size_t count_occurrences(const std::u32string& text, const std::u32string& pattern)
{
    return free_occurrences(text, pattern, {}).size();
}

std::vector<std::u32string> find_dividing_substrings(const std::vector<std::u32string>& valid,
                                                     const std::vector<std::u32string>& invalid)
{
    if (valid.empty())
        return {};
    const std::u32string& shortest =
        *std::min_element(valid.begin(), valid.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });

    std::vector<std::u32string> selection;
    std::vector<std::vector<Occurrence>> claimed(valid.size());

    auto single_ok = [&](const std::u32string& cand) {
        if (valid.size() > 1)
            return true;
        if (std::none_of(cand.begin(), cand.end(), alnum))
            return true;
        return std::any_of(invalid.begin(), invalid.end(),
                           [&](const auto& x) { return x.find(cand) != std::u32string::npos; });
    };

    while (true) {
        std::set<std::u32string> candidates;
        for (size_t i = 0; i < shortest.size(); ++i)
            for (size_t len = 1; i + len <= shortest.size(); ++len)
                candidates.insert(shortest.substr(i, len));

        // (length desc, fields asc, leftmost, lexicographic)
        using Key = std::tuple<long, size_t, size_t, std::u32string>;
        std::optional<Key> best;
        for (const auto& cand : candidates) {
            if (!single_ok(cand))
                continue;
            size_t count = 0;
            bool ok = true;
            std::optional<std::vector<size_t>> seq0;
            size_t first_pos = 0;
            for (size_t e = 0; e < valid.size() && ok; ++e) {
                auto occ = free_occurrences(valid[e], cand, claimed[e]);
                if (occ.empty() || (e > 0 && occ.size() != count)) {
                    ok = false;
                    break;
                }
                count = occ.size();
                std::vector<Occurrence> merged = claimed[e];
                for (size_t p : occ)
                    merged.push_back({p, cand.size(), selection.size()});
                std::sort(merged.begin(), merged.end());
                auto seq = token_sequence(merged);
                if (!seq0)
                    seq0 = seq;
                else if (*seq0 != seq)
                    ok = false;
                if (&valid[e] == &shortest)
                    first_pos = occ.front();
            }
            if (!ok)
                continue;
            Key key{-static_cast<long>(cand.size()), count, first_pos, cand};
            if (!best || key < *best)
                best = key;
        }
        if (!best)
            break;
        const std::u32string chosen = std::get<3>(*best);
        for (size_t e = 0; e < valid.size(); ++e) {
            for (size_t p : free_occurrences(valid[e], chosen, claimed[e]))
                claimed[e].push_back({p, chosen.size(), selection.size()});
            std::sort(claimed[e].begin(), claimed[e].end());
        }
        selection.push_back(chosen);
    }
    return selection;
}

SplitResult split(const std::vector<std::u32string>& valid, const std::vector<std::u32string>& invalid)
{
    SplitResult r;
    r.selection = find_dividing_substrings(valid, invalid);
    if (r.selection.empty()) {
        r.n = 1;
        for (const auto& v : valid)
            r.fields.push_back({v});
        r.divider_column = {false};
        r.kept_raw_columns = {true};
        return r;
    }
    std::vector<std::vector<std::u32string>> raw;
    std::vector<Occurrence> occ0;
    for (size_t e = 0; e < valid.size(); ++e) {
        auto occ = replay(valid[e], r.selection);
        if (e == 0)
            occ0 = occ;
        raw.push_back(raw_fields(valid[e], occ));
    }
    for (const auto& o : occ0)
        r.dividers.push_back(r.selection[o.token]);
    size_t columns = raw.front().size();
    r.kept_raw_columns.assign(columns, false);
    for (size_t c = 0; c < columns; ++c)
        for (const auto& f : raw)
            if (!f[c].empty())
                r.kept_raw_columns[c] = true;
    r.fields.assign(valid.size(), {});
    for (size_t c = 0; c < columns; ++c) {
        if (!r.kept_raw_columns[c])
            continue;
        r.divider_column.push_back(c % 2 == 1);
        for (size_t e = 0; e < valid.size(); ++e)
            r.fields[e].push_back(raw[e][c]);
    }
    r.n = r.divider_column.size();
    return r;
}

std::optional<std::vector<std::u32string>> SplitResult::split_one(const std::u32string& example) const
{
    if (selection.empty())
        return std::vector<std::u32string>{example};
    auto occ = replay(example, selection);
    std::vector<std::u32string> seq;
    for (const auto& o : occ)
        seq.push_back(selection[o.token]);
    if (seq != dividers)
        return std::nullopt;
    auto raw = raw_fields(example, occ);
    std::vector<std::u32string> out;
    for (size_t c = 0; c < raw.size(); ++c) {
        if (kept_raw_columns[c])
            out.push_back(raw[c]);
        else if (!raw[c].empty())
            return std::nullopt;
    }
    return out;
}

}  // namespace forest
