#pragma once

#include <optional>
#include <string>
#include <vector>

namespace forest {

// Static multi-tree preprocessing: dividing substrings and per-example
// field tuples.
struct SplitResult {
    size_t n = 1;
    // fields[e][i]: i-th field of the e-th valid example.
    std::vector<std::vector<std::u32string>> fields;
    // Dividing substrings in the order they occur in every example.
    std::vector<std::u32string> dividers;
    // For each kept field column, whether it is a divider occurrence.
    std::vector<bool> divider_column;

    // Splits a further example with the same dividers; nullopt when the
    // example does not fit the same column structure.
    std::optional<std::vector<std::u32string>> split_one(const std::u32string& example) const;

    // Dividers in selection order (longest first); needed to replay the scan.
    std::vector<std::u32string> selection;
    // Which raw columns (before dropping all-empty ones) were kept.
    std::vector<bool> kept_raw_columns;
};

// Maximal dividing substrings in selection order. `invalid` only matters for
// the single-example rule.
std::vector<std::u32string> find_dividing_substrings(const std::vector<std::u32string>& valid,
                                                     const std::vector<std::u32string>& invalid = {});

SplitResult split(const std::vector<std::u32string>& valid, const std::vector<std::u32string>& invalid = {});

// Non-overlapping greedy left-to-right occurrence count.
size_t count_occurrences(const std::u32string& text, const std::u32string& pattern);

}  // namespace forest
