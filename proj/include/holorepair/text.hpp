#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace holorepair {

/// A cell value: NULL or a non-empty canonicalized string.
/// Canonicalization trims surrounding whitespace only; an all-whitespace or
/// empty field becomes NULL. Comparisons stay case-sensitive.
using Value = std::optional<std::string>;

/// Trim surrounding ASCII whitespace; empty result maps to NULL.
Value canonicalize(std::string_view raw);

/// Full-string decimal parse (used by the ordering operators).
std::optional<double> parse_decimal(std::string_view s);

/// Levenshtein edit distance.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Normalized similarity: 1 - dist / max(len). Two empty strings score 1.
double similarity(std::string_view a, std::string_view b);

}  // namespace holorepair
