#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace latentpara {

inline constexpr std::string_view kDefaultTerminalPunctuation = ".!?";

/// True when the first alphabetic character has the same case class in both
/// strings and both end (ignoring trailing whitespace) with the same
/// character from `terminal_punctuation`, or both end with none of them.
bool regex_consistency(std::string_view original, std::string_view paraphrase,
                       std::string_view terminal_punctuation = kDefaultTerminalPunctuation);

/// <a, b> / (|a| |b|). Throws DimensionMismatch, or std::domain_error for a
/// zero-norm vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

std::size_t whitespace_token_count(std::string_view text);

}  // namespace latentpara
