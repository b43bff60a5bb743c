#include "latentpara/text_checks.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <stdexcept>

#include "latentpara/errors.hpp"

namespace latentpara {

namespace {

// 'U', 'l', or 0 when the text has no ASCII letter.
char leading_case(const std::string& text) {
  static const std::regex kFirstLetter("^[^A-Za-z]*([A-Za-z])");
  std::smatch m;
  if (!std::regex_search(text, m, kFirstLetter)) return 0;
  const char c = m.str(1).front();
  return (c >= 'A' && c <= 'Z') ? 'U' : 'l';
}

char terminal_mark(const std::string& text, const std::regex& terminal) {
  std::smatch m;
  if (!std::regex_search(text, m, terminal)) return 0;
  return m.str(1).front();
}

std::string escape_for_class(std::string_view chars) {
  std::string out;
  for (char c : chars) {
    if (c == ']' || c == '\\' || c == '^' || c == '-' || c == '[') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

bool regex_consistency(std::string_view original, std::string_view paraphrase,
                       std::string_view terminal_punctuation) {
  const std::string a(original);
  const std::string b(paraphrase);
  if (leading_case(a) != leading_case(b)) return false;
  if (terminal_punctuation.empty()) return true;
  const std::regex terminal("([" + escape_for_class(terminal_punctuation) + "])\\s*$");
  return terminal_mark(a, terminal) == terminal_mark(b, terminal);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("cosine_similarity: vectors of length " + std::to_string(a.size()) +
                            " and " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw std::domain_error("cosine_similarity: zero-norm embedding");
  }
  // sqrt(na * nb) is exact for a == b, so cos(a, a) == 1 bit-for-bit.
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

}  // namespace latentpara
