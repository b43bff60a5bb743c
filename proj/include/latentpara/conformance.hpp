#pragma once

#include <string>
#include <vector>

#include "latentpara/protocol.hpp"

namespace latentpara {

struct ConformanceOptions {
  bool check_encode = true;
  bool check_segment = true;
  bool check_embed = true;
  bool check_judge = true;
  /// Text used for encode/embed/judge probes and as the segment query.
  std::string probe_text = "Find the cup.";
  /// A sample the server has registered; required for the segment checks.
  std::string sample_id;
};

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::vector<ConformanceCheck> checks;
  bool passed() const;
};

/// Drive a server through raw protocol lines and check schema, id echo,
/// error handling and number formatting (at most 17 significant digits).
ConformanceReport run_conformance(Transport& transport, const ConformanceOptions& options);

/// Largest count of significant digits among the JSON number tokens of a
/// serialized line (string contents are skipped).
int max_significant_digits(std::string_view json_line);

}  // namespace latentpara
