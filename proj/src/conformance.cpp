#include "latentpara/conformance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace latentpara {

using nlohmann::json;

bool ConformanceReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

int max_significant_digits(std::string_view s) {
  int best = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      continue;
    }
    if (c == '-' || (c >= '0' && c <= '9')) {
      int digits = 0;
      bool leading = true;
      std::size_t j = i;
      for (; j < s.size(); ++j) {
        const char d = s[j];
        if (d == 'e' || d == 'E') {
          // skip exponent
          ++j;
          while (j < s.size() && (s[j] == '+' || s[j] == '-' || (s[j] >= '0' && s[j] <= '9'))) ++j;
          break;
        }
        if (d >= '0' && d <= '9') {
          if (d != '0') leading = false;
          if (!leading) ++digits;
        } else if (d != '.' && d != '-') {
          break;
        }
      }
      best = std::max(best, digits);
      i = j - 1;
    }
  }
  return best;
}

namespace {

class Runner {
 public:
  Runner(Transport& transport, ConformanceReport& report) : transport_(transport), report_(report) {}

  // Send a raw line; nullopt-equivalent (discarded object) if reply is not JSON.
  json send(const std::string& line, std::string* raw = nullptr) {
    const std::string reply = transport_.exchange(line);
    if (raw) *raw = reply;
    return json::parse(reply);
  }

  void check(const std::string& name, const std::function<std::string()>& body) {
    ConformanceCheck c{name, false, {}};
    try {
      c.detail = body();
      c.passed = c.detail.empty();
    } catch (const std::exception& e) {
      c.detail = std::string("exception: ") + e.what();
    }
    report_.checks.push_back(std::move(c));
  }

 private:
  Transport& transport_;
  ConformanceReport& report_;
};

std::string expect_ok(const json& r, const std::string& id) {
  if (!r.is_object()) return "response is not an object";
  if (!r.contains("id") || r["id"] != id) return "id not echoed (expected '" + id + "')";
  if (!r.contains("ok") || !r["ok"].is_boolean()) return "missing boolean 'ok'";
  if (!r["ok"].get<bool>()) return "ok is false: " + r.value("error", std::string("?"));
  return {};
}

std::string expect_error(const json& r) {
  if (!r.is_object()) return "response is not an object";
  if (!r.contains("ok") || r["ok"] != false) return "expected ok == false";
  if (!r.contains("error") || !r["error"].is_string()) return "missing string 'error'";
  return {};
}

std::string check_vector(const json& r, const char* field) {
  if (!r.contains(field) || !r[field].is_array() || r[field].empty()) {
    return std::string("missing non-empty array '") + field + "'";
  }
  for (const auto& x : r[field]) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) {
      return std::string("non-finite or non-numeric entry in '") + field + "'";
    }
  }
  return {};
}

std::string check_digits(const std::string& raw) {
  const int digits = max_significant_digits(raw);
  if (digits > 17) return "number serialized with " + std::to_string(digits) + " significant digits";
  return {};
}

}  // namespace

ConformanceReport run_conformance(Transport& transport, const ConformanceOptions& options) {
  ConformanceReport report;
  Runner run(transport, report);

  run.check("ping", [&] { return expect_ok(run.send(R"({"op":"ping","id":"c-ping"})"), "c-ping"); });

  run.check("id_echo_verbatim", [&] {
    const std::string id = "c-\"quoted\"-é-\\n";
    return expect_ok(run.send(json{{"op", "ping"}, {"id", id}}.dump()), id);
  });

  run.check("malformed_json_rejected", [&] { return expect_error(run.send("{not json")); });

  run.check("survives_malformed_line", [&] {
    return expect_ok(run.send(R"({"op":"ping","id":"c-after"})"), "c-after");
  });

  run.check("missing_id_rejected", [&] { return expect_error(run.send(R"({"op":"ping"})")); });

  run.check("unknown_op_rejected", [&] {
    const json r = run.send(R"({"op":"frobnicate","id":"c-unknown"})");
    if (auto e = expect_error(r); !e.empty()) return e;
    if (r["id"] != "c-unknown") return std::string("id not echoed on error");
    return std::string{};
  });

  if (options.check_encode) {
    json embedding;
    run.check("encode", [&] {
      std::string raw;
      const json r = run.send(json{{"op", "encode"}, {"id", "c-enc"}, {"text", options.probe_text}}.dump(), &raw);
      if (auto e = expect_ok(r, "c-enc"); !e.empty()) return e;
      if (auto e = check_vector(r, "embedding"); !e.empty()) return e;
      embedding = r["embedding"];
      return check_digits(raw);
    });
    run.check("encode_empty_text_rejected", [&] {
      return expect_error(run.send(R"({"op":"encode","id":"c-enc0","text":""})"));
    });
    run.check("decode", [&] {
      if (embedding.is_null()) return std::string("skipped: encode failed");
      const json r = run.send(json{{"op", "decode"}, {"id", "c-dec"}, {"embedding", embedding}}.dump());
      if (auto e = expect_ok(r, "c-dec"); !e.empty()) return e;
      if (!r.contains("text") || !r["text"].is_string() || r["text"].get<std::string>().empty()) {
        return std::string("missing non-empty string 'text'");
      }
      return std::string{};
    });
  }

  if (options.check_segment) {
    run.check("segment", [&] {
      if (options.sample_id.empty()) return std::string("no sample_id configured");
      std::string raw;
      const json r = run.send(json{{"op", "segment"},
                                   {"id", "c-seg"},
                                   {"sample_id", options.sample_id},
                                   {"image_ref", ""},
                                   {"text", options.probe_text}}
                                  .dump(),
                              &raw);
      if (auto e = expect_ok(r, "c-seg"); !e.empty()) return e;
      if (r.contains("iou")) {
        if (!r["iou"].is_number()) return std::string("'iou' is not a number");
        const double iou = r["iou"].get<double>();
        if (!(iou >= 0.0 && iou <= 1.0)) return "iou " + r["iou"].dump() + " outside [0, 1]";
        return check_digits(raw);
      }
      if (r.contains("mask")) {
        const json& m = r["mask"];
        if (!m.is_object() || !m.contains("w") || !m.contains("h") || !m.contains("rle")) {
          return std::string("mask lacks w/h/rle");
        }
        const auto runs = m["rle"].get<std::vector<std::uint64_t>>();
        const auto total = std::accumulate(runs.begin(), runs.end(), std::uint64_t{0});
        if (total != m["w"].get<std::uint64_t>() * m["h"].get<std::uint64_t>()) {
          return std::string("rle runs do not cover w*h pixels");
        }
        return std::string{};
      }
      return std::string("response has neither 'iou' nor 'mask'");
    });
    run.check("segment_unknown_sample_rejected", [&] {
      const json r = run.send(json{{"op", "segment"},
                                   {"id", "c-seg-unknown"},
                                   {"sample_id", "__no_such_sample__"},
                                   {"image_ref", ""},
                                   {"text", options.probe_text}}
                                  .dump());
      return expect_error(r);
    });
  }

  if (options.check_embed) {
    run.check("embed", [&] {
      std::string raw;
      const json r = run.send(json{{"op", "embed"}, {"id", "c-emb"}, {"text", options.probe_text}}.dump(), &raw);
      if (auto e = expect_ok(r, "c-emb"); !e.empty()) return e;
      if (auto e = check_vector(r, "embedding"); !e.empty()) return e;
      return check_digits(raw);
    });
  }

  if (options.check_judge) {
    run.check("judge", [&] {
      const json r = run.send(json{{"op", "judge"},
                                   {"id", "c-judge"},
                                   {"original", options.probe_text},
                                   {"text", options.probe_text}}
                                  .dump());
      if (auto e = expect_ok(r, "c-judge"); !e.empty()) return e;
      if (!r.contains("score") || !r["score"].is_number_integer()) return std::string("'score' is not an integer");
      const auto s = r["score"].get<long long>();
      if (s < 1 || s > 5) return "score " + std::to_string(s) + " outside 1..5";
      return std::string{};
    });
  }

  return report;
}

}  // namespace latentpara
