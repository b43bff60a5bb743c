#include "latentpara/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "latentpara/errors.hpp"

extern char** environ;

namespace latentpara {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json config_to_json(const ToolConfig& c) {
  const AttackConfig& a = c.attack;
  return ordered_json{
      {"schema_version", c.schema_version},
      {"attack",
       {{"candidates", a.candidates},
        {"iterations", a.iterations},
        {"sigma_init", a.sigma_init},
        {"eps_clip", a.weights.eps_clip},
        {"eps_adv", a.weights.eps_adv},
        {"lambda_adv", a.weights.lambda_adv},
        {"lambda_sim", a.weights.lambda_sim},
        {"lr_mu", a.learning_rates.mu},
        {"lr_lambda", a.learning_rates.lambda_pre},
        {"lr_value", a.learning_rates.value},
        {"adam_beta1", a.adam.beta1},
        {"adam_beta2", a.adam.beta2},
        {"adam_eps", a.adam.eps},
        {"hidden", a.hidden},
        {"inner_steps", a.inner_steps},
        {"seed", a.seed}}},
      {"oracles",
       {{"encode", c.oracles.encode},
        {"segment", c.oracles.segment},
        {"embed", c.oracles.embed},
        {"judge", c.oracles.judge},
        {"timeout_ms", c.oracles.timeout_ms},
        {"max_concurrency", c.oracles.max_concurrency}}},
      {"synthetic",
       {{"dim", c.synthetic.dim},
        {"lattice_step", c.synthetic.lattice_step},
        {"tau", c.synthetic.tau},
        {"mask_mode", c.synthetic.mask_mode},
        {"hash_dim", c.synthetic.hash_dim}}},
      {"eval",
       {{"cosine_threshold", c.eval.filters.cosine_threshold},
        {"terminal_punctuation", c.eval.filters.terminal_punctuation},
        {"candidate_pool", c.eval.candidate_pool},
        {"attack_label", c.eval.attack_label}}},
      {"run", {{"parallelism", c.run.parallelism}, {"cache_path", c.run.cache_path}}}};
}

namespace {

bool compatible(const json& def, const json& value) {
  if (def.is_number_float()) return value.is_number();
  if (def.is_number_unsigned()) return value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0);
  if (def.is_number_integer()) return value.is_number_integer();
  return def.type() == value.type();
}

// Recursively merge `overlay` into `base`, rejecting keys absent from base.
void strict_merge(json& base, const json& overlay, const std::string& where) {
  if (!overlay.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      strict_merge(slot, it.value(), key);
    } else {
      if (!compatible(slot, it.value())) {
        throw ConfigError("config key '" + key + "' expects " + std::string(slot.type_name()) +
                          ", got " + it.value().type_name());
      }
      slot = it.value();
    }
  }
}

ToolConfig from_merged(const json& j) {
  ToolConfig c;
  c.schema_version = j.at("schema_version").get<int>();
  if (c.schema_version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version) +
                      " (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }
  const json& a = j.at("attack");
  AttackConfig& at = c.attack;
  at.candidates = a.at("candidates").get<std::size_t>();
  at.iterations = a.at("iterations").get<std::size_t>();
  at.sigma_init = a.at("sigma_init").get<double>();
  at.weights.eps_clip = a.at("eps_clip").get<double>();
  at.weights.eps_adv = a.at("eps_adv").get<double>();
  at.weights.lambda_adv = a.at("lambda_adv").get<double>();
  at.weights.lambda_sim = a.at("lambda_sim").get<double>();
  at.learning_rates.mu = a.at("lr_mu").get<double>();
  at.learning_rates.lambda_pre = a.at("lr_lambda").get<double>();
  at.learning_rates.value = a.at("lr_value").get<double>();
  at.adam.beta1 = a.at("adam_beta1").get<double>();
  at.adam.beta2 = a.at("adam_beta2").get<double>();
  at.adam.eps = a.at("adam_eps").get<double>();
  at.hidden = a.at("hidden").get<std::size_t>();
  at.inner_steps = a.at("inner_steps").get<std::size_t>();
  at.seed = a.at("seed").get<std::uint64_t>();

  const json& o = j.at("oracles");
  c.oracles.encode = o.at("encode").get<std::string>();
  c.oracles.segment = o.at("segment").get<std::string>();
  c.oracles.embed = o.at("embed").get<std::string>();
  c.oracles.judge = o.at("judge").get<std::string>();
  c.oracles.timeout_ms = o.at("timeout_ms").get<int>();
  c.oracles.max_concurrency = o.at("max_concurrency").get<int>();

  const json& s = j.at("synthetic");
  c.synthetic.dim = s.at("dim").get<std::size_t>();
  c.synthetic.lattice_step = s.at("lattice_step").get<double>();
  c.synthetic.tau = s.at("tau").get<double>();
  c.synthetic.mask_mode = s.at("mask_mode").get<bool>();
  c.synthetic.hash_dim = s.at("hash_dim").get<std::size_t>();

  const json& e = j.at("eval");
  c.eval.filters.cosine_threshold = e.at("cosine_threshold").get<double>();
  c.eval.filters.terminal_punctuation = e.at("terminal_punctuation").get<std::string>();
  c.eval.candidate_pool = e.at("candidate_pool").get<std::string>();
  c.eval.attack_label = e.at("attack_label").get<std::string>();

  const json& r = j.at("run");
  c.run.parallelism = r.at("parallelism").get<std::size_t>();
  c.run.cache_path = r.at("cache_path").get<std::string>();

  try {
    c.attack.validate();
    c.eval.filters.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  if (c.eval.candidate_pool != "means" && c.eval.candidate_pool != "all") {
    throw ConfigError("eval.candidate_pool must be \"means\" or \"all\"");
  }
  if (c.oracles.timeout_ms <= 0) throw ConfigError("oracles.timeout_ms must be positive");
  if (c.oracles.max_concurrency <= 0) throw ConfigError("oracles.max_concurrency must be positive");
  if (c.synthetic.dim == 0 || !(c.synthetic.lattice_step > 0) || !(c.synthetic.tau > 0) ||
      c.synthetic.hash_dim == 0) {
    throw ConfigError("synthetic oracle parameters must be positive");
  }
  if (c.run.parallelism == 0) throw ConfigError("run.parallelism must be >= 1");
  return c;
}

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

ToolConfig config_from_json(const json& overlay, const ToolConfig& base) {
  json merged = json::parse(config_to_json(base).dump());
  strict_merge(merged, overlay, "");
  return from_merged(merged);
}

void apply_env_overrides(json& j, const std::map<std::string, std::string>& env) {
  const json defaults = json::parse(config_to_json(ToolConfig{}).dump());
  for (const auto& [name, raw] : env) {
    if (!name.starts_with(kEnvPrefix)) continue;
    std::string rest = lower(name.substr(kEnvPrefix.size()));
    // split on "__"
    std::vector<std::string> path;
    std::size_t start = 0;
    while (true) {
      const auto pos = rest.find("__", start);
      path.push_back(rest.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 2;
    }
    const json* def = &defaults;
    json* slot = &j;
    std::string dotted;
    for (std::size_t i = 0; i < path.size(); ++i) {
      dotted += (i ? "." : "") + path[i];
      if (!def->is_object() || !def->contains(path[i])) {
        throw ConfigError("environment variable " + name + " names unknown config key '" + dotted + "'");
      }
      def = &(*def)[path[i]];
      if (!slot->is_object()) *slot = json::object();
      slot = &(*slot)[path[i]];
    }
    if (def->is_object()) throw ConfigError("environment variable " + name + " names a section");
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    if (def->is_string() && !value.is_string()) value = raw;
    *slot = value;
  }
}

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view entry(*e);
    if (!entry.starts_with(kEnvPrefix)) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
  }
  return env;
}

ToolConfig load_config(const std::optional<std::filesystem::path>& path,
                       const std::map<std::string, std::string>& env, const ToolConfig& base) {
  json overlay = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file " + path->string());
    try {
      overlay = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + path->string() + ": " + e.what());
    }
    if (!overlay.is_object()) throw ConfigError("config file " + path->string() + ": expected an object");
    if (!overlay.contains("schema_version")) {
      throw ConfigError("config file " + path->string() + ": missing schema_version");
    }
  }
  apply_env_overrides(overlay, env);
  return config_from_json(overlay, path ? ToolConfig{} : base);
}

}  // namespace latentpara
