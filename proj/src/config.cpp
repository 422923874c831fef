#include "tumorfa/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tumorfa {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T parse_as(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

RunMode parse_mode(const std::string& text) {
  if (text == "fit") return RunMode::kFit;
  if (text == "simulate") return RunMode::kSimulate;
  if (text == "summarize") return RunMode::kSummarize;
  if (text == "diagnose") return RunMode::kDiagnose;
  throw ConfigError("unknown mode '" + text + "'");
}

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::kFit: return "fit";
    case RunMode::kSimulate: return "simulate";
    case RunMode::kSummarize: return "summarize";
    case RunMode::kDiagnose: return "diagnose";
  }
  return "fit";
}

std::string num(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename T, typename M>
Setter field(M member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v) { std::invoke(member, c) = parse_as<T>(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data_path", [](RunConfig& c, const std::string&, const std::string& v) { c.data_path = v; }},
      {"output_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"chains", field<int>([](RunConfig& c) -> int& { return c.chains; })},
      {"mode", [](RunConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); }},
      {"hyperparams.r", field<double>([](RunConfig& c) -> double& { return c.hyperparams.r; })},
      {"hyperparams.alpha", field<double>([](RunConfig& c) -> double& { return c.hyperparams.alpha; })},
      {"hyperparams.a", field<double>([](RunConfig& c) -> double& { return c.hyperparams.a; })},
      {"hyperparams.a0", field<double>([](RunConfig& c) -> double& { return c.hyperparams.a0; })},
      {"hyperparams.a00", field<double>([](RunConfig& c) -> double& { return c.hyperparams.a00; })},
      {"hyperparams.b00", field<double>([](RunConfig& c) -> double& { return c.hyperparams.b00; })},
      {"hyperparams.c_max", field<int>([](RunConfig& c) -> int& { return c.hyperparams.c_max; })},
      {"mcmc.iterations", field<int>([](RunConfig& c) -> int& { return c.mcmc.iterations; })},
      {"mcmc.burn_in", field<int>([](RunConfig& c) -> int& { return c.mcmc.burn_in; })},
      {"mcmc.thin", field<int>([](RunConfig& c) -> int& { return c.mcmc.thin; })},
      {"mcmc.theta_step", field<double>([](RunConfig& c) -> double& { return c.mcmc.theta_step; })},
      {"mcmc.p0_step", field<double>([](RunConfig& c) -> double& { return c.mcmc.p0_step; })},
      {"mcmc.row_flip_prob", field<double>([](RunConfig& c) -> double& { return c.mcmc.row_flip_prob; })},
      {"mcmc.enable_rj",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.mcmc.enable_rj = parse_bool(k, v); }},
      {"mcmc.rj_prob", field<double>([](RunConfig& c) -> double& { return c.mcmc.rj_prob; })},
      {"mcmc.rj_inner_iters", field<int>([](RunConfig& c) -> int& { return c.mcmc.rj_inner_iters; })},
      {"mcmc.rj_anneal_steps", field<int>([](RunConfig& c) -> int& { return c.mcmc.rj_anneal_steps; })},
      {"mcmc.split_shape1", field<double>([](RunConfig& c) -> double& { return c.mcmc.split_shape1; })},
      {"mcmc.split_shape2", field<double>([](RunConfig& c) -> double& { return c.mcmc.split_shape2; })},
      {"mcmc.init_C", field<int>([](RunConfig& c) -> int& { return c.mcmc.init_C; })},
      {"mcmc.seed", field<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.mcmc.seed; })},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  hyperparams.validate();
  mcmc.validate();
  if (chains < 1) throw ConfigError("chains must be at least 1");
  if (output_dir.empty()) throw ConfigError("output directory is not set");
  namespace fs = std::filesystem;
  if (mode == RunMode::kFit) {
    if (data_path.empty()) throw ConfigError("data file is not set");
    if (!fs::is_regular_file(data_path)) throw ConfigError("data file not found: " + data_path);
  }
  if ((mode == RunMode::kSummarize || mode == RunMode::kDiagnose) && !fs::is_directory(output_dir)) {
    throw ConfigError("run directory not found: " + output_dir);
  }
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(cfg, key, value);
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string format_config(const RunConfig& cfg) {
  const auto& h = cfg.hyperparams;
  const auto& m = cfg.mcmc;
  std::ostringstream out;
  out << "mode = " << mode_name(cfg.mode) << '\n'
      << "data_path = " << cfg.data_path << '\n'
      << "output_dir = " << cfg.output_dir << '\n'
      << "chains = " << cfg.chains << '\n'
      << "hyperparams.r = " << num(h.r) << '\n'
      << "hyperparams.alpha = " << num(h.alpha) << '\n'
      << "hyperparams.a = " << num(h.a) << '\n'
      << "hyperparams.a0 = " << num(h.a0) << '\n'
      << "hyperparams.a00 = " << num(h.a00) << '\n'
      << "hyperparams.b00 = " << num(h.b00) << '\n'
      << "hyperparams.c_max = " << h.c_max << '\n'
      << "mcmc.iterations = " << m.iterations << '\n'
      << "mcmc.burn_in = " << m.burn_in << '\n'
      << "mcmc.thin = " << m.thin << '\n'
      << "mcmc.theta_step = " << num(m.theta_step) << '\n'
      << "mcmc.p0_step = " << num(m.p0_step) << '\n'
      << "mcmc.row_flip_prob = " << num(m.row_flip_prob) << '\n'
      << "mcmc.enable_rj = " << (m.enable_rj ? "true" : "false") << '\n'
      << "mcmc.rj_prob = " << num(m.rj_prob) << '\n'
      << "mcmc.rj_inner_iters = " << m.rj_inner_iters << '\n'
      << "mcmc.rj_anneal_steps = " << m.rj_anneal_steps << '\n'
      << "mcmc.split_shape1 = " << num(m.split_shape1) << '\n'
      << "mcmc.split_shape2 = " << num(m.split_shape2) << '\n'
      << "mcmc.init_C = " << m.init_C << '\n'
      << "mcmc.seed = " << m.seed << '\n';
  return out.str();
}

}  // namespace tumorfa
