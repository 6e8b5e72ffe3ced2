#include "phaselink/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "phaselink/errors.hpp"

namespace phaselink {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": cannot parse '" + value + "' as a number");
  }
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": cannot parse '" + value + "' as an integer");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": cannot parse '" + value +
                      "' as an unsigned integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double(key, trim(item)));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<double> default_windows(int alphabet_m) {
  // Symbol-decision window, the headline receiver window, and the window
  // at which a uniform random guesser scores exactly 1.2%.
  return {kPi / alphabet_m, kPi / 16.0, 0.012 * kPi};
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v || std::isnan(v)) break;
  }
  return buf;
}

std::vector<ConfigEntry> parse_kv_text(const std::string& text) {
  std::vector<ConfigEntry> entries;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    const std::size_t line_start = pos;
    pos = eol + 1;

    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value'", line_start, line);
    }
    ConfigEntry e;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.byte_offset = line_start;
    if (e.key.empty()) throw ParseError("missing key", line_start, line);
    entries.push_back(std::move(e));
  }
  return entries;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"default-5.1", "paper-visibility",
                                                 "paper-negativity", "noiseless"};
  return names;
}

ScenarioConfig preset_config(const std::string& name) {
  ScenarioConfig cfg;
  cfg.session.alphabet = PhaseAlphabet(4);
  cfg.session.pairs_per_symbol = 10000;
  cfg.session.noise = NoiseSpec{0.01, 0.0, 1.0};
  cfg.session.detector = DetectorSpec{0.03, 1.0};
  cfg.session.shield = ShieldSpec{45.0};
  cfg.trials = 10000;
  cfg.window_deltas = default_windows(4);

  if (name == "default-5.1" || name == "paper-visibility") {
    // paper-visibility is the standard noisy link: its fringe visibility
    // (1-p)(1-dark)^2 is the calibration target.
    return cfg;
  }
  if (name == "paper-negativity") {
    // Shield dephasing tuned so the composed chain's negativity
    // (1-p)(1-2q) - p/2 lands exactly on the 0.86 calibration target.
    const double p = cfg.session.noise.depolarizing_p;
    cfg.session.noise.shield_dephasing_q = 0.5 * (1.0 - (0.86 + p / 2) / (1.0 - p));
    return cfg;
  }
  if (name == "noiseless") {
    cfg.session.noise = NoiseSpec{0.0, 0.0, 1.0};
    cfg.session.detector = DetectorSpec{0.0, 1.0};
    return cfg;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void apply_config_entry(ScenarioConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "alphabet_m") {
    const long m = parse_long(key, value);
    if (m < 2) throw ConfigError("alphabet_m must be >= 2, got " + value);
    cfg.session.alphabet = PhaseAlphabet(static_cast<int>(m));
  } else if (key == "pairs_per_symbol") {
    cfg.session.pairs_per_symbol = static_cast<int>(parse_long(key, value));
  } else if (key == "depolarizing_p") {
    cfg.session.noise.depolarizing_p = parse_double(key, value);
  } else if (key == "shield_dephasing_q") {
    cfg.session.noise.shield_dephasing_q = parse_double(key, value);
  } else if (key == "source_visibility") {
    cfg.session.noise.source_visibility = parse_double(key, value);
  } else if (key == "dark_count_prob") {
    cfg.session.detector.dark_count_prob = parse_double(key, value);
  } else if (key == "efficiency") {
    cfg.session.detector.efficiency = parse_double(key, value);
  } else if (key == "shield_db") {
    cfg.session.shield.attenuation_db = parse_double(key, value);
  } else if (key == "attack") {
    cfg.attack.kind = attack_kind_from_name(value);
  } else if (key == "basis_policy") {
    cfg.attack.basis_policy = basis_policy_from_name(value);
  } else if (key == "trials") {
    cfg.trials = parse_long(key, value);
  } else if (key == "master_seed") {
    cfg.master_seed = parse_u64(key, value);
  } else if (key == "window_deltas") {
    cfg.window_deltas = parse_double_list(key, value);
  } else if (key == "fringe_points") {
    cfg.fringe_points = static_cast<int>(parse_long(key, value));
  } else if (key == "windows_for_sigma") {
    cfg.windows_for_sigma = static_cast<int>(parse_long(key, value));
  } else if (key == "workers") {
    cfg.workers = static_cast<int>(parse_long(key, value));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ScenarioConfig config_from_text(const std::string& text,
                                const std::string& default_preset) {
  const std::vector<ConfigEntry> entries = parse_kv_text(text);
  std::string base = default_preset;
  for (const ConfigEntry& e : entries) {
    if (e.key == "preset") base = e.value;
  }
  ScenarioConfig cfg = preset_config(base);
  for (const ConfigEntry& e : entries) {
    if (e.key == "preset") continue;
    apply_config_entry(cfg, e.key, e.value);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path,
                                const std::string& default_preset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_text(buf.str(), default_preset);
}

std::vector<std::pair<std::string, std::string>> config_echo(
    const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> echo;
  echo.emplace_back("alphabet_m", std::to_string(cfg.session.alphabet.size()));
  echo.emplace_back("pairs_per_symbol", std::to_string(cfg.session.pairs_per_symbol));
  echo.emplace_back("depolarizing_p", format_double(cfg.session.noise.depolarizing_p));
  echo.emplace_back("shield_dephasing_q",
                    format_double(cfg.session.noise.shield_dephasing_q));
  echo.emplace_back("source_visibility",
                    format_double(cfg.session.noise.source_visibility));
  echo.emplace_back("dark_count_prob",
                    format_double(cfg.session.detector.dark_count_prob));
  echo.emplace_back("efficiency", format_double(cfg.session.detector.efficiency));
  echo.emplace_back("shield_db", format_double(cfg.session.shield.attenuation_db));
  echo.emplace_back("attack", attack_kind_name(cfg.attack.kind));
  echo.emplace_back("basis_policy", basis_policy_name(cfg.attack.basis_policy));
  echo.emplace_back("trials", std::to_string(cfg.trials));
  std::string deltas;
  for (std::size_t i = 0; i < cfg.window_deltas.size(); ++i) {
    if (i) deltas += ",";
    deltas += format_double(cfg.window_deltas[i]);
  }
  echo.emplace_back("window_deltas", deltas);
  echo.emplace_back("fringe_points", std::to_string(cfg.fringe_points));
  echo.emplace_back("windows_for_sigma", std::to_string(cfg.windows_for_sigma));
  // workers is an execution detail, not part of the scientific
  // configuration: reports must be byte-identical across worker counts.
  return echo;
}

std::string attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::PassiveTap: return "passive-tap";
    case AttackKind::InterceptResend: return "intercept-resend";
    case AttackKind::UniversalClone: return "universal-clone";
  }
  throw std::logic_error("unreachable");
}

AttackKind attack_kind_from_name(const std::string& name) {
  if (name == "none") return AttackKind::None;
  if (name == "passive-tap") return AttackKind::PassiveTap;
  if (name == "intercept-resend") return AttackKind::InterceptResend;
  if (name == "universal-clone") return AttackKind::UniversalClone;
  throw ConfigError("attack: unknown value '" + name + "'");
}

std::string basis_policy_name(BasisPolicy policy) {
  switch (policy) {
    case BasisPolicy::FixedX: return "fixed-x";
    case BasisPolicy::FixedZ: return "fixed-z";
    case BasisPolicy::RandomEquatorial: return "random-equatorial";
  }
  throw std::logic_error("unreachable");
}

BasisPolicy basis_policy_from_name(const std::string& name) {
  if (name == "fixed-x") return BasisPolicy::FixedX;
  if (name == "fixed-z") return BasisPolicy::FixedZ;
  if (name == "random-equatorial") return BasisPolicy::RandomEquatorial;
  throw ConfigError("basis_policy: unknown value '" + name + "'");
}

}  // namespace phaselink
