#include <fstream>
#include <sstream>

#include "phaselink/config.hpp"
#include "phaselink/errors.hpp"
#include "phaselink/harness.hpp"

namespace phaselink {

namespace {

constexpr int kFormatVersion = 1;

Role role_from_name(const std::string& name, std::size_t offset) {
  if (name == "Bob") return Role::Bob;
  if (name == "EveClassical") return Role::EveClassical;
  if (name == "EveQuantum") return Role::EveQuantum;
  if (name == "EveInterceptResend") return Role::EveInterceptResend;
  throw ParseError("unknown role '" + name + "'", offset, "role");
}

double parse_report_double(const std::string& value, std::size_t offset,
                           const std::string& field) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw ParseError("cannot parse number '" + value + "'", offset, field);
  }
  return v;
}

}  // namespace

std::string serialize_report(const CampaignReport& report) {
  std::ostringstream out;
  out << "format_version = " << kFormatVersion << "\n";
  out << "master_seed = " << report.master_seed << "\n";
  for (const auto& [key, value] : config_echo(report.config)) {
    out << key << " = " << value << "\n";
  }
  out << "negativity = " << format_double(report.negativity) << "\n";
  out << "holevo_bits = " << format_double(report.holevo_bits) << "\n";
  for (const RoleReport& role : report.roles) {
    for (const WindowAccuracy& acc : role.accuracy) {
      out << "role=" << role_name(role.role) << " window=" << format_double(acc.window)
          << " accuracy=" << format_double(acc.mean)
          << " accuracy_sigma=" << format_double(acc.sigma)
          << " fidelity=" << format_double(role.fidelity.mean)
          << " fidelity_sigma=" << format_double(role.fidelity.sigma)
          << " visibility=" << format_double(role.visibility.mean)
          << " visibility_sigma=" << format_double(role.visibility.sigma) << "\n";
    }
  }
  out << "end_of_report = 1\n";  // truncation guard
  return out.str();
}

CampaignReport parse_report(const std::string& text) {
  CampaignReport report;
  report.config = preset_config("default-5.1");

  bool saw_version = false, saw_seed = false;
  bool saw_negativity = false, saw_holevo = false;
  bool saw_end = false;

  std::size_t pos = 0;
  bool first_line = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string line = text.substr(pos, eol - pos);
    const std::size_t line_start = pos;
    pos = eol + 1;
    if (line.empty()) continue;

    if (line.rfind("role=", 0) == 0) {
      // One aggregate record: space-separated name=value fields.
      std::istringstream ss(line);
      std::string token;
      Role role = Role::Bob;
      WindowAccuracy acc;
      MetricStat fid, vis;
      while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
          throw ParseError("malformed record field '" + token + "'", line_start,
                           "record");
        }
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "role") {
          role = role_from_name(value, line_start);
        } else if (key == "window") {
          acc.window = parse_report_double(value, line_start, key);
        } else if (key == "accuracy") {
          acc.mean = parse_report_double(value, line_start, key);
        } else if (key == "accuracy_sigma") {
          acc.sigma = parse_report_double(value, line_start, key);
        } else if (key == "fidelity") {
          fid.mean = parse_report_double(value, line_start, key);
        } else if (key == "fidelity_sigma") {
          fid.sigma = parse_report_double(value, line_start, key);
        } else if (key == "visibility") {
          vis.mean = parse_report_double(value, line_start, key);
        } else if (key == "visibility_sigma") {
          vis.sigma = parse_report_double(value, line_start, key);
        } else {
          throw ParseError("unknown record field", line_start, key);
        }
      }
      if (report.roles.empty() || role_name(report.roles.back().role) !=
                                      role_name(role)) {
        RoleReport rr;
        rr.role = role;
        report.roles.push_back(rr);
      }
      report.roles.back().accuracy.push_back(acc);
      report.roles.back().fidelity = fid;
      report.roles.back().visibility = vis;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value'", line_start, line);
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (first_line && key != "format_version") {
      throw ParseError("report must begin with format_version", line_start,
                       "format_version");
    }
    first_line = false;

    if (key == "format_version") {
      if (value != std::to_string(kFormatVersion)) {
        throw ParseError("unsupported format_version '" + value + "'", line_start,
                         "format_version");
      }
      saw_version = true;
    } else if (key == "master_seed") {
      char* end = nullptr;
      report.master_seed = std::strtoull(value.c_str(), &end, 10);
      if (end == value.c_str() || *end != '\0') {
        throw ParseError("cannot parse seed '" + value + "'", line_start, key);
      }
      report.config.master_seed = report.master_seed;
      saw_seed = true;
    } else if (key == "negativity") {
      report.negativity = parse_report_double(value, line_start, key);
      saw_negativity = true;
    } else if (key == "holevo_bits") {
      report.holevo_bits = parse_report_double(value, line_start, key);
      saw_holevo = true;
    } else if (key == "end_of_report") {
      saw_end = true;
    } else {
      try {
        apply_config_entry(report.config, key, value);
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), line_start, key);
      }
    }
  }

  if (!saw_version) throw ParseError("missing format_version", 0, "format_version");
  if (!saw_seed) throw ParseError("truncated report: missing master_seed",
                                  text.size(), "master_seed");
  if (!saw_negativity || !saw_holevo || report.roles.empty()) {
    throw ParseError("truncated report: missing aggregates", text.size(), "record");
  }
  if (!saw_end) {
    throw ParseError("truncated report: missing end marker", text.size(),
                     "end_of_report");
  }
  return report;
}

void persist_report(const CampaignReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << serialize_report(report);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

CampaignReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open report file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_report(buf.str());
}

std::string format_trial_dump(const CampaignReport& report) {
  std::ostringstream out;
  out << "trial\trole\tphi_true\tphi_est\tcirc_err\tfidelity\tflags\n";
  for (const TrialRecord& r : report.trial_records) {
    std::string flags;
    if (r.no_signal) flags = "no-signal";
    if (r.empty_batch) flags = flags.empty() ? "empty-batch" : flags + ",empty-batch";
    if (r.blind_guess) flags = flags.empty() ? "blind" : flags + ",blind";
    if (flags.empty()) flags = "ok";
    out << r.trial_index << '\t' << role_name(r.role) << '\t'
        << format_double(r.phi_true) << '\t' << format_double(r.phi_est) << '\t'
        << format_double(r.circular_error) << '\t' << format_double(r.state_fidelity)
        << '\t' << flags << "\n";
  }
  return out.str();
}

void dump_trials(const CampaignReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << format_trial_dump(report);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace phaselink
