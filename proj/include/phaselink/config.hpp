#pragma once

// Flat key = value configuration files, named presets, and the canonical
// echo used by report files. Keys match ScenarioConfig field names in
// lower_snake form; unknown keys are a hard error, never ignored.

#include <string>
#include <utility>
#include <vector>

#include "phaselink/harness.hpp"

namespace phaselink {

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t byte_offset = 0;
};

/// Parses `key = value` lines with '#' comments and blank lines.
/// Throws ParseError on malformed lines.
std::vector<ConfigEntry> parse_kv_text(const std::string& text);

const std::vector<std::string>& preset_names();

/// Named presets: "default-5.1" (the standard noisy link), "noiseless",
/// and the two calibration presets "paper-visibility" / "paper-negativity"
/// that tune the shield dephasing knob toward the reference
/// coherence-visibility and negativity targets respectively.
ScenarioConfig preset_config(const std::string& name);

/// Applies one key to a config; throws ConfigError naming the key when it
/// is unknown or its value does not parse or validate.
void apply_config_entry(ScenarioConfig& cfg, const std::string& key,
                        const std::string& value);

/// Loads a config file on top of a preset base. A `preset` key inside the
/// file overrides `default_preset`.
ScenarioConfig load_config_file(const std::string& path,
                                const std::string& default_preset);
ScenarioConfig config_from_text(const std::string& text,
                                const std::string& default_preset);

/// Canonical (key, value) echo of every config field, in fixed order,
/// with doubles formatted to round-trip exactly.
std::vector<std::pair<std::string, std::string>> config_echo(
    const ScenarioConfig& cfg);

std::string attack_kind_name(AttackKind kind);
AttackKind attack_kind_from_name(const std::string& name);
std::string basis_policy_name(BasisPolicy policy);
BasisPolicy basis_policy_from_name(const std::string& name);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace phaselink
