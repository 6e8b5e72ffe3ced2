#pragma once

// Seeded Monte Carlo campaigns over scenarios (role x attack x config),
// windowed aggregation, fringe-visibility measurement, and persistent
// result records.
//
// Parallel execution model: trials fan out across OpenMP workers. Every
// trial consumes its own counter-based substream keyed by
// (master_seed, trial index) and writes into its own result slot, and
// aggregation is a serial reduce over the slots in index order, so a
// report is bit-identical for a fixed seed under any worker count. A
// plain serial loop is kept alongside the OpenMP kernel as the reference
// implementation; the bench target compares the two.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phaselink/adversary.hpp"
#include "phaselink/protocol.hpp"

namespace phaselink {

enum class Role { Bob, EveClassical, EveQuantum, EveInterceptResend };

std::string role_name(Role role);

/// The attacker role recorded for a given attack kind.
Role attack_eve_role(AttackKind kind);

struct ScenarioConfig {
  SessionConfig session;
  AttackStrategy attack;
  long trials = 10000;
  std::uint64_t master_seed = 0;
  std::vector<double> window_deltas;  // radians, each in (0, pi]
  int fringe_points = 16;
  int windows_for_sigma = 50;
  int workers = 0;  // 0 = runtime default

  void validate() const;
};

struct TrialRecord {
  long trial_index = 0;
  Role role = Role::Bob;
  double phi_true = 0.0;
  double phi_est = 0.0;
  double circular_error = 0.0;
  double state_fidelity = 0.0;
  double visibility = 0.0;
  bool no_signal = false;
  bool empty_batch = false;
  bool blind_guess = false;
};

struct WindowAccuracy {
  double window = 0.0;
  double mean = 0.0;
  double sigma = 0.0;  // NaN when undefined (fewer than 2 blocks)
};

struct MetricStat {
  double mean = 0.0;
  double sigma = 0.0;
};

struct RoleReport {
  Role role = Role::Bob;
  std::vector<WindowAccuracy> accuracy;
  MetricStat fidelity;
  MetricStat visibility;
};

struct CampaignReport {
  ScenarioConfig config;
  std::uint64_t master_seed = 0;
  double negativity = 0.0;   // analytic, from the configured channel chain
  double holevo_bits = 0.0;  // attacker bound; 0 when no attack configured
  std::vector<RoleReport> roles;
  std::vector<TrialRecord> trial_records;  // not serialized; see dump_trials
};

/// Serial reference trial loop.
std::vector<TrialRecord> run_trials_serial(const ScenarioConfig& cfg);

/// OpenMP trial loop; workers <= 0 uses the runtime default. Produces
/// records identical to the serial reference.
std::vector<TrialRecord> run_trials_parallel(const ScenarioConfig& cfg, int workers);

/// Full campaign: validates, runs the trial loop (serial for workers == 1,
/// OpenMP otherwise), and aggregates. Bit-identical output for identical
/// (config, master_seed) regardless of execution order.
CampaignReport run_scenario(const ScenarioConfig& cfg);

/// Accuracy of one role's records at one window: hits are unflagged
/// records with circular error <= delta, misses are everything else.
double records_accuracy_at(std::span<const TrialRecord> records, Role role,
                           double delta);

/// Partitions values into `windows` contiguous blocks (remainder to the
/// last block) and returns (grand mean, standard deviation of the block
/// means). Sigma is NaN for a single block. Throws std::invalid_argument
/// when there are fewer values than windows.
std::pair<double, double> windowed_sigma(std::span<const double> values, int windows);

/// Coincidence-fringe visibility: Alice fixed in X, Bob swept over
/// fringe_points equatorial angles, detector model applied, visibility
/// taken as (max - min)/(max + min) of the shifted fringe over the grid
/// points (no curve fit). Routes through the configured attack.
/// Throws NoSignalError when the fringe carries no signal at all.
double visibility_from_fringes(const ScenarioConfig& cfg, int samples_per_point,
                               Rng& rng);

/// Versioned UTF-8 text serialization of a report (trial records are not
/// included). parse/load reject unknown versions and malformed content
/// with ParseError naming the byte offset and field.
std::string serialize_report(const CampaignReport& report);
CampaignReport parse_report(const std::string& text);
void persist_report(const CampaignReport& report, const std::string& path);
CampaignReport load_report(const std::string& path);

/// One tab-separated line per trial record:
/// trial role phi_true phi_est circ_err fidelity flags
std::string format_trial_dump(const CampaignReport& report);
void dump_trials(const CampaignReport& report, const std::string& path);

}  // namespace phaselink
