#include "phaselink/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "phaselink/errors.hpp"

namespace phaselink {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

TrialRecord bob_record(long trial, const SymbolRecord& rec) {
  TrialRecord r;
  r.trial_index = trial;
  r.role = Role::Bob;
  r.phi_true = rec.phi_true;
  r.phi_est = rec.phi_est;
  r.circular_error = rec.circular_error;
  r.state_fidelity = rec.fidelity;
  r.visibility = rec.visibility;
  r.no_signal = rec.no_signal;
  r.empty_batch = rec.empty_batch;
  return r;
}

TrialRecord eve_record(long trial, Role role, double phi_true,
                       const AttackOutcome& outcome) {
  TrialRecord r;
  r.trial_index = trial;
  r.role = role;
  r.phi_true = phi_true;
  r.phi_est = outcome.eve_phi_est;
  r.circular_error = outcome.eve_circular_error;
  r.state_fidelity = outcome.eve_state_fidelity;
  r.visibility = outcome.bob_post_attack_visibility;
  r.blind_guess = outcome.eve_blind_guess;
  return r;
}

// Fills the one or two slots owned by trial t. Each trial consumes only
// its keyed substream, so trials are order-independent.
void run_one_trial(const ScenarioConfig& cfg, long t, TrialRecord* slot_bob,
                   TrialRecord* slot_eve) {
  Rng rng = Rng::keyed(cfg.master_seed, static_cast<std::uint64_t>(t));
  const int symbol = static_cast<int>(rng.below(cfg.session.alphabet.size()));
  const double phi = cfg.session.alphabet.phase(symbol);

  switch (cfg.attack.kind) {
    case AttackKind::None: {
      const DensityMatrix rho = transmit(phi, cfg.session);
      *slot_bob = bob_record(t, observe_symbol(rho, symbol, phi, cfg.session, rng));
      return;
    }
    case AttackKind::PassiveTap: {
      const AttackOutcome out =
          passive_tap_trial(phi, cfg.session, cfg.session.pairs_per_symbol, rng);
      *slot_bob = bob_record(t, out.bob);
      *slot_eve = eve_record(t, Role::EveClassical, phi, out);
      return;
    }
    case AttackKind::InterceptResend: {
      const AttackOutcome out = intercept_resend_trial(
          phi, cfg.session, cfg.attack.basis_policy, cfg.session.pairs_per_symbol, rng);
      *slot_bob = bob_record(t, out.bob);
      *slot_eve = eve_record(t, Role::EveInterceptResend, phi, out);
      return;
    }
    case AttackKind::UniversalClone: {
      const AttackOutcome out =
          clone_attack_trial(phi, cfg.session, cfg.session.pairs_per_symbol, rng);
      *slot_bob = bob_record(t, out.bob);
      *slot_eve = eve_record(t, Role::EveQuantum, phi, out);
      return;
    }
  }
}

RoleReport aggregate_role(const std::vector<TrialRecord>& records, Role role,
                          const ScenarioConfig& cfg) {
  std::vector<double> fidelities, visibilities;
  std::vector<std::vector<double>> hits(cfg.window_deltas.size());
  for (const TrialRecord& r : records) {
    if (r.role != role) continue;
    fidelities.push_back(r.state_fidelity);
    visibilities.push_back(r.visibility);
    const bool flagged = r.no_signal || r.empty_batch;
    for (std::size_t w = 0; w < cfg.window_deltas.size(); ++w) {
      hits[w].push_back(!flagged && r.circular_error <= cfg.window_deltas[w] ? 1.0
                                                                             : 0.0);
    }
  }

  RoleReport rep;
  rep.role = role;
  const int windows =
      std::min<long>(cfg.windows_for_sigma, static_cast<long>(fidelities.size()));
  for (std::size_t w = 0; w < cfg.window_deltas.size(); ++w) {
    auto [mean, sigma] = windowed_sigma(hits[w], windows);
    rep.accuracy.push_back(WindowAccuracy{cfg.window_deltas[w], mean, sigma});
  }
  auto [fm, fs] = windowed_sigma(fidelities, windows);
  rep.fidelity = MetricStat{fm, fs};
  auto [vm, vs] = windowed_sigma(visibilities, windows);
  rep.visibility = MetricStat{vm, vs};
  return rep;
}

}  // namespace

std::string role_name(Role role) {
  switch (role) {
    case Role::Bob: return "Bob";
    case Role::EveClassical: return "EveClassical";
    case Role::EveQuantum: return "EveQuantum";
    case Role::EveInterceptResend: return "EveInterceptResend";
  }
  throw std::logic_error("unreachable");
}

Role attack_eve_role(AttackKind kind) {
  switch (kind) {
    case AttackKind::PassiveTap: return Role::EveClassical;
    case AttackKind::UniversalClone: return Role::EveQuantum;
    case AttackKind::InterceptResend: return Role::EveInterceptResend;
    case AttackKind::None: break;
  }
  throw std::invalid_argument("attack_eve_role: no attacker configured");
}

void ScenarioConfig::validate() const {
  session.validate();
  if (trials < 1) {
    throw ConfigError("trials must be >= 1, got " + std::to_string(trials));
  }
  if (fringe_points < 8) {
    throw ConfigError("fringe_points must be >= 8, got " +
                      std::to_string(fringe_points));
  }
  if (windows_for_sigma < 1) {
    throw ConfigError("windows_for_sigma must be >= 1, got " +
                      std::to_string(windows_for_sigma));
  }
  if (window_deltas.empty()) {
    throw ConfigError("window_deltas must be nonempty");
  }
  for (double d : window_deltas) {
    if (!(d > 0.0 && d <= kPi)) {
      throw ConfigError("window_deltas entries must lie in (0, pi], got " +
                        std::to_string(d));
    }
  }
  if (workers < 0) {
    throw ConfigError("workers must be >= 0, got " + std::to_string(workers));
  }
}

std::vector<TrialRecord> run_trials_serial(const ScenarioConfig& cfg) {
  const bool with_eve = cfg.attack.kind != AttackKind::None;
  const long stride = with_eve ? 2 : 1;
  std::vector<TrialRecord> records(cfg.trials * stride);
  for (long t = 0; t < cfg.trials; ++t) {
    run_one_trial(cfg, t, &records[t * stride],
                  with_eve ? &records[t * stride + 1] : nullptr);
  }
  return records;
}

std::vector<TrialRecord> run_trials_parallel(const ScenarioConfig& cfg, int workers) {
  const bool with_eve = cfg.attack.kind != AttackKind::None;
  const long stride = with_eve ? 2 : 1;
  std::vector<TrialRecord> records(cfg.trials * stride);
#ifdef _OPENMP
  if (workers > 0) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers)
    for (long t = 0; t < cfg.trials; ++t) {
      run_one_trial(cfg, t, &records[t * stride],
                    with_eve ? &records[t * stride + 1] : nullptr);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (long t = 0; t < cfg.trials; ++t) {
      run_one_trial(cfg, t, &records[t * stride],
                    with_eve ? &records[t * stride + 1] : nullptr);
    }
  }
#else
  (void)workers;
  for (long t = 0; t < cfg.trials; ++t) {
    run_one_trial(cfg, t, &records[t * stride],
                  with_eve ? &records[t * stride + 1] : nullptr);
  }
#endif
  return records;
}

CampaignReport run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();

  CampaignReport report;
  report.config = cfg;
  report.master_seed = cfg.master_seed;
  report.trial_records = cfg.workers == 1 ? run_trials_serial(cfg)
                                          : run_trials_parallel(cfg, cfg.workers);

  // Analytic figures of the configured channel chain; no Monte Carlo here.
  report.negativity = negativity(transmit(cfg.session.alphabet.phase(0), cfg.session));
  report.holevo_bits =
      cfg.attack.kind == AttackKind::None
          ? 0.0
          : holevo_information(eve_symbol_ensemble(cfg.attack.kind, cfg.session));

  report.roles.push_back(aggregate_role(report.trial_records, Role::Bob, cfg));
  if (cfg.attack.kind != AttackKind::None) {
    report.roles.push_back(
        aggregate_role(report.trial_records, attack_eve_role(cfg.attack.kind), cfg));
  }
  return report;
}

double records_accuracy_at(std::span<const TrialRecord> records, Role role,
                           double delta) {
  long total = 0, hits = 0;
  for (const TrialRecord& r : records) {
    if (r.role != role) continue;
    ++total;
    if (!r.no_signal && !r.empty_batch && r.circular_error <= delta) ++hits;
  }
  if (total == 0) return 0.0;
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::pair<double, double> windowed_sigma(std::span<const double> values, int windows) {
  if (windows < 1) throw std::invalid_argument("windowed_sigma: windows must be >= 1");
  const long n = static_cast<long>(values.size());
  if (n < windows) {
    throw std::invalid_argument("windowed_sigma: fewer records than windows");
  }

  double grand_sum = 0.0;
  for (double v : values) grand_sum += v;
  const double grand_mean = grand_sum / static_cast<double>(n);

  if (windows == 1) return {grand_mean, kNan};

  const long block = n / windows;
  std::vector<double> block_means(windows, 0.0);
  for (int w = 0; w < windows; ++w) {
    const long begin = w * block;
    const long end = w == windows - 1 ? n : begin + block;  // remainder to last
    double sum = 0.0;
    for (long i = begin; i < end; ++i) sum += values[i];
    block_means[w] = sum / static_cast<double>(end - begin);
  }
  double mean_of_means = 0.0;
  for (double m : block_means) mean_of_means += m;
  mean_of_means /= windows;
  double ss = 0.0;
  for (double m : block_means) ss += (m - mean_of_means) * (m - mean_of_means);
  return {grand_mean, std::sqrt(ss / (windows - 1))};
}

double visibility_from_fringes(const ScenarioConfig& cfg, int samples_per_point,
                               Rng& rng) {
  cfg.validate();
  if (samples_per_point < 100) {
    throw std::invalid_argument("visibility_from_fringes: samples_per_point < 100");
  }

  const double phi = 0.0;
  const DensityMatrix rho = transmit(phi, cfg.session);
  const MeasurementBasis alice = MeasurementBasis::x();

  // States routed through the configured attack, per sample where needed.
  DensityMatrix swept = rho;
  if (cfg.attack.kind == AttackKind::UniversalClone) {
    swept = apply_channel(rho, depolarizing(1.0 / 3.0), ChannelTarget::B);
  }

  double fringe_max = -1.0, fringe_min = 2.0;
  bool any_signal = false;
  for (int j = 0; j < cfg.fringe_points; ++j) {
    const double theta = 2.0 * kPi * j / cfg.fringe_points;
    double sum = 0.0;
    long kept = 0;

    if (cfg.attack.kind == AttackKind::InterceptResend) {
      InterceptedPairSampler sampler(rho, cfg.attack.basis_policy, rng);
      for (int i = 0; i < samples_per_point; ++i) {
        const auto s = sampler.sample(theta, rng);
        const auto da = apply_dark_count(s.alice, cfg.session.detector, rng);
        const auto db = apply_dark_count(s.bob, cfg.session.detector, rng);
        if (!da || !db) continue;
        sum += *da * *db;
        ++kept;
      }
    } else {
      const PairOutcomeDistribution dist = PairOutcomeDistribution::from_state(
          swept, alice, MeasurementBasis::equatorial(theta));
      for (int i = 0; i < samples_per_point; ++i) {
        auto [a, b] = dist.sample(rng);
        const auto da = apply_dark_count(a, cfg.session.detector, rng);
        const auto db = apply_dark_count(b, cfg.session.detector, rng);
        if (!da || !db) continue;
        sum += *da * *db;
        ++kept;
      }
    }

    if (kept == 0) continue;
    any_signal = true;
    const double fringe = 0.5 * (1.0 + sum / static_cast<double>(kept));
    fringe_max = std::max(fringe_max, fringe);
    fringe_min = std::min(fringe_min, fringe);
  }

  if (!any_signal || fringe_max + fringe_min <= 0.0) {
    throw NoSignalError("visibility_from_fringes: fringe carries no signal");
  }
  return (fringe_max - fringe_min) / (fringe_max + fringe_min);
}

}  // namespace phaselink
