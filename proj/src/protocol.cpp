#include "phaselink/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "phaselink/errors.hpp"

namespace phaselink {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double wrap_angle(double radians) {
  double w = std::fmod(radians, kTwoPi);
  if (w > kPi) w -= kTwoPi;
  if (w <= -kPi) w += kTwoPi;
  return w;
}

double circular_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a - b));
  return std::min(d, kPi);
}

PhaseAlphabet::PhaseAlphabet(int size_m) {
  if (size_m < 2) {
    throw std::invalid_argument("PhaseAlphabet: size must be >= 2, got " +
                                std::to_string(size_m));
  }
  phases_.resize(size_m);
  for (int k = 0; k < size_m; ++k) phases_[k] = kTwoPi * k / size_m;
}

double PhaseAlphabet::phase(int k) const {
  if (k < 0 || k >= size()) {
    throw std::invalid_argument("PhaseAlphabet: symbol index " + std::to_string(k) +
                                " out of range [0," + std::to_string(size()) + ")");
  }
  return phases_[k];
}

void SessionConfig::validate() const {
  if (pairs_per_symbol < 2 || pairs_per_symbol % 2 != 0) {
    throw ConfigError("pairs_per_symbol must be an even integer >= 2, got " +
                      std::to_string(pairs_per_symbol));
  }
  noise.validate();
  detector.validate();
  shield.validate();
}

double Correlators::magnitude() const { return std::hypot(e_xx, e_xy); }

double encode_symbol(int k, const PhaseAlphabet& alphabet) {
  return alphabet.phase(k);
}

DensityMatrix transmit(double phi, const SessionConfig& cfg) {
  DensityMatrix rho = source_state(phi, cfg.noise.source_visibility);
  if (cfg.noise.shield_dephasing_q > 0.0) {
    rho = apply_channel(rho, dephasing(cfg.noise.shield_dephasing_q), ChannelTarget::A);
  }
  if (cfg.noise.depolarizing_p > 0.0) {
    rho = apply_channel(rho, depolarizing(cfg.noise.depolarizing_p), ChannelTarget::B);
  }
  return rho;
}

Correlators bob_measure_batch(const DensityMatrix& state, int n_pairs,
                              const DetectorSpec& det, Rng& rng,
                              double frame_offset) {
  if (n_pairs < 2 || n_pairs % 2 != 0) {
    throw std::invalid_argument("bob_measure_batch: n_pairs must be even and >= 2");
  }
  const MeasurementBasis alice = MeasurementBasis::equatorial(frame_offset);
  const MeasurementBasis bob_x = MeasurementBasis::equatorial(frame_offset);
  const MeasurementBasis bob_y = MeasurementBasis::equatorial(frame_offset + kPi / 2);
  const PairOutcomeDistribution dist_xx =
      PairOutcomeDistribution::from_state(state, alice, bob_x);
  const PairOutcomeDistribution dist_xy =
      PairOutcomeDistribution::from_state(state, alice, bob_y);

  Correlators c;
  double sum_xx = 0.0, sum_xy = 0.0;
  const int half = n_pairs / 2;
  for (int setting = 0; setting < 2; ++setting) {
    const PairOutcomeDistribution& dist = setting == 0 ? dist_xx : dist_xy;
    for (int i = 0; i < half; ++i) {
      auto [a, b] = dist.sample(rng);
      const auto da = apply_dark_count(a, det, rng);
      const auto db = apply_dark_count(b, det, rng);
      if (!da || !db) continue;  // no-detection pair
      if (setting == 0) {
        sum_xx += *da * *db;
        ++c.n_xx;
      } else {
        sum_xy += *da * *db;
        ++c.n_xy;
      }
    }
  }
  if (c.n_xx == 0 || c.n_xy == 0) {
    throw EmptyBatchError("bob_measure_batch: all pairs discarded in a setting");
  }
  c.e_xx = sum_xx / c.n_xx;
  c.e_xy = sum_xy / c.n_xy;
  return c;
}

double estimate_phase(const Correlators& c) {
  if (std::fabs(c.e_xx) < 1e-9 && std::fabs(c.e_xy) < 1e-9) {
    throw NoSignalError("estimate_phase: both correlators below 1e-9");
  }
  double phi = std::atan2(c.e_xy, c.e_xx);
  if (phi < 0) phi += kTwoPi;
  return phi;
}

bool has_signal(const Correlators& c) {
  const long n = std::min(c.n_xx, c.n_xy);
  if (n <= 0) return false;
  const double gate = std::min(0.5, 5.0 / std::sqrt(static_cast<double>(n)));
  return c.magnitude() >= gate;
}

int decode_symbol(double phi_est, const PhaseAlphabet& alphabet) {
  int best = 0;
  double best_dist = circular_distance(phi_est, alphabet.phase(0));
  for (int k = 1; k < alphabet.size(); ++k) {
    const double d = circular_distance(phi_est, alphabet.phase(k));
    if (d < best_dist) {
      best = k;
      best_dist = d;
    }
  }
  return best;
}

double SessionResult::accuracy_at(double delta) const {
  if (records.empty()) return 0.0;
  long hits = 0;
  for (const SymbolRecord& r : records) {
    if (!r.no_signal && !r.empty_batch && r.circular_error <= delta) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double SessionResult::symbol_accuracy() const {
  if (records.empty()) return 0.0;
  long hits = 0;
  for (const SymbolRecord& r : records) {
    if (r.decoded == r.symbol) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

SymbolRecord record_from_correlators(int symbol, double phi_true,
                                     const Correlators& c,
                                     const PhaseAlphabet& alphabet) {
  SymbolRecord rec;
  rec.symbol = symbol;
  rec.phi_true = phi_true;
  rec.visibility = c.magnitude();
  if (!has_signal(c)) {
    rec.no_signal = true;
    rec.phi_est = kNan;
    rec.circular_error = kNan;
    rec.decoded = -1;
    return rec;
  }
  rec.phi_est = estimate_phase(c);
  rec.circular_error = circular_distance(rec.phi_est, phi_true);
  rec.decoded = decode_symbol(rec.phi_est, alphabet);
  return rec;
}

SymbolRecord observe_symbol(const DensityMatrix& state, int symbol, double phi_true,
                            const SessionConfig& cfg, Rng& rng) {
  SymbolRecord rec;
  try {
    const Correlators c =
        bob_measure_batch(state, cfg.pairs_per_symbol, cfg.detector, rng);
    rec = record_from_correlators(symbol, phi_true, c, cfg.alphabet);
  } catch (const EmptyBatchError&) {
    rec.symbol = symbol;
    rec.phi_true = phi_true;
    rec.empty_batch = true;
    rec.phi_est = kNan;
    rec.circular_error = kNan;
    rec.visibility = kNan;
    rec.decoded = -1;
  }
  const DensityMatrix ideal = DensityMatrix::pure(apply_phase(bell_state(), phi_true));
  rec.fidelity = state_fidelity(state, ideal);
  return rec;
}

SessionResult run_session(const std::vector<int>& message, const SessionConfig& cfg,
                          Rng& rng) {
  if (message.empty()) {
    throw std::invalid_argument("run_session: empty message");
  }
  cfg.validate();

  SessionResult result;
  result.records.reserve(message.size());
  double fidelity_sum = 0.0;

  for (int k : message) {
    const double phi = encode_symbol(k, cfg.alphabet);
    const DensityMatrix rho = transmit(phi, cfg);
    SymbolRecord rec = observe_symbol(rho, k, phi, cfg, rng);
    fidelity_sum += rec.fidelity;
    result.records.push_back(rec);
  }
  result.mean_state_fidelity = fidelity_sum / static_cast<double>(message.size());
  return result;
}

}  // namespace phaselink
