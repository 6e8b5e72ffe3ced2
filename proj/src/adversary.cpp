#include "phaselink/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "phaselink/errors.hpp"

namespace phaselink {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

struct EveEstimate {
  double phi_est = 0.0;
  bool blind = false;
};

// Commits the attacker to a phase guess from her equatorial-projected
// outcome sums. Below the detection gate (or with no equatorial data at
// all) her posterior over the phase is uniform, so she draws blindly.
EveEstimate commit_phase_guess(double sx, double sy, long n_samples, Rng& rng) {
  if (n_samples > 0) {
    const double mag = std::hypot(sx, sy) / static_cast<double>(n_samples);
    const double gate = std::min(0.5, 5.0 / std::sqrt(static_cast<double>(n_samples)));
    if (mag >= gate) {
      double phi = std::atan2(sy, sx);
      if (phi < 0) phi += kTwoPi;
      return {phi, false};
    }
  }
  return {rng.uniform_angle(), true};
}

// Fidelity of the attacker's fabricated pure pair, carrying her phase
// guess, against the ideal encoded pair.
double fabricated_pair_fidelity(double phi_true, double phi_guess) {
  const DensityMatrix fabricated =
      DensityMatrix::pure(apply_phase(bell_state(), phi_guess));
  const DensityMatrix ideal = DensityMatrix::pure(apply_phase(bell_state(), phi_true));
  return state_fidelity(fabricated, ideal);
}

struct QubitEquatorialSampler {
  double bx = 0.0;
  double by = 0.0;

  explicit QubitEquatorialSampler(const DensityMatrix& rho)
      : bx((pauli_x() * rho.matrix()).trace().real()),
        by((pauli_y() * rho.matrix()).trace().real()) {}

  int sample(double angle, Rng& rng) const {
    const double p_plus =
        std::clamp(0.5 * (1.0 + bx * std::cos(angle) + by * std::sin(angle)), 0.0, 1.0);
    return rng.uniform() < p_plus ? +1 : -1;
  }
};

// Tomographic estimate + phase guess from two-axis equatorial sampling of
// a fixed single-qubit state, in the attacker's own (offset) frame.
struct EveTomography {
  EveEstimate estimate;
  DensityMatrix reconstruction = DensityMatrix::maximally_mixed(2);
};

EveTomography equatorial_tomography(const DensityMatrix& eve_state, int n_samples,
                                    Rng& rng) {
  const QubitEquatorialSampler sampler(eve_state);
  const double omega = rng.uniform_angle();  // no shared phase reference
  const double angles[2] = {omega, omega + kPi / 2};
  const int half = std::max(1, n_samples / 2);

  double sx = 0.0, sy = 0.0;
  double axis_mean[2] = {0.0, 0.0};
  for (int axis = 0; axis < 2; ++axis) {
    long sum = 0;
    for (int i = 0; i < half; ++i) {
      const int e = sampler.sample(angles[axis], rng);
      sum += e;
      sx += e * std::cos(angles[axis]);
      sy += e * std::sin(angles[axis]);
    }
    axis_mean[axis] = static_cast<double>(sum) / half;
  }

  EveTomography out;
  out.estimate = commit_phase_guess(sx, sy, 2L * half, rng);

  double rx = axis_mean[0] * std::cos(angles[0]) + axis_mean[1] * std::cos(angles[1]);
  double ry = axis_mean[0] * std::sin(angles[0]) + axis_mean[1] * std::sin(angles[1]);
  const double norm = std::hypot(rx, ry);
  if (norm > 1.0) {
    rx /= norm;
    ry /= norm;
  }
  Mat m = 0.5 * (Mat::Identity(2, 2) + rx * pauli_x() + ry * pauli_y());
  out.reconstruction = DensityMatrix::from_matrix(std::move(m));
  return out;
}

// Average state Bob receives once the attacker's measure-and-resend map,
// expressed as a linear map on the flying qubit's Bloch components, is
// traced over her outcomes.
DensityMatrix averaged_post_attack_state(const DensityMatrix& rho,
                                         const double bloch_map[3][3]) {
  const BlochDecomposition d = BlochDecomposition::from_state(rho);
  double s2[3] = {0, 0, 0};
  double t2[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      s2[j] += bloch_map[j][k] * d.r_b[k];
      for (int i = 0; i < 3; ++i) t2[i][j] += d.t[i][k] * bloch_map[j][k];
    }
  }
  const Mat paulis[3] = {pauli_x(), pauli_y(), pauli_z()};
  const Mat eye = Mat::Identity(2, 2);
  Mat m = kron(eye, eye);
  for (int i = 0; i < 3; ++i) {
    m += d.r_a[i] * kron(paulis[i], eye);
    m += s2[i] * kron(eye, paulis[i]);
    for (int j = 0; j < 3; ++j) m += t2[i][j] * kron(paulis[i], paulis[j]);
  }
  return DensityMatrix::from_matrix(0.25 * m);
}

double reference_fidelity(const DensityMatrix& state, double phi_true) {
  return state_fidelity(state,
                        DensityMatrix::pure(apply_phase(bell_state(), phi_true)));
}

}  // namespace

AttackOutcome passive_tap_trial(double phi, const SessionConfig& cfg, int n_samples,
                                Rng& rng) {
  cfg.validate();
  if (n_samples < 2) {
    throw std::invalid_argument("passive_tap_trial: n_samples must be >= 2");
  }

  const DensityMatrix rho = transmit(phi, cfg);
  AttackOutcome out;
  out.bob = observe_symbol(rho, decode_symbol(phi, cfg.alphabet), phi, cfg, rng);
  out.bob_post_attack_visibility = out.bob.visibility;

  const DensityMatrix flying = partial_trace(rho, Subsystem::B);
  const DensityMatrix tapped = eve_tap_state(flying, cfg.shield);
  const EveTomography tomo = equatorial_tomography(tapped, n_samples, rng);
  out.eve_phi_est = tomo.estimate.phi_est;
  out.eve_blind_guess = tomo.estimate.blind;
  out.eve_circular_error = circular_distance(out.eve_phi_est, phi);
  out.eve_state_fidelity = state_fidelity(tomo.reconstruction, flying);
  out.holevo_bits = holevo_information(eve_symbol_ensemble(AttackKind::PassiveTap, cfg));
  return out;
}

InterceptedPairSampler::InterceptedPairSampler(const DensityMatrix& rho,
                                               BasisPolicy policy, Rng& rng)
    : bloch_(BlochDecomposition::from_state(rho)), policy_(policy) {
  // Her equatorial frame is unsynchronized with the source; Z needs no
  // frame (the computational axis is shared).
  if (policy_ == BasisPolicy::FixedX) frame_ = rng.uniform_angle();
}

InterceptedPairSampler::PairSample InterceptedPairSampler::sample(
    double bob_axis_angle, Rng& rng) {
  double n_axis[3] = {0.0, 0.0, 0.0};
  switch (policy_) {
    case BasisPolicy::FixedX:
      n_axis[0] = std::cos(frame_);
      n_axis[1] = std::sin(frame_);
      n_axis[2] = 0.0;
      break;
    case BasisPolicy::FixedZ:
      n_axis[0] = 0.0;
      n_axis[1] = 0.0;
      n_axis[2] = 1.0;
      break;
    case BasisPolicy::RandomEquatorial: {
      const double theta = rng.uniform_angle();
      n_axis[0] = std::cos(theta);
      n_axis[1] = std::sin(theta);
      n_axis[2] = 0.0;
      break;
    }
  }

  PairSample s;
  s.axis_x = n_axis[0];
  s.axis_y = n_axis[1];

  const auto& d = bloch_;
  const double sn =
      d.r_b[0] * n_axis[0] + d.r_b[1] * n_axis[1] + d.r_b[2] * n_axis[2];
  const double p_e = std::clamp(0.5 * (1.0 + sn), 0.0, 1.0);
  s.eve = rng.uniform() < p_e ? +1 : -1;

  // Alice-side outcome conditioned on the interception result.
  const double t_an =
      d.t[0][0] * n_axis[0] + d.t[0][1] * n_axis[1] + d.t[0][2] * n_axis[2];
  const double joint_plus = 0.25 * (1.0 + d.r_a[0] + s.eve * sn + s.eve * t_an);
  const double denom = 0.5 * (1.0 + s.eve * sn);
  const double q = denom > 0.0 ? std::clamp(joint_plus / denom, 0.0, 1.0) : 0.5;
  s.alice = rng.uniform() < q ? +1 : -1;

  // Bob re-measures the resent pure state with Bloch vector eve * n_axis.
  const double proj = n_axis[0] * std::cos(bob_axis_angle) +
                      n_axis[1] * std::sin(bob_axis_angle);
  const double p_b = std::clamp(0.5 * (1.0 + s.eve * proj), 0.0, 1.0);
  s.bob = rng.uniform() < p_b ? +1 : -1;
  return s;
}

DensityMatrix InterceptedPairSampler::averaged_forwarded_state(
    const DensityMatrix& rho) const {
  // The interception projects the flying qubit's Bloch vector onto her
  // measurement axis, averaged over the axis distribution.
  double bloch_map[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  switch (policy_) {
    case BasisPolicy::FixedX: {
      const double nx = std::cos(frame_), ny = std::sin(frame_);
      bloch_map[0][0] = nx * nx;
      bloch_map[0][1] = bloch_map[1][0] = nx * ny;
      bloch_map[1][1] = ny * ny;
      break;
    }
    case BasisPolicy::FixedZ:
      bloch_map[2][2] = 1.0;
      break;
    case BasisPolicy::RandomEquatorial:
      bloch_map[0][0] = bloch_map[1][1] = 0.5;
      break;
  }
  return averaged_post_attack_state(rho, bloch_map);
}

AttackOutcome intercept_resend_trial(double phi, const SessionConfig& cfg,
                                     BasisPolicy policy, int n_pairs, Rng& rng) {
  cfg.validate();
  if (n_pairs < 2 || n_pairs % 2 != 0) {
    throw std::invalid_argument("intercept_resend_trial: n_pairs must be even, >= 2");
  }

  const DensityMatrix rho = transmit(phi, cfg);
  InterceptedPairSampler sampler(rho, policy, rng);

  double sum_xx = 0.0, sum_xy = 0.0;
  long n_xx = 0, n_xy = 0;
  double eve_sx = 0.0, eve_sy = 0.0;
  long eve_n = 0;
  const int half = n_pairs / 2;

  for (int i = 0; i < n_pairs; ++i) {
    const bool setting_xy = i >= half;  // Bob's B axis: x-hat then y-hat
    const auto s = sampler.sample(setting_xy ? kPi / 2 : 0.0, rng);
    if (policy != BasisPolicy::FixedZ) {
      eve_sx += s.eve * s.axis_x;
      eve_sy += s.eve * s.axis_y;
      ++eve_n;
    }
    const auto da = apply_dark_count(s.alice, cfg.detector, rng);
    const auto db = apply_dark_count(s.bob, cfg.detector, rng);
    if (!da || !db) continue;
    if (setting_xy) {
      sum_xy += *da * *db;
      ++n_xy;
    } else {
      sum_xx += *da * *db;
      ++n_xx;
    }
  }

  AttackOutcome out;
  const int symbol = decode_symbol(phi, cfg.alphabet);
  if (n_xx == 0 || n_xy == 0) {
    out.bob.symbol = symbol;
    out.bob.phi_true = phi;
    out.bob.empty_batch = true;
    out.bob.phi_est = std::numeric_limits<double>::quiet_NaN();
    out.bob.circular_error = std::numeric_limits<double>::quiet_NaN();
    out.bob.visibility = std::numeric_limits<double>::quiet_NaN();
    out.bob.decoded = -1;
  } else {
    Correlators c;
    c.e_xx = sum_xx / n_xx;
    c.e_xy = sum_xy / n_xy;
    c.n_xx = n_xx;
    c.n_xy = n_xy;
    out.bob = record_from_correlators(symbol, phi, c, cfg.alphabet);
  }
  out.bob.fidelity = reference_fidelity(sampler.averaged_forwarded_state(rho), phi);
  out.bob_post_attack_visibility = out.bob.visibility;

  const EveEstimate est = commit_phase_guess(eve_sx, eve_sy, eve_n, rng);
  out.eve_phi_est = est.phi_est;
  out.eve_blind_guess = est.blind;
  out.eve_circular_error = circular_distance(est.phi_est, phi);
  out.eve_state_fidelity = fabricated_pair_fidelity(phi, est.phi_est);
  out.holevo_bits =
      holevo_information(eve_symbol_ensemble(AttackKind::InterceptResend, cfg));
  return out;
}

std::pair<DensityMatrix, DensityMatrix> uqcm_clone(const DensityMatrix& rho_in) {
  if (rho_in.dim() != 2) {
    throw std::invalid_argument("uqcm_clone: expects a single-qubit state");
  }
  Mat clone = (2.0 / 3.0) * rho_in.matrix() + (1.0 / 6.0) * Mat::Identity(2, 2);
  return {DensityMatrix::from_matrix(clone), DensityMatrix::from_matrix(clone)};
}

AttackOutcome clone_attack_trial(double phi, const SessionConfig& cfg, int n_samples,
                                 Rng& rng) {
  cfg.validate();
  if (n_samples < 2) {
    throw std::invalid_argument("clone_attack_trial: n_samples must be >= 2");
  }

  const DensityMatrix rho = transmit(phi, cfg);
  // Forwarding one clone of the flying qubit is, on Bob's side, the
  // cloner's induced marginal channel: depolarizing with Bloch shrink 2/3.
  const DensityMatrix bob_state = apply_channel(rho, depolarizing(1.0 / 3.0),
                                                ChannelTarget::B);
  AttackOutcome out;
  out.bob = observe_symbol(bob_state, decode_symbol(phi, cfg.alphabet), phi, cfg, rng);
  out.bob_post_attack_visibility = out.bob.visibility;

  const DensityMatrix flying = partial_trace(rho, Subsystem::B);
  const DensityMatrix eve_clone = uqcm_clone(flying).second;
  const EveTomography tomo = equatorial_tomography(eve_clone, n_samples, rng);
  out.eve_phi_est = tomo.estimate.phi_est;
  out.eve_blind_guess = tomo.estimate.blind;
  out.eve_circular_error = circular_distance(out.eve_phi_est, phi);
  out.eve_state_fidelity = fabricated_pair_fidelity(phi, out.eve_phi_est);
  out.holevo_bits =
      holevo_information(eve_symbol_ensemble(AttackKind::UniversalClone, cfg));
  return out;
}

double holevo_information(
    const std::vector<std::pair<double, DensityMatrix>>& ensemble) {
  if (ensemble.empty()) return 0.0;
  double total_p = 0.0;
  const int dim = ensemble.front().second.dim();
  for (const auto& [p, rho] : ensemble) {
    if (p < 0.0) throw std::invalid_argument("holevo_information: negative probability");
    if (rho.dim() != dim) {
      throw std::invalid_argument("holevo_information: mixed state dimensions");
    }
    total_p += p;
  }
  if (std::fabs(total_p - 1.0) > 1e-9) {
    throw std::invalid_argument("holevo_information: probabilities sum to " +
                                std::to_string(total_p));
  }
  Mat avg = Mat::Zero(dim, dim);
  double conditional = 0.0;
  for (const auto& [p, rho] : ensemble) {
    avg += p * rho.matrix();
    conditional += p * von_neumann_entropy(rho);
  }
  const double chi = von_neumann_entropy(DensityMatrix::from_matrix(std::move(avg))) -
                     conditional;
  return std::max(0.0, chi);
}

DensityMatrix eve_pre_measurement_state(AttackKind kind, const SessionConfig& cfg,
                                        double phi) {
  const DensityMatrix flying = partial_trace(transmit(phi, cfg), Subsystem::B);
  switch (kind) {
    case AttackKind::PassiveTap:
      return eve_tap_state(flying, cfg.shield);
    case AttackKind::InterceptResend:
      return flying;
    case AttackKind::UniversalClone:
      return uqcm_clone(flying).second;
    case AttackKind::None:
      break;
  }
  throw std::invalid_argument("eve_pre_measurement_state: no attacker configured");
}

std::vector<std::pair<double, DensityMatrix>> eve_symbol_ensemble(
    AttackKind kind, const SessionConfig& cfg) {
  std::vector<std::pair<double, DensityMatrix>> ensemble;
  const int m = cfg.alphabet.size();
  ensemble.reserve(m);
  for (int k = 0; k < m; ++k) {
    ensemble.emplace_back(1.0 / m,
                          eve_pre_measurement_state(kind, cfg, cfg.alphabet.phase(k)));
  }
  return ensemble;
}

double empirical_mutual_information_bits(
    const std::vector<std::vector<long>>& joint_counts) {
  if (joint_counts.empty()) {
    throw std::invalid_argument("empirical_mutual_information_bits: empty table");
  }
  const std::size_t cols = joint_counts.front().size();
  long total = 0;
  std::vector<long> row_sum(joint_counts.size(), 0), col_sum(cols, 0);
  for (std::size_t i = 0; i < joint_counts.size(); ++i) {
    if (joint_counts[i].size() != cols) {
      throw std::invalid_argument("empirical_mutual_information_bits: ragged table");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      const long c = joint_counts[i][j];
      if (c < 0) {
        throw std::invalid_argument("empirical_mutual_information_bits: negative count");
      }
      row_sum[i] += c;
      col_sum[j] += c;
      total += c;
    }
  }
  if (total == 0) {
    throw std::invalid_argument("empirical_mutual_information_bits: zero total");
  }

  const double ln2 = std::log(2.0);
  auto plug_in_entropy = [&](auto&& counts, long& support) {
    double h = 0.0;
    support = 0;
    for (long c : counts) {
      if (c == 0) continue;
      ++support;
      const double p = static_cast<double>(c) / total;
      h -= p * std::log2(p);
    }
    return h;
  };

  long kx = 0, ky = 0, kxy = 0;
  const double hx = plug_in_entropy(row_sum, kx);
  const double hy = plug_in_entropy(col_sum, ky);
  std::vector<long> flat;
  flat.reserve(joint_counts.size() * cols);
  for (const auto& row : joint_counts) flat.insert(flat.end(), row.begin(), row.end());
  const double hxy = plug_in_entropy(flat, kxy);

  // Miller-Madow: H_mm = H_plugin + (support - 1) / (2 N ln 2).
  const double n = static_cast<double>(total);
  const double hx_mm = hx + (kx - 1) / (2.0 * n * ln2);
  const double hy_mm = hy + (ky - 1) / (2.0 * n * ln2);
  const double hxy_mm = hxy + (kxy - 1) / (2.0 * n * ln2);
  return hx_mm + hy_mm - hxy_mm;
}

}  // namespace phaselink
