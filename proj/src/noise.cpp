#include "phaselink/noise.hpp"

#include <cmath>
#include <string>

#include "phaselink/errors.hpp"

namespace phaselink {

namespace {

void require_probability(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ConfigError(std::string(field) + " must be in [0,1], got " +
                      std::to_string(v));
  }
}

}  // namespace

void NoiseSpec::validate() const {
  require_probability(depolarizing_p, "depolarizing_p");
  require_probability(shield_dephasing_q, "shield_dephasing_q");
  require_probability(source_visibility, "source_visibility");
}

void DetectorSpec::validate() const {
  require_probability(dark_count_prob, "dark_count_prob");
  require_probability(efficiency, "efficiency");
}

void ShieldSpec::validate() const {
  if (!(attenuation_db >= 0.0)) {
    throw ConfigError("shield_db must be >= 0, got " + std::to_string(attenuation_db));
  }
}

KrausChannel depolarizing(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("depolarizing: p must be in [0,1]");
  }
  std::vector<Mat> ops;
  const double w_id = 1.0 - 0.75 * p;
  const double w_pauli = 0.25 * p;
  if (w_id > 0.0) ops.push_back(std::sqrt(w_id) * Mat::Identity(2, 2));
  if (w_pauli > 0.0) {
    ops.push_back(std::sqrt(w_pauli) * pauli_x());
    ops.push_back(std::sqrt(w_pauli) * pauli_y());
    ops.push_back(std::sqrt(w_pauli) * pauli_z());
  }
  return KrausChannel::from_operators(std::move(ops));
}

KrausChannel dephasing(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("dephasing: q must be in [0,1]");
  }
  std::vector<Mat> ops;
  if (q < 1.0) ops.push_back(std::sqrt(1.0 - q) * Mat::Identity(2, 2));
  if (q > 0.0) ops.push_back(std::sqrt(q) * pauli_z());
  return KrausChannel::from_operators(std::move(ops));
}

DensityMatrix source_state(double phi, double source_visibility) {
  if (!(source_visibility >= 0.0 && source_visibility <= 1.0)) {
    throw std::invalid_argument("source_state: visibility must be in [0,1]");
  }
  const PureState psi = apply_phase(bell_state(), phi);
  Mat m = source_visibility * (psi.amplitudes() * psi.amplitudes().adjoint()) +
          (1.0 - source_visibility) * 0.25 * Mat::Identity(4, 4);
  return DensityMatrix::from_matrix(std::move(m));
}

DensityMatrix eve_tap_state(const DensityMatrix& rho_flying, const ShieldSpec& shield) {
  if (rho_flying.dim() != 2) {
    throw std::invalid_argument("eve_tap_state: expects a single-qubit state");
  }
  shield.validate();
  const double eta = std::pow(10.0, -shield.attenuation_db / 10.0);
  Mat m = eta * rho_flying.matrix() + (1.0 - eta) * 0.5 * Mat::Identity(2, 2);
  return DensityMatrix::from_matrix(std::move(m));
}

std::optional<int> apply_dark_count(int outcome, const DetectorSpec& det, Rng& rng) {
  if (det.efficiency < 1.0 && !rng.bernoulli(det.efficiency)) {
    return std::nullopt;
  }
  if (det.dark_count_prob > 0.0 && rng.bernoulli(det.dark_count_prob)) {
    return rng.coin();
  }
  return outcome;
}

}  // namespace phaselink
