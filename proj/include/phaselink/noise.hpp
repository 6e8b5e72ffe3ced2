#pragma once

// Constructors for every noise process in the simulated link: channel
// depolarization, source imperfection, shield-side dephasing on the
// legitimate path, the eavesdropper's attenuated tap, and detector dark
// counts / inefficiency.

#include <optional>

#include "phaselink/quantum.hpp"
#include "phaselink/rng.hpp"

namespace phaselink {

/// Channel/source noise parameters. The shield acts on the legitimate
/// path only through the optional dephasing knob; its effect on the
/// adversary is modeled separately by ShieldSpec + eve_tap_state.
struct NoiseSpec {
  double depolarizing_p = 0.01;
  double shield_dephasing_q = 0.0;
  double source_visibility = 1.0;

  void validate() const;
};

struct DetectorSpec {
  double dark_count_prob = 0.03;
  double efficiency = 1.0;

  void validate() const;
};

/// Probe-band suppression the shield presents to an external tap.
struct ShieldSpec {
  double attenuation_db = 45.0;

  void validate() const;
};

/// rho -> (1-p) rho + p I/2, as the Kraus set
/// {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}
/// (zero-weight operators are dropped, so p = 0 is a single identity).
KrausChannel depolarizing(double p);

/// rho -> (1-q) rho + q Z rho Z; off-diagonal coherences scale by (1-2q).
KrausChannel dephasing(double q);

/// Werner-form source with the phase already encoded:
/// v |psi_phi><psi_phi| + (1-v) I/4.
DensityMatrix source_state(double phi, double source_visibility);

/// What a tap behind the shield sees of the flying qubit:
/// eta rho + (1-eta) I/2 with eta = 10^(-attenuation_db/10). The probe
/// signal drowns in an isotropic noise floor as attenuation grows.
DensityMatrix eve_tap_state(const DensityMatrix& rho_flying, const ShieldSpec& shield);

/// Detector model applied to one outcome of one party. Returns nullopt
/// when the detector misses the event entirely (probability
/// 1 - efficiency); otherwise the outcome is replaced by a fair coin with
/// probability dark_count_prob and passed through unchanged otherwise.
/// Pairs with a missing side are discarded upstream.
std::optional<int> apply_dark_count(int outcome, const DetectorSpec& det, Rng& rng);

}  // namespace phaselink
