#pragma once

// Attack models against the link and the information-theoretic bound on
// what any of them can learn: a passive classical tap behind the shield,
// projective intercept-resend, and symmetric universal quantum cloning.
//
// Common to all three: the flying qubit's marginal carries no phase
// information (the phase lives only in the nonlocal coherence), so every
// attacker's measurement record is statistically independent of the
// symbol. An attacker whose correlator vector fails the detection gate
// commits to a blind uniform guess, which is also what sampling her
// (uniform) posterior would produce. Attackers behind the shield share no
// phase reference with the source, so their equatorial measurement frames
// carry an unknown per-trial offset.

#include <utility>
#include <vector>

#include "phaselink/protocol.hpp"

namespace phaselink {

enum class AttackKind { None, PassiveTap, InterceptResend, UniversalClone };
enum class BasisPolicy { FixedX, FixedZ, RandomEquatorial };

struct AttackStrategy {
  AttackKind kind = AttackKind::None;
  BasisPolicy basis_policy = BasisPolicy::RandomEquatorial;  // InterceptResend only
};

/// Per-trial outcome of one attack attempt against one transmitted symbol.
struct AttackOutcome {
  double eve_phi_est = 0.0;
  double eve_circular_error = 0.0;
  bool eve_blind_guess = false;      // committed a uniform guess (no usable signal)
  double eve_state_fidelity = 0.0;   // her reconstruction vs the reference state
  double bob_post_attack_visibility = 0.0;
  double holevo_bits = 0.0;          // bound on her per-symbol information
  SymbolRecord bob;                  // the receiver's record for the same trial

  double eve_accuracy_at(double delta) const {
    return eve_circular_error <= delta ? 1.0 : 0.0;
  }
};

/// Eve measures the shield-attenuated marginal of the flying qubit, half
/// her samples on each of two orthogonal equatorial axes in her own frame,
/// reconstructs the single-qubit state tomographically, and estimates the
/// phase. The legitimate channel is untouched.
AttackOutcome passive_tap_trial(double phi, const SessionConfig& cfg, int n_samples,
                                Rng& rng);

/// Eve projectively measures each flying qubit per `policy`, records her
/// outcome, and resends the post-measurement state; Bob proceeds normally.
AttackOutcome intercept_resend_trial(double phi, const SessionConfig& cfg,
                                     BasisPolicy policy, int n_pairs, Rng& rng);

/// Symmetric universal 1->2 cloner: both clones equal
/// (2/3) rho + (1/6) I, so a pure input yields clone fidelity exactly 5/6.
std::pair<DensityMatrix, DensityMatrix> uqcm_clone(const DensityMatrix& rho_in);

/// Eve clones each flying qubit, forwards one clone to Bob (whose qubit
/// thereby passes the cloner's induced depolarizing marginal channel) and
/// measures the other; her reconstruction is a locally fabricated pair
/// carrying her best phase guess, scored against the ideal encoded pair.
AttackOutcome clone_attack_trial(double phi, const SessionConfig& cfg, int n_samples,
                                 Rng& rng);

/// Holevo bound chi = S(sum P_k rho_k) - sum P_k S(rho_k), in bits.
/// Throws std::invalid_argument unless probabilities sum to 1 within 1e-9
/// and all states share one dimension.
double holevo_information(
    const std::vector<std::pair<double, DensityMatrix>>& ensemble);

/// The attacker's pre-measurement state when symbol phase phi was sent.
DensityMatrix eve_pre_measurement_state(AttackKind kind, const SessionConfig& cfg,
                                        double phi);

/// The uniform symbol ensemble of attacker states for a configuration;
/// feeding it to holevo_information bounds the attacker's per-symbol
/// information.
std::vector<std::pair<double, DensityMatrix>> eve_symbol_ensemble(
    AttackKind kind, const SessionConfig& cfg);

/// Plug-in mutual information of a joint histogram, in bits, with the
/// Miller-Madow bias correction applied to each entropy term.
double empirical_mutual_information_bits(
    const std::vector<std::vector<long>>& joint_counts);

/// One intercepted-and-resent pair at a time: Eve projects the flying
/// qubit per her policy, Bob then measures Alice's qubit in X and the
/// resent qubit on an equatorial axis of his choosing. Exact sequential
/// Born sampling driven by the Pauli decomposition of the prepared state;
/// shared by the attack trials and the fringe sweep.
class InterceptedPairSampler {
 public:
  struct PairSample {
    int alice = 0;   // Alice-side outcome
    int bob = 0;     // Bob-side outcome on the resent qubit
    int eve = 0;     // Eve's interception outcome
    double axis_x = 0.0, axis_y = 0.0;  // equatorial part of her axis
  };

  /// FixedX draws the attacker's (unsynchronized) equatorial frame once.
  InterceptedPairSampler(const DensityMatrix& rho, BasisPolicy policy, Rng& rng);

  PairSample sample(double bob_axis_angle, Rng& rng);

  /// The state Bob effectively receives, averaged over the attacker's
  /// axis and outcome distribution.
  DensityMatrix averaged_forwarded_state(const DensityMatrix& rho) const;

 private:
  BlochDecomposition bloch_;
  BasisPolicy policy_;
  double frame_ = 0.0;
};

}  // namespace phaselink
