#pragma once

// The two-stage link protocol: message encoding into phase symbols, pair
// preparation and transmission through the noisy shielded channel
// (Stage I), and the receiver's correlation-based phase estimation and
// decoding (Stage II).
//
// The receiver never holds the joint ket, only measurement statistics:
// the estimator is atan2 of the (X(x)Y, X(x)X) correlators, which share
// a positive scale factor, so detector losses cancel out of the angle.

#include <cstdint>
#include <vector>

#include "phaselink/noise.hpp"
#include "phaselink/quantum.hpp"
#include "phaselink/rng.hpp"

namespace phaselink {

/// Wraps an angle to (-pi, pi].
double wrap_angle(double radians);

/// Circular distance between two angles, in [0, pi].
double circular_distance(double a, double b);

/// M uniformly spaced phase symbols phi_k = 2 pi k / M, k = 0..M-1.
class PhaseAlphabet {
 public:
  explicit PhaseAlphabet(int size_m);

  int size() const { return static_cast<int>(phases_.size()); }
  double phase(int k) const;
  const std::vector<double>& phases() const { return phases_; }

 private:
  std::vector<double> phases_;
};

struct SessionConfig {
  PhaseAlphabet alphabet{4};
  int pairs_per_symbol = 10000;  // split evenly across the two basis settings
  NoiseSpec noise;
  DetectorSpec detector;
  ShieldSpec shield;

  void validate() const;
};

/// Empirical correlators from one measurement batch.
struct Correlators {
  double e_xx = 0.0;
  double e_xy = 0.0;
  long n_xx = 0;
  long n_xy = 0;

  double magnitude() const;
};

/// Phase for symbol k; throws std::invalid_argument when k is out of range.
double encode_symbol(int k, const PhaseAlphabet& alphabet);

/// The joint state Bob's apparatus sees: Werner-form source at phi, then
/// shield dephasing on qubit A, then channel depolarization on qubit B.
DensityMatrix transmit(double phi, const SessionConfig& cfg);

/// Measures n_pairs/2 pairs in X(x)X and n_pairs/2 in X(x)Y (both settings
/// optionally rotated by a common equatorial frame_offset), pushes every
/// outcome through the detector model, discards pairs with a missing
/// detection, and returns the empirical correlators.
/// Throws EmptyBatchError when either setting retains no pairs.
Correlators bob_measure_batch(const DensityMatrix& state, int n_pairs,
                              const DetectorSpec& det, Rng& rng,
                              double frame_offset = 0.0);

/// atan2(e_xy, e_xx) mapped to [0, 2 pi). Throws NoSignalError when both
/// correlators are below 1e-9 in magnitude.
double estimate_phase(const Correlators& c);

/// Statistical detection gate used by session-level code: a correlator
/// vector shorter than ~5 standard errors is treated as pure noise.
bool has_signal(const Correlators& c);

/// Nearest symbol under circular distance; ties break toward the lower index.
int decode_symbol(double phi_est, const PhaseAlphabet& alphabet);

struct SymbolRecord {
  int symbol = 0;
  double phi_true = 0.0;
  double phi_est = 0.0;        // NaN when flagged
  double circular_error = 0.0; // NaN when flagged
  int decoded = -1;            // -1 when flagged
  double fidelity = 0.0;       // state fidelity of the transmission to ideal
  double visibility = 0.0;     // measured correlator magnitude (NaN on empty batch)
  bool no_signal = false;      // batch carried no usable phase signal
  bool empty_batch = false;    // every pair discarded
};

/// Applies the detection gate, the estimator, and the decoder to a set of
/// measured correlators, producing a flagged record instead of throwing.
SymbolRecord record_from_correlators(int symbol, double phi_true,
                                     const Correlators& c,
                                     const PhaseAlphabet& alphabet);

/// One full receiver observation of a prepared joint state: batch
/// measurement, estimation, decoding, plus fidelity of `state` to the
/// ideal phase-encoded pair. Shared by benign sessions and the
/// post-attack receiver paths.
SymbolRecord observe_symbol(const DensityMatrix& state, int symbol, double phi_true,
                            const SessionConfig& cfg, Rng& rng);

struct SessionResult {
  std::vector<SymbolRecord> records;
  double mean_state_fidelity = 0.0;

  /// Fraction of symbols with circular error <= delta; flagged symbols
  /// count as misses.
  double accuracy_at(double delta) const;
  /// Fraction of symbols decoded to the transmitted index.
  double symbol_accuracy() const;
};

/// Runs encode -> transmit -> measure -> estimate -> decode for each
/// message symbol. Per-symbol no-signal/empty-batch conditions become
/// flagged records, never exceptions.
SessionResult run_session(const std::vector<int>& message, const SessionConfig& cfg,
                          Rng& rng);

}  // namespace phaselink
