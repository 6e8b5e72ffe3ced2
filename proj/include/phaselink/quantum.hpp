#pragma once

// Exact finite-dimensional quantum mechanics for one- and two-qubit
// systems: pure states, density matrices, Kraus channels, projective
// measurement of entangled pairs, and the information metrics used by
// the protocol and the adversary analyses.
//
// Qubit ordering convention: index 0 is Alice's retained/modulated qubit,
// index 1 is the flying qubit sent to Bob. Two-qubit amplitudes are
// ordered |00>, |01>, |10>, |11>.
//
// Everything here is a pure function of its inputs (measurement sampling
// additionally of an explicit Rng stream); there is no shared mutable
// state, so all operations are safe to call from concurrent workers.

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phaselink/rng.hpp"

namespace phaselink {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kNormTol = 1e-12;   // pure-state normalization
inline constexpr double kHermTol = 1e-12;   // entrywise Hermiticity
inline constexpr double kTraceTol = 1e-12;  // unit trace
inline constexpr double kPsdFloor = -1e-10; // eigenvalue floor for PSD checks
inline constexpr double kCptpTol = 1e-10;   // sum K^dag K = I

Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat kron(const Mat& a, const Mat& b);

/// Normalized pure state of one or two qubits (dim 2 or 4).
class PureState {
 public:
  /// Validates dim in {2,4} and unit norm within kNormTol.
  static PureState from_amplitudes(Vec amplitudes);

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vec& amplitudes() const { return amps_; }
  cxd amplitude(int i) const { return amps_(i); }

 private:
  explicit PureState(Vec a) : amps_(std::move(a)) {}
  Vec amps_;
};

/// Density matrix of one or two qubits: Hermitian, unit trace, positive
/// semidefinite up to the numeric floor. Construction validates all three.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(Mat m);
  static DensityMatrix pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

 private:
  explicit DensityMatrix(Mat m) : m_(std::move(m)) {}
  Mat m_;
};

/// Completely positive trace-preserving map as a list of Kraus operators.
struct KrausChannel {
  std::vector<Mat> operators;
  int input_dim = 2;
  int output_dim = 2;

  /// Validates nonempty operator list and trace preservation within kCptpTol.
  static KrausChannel from_operators(std::vector<Mat> ops);

  /// Max entrywise deviation of sum K^dag K from the identity.
  double trace_preservation_defect() const;
};

/// Single-qubit projective basis. Equatorial(theta) is the basis of
/// (|0> + e^{i theta}|1>)/sqrt2 and its orthogonal complement;
/// Equatorial(0) coincides with X and Equatorial(pi/2) with Y.
class MeasurementBasis {
 public:
  enum class Label { Z, X, Y, Equatorial };

  static MeasurementBasis z() { return MeasurementBasis(Label::Z, 0.0); }
  static MeasurementBasis x() { return MeasurementBasis(Label::X, 0.0); }
  static MeasurementBasis y() { return MeasurementBasis(Label::Y, 0.0); }
  static MeasurementBasis equatorial(double theta);

  Label label() const { return label_; }
  double theta() const { return theta_; }

  /// The +-1-valued observable whose eigenbasis this is (2x2 Hermitian
  /// involution): Z, X, Y, or cos(theta) X + sin(theta) Y.
  Mat observable() const;

 private:
  MeasurementBasis(Label l, double t) : label_(l), theta_(t) {}
  Label label_;
  double theta_;
};

/// (|00> + |11>)/sqrt2.
PureState bell_state();

/// Applies diag(1, e^{i phi}) to the first (Alice's) qubit of a two-qubit
/// state. Throws std::invalid_argument for non-finite phi.
PureState apply_phase(const PureState& state, double phi);

/// arg<reference|state> in (-pi, pi]. When the overlap magnitude is below
/// 1e-12 the angle is genuinely undefined; `defined` is false and the
/// reported 0 radians must not be treated as meaningful.
struct PhaseReading {
  double radians = 0.0;
  bool defined = true;
};
PhaseReading inner_product_arg(const PureState& reference, const PureState& state);

enum class Subsystem { A, B };
enum class ChannelTarget { A, B, Both };

/// Partial trace of a two-qubit density matrix, keeping the named qubit.
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

/// rho' = sum_k K rho K^dag. Single-qubit channels applied to a two-qubit
/// state are lifted by tensoring the identity on the non-target qubit;
/// ChannelTarget::Both applies the channel to A then to B.
DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch,
                            ChannelTarget target);

/// Born-rule joint outcome probabilities for local measurements on a pair,
/// in outcome order (+1,+1), (+1,-1), (-1,+1), (-1,-1). Separating the
/// distribution from the sampling lets batch loops compute it once.
struct PairOutcomeDistribution {
  double p[4] = {0, 0, 0, 0};

  static PairOutcomeDistribution from_state(const DensityMatrix& rho,
                                            const MeasurementBasis& basis_a,
                                            const MeasurementBasis& basis_b);
  std::pair<int, int> sample(Rng& rng) const;
};

/// Samples one joint outcome (outcomeA, outcomeB) by the Born rule.
std::pair<int, int> measure_pair(const DensityMatrix& rho,
                                 const MeasurementBasis& basis_a,
                                 const MeasurementBasis& basis_b, Rng& rng);

/// Samples a single-qubit projective measurement outcome.
int measure_qubit(const DensityMatrix& rho, const MeasurementBasis& basis, Rng& rng);

/// Uhlmann fidelity F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to
/// [0, 1]. Equals |<psi|chi>|^2 when both arguments are pure.
double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// -sum lambda log2 lambda over the spectrum, in bits; 0 log 0 := 0 and
/// eigenvalues in [kPsdFloor, 0) are clamped to 0.
double von_neumann_entropy(const DensityMatrix& rho);

/// Entanglement negativity N = ||rho^{T_B}||_1 - 1 of a two-qubit state
/// (maximally entangled pairs score 1.0); tiny negatives clamp to 0.
double negativity(const DensityMatrix& rho);

/// (1/2) ||rho - sigma||_1.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Pauli decomposition of a two-qubit state: local Bloch vectors and the
/// 3x3 correlation matrix t[i][j] = tr(rho sigma_i (x) sigma_j) with
/// (i, j) running over (X, Y, Z). Drives the scalar fast paths of the
/// attack inner loops.
struct BlochDecomposition {
  double r_a[3] = {0, 0, 0};
  double r_b[3] = {0, 0, 0};
  double t[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

  static BlochDecomposition from_state(const DensityMatrix& rho);
};

}  // namespace phaselink
