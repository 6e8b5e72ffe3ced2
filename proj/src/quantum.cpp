#include "phaselink/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace phaselink {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> hermitian_eigenvalues(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian eigensolver failed to converge");
  }
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

void require_state_dim(int dim, const char* who) {
  if (dim != 2 && dim != 4) {
    throw std::invalid_argument(std::string(who) + ": dimension must be 2 or 4, got " +
                                std::to_string(dim));
  }
}

// Hermitian square root via eigendecomposition, clamping the tiny negative
// eigenvalues a valid state may carry.
Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian eigensolver failed to converge");
  }
  Eigen::VectorXd ev = solver.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(0.0, ev(i)));
  return solver.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<cxd>() *
         solver.eigenvectors().adjoint();
}

}  // namespace

Mat pauli_x() {
  Mat m(2, 2);
  m << cxd(0, 0), cxd(1, 0), cxd(1, 0), cxd(0, 0);
  return m;
}

Mat pauli_y() {
  Mat m(2, 2);
  m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(-1, 0);
  return m;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

PureState PureState::from_amplitudes(Vec amplitudes) {
  require_state_dim(static_cast<int>(amplitudes.size()), "PureState");
  double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTol) {
    throw std::invalid_argument("PureState: amplitudes not normalized, |psi|^2 = " +
                                std::to_string(norm2));
  }
  return PureState(std::move(amplitudes));
}

DensityMatrix DensityMatrix::from_matrix(Mat m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("DensityMatrix: not square");
  require_state_dim(static_cast<int>(m.rows()), "DensityMatrix");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermTol) {
    throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-12");
  }
  if (std::abs(m.trace() - cxd(1.0, 0.0)) > kTraceTol * 10) {
    throw std::invalid_argument("DensityMatrix: trace != 1");
  }
  for (double ev : hermitian_eigenvalues(m)) {
    if (ev < kPsdFloor) {
      throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                  std::to_string(ev));
    }
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
  Mat m = psi.amplitudes() * psi.amplitudes().adjoint();
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  require_state_dim(dim, "maximally_mixed");
  return DensityMatrix(Mat::Identity(dim, dim) / static_cast<double>(dim));
}

KrausChannel KrausChannel::from_operators(std::vector<Mat> ops) {
  if (ops.empty()) throw std::invalid_argument("KrausChannel: empty operator list");
  const int dim = static_cast<int>(ops.front().rows());
  for (const Mat& k : ops) {
    if (k.rows() != dim || k.cols() != dim) {
      throw std::invalid_argument("KrausChannel: inconsistent operator dimensions");
    }
  }
  KrausChannel ch{std::move(ops), dim, dim};
  if (ch.trace_preservation_defect() > kCptpTol) {
    throw std::invalid_argument("KrausChannel: sum K^dag K deviates from identity");
  }
  return ch;
}

double KrausChannel::trace_preservation_defect() const {
  Mat sum = Mat::Zero(input_dim, input_dim);
  for (const Mat& k : operators) sum += k.adjoint() * k;
  return (sum - Mat::Identity(input_dim, input_dim)).cwiseAbs().maxCoeff();
}

MeasurementBasis MeasurementBasis::equatorial(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("MeasurementBasis: non-finite equatorial angle");
  }
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0) theta += kTwoPi;
  return MeasurementBasis(Label::Equatorial, theta);
}

Mat MeasurementBasis::observable() const {
  switch (label_) {
    case Label::Z: return pauli_z();
    case Label::X: return pauli_x();
    case Label::Y: return pauli_y();
    case Label::Equatorial:
      return std::cos(theta_) * pauli_x() + std::sin(theta_) * pauli_y();
  }
  throw std::logic_error("unreachable");
}

PureState bell_state() {
  Vec a(4);
  const double s = 1.0 / std::sqrt(2.0);
  a << cxd(s, 0), cxd(0, 0), cxd(0, 0), cxd(s, 0);
  return PureState::from_amplitudes(std::move(a));
}

PureState apply_phase(const PureState& state, double phi) {
  if (state.dim() != 4) {
    throw std::invalid_argument("apply_phase: expects a two-qubit state");
  }
  if (!std::isfinite(phi)) {
    throw std::invalid_argument("apply_phase: non-finite phase");
  }
  phi = std::fmod(phi, kTwoPi);
  const cxd factor = std::polar(1.0, phi);
  Vec a = state.amplitudes();
  a(2) *= factor;  // |10>
  a(3) *= factor;  // |11>
  return PureState::from_amplitudes(std::move(a));
}

PhaseReading inner_product_arg(const PureState& reference, const PureState& state) {
  if (reference.dim() != state.dim()) {
    throw std::invalid_argument("inner_product_arg: dimension mismatch");
  }
  const cxd ip = reference.amplitudes().dot(state.amplitudes());
  if (std::abs(ip) < 1e-12) return PhaseReading{0.0, false};
  return PhaseReading{std::arg(ip), true};
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  if (rho.dim() != 4) {
    throw std::invalid_argument("partial_trace: expects a two-qubit state");
  }
  const Mat& m = rho.matrix();
  Mat out = Mat::Zero(2, 2);
  // index = 2a + b
  if (keep == Subsystem::A) {
    for (int a = 0; a < 2; ++a)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b = 0; b < 2; ++b) out(a, a2) += m(2 * a + b, 2 * a2 + b);
  } else {
    for (int b = 0; b < 2; ++b)
      for (int b2 = 0; b2 < 2; ++b2)
        for (int a = 0; a < 2; ++a) out(b, b2) += m(2 * a + b, 2 * a + b2);
  }
  return DensityMatrix::from_matrix(std::move(out));
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch,
                            ChannelTarget target) {
  const int sdim = rho.dim();
  const int cdim = ch.input_dim;
  if (cdim != 2 && cdim != sdim) {
    throw std::invalid_argument("apply_channel: channel/state dimension mismatch");
  }
  if (sdim == 2 && cdim != 2) {
    throw std::invalid_argument("apply_channel: channel/state dimension mismatch");
  }

  auto apply_ops = [](const Mat& m, const std::vector<Mat>& ops) {
    Mat out = Mat::Zero(m.rows(), m.cols());
    for (const Mat& k : ops) out += k * m * k.adjoint();
    return out;
  };

  if (sdim == cdim) {
    // Direct application (single-qubit channel on one qubit, or a full
    // two-qubit channel).
    return DensityMatrix::from_matrix(apply_ops(rho.matrix(), ch.operators));
  }

  const Mat eye = Mat::Identity(2, 2);
  auto lift = [&](const std::vector<Mat>& ops, bool on_a) {
    std::vector<Mat> lifted;
    lifted.reserve(ops.size());
    for (const Mat& k : ops) lifted.push_back(on_a ? kron(k, eye) : kron(eye, k));
    return lifted;
  };

  Mat m = rho.matrix();
  if (target == ChannelTarget::A || target == ChannelTarget::Both) {
    m = apply_ops(m, lift(ch.operators, true));
  }
  if (target == ChannelTarget::B || target == ChannelTarget::Both) {
    m = apply_ops(m, lift(ch.operators, false));
  }
  return DensityMatrix::from_matrix(std::move(m));
}

PairOutcomeDistribution PairOutcomeDistribution::from_state(
    const DensityMatrix& rho, const MeasurementBasis& basis_a,
    const MeasurementBasis& basis_b) {
  if (rho.dim() != 4) {
    throw std::invalid_argument("PairOutcomeDistribution: expects a two-qubit state");
  }
  const Mat oa = basis_a.observable();
  const Mat ob = basis_b.observable();
  const Mat eye = Mat::Identity(2, 2);
  const Mat& m = rho.matrix();
  const double ea = (kron(oa, eye) * m).trace().real();
  const double eb = (kron(eye, ob) * m).trace().real();
  const double eab = (kron(oa, ob) * m).trace().real();

  PairOutcomeDistribution d;
  int idx = 0;
  double total = 0.0;
  for (int a : {+1, -1}) {
    for (int b : {+1, -1}) {
      double p = 0.25 * (1.0 + a * ea + b * eb + a * b * eab);
      p = std::max(0.0, p);  // clamp Born-rule round-off
      d.p[idx++] = p;
      total += p;
    }
  }
  for (double& p : d.p) p /= total;
  return d;
}

std::pair<int, int> PairOutcomeDistribution::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  static constexpr int kA[4] = {+1, +1, -1, -1};
  static constexpr int kB[4] = {+1, -1, +1, -1};
  for (int i = 0; i < 4; ++i) {
    acc += p[i];
    if (u < acc) return {kA[i], kB[i]};
  }
  return {kA[3], kB[3]};
}

std::pair<int, int> measure_pair(const DensityMatrix& rho,
                                 const MeasurementBasis& basis_a,
                                 const MeasurementBasis& basis_b, Rng& rng) {
  return PairOutcomeDistribution::from_state(rho, basis_a, basis_b).sample(rng);
}

int measure_qubit(const DensityMatrix& rho, const MeasurementBasis& basis, Rng& rng) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("measure_qubit: expects a single-qubit state");
  }
  const double expectation = (basis.observable() * rho.matrix()).trace().real();
  const double p_plus = std::clamp(0.5 * (1.0 + expectation), 0.0, 1.0);
  return rng.uniform() < p_plus ? +1 : -1;
}

double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  }
  const Mat root = psd_sqrt(rho.matrix());
  const Mat inner = root * sigma.matrix() * root;
  // inner is Hermitian PSD up to round-off; F = (sum sqrt(eigenvalues))^2.
  // Round-off leaves O(1e-17) junk eigenvalues whose square roots would
  // otherwise dominate the error budget, so clamp relative to the largest.
  const Mat sym = 0.5 * (inner + inner.adjoint());
  const std::vector<double> evs = hermitian_eigenvalues(sym);
  double largest = 0.0;
  for (double ev : evs) largest = std::max(largest, ev);
  const double floor = largest * 1e-13;
  double sum = 0.0;
  for (double ev : evs) {
    if (ev > floor) sum += std::sqrt(ev);
  }
  return std::clamp(sum * sum, 0.0, 1.0);
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double bits = 0.0;
  for (double ev : hermitian_eigenvalues(rho.matrix())) {
    if (ev <= 0.0) continue;  // clamp [kPsdFloor, 0) to 0; 0 log 0 := 0
    bits -= ev * std::log2(ev);
  }
  return std::max(0.0, bits);
}

double negativity(const DensityMatrix& rho) {
  if (rho.dim() != 4) {
    throw std::invalid_argument("negativity: expects a two-qubit state");
  }
  const Mat& m = rho.matrix();
  Mat pt(4, 4);
  // Partial transpose on B: (a b; a' b') -> (a b'; a' b).
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2)
          pt(2 * a + b, 2 * a2 + b2) = m(2 * a + b2, 2 * a2 + b);
  double trace_norm = 0.0;
  for (double ev : hermitian_eigenvalues(pt)) trace_norm += std::abs(ev);
  return std::max(0.0, trace_norm - 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  double sum = 0.0;
  for (double ev : hermitian_eigenvalues(rho.matrix() - sigma.matrix())) {
    sum += std::abs(ev);
  }
  return 0.5 * sum;
}

BlochDecomposition BlochDecomposition::from_state(const DensityMatrix& rho) {
  if (rho.dim() != 4) {
    throw std::invalid_argument("BlochDecomposition: expects a two-qubit state");
  }
  const Mat paulis[3] = {pauli_x(), pauli_y(), pauli_z()};
  const Mat eye = Mat::Identity(2, 2);
  const Mat& m = rho.matrix();
  BlochDecomposition d;
  for (int i = 0; i < 3; ++i) {
    d.r_a[i] = (kron(paulis[i], eye) * m).trace().real();
    d.r_b[i] = (kron(eye, paulis[i]) * m).trace().real();
    for (int j = 0; j < 3; ++j) {
      d.t[i][j] = (kron(paulis[i], paulis[j]) * m).trace().real();
    }
  }
  return d;
}

}  // namespace phaselink
