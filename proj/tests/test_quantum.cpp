#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phaselink/quantum.hpp"
#include "support/jacobi_oracle.hpp"
#include "support/random_states.hpp"

using namespace phaselink;
using phaselink::test::flatten;
using phaselink::test::random_density;
using phaselink::test::random_pure;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

DensityMatrix werner(double v) {
  const PureState bell = bell_state();
  Mat m = v * (bell.amplitudes() * bell.amplitudes().adjoint()) +
          (1.0 - v) * 0.25 * Mat::Identity(4, 4);
  return DensityMatrix::from_matrix(std::move(m));
}

}  // namespace

TEST_CASE("bell state amplitudes and self fidelity") {
  const PureState bell = bell_state();
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(bell.amplitude(0) - cxd(s, 0)) < 1e-15);
  CHECK(std::abs(bell.amplitude(1)) < 1e-15);
  CHECK(std::abs(bell.amplitude(2)) < 1e-15);
  CHECK(std::abs(bell.amplitude(3) - cxd(s, 0)) < 1e-15);

  const DensityMatrix rho = DensityMatrix::pure(bell);
  CHECK(state_fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bell marginal is maximally mixed") {
  const DensityMatrix rho = DensityMatrix::pure(bell_state());
  const DensityMatrix reduced = partial_trace(rho, Subsystem::B);
  CHECK(trace_distance(reduced, DensityMatrix::maximally_mixed(2)) < 1e-12);
}

TEST_CASE("apply_phase on the first qubit") {
  const PureState bell = bell_state();
  const double s = 1.0 / std::sqrt(2.0);

  SUBCASE("zero phase is the identity") {
    const PureState same = apply_phase(bell, 0.0);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(same.amplitude(i) - bell.amplitude(i)) < 1e-15);
    }
  }
  SUBCASE("pi flips the |11> amplitude sign") {
    const PureState flipped = apply_phase(bell, kPi);
    CHECK(std::abs(flipped.amplitude(3) - cxd(-s, 0)) < 1e-15);
    CHECK(std::abs(flipped.amplitude(0) - cxd(s, 0)) < 1e-15);
  }
  SUBCASE("pi/2 makes the |11> amplitude i/sqrt2") {
    const PureState rotated = apply_phase(bell, kPi / 2);
    CHECK(std::abs(rotated.amplitude(3) - cxd(0, s)) < 1e-15);
  }
  SUBCASE("non-finite phase is rejected") {
    CHECK_THROWS_AS(apply_phase(bell, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(apply_phase(bell, INFINITY), std::invalid_argument);
  }
  SUBCASE("norm preserved across random phases") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
      const PureState out = apply_phase(random_pure(4, rng), rng.uniform_angle());
      CHECK(std::abs(out.amplitudes().squaredNorm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("inner_product_arg") {
  const PureState bell = bell_state();

  SUBCASE("half-angle of the encoded phase") {
    // arg((1 + e^{i phi})/2) = phi/2, not phi.
    const PhaseReading r = inner_product_arg(bell, apply_phase(bell, kPi / 2));
    CHECK(r.defined);
    CHECK(r.radians == doctest::Approx(kPi / 4).epsilon(1e-12));
  }
  SUBCASE("self inner product has zero argument") {
    Rng rng(3);
    const PureState psi = random_pure(4, rng);
    const PhaseReading r = inner_product_arg(psi, psi);
    CHECK(r.defined);
    CHECK(std::abs(r.radians) < 1e-12);
  }
  SUBCASE("orthogonal states give the undefined-phase signal") {
    const PhaseReading r = inner_product_arg(bell, apply_phase(bell, kPi));
    CHECK_FALSE(r.defined);
    CHECK(r.radians == 0.0);
  }
}

TEST_CASE("partial_trace") {
  SUBCASE("flying-qubit marginal is I/2 for every encoded phase") {
    const DensityMatrix half = DensityMatrix::maximally_mixed(2);
    for (int i = 0; i < 16; ++i) {
      const double phi = 2.0 * kPi * i / 16;
      const DensityMatrix rho = DensityMatrix::pure(apply_phase(bell_state(), phi));
      CHECK(trace_distance(partial_trace(rho, Subsystem::B), half) < 1e-12);
    }
  }
  SUBCASE("product state") {
    Vec a = Vec::Zero(4);
    a(0) = 1.0;  // |00>
    const DensityMatrix rho = DensityMatrix::pure(PureState::from_amplitudes(a));
    const DensityMatrix kept = partial_trace(rho, Subsystem::A);
    CHECK(std::abs(kept.matrix()(0, 0) - cxd(1, 0)) < 1e-14);
    CHECK(std::abs(kept.matrix()(1, 1)) < 1e-14);
  }
  SUBCASE("maximally mixed") {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(4);
    CHECK(trace_distance(partial_trace(rho, Subsystem::A),
                         DensityMatrix::maximally_mixed(2)) < 1e-14);
  }
}

TEST_CASE("apply_channel") {
  Rng rng(11);

  SUBCASE("identity channel is a no-op") {
    const KrausChannel id = KrausChannel::from_operators({Mat::Identity(2, 2)});
    const DensityMatrix rho = random_density(4, rng);
    const DensityMatrix out = apply_channel(rho, id, ChannelTarget::A);
    CHECK((out.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("depolarizing B on a Bell pair gives the Werner state") {
    std::vector<Mat> ops;
    const double p = 0.01;
    ops.push_back(std::sqrt(1 - 0.75 * p) * Mat::Identity(2, 2));
    ops.push_back(std::sqrt(0.25 * p) * pauli_x());
    ops.push_back(std::sqrt(0.25 * p) * pauli_y());
    ops.push_back(std::sqrt(0.25 * p) * pauli_z());
    const KrausChannel dep = KrausChannel::from_operators(std::move(ops));
    const DensityMatrix out =
        apply_channel(DensityMatrix::pure(bell_state()), dep, ChannelTarget::B);
    CHECK((out.matrix() - werner(0.99).matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("trace preserved for random channels and states") {
    for (int i = 0; i < 20; ++i) {
      // Random CPTP channel from a Stinespring-like pair of Kraus ops.
      Mat g(2, 2);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          g(r, c) = cxd(phaselink::test::gaussian(rng), phaselink::test::gaussian(rng));
      // K0 = (I + G^dag G)^(-1/2), K1 = G K0 gives K0^2 + K1^dag K1 = I.
      Eigen::SelfAdjointEigenSolver<Mat> es(Mat::Identity(2, 2) + g.adjoint() * g);
      Mat k0 = es.operatorInverseSqrt();
      Mat k1 = g * k0;
      const KrausChannel ch = KrausChannel::from_operators({k0, k1});
      const DensityMatrix out = apply_channel(random_density(4, rng), ch,
                                              i % 2 ? ChannelTarget::A
                                                    : ChannelTarget::B);
      CHECK(std::abs(out.matrix().trace().real() - 1.0) < 1e-10);
    }
  }
  SUBCASE("dimension mismatch is rejected") {
    const KrausChannel id4 = KrausChannel::from_operators({Mat::Identity(4, 4)});
    CHECK_THROWS_AS(
        apply_channel(DensityMatrix::maximally_mixed(2), id4, ChannelTarget::A),
        std::invalid_argument);
  }
}

TEST_CASE("measure_pair") {
  SUBCASE("Z(x)Z on |00> is deterministic") {
    Vec a = Vec::Zero(4);
    a(0) = 1.0;
    const DensityMatrix rho = DensityMatrix::pure(PureState::from_amplitudes(a));
    Rng rng(5);
    for (int i = 0; i < 32; ++i) {
      const auto [oa, ob] =
          measure_pair(rho, MeasurementBasis::z(), MeasurementBasis::z(), rng);
      CHECK(oa == 1);
      CHECK(ob == 1);
    }
  }
  SUBCASE("exact Born probabilities follow the correlator law") {
    for (double phi : {0.0, 0.7, kPi / 2, 2.9, 4.4}) {
      const DensityMatrix rho = DensityMatrix::pure(apply_phase(bell_state(), phi));
      const auto dxx = PairOutcomeDistribution::from_state(rho, MeasurementBasis::x(),
                                                           MeasurementBasis::x());
      const auto dxy = PairOutcomeDistribution::from_state(rho, MeasurementBasis::x(),
                                                           MeasurementBasis::y());
      const double exx = dxx.p[0] - dxx.p[1] - dxx.p[2] + dxx.p[3];
      const double exy = dxy.p[0] - dxy.p[1] - dxy.p[2] + dxy.p[3];
      CHECK(exx == doctest::Approx(std::cos(phi)).epsilon(1e-12));
      CHECK(exy == doctest::Approx(std::sin(phi)).epsilon(1e-12));
    }
  }
  SUBCASE("empirical means land within 4/sqrt(n)") {
    Rng rng(17);
    const long n = 100000;
    for (double phi : {0.4, 2.1}) {
      const DensityMatrix rho = DensityMatrix::pure(apply_phase(bell_state(), phi));
      const auto dxx = PairOutcomeDistribution::from_state(rho, MeasurementBasis::x(),
                                                           MeasurementBasis::x());
      const auto dxy = PairOutcomeDistribution::from_state(rho, MeasurementBasis::x(),
                                                           MeasurementBasis::y());
      double sxx = 0.0, sxy = 0.0;
      for (long i = 0; i < n; ++i) {
        auto [a1, b1] = dxx.sample(rng);
        auto [a2, b2] = dxy.sample(rng);
        sxx += a1 * b1;
        sxy += a2 * b2;
      }
      const double band = 4.0 / std::sqrt(static_cast<double>(n));
      CHECK(std::abs(sxx / n - std::cos(phi)) < band);
      CHECK(std::abs(sxy / n - std::sin(phi)) < band);
    }
  }
  SUBCASE("equatorial bases coincide with X and Y") {
    CHECK((MeasurementBasis::equatorial(0.0).observable() -
           MeasurementBasis::x().observable())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
    CHECK((MeasurementBasis::equatorial(kPi / 2).observable() -
           MeasurementBasis::y().observable())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
  }
}

TEST_CASE("state_fidelity") {
  Rng rng(23);

  SUBCASE("orthogonal pure states") {
    Vec a = Vec::Zero(4), b = Vec::Zero(4);
    a(0) = 1.0;  // |00>
    b(3) = 1.0;  // |11>
    CHECK(state_fidelity(DensityMatrix::pure(PureState::from_amplitudes(a)),
                         DensityMatrix::pure(PureState::from_amplitudes(b))) < 1e-12);
  }
  SUBCASE("Werner against the Bell pair: (3v+1)/4") {
    for (double v : {0.5, 0.9, 0.99}) {
      const double f = state_fidelity(werner(v), DensityMatrix::pure(bell_state()));
      CHECK(f == doctest::Approx((3 * v + 1) / 4).epsilon(1e-9));
    }
  }
  SUBCASE("symmetric and bounded on random states") {
    for (int i = 0; i < 25; ++i) {
      const DensityMatrix r1 = random_density(4, rng);
      const DensityMatrix r2 = random_density(4, rng);
      const double f12 = state_fidelity(r1, r2);
      const double f21 = state_fidelity(r2, r1);
      CHECK(std::abs(f12 - f21) < 1e-9);
      CHECK(f12 >= 0.0);
      CHECK(f12 <= 1.0);
      CHECK(state_fidelity(r1, r1) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("von_neumann_entropy") {
  SUBCASE("pure states carry zero entropy") {
    Rng rng(29);
    CHECK(von_neumann_entropy(DensityMatrix::pure(random_pure(4, rng))) < 1e-9);
  }
  SUBCASE("maximally mixed qubit carries one bit") {
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(2)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Werner spectrum") {
    const double v = 0.99;
    const double big = (1 + 3 * v) / 4;
    const double small = (1 - v) / 4;
    const double expected = -big * std::log2(big) - 3 * small * std::log2(small);
    CHECK(von_neumann_entropy(werner(v)) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("negativity") {
  SUBCASE("Bell pair scores exactly one") {
    CHECK(negativity(DensityMatrix::pure(bell_state())) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("product state is separable") {
    Vec a = Vec::Zero(4);
    a(0) = 1.0;
    CHECK(negativity(DensityMatrix::pure(PureState::from_amplitudes(a))) < 1e-12);
  }
  SUBCASE("Werner line (3v-1)/2") {
    for (double v : {0.5, 0.9, 0.99}) {
      CHECK(negativity(werner(v)) == doctest::Approx((3 * v - 1) / 2).epsilon(1e-9));
    }
    CHECK(negativity(werner(0.99)) == doctest::Approx(0.985).epsilon(1e-9));
  }
}

TEST_CASE("negativity and entropy match the independent Jacobi oracle") {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const DensityMatrix rho = random_density(4, rng);
    const auto flat = flatten(rho);
    CHECK(std::abs(negativity(rho) - phaselink::test::oracle_negativity(flat)) < 1e-8);
    CHECK(std::abs(von_neumann_entropy(rho) -
                   phaselink::test::oracle_entropy_bits(flat, 4)) < 1e-8);
  }
}

TEST_CASE("negativity never grows under local depolarization") {
  Rng rng(37);
  std::vector<Mat> dep_ops;
  for (double p : {0.01, 0.1, 0.5, 1.0}) {
    dep_ops.clear();
    if (1 - 0.75 * p > 0) dep_ops.push_back(std::sqrt(1 - 0.75 * p) * Mat::Identity(2, 2));
    dep_ops.push_back(std::sqrt(0.25 * p) * pauli_x());
    dep_ops.push_back(std::sqrt(0.25 * p) * pauli_y());
    dep_ops.push_back(std::sqrt(0.25 * p) * pauli_z());
    const KrausChannel ch = KrausChannel::from_operators(dep_ops);
    for (int i = 0; i < 25; ++i) {
      const DensityMatrix rho = random_density(4, rng);
      const DensityMatrix out = apply_channel(rho, ch, ChannelTarget::B);
      CHECK(negativity(out) <= negativity(rho) + 1e-10);
    }
  }
}

TEST_CASE("invalid states are rejected") {
  SUBCASE("unnormalized amplitudes") {
    Vec a = Vec::Zero(4);
    a(0) = 1.0;
    a(3) = 0.5;
    CHECK_THROWS_AS(PureState::from_amplitudes(a), std::invalid_argument);
  }
  SUBCASE("unsupported dimension") {
    Vec a = Vec::Zero(3);
    a(0) = 1.0;
    CHECK_THROWS_AS(PureState::from_amplitudes(a), std::invalid_argument);
  }
  SUBCASE("non-Hermitian matrix") {
    Mat m = Mat::Identity(2, 2) * 0.5;
    m(0, 1) = cxd(0.3, 0.0);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), std::invalid_argument);
  }
  SUBCASE("wrong trace") {
    CHECK_THROWS_AS(DensityMatrix::from_matrix(Mat::Identity(2, 2)),
                    std::invalid_argument);
  }
  SUBCASE("negative eigenvalue") {
    Mat m(2, 2);
    m << cxd(1.2, 0), cxd(0, 0), cxd(0, 0), cxd(-0.2, 0);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), std::invalid_argument);
  }
  SUBCASE("non-trace-preserving Kraus set") {
    CHECK_THROWS_AS(KrausChannel::from_operators({0.5 * Mat::Identity(2, 2)}),
                    std::invalid_argument);
  }
}

TEST_CASE("Bloch decomposition reproduces the correlator table") {
  const double phi = 1.1;
  const DensityMatrix rho = DensityMatrix::pure(apply_phase(bell_state(), phi));
  const BlochDecomposition d = BlochDecomposition::from_state(rho);
  CHECK(d.t[0][0] == doctest::Approx(std::cos(phi)).epsilon(1e-12));
  CHECK(d.t[0][1] == doctest::Approx(std::sin(phi)).epsilon(1e-12));
  CHECK(d.t[1][0] == doctest::Approx(std::sin(phi)).epsilon(1e-12));
  CHECK(d.t[1][1] == doctest::Approx(-std::cos(phi)).epsilon(1e-12));
  CHECK(d.t[2][2] == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(d.r_a[i]) < 1e-12);
    CHECK(std::abs(d.r_b[i]) < 1e-12);
  }
}
