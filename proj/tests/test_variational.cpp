#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wavebound/variational.hpp"

namespace wavebound {
namespace {

constexpr double kPi = std::numbers::pi;

// Reference values of the central-region functional obtained with 30-digit
// symbolic evaluation of the Euler profiles (independent of this library).
struct Reference {
  double delta;
  double value;
};
constexpr Reference kQ2Reference[] = {
    {0.1, 1.70310550766799}, {0.3, 0.155061516355406}, {0.34, -0.0038777789659161},
    {0.5, -0.63726090994294}, {0.9, -7.4645668345739},
};

TEST(TrialProfiles, BoundaryValues) {
  for (double delta : {0.1, 0.34, 0.8}) {
    const TrialProfiles p(delta);
    const auto left = p.value(-delta);
    const auto right = p.value(delta);
    EXPECT_NEAR(left.phi, 1.0, 1e-13);
    EXPECT_NEAR(right.phi, 0.0, 1e-13);
    EXPECT_NEAR(left.psi, 0.0, 1e-13);
    EXPECT_NEAR(right.psi, 1.0, 1e-13);
    EXPECT_NEAR(left.chi, 0.0, 1e-13);
    EXPECT_NEAR(right.chi, 0.0, 1e-13);
    EXPECT_NEAR(left.eta, 0.0, 1e-13);
    EXPECT_NEAR(right.eta, 0.0, 1e-13);
  }
  EXPECT_THROW(TrialProfiles(1.0), std::invalid_argument);
  EXPECT_THROW(TrialProfiles(0.0), std::invalid_argument);
}

TEST(TrialProfiles, DerivativesMatchFiniteDifferences) {
  const TrialProfiles p(0.4);
  const double h = 1e-5;
  for (double x : {-0.3, 0.0, 0.25}) {
    const auto fp = p.value(x + h);
    const auto fm = p.value(x - h);
    const auto d1 = p.first_derivative(x);
    EXPECT_NEAR((fp.phi - fm.phi) / (2 * h), d1.phi, 1e-8);
    EXPECT_NEAR((fp.chi - fm.chi) / (2 * h), d1.chi, 1e-8);
    EXPECT_NEAR((fp.eta - fm.eta) / (2 * h), d1.eta, 1e-8);
    const auto gp = p.first_derivative(x + h);
    const auto gm = p.first_derivative(x - h);
    const auto d2 = p.second_derivative(x);
    EXPECT_NEAR((gp.psi - gm.psi) / (2 * h), d2.psi, 1e-7);
  }
}

TEST(TrialProfiles, SolveEulerEquations) {
  for (double delta : {0.05, 0.2, 0.34, 0.6, 0.95}) {
    const TrialProfiles p(delta);
    for (int i = 0; i <= 20; ++i) {
      const double x = -delta + 2.0 * delta * i / 20.0;
      for (double r : euler_residuals(p, x)) EXPECT_LT(std::abs(r), 1e-8) << delta << " " << x;
    }
  }
}

TEST(Q2, ClosedFormMatchesReferenceAndQuadrature) {
  for (const auto& ref : kQ2Reference) {
    EXPECT_NEAR(q2_closed(ref.delta), ref.value, 1e-11) << ref.delta;
    EXPECT_NEAR(q2_quadrature(ref.delta), q2_closed(ref.delta), 1e-8) << ref.delta;
  }
}

TEST(Q2, SignsAndLimits) {
  EXPECT_GT(q2_closed(0.1), 0.0);
  EXPECT_LT(q2_closed(0.9), 0.0);
  EXPECT_GT(q2_closed(1e-4), 1e3);
  EXPECT_LT(q2_closed(1.0 - 1e-6), -1e5);
  const double near_root = q2_closed(0.34);
  EXPECT_LT(near_root, 0.0);
  EXPECT_GT(near_root, -0.01);
}

TEST(Q2, ScaleInvariant) {
  // The Dirichlet form and the L2 term scaled by mu = pi^2 / (4 d^2) are both
  // invariant under a common dilation of the plane, so only delta / d matters.
  EXPECT_NEAR(q2_closed(0.6, 2.0), q2_closed(0.3, 1.0), 1e-12);
  EXPECT_NEAR(q2_quadrature(0.6, 2.0), q2_quadrature(0.3, 1.0), 1e-9);
}

TEST(Lambda2, RootInsideWindowAndUnique) {
  const double root = lambda2();
  EXPECT_GT(root, 0.33);
  EXPECT_LT(root, 0.35);
  EXPECT_LT(std::abs(q2_closed(root)), 1e-9);
  double previous = q2_closed(0.05);
  for (int i = 1; i <= 1000; ++i) {
    const double s = 0.05 + 0.9 * i / 1000.0;
    const double v = q2_closed(s);
    EXPECT_LT(v, previous) << s;
    previous = v;
  }
}

double rhs_reference(double k) {
  // Independent transcription of the final emptiness inequality.
  const double s = std::sqrt(2.0);
  return 3 * k * (2 * s * k * (1 + k) + (1 - k)) / ((1 - k) * (4 * s * (1 - k) * (1 + k) - k));
}

TEST(Emptiness, RightHandSide) {
  EXPECT_NEAR(emptiness_rhs(1e-9), 0.0, 1e-8);
  EXPECT_NEAR(emptiness_rhs(0.25), 0.323, 1e-3);
  EXPECT_NEAR(emptiness_rhs(0.27), 0.379, 1e-3);
  for (double k : {0.01, 0.1, 0.3, 0.5}) EXPECT_NEAR(emptiness_rhs(k), rhs_reference(k), 1e-14);
  EXPECT_THROW(emptiness_rhs(0.0), std::invalid_argument);
  EXPECT_THROW(emptiness_rhs(kappa_admissible_max()), std::invalid_argument);
}

TEST(Emptiness, LowerThreshold) {
  const LowerThreshold t = lambda1();
  EXPECT_GT(t.kappa0, 0.25);
  EXPECT_LT(t.kappa0, 0.27);
  EXPECT_GT(t.lambda1, 0.075);
  EXPECT_LT(t.lambda1, 0.085);
  EXPECT_NEAR(emptiness_rhs(t.kappa0), 1.0 - 2.0 / kPi, 1e-10);
  EXPECT_NEAR(t.lambda1, t.kappa0 / kPi, 1e-15);
}

TEST(Certificate, NormsAgainstClosedForms) {
  const CertificateNorms n = certificate_norms(0.3);
  // |phi'|^2 for two Gaussian shoulders: 2 * int 4 u^2 exp(-2u^2) du = sqrt(2 pi) / 2.
  EXPECT_NEAR(n.phi_prime_sq, std::sqrt(2.0 * kPi) / 2.0, 1e-10);
  // Bump norms scale as delta (|j|^2, |j^2|^2) and 1/delta (|j j'|^2).
  const CertificateNorms m = certificate_norms(0.6);
  EXPECT_NEAR(m.j_sq, 2.0 * n.j_sq, 1e-13);
  EXPECT_NEAR(m.j2_sq, 2.0 * n.j2_sq, 1e-13);
  EXPECT_NEAR(m.jj_prime_sq, n.jj_prime_sq / 2.0, 1e-13);
}

TEST(Certificate, ZeroAmplitudeIsPositive) {
  const CertificateNorms n = certificate_norms(0.1);
  EXPECT_NEAR(modelB_certificate(0.1, 1.0, 0.5, 0.0), 0.5 * n.phi_prime_sq, 1e-14);
  EXPECT_GT(modelB_certificate(0.1, 1.0, 0.5, 0.0), 0.0);
}

TEST(Certificate, NegativeForEveryWindow) {
  for (double delta : {0.02, 0.05, 0.1, 0.3, 1.0, 2.0}) {
    const CertificateSearch c = search_modelB_certificate(delta);
    EXPECT_LT(c.value, 0.0) << delta;
    EXPECT_NEAR(modelB_certificate(delta, 1.0, c.sigma, c.epsilon), c.value, 1e-14);
  }
}

TEST(Thresholds, OrderingReport) {
  const ThresholdReport ok = threshold_report(0.26);
  EXPECT_TRUE(ok.ordering_ok);
  EXPECT_FALSE(threshold_report(0.05).ordering_ok);
  EXPECT_FALSE(threshold_report(0.5).ordering_ok);
}

}  // namespace
}  // namespace wavebound
