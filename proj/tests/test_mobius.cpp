#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hilbertop/mobius.hpp"
#include "hilbertop/quadrature.hpp"

using namespace hilbertop;

namespace {

cplx random_point(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmax * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

}  // namespace

TEST(Sigma, Examples) {
  const cplx a(0.3, -0.4), z(0.1, 0.6);
  EXPECT_EQ(sigma(a, 0.0), a);
  EXPECT_NEAR(std::abs(sigma(a, a)), 0.0, 1e-17);
  EXPECT_NEAR(std::abs(sigma(0.0, z) + z), 0.0, 1e-17);
  const cplx w(0.3, 0.2);
  EXPECT_NEAR(std::abs(sigma(0.5, sigma(0.5, w)) - w), 0.0, 1e-14);
}

TEST(Sigma, MapsCircleToCircle) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const cplx a = random_point(rng, 0.95);
    const cplx z = std::polar(1.0, 6.0 * i / 100.0);
    EXPECT_NEAR(std::abs(sigma(a, z)), 1.0, 1e-12);
  }
}

TEST(Sigma, Involution) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const cplx a = random_point(rng, 0.9), z = random_point(rng, 0.9);
    EXPECT_NEAR(std::abs(sigma(a, sigma(a, z)) - z), 0.0, 1e-13);
  }
}

TEST(Sigma, RejectsBadParameter) { EXPECT_THROW(sigma(1.0, 0.0), DomainError); }

TEST(Jacobian, Examples) {
  EXPECT_DOUBLE_EQ(jacobian_modulus_sq(0.0, cplx(0.4, 0.1)), 1.0);
  EXPECT_DOUBLE_EQ(jacobian_modulus_sq(0.5, 0.0), 0.5625);
}

TEST(Jacobian, MatchesDerivativeSquared) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const cplx a = random_point(rng, 0.9), z = random_point(rng, 0.9);
    const DiscAutomorphism phi(1.0, a);
    EXPECT_NEAR(jacobian_modulus_sq(a, z), std::norm(phi.derivative(z)), 1e-10 * jacobian_modulus_sq(a, z));
  }
}

TEST(Jacobian, PreservesArea) {
  // The pole 1/conj(a) sits outside the disc; grade the rim and refine angles toward arg a.
  const cplx a(0.5, 0.3);
  DiscRule rule;
  rule.radial = interval_rule(64);
  rule.rim = SingularityHint::power_at(Endpoint::right, 0.0);
  rule.wedge_angles = {std::arg(a)};
  rule.shell_nodes = 16;
  const double v = integrate_disc([&](cplx z) { return cplx(jacobian_modulus_sq(a, z)); }, rule).real();
  EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(Poisson, Examples) {
  for (double t : {0.0, 1.0, 4.0}) EXPECT_DOUBLE_EQ(poisson_kernel(0.0, t), 1.0);
  EXPECT_NEAR(poisson_kernel(0.5, 0.0), 3.0, 1e-15);
  const cplx zeta(0.3, 0.4);
  const int m = 2048;
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += poisson_kernel(zeta, 2.0 * std::numbers::pi * j / m);
  EXPECT_NEAR(s / m, 1.0, 1e-10);
}

TEST(Poisson, ConjugateSymmetry) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const cplx z = random_point(rng, 0.95);
    const double t = 6.0 * i / 50.0;
    EXPECT_NEAR(poisson_kernel(z, t), poisson_kernel(std::conj(z), -t), 1e-12 * poisson_kernel(z, t));
  }
}

TEST(LogWeight, Examples) {
  const cplx z(0.2, -0.5);
  EXPECT_NEAR(log_weight(0.0, z), -2.0 * std::log(std::abs(z)), 1e-15);
  EXPECT_NEAR(log_weight(cplx(0.3, 0.1), std::polar(1.0, 0.7)), 0.0, 1e-15);
  EXPECT_NEAR(log_weight(0.5, 0.0), 2.0 * std::log(2.0), 1e-15);
  EXPECT_THROW(log_weight(cplx(0.1, 0.1), cplx(0.1, 0.1)), DomainError);
}

TEST(LogWeight, NearBoundaryIsAccurate) {
  // 1 - |sigma|^2 is tiny: the log1p branch keeps full relative accuracy.
  const cplx a(0.2, 0.1);
  const cplx z = std::polar(1.0 - 1e-9, 0.3);
  const double x = hyperbolic_gap(a, z);
  EXPECT_NEAR(log_weight(a, z) / x, 1.0, 1e-6);
}

TEST(LogWeight, Nonnegative) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) EXPECT_GE(log_weight(random_point(rng, 0.99), random_point(rng, 0.99)), 0.0);
}

TEST(Automorphism, NormalisesLambda) {
  const DiscAutomorphism phi(cplx(3, 4), 0.2);
  EXPECT_NEAR(std::abs(phi.lambda()), 1.0, 1e-15);
  EXPECT_THROW(DiscAutomorphism(0.0, 0.2), DomainError);
  EXPECT_THROW(DiscAutomorphism(1.0, 1.2), DomainError);
}

TEST(Automorphism, IdentityAndInverse) {
  std::mt19937_64 rng(6);
  const auto id = DiscAutomorphism::identity();
  for (int i = 0; i < 100; ++i) {
    const cplx z = random_point(rng, 0.95);
    EXPECT_NEAR(std::abs(id(z) - z), 0.0, 1e-16);
    const DiscAutomorphism phi(std::polar(1.0, 2.0 * i), random_point(rng, 0.9));
    EXPECT_NEAR(std::abs(phi.inverse()(phi(z)) - z), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(phi(phi.inverse()(z)) - z), 0.0, 1e-12);
  }
}

TEST(Automorphism, GroupLaw) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const DiscAutomorphism p1(std::polar(1.0, 0.1 * i), random_point(rng, 0.9));
    const DiscAutomorphism p2(std::polar(1.0, -0.3 * i), random_point(rng, 0.9));
    const auto c = compose(p1, p2);
    const cplx z = random_point(rng, 0.9);
    EXPECT_NEAR(std::abs(p1(p2(z)) - c(z)), 0.0, 1e-12);
  }
}

TEST(Automorphism, SeriesMatchesClosedForm) {
  const DiscAutomorphism phi(cplx(0, 1), cplx(0.4, -0.2));
  const auto s = automorphism_series(phi, 200);
  for (cplx z : {cplx(0), cplx(0.5, 0.1), cplx(-0.3, -0.6)}) {
    EXPECT_NEAR(std::abs(eval(s, z) - phi(z)), 0.0, 1e-13);
  }
}

TEST(Automorphism, ComposeSeries) {
  const TaylorPolynomial f({1.0, cplx(0, 2), -0.5, 0.25});
  const DiscAutomorphism phi(1.0, 0.4);
  const auto g = compose(f, phi, 120);
  for (cplx z : {cplx(0), cplx(0.5, 0.1), cplx(-0.3, -0.6)}) {
    EXPECT_NEAR(std::abs(eval(g, z) - eval(f, phi(z))), 0.0, 1e-12);
  }
}
