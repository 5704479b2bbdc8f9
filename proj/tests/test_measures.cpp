#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hilbertop/measures.hpp"

using namespace hilbertop;

namespace {

// Values computed at 40 digits with the density written in the variable
// w = L^{-a}, where the logarithmic tail becomes smooth.
struct RemarkOracle {
  double a, r, u, v;
};
constexpr RemarkOracle kRemark[] = {
    {0.5, 0.3, 3.1679149520531187, 2.6019429892563907},
    {0.5, 0.9, 2.2499155078000616, 2.045225677099642},
    {0.5, 0.999, 1.4400878294869218, 1.3702278400610395},
    {1.0, 0.3, 1.9099363046794449, 1.4071978889470757},
    {1.0, 0.9, 1.0926778760882889, 0.93689152285688818},
    {1.0, 0.999, 0.48690776690868874, 0.4458291769816432},
    {2.0, 0.3, 0.41776510249564224, 0.27437191592189947},
    {2.0, 0.9, 0.1841415850683959, 0.14825310052408372},
    {2.0, 0.999, 0.047104143495325793, 0.040910991803360933},
};
constexpr double kRemarkMoment[][2] = {{0.5, 2.6456757455992882}, {1.0, 1.4453144675528903}, {2.0, 0.28499837231205935}};

RadialMeasure without_profile(RadialMeasure m) {
  m.profile.reset();
  return m;
}

double fd_minus_laplacian(const std::function<double(double)>& f, double r, double h) {
  const double d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
  const double d1 = (f(r + h) - f(r - h)) / (2.0 * h);
  return -(d2 + d1 / r);
}

}  // namespace

TEST(Potential, AtomAtOrigin) {
  const auto mu = MeasureDescriptor::unit_atom();
  for (double r : {0.1, 0.5, 0.99}) {
    EXPECT_NEAR(potential_u(mu, cplx(0, r)), -2.0 * std::log(r), 1e-14);
    EXPECT_NEAR(potential_u_radial(*mu.radial_view(), r), -2.0 * std::log(r), 1e-14);
  }
}

TEST(Potential, AtomicIsLogWeightSum) {
  AtomicMeasure a{{cplx(0.3, 0.1), cplx(-0.5, 0.4)}, {2.0, 0.5}};
  const auto mu = MeasureDescriptor::atomic(a);
  const cplx z(0.1, -0.7);
  EXPECT_DOUBLE_EQ(potential_u(mu, z), 2.0 * log_weight(a.points[0], z) + 0.5 * log_weight(a.points[1], z));
  EXPECT_THROW(potential_u(mu, a.points[1]), DomainError);
  EXPECT_DOUBLE_EQ(potential_u(MeasureDescriptor::unit_atom(a.points[0]), z), log_weight(a.points[0], z));
}

TEST(Potential, CircleAtom) {
  RadialMeasure m;
  m.atoms = {{0.5, 1.0}};
  EXPECT_NEAR(potential_u_radial(m, 0.25), 2.0 * std::log(2.0), 1e-15);
  const auto mu = MeasureDescriptor::radial(m);
  EXPECT_NEAR(potential_u(mu, 0.25), 2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(potential_u(mu, cplx(0.0, 0.8)), potential_u_radial(m, 0.8), 1e-12);
}

TEST(Potential, ConstantDensity) {
  const auto m = make_profile_measure({"constant", {1.0}});
  const auto mu = MeasureDescriptor::radial(m);
  for (double r : {0.1, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(potential_u_radial(m, r), 1.0 - r * r, 1e-13);
  }
  EXPECT_NEAR(potential_u(mu, 0.5), potential_u_radial(m, 0.5), 1e-6);
}

TEST(Potential, QpIsFourTimesProfile) {
  for (double p : {0.25, 0.5, 0.75}) {
    const auto m = qp_measure(p);
    for (double r : {0.05, 0.4, 0.9, 0.9999}) {
      const double t = (1.0 - r) * (1.0 + r);
      EXPECT_NEAR(potential_u_radial(m, r), 4.0 * std::pow(t, p), 1e-10);
      EXPECT_NEAR(potential_u_radial(without_profile(m), r), 4.0 * std::pow(t, p), 1e-8);
    }
  }
}

TEST(Potential, QpTwoDimensionalDefinition) {
  const auto mu = MeasureDescriptor::qp(0.5);
  for (double r : {0.2, 0.6, 0.9}) {
    const cplx z = std::polar(r, 1.0);
    EXPECT_NEAR(potential_u(mu, z), 4.0 * std::sqrt(1.0 - r * r), 1e-6);
  }
}

TEST(Potential, RemarkAgainstOracle) {
  for (const auto& o : kRemark) {
    const auto m = remark_measure(o.a);
    EXPECT_NEAR(potential_u_radial(m, o.r), o.u, 1e-9 * o.u) << "a=" << o.a << " r=" << o.r;
    EXPECT_NEAR(potential_v_radial(m, o.r), o.v, 1e-9 * o.v) << "a=" << o.a << " r=" << o.r;
  }
}

TEST(PotentialV, Examples) {
  const auto atom = MeasureDescriptor::unit_atom();
  const cplx z(0.3, -0.6);
  EXPECT_NEAR(potential_v(atom, z), 1.0 - std::norm(z), 1e-15);
  EXPECT_NEAR(potential_v(MeasureDescriptor::unit_atom(0.5), 0.5), 1.0, 1e-15);
  for (const auto& mu : {MeasureDescriptor::qp(0.5), MeasureDescriptor::remark(1.0),
                         MeasureDescriptor::radial(make_profile_measure({"constant", {1.0}}))}) {
    EXPECT_NEAR(potential_v(mu, 0.0), total_moment(mu).value, 1e-9);
  }
}

TEST(PotentialV, ConstantDensityClosedForm) {
  const auto m = make_profile_measure({"constant", {1.0}});
  for (double r : {0.2, 0.7, 0.99}) {
    const double c = r * r;
    const double oracle = (1.0 - c) * (1.0 / c + (1.0 - c) * std::log1p(-c) / (c * c));
    EXPECT_NEAR(potential_v_radial(m, r), oracle, 1e-11);
  }
}

TEST(PotentialV, QpTwoRoutes) {
  const auto m = qp_measure(0.5);
  EXPECT_NEAR(potential_v_radial(m, 0.5), 2.3724012715315643, 1e-10);
  EXPECT_NEAR(potential_v_radial(m, 0.99), 0.43965407664421569, 1e-10);
  for (double r : {0.1, 0.5, 0.95, 0.9999}) {
    EXPECT_NEAR(potential_v_radial(m, r), potential_v_radial(without_profile(m), r), 1e-8);
  }
}

TEST(PotentialV, DominatedByU) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const MeasureDescriptor measures[] = {
      MeasureDescriptor::unit_atom(), MeasureDescriptor::qp(0.3), MeasureDescriptor::remark(0.5),
      MeasureDescriptor::atomic(AtomicMeasure{{cplx(0.2, 0.5), cplx(-0.7, 0.0)}, {1.0, 3.0}})};
  for (const auto& mu : measures) {
    for (int i = 0; i < 40; ++i) {
      const cplx z = std::polar(0.02 + 0.97 * u(rng), 6.28 * u(rng));
      const double uu = mu.is_atomic() ? potential_u(mu, z) : potential_u_radial(*mu.radial_view(), std::abs(z));
      EXPECT_LE(potential_v(mu, z), uu + 1e-12);
    }
  }
}

TEST(TotalMoment, Examples) {
  EXPECT_DOUBLE_EQ(total_moment(MeasureDescriptor::unit_atom()).value, 1.0);
  EXPECT_NEAR(total_moment(MeasureDescriptor::radial(make_profile_measure({"constant", {1.0}}))).value, 0.5, 1e-14);
  for (double p : {0.25, 0.5, 0.75}) {
    const auto r = total_moment(MeasureDescriptor::qp(p));
    EXPECT_TRUE(r.finite);
    EXPECT_NEAR(r.value, 4.0 / (p + 1.0), 1e-10);
    const auto r2 = total_moment(MeasureDescriptor::radial(without_profile(qp_measure(p))));
    EXPECT_NEAR(r2.value, 4.0 / (p + 1.0), 1e-8);
  }
  for (const auto& o : kRemarkMoment) EXPECT_NEAR(total_moment(MeasureDescriptor::remark(o[0])).value, o[1], 1e-9);
}

TEST(TotalMoment, PowerFamily) {
  // int t^{beta+1} dt = 1/(beta+2)
  for (double beta : {-1.5, -1.0, 0.0, 2.0}) {
    const auto r = total_moment(MeasureDescriptor::radial(make_profile_measure({"power", {1.0, beta}})));
    EXPECT_TRUE(r.finite);
    EXPECT_NEAR(r.value, 1.0 / (beta + 2.0), 1e-7);
  }
  for (double beta : {-2.0, -2.5}) {
    const auto r = total_moment(MeasureDescriptor::radial(make_profile_measure({"power", {1.0, beta}})));
    EXPECT_FALSE(r.finite);
    EXPECT_TRUE(std::isinf(r.value));
  }
}

TEST(NamedMeasures, QpDensity) {
  EXPECT_DOUBLE_EQ(qp_measure(0.5).density_at(0.0), 2.0);
  const double p = 0.5;
  const double fd = fd_minus_laplacian([p](double r) { return std::pow(1.0 - r * r, p); }, 0.3, 1e-4);
  EXPECT_NEAR(qp_measure(p).density_at(0.3), fd, 1e-6);
  EXPECT_THROW(qp_measure(1.0), DomainError);
  EXPECT_THROW(qp_measure(0.0), DomainError);
}

TEST(NamedMeasures, RemarkDensity) {
  const double a = 1.0;
  EXPECT_NEAR(remark_profile(a, 0.0), std::pow(1.0 + a, -a), 1e-15);
  const auto m = remark_measure(a);
  const double fd = fd_minus_laplacian([a](double r) { return remark_profile(a, r); }, 0.5, 1e-4);
  EXPECT_NEAR(m.density_at(0.5), fd, 1e-6);
  EXPECT_TRUE(std::isfinite(m.density_at(0.0)));
  for (double r = 0.0; r < 1.0; r += 0.01) EXPECT_GT(m.density_at(r), 0.0);
  EXPECT_THROW(remark_measure(0.0), DomainError);
}

TEST(NamedMeasures, MassFunctionFromProfile) {
  // mu_rad([0,r]) = -2 r g'(r)
  const auto m = remark_measure(0.5);
  const double r = 0.8, t = 1.0 - r * r;
  double mass = 0.0;
  for (const auto& nd : mapped_nodes(interval_rule(64), 0.0, r)) mass += nd.w * m.density_at(nd.x) * 2.0 * nd.x;
  EXPECT_NEAR(mass, -2.0 * r * m.profile->dg(r, t), 1e-10);
}

TEST(Moments, AtomAtOrigin) {
  const auto m = *MeasureDescriptor::unit_atom().radial_view();
  const auto t = u_moments(m, 20);
  ASSERT_EQ(t.moments.size(), 20u);
  EXPECT_NEAR(t.moments[0], 0.125, 1e-12);
  for (std::size_t n = 1; n <= 20; ++n) {
    EXPECT_NEAR(t.moments[n - 1], 1.0 / (2.0 * (n + 1.0) * (n + 1.0)), 1e-12);
    if (n > 1) {
      EXPECT_LT(t.moments[n - 1], t.moments[n - 2]);
    }
  }
  // partial sums approach sum 1/(2(n+1)^2) = (pi^2/6 - 1)/2
  const auto big = u_moments(m, 4000);
  EXPECT_NEAR(big.partial_sums.back(), 0.5 * (std::numbers::pi * std::numbers::pi / 6.0 - 1.0), 2e-4);
}

TEST(Moments, DecreasingForNamedMeasures) {
  for (const auto& mu : {MeasureDescriptor::qp(0.5), MeasureDescriptor::remark(1.0)}) {
    const auto t = u_moments(*mu.radial_view(), 30);
    for (std::size_t i = 1; i < t.moments.size(); ++i) EXPECT_LT(t.moments[i], t.moments[i - 1]);
  }
}

TEST(ConditionIntegral, AtomAtOrigin) {
  const auto mu = MeasureDescriptor::unit_atom();
  const double R = 1.0 - 1e-6;
  EXPECT_NEAR(condition_integral(mu, 0.0, R), R * R - R * R * R * R / 2.0, 1e-12);
  // boundary point: the angular mean of 1/|1-z|^2 is 1/(1-r^2), so I = R^2
  EXPECT_NEAR(condition_integral(mu, 1.0, 0.999), 0.999 * 0.999, 1e-9);
}

TEST(ConditionIntegral, MatchesOneDimensionalOracle) {
  const auto mu = MeasureDescriptor::qp(0.5);
  const auto m = *mu.radial_view();
  for (cplx a : {cplx(0.0), cplx(0.6, 0.3), cplx(0.0, 1.0)}) {
    const double R = 0.999;
    const double aa = std::norm(a);
    double oracle = 0.0;
    for (const auto& nd : graded_toward_one(200, 0.0, R)) {
      oracle += nd.w * 2.0 * nd.x * potential_v_radial(m, nd.x, nd.gap) / (1.0 - aa * nd.x * nd.x);
    }
    EXPECT_NEAR(condition_integral(mu, a, R), oracle, 1e-8 * oracle);
  }
}

TEST(ConditionIntegral, MonotoneInR) {
  const MeasureDescriptor measures[] = {MeasureDescriptor::qp(0.25), MeasureDescriptor::remark(0.5),
                                        MeasureDescriptor::atomic(AtomicMeasure{{cplx(0.5, 0.5)}, {1.0}})};
  for (const auto& mu : measures) {
    double prev = 0.0;
    for (double R : {0.5, 0.9, 0.99, 0.999}) {
      const double v = condition_integral(mu, cplx(0.0, -1.0), R);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Boundedness, Verdicts) {
  EXPECT_EQ(boundedness_check(MeasureDescriptor::unit_atom()).verdict, Verdict::bounded);
  EXPECT_EQ(boundedness_check(MeasureDescriptor::qp(0.5)).verdict, Verdict::bounded);
  const auto rep = boundedness_check(MeasureDescriptor::remark(0.5));
  EXPECT_EQ(rep.verdict, Verdict::divergent);
  EXPECT_EQ(rep.rows.size(), 5u);
  EXPECT_EQ(rep.rows[0].values.size(), 5u);
  const auto triv = boundedness_check(MeasureDescriptor::radial(make_profile_measure({"power", {1.0, -2.0}})));
  EXPECT_EQ(triv.verdict, Verdict::inconclusive);
}

TEST(Cache, MatchesFreshEvaluation) {
  const auto mu = MeasureDescriptor::qp(0.5);
  const PotentialCache cache(mu);
  EXPECT_TRUE(cache.valid());
  const auto m = *mu.radial_view();
  for (const auto& [r, u] : cache.samples()) {
    EXPECT_NEAR(cache(r), potential_u_radial(m, r), 1e-10);
    EXPECT_EQ(u, cache(r));
  }
  for (double r : {0.123, 0.5, 0.777, 0.95}) EXPECT_NEAR(cache(r), potential_u_radial(m, r), 1e-6);
}

TEST(Cache, AtomBreakpoints) {
  RadialMeasure m;
  m.atoms = {{0.5, 1.0}};
  m.density = [](double, double) { return 1.0; };
  const PotentialCache cache(MeasureDescriptor::radial(m));
  for (double r : {0.3, 0.49, 0.51, 0.7}) EXPECT_NEAR(cache(r), potential_u_radial(m, r), 1e-7);
}

TEST(Scaling, LinearInMeasure) {
  const auto mu = MeasureDescriptor::qp(0.5);
  const auto mu4 = mu.scaled(4.0);
  EXPECT_NEAR(total_moment(mu4).value, 4.0 * total_moment(mu).value, 1e-12);
  EXPECT_NEAR(potential_u_radial(*mu4.radial_view(), 0.7), 4.0 * potential_u_radial(*mu.radial_view(), 0.7), 1e-12);
}
