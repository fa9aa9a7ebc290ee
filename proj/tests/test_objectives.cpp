#include "descent/harness/gradcheck.hpp"
#include "descent/linesearch.hpp"
#include "descent/objectives.hpp"

#include <gtest/gtest.h>

#include <cmath>

using descent::HyperbolicSaddle;
using descent::Matrix;
using descent::MonkeySaddle;
using descent::QuadraticForm;
using descent::RngStream;
using descent::Vector;

TEST(QuadraticForm, ValueGradientHessian) {
  const auto q = QuadraticForm::diagonal(Vector{{1.0, 100.0}});
  const auto [f, g] = q.value_and_gradient(Vector{{1.0, 1.0}});
  EXPECT_DOUBLE_EQ(f, 50.5);
  EXPECT_EQ(g, (Vector{{1.0, 100.0}}));
  EXPECT_EQ(q.hessian(Vector{{3.0, -2.0}}), Matrix(Vector{{1.0, 100.0}}.asDiagonal()));
}

TEST(QuadraticForm, LinearTerm) {
  Matrix a(2, 2);
  a << 2, 1, 1, 3;
  const QuadraticForm q(a, Vector{{1.0, -1.0}});
  const Vector x{{0.5, 2.0}};
  EXPECT_DOUBLE_EQ(q.value(x), 0.5 * x.dot(a * x) + x[0] - x[1]);
  EXPECT_TRUE(q.gradient(x).isApprox(a * x + Vector{{1.0, -1.0}}));
}

TEST(QuadraticForm, RejectsMismatchedShapes) {
  EXPECT_THROW(QuadraticForm(Matrix::Identity(2, 3)), descent::ValidationError);
  EXPECT_THROW(QuadraticForm(Matrix::Identity(2, 2), Vector::Zero(3)), descent::ValidationError);
}

TEST(QuadraticForm, NewtonLandsOnMinimizerInOneStep) {
  Matrix b(3, 3);
  b << 1, 2, 0, 0, 1, -1, 3, 0, 1;
  const QuadraticForm q(b.transpose() * b + Matrix::Identity(3, 3), Vector{{1.0, 0.0, -2.0}});
  const Vector x{{4.0, -3.0, 2.0}};
  const Vector x1 = x + descent::newton_step(q, x);
  EXPECT_LT(q.gradient(x1).norm(), 1e-12);
}

TEST(Saddles, CriticalPointAtOrigin) {
  const HyperbolicSaddle h;
  const MonkeySaddle m;
  EXPECT_EQ(h.value(Vector::Zero(2)), 0.0);
  EXPECT_LT(h.gradient(Vector::Zero(2)).norm(), 1e-14);
  EXPECT_LT(m.gradient(Vector::Zero(2)).norm(), 1e-14);
  EXPECT_EQ(m.hessian(Vector::Zero(2)), Matrix::Zero(2, 2));
  const Matrix hh = h.hessian(Vector::Zero(2));
  EXPECT_LT(hh.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff(), 0.0);
}

TEST(Saddles, MonkeyAtUnitX) {
  const MonkeySaddle m;
  const auto [f, g] = m.value_and_gradient(Vector{{1.0, 0.0}});
  EXPECT_DOUBLE_EQ(f, 1.0);
  EXPECT_EQ(g, (Vector{{3.0, 0.0}}));
}

TEST(Rosenbrock, Values) {
  const auto r = descent::rosenbrock(1, 100);
  EXPECT_EQ(r.value(Vector{{1.0, 1.0}}), 0.0);
  EXPECT_DOUBLE_EQ(r.value(Vector::Zero(2)), 1.0);
  const auto r2 = descent::rosenbrock(2, 5);
  EXPECT_EQ(r2.value(r2.minimizer()), 0.0);
  EXPECT_EQ(r2.minimizer(), (Vector{{2.0, 4.0}}));
  EXPECT_THROW(descent::rosenbrock(1, 0), descent::ValidationError);
}

TEST(Rosenbrock, HessianMatchesFiniteDifferences) {
  const descent::Rosenbrock r(1, 100);
  RngStream rng(31);
  for (int k = 0; k < 50; ++k) {
    const Vector x = rng.uniform_vector(2, -2, 2);
    const Matrix fd = descent::finite_diff_hessian(r, x);
    EXPECT_LE((fd - r.hessian(x)).norm() / std::max(1.0, r.hessian(x).norm()), 1e-6);
  }
}

TEST(Objectives, GradientsMatchFiniteDifferences) {
  RngStream rng(37);
  for (const auto& c : descent::harness::shipped_gradient_cases(2)) {
    if (c.name.rfind("objective/", 0) != 0) continue;
    const auto r = descent::harness::gradcheck(c.name, *c.objective, 100, rng, c.sampler);
    EXPECT_TRUE(r.passed) << c.name << " max relative error " << r.max_relative_error;
  }
}

TEST(StrongConvexityWitness, IdentityModulusOne) {
  RngStream rng(1);
  const auto w = descent::strong_convexity_witness(QuadraticForm(Matrix::Identity(2, 2)), 1, 10000, rng);
  EXPECT_FALSE(w.violated());
  EXPECT_EQ(w.samples, 10000u);
}

TEST(StrongConvexityWitness, ModulusTooLarge) {
  RngStream rng(2);
  const auto w = descent::strong_convexity_witness(QuadraticForm::diagonal(Vector{{1.0, 100.0}}), 2, 10000, rng);
  ASSERT_TRUE(w.violated());
  EXPECT_GT(w.violation, 1e-9);
  const auto& [x, y] = *w.violated_pair;
  const QuadraticForm q = QuadraticForm::diagonal(Vector{{1.0, 100.0}});
  EXPECT_LT(q.value(y), q.value(x) + q.gradient(x).dot(y - x) + (y - x).squaredNorm() - 1e-9);
}

TEST(StrongConvexityWitness, SaddleIsNotConvex) {
  RngStream rng(3);
  EXPECT_TRUE(descent::strong_convexity_witness(HyperbolicSaddle(), 0, 10000, rng).violated());
}

TEST(StrongConvexityWitness, CustomBoxAndTrialCount) {
  RngStream rng(4);
  EXPECT_THROW(descent::strong_convexity_witness(HyperbolicSaddle(), 0, 0, rng), descent::ValidationError);
  const auto w = descent::strong_convexity_witness(QuadraticForm(Matrix::Identity(3, 3)), 0.5, 500, rng, {-10, 10});
  EXPECT_FALSE(w.violated());
}

TEST(PlGapBound, Examples) {
  const QuadraticForm half_sq(Matrix::Identity(1, 1));
  EXPECT_TRUE(descent::pl_gap_bound(half_sq, 0, 1, Vector{{3.0}}));
  EXPECT_TRUE(descent::pl_gap_bound(half_sq, 0, 1, Vector{{0.0}}));
  EXPECT_FALSE(descent::pl_gap_bound(QuadraticForm::diagonal(Vector{{1.0, 100.0}}), 0, 100, Vector{{1.0, 0.0}}));
  EXPECT_THROW(descent::pl_gap_bound(half_sq, 0, 0, Vector{{1.0}}), descent::ValidationError);
}

TEST(SaddleOrderWitness, HyperbolicFirstOrder) {
  RngStream rng(5);
  EXPECT_TRUE(descent::saddle_order_witness(HyperbolicSaddle(), Vector::Zero(2), 1, 2, 0.1, 20000, rng));
  EXPECT_FALSE(descent::saddle_order_witness(HyperbolicSaddle(), Vector::Zero(2), 1, 0.5, 0.1, 20000, rng));
}

TEST(SaddleOrderWitness, MonkeyFirstOrderHoldsOnlyLocally) {
  RngStream rng(6);
  EXPECT_TRUE(descent::saddle_order_witness(MonkeySaddle(), Vector::Zero(2), 1, 10, 0.1, 20000, rng));
  EXPECT_TRUE(descent::saddle_order_witness(MonkeySaddle(), Vector::Zero(2), 1, 10, 10, 20000, rng));
  EXPECT_FALSE(descent::saddle_order_witness(MonkeySaddle(), Vector::Zero(2), 1, 10, 20, 20000, rng));
}

TEST(SaddleOrderWitness, MonkeySecondOrder) {
  RngStream rng(7);
  EXPECT_TRUE(descent::saddle_order_witness(MonkeySaddle(), Vector::Zero(2), 2, 4, 0.1, 20000, rng));
  EXPECT_FALSE(descent::saddle_order_witness(MonkeySaddle(), Vector::Zero(2), 2, 0.5, 0.1, 20000, rng));
}

TEST(SaddleOrderWitness, RejectsNonCriticalPoint) {
  RngStream rng(8);
  EXPECT_THROW(descent::saddle_order_witness(HyperbolicSaddle(), Vector{{1.0, 0.0}}, 1, 2, 0.1, 10, rng),
               descent::ValidationError);
  EXPECT_THROW(descent::saddle_order_witness(HyperbolicSaddle(), Vector::Zero(2), 0, 2, 0.1, 10, rng),
               descent::ValidationError);
}
