#include <doctest.h>

#include <cmath>
#include <random>

#include "rescal/lbfgs.hpp"

using namespace rescal;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  const double a = 1.0 - x(0);
  const double b = x(1) - x(0) * x(0);
  g(0) = -2.0 * a - 400.0 * x(0) * b;
  g(1) = 200.0 * b;
  return a * a + 100.0 * b * b;
}

void check_strictly_decreasing(const FitTrace& trace) {
  double prev = trace.initial_objective;
  for (double f : trace.objective) {
    CHECK(f < prev);
    prev = f;
  }
}

}  // namespace

TEST_CASE("exact quadratic converges to its center") {
  Eigen::VectorXd c(4);
  c << 1.0, -2.0, 3.5, 0.25;
  auto f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * (x - c);
    return (x - c).squaredNorm();
  };
  LbfgsOptions opts;
  opts.grad_tol = 1e-10;
  opts.rel_tol = 0.0;
  for (double start : {0.0, 100.0, -7.0}) {
    const auto res = lbfgs_minimize<double>(f, Eigen::VectorXd::Constant(4, start), opts);
    CHECK((res.x - c).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(res.trace.iterations_run <= 10);
    CHECK(res.trace.converged);
  }
}

TEST_CASE("Rosenbrock from (-1.2, 1)") {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  LbfgsOptions opts;
  opts.grad_tol = 1e-9;
  opts.rel_tol = 0.0;
  opts.max_iter = 200;
  const auto res = lbfgs_minimize<double>(rosenbrock, x0, opts);
  CHECK(res.f < 1e-8);
  CHECK(std::abs(res.x(0) - 1.0) < 1e-3);
  CHECK(std::abs(res.x(1) - 1.0) < 1e-3);
  check_strictly_decreasing(res.trace);
}

TEST_CASE("gradient already below tolerance returns x0 with zero iterations") {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(3, 1e-9);
  const auto res = lbfgs_minimize<double>(f, x0, LbfgsOptions{});
  CHECK(res.x == x0);
  CHECK(res.trace.iterations_run == 0);
  CHECK(res.trace.objective.empty());
  CHECK(res.trace.converged);
}

TEST_CASE("random 50-D convex quadratic") {
  std::mt19937_64 gen(50);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(50, 50);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
  const Eigen::MatrixXd q = m.transpose() * m / 50.0 + Eigen::MatrixXd::Identity(50, 50);
  Eigen::VectorXd b(50);
  for (Index i = 0; i < 50; ++i) b(i) = normal(gen);
  auto f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = q * x - b;
    return 0.5 * x.dot(q * x) - b.dot(x);
  };
  LbfgsOptions opts;
  opts.grad_tol = 1e-7;
  opts.rel_tol = 0.0;
  const auto res = lbfgs_minimize<double>(f, Eigen::VectorXd::Zero(50), opts);
  CHECK((q * res.x - b).norm() < 1e-6);
  CHECK(res.trace.iterations_run <= 60);
  check_strictly_decreasing(res.trace);
}

TEST_CASE("non-finite objective aborts with a state dump") {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = Eigen::VectorXd::Ones(x.size());
    return std::nan("");
  };
  CHECK_THROWS_WITH_AS(lbfgs_minimize<double>(f, Eigen::VectorXd::Zero(2), LbfgsOptions{}),
                       doctest::Contains("non-finite"), NumericalError);
}

TEST_CASE("line search failure returns the best iterate unconverged") {
  // The reported gradient points the wrong way, so no step decreases f.
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = -2.0 * x;
    return x.squaredNorm();
  };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(2, 1.0);
  const auto res = lbfgs_minimize<double>(f, x0, LbfgsOptions{});
  CHECK_FALSE(res.trace.converged);
  CHECK(res.trace.diagnostic.find("line search") != std::string::npos);
  CHECK(res.x == x0);
}

TEST_CASE("option validation") {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = x;
    return 0.5 * x.squaredNorm();
  };
  LbfgsOptions bad;
  bad.c1 = 0.95;
  CHECK_THROWS_AS(lbfgs_minimize<double>(f, Eigen::VectorXd::Ones(2), bad), ConfigError);
  bad = LbfgsOptions{};
  bad.memory = 0;
  CHECK_THROWS_AS(lbfgs_minimize<double>(f, Eigen::VectorXd::Ones(2), bad), ConfigError);
}

TEST_CASE("max_iter bounds the work") {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  LbfgsOptions opts;
  opts.max_iter = 3;
  opts.rel_tol = 0.0;
  const auto res = lbfgs_minimize<double>(rosenbrock, x0, opts);
  CHECK(res.trace.iterations_run == 3);
  CHECK_FALSE(res.trace.converged);
  CHECK(res.trace.diagnostic == "max_iter reached");
}
