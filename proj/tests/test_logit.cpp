#include <doctest.h>

#include <cmath>
#include <random>

#include "rescal/logit.hpp"
#include "test_oracles.hpp"

using namespace rescal;

namespace {

Hyperparams logit_hp(Index rank, double lambda, std::uint64_t seed = 0) {
  Hyperparams hp;
  hp.rank = rank;
  hp.lambda_a = lambda;
  hp.lambda_r = lambda;
  hp.solver = Solver::logit;
  hp.seed = seed;
  return hp;
}

FactorModel<double> scaled_random(Index n, Index k, Index r, std::uint64_t seed, double scale) {
  Hyperparams hp = logit_hp(r, 0.0, seed);
  auto m = init_model(n, k, hp);
  m.A *= scale;
  for (auto& rk : m.R) rk *= scale;
  return m;
}

double cross_entropy(const SparseAdjacencyTensor& t, const FactorModel<double>& m) {
  Hyperparams hp = logit_hp(m.rank(), 0.0);
  return loss_logit(t, m, hp);
}

}  // namespace

TEST_CASE("loss_logit examples") {
  std::mt19937_64 gen(1);
  const auto t = oracle::random_tensor(gen, 3, 2, 0.5);
  FactorModel<double> zero;
  zero.A = Eigen::MatrixXd::Zero(3, 2);
  zero.R.assign(2, Eigen::MatrixXd::Zero(2, 2));
  CHECK(loss_logit(t, zero, logit_hp(2, 0.0)) ==
        doctest::Approx(9 * 2 * std::log(2.0)).epsilon(1e-14));

  const SparseAdjacencyTensor one(1, 1, {{{0, 0}}});
  FactorModel<double> m;
  m.A = Eigen::MatrixXd::Ones(1, 1);
  m.R = {Eigen::MatrixXd::Constant(1, 1, 2.0)};
  CHECK(loss_logit(one, m, logit_hp(1, 0.0)) ==
        doctest::Approx(0.12692801104297250).epsilon(1e-14));

  const SparseAdjacencyTensor none(1, 1, {{}});
  m.R[0](0, 0) = 0.0;
  CHECK(loss_logit(none, m, logit_hp(1, 0.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  // Saturated scores stay finite.
  m.R[0](0, 0) = -1e4;
  const double big = loss_logit(one, m, logit_hp(1, 0.0));
  CHECK(std::isfinite(big));
  CHECK(big == doctest::Approx(1e4));

  Hyperparams capped = logit_hp(1, 0.0);
  capped.dense_cap = 0;
  CHECK_THROWS_AS(loss_logit(one, m, capped), ResourceLimitError);
}

TEST_CASE("grad_logit examples") {
  // theta == 0 and X == 0 with A = I: dR = A^T (J/2) A = J/2.
  const SparseAdjacencyTensor zero(3, 1, {{}});
  FactorModel<double> m;
  m.A = Eigen::MatrixXd::Identity(3, 3);
  m.R = {Eigen::MatrixXd::Zero(3, 3)};
  const auto g = grad_logit(zero, m, logit_hp(3, 0.0));
  const auto dr = unpack(g, 3, 1, 3).R[0];
  CHECK((dr - Eigen::MatrixXd::Constant(3, 3, 0.5)).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 gen(2);
  const auto t = oracle::random_tensor(gen, 4, 2, 0.5);
  auto origin = scaled_random(4, 2, 2, 3, 1.0);
  origin.A.setZero();
  const auto g0 = grad_logit(t, origin, logit_hp(2, 0.0));
  CHECK(g0.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("property: analytic gradient matches central differences") {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> pick_n(1, 6), pick_k(1, 3), pick_r(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = pick_n(gen), k = pick_k(gen), r = pick_r(gen);
    const double lambda = trial % 2 ? 0.1 : 0.0;
    const auto t = oracle::random_tensor(gen, n, k, 0.4);
    const auto m = scaled_random(n, k, r, gen(), 8.0);
    const Hyperparams hp = logit_hp(r, lambda);
    const Eigen::VectorXd analytic = grad_logit(t, m, hp);
    const Eigen::VectorXd numeric = oracle::central_difference(
        [&](const Eigen::VectorXd& x) { return loss_logit(t, unpack(x, n, k, r), hp); }, pack(m),
        1e-5);
    CHECK(oracle::max_relative_error(analytic, numeric) <= 1e-5);
  }
}

TEST_CASE("property: pack/unpack is a bit-exact bijection") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = scaled_random(2 + static_cast<Index>(seed), 1 + seed % 3, 1 + seed % 4, seed, 3.0);
    const auto flat = pack(m);
    CHECK(flat.size() == flat_size(m.n_entities(), m.n_relations(), m.rank()));
    CHECK(unpack(flat, m.n_entities(), m.n_relations(), m.rank()) == m);
    CHECK(pack(unpack(flat, m.n_entities(), m.n_relations(), m.rank())) == flat);
  }
  CHECK_THROWS_AS(unpack<double>(Eigen::VectorXd::Zero(3), 2, 1, 2), DimensionError);
}

TEST_CASE("fit_logit: single positive cell pushes sigma towards one") {
  const SparseAdjacencyTensor one(1, 1, {{{0, 0}}});
  Hyperparams hp = logit_hp(1, 0.0, 4);
  hp.max_iter = 50;
  const auto [m, trace] = fit_logit(one, hp);
  CHECK(score(m, 0, 0, 0) > 0.0);
  CHECK(predict_proba(m, 0, 0, 0) > 0.9);
}

TEST_CASE("fit_logit: planted model beats the maximum-entropy baseline by 30%") {
  const Index n = 10, k = 2, r = 3;
  const auto truth = scaled_random(n, k, r, 2718, 15.0);
  std::vector<std::vector<Coord>> slices(k);
  for (Index kk = 0; kk < k; ++kk)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (stable_sigmoid(score(truth, i, j, kk)) > 0.5) slices[kk].push_back({i, j});
  const SparseAdjacencyTensor t(n, k, slices);
  Hyperparams hp = logit_hp(r, 0.01, 5);
  hp.tol = 1e-9;
  const auto [m, trace] = fit_logit(t, hp);
  const double baseline = static_cast<double>(n * n * k) * std::log(2.0);
  CHECK(cross_entropy(t, m) <= 0.7 * baseline);

  const auto [m2, trace2] = fit_logit(t, hp);
  CHECK(trace.objective == trace2.objective);
  CHECK(m == m2);
  double prev = trace.initial_objective;
  for (double f : trace.objective) {
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("property: fitted norms shrink along a regularization ladder") {
  // Structured data so that the weakest penalty still leaves a nonzero fit.
  const auto truth = scaled_random(12, 2, 3, 31, 15.0);
  std::vector<std::vector<Coord>> slices(2);
  for (Index kk = 0; kk < 2; ++kk)
    for (Index i = 0; i < 12; ++i)
      for (Index j = 0; j < 12; ++j)
        if (score(truth, i, j, kk) > 0.0) slices[kk].push_back({i, j});
  const SparseAdjacencyTensor t(12, 2, slices);
  // Norms at or below the optimizer's resolution count as zero.
  constexpr double slack = 1e-6;
  double prev_a = std::numeric_limits<double>::infinity();
  std::vector<double> prev_r(2, std::numeric_limits<double>::infinity());
  for (double lambda : {0.01, 1.0, 10.0, 100.0, 1000.0}) {
    Hyperparams hp = logit_hp(3, lambda, 9);
    hp.tol = 1e-12;
    const auto [m, trace] = fit_logit(t, hp);
    if (lambda == 0.01) CHECK(m.A.norm() > 0.1);
    CHECK(m.A.norm() <= prev_a + slack);
    prev_a = m.A.norm();
    for (std::size_t kk = 0; kk < 2; ++kk) {
      CHECK(m.R[kk].norm() <= prev_r[kk] + slack);
      prev_r[kk] = m.R[kk].norm();
    }
  }
  CHECK(prev_a < 1e-3);
}

TEST_CASE("fit_logit rejects the als solver") {
  const SparseAdjacencyTensor t(2, 1, {{{0, 1}}});
  Hyperparams hp = logit_hp(1, 1.0);
  hp.solver = Solver::als;
  CHECK_THROWS_AS(fit_logit(t, hp), ConfigError);
}
