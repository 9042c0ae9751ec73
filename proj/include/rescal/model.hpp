#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rescal/error.hpp"
#include "rescal/tensor.hpp"

namespace rescal {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Solver : std::uint8_t { als = 0, logit = 1 };
enum class InitMethod : std::uint8_t { random = 0, nvecs = 1 };

std::string_view to_string(Solver s);
std::string_view to_string(InitMethod m);
Solver parse_solver(std::string_view text);
InitMethod parse_init(std::string_view text);

struct Hyperparams {
  Index rank = 10;
  double lambda_a = 10.0;
  double lambda_r = 10.0;
  Solver solver = Solver::als;
  Index max_iter = 500;
  double tol = 1e-5;
  std::uint64_t seed = 0;
  /// Unset means the solver default: nvecs for als, random for logit.
  std::optional<InitMethod> init;
  Index dense_cap = kDefaultDenseCap;

  [[nodiscard]] InitMethod effective_init() const {
    if (init) return *init;
    return solver == Solver::als ? InitMethod::nvecs : InitMethod::random;
  }
};

/// Throws ConfigError on rank < 1, negative lambdas, tol <= 0, max_iter < 1.
void validate(const Hyperparams& hp);

/// Latent factors: A (N x r, row i embeds entity i) and one full r x r
/// interaction matrix per relation.
template <typename Scalar = double>
struct FactorModel {
  MatrixX<Scalar> A;
  std::vector<MatrixX<Scalar>> R;

  [[nodiscard]] Index n_entities() const { return A.rows(); }
  [[nodiscard]] Index n_relations() const { return static_cast<Index>(R.size()); }
  [[nodiscard]] Index rank() const { return A.cols(); }

  friend bool operator==(const FactorModel& a, const FactorModel& b) {
    if (a.A.rows() != b.A.rows() || a.A.cols() != b.A.cols() || a.R.size() != b.R.size())
      return false;
    if (a.A != b.A) return false;
    for (std::size_t k = 0; k < a.R.size(); ++k) {
      if (a.R[k].rows() != b.R[k].rows() || a.R[k].cols() != b.R[k].cols() || a.R[k] != b.R[k])
        return false;
    }
    return true;
  }

  template <typename Other>
  [[nodiscard]] FactorModel<Other> cast() const {
    FactorModel<Other> out;
    out.A = A.template cast<Other>();
    for (const auto& r : R) out.R.push_back(r.template cast<Other>());
    return out;
  }
};

/// Throws DimensionError on shape mismatches and NumericalError on NaN/Inf.
template <typename Scalar>
void check_model(const FactorModel<Scalar>& m) {
  const Index r = m.rank();
  for (std::size_t k = 0; k < m.R.size(); ++k) {
    if (m.R[k].rows() != r || m.R[k].cols() != r) {
      throw DimensionError("R[" + std::to_string(k) + "] is not " + std::to_string(r) + "x" +
                           std::to_string(r));
    }
    if (!m.R[k].allFinite()) throw NumericalError("R[" + std::to_string(k) + "] is not finite");
  }
  if (!m.A.allFinite()) throw NumericalError("A is not finite");
}

/// Entries drawn i.i.d. from Normal(0, 0.1^2), A first (row-major) then each
/// R_k. Throws ConfigError when hp asks for nvecs, which needs the tensor.
template <typename Scalar = double>
FactorModel<Scalar> init_random(Index n_entities, Index n_relations, const Hyperparams& hp) {
  validate(hp);
  if (n_entities < 1 || n_relations < 1)
    throw ConfigError("model initialization needs N >= 1 and K >= 1");
  std::mt19937_64 gen(hp.seed);
  std::normal_distribution<double> normal(0.0, 0.1);
  FactorModel<Scalar> m;
  m.A.resize(n_entities, hp.rank);
  for (Index i = 0; i < n_entities; ++i)
    for (Index c = 0; c < hp.rank; ++c) m.A(i, c) = static_cast<Scalar>(normal(gen));
  m.R.assign(static_cast<std::size_t>(n_relations), MatrixX<Scalar>(hp.rank, hp.rank));
  for (auto& rk : m.R)
    for (Index a = 0; a < hp.rank; ++a)
      for (Index b = 0; b < hp.rank; ++b) rk(a, b) = static_cast<Scalar>(normal(gen));
  return m;
}

/// Model without data: only the random scheme is available.
template <typename Scalar = double>
FactorModel<Scalar> init_model(Index n_entities, Index n_relations, const Hyperparams& hp) {
  if (hp.effective_init() == InitMethod::nvecs)
    throw ConfigError("nvecs initialization requires the tensor");
  return init_random<Scalar>(n_entities, n_relations, hp);
}

namespace detail {
template <typename Scalar>
void check_cell(const FactorModel<Scalar>& m, Index i, Index j, Index k) {
  if (i < 0 || i >= m.n_entities() || j < 0 || j >= m.n_entities() || k < 0 ||
      k >= m.n_relations()) {
    throw IndexError("cell (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                     std::to_string(k) + ") out of range for N = " +
                     std::to_string(m.n_entities()) + ", K = " + std::to_string(m.n_relations()));
  }
}
}  // namespace detail

/// Bilinear score a_i^T R_k a_j, evaluated as (a_i^T R_k) . a_j.
template <typename Scalar>
Scalar score(const FactorModel<Scalar>& m, Index i, Index j, Index k) {
  detail::check_cell(m, i, j, k);
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> left = m.A.row(i) * m.R[static_cast<std::size_t>(k)];
  return left.dot(m.A.row(j));
}

/// A R_k A^T as a dense N x N matrix.
template <typename Scalar>
MatrixX<Scalar> score_slice(const FactorModel<Scalar>& m, Index k,
                            Index dense_cap = kDefaultDenseCap) {
  if (k < 0 || k >= m.n_relations()) throw IndexError("relation index out of range");
  check_dense_cap(m.n_entities(), dense_cap);
  const MatrixX<Scalar> left = m.A * m.R[static_cast<std::size_t>(k)];
  return left * m.A.transpose();
}

/// Logistic function without overflow for large |x|.
template <typename Scalar>
Scalar stable_sigmoid(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

/// log(1 + exp(x)) = log1p(exp(-|x|)) + max(x, 0).
template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::abs;
  using std::exp;
  using std::log1p;
  return log1p(exp(-abs(x))) + (x > Scalar(0) ? x : Scalar(0));
}

/// stable_sigmoid clamped to the open interval (0, 1); saturated scores map
/// to the nearest representable value inside it.
template <typename Scalar>
Scalar open_unit_sigmoid(Scalar x) {
  using std::nextafter;
  const Scalar p = stable_sigmoid(x);
  const Scalar hi = nextafter(Scalar(1), Scalar(0));
  const Scalar lo = std::numeric_limits<Scalar>::min();
  return p > hi ? hi : (p < lo ? lo : p);
}

/// Bernoulli parameter sigma(theta_ijk).
template <typename Scalar>
Scalar predict_proba(const FactorModel<Scalar>& m, Index i, Index j, Index k) {
  return open_unit_sigmoid(score(m, i, j, k));
}

}  // namespace rescal
