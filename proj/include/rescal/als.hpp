#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rescal/error.hpp"
#include "rescal/model.hpp"
#include "rescal/tensor.hpp"
#include "rescal/trace.hpp"

namespace rescal {

namespace detail {
template <typename Scalar>
void check_dims(const SparseAdjacencyTensor& tensor, const FactorModel<Scalar>& m) {
  if (m.n_entities() != tensor.n_entities() || m.n_relations() != tensor.n_relations()) {
    throw DimensionError("model is " + std::to_string(m.n_entities()) + " entities x " +
                         std::to_string(m.n_relations()) + " relations, tensor is " +
                         std::to_string(tensor.n_entities()) + " x " +
                         std::to_string(tensor.n_relations()));
  }
  check_model(m);
}
}  // namespace detail

/// sum_k ||X_k - A R_k A^T||_F^2 + lambda_a ||A||_F^2 + lambda_r sum_k ||R_k||_F^2,
/// evaluated on dense slices.
template <typename Scalar>
Scalar objective_als(const SparseAdjacencyTensor& tensor, const FactorModel<Scalar>& m,
                     const Hyperparams& hp) {
  detail::check_dims(tensor, m);
  check_dense_cap(tensor.n_entities(), hp.dense_cap);
  Scalar loss(0);
  for (Index k = 0; k < tensor.n_relations(); ++k) {
    MatrixX<Scalar> residual = score_slice(m, k, hp.dense_cap);
    residual = dense_slice<Scalar>(tensor, k, hp.dense_cap) - residual;
    loss += residual.squaredNorm();
  }
  Scalar penalty_r(0);
  for (const auto& rk : m.R) penalty_r += rk.squaredNorm();
  return loss + Scalar(hp.lambda_a) * m.A.squaredNorm() + Scalar(hp.lambda_r) * penalty_r;
}

/// Linearized least-squares update of A with every R_k fixed:
///   A <- [sum_k X_k A R_k^T + X_k^T A R_k] [sum_k R_k A^T A R_k^T + R_k^T A^T A R_k + lambda_a I]^-1
/// where A on the right-hand side is the previous iterate.
template <typename Scalar>
MatrixX<Scalar> update_A(const SparseAdjacencyTensor& tensor, const FactorModel<Scalar>& m,
                         const Hyperparams& hp) {
  detail::check_dims(tensor, m);
  const Index r = m.rank();
  const MatrixX<Scalar> gram = m.A.transpose() * m.A;
  MatrixX<Scalar> numer = MatrixX<Scalar>::Zero(m.n_entities(), r);
  MatrixX<Scalar> denom = MatrixX<Scalar>::Zero(r, r);
  for (Index k = 0; k < tensor.n_relations(); ++k) {
    const auto& rk = m.R[static_cast<std::size_t>(k)];
    const MatrixX<Scalar> a_rkt = m.A * rk.transpose();
    const MatrixX<Scalar> a_rk = m.A * rk;
    numer += slice_times(tensor, k, a_rkt);
    numer += slice_transpose_times(tensor, k, a_rk);
    denom += rk * gram * rk.transpose();
    denom += rk.transpose() * gram * rk;
  }
  denom.diagonal().array() += Scalar(hp.lambda_a);

  const Eigen::LLT<MatrixX<Scalar>> llt(denom);
  const Scalar scale = denom.diagonal().cwiseAbs().maxCoeff();
  const bool singular = llt.info() != Eigen::Success || !(scale > Scalar(0)) ||
                        llt.rcond() < Scalar(r) * std::numeric_limits<Scalar>::epsilon();
  if (singular) {
    throw NumericalError(
        "A-update normal equations are singular (lambda_a = " + std::to_string(hp.lambda_a) +
        "); use lambda_a > 0");
  }
  // denom is symmetric, so A = numer * denom^-1 solves denom * A^T = numer^T.
  MatrixX<Scalar> next = llt.solve(numer.transpose()).transpose();
  return next;
}

/// Ridge solve for every R_k given a fixed A, via the thin SVD A = U S V^T:
///   R_k = V [ (s_p s_q / (s_p^2 s_q^2 + lambda_r)) * (U^T X_k U)_pq ] V^T,
/// the minimizer of ||X_k - A R_k A^T||_F^2 + lambda_r ||R_k||_F^2. With
/// lambda_r = 0 this is the minimum-norm (pseudo-inverse) solution.
template <typename Scalar>
class RidgeRSolver {
 public:
  RidgeRSolver(const MatrixX<Scalar>& A, double lambda_r) {
    Eigen::JacobiSVD<MatrixX<Scalar>, Eigen::ColPivHouseholderQRPreconditioner> svd(
        A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u_ = svd.matrixU();
    v_ = svd.matrixV();
    const VectorX<Scalar> s = svd.singularValues();
    const Index m = s.size();
    const Scalar lambda(lambda_r);
    const Scalar smax = m > 0 ? s(0) : Scalar(0);
    const Scalar cutoff = std::numeric_limits<Scalar>::epsilon() *
                          Scalar(std::max(A.rows(), A.cols())) * smax * smax;
    shrink_.resize(m, m);
    for (Index p = 0; p < m; ++p) {
      for (Index q = 0; q < m; ++q) {
        const Scalar prod = s(p) * s(q);
        if (lambda == Scalar(0) && prod <= cutoff) {
          shrink_(p, q) = Scalar(0);
        } else {
          shrink_(p, q) = prod / (prod * prod + lambda);
        }
      }
    }
  }

  MatrixX<Scalar> solve(const SparseAdjacencyTensor& tensor, Index k) const {
    const MatrixX<Scalar> xu = slice_times(tensor, k, u_);
    const MatrixX<Scalar> projected = u_.transpose() * xu;
    const MatrixX<Scalar> core = shrink_.cwiseProduct(projected);
    return v_ * core * v_.transpose();
  }

 private:
  MatrixX<Scalar> u_;
  MatrixX<Scalar> v_;
  MatrixX<Scalar> shrink_;
};

/// Exact minimizer of the R_k block for fixed A.
template <typename Scalar>
MatrixX<Scalar> update_R(const SparseAdjacencyTensor& tensor, const FactorModel<Scalar>& m,
                         const Hyperparams& hp, Index k) {
  detail::check_dims(tensor, m);
  if (k < 0 || k >= tensor.n_relations()) throw IndexError("relation index out of range");
  return RidgeRSolver<Scalar>(m.A, hp.lambda_r).solve(tensor, k);
}

/// Entity factors from the r eigenvectors of sum_k (X_k + X_k^T) with the
/// largest |eigenvalue|, relation factors from the ridge R-update.
template <typename Scalar = double>
FactorModel<Scalar> init_nvecs(const SparseAdjacencyTensor& tensor, const Hyperparams& hp) {
  validate(hp);
  const Index n = tensor.n_entities();
  if (n < 1 || tensor.n_relations() < 1)
    throw ConfigError("model initialization needs N >= 1 and K >= 1");
  if (hp.rank > n) {
    throw ConfigError("nvecs initialization needs rank <= N (rank " + std::to_string(hp.rank) +
                      ", N " + std::to_string(n) + ")");
  }
  check_dense_cap(n, hp.dense_cap);
  MatrixX<Scalar> sym = MatrixX<Scalar>::Zero(n, n);
  for (Index k = 0; k < tensor.n_relations(); ++k) {
    for (const auto& c : tensor.slice(k)) {
      sym(c.row, c.col) += Scalar(1);
      sym(c.col, c.row) += Scalar(1);
    }
  }
  const Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("nvecs eigendecomposition failed");

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = n - 1 - i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    using std::abs;
    return abs(eig.eigenvalues()(a)) > abs(eig.eigenvalues()(b));
  });

  FactorModel<Scalar> m;
  m.A.resize(n, hp.rank);
  for (Index c = 0; c < hp.rank; ++c) {
    VectorX<Scalar> col = eig.eigenvectors().col(order[static_cast<std::size_t>(c)]);
    Index pivot = 0;
    col.cwiseAbs().maxCoeff(&pivot);
    if (col(pivot) < Scalar(0)) col = -col;
    m.A.col(c) = col;
  }
  const RidgeRSolver<Scalar> ridge(m.A, hp.lambda_r);
  for (Index k = 0; k < tensor.n_relations(); ++k) m.R.push_back(ridge.solve(tensor, k));
  return m;
}

/// Initialization honoring hp.effective_init().
template <typename Scalar = double>
FactorModel<Scalar> init_model(const SparseAdjacencyTensor& tensor, const Hyperparams& hp) {
  if (hp.effective_init() == InitMethod::nvecs) return init_nvecs<Scalar>(tensor, hp);
  return init_random<Scalar>(tensor.n_entities(), tensor.n_relations(), hp);
}

/// Alternates update_A and update_R (all k) until the relative objective
/// change drops below hp.tol or hp.max_iter sweeps have run.
template <typename Scalar = double>
std::pair<FactorModel<Scalar>, FitTrace> fit_als(const SparseAdjacencyTensor& tensor,
                                                 const Hyperparams& hp) {
  validate(hp);
  if (hp.solver != Solver::als) throw ConfigError("fit_als called with solver != als");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  FactorModel<Scalar> m = init_model<Scalar>(tensor, hp);
  FitTrace trace;
  Scalar previous = objective_als(tensor, m, hp);
  trace.initial_objective = static_cast<double>(previous);

  for (Index sweep = 0; sweep < hp.max_iter; ++sweep) {
    m.A = update_A(tensor, m, hp);
    const RidgeRSolver<Scalar> ridge(m.A, hp.lambda_r);
    for (Index k = 0; k < tensor.n_relations(); ++k)
      m.R[static_cast<std::size_t>(k)] = ridge.solve(tensor, k);

    const Scalar current = objective_als(tensor, m, hp);
    if (!std::isfinite(static_cast<double>(current))) {
      throw NumericalError("ALS objective became non-finite at sweep " + std::to_string(sweep + 1));
    }
    trace.objective.push_back(static_cast<double>(current));
    trace.seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
    trace.iterations_run = sweep + 1;
    if (relative_change_below(static_cast<double>(previous), static_cast<double>(current),
                              hp.tol)) {
      trace.converged = true;
      break;
    }
    previous = current;
  }
  trace.wall_time = std::chrono::duration<double>(clock::now() - start).count();
  if (!trace.converged) trace.diagnostic = "max_iter reached";
  return {std::move(m), std::move(trace)};
}

}  // namespace rescal
