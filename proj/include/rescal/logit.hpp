#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rescal/als.hpp"
#include "rescal/error.hpp"
#include "rescal/lbfgs.hpp"
#include "rescal/model.hpp"
#include "rescal/tensor.hpp"
#include "rescal/trace.hpp"

namespace rescal {

/// Flat parameter vector: A row-major, then R_0 .. R_{K-1} row-major.
template <typename Scalar>
using FlatParams = VectorX<Scalar>;

template <typename Scalar>
using RowMajorMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Index flat_size(Index n_entities, Index n_relations, Index rank) {
  return n_entities * rank + n_relations * rank * rank;
}

template <typename Scalar>
FlatParams<Scalar> pack(const FactorModel<Scalar>& m) {
  const Index n = m.n_entities();
  const Index r = m.rank();
  FlatParams<Scalar> out(flat_size(n, m.n_relations(), r));
  Eigen::Map<RowMajorMatrixX<Scalar>>(out.data(), n, r) = m.A;
  Index offset = n * r;
  for (const auto& rk : m.R) {
    Eigen::Map<RowMajorMatrixX<Scalar>>(out.data() + offset, r, r) = rk;
    offset += r * r;
  }
  return out;
}

template <typename Scalar>
FactorModel<Scalar> unpack(const FlatParams<Scalar>& flat, Index n_entities, Index n_relations,
                           Index rank) {
  if (flat.size() != flat_size(n_entities, n_relations, rank)) {
    throw DimensionError("flat parameter vector has " + std::to_string(flat.size()) +
                         " entries, expected " +
                         std::to_string(flat_size(n_entities, n_relations, rank)));
  }
  FactorModel<Scalar> m;
  m.A = Eigen::Map<const RowMajorMatrixX<Scalar>>(flat.data(), n_entities, rank);
  Index offset = n_entities * rank;
  for (Index k = 0; k < n_relations; ++k) {
    m.R.emplace_back(Eigen::Map<const RowMajorMatrixX<Scalar>>(flat.data() + offset, rank, rank));
    offset += rank * rank;
  }
  return m;
}

/// Regularized Bernoulli negative log-likelihood over all N^2 K cells and
/// its gradient, on slices materialized once at construction.
template <typename Scalar>
class LogitObjective {
 public:
  LogitObjective(const SparseAdjacencyTensor& tensor, Index rank, const Hyperparams& hp)
      : n_(tensor.n_entities()),
        k_(tensor.n_relations()),
        rank_(rank),
        lambda_a_(hp.lambda_a),
        lambda_r_(hp.lambda_r),
        slices_(dense_slices<Scalar>(tensor, hp.dense_cap)) {}

  [[nodiscard]] Index size() const { return flat_size(n_, k_, rank_); }

  /// Loss at `model`; fills the packed gradient when `grad` is non-null.
  Scalar evaluate(const FactorModel<Scalar>& model, FlatParams<Scalar>* grad) const {
    const auto& A = model.A;
    const Index r = rank_;
    Scalar loss(0);
    MatrixX<Scalar> grad_a;
    if (grad) {
      grad->resize(size());
      grad_a = MatrixX<Scalar>::Zero(n_, r);
    }
    Index offset = n_ * r;
    for (Index k = 0; k < k_; ++k) {
      const auto& rk = model.R[static_cast<std::size_t>(k)];
      const auto& xk = slices_[static_cast<std::size_t>(k)];
      const MatrixX<Scalar> a_rk = A * rk;
      const MatrixX<Scalar> theta = a_rk * A.transpose();
      loss += xk.binaryExpr(theta, [](Scalar x, Scalar t) {
                  return x * softplus(Scalar(-t)) + (Scalar(1) - x) * softplus(t);
                }).sum();
      if (!grad) continue;
      const MatrixX<Scalar> err =
          theta.unaryExpr([](Scalar t) { return stable_sigmoid(t); }) - xk;
      const MatrixX<Scalar> a_rkt = A * rk.transpose();
      grad_a.noalias() += err * a_rkt;
      grad_a.noalias() += err.transpose() * a_rk;
      const MatrixX<Scalar> err_a = err * A;
      MatrixX<Scalar> grad_rk = A.transpose() * err_a;
      grad_rk += Scalar(2 * lambda_r_) * rk;
      Eigen::Map<RowMajorMatrixX<Scalar>>(grad->data() + offset, r, r) = grad_rk;
      offset += r * r;
    }
    Scalar penalty_r(0);
    for (const auto& rk : model.R) penalty_r += rk.squaredNorm();
    loss += Scalar(lambda_a_) * A.squaredNorm() + Scalar(lambda_r_) * penalty_r;
    if (grad) {
      grad_a += Scalar(2 * lambda_a_) * A;
      Eigen::Map<RowMajorMatrixX<Scalar>>(grad->data(), n_, r) = grad_a;
    }
    return loss;
  }

  /// Adapter for lbfgs_minimize.
  Scalar operator()(const FlatParams<Scalar>& x, FlatParams<Scalar>& grad) const {
    return evaluate(unpack(x, n_, k_, rank_), &grad);
  }

 private:
  Index n_;
  Index k_;
  Index rank_;
  double lambda_a_;
  double lambda_r_;
  std::vector<MatrixX<Scalar>> slices_;
};

/// -sum_ijk [x log sigma(theta) + (1 - x) log(1 - sigma(theta))]
///   + lambda_a ||A||_F^2 + lambda_r sum_k ||R_k||_F^2
template <typename Scalar>
Scalar loss_logit(const SparseAdjacencyTensor& tensor, const FactorModel<Scalar>& m,
                  const Hyperparams& hp) {
  detail::check_dims(tensor, m);
  return LogitObjective<Scalar>(tensor, m.rank(), hp).evaluate(m, nullptr);
}

/// Packed analytic gradient of loss_logit. With E_k = sigma(A R_k A^T) - X_k:
///   dA   = sum_k E_k A R_k^T + E_k^T A R_k + 2 lambda_a A
///   dR_k = A^T E_k A + 2 lambda_r R_k
template <typename Scalar>
FlatParams<Scalar> grad_logit(const SparseAdjacencyTensor& tensor, const FactorModel<Scalar>& m,
                              const Hyperparams& hp) {
  detail::check_dims(tensor, m);
  FlatParams<Scalar> grad;
  LogitObjective<Scalar>(tensor, m.rank(), hp).evaluate(m, &grad);
  return grad;
}

/// L-BFGS settings used by fit_logit: defaults with max_iter and rel_tol
/// taken from the hyperparameters.
inline LbfgsOptions lbfgs_options_for(const Hyperparams& hp) {
  LbfgsOptions opts;
  opts.max_iter = hp.max_iter;
  opts.rel_tol = hp.tol;
  return opts;
}

template <typename Scalar = double>
std::pair<FactorModel<Scalar>, FitTrace> fit_logit(const SparseAdjacencyTensor& tensor,
                                                   const Hyperparams& hp,
                                                   const LbfgsOptions& opts) {
  validate(hp);
  if (hp.solver != Solver::logit) throw ConfigError("fit_logit called with solver != logit");
  const FactorModel<Scalar> init = init_model<Scalar>(tensor, hp);
  const LogitObjective<Scalar> objective(tensor, hp.rank, hp);
  auto result = lbfgs_minimize<Scalar>(objective, pack(init), opts);
  return {unpack(result.x, tensor.n_entities(), tensor.n_relations(), hp.rank),
          std::move(result.trace)};
}

template <typename Scalar = double>
std::pair<FactorModel<Scalar>, FitTrace> fit_logit(const SparseAdjacencyTensor& tensor,
                                                   const Hyperparams& hp) {
  return fit_logit<Scalar>(tensor, hp, lbfgs_options_for(hp));
}

/// Dispatches on hp.solver.
template <typename Scalar = double>
std::pair<FactorModel<Scalar>, FitTrace> fit(const SparseAdjacencyTensor& tensor,
                                             const Hyperparams& hp) {
  return hp.solver == Solver::als ? fit_als<Scalar>(tensor, hp) : fit_logit<Scalar>(tensor, hp);
}

}  // namespace rescal
