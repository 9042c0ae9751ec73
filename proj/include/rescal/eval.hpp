#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rescal/model.hpp"
#include "rescal/tensor.hpp"

namespace rescal {

/// Disjoint held-out cell sets. `scope` names the partitioned population.
struct FoldPlan {
  std::vector<std::vector<Cell>> folds;
  std::string scope;
  std::uint64_t seed = 0;
};

/// Shuffles all N^2 K cells with the seeded generator and deals them
/// round-robin into `n_folds` sets (each fold sorted).
FoldPlan make_kfold(const SparseAdjacencyTensor& tensor, Index n_folds, std::uint64_t seed);

/// One fold per subject e in `subjects`: all cells (e, j, target_relation).
FoldPlan make_targeted_folds(const SparseAdjacencyTensor& tensor, Index target_relation,
                             std::span<const Index> subjects);

/// Average precision: scores sorted descending, ties broken by ascending
/// position; sum over positives of precision at their rank, divided by the
/// number of positives.
double auc_pr(std::span<const std::uint8_t> labels, std::span<const double> scores);

struct PrPoint {
  double recall;
  double precision;
};

/// Precision/recall after each rank of the same ordering auc_pr uses.
std::vector<PrPoint> pr_curve(std::span<const std::uint8_t> labels,
                              std::span<const double> scores);

struct FoldResult {
  Index index = 0;
  double auc_pr = 0.0;
  Index n_pos = 0;
  Index n_cells = 0;
  bool skipped = false;
  /// Filled when CvOptions::keep_scores is set.
  std::vector<Cell> cells;
  std::vector<std::uint8_t> labels;
  std::vector<double> scores;
};

struct EvaluationReport {
  std::string dataset;
  Hyperparams hyperparams;
  std::uint64_t dataset_checksum = 0;
  std::uint64_t fold_seed = 0;
  std::string scope;
  std::vector<FoldResult> folds;
  double mean = 0.0;
  double std = 0.0;
  Index n_skipped = 0;
  std::vector<std::string> warnings;
  double wall_time = 0.0;
};

struct CvOptions {
  std::string dataset = "unnamed";
  std::uint64_t dataset_checksum = 0;
  /// Worker threads for fold-level parallelism.
  int jobs = 1;
  bool keep_scores = false;
};

/// Fills mean and sample standard deviation from the non-skipped folds.
void summarize(EvaluationReport& report);

/// For every fold: zero the fold's cells, fit with hp.solver, score the
/// held-out cells (logit: sigma(theta), als: theta) and compute AUC-PR
/// against the original labels. Folds without a held-out positive are
/// marked skipped and excluded from the mean.
EvaluationReport run_cv(const SparseAdjacencyTensor& tensor, const Hyperparams& hp,
                        const FoldPlan& plan, const CvOptions& opts = {});

/// Runs one targeted plan per subject group over `target_relation` and pools
/// the folds into a single report (fold indices renumbered in order).
EvaluationReport run_targeted(const SparseAdjacencyTensor& tensor, const Hyperparams& hp,
                              Index target_relation,
                              const std::vector<std::vector<Index>>& subject_groups,
                              const CvOptions& opts = {});

nlohmann::json to_json(const Hyperparams& hp);
/// Missing keys keep the values already in `hp`.
void from_json(const nlohmann::json& j, Hyperparams& hp);

/// {dataset, solver, hyperparams, folds: [...], mean, std, seed, ...}.
nlohmann::json to_json(const EvaluationReport& report);

}  // namespace rescal
