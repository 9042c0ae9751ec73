#include "rescal/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "rescal/logit.hpp"

namespace rescal {

namespace {

std::vector<std::size_t> ranking(std::span<const std::uint8_t> labels,
                                 std::span<const double> scores, std::size_t& n_pos) {
  if (labels.size() != scores.size()) {
    throw Error("auc_pr: " + std::to_string(labels.size()) + " labels but " +
                std::to_string(scores.size()) + " scores");
  }
  n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) throw Error("auc_pr: labels must be 0 or 1");
    if (std::isnan(scores[i])) throw Error("auc_pr: NaN score at position " + std::to_string(i));
    n_pos += labels[i];
  }
  if (n_pos == 0) throw UndefinedMetricError("auc_pr is undefined without positive labels");
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

FoldPlan make_kfold(const SparseAdjacencyTensor& tensor, Index n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw ConfigError("k-fold needs n_folds >= 2, got " + std::to_string(n_folds));
  const Index n = tensor.n_entities();
  const Index population = n * n * tensor.n_relations();
  if (population < n_folds) {
    throw ConfigError("cell population " + std::to_string(population) + " is smaller than " +
                      std::to_string(n_folds) + " folds");
  }
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(population));
  for (Index k = 0; k < tensor.n_relations(); ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) cells.push_back({i, j, k});
  std::mt19937_64 gen(seed);
  std::shuffle(cells.begin(), cells.end(), gen);

  FoldPlan plan;
  plan.scope = "all-cells";
  plan.seed = seed;
  plan.folds.resize(static_cast<std::size_t>(n_folds));
  for (std::size_t p = 0; p < cells.size(); ++p)
    plan.folds[p % static_cast<std::size_t>(n_folds)].push_back(cells[p]);
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

FoldPlan make_targeted_folds(const SparseAdjacencyTensor& tensor, Index target_relation,
                             std::span<const Index> subjects) {
  if (target_relation < 0 || target_relation >= tensor.n_relations())
    throw IndexError("target relation " + std::to_string(target_relation) + " out of range");
  if (subjects.empty()) throw ConfigError("targeted folds need a non-empty subject set");
  std::vector<Index> unique(subjects.begin(), subjects.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  FoldPlan plan;
  plan.scope = "targeted";
  for (const Index e : unique) {
    if (e < 0 || e >= tensor.n_entities())
      throw IndexError("subject " + std::to_string(e) + " out of range");
    std::vector<Cell> fold;
    fold.reserve(static_cast<std::size_t>(tensor.n_entities()));
    for (Index j = 0; j < tensor.n_entities(); ++j) fold.push_back({e, j, target_relation});
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

double auc_pr(std::span<const std::uint8_t> labels, std::span<const double> scores) {
  std::size_t n_pos = 0;
  const auto order = ranking(labels, scores, n_pos);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 0) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  return sum / static_cast<double>(n_pos);
}

std::vector<PrPoint> pr_curve(std::span<const std::uint8_t> labels,
                              std::span<const double> scores) {
  std::size_t n_pos = 0;
  const auto order = ranking(labels, scores, n_pos);
  std::vector<PrPoint> curve;
  curve.reserve(order.size());
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    hits += labels[order[rank]];
    curve.push_back({static_cast<double>(hits) / static_cast<double>(n_pos),
                     static_cast<double>(hits) / static_cast<double>(rank + 1)});
  }
  return curve;
}

void summarize(EvaluationReport& report) {
  std::vector<double> values;
  report.n_skipped = 0;
  for (const auto& f : report.folds) {
    if (f.skipped) {
      ++report.n_skipped;
    } else {
      values.push_back(f.auc_pr);
    }
  }
  if (values.empty()) {
    report.mean = std::numeric_limits<double>::quiet_NaN();
    report.std = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  report.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - report.mean) * (v - report.mean);
  report.std = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
}

namespace {

FoldResult evaluate_fold(const SparseAdjacencyTensor& tensor, const Hyperparams& hp,
                         std::span<const Cell> cells, Index index, bool keep_scores) {
  FoldResult out;
  out.index = index;
  out.n_cells = static_cast<Index>(cells.size());
  std::vector<std::uint8_t> labels;
  labels.reserve(cells.size());
  for (const auto& c : cells) labels.push_back(tensor.contains(c) ? 1 : 0);
  out.n_pos = std::accumulate(labels.begin(), labels.end(), Index{0});
  if (out.n_pos == 0) {
    out.skipped = true;
    return out;
  }
  const SparseAdjacencyTensor train = mask_cells(tensor, cells);
  const auto [model, trace] = fit<double>(train, hp);
  std::vector<double> scores;
  scores.reserve(cells.size());
  for (const auto& c : cells) {
    scores.push_back(hp.solver == Solver::logit ? predict_proba(model, c.i, c.j, c.k)
                                                : score(model, c.i, c.j, c.k));
  }
  out.auc_pr = auc_pr(labels, scores);
  if (keep_scores) {
    out.cells.assign(cells.begin(), cells.end());
    out.labels = std::move(labels);
    out.scores = std::move(scores);
  }
  return out;
}

}  // namespace

EvaluationReport run_cv(const SparseAdjacencyTensor& tensor, const Hyperparams& hp,
                        const FoldPlan& plan, const CvOptions& opts) {
  validate(hp);
  const auto start = std::chrono::steady_clock::now();
  for (const auto& fold : plan.folds) {
    for (const auto& c : fold) {
      if (c.i < 0 || c.i >= tensor.n_entities() || c.j < 0 || c.j >= tensor.n_entities() ||
          c.k < 0 || c.k >= tensor.n_relations())
        throw IndexError("fold plan cell out of range for the tensor");
    }
  }

  const std::size_t n_folds = plan.folds.size();
  std::vector<FoldResult> results(n_folds);
  std::vector<std::exception_ptr> errors(n_folds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < n_folds; f = next++) {
      try {
        results[f] = evaluate_fold(tensor, hp, plan.folds[f], static_cast<Index>(f),
                                   opts.keep_scores);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, opts.jobs));
  if (n_workers == 1 || n_folds <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_workers, n_folds); ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  EvaluationReport report;
  report.dataset = opts.dataset;
  report.hyperparams = hp;
  report.dataset_checksum = opts.dataset_checksum;
  report.fold_seed = plan.seed;
  report.scope = plan.scope;
  report.folds = std::move(results);
  for (const auto& f : report.folds) {
    if (f.skipped) {
      report.warnings.push_back("fold " + std::to_string(f.index) +
                                " has no held-out positive; skipped");
    }
  }
  summarize(report);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

EvaluationReport run_targeted(const SparseAdjacencyTensor& tensor, const Hyperparams& hp,
                              Index target_relation,
                              const std::vector<std::vector<Index>>& subject_groups,
                              const CvOptions& opts) {
  if (subject_groups.empty()) throw ConfigError("targeted protocol needs at least one group");
  const auto start = std::chrono::steady_clock::now();
  EvaluationReport pooled;
  for (const auto& group : subject_groups) {
    const FoldPlan plan = make_targeted_folds(tensor, target_relation, group);
    EvaluationReport part = run_cv(tensor, hp, plan, opts);
    for (auto& f : part.folds) {
      f.index = static_cast<Index>(pooled.folds.size());
      pooled.folds.push_back(std::move(f));
    }
  }
  pooled.dataset = opts.dataset;
  pooled.hyperparams = hp;
  pooled.dataset_checksum = opts.dataset_checksum;
  pooled.scope = "targeted";
  for (const auto& f : pooled.folds) {
    if (f.skipped) {
      pooled.warnings.push_back("fold " + std::to_string(f.index) +
                                " has no held-out positive; skipped");
    }
  }
  summarize(pooled);
  pooled.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return pooled;
}

nlohmann::json to_json(const Hyperparams& hp) {
  return {
      {"rank", hp.rank},
      {"lambda_a", hp.lambda_a},
      {"lambda_r", hp.lambda_r},
      {"solver", std::string(to_string(hp.solver))},
      {"max_iter", hp.max_iter},
      {"tol", hp.tol},
      {"seed", hp.seed},
      {"init", hp.init ? nlohmann::json(std::string(to_string(*hp.init))) : nlohmann::json()},
      {"dense_cap", hp.dense_cap},
  };
}

void from_json(const nlohmann::json& j, Hyperparams& hp) {
  try {
    if (j.contains("rank")) hp.rank = j.at("rank").get<Index>();
    if (j.contains("lambda_a")) hp.lambda_a = j.at("lambda_a").get<double>();
    if (j.contains("lambda_r")) hp.lambda_r = j.at("lambda_r").get<double>();
    if (j.contains("solver")) hp.solver = parse_solver(j.at("solver").get<std::string>());
    if (j.contains("max_iter")) hp.max_iter = j.at("max_iter").get<Index>();
    if (j.contains("tol")) hp.tol = j.at("tol").get<double>();
    if (j.contains("seed")) hp.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("init") && !j.at("init").is_null())
      hp.init = parse_init(j.at("init").get<std::string>());
    if (j.contains("dense_cap")) hp.dense_cap = j.at("dense_cap").get<Index>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad hyperparameter field: ") + e.what());
  }
}

namespace {
nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
}
}  // namespace

nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"index", f.index},
                     {"auc_pr", f.skipped ? nlohmann::json() : nlohmann::json(f.auc_pr)},
                     {"n_pos", f.n_pos},
                     {"n_cells", f.n_cells},
                     {"skipped", f.skipped}});
  }
  return {
      {"dataset", report.dataset},
      {"dataset_checksum", report.dataset_checksum},
      {"solver", std::string(to_string(report.hyperparams.solver))},
      {"hyperparams", to_json(report.hyperparams)},
      {"scope", report.scope},
      {"folds", folds},
      {"mean", finite_or_null(report.mean)},
      {"std", finite_or_null(report.std)},
      {"n_skipped", report.n_skipped},
      {"seed", report.fold_seed},
      {"wall_time", report.wall_time},
  };
}

}  // namespace rescal
