#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "rescal/eval.hpp"
#include "rescal/logit.hpp"
#include "rescal/model_io.hpp"
#include "rescal/tensor.hpp"

#ifndef RESCAL_GIT_DESCRIBE
#define RESCAL_GIT_DESCRIBE "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace rescal::cli {

namespace {

constexpr const char* kModelName = "model.rescal";
constexpr const char* kEntitiesName = "entities.tsv";
constexpr const char* kRelationsName = "relations.tsv";

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string fmt_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void require_file(const std::string& path, const char* what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw UsageError(std::string(what) + " not found: '" + path + "'");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

template <typename Tag>
std::string dictionary_text(const LabelDictionary<Tag>& dict) {
  std::ostringstream s;
  write_dictionary(s, dict);
  return s.str();
}

std::string trace_csv(const FitTrace& trace) {
  std::ostringstream s;
  s << "iter,objective,seconds\n";
  s << "0," << fmt_double(trace.initial_objective) << ",0\n";
  for (std::size_t t = 0; t < trace.objective.size(); ++t)
    s << t + 1 << ',' << fmt_double(trace.objective[t]) << ',' << fmt_double(trace.seconds[t])
      << '\n';
  return s.str();
}

std::string curve_csv(const std::vector<PrPoint>& curve) {
  std::ostringstream s;
  s << "recall,precision\n";
  for (const auto& p : curve) s << fmt_double(p.recall) << ',' << fmt_double(p.precision) << '\n';
  return s.str();
}

json manifest(const std::string& command, const RunConfig& config, std::uint64_t checksum,
              json extra = json::object()) {
  json m = {{"command", command},
            {"config", to_json(config)},
            {"seed", config.hp.seed},
            {"dataset_checksum", checksum},
            {"git_describe", RESCAL_GIT_DESCRIBE}};
  for (auto& [key, value] : extra.items()) m[key] = value;
  return m;
}

/// RunConfig flags shared by `train` and `cv`; applied over the config file.
struct ConfigFlags {
  std::string config_path;
  std::string dataset, output, solver, init;
  Index rank = 0, max_iter = 0, folds = 0, dense_cap = 0;
  double lambda_a = 0, lambda_r = 0, tol = 0;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> options;
  CLI::Option *o_dataset{}, *o_output{}, *o_solver{}, *o_init{}, *o_rank{}, *o_max_iter{},
      *o_folds{}, *o_dense_cap{}, *o_lambda_a{}, *o_lambda_r{}, *o_tol{}, *o_seed{};

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config or manifest from a previous run");
    o_dataset = app->add_option("dataset,--dataset", dataset, "Triple file (subject<TAB>relation<TAB>object)");
    o_output = app->add_option("-o,--output", output, "Output directory");
    o_solver = app->add_option("--solver", solver, "als | logit");
    o_init = app->add_option("--init", init, "random | nvecs");
    o_rank = app->add_option("--rank", rank, "Latent dimension r");
    o_lambda_a = app->add_option("--lambda_a", lambda_a, "Penalty on A");
    o_lambda_r = app->add_option("--lambda_r", lambda_r, "Penalty on each R_k");
    o_tol = app->add_option("--tol", tol, "Relative objective change for convergence");
    o_max_iter = app->add_option("--max_iter", max_iter, "Iteration budget");
    o_seed = app->add_option("--seed", seed, "Seed for initialization and fold assignment");
    o_folds = app->add_option("--folds", folds, "Number of cross-validation folds");
    o_dense_cap = app->add_option("--dense_cap", dense_cap, "Largest N the dense solvers accept");
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_path.empty()) {
      require_file(config_path, "config file");
      json j;
      try {
        j = json::parse(slurp(config_path));
      } catch (const json::parse_error& e) {
        throw ConfigError("config '" + config_path + "' is not valid JSON: " + e.what());
      }
      c = config_from_json(j);
    }
    if (*o_dataset) c.dataset = dataset;
    if (*o_output) c.output = output;
    if (*o_solver) c.hp.solver = parse_solver(solver);
    if (*o_init) c.hp.init = parse_init(init);
    if (*o_rank) c.hp.rank = rank;
    if (*o_lambda_a) c.hp.lambda_a = lambda_a;
    if (*o_lambda_r) c.hp.lambda_r = lambda_r;
    if (*o_tol) c.hp.tol = tol;
    if (*o_max_iter) c.hp.max_iter = max_iter;
    if (*o_seed) c.hp.seed = seed;
    if (*o_folds) c.folds = folds;
    if (*o_dense_cap) c.hp.dense_cap = dense_cap;
    validate(c);
    return c;
  }
};

LabeledTensor load_dataset(const std::string& path) {
  require_file(path, "dataset");
  const auto triples = read_triple_file(path);
  if (triples.empty()) throw ParseError("dataset '" + path + "' contains no triples");
  return from_triples(triples);
}

struct LoadedModel {
  ModelFile file;
  EntityDictionary entities;
  RelationDictionary relations;
};

template <typename Tag>
LabelDictionary<Tag> load_dictionary(const std::string& path) {
  require_file(path, "dictionary");
  std::ifstream in(path);
  return read_dictionary<Tag>(in, path);
}

LoadedModel load_model_dir(const std::string& dir) {
  std::error_code ec;
  const std::string model_path = fs::is_directory(dir, ec) ? join(dir, kModelName) : dir;
  const std::string base = fs::path(model_path).parent_path().string();
  require_file(model_path, "model file");
  LoadedModel m{load_model(model_path), load_dictionary<EntityTag>(join(base, kEntitiesName)),
                load_dictionary<RelationTag>(join(base, kRelationsName))};
  if (m.entities.size() != m.file.header.n_entities ||
      m.relations.size() != m.file.header.n_relations)
    throw DimensionError("dictionaries next to '" + model_path + "' do not match the model (" +
                         std::to_string(m.entities.size()) + " entities, " +
                         std::to_string(m.relations.size()) + " relations vs N = " +
                         std::to_string(m.file.header.n_entities) +
                         ", K = " + std::to_string(m.file.header.n_relations) + ")");
  return m;
}

std::vector<std::string> read_label_lines(const std::string& path) {
  require_file(path, "subject file");
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto label = trim(line);
    if (label.empty() || label.front() == '#') continue;
    out.push_back(std::move(label));
  }
  return out;
}

// -- train -----------------------------------------------------------------

int cmd_train(const ConfigFlags& flags, std::ostream& out, std::ostream& err) {
  const RunConfig config = flags.resolve();
  const auto data = load_dataset(config.dataset);
  const auto checksum = dataset_checksum(data);
  err << "train: " << data.entities.size() << " entities, " << data.relations.size()
      << " relations, " << data.tensor.nnz() << " triples; solver " << to_string(config.hp.solver)
      << ", rank " << config.hp.rank << '\n';

  const auto [model, trace] = fit<double>(data.tensor, config.hp);

  ensure_dir(config.output);
  const auto model_path = join(config.output, kModelName);
  save_model(model_path, model, config.hp, checksum);
  write_file_atomic(join(config.output, "trace.csv"), trace_csv(trace));
  write_file_atomic(join(config.output, kEntitiesName), dictionary_text(data.entities));
  write_file_atomic(join(config.output, kRelationsName), dictionary_text(data.relations));
  write_file_atomic(join(config.output, "manifest.json"),
                    manifest("train", config, checksum).dump(2) + "\n");

  const double final_objective =
      trace.objective.empty() ? trace.initial_objective : trace.objective.back();
  err << "final objective " << fmt_double(final_objective) << " after " << trace.iterations_run
      << " iterations (" << (trace.converged ? "converged" : trace.diagnostic) << "), wall time "
      << trace.wall_time << " s\n";
  out << json{{"command", "train"},
              {"model", model_path},
              {"objective", final_objective},
              {"iterations", trace.iterations_run},
              {"converged", trace.converged},
              {"diagnostic", trace.diagnostic},
              {"wall_time", trace.wall_time}}
             .dump()
      << '\n';
  return 0;
}

// -- cv --------------------------------------------------------------------

struct CvFlags {
  int jobs = 1;
  std::string target_relation;
  std::vector<std::string> subject_files;
};

int cmd_cv(const ConfigFlags& flags, const CvFlags& cv, std::ostream& out, std::ostream& err) {
  const RunConfig config = flags.resolve();
  if (cv.jobs < 1) throw ConfigError("--jobs must be >= 1 (got " + std::to_string(cv.jobs) + ")");
  const bool targeted = !cv.target_relation.empty();
  if (targeted && cv.subject_files.empty())
    throw ConfigError("--target-relation needs at least one --subjects file");
  if (!targeted && !cv.subject_files.empty())
    throw ConfigError("--subjects requires --target-relation");

  const auto data = load_dataset(config.dataset);
  const auto checksum = dataset_checksum(data);
  CvOptions opts;
  opts.dataset = config.dataset;
  opts.dataset_checksum = checksum;
  opts.jobs = cv.jobs;
  opts.keep_scores = true;

  json extra = json::object();
  EvaluationReport report;
  if (targeted) {
    const Index k = data.relations.find(cv.target_relation);
    if (k < 0) throw ConfigError("unknown relation '" + cv.target_relation + "'");
    std::vector<std::vector<Index>> groups;
    for (const auto& file : cv.subject_files) {
      auto& group = groups.emplace_back();
      for (const auto& label : read_label_lines(file)) {
        const Index e = data.entities.find(label);
        if (e < 0) throw ConfigError("unknown entity '" + label + "' in '" + file + "'");
        group.push_back(e);
      }
    }
    extra["targeted"] = {{"relation", cv.target_relation}, {"subjects", cv.subject_files}};
    err << "cv: targeted protocol on relation " << cv.target_relation << ", " << groups.size()
        << " subject group(s)\n";
    report = run_targeted(data.tensor, config.hp, k, groups, opts);
  } else {
    err << "cv: " << config.folds << " folds over all " << data.tensor.n_entities() << "^2 x "
        << data.tensor.n_relations() << " cells, solver " << to_string(config.hp.solver) << '\n';
    report = run_cv(data.tensor, config.hp, make_kfold(data.tensor, config.folds, config.hp.seed),
                    opts);
  }

  ensure_dir(config.output);
  const auto curve_dir = join(config.output, "curves");
  ensure_dir(curve_dir);
  for (const auto& fold : report.folds) {
    if (fold.skipped) continue;
    std::ostringstream name;
    name << "fold-" << std::setw(3) << std::setfill('0') << fold.index << ".csv";
    write_file_atomic(join(curve_dir, name.str()), curve_csv(pr_curve(fold.labels, fold.scores)));
  }
  const auto report_path = join(config.output, "report.json");
  write_file_atomic(report_path, to_json(report).dump(2) + "\n");
  write_file_atomic(join(config.output, "manifest.json"),
                    manifest("cv", config, checksum, extra).dump(2) + "\n");

  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  err << "AUC-PR " << std::fixed << std::setprecision(4) << report.mean << " +/- " << report.std
      << " over " << report.folds.size() - static_cast<std::size_t>(report.n_skipped)
      << " fold(s), wall time " << std::setprecision(2) << report.wall_time << " s\n"
      << std::defaultfloat;
  auto summary = json{{"command", "cv"},
                      {"report", report_path},
                      {"mean", std::isfinite(report.mean) ? json(report.mean) : json()},
                      {"std", std::isfinite(report.std) ? json(report.std) : json()},
                      {"n_folds", report.folds.size()},
                      {"n_skipped", report.n_skipped},
                      {"wall_time", report.wall_time}};
  out << summary.dump() << '\n';
  return report.n_skipped == static_cast<Index>(report.folds.size()) ? 1 : 0;
}

// -- predict ---------------------------------------------------------------

struct Ranked {
  Index index;
  double theta;
};

int cmd_predict(const std::string& model_dir, const std::string& query_file, Index top,
                std::istream& in, std::ostream& out, std::ostream& err) {
  const auto loaded = load_model_dir(model_dir);
  const auto& m = loaded.file.model;
  std::ifstream file_in;
  if (!query_file.empty() && query_file != "-") {
    require_file(query_file, "query file");
    file_in.open(query_file);
  }
  std::istream& queries = file_in.is_open() ? file_in : in;

  auto emit = [&](double theta) {
    out << fmt_double(theta) << '\t' << fmt_double(open_unit_sigmoid(theta)) << '\n';
  };

  Index answered = 0, failed = 0, line_no = 0;
  std::string line;
  while (std::getline(queries, line)) {
    ++line_no;
    const auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    try {
      std::vector<std::string> fields;
      std::size_t start = 0;
      for (;;) {
        const auto tab = line.find('\t', start);
        fields.push_back(trim(std::string_view(line).substr(start, tab - start)));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (fields.size() != 3)
        throw ParseError("expected subject<TAB>relation<TAB>object, got " +
                         std::to_string(fields.size()) + " field(s)");
      const auto wildcards = std::count(fields.begin(), fields.end(), "?");
      if (wildcards > 1) throw ParseError("at most one '?' per query");

      auto entity = [&](const std::string& label) {
        const Index i = loaded.entities.find(label);
        if (i < 0) throw IndexError("unknown entity '" + label + "'");
        return i;
      };
      auto relation = [&](const std::string& label) {
        const Index k = loaded.relations.find(label);
        if (k < 0) throw IndexError("unknown relation '" + label + "'");
        return k;
      };

      if (wildcards == 0) {
        emit(score(m, entity(fields[0]), entity(fields[2]), relation(fields[1])));
      } else {
        std::vector<Ranked> ranked;
        if (fields[0] == "?") {
          const Index k = relation(fields[1]), j = entity(fields[2]);
          for (Index i = 0; i < m.n_entities(); ++i) ranked.push_back({i, score(m, i, j, k)});
        } else if (fields[1] == "?") {
          const Index i = entity(fields[0]), j = entity(fields[2]);
          for (Index k = 0; k < m.n_relations(); ++k) ranked.push_back({k, score(m, i, j, k)});
        } else {
          const Index i = entity(fields[0]), k = relation(fields[1]);
          for (Index j = 0; j < m.n_entities(); ++j) ranked.push_back({j, score(m, i, j, k)});
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const Ranked& a, const Ranked& b) { return a.theta > b.theta; });
        if (top > 0 && static_cast<Index>(ranked.size()) > top) ranked.resize(top);
        for (const auto& r : ranked) {
          out << (fields[1] == "?" ? loaded.relations.label(r.index) : loaded.entities.label(r.index))
              << '\t';
          emit(r.theta);
        }
      }
      ++answered;
    } catch (const Error& e) {
      ++failed;
      err << "line " << line_no << ": " << e.what() << '\n';
    }
  }
  out << json{{"command", "predict"}, {"answered", answered}, {"failed", failed}}.dump() << '\n';
  return (failed > 0 && answered == 0) ? 1 : 0;
}

// -- inspect ---------------------------------------------------------------

int cmd_inspect(const std::string& path, std::ostream& out) {
  std::error_code ec;
  const std::string model_path = fs::is_directory(path, ec) ? join(path, kModelName) : path;
  require_file(model_path, "model file");
  std::ifstream in(model_path, std::ios::binary);
  const auto h = read_model_header(in);
  out << json{{"command", "inspect"},
              {"path", model_path},
              {"version", h.version},
              {"n_entities", h.n_entities},
              {"n_relations", h.n_relations},
              {"rank", h.rank},
              {"hyperparams", rescal::to_json(h.hyperparams)},
              {"dataset_checksum", h.dataset_checksum}}
             .dump()
      << '\n';
  return 0;
}

// -- export-curve ----------------------------------------------------------

int cmd_export_curve(const std::string& model_dir, const std::string& truth_path,
                     const std::string& relation, std::string output, std::ostream& out,
                     std::ostream& err) {
  const auto loaded = load_model_dir(model_dir);
  const auto& m = loaded.file.model;
  require_file(truth_path, "triple file");
  const auto triples = read_triple_file(truth_path);

  std::vector<Index> relations;
  if (relation.empty()) {
    relations.resize(static_cast<std::size_t>(m.n_relations()));
    std::iota(relations.begin(), relations.end(), Index{0});
  } else {
    const Index k = loaded.relations.find(relation);
    if (k < 0) throw ConfigError("unknown relation '" + relation + "'");
    relations.push_back(k);
  }

  const Index n = m.n_entities();
  std::vector<std::vector<Coord>> slices(static_cast<std::size_t>(m.n_relations()));
  Index unknown = 0;
  for (const auto& t : triples) {
    const Index i = loaded.entities.find(t.subject), j = loaded.entities.find(t.object),
                k = loaded.relations.find(t.relation);
    if (i < 0 || j < 0 || k < 0) {
      ++unknown;
      continue;
    }
    slices[static_cast<std::size_t>(k)].push_back({i, j});
  }
  if (unknown > 0)
    err << "warning: " << unknown << " triple(s) use labels outside the model and were ignored\n";
  const SparseAdjacencyTensor truth(n, m.n_relations(), std::move(slices));

  std::vector<std::uint8_t> labels;
  std::vector<double> scores;
  for (Index k : relations) {
    const auto theta = score_slice(m, k);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        labels.push_back(truth.contains(i, j, k) ? 1 : 0);
        scores.push_back(theta(i, j));
      }
  }
  const double area = auc_pr(labels, scores);
  if (output.empty()) output = "curve.csv";
  write_file_atomic(output, curve_csv(pr_curve(labels, scores)));
  const auto n_pos = std::count(labels.begin(), labels.end(), std::uint8_t{1});
  err << "AUC-PR " << fmt_double(area) << " over " << labels.size() << " cells (" << n_pos
      << " positive)\n";
  out << json{{"command", "export-curve"},
              {"curve", output},
              {"auc_pr", area},
              {"n_pos", n_pos},
              {"n_cells", labels.size()}}
             .dump()
      << '\n';
  return 0;
}

// -- fetch-data ------------------------------------------------------------

int cmd_fetch(const std::string& url, const std::string& output, std::ostream& out,
              std::ostream& err) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw UsageError("URL needs a scheme: '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  if (!client.is_valid()) throw UsageError("unsupported URL: '" + url + "'");
  client.set_follow_location(true);
  client.set_connection_timeout(15);
  client.set_read_timeout(120);
  err << "fetching " << url << '\n';
  const auto res = client.Get(path);
  if (!res) throw Error("download of '" + url + "' failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error("download of '" + url + "' failed: HTTP " + std::to_string(res->status));

  std::istringstream body(res->body);
  const auto triples = read_triples(body, url);
  if (triples.empty()) throw ParseError("'" + url + "' contains no triples");
  const auto data = from_triples(triples);
  const auto parent = fs::path(output).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  write_file_atomic(output, res->body);
  err << "wrote " << output << ": " << triples.size() << " triples, " << data.entities.size()
      << " entities, " << data.relations.size() << " relations\n";
  out << json{{"command", "fetch-data"},
              {"url", url},
              {"path", output},
              {"bytes", res->body.size()},
              {"triples", triples.size()},
              {"n_entities", data.entities.size()},
              {"n_relations", data.relations.size()},
              {"dataset_checksum", dataset_checksum(data)}}
             .dump()
      << '\n';
  return 0;
}

}  // namespace

json to_json(const RunConfig& config) {
  json j = rescal::to_json(config.hp);
  j["dataset"] = config.dataset;
  j["output"] = config.output;
  j["folds"] = config.folds;
  return j;
}

RunConfig config_from_json(const json& root) {
  const json& j = root.contains("config") && root.at("config").is_object() ? root.at("config") : root;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {"dataset", "output", "solver",   "rank",
                                                 "lambda_a", "lambda_r", "tol",   "max_iter",
                                                 "seed",    "folds",  "init",     "dense_cap"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config field '" + key + "'");
  RunConfig c;
  rescal::from_json(j, c.hp);
  try {
    if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("folds")) c.folds = j.at("folds").get<Index>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  return c;
}

void validate(const RunConfig& config) {
  rescal::validate(config.hp);
  if (config.dataset.empty()) throw ConfigError("no dataset given");
  if (config.output.empty()) throw ConfigError("output directory must be nonempty");
  if (config.folds < 2)
    throw ConfigError("folds must be >= 2 (got " + std::to_string(config.folds) + ")");
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + tmp + "' for writing");
    f << content;
    f.flush();
    if (!f) throw Error("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Bilinear factorization of multi-relational data", "rescal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(RESCAL_GIT_DESCRIBE));

  ConfigFlags train_flags, cv_flags;
  auto* train = app.add_subcommand("train", "Fit a model and write it with its trace");
  train_flags.attach(train);
  auto* cv = app.add_subcommand("cv", "Cross-validate and write report.json plus PR curves");
  cv_flags.attach(cv);
  CvFlags cv_extra;
  cv->add_option("--jobs", cv_extra.jobs, "Folds fitted in parallel");
  cv->add_option("--target-relation", cv_extra.target_relation,
                 "Hold out one relation per subject instead of random cells");
  cv->add_option("--subjects", cv_extra.subject_files,
                 "File of entity labels forming one subject group (repeatable)");

  std::string model_dir, query_file, inspect_path, truth_path, relation, curve_out, url, fetch_out;
  Index top = 0;
  auto* predict = app.add_subcommand("predict", "Score queries subject<TAB>relation<TAB>object");
  predict->add_option("model", model_dir, "Training output directory or model file")->required();
  predict->add_option("queries", query_file, "Query file (default: stdin)");
  predict->add_option("--top", top, "Keep the best n candidates of a wildcard query");

  auto* inspect = app.add_subcommand("inspect", "Print a model header as JSON");
  inspect->add_option("model", inspect_path, "Model file or training output directory")->required();

  auto* export_curve = app.add_subcommand("export-curve", "PR curve of a model against a triple file");
  export_curve->add_option("model", model_dir, "Training output directory or model file")->required();
  export_curve->add_option("triples", truth_path, "Triple file holding the true relations")->required();
  export_curve->add_option("--relation", relation, "Restrict to one relation");
  export_curve->add_option("-o,--output", curve_out, "CSV path (default: curve.csv)");

  auto* fetch = app.add_subcommand("fetch-data", "Download a triple file and check that it parses");
  fetch->add_option("url", url, "http(s) URL of the triple file")->required();
  fetch->add_option("-o,--output", fetch_out, "Destination path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << RESCAL_GIT_DESCRIBE << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train) return cmd_train(train_flags, out, err);
    if (*cv) return cmd_cv(cv_flags, cv_extra, out, err);
    if (*predict) return cmd_predict(model_dir, query_file, top, in, out, err);
    if (*inspect) return cmd_inspect(inspect_path, out);
    if (*export_curve) return cmd_export_curve(model_dir, truth_path, relation, curve_out, out, err);
    if (*fetch) return cmd_fetch(url, fetch_out, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rescal::cli
