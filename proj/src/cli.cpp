#include "papermatch/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "papermatch/bpmf.hpp"
#include "papermatch/corpus.hpp"
#include "papermatch/corpus_io.hpp"
#include "papermatch/evaluator.hpp"
#include "papermatch/lm.hpp"
#include "papermatch/lr.hpp"
#include "papermatch/matcher.hpp"
#include "papermatch/rng.hpp"

namespace papermatch {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct MatcherFlags {
  int r_target = 1;
  int p_min = 20;
  int p_max = 30;
  double lambda = 0.0;
  std::string penalty = "abs";
  std::string transform = "identity";
  double beta = 4.5;
  double midpoint = 1.5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--r-target", r_target, "Reviewers per paper");
    cmd->add_option("--p-min", p_min, "Minimum papers per reviewer");
    cmd->add_option("--p-max", p_max, "Maximum papers per reviewer");
    cmd->add_option("--lambda", lambda, "Load-balance penalty weight");
    cmd->add_option("--penalty", penalty, "Penalty shape: abs|square")
        ->check(CLI::IsMember({"abs", "square"}));
    cmd->add_option("--transform", transform, "Objective transform: identity|sigmoid")
        ->check(CLI::IsMember({"identity", "sigmoid"}));
    cmd->add_option("--beta", beta, "Sigmoid steepness");
    cmd->add_option("--midpoint", midpoint, "Sigmoid midpoint");
  }

  MatcherConfig to_config() const {
    MatcherConfig config;
    config.r_target = r_target;
    config.p_min = p_min;
    config.p_max = p_max;
    config.lambda = lambda;
    config.penalty_shape = penalty == "abs" ? PenaltyShape::abs : PenaltyShape::square;
    if (transform == "sigmoid")
      config.transform = TransformSpec{TransformSpec::Kind::sigmoid, beta, midpoint};
    return config;
  }

  json to_json() const {
    return json{{"r_target", r_target}, {"p_min", p_min},     {"p_max", p_max},
                {"lambda", lambda},     {"penalty", penalty}, {"transform", transform},
                {"beta", beta},         {"midpoint", midpoint}};
  }
};

struct DataFlags {
  std::string data_dir;
  std::string scores, papers, archives, coi, ground_truth;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", data_dir,
                    "Directory with scores.csv/papers.jsonl/... "
                    "(individual flags override)");
    cmd->add_option("--scores", scores, "Scores CSV");
    cmd->add_option("--papers", papers, "Paper documents JSONL");
    cmd->add_option("--archives", archives, "Reviewer archive documents JSONL");
    cmd->add_option("--coi", coi, "Conflict-of-interest CSV");
    cmd->add_option("--ground-truth", ground_truth, "Full true scores CSV");
  }

  void resolve() {
    if (data_dir.empty()) return;
    auto fill = [&](std::string& slot, const char* name) {
      if (!slot.empty()) return;
      const fs::path candidate = fs::path(data_dir) / name;
      if (fs::exists(candidate)) slot = candidate.string();
    };
    fill(scores, "scores.csv");
    fill(papers, "papers.jsonl");
    fill(archives, "archives.jsonl");
    fill(coi, "coi.csv");
    fill(ground_truth, "ground_truth.csv");
  }

  CorpusPaths to_paths() const {
    CorpusPaths paths;
    paths.scores = scores;
    paths.papers = papers;
    paths.archives = archives;
    paths.coi = coi;
    paths.ground_truth = ground_truth;
    return paths;
  }

  json to_json() const {
    return json{{"scores", scores},
                {"papers", papers},
                {"archives", archives},
                {"coi", coi},
                {"ground_truth", ground_truth}};
  }
};

struct ModelFlags {
  double mu = 1000.0;
  double ridge = 1.0;
  int latent_dim = 10;
  int samples = 330;
  int burnin = 30;
  double sigma2 = 0.5;
  std::size_t vocab_size = 1000;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mu", mu, "LM Dirichlet smoothing");
    cmd->add_option("--ridge", ridge, "LR ridge regularization");
    cmd->add_option("--latent-dim", latent_dim, "Factorization latent dimension");
    cmd->add_option("--samples", samples, "Gibbs sweeps, burn-in included");
    cmd->add_option("--burnin", burnin, "Gibbs burn-in sweeps");
    cmd->add_option("--sigma2", sigma2, "Factorization noise variance");
    cmd->add_option("--vocab-size", vocab_size, "Vocabulary size for loaded corpora");
  }

  BpmfOptions bpmf(ScoreRange range) const {
    BpmfOptions opts;
    opts.K = latent_dim;
    opts.n_samples = samples;
    opts.n_burnin = burnin;
    opts.sigma2 = sigma2;
    opts.score_range = range;
    return opts;
  }

  json to_json() const {
    return json{{"mu", mu},         {"ridge", ridge},   {"latent_dim", latent_dim},
                {"samples", samples}, {"burnin", burnin}, {"sigma2", sigma2},
                {"vocab_size", vocab_size}};
  }
};

void ensure_out_dir(const std::string& out) {
  if (out.empty()) throw std::runtime_error("--out is required");
  fs::create_directories(out);
}

void write_config(const std::string& out, const json& config) {
  write_file_atomic(fs::path(out) / "config.json", config.dump(2) + "\n");
}

int cmd_gen(const SyntheticConfig& config, const std::string& out) {
  ensure_out_dir(out);
  const Corpus corpus = generate_synthetic(config);
  const fs::path dir(out);

  write_scores_csv(dir / "scores.csv", corpus.scores, corpus.reviewer_ids,
                   corpus.paper_ids);
  write_scores_csv(dir / "ground_truth.csv", *corpus.ground_truth,
                   corpus.reviewer_ids, corpus.paper_ids);
  write_coi_csv(dir / "coi.csv", corpus.coi, corpus.reviewer_ids, corpus.paper_ids);

  std::vector<std::pair<std::string, DocumentVector>> papers;
  for (int p = 0; p < corpus.n_papers(); ++p)
    papers.emplace_back(corpus.paper_ids[p], corpus.paper_docs[p]);
  write_documents_jsonl(dir / "papers.jsonl", papers, corpus.vocabulary);

  std::vector<std::pair<std::string, DocumentVector>> archives;
  for (int r = 0; r < corpus.n_reviewers(); ++r)
    for (const DocumentVector& d : corpus.reviewer_archives[r])
      archives.emplace_back(corpus.reviewer_ids[r], d);
  write_documents_jsonl(dir / "archives.jsonl", archives, corpus.vocabulary);

  write_config(out, json{{"command", "gen"},
                         {"reviewers", config.n_reviewers},
                         {"papers", config.n_papers},
                         {"topics", config.n_topics},
                         {"obs", config.obs_per_reviewer},
                         {"seed", config.seed},
                         {"vocab_size", config.vocab_size},
                         {"archive_docs", config.archive_docs_per_reviewer},
                         {"words_per_doc", config.words_per_doc},
                         {"coi_per_reviewer", config.coi_per_reviewer}});
  std::cout << "wrote corpus to " << out << "\n";
  return 0;
}

// Full-matrix estimates for deployment matching: observed scores stay, every
// unobserved cell is predicted by the chosen method (tau for the baseline).
Eigen::MatrixXd deployment_matrix(const Corpus& corpus, Method method,
                                  const MatcherConfig& matcher, double tau,
                                  const ModelFlags& models, std::uint64_t seed,
                                  bool& matrix_pretransformed) {
  const int n = corpus.n_reviewers();
  const int m = corpus.n_papers();
  const ScoreRange range = corpus.scores.range();
  const std::vector<Key> observed = corpus.scores.keys();
  const auto train_examples = [&] {
    std::vector<TrainExample> out;
    out.reserve(observed.size());
    for (const Key& k : observed) out.push_back({k, corpus.scores.at(k)});
    return out;
  }();
  matrix_pretransformed = false;

  switch (method) {
    case Method::lm: {
      if (corpus.paper_docs.empty() || corpus.vocabulary.size() == 0)
        throw std::runtime_error("method lm needs --papers (and --archives)");
      LmModel model = build_lm_model(corpus, models.mu, &observed);
      return lm_estimates(model, corpus);
    }
    case Method::baseline: {
      Eigen::MatrixXd out = Eigen::MatrixXd::Constant(n, m, tau);
      for (const auto& [k, s] : corpus.scores.entries()) out(k.reviewer, k.paper) = s;
      return out;
    }
    case Method::lr:
    case Method::lr_tfm: {
      if (corpus.vocabulary.size() == 0)
        throw std::runtime_error("method lr needs --papers");
      LrOptions opts;
      opts.regularization = models.ridge;
      opts.score_range = range;
      if (method == Method::lr_tfm) {
        opts.transform = matcher.transform && matcher.transform->kind ==
                                                  TransformSpec::Kind::sigmoid
                             ? *matcher.transform
                             : TransformSpec{TransformSpec::Kind::sigmoid, 4.5, 1.5};
      }
      LrModel model = fit_lr(train_examples, corpus.paper_docs, n,
                             static_cast<int>(corpus.vocabulary.size()), opts);
      const bool transformed = method == Method::lr_tfm;
      const auto g = opts.transform;
      Eigen::MatrixXd out(n, m);
      for (int r = 0; r < n; ++r)
        for (int p = 0; p < m; ++p) {
          if (auto s = corpus.scores.find({r, p}))
            out(r, p) = transformed ? g->apply(*s) : *s;
          else
            out(r, p) = model.predict(r, corpus.paper_docs[p]);
        }
      matrix_pretransformed = transformed;
      return out;
    }
    case Method::bpmf_map:
    case Method::bpmf: {
      BpmfOptions opts = models.bpmf(range);
      BpmfModel model = method == Method::bpmf
                            ? fit_bpmf_bayes(train_examples, n, m, opts, seed)
                            : fit_bpmf_map(train_examples, n, m, opts, seed);
      Eigen::MatrixXd out = model.estimates();
      for (const auto& [k, s] : corpus.scores.entries()) out(k.reviewer, k.paper) = s;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

int cmd_match(const DataFlags& data, const MatcherFlags& matcher_flags,
              const ModelFlags& models, const std::string& method_name_str,
              double tau, std::uint64_t seed, bool seed_given,
              const std::string& out) {
  ensure_out_dir(out);
  const Method method = parse_method(method_name_str);
  if ((method == Method::bpmf || method == Method::bpmf_map) && !seed_given)
    throw std::runtime_error("--seed is required for randomized methods (bpmf)");

  const Corpus corpus = load_corpus(data.to_paths(), models.vocab_size);
  const MatcherConfig matcher = matcher_flags.to_config();

  bool pretransformed = false;
  MatchProblem problem;
  problem.suitability =
      deployment_matrix(corpus, method, matcher, tau, models, seed, pretransformed);
  problem.r_target = matcher.r_target;
  problem.p_min = matcher.p_min;
  problem.p_max = matcher.p_max;
  problem.lambda = matcher.lambda;
  problem.penalty_shape = matcher.penalty_shape;
  if (!pretransformed) problem.transform = matcher.transform;
  problem.coi = corpus.coi;

  const Assignment assignment = solve_balance(problem);
  const VerifyResult check = verify(assignment, problem);

  const fs::path dir(out);
  std::ostringstream csv;
  csv << "paper_id,reviewer_id\n";
  std::vector<Key> by_paper = assignment.pairs;
  std::sort(by_paper.begin(), by_paper.end(), [](const Key& a, const Key& b) {
    return std::tie(a.paper, a.reviewer) < std::tie(b.paper, b.reviewer);
  });
  for (const Key& k : by_paper)
    csv << corpus.paper_ids[k.paper] << "," << corpus.reviewer_ids[k.reviewer] << "\n";
  write_file_atomic(dir / "assignment.csv", csv.str());

  json summary{{"method", method_name_str},
               {"objective", assignment.objective_value},
               {"raw_suitability_sum", assignment.raw_suitability_sum},
               {"loads", assignment.per_reviewer_load},
               {"lambda", matcher.lambda},
               {"transform", matcher_flags.transform},
               {"tau", tau},
               {"n_pairs", assignment.pairs.size()},
               {"verifier", json{{"ok", check.ok}, {"violations", check.violations}}}};
  write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");

  write_config(out, json{{"command", "match"},
                         {"method", method_name_str},
                         {"tau", tau},
                         {"seed", seed},
                         {"data", data.to_json()},
                         {"matcher", matcher_flags.to_json()},
                         {"models", models.to_json()}});
  if (!check.ok) {
    std::cerr << "verifier failed:";
    for (const auto& v : check.violations) std::cerr << " " << v << ";";
    std::cerr << "\n";
    return 1;
  }
  std::cout << "assignment objective " << assignment.objective_value << ", wrote "
            << (dir / "assignment.csv").string() << "\n";
  return 0;
}

int cmd_experiment_curve(const DataFlags& data, const MatcherFlags& matcher_flags,
                         const ModelFlags& models, const std::string& methods_csv,
                         const std::string& budgets_csv, int n_splits, double tau,
                         std::uint64_t seed, int threads, const std::string& out) {
  ensure_out_dir(out);
  CurveConfig config;
  {
    std::istringstream ss(methods_csv);
    std::string token;
    while (std::getline(ss, token, ','))
      if (!token.empty()) config.methods.push_back(parse_method(token));
  }
  if (config.methods.empty()) throw std::runtime_error("--methods must list at least one method");
  {
    std::istringstream ss(budgets_csv);
    std::string token;
    while (std::getline(ss, token, ','))
      if (!token.empty()) config.budgets.push_back(std::stoi(token));
  }
  config.matcher = matcher_flags.to_config();
  config.policy.tau = tau;
  config.seed = seed;
  config.threads = threads;
  config.lm_mu = models.mu;
  config.lr.regularization = models.ridge;
  config.bpmf = models.bpmf({});

  const Corpus corpus = load_corpus(data.to_paths(), models.vocab_size);
  const auto splits =
      make_splits(corpus.scores, n_splits, derive_seed(seed, "cli/splits"));
  const ExperimentReport report = run_elicitation_curve(corpus, splits, config);

  const fs::path dir(out);
  write_file_atomic(dir / "curve.json", report.to_json() + "\n");
  write_file_atomic(dir / "curve.csv", report.curve_csv());
  write_config(out, json{{"command", "experiment curve"},
                         {"methods", methods_csv},
                         {"budgets", budgets_csv},
                         {"splits", n_splits},
                         {"tau", tau},
                         {"seed", seed},
                         {"threads", threads},
                         {"data", data.to_json()},
                         {"matcher", matcher_flags.to_json()},
                         {"models", models.to_json()}});
  std::cout << "wrote " << (dir / "curve.json").string() << "\n";
  return 0;
}

int cmd_experiment_lambda(const DataFlags& data, const MatcherFlags& matcher_flags,
                          const ModelFlags& models, const std::string& grid_csv,
                          double tau, std::uint64_t seed, const std::string& out) {
  ensure_out_dir(out);
  std::vector<double> lambdas;
  {
    std::istringstream ss(grid_csv);
    std::string token;
    while (std::getline(ss, token, ','))
      if (!token.empty()) lambdas.push_back(std::stod(token));
  }

  const Corpus corpus = load_corpus(data.to_paths(), models.vocab_size);
  // Prefer full ground truth; otherwise observed scores with tau imputation.
  Eigen::MatrixXd matrix;
  if (corpus.ground_truth) {
    matrix = assemble_for_matching(*corpus.ground_truth, {}, ImputationPolicy{tau});
  } else {
    matrix = assemble_for_matching(corpus.scores, {}, ImputationPolicy{tau});
  }

  const ExperimentReport report =
      run_lambda_sweep(matrix, lambdas, matcher_flags.to_config(), corpus.coi);
  const fs::path dir(out);
  write_file_atomic(dir / "lambda.json", report.to_json() + "\n");
  write_file_atomic(dir / "lambda.csv", report.lambda_csv());
  write_config(out, json{{"command", "experiment lambda"},
                         {"grid", grid_csv},
                         {"tau", tau},
                         {"seed", seed},
                         {"data", data.to_json()},
                         {"matcher", matcher_flags.to_json()},
                         {"models", models.to_json()}});
  std::cout << "wrote " << (dir / "lambda.json").string() << "\n";
  return 0;
}

int cmd_eval(const DataFlags& data, const std::string& assignment_path, double tau,
             const std::string& out) {
  const Corpus corpus = load_corpus(data.to_paths(), /*vocab_size=*/1000);

  std::map<std::string, int> reviewer_index, paper_index;
  for (int r = 0; r < corpus.n_reviewers(); ++r)
    reviewer_index[corpus.reviewer_ids[r]] = r;
  for (int p = 0; p < corpus.n_papers(); ++p) paper_index[corpus.paper_ids[p]] = p;

  std::ifstream in(assignment_path);
  if (!in) throw std::runtime_error("cannot open " + assignment_path);
  Assignment assignment;
  assignment.per_reviewer_load.assign(corpus.n_reviewers(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "paper_id,reviewer_id") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(assignment_path + ":" + std::to_string(line_no) +
                               ": expected paper_id,reviewer_id");
    const std::string pid = line.substr(0, comma);
    const std::string rid = line.substr(comma + 1);
    if (!paper_index.count(pid))
      throw std::runtime_error("assignment references unknown paper '" + pid + "'");
    if (!reviewer_index.count(rid))
      throw std::runtime_error("assignment references unknown reviewer '" + rid + "'");
    const Key k{reviewer_index[rid], paper_index[pid]};
    assignment.pairs.push_back(k);
    ++assignment.per_reviewer_load[k.reviewer];
  }
  std::sort(assignment.pairs.begin(), assignment.pairs.end());

  const ScoreMatrix empty_train(corpus.n_reviewers(), corpus.n_papers(),
                                corpus.scores.range());
  const double quality =
      evaluate_match(assignment, corpus.scores, empty_train, ImputationPolicy{tau});
  json result{{"match_quality", quality},
              {"n_pairs", assignment.pairs.size()},
              {"load_variance", load_variance(assignment)},
              {"loads", assignment.per_reviewer_load},
              {"tau", tau}};
  if (corpus.ground_truth) {
    result["true_quality"] = evaluate_match(assignment, *corpus.ground_truth,
                                            empty_train, ImputationPolicy{tau});
    result["histogram"] = score_histogram(assignment, *corpus.ground_truth);
  }
  const std::string text = result.dump(2) + "\n";
  if (!out.empty()) {
    ensure_out_dir(out);
    write_file_atomic(fs::path(out) / "eval.json", text);
  }
  std::cout << text;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Suitability prediction and optimal paper-to-reviewer matching"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  SyntheticConfig gen_config;
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--reviewers", gen_config.n_reviewers, "Number of reviewers");
  gen->add_option("--papers", gen_config.n_papers, "Number of papers");
  gen->add_option("--topics", gen_config.n_topics, "Number of planted topics");
  gen->add_option("--obs", gen_config.obs_per_reviewer, "Observed scores per reviewer");
  gen->add_option("--seed", gen_config.seed, "Random seed")->required();
  gen->add_option("--vocab-size", gen_config.vocab_size, "Vocabulary size");
  gen->add_option("--archive-docs", gen_config.archive_docs_per_reviewer,
                  "Archive documents per reviewer");
  gen->add_option("--words-per-doc", gen_config.words_per_doc, "Words per document");
  gen->add_option("--coi", gen_config.coi_per_reviewer, "COI pairs per reviewer");

  // match
  auto* match = app.add_subcommand("match", "Predict missing scores and solve the assignment");
  DataFlags match_data;
  MatcherFlags match_matcher;
  ModelFlags match_models;
  std::string match_method = "baseline", match_out;
  double match_tau = 1.0;
  std::uint64_t match_seed = 0;
  match_data.attach(match);
  match_matcher.attach(match);
  match_models.attach(match);
  match->add_option("--method", match_method,
                    "baseline|lm|lr|lr-tfm|bpmf-map|bpmf");
  match->add_option("--tau", match_tau, "Imputation constant");
  auto* match_seed_opt = match->add_option("--seed", match_seed, "Random seed");
  match->add_option("--out", match_out, "Output directory")->required();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run the evaluation protocols");
  experiment->require_subcommand(1);

  auto* curve = experiment->add_subcommand("curve", "Elicitation curve: RMSE and match quality vs budget");
  DataFlags curve_data;
  MatcherFlags curve_matcher;
  curve_matcher.p_min = 0;
  curve_matcher.p_max = std::numeric_limits<int>::max() / 4;
  ModelFlags curve_models;
  std::string curve_methods = "baseline,lm,lr,bpmf", curve_budgets = "0,10,20,40,80";
  std::string curve_out;
  int curve_splits = 5, curve_threads = 0;
  double curve_tau = 1.0;
  std::uint64_t curve_seed = 0;
  curve_data.attach(curve);
  curve_matcher.attach(curve);
  curve_models.attach(curve);
  curve->add_option("--methods", curve_methods, "Comma-separated method list");
  curve->add_option("--budgets", curve_budgets, "Comma-separated budgets, ascending");
  curve->add_option("--splits", curve_splits, "Number of splits");
  curve->add_option("--tau", curve_tau, "Imputation constant");
  curve->add_option("--threads", curve_threads, "Worker threads (0 = cores)");
  curve->add_option("--seed", curve_seed, "Random seed")->required();
  curve->add_option("--out", curve_out, "Output directory")->required();

  auto* lambda = experiment->add_subcommand("lambda", "Objective/variance trade-off over a lambda grid");
  DataFlags lambda_data;
  MatcherFlags lambda_matcher;
  ModelFlags lambda_models;
  std::string lambda_grid = "0,0.1,0.25,0.5,0.75,1", lambda_out;
  double lambda_tau = 1.0;
  std::uint64_t lambda_seed = 0;
  lambda_data.attach(lambda);
  lambda_matcher.attach(lambda);
  lambda_models.attach(lambda);
  lambda->add_option("--grid", lambda_grid, "Comma-separated lambda values, ascending");
  lambda->add_option("--tau", lambda_tau, "Imputation constant");
  lambda->add_option("--seed", lambda_seed, "Random seed");
  lambda->add_option("--out", lambda_out, "Output directory")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate an existing assignment");
  DataFlags eval_data;
  std::string eval_assignment, eval_out;
  double eval_tau = 1.0;
  eval_data.attach(eval);
  eval->add_option("--assignment", eval_assignment, "Assignment CSV")->required();
  eval->add_option("--tau", eval_tau, "Imputation constant");
  eval->add_option("--out", eval_out, "Output directory (optional)");

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "papermatch");
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_config, gen_out);
    if (match->parsed()) {
      match_data.resolve();
      if (match_data.scores.empty())
        throw std::runtime_error("match needs --scores (or --data with scores.csv)");
      return cmd_match(match_data, match_matcher, match_models, match_method,
                       match_tau, match_seed, match_seed_opt->count() > 0, match_out);
    }
    if (curve->parsed()) {
      curve_data.resolve();
      if (curve_data.scores.empty())
        throw std::runtime_error("experiment curve needs --scores (or --data)");
      return cmd_experiment_curve(curve_data, curve_matcher, curve_models,
                                  curve_methods, curve_budgets, curve_splits,
                                  curve_tau, curve_seed, curve_threads, curve_out);
    }
    if (lambda->parsed()) {
      lambda_data.resolve();
      if (lambda_data.scores.empty())
        throw std::runtime_error("experiment lambda needs --scores (or --data)");
      return cmd_experiment_lambda(lambda_data, lambda_matcher, lambda_models,
                                   lambda_grid, lambda_tau, lambda_seed, lambda_out);
    }
    if (eval->parsed()) {
      eval_data.resolve();
      if (eval_data.scores.empty())
        throw std::runtime_error("eval needs --scores (or --data)");
      return cmd_eval(eval_data, eval_assignment, eval_tau, eval_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}

}  // namespace papermatch
