#include "papermatch/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "papermatch/corpus.hpp"
#include "papermatch/lm.hpp"
#include "papermatch/rng.hpp"

namespace papermatch {

using json = nlohmann::json;

double rmse(const Estimates& estimates, const ScoreMatrix& truth,
            const std::vector<Key>& keys) {
  if (keys.empty()) throw std::invalid_argument("rmse: empty key set");
  double sum = 0.0;
  for (const Key& k : keys) {
    auto it = estimates.find(k);
    if (it == estimates.end())
      throw std::invalid_argument("rmse: estimate missing for a requested key");
    const double err = it->second - truth.at(k);
    sum += err * err;
  }
  return std::sqrt(sum / static_cast<double>(keys.size()));
}

Eigen::MatrixXd assemble_for_matching(const ScoreMatrix& train,
                                      const Estimates& test_estimates,
                                      ImputationPolicy policy) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(train.n_reviewers(),
                                                  train.n_papers(), policy.tau);
  for (const auto& [k, estimate] : test_estimates) {
    if (train.contains(k))
      throw std::invalid_argument("assemble_for_matching: train and estimate keys overlap");
    out(k.reviewer, k.paper) = estimate;
  }
  for (const auto& [k, s] : train.entries()) out(k.reviewer, k.paper) = s;
  return out;
}

double evaluate_match(const Assignment& assignment, const ScoreMatrix& train,
                      const ScoreMatrix& test_truth, ImputationPolicy policy,
                      const std::optional<TransformSpec>& transform) {
  std::vector<Key> pairs = assignment.pairs;
  std::sort(pairs.begin(), pairs.end());
  double sum = 0.0;
  for (const Key& k : pairs) {
    double value = policy.tau;
    if (auto s = train.find(k))
      value = *s;
    else if (auto s = test_truth.find(k))
      value = *s;
    sum += transform ? transform->apply(value) : value;
  }
  return sum;
}

Estimates baseline_estimates(const std::vector<Key>& test_keys,
                             ImputationPolicy policy) {
  Estimates out;
  for (const Key& k : test_keys) out.emplace(k, policy.tau);
  return out;
}

std::vector<long long> score_histogram(const Assignment& assignment,
                                       const ScoreMatrix& full_truth) {
  const auto range = full_truth.range();
  const long long lo = std::llround(range.lo);
  const long long hi = std::llround(range.hi);
  std::vector<long long> bins(static_cast<std::size_t>(hi - lo + 1), 0);
  for (const Key& k : assignment.pairs) {
    const double s = full_truth.at(k);
    long long bin = static_cast<long long>(std::floor(s + 0.5));  // round half-up
    bin = std::clamp(bin, lo, hi);
    ++bins[static_cast<std::size_t>(bin - lo)];
  }
  return bins;
}

double load_variance(const Assignment& assignment) {
  const auto n = assignment.per_reviewer_load.size();
  if (n == 0) return 0.0;
  const double mean =
      static_cast<double>(assignment.pairs.size()) / static_cast<double>(n);
  double sum = 0.0;
  for (int load : assignment.per_reviewer_load) {
    const double d = static_cast<double>(load) - mean;
    sum += d * d;
  }
  return sum / static_cast<double>(n);
}

ScoreMatrix restrict_scores(const ScoreMatrix& scores, const std::vector<Key>& keys) {
  ScoreMatrix out(scores.n_reviewers(), scores.n_papers(), scores.range());
  for (const Key& k : keys) out.add(k, scores.at(k));
  return out;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::baseline: return "baseline";
    case Method::lm: return "lm";
    case Method::lr: return "lr";
    case Method::lr_tfm: return "lr-tfm";
    case Method::bpmf_map: return "bpmf-map";
    case Method::bpmf: return "bpmf";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::baseline, Method::lm, Method::lr, Method::lr_tfm,
                   Method::bpmf_map, Method::bpmf})
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected baseline|lm|lr|lr-tfm|bpmf-map|bpmf)");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CellInputs {
  const Corpus& corpus;
  const DatasetSplit& sub;  // train already subsampled to the budget
  const CurveConfig& config;
  std::uint64_t cell_seed;
};

std::vector<TrainExample> examples_at(const ScoreMatrix& scores,
                                      const std::vector<Key>& keys) {
  std::vector<TrainExample> out;
  out.reserve(keys.size());
  for (const Key& k : keys) out.push_back({k, scores.at(k)});
  return out;
}

TransformSpec tfm_or_default(const std::optional<TransformSpec>& configured) {
  if (configured && configured->kind == TransformSpec::Kind::sigmoid) return *configured;
  return TransformSpec{TransformSpec::Kind::sigmoid, 4.5, 1.5};
}

CurveCell run_cell(const CellInputs& in, Method method) {
  const Corpus& corpus = in.corpus;
  const CurveConfig& config = in.config;
  const ScoreRange range = corpus.scores.range();
  const ScoreMatrix train_truth = restrict_scores(corpus.scores, in.sub.train);
  const ScoreMatrix test_truth = restrict_scores(corpus.scores, in.sub.test);
  const auto train_examples = examples_at(corpus.scores, in.sub.train);

  CurveCell cell;
  cell.split_id = in.sub.split_id;
  cell.method = method;
  cell.rmse = kNaN;

  Eigen::MatrixXd matrix;
  std::optional<TransformSpec> solve_transform = config.matcher.transform;

  // With no training data every learner except the archive-driven LM
  // degrades to the imputation baseline.
  const bool as_baseline =
      method == Method::baseline || (in.sub.train.empty() && method != Method::lm);

  if (method == Method::lm) {
    LmModel model = build_lm_model(corpus, config.lm_mu, &in.sub.train);
    matrix = lm_estimates(model, corpus);  // log-likelihood scale, used directly
  } else if (as_baseline) {
    const Estimates ests = baseline_estimates(in.sub.test, config.policy);
    double mean = config.policy.tau;  // stand-in when there is no train data
    if (!train_examples.empty()) {
      mean = 0.0;
      for (const auto& ex : train_examples) mean += ex.score;
      mean /= static_cast<double>(train_examples.size());
    }
    Estimates mean_ests;
    for (const Key& k : in.sub.test) mean_ests.emplace(k, mean);
    cell.rmse = rmse(mean_ests, corpus.scores, in.sub.test);
    matrix = assemble_for_matching(train_truth, ests, config.policy);
  } else if (method == Method::lr || method == Method::lr_tfm) {
    LrOptions opts = config.lr;
    opts.score_range = range;
    opts.transform.reset();
    if (method == Method::lr_tfm) opts.transform = tfm_or_default(config.matcher.transform);
    LrModel model = fit_lr(train_examples, corpus.paper_docs, corpus.n_reviewers(),
                           static_cast<int>(corpus.vocabulary.size()), opts);
    Estimates ests;
    for (const Key& k : in.sub.test)
      ests.emplace(k, model.predict(k.reviewer, corpus.paper_docs[k.paper]));

    if (method == Method::lr) {
      cell.rmse = rmse(ests, corpus.scores, in.sub.test);
      matrix = assemble_for_matching(train_truth, ests, config.policy);
    } else {
      // Everything lives on the transformed scale: labels, imputation, train.
      const TransformSpec& g = *opts.transform;
      double sum = 0.0;
      for (const Key& k : in.sub.test) {
        const double err = ests.at(k) - g.apply(corpus.scores.at(k));
        sum += err * err;
      }
      cell.rmse = std::sqrt(sum / static_cast<double>(in.sub.test.size()));
      ScoreMatrix train_g(train_truth.n_reviewers(), train_truth.n_papers(), range);
      for (const auto& [k, s] : train_truth.entries()) train_g.add(k, g.apply(s));
      matrix = assemble_for_matching(train_g, ests, ImputationPolicy{g.apply(config.policy.tau)});
      solve_transform.reset();  // already applied
    }
  } else {  // bpmf variants
    BpmfOptions opts = config.bpmf;
    opts.score_range = range;
    BpmfModel model =
        method == Method::bpmf
            ? fit_bpmf_bayes(train_examples, corpus.n_reviewers(), corpus.n_papers(),
                             opts, in.cell_seed)
            : fit_bpmf_map(train_examples, corpus.n_reviewers(), corpus.n_papers(),
                           opts, in.cell_seed);
    Estimates ests;
    for (const Key& k : in.sub.test) ests.emplace(k, model.predict(k.reviewer, k.paper));
    cell.rmse = rmse(ests, corpus.scores, in.sub.test);
    matrix = assemble_for_matching(train_truth, ests, config.policy);
  }

  MatchProblem problem;
  problem.suitability = std::move(matrix);
  problem.r_target = config.matcher.r_target;
  problem.p_min = config.matcher.p_min;
  problem.p_max = config.matcher.p_max;
  problem.lambda = config.matcher.lambda;
  problem.penalty_shape = config.matcher.penalty_shape;
  problem.transform = solve_transform;
  problem.coi = corpus.coi;

  const Assignment assignment = solve_balance(problem);
  cell.match_quality = evaluate_match(assignment, train_truth, test_truth, config.policy);
  if (config.matcher.transform)
    cell.match_quality_tfm = evaluate_match(assignment, train_truth, test_truth,
                                            config.policy, config.matcher.transform);
  if (corpus.ground_truth)
    cell.histogram = score_histogram(assignment, *corpus.ground_truth);
  return cell;
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? kNaN : sum / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return stddev / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

ExperimentReport run_elicitation_curve(const Corpus& corpus,
                                       const std::vector<DatasetSplit>& splits,
                                       const CurveConfig& config) {
  if (config.methods.empty())
    throw std::invalid_argument("run_elicitation_curve: no methods given");
  if (config.budgets.empty())
    throw std::invalid_argument("run_elicitation_curve: no budgets given");
  if (!std::is_sorted(config.budgets.begin(), config.budgets.end()))
    throw std::invalid_argument("run_elicitation_curve: budgets must be ascending");

  struct CellTask {
    std::size_t split_index;
    int budget;
    Method method;
  };
  std::vector<CellTask> tasks;
  for (std::size_t s = 0; s < splits.size(); ++s)
    for (int budget : config.budgets)
      for (Method m : config.methods) tasks.push_back({s, budget, m});

  std::vector<CurveCell> cells(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const unsigned n_threads = std::max(
      1u, config.threads > 0 ? static_cast<unsigned>(config.threads)
                             : std::min<unsigned>(std::thread::hardware_concurrency(),
                                                  static_cast<unsigned>(tasks.size())));

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const CellTask& task = tasks[i];
      const DatasetSplit& split = splits[task.split_index];
      try {
        // The subsample seed is budget-independent, so growing the budget
        // extends the same per-reviewer ordering (nested training sets).
        DatasetSplit sub = subsample_train(
            split, task.budget, derive_seed(config.seed, "curve/subsample"));
        CellInputs inputs{corpus, sub, config,
                          derive_seed(config.seed,
                                      "curve/" + method_name(task.method),
                                      static_cast<std::uint64_t>(split.split_id),
                                      static_cast<std::uint64_t>(task.budget))};
        CurveCell cell = run_cell(inputs, task.method);
        cell.budget = task.budget;
        cells[i] = std::move(cell);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "curve cell (split=" << split.split_id << ", budget=" << task.budget
            << ", method=" << method_name(task.method) << "): " << e.what();
        errors[i] = msg.str();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const std::string& e : errors)
    if (!e.empty()) throw std::runtime_error(e);

  ExperimentReport report;
  report.cells = std::move(cells);
  report.seed = config.seed;
  report.budgets = config.budgets;
  report.n_splits = static_cast<int>(splits.size());
  for (Method m : config.methods) report.method_names.push_back(method_name(m));

  for (int budget : config.budgets)
    for (Method m : config.methods) {
      std::vector<double> rmses, matches, tfms;
      for (const CurveCell& cell : report.cells) {
        if (cell.budget != budget || cell.method != m) continue;
        if (!std::isnan(cell.rmse)) rmses.push_back(cell.rmse);
        matches.push_back(cell.match_quality);
        if (cell.match_quality_tfm) tfms.push_back(*cell.match_quality_tfm);
      }
      CurveSummaryRow row;
      row.budget = budget;
      row.method = m;
      row.rmse_mean = mean_of(rmses);
      row.rmse_stderr = stderr_of(rmses);
      row.match_mean = mean_of(matches);
      row.match_stderr = stderr_of(matches);
      if (!tfms.empty()) {
        row.match_tfm_mean = mean_of(tfms);
        row.match_tfm_stderr = stderr_of(tfms);
      }
      report.summary.push_back(row);
    }
  return report;
}

ExperimentReport run_lambda_sweep(const Eigen::MatrixXd& suitability,
                                  const std::vector<double>& lambdas,
                                  const MatcherConfig& matcher,
                                  const std::vector<Key>& coi) {
  if (lambdas.empty()) throw std::invalid_argument("run_lambda_sweep: no lambdas");
  if (!std::is_sorted(lambdas.begin(), lambdas.end()))
    throw std::invalid_argument("run_lambda_sweep: lambdas must be ascending");

  ExperimentReport report;
  for (double lambda : lambdas) {
    MatchProblem problem;
    problem.suitability = suitability;
    problem.r_target = matcher.r_target;
    problem.p_min = matcher.p_min;
    problem.p_max = matcher.p_max;
    problem.lambda = lambda;
    problem.penalty_shape = matcher.penalty_shape;
    problem.transform = matcher.transform;
    problem.coi = coi;

    const Assignment assignment = solve_balance(problem);
    LambdaCell cell;
    cell.lambda = lambda;
    cell.raw_objective = assignment.raw_suitability_sum;
    cell.penalized_objective = assignment.objective_value;
    cell.variance = load_variance(assignment);
    cell.loads = assignment.per_reviewer_load;
    report.lambda_cells.push_back(std::move(cell));
  }
  return report;
}

namespace {

json cell_to_json(const CurveCell& cell) {
  json j{{"split", cell.split_id},
         {"budget", cell.budget},
         {"method", method_name(cell.method)},
         {"match_quality", cell.match_quality}};
  j["rmse"] = std::isnan(cell.rmse) ? json() : json(cell.rmse);
  if (cell.match_quality_tfm) j["match_quality_tfm"] = *cell.match_quality_tfm;
  if (!cell.histogram.empty()) j["histogram"] = cell.histogram;
  return j;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "";
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

}  // namespace

std::string ExperimentReport::to_json() const {
  json j;
  j["seed"] = seed;
  if (!cells.empty()) {
    j["methods"] = method_names;
    j["budgets"] = budgets;
    j["n_splits"] = n_splits;
    j["cells"] = json::array();
    for (const CurveCell& cell : cells) j["cells"].push_back(cell_to_json(cell));
    j["summary"] = json::array();
    for (const CurveSummaryRow& row : summary) {
      json r{{"budget", row.budget},
             {"method", method_name(row.method)},
             {"match_mean", row.match_mean},
             {"match_stderr", row.match_stderr}};
      r["rmse_mean"] = std::isnan(row.rmse_mean) ? json() : json(row.rmse_mean);
      r["rmse_stderr"] = std::isnan(row.rmse_stderr) ? json() : json(row.rmse_stderr);
      if (row.match_tfm_mean) {
        r["match_tfm_mean"] = *row.match_tfm_mean;
        r["match_tfm_stderr"] = *row.match_tfm_stderr;
      }
      j["summary"].push_back(r);
    }
  }
  if (!lambda_cells.empty()) {
    j["lambda"] = json::array();
    for (const LambdaCell& cell : lambda_cells) {
      j["lambda"].push_back(json{{"lambda", cell.lambda},
                                 {"raw_objective", cell.raw_objective},
                                 {"penalized_objective", cell.penalized_objective},
                                 {"load_variance", cell.variance},
                                 {"loads", cell.loads}});
    }
  }
  return j.dump(2);
}

std::string ExperimentReport::curve_csv() const {
  std::ostringstream out;
  out << "split,budget,method,rmse,match_quality,match_quality_tfm\n";
  for (const CurveCell& cell : cells) {
    out << cell.split_id << "," << cell.budget << "," << method_name(cell.method)
        << "," << format_double(cell.rmse) << "," << format_double(cell.match_quality)
        << "," << (cell.match_quality_tfm ? format_double(*cell.match_quality_tfm) : "")
        << "\n";
  }
  return out.str();
}

std::string ExperimentReport::lambda_csv() const {
  std::ostringstream out;
  out << "lambda,raw_objective,penalized_objective,load_variance,loads\n";
  for (const LambdaCell& cell : lambda_cells) {
    out << format_double(cell.lambda) << "," << format_double(cell.raw_objective)
        << "," << format_double(cell.penalized_objective) << ","
        << format_double(cell.variance) << ",";
    for (std::size_t i = 0; i < cell.loads.size(); ++i)
      out << (i ? ";" : "") << cell.loads[i];
    out << "\n";
  }
  return out.str();
}

}  // namespace papermatch
