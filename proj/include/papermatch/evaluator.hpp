#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "papermatch/bpmf.hpp"
#include "papermatch/lr.hpp"
#include "papermatch/matcher.hpp"
#include "papermatch/types.hpp"

namespace papermatch {

struct ImputationPolicy {
  double tau = 1.0;  // constant imputed for never-observed, never-predicted cells
};

using Estimates = std::map<Key, double>;

// Root mean squared error of the estimates against truth over exactly `keys`.
double rmse(const Estimates& estimates, const ScoreMatrix& truth,
            const std::vector<Key>& keys);

// Dense matrix for matching: train keys carry true scores, estimate keys
// carry estimates, everything else carries tau. Key sets must not overlap.
Eigen::MatrixXd assemble_for_matching(const ScoreMatrix& train,
                                      const Estimates& test_estimates,
                                      ImputationPolicy policy);

// Match quality: sum over assigned pairs of the true train score if
// train-observed, the true test score if test-observed, else tau. When a
// transform is given the summand is g(score-or-tau). Pairs are summed in
// sorted order (same canonical order the solver reports with).
double evaluate_match(const Assignment& assignment, const ScoreMatrix& train,
                      const ScoreMatrix& test_truth, ImputationPolicy policy,
                      const std::optional<TransformSpec>& transform = std::nullopt);

// The matching baseline: tau for every test key.
Estimates baseline_estimates(const std::vector<Key>& test_keys, ImputationPolicy policy);

// Counts of assigned pairs per integer score bin (round half-up). truth must
// cover every assigned pair.
std::vector<long long> score_histogram(const Assignment& assignment,
                                       const ScoreMatrix& full_truth);

// Population variance of per-reviewer loads around x-bar.
double load_variance(const Assignment& assignment);

// ---------------------------------------------------------------------------
// Experiment protocols

enum class Method { baseline, lm, lr, lr_tfm, bpmf_map, bpmf };

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws on unknown names

struct MatcherConfig {
  int r_target = 1;
  int p_min = 0;
  int p_max = std::numeric_limits<int>::max() / 4;
  double lambda = 0.0;
  PenaltyShape penalty_shape = PenaltyShape::abs;
  std::optional<TransformSpec> transform;
};

struct CurveConfig {
  std::vector<Method> methods;
  std::vector<int> budgets;  // observed train scores per reviewer, ascending
  MatcherConfig matcher;
  ImputationPolicy policy;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency

  double lm_mu = 1000.0;
  LrOptions lr;        // transform field is driven per-method
  BpmfOptions bpmf;
};

struct CurveCell {
  int split_id = 0;
  int budget = 0;
  Method method = Method::baseline;
  double rmse = 0.0;  // NaN for methods off the score scale (lm)
  double match_quality = 0.0;
  std::optional<double> match_quality_tfm;  // present when a transform is configured
  std::vector<long long> histogram;         // empty unless ground truth known
};

struct CurveSummaryRow {
  int budget = 0;
  Method method = Method::baseline;
  double rmse_mean = 0.0, rmse_stderr = 0.0;
  double match_mean = 0.0, match_stderr = 0.0;
  std::optional<double> match_tfm_mean, match_tfm_stderr;
};

struct LambdaCell {
  double lambda = 0.0;
  double raw_objective = 0.0;        // J over the (transformed) suitabilities
  double penalized_objective = 0.0;
  double variance = 0.0;
  std::vector<int> loads;
};

struct ExperimentReport {
  std::vector<CurveCell> cells;
  std::vector<CurveSummaryRow> summary;
  std::vector<LambdaCell> lambda_cells;
  std::uint64_t seed = 0;
  std::vector<std::string> method_names;
  std::vector<int> budgets;
  int n_splits = 0;

  std::string to_json() const;
  std::string curve_csv() const;
  std::string lambda_csv() const;
};

// Per split x budget x method: subsample the train fold, fit, predict the
// test keys, RMSE; assemble the matching matrix, solve, evaluate via the
// imputed match-quality rule. Cells run on a worker pool; every cell derives
// its own seed, so results are independent of scheduling.
ExperimentReport run_elicitation_curve(const Corpus& corpus,
                                       const std::vector<DatasetSplit>& splits,
                                       const CurveConfig& config);

// Per lambda: solve the balance program, record the raw objective, the load
// variance and the load vector.
ExperimentReport run_lambda_sweep(const Eigen::MatrixXd& suitability,
                                  const std::vector<double>& lambdas,
                                  const MatcherConfig& matcher,
                                  const std::vector<Key>& coi = {});

// Restriction of a score matrix to a key subset (helper for the protocols).
ScoreMatrix restrict_scores(const ScoreMatrix& scores, const std::vector<Key>& keys);

}  // namespace papermatch
