#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "papermatch/lr.hpp"  // TrainExample
#include "papermatch/types.hpp"

namespace papermatch {

struct BpmfOptions {
  int K = 10;             // latent dimension, K << min(M, N)
  double sigma2 = 0.5;    // observation noise variance
  double sigmaU2 = 1.0;   // MAP prior variance on reviewer factors
  double sigmaV2 = 1.0;   // MAP prior variance on paper factors
  double beta0 = 2.0;     // Gaussian-Wishart: mu0 = 0, W0 = I, nu0 = K
  int max_sweeps = 200;
  double tol = 1e-8;      // MAP stop: objective decrease below this
  int n_samples = 330;    // Gibbs sweeps, burn-in included
  int n_burnin = 30;
  ScoreRange score_range{};
};

// Low-rank factorization S ~ U^T V. MAP variant fitted by alternating exact
// ridge solves; Bayesian variant by Gibbs sampling with Gaussian-Wishart
// hyperpriors, predictions averaging clipped per-sample estimates.
class BpmfModel {
 public:
  BpmfModel(Eigen::MatrixXd U, Eigen::MatrixXd V, BpmfOptions options,
            std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> samples,
            std::vector<double> map_objective_trace);

  double predict(int reviewer, int paper) const;
  Eigen::MatrixXd estimates() const;  // full N x M prediction matrix

  bool bayesian() const { return !samples_.empty(); }
  int K() const { return options_.K; }
  const Eigen::MatrixXd& U() const { return U_; }
  const Eigen::MatrixXd& V() const { return V_; }
  const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& samples() const {
    return samples_;
  }
  const std::vector<double>& map_objective_trace() const { return map_objective_trace_; }
  const BpmfOptions& options() const { return options_; }

 private:
  Eigen::MatrixXd U_;  // K x N
  Eigen::MatrixXd V_;  // K x M
  BpmfOptions options_;
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> samples_;
  std::vector<double> map_objective_trace_;
};

// Alternating exact ridge; the objective trace is monotone nonincreasing by
// construction and kept on the model for inspection.
BpmfModel fit_bpmf_map(
    const std::vector<TrainExample>& train, int n_reviewers, int n_papers,
    const BpmfOptions& options, std::uint64_t seed,
    const std::optional<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& init =
        std::nullopt);

// Gibbs sampler initialized from the MAP fit; retains post-burn-in draws.
BpmfModel fit_bpmf_bayes(const std::vector<TrainExample>& train, int n_reviewers,
                         int n_papers, const BpmfOptions& options,
                         std::uint64_t seed);

}  // namespace papermatch
