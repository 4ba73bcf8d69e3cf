#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "papermatch/transform.hpp"
#include "papermatch/types.hpp"

namespace papermatch {

struct TrainExample {
  Key key;
  double score = 0.0;
};

struct LrOptions {
  double regularization = 1.0;  // ridge weight; 0 demands full-rank data
  bool include_bias = true;
  std::optional<TransformSpec> transform;  // train on g(s) when present
  // Constant used when there is no training data at all (global mean
  // undefined). Defaults to the middle of the score range.
  std::optional<double> empty_train_fallback;
  ScoreRange score_range{};
};

// Per-reviewer ridge regression on paper word counts. Each reviewer's
// problem decouples and is solved exactly via normal equations (dual form
// when examples < features). Reviewers with no training rows fall back to a
// constant predictor at the global training mean.
class LrModel {
 public:
  LrModel(std::vector<Eigen::VectorXd> theta, std::vector<bool> fallback,
          double fallback_value, LrOptions options, int n_features);

  // theta . x_p (plus bias), clipped to [0,1] on the transformed scale or to
  // the score range otherwise.
  double predict(int reviewer, const DocumentVector& paper_doc) const;

  bool is_fallback(int reviewer) const { return fallback_.at(reviewer); }
  double fallback_value() const { return fallback_value_; }
  const Eigen::VectorXd& theta(int reviewer) const { return theta_.at(reviewer); }
  const LrOptions& options() const { return options_; }
  int n_reviewers() const { return static_cast<int>(theta_.size()); }
  int n_features() const { return n_features_; }
  bool transformed() const { return options_.transform.has_value(); }

  // Label on the model's training scale: g(s) when transformed, s otherwise.
  double label(double score) const {
    return options_.transform ? options_.transform->apply(score) : score;
  }

 private:
  std::vector<Eigen::VectorXd> theta_;  // per reviewer, size n_features (+1 bias)
  std::vector<bool> fallback_;
  double fallback_value_;
  LrOptions options_;
  int n_features_;
};

LrModel fit_lr(const std::vector<TrainExample>& train,
               const std::vector<DocumentVector>& paper_docs, int n_reviewers,
               int n_features, const LrOptions& options = {});

// Mean squared error over eval_set on the model's training scale.
double lr_mse(const LrModel& model, const std::vector<TrainExample>& eval_set,
              const std::vector<DocumentVector>& paper_docs);

}  // namespace papermatch
