#include "papermatch/lr.hpp"

#include <cmath>
#include <stdexcept>

namespace papermatch {

LrModel::LrModel(std::vector<Eigen::VectorXd> theta, std::vector<bool> fallback,
                 double fallback_value, LrOptions options, int n_features)
    : theta_(std::move(theta)),
      fallback_(std::move(fallback)),
      fallback_value_(fallback_value),
      options_(std::move(options)),
      n_features_(n_features) {}

double LrModel::predict(int reviewer, const DocumentVector& paper_doc) const {
  double raw;
  if (fallback_.at(reviewer)) {
    raw = fallback_value_;
  } else {
    const Eigen::VectorXd& theta = theta_[reviewer];
    raw = options_.include_bias ? theta[theta.size() - 1] : 0.0;
    for (const auto& [term, count] : paper_doc.counts) {
      if (term >= n_features_) throw std::out_of_range("LrModel: term outside features");
      raw += theta[term] * static_cast<double>(count);
    }
  }
  const bool sigmoid_scale =
      options_.transform && options_.transform->kind == TransformSpec::Kind::sigmoid;
  if (sigmoid_scale) return std::min(1.0, std::max(0.0, raw));
  return options_.score_range.clip(raw);
}

namespace {

Eigen::VectorXd to_dense(const DocumentVector& doc, int n_features, bool bias) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_features + (bias ? 1 : 0));
  for (const auto& [term, count] : doc.counts) {
    if (term >= n_features)
      throw std::out_of_range("fit_lr: term index outside feature space");
    x[term] = static_cast<double>(count);
  }
  if (bias) x[n_features] = 1.0;
  return x;
}

// argmin ||X theta - y||^2 + eps ||theta||^2, exact. Dual form when the
// system is wide (rows < cols), which is the common regime here (tens of
// examples against a 1000-term vocabulary).
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            double eps) {
  const auto rows = x.rows(), cols = x.cols();
  if (eps == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < cols)
      throw std::runtime_error(
          "fit_lr: normal equations are singular with regularization 0; "
          "use a nonzero regularization");
    return qr.solve(y);
  }
  if (rows < cols) {
    Eigen::MatrixXd gram = x * x.transpose();
    gram.diagonal().array() += eps;
    return x.transpose() * gram.llt().solve(y);
  }
  Eigen::MatrixXd normal = x.transpose() * x;
  normal.diagonal().array() += eps;
  return normal.llt().solve(x.transpose() * y);
}

}  // namespace

LrModel fit_lr(const std::vector<TrainExample>& train,
               const std::vector<DocumentVector>& paper_docs, int n_reviewers,
               int n_features, const LrOptions& options) {
  if (options.regularization < 0.0)
    throw std::invalid_argument("fit_lr: negative regularization");

  std::vector<std::vector<const TrainExample*>> by_reviewer(n_reviewers);
  double label_sum = 0.0;
  for (const TrainExample& ex : train) {
    by_reviewer.at(ex.key.reviewer).push_back(&ex);
    label_sum += options.transform ? options.transform->apply(ex.score) : ex.score;
  }
  const double fallback_value =
      train.empty()
          ? options.empty_train_fallback.value_or(
                options.transform ? options.transform->apply(options.score_range.mid())
                                  : options.score_range.mid())
          : label_sum / static_cast<double>(train.size());

  const int dim = n_features + (options.include_bias ? 1 : 0);
  std::vector<Eigen::VectorXd> theta(n_reviewers);
  std::vector<bool> fallback(n_reviewers, false);
  for (int r = 0; r < n_reviewers; ++r) {
    const auto& examples = by_reviewer[r];
    if (examples.empty()) {
      fallback[r] = true;
      theta[r] = Eigen::VectorXd::Zero(dim);
      continue;
    }
    Eigen::MatrixXd x(examples.size(), dim);
    Eigen::VectorXd y(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
      x.row(i) = to_dense(paper_docs.at(examples[i]->key.paper), n_features,
                          options.include_bias);
      y[i] = options.transform ? options.transform->apply(examples[i]->score)
                               : examples[i]->score;
    }
    theta[r] = ridge_solve(x, y, options.regularization);
    if (!theta[r].allFinite())
      throw std::runtime_error("fit_lr: non-finite solution for reviewer " +
                               std::to_string(r));
  }
  return LrModel(std::move(theta), std::move(fallback), fallback_value, options,
                 n_features);
}

double lr_mse(const LrModel& model, const std::vector<TrainExample>& eval_set,
              const std::vector<DocumentVector>& paper_docs) {
  if (eval_set.empty()) throw std::invalid_argument("lr_mse: empty eval set");
  double sum = 0.0;
  for (const TrainExample& ex : eval_set) {
    const double pred = model.predict(ex.key.reviewer, paper_docs.at(ex.key.paper));
    const double err = pred - model.label(ex.score);
    sum += err * err;
  }
  return sum / static_cast<double>(eval_set.size());
}

}  // namespace papermatch
