#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "papermatch/types.hpp"

namespace papermatch {

// Averaged reviewer document d_r. Means of count vectors are fractional, so
// weights are real; `total` is the smoothed length T_d.
struct WeightedDoc {
  std::map<int, double> weights;
  double total = 0.0;
};

// Dirichlet-smoothed language model. No trained parameters: predictions are
// log-likelihoods of the paper's words under the reviewer's smoothed
// distribution, Pr(w|d) = T_d/(T_d+mu) Pr_ml(w|d) + mu/(T_d+mu) Pr(w).
class LmModel {
 public:
  LmModel(std::vector<WeightedDoc> reviewer_docs, std::vector<double> background,
          double mu);

  double word_prob(int reviewer, int term) const;

  // log Pr(w_p | d_r) = sum_w count_p(w) * ln Pr(w|d_r). Empty papers give 0.
  double predict(int reviewer, const DocumentVector& paper_doc) const;

  int n_reviewers() const { return static_cast<int>(reviewer_docs_.size()); }
  std::size_t vocab_size() const { return background_.size(); }
  const WeightedDoc& reviewer_doc(int r) const { return reviewer_docs_.at(r); }
  const std::vector<double>& background() const { return background_; }
  double mu() const { return mu_; }

 private:
  std::vector<WeightedDoc> reviewer_docs_;
  std::vector<double> background_;
  double mu_;
};

// d_r = mean of r's archive documents; when `augment_from` train keys are
// given, papers the reviewer scored at the top of the range join the average.
// Background Pr(w) is the corpus-wide term frequency over archives and
// submissions (unaugmented, so augmentation touches only one reviewer's row).
LmModel build_lm_model(const Corpus& corpus, double mu = 1000.0,
                       const std::vector<Key>* augment_from = nullptr);

// Full N x M estimate matrix on the log-likelihood scale; no mapping into the
// score range is applied.
Eigen::MatrixXd lm_estimates(const LmModel& model, const Corpus& corpus);

}  // namespace papermatch
