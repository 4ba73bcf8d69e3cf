#include "papermatch/lm.hpp"

#include <cmath>
#include <stdexcept>

namespace papermatch {

LmModel::LmModel(std::vector<WeightedDoc> reviewer_docs, std::vector<double> background,
                 double mu)
    : reviewer_docs_(std::move(reviewer_docs)),
      background_(std::move(background)),
      mu_(mu) {
  if (mu_ <= 0.0) throw std::invalid_argument("LmModel: mu must be > 0");
}

double LmModel::word_prob(int reviewer, int term) const {
  const WeightedDoc& d = reviewer_docs_.at(reviewer);
  const double bg = background_.at(term);
  if (d.total <= 0.0) return bg;  // T_d = 0: smoothing is all background
  auto it = d.weights.find(term);
  const double w = it == d.weights.end() ? 0.0 : it->second;
  // T_d/(T_d+mu) * w/T_d + mu/(T_d+mu) * Pr(w), with the first term reduced.
  return (w + mu_ * bg) / (d.total + mu_);
}

double LmModel::predict(int reviewer, const DocumentVector& paper_doc) const {
  double loglik = 0.0;
  for (const auto& [term, count] : paper_doc.counts) {
    if (count <= 0) continue;
    loglik += static_cast<double>(count) * std::log(word_prob(reviewer, term));
  }
  return loglik;
}

namespace {

void accumulate(WeightedDoc& acc, const DocumentVector& doc) {
  for (const auto& [term, count] : doc.counts) acc.weights[term] += count;
  acc.total += static_cast<double>(doc.total);
}

WeightedDoc mean_of(const std::vector<const DocumentVector*>& docs) {
  WeightedDoc d;
  for (const DocumentVector* doc : docs) accumulate(d, *doc);
  if (!docs.empty()) {
    const double inv = 1.0 / static_cast<double>(docs.size());
    for (auto& [_, w] : d.weights) w *= inv;
    d.total *= inv;
  }
  return d;
}

}  // namespace

LmModel build_lm_model(const Corpus& corpus, double mu,
                       const std::vector<Key>* augment_from) {
  const int n = corpus.n_reviewers();
  const auto v = corpus.vocabulary.size();

  // Which papers join each reviewer's document: train keys scored at the top
  // of the range.
  std::vector<std::vector<int>> augmented(n);
  if (augment_from) {
    const double top = corpus.scores.range().hi;
    for (const Key& k : *augment_from) {
      const double s = corpus.scores.at(k);  // throws if key not observed
      if (s == top) augmented[k.reviewer].push_back(k.paper);
    }
  }

  std::vector<WeightedDoc> docs(n);
  for (int r = 0; r < n; ++r) {
    std::vector<const DocumentVector*> parts;
    for (const DocumentVector& d : corpus.reviewer_archives[r]) parts.push_back(&d);
    for (int p : augmented[r]) parts.push_back(&corpus.paper_docs[p]);
    docs[r] = mean_of(parts);
  }

  // Background term frequency over the raw archives and all submissions.
  std::vector<double> background(v, 0.0);
  double total = 0.0;
  auto add_doc = [&](const DocumentVector& d) {
    for (const auto& [term, count] : d.counts) {
      background.at(term) += static_cast<double>(count);
      total += static_cast<double>(count);
    }
  };
  for (const auto& archive : corpus.reviewer_archives)
    for (const DocumentVector& d : archive) add_doc(d);
  for (const DocumentVector& d : corpus.paper_docs) add_doc(d);
  if (total > 0.0)
    for (double& b : background) b /= total;

  return LmModel(std::move(docs), std::move(background), mu);
}

Eigen::MatrixXd lm_estimates(const LmModel& model, const Corpus& corpus) {
  const int n = corpus.n_reviewers();
  const int m = corpus.n_papers();
  Eigen::MatrixXd estimates(n, m);
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p)
      estimates(r, p) = model.predict(r, corpus.paper_docs[p]);
  return estimates;
}

}  // namespace papermatch
