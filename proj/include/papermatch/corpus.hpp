#pragma once

#include <cstdint>
#include <vector>

#include "papermatch/types.hpp"

namespace papermatch {

// Top-`size` terms by tf*idf with tf(w) = total corpus count of w and
// idf(w) = ln(D / df(w)). Keeps all terms when fewer than `size` exist.
Vocabulary build_vocabulary(const std::vector<RawDocument>& raw_docs, std::size_t size);

// Restrict raw docs to vocabulary terms; out-of-vocabulary terms dropped.
std::vector<DocumentVector> project_documents(const std::vector<RawDocument>& raw_docs,
                                              const Vocabulary& vocabulary);
DocumentVector project_document(const RawDocument& doc, const Vocabulary& vocabulary);

// Partition observed keys into n_splits disjoint test folds, stratified per
// reviewer; the remainder of each split is carved 75/25 into train/validation
// (60/20/20 globally). Deterministic given seed.
std::vector<DatasetSplit> make_splits(const ScoreMatrix& scores, int n_splits,
                                      std::uint64_t seed);

// Keep min(k, available) train keys per reviewer, uniformly sampled;
// validation and test untouched.
DatasetSplit subsample_train(const DatasetSplit& split, int k_per_reviewer,
                             std::uint64_t seed);

// Planted topic-mixture corpus generator. Reviewer and paper topic mixtures
// induce the true suitability matrix (affinity, affinely mapped into the
// score range and rounded); documents are sampled from topic-specific word
// distributions. The full truth matrix is kept for evaluation.
struct SyntheticConfig {
  int n_reviewers = 10;
  int n_papers = 50;
  int n_topics = 5;
  int obs_per_reviewer = 10;
  std::uint64_t seed = 0;

  int vocab_size = 150;
  int archive_docs_per_reviewer = 3;
  int words_per_doc = 80;
  int coi_per_reviewer = 2;
  double topic_alpha = 0.3;  // Dirichlet concentration of the mixtures
  ScoreRange score_range{};
};

Corpus generate_synthetic(const SyntheticConfig& config);

inline Corpus generate_synthetic(int n_reviewers, int n_papers, int n_topics,
                                 int obs_per_reviewer, std::uint64_t seed) {
  SyntheticConfig c;
  c.n_reviewers = n_reviewers;
  c.n_papers = n_papers;
  c.n_topics = n_topics;
  c.obs_per_reviewer = obs_per_reviewer;
  c.seed = seed;
  return generate_synthetic(c);
}

}  // namespace papermatch
