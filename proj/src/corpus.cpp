#include "papermatch/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "papermatch/rng.hpp"

namespace papermatch {

void ScoreMatrix::add(Key k, double score) {
  if (k.reviewer < 0 || k.reviewer >= n_reviewers_ || k.paper < 0 ||
      k.paper >= n_papers_) {
    std::ostringstream msg;
    msg << "ScoreMatrix: index (" << k.reviewer << "," << k.paper
        << ") outside " << n_reviewers_ << "x" << n_papers_;
    throw std::out_of_range(msg.str());
  }
  if (!range_.contains(score)) {
    std::ostringstream msg;
    msg << "score out of range: " << score << " not in [" << range_.lo << ","
        << range_.hi << "] at (" << k.reviewer << "," << k.paper << ")";
    throw std::invalid_argument(msg.str());
  }
  auto [it, inserted] = entries_.emplace(k, score);
  if (!inserted) {
    std::ostringstream msg;
    msg << "duplicate score for (" << k.reviewer << "," << k.paper << ")";
    throw std::invalid_argument(msg.str());
  }
}

double ScoreMatrix::at(Key k) const {
  auto it = entries_.find(k);
  if (it == entries_.end()) {
    std::ostringstream msg;
    msg << "no score stored at (" << k.reviewer << "," << k.paper << ")";
    throw std::out_of_range(msg.str());
  }
  return it->second;
}

std::optional<double> ScoreMatrix::find(Key k) const {
  auto it = entries_.find(k);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<Key> ScoreMatrix::keys() const {
  std::vector<Key> out;
  out.reserve(entries_.size());
  for (const auto& [k, _] : entries_) out.push_back(k);
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<double> tfidf)
    : terms_(std::move(terms)), tfidf_(std::move(tfidf)) {
  if (terms_.size() != tfidf_.size())
    throw std::invalid_argument("Vocabulary: terms/tfidf size mismatch");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    auto [_, inserted] = index_.emplace(terms_[i], static_cast<int>(i));
    if (!inserted) throw std::invalid_argument("Vocabulary: duplicate term " + terms_[i]);
  }
}

std::optional<int> Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(const std::vector<RawDocument>& raw_docs,
                            std::size_t size) {
  if (size < 1) throw std::invalid_argument("build_vocabulary: size must be >= 1");
  if (raw_docs.empty())
    throw std::invalid_argument("build_vocabulary: need at least one document");

  std::map<std::string, long long> tf;   // total corpus count
  std::map<std::string, long long> df;   // documents containing the term
  for (const auto& doc : raw_docs) {
    for (const auto& [term, count] : doc) {
      if (count <= 0) continue;
      tf[term] += count;
      df[term] += 1;
    }
  }

  const double n_docs = static_cast<double>(raw_docs.size());
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(tf.size());
  for (const auto& [term, count] : tf) {
    const double idf = std::log(n_docs / static_cast<double>(df[term]));
    scored.emplace_back(term, static_cast<double>(count) * idf);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > size) scored.resize(size);

  std::vector<std::string> terms;
  std::vector<double> tfidf;
  terms.reserve(scored.size());
  tfidf.reserve(scored.size());
  for (auto& [term, score] : scored) {
    terms.push_back(std::move(term));
    tfidf.push_back(score);
  }
  return Vocabulary(std::move(terms), std::move(tfidf));
}

DocumentVector project_document(const RawDocument& doc, const Vocabulary& vocabulary) {
  DocumentVector out;
  for (const auto& [term, count] : doc) {
    if (count <= 0) continue;
    if (auto idx = vocabulary.find(term)) out.add_term(*idx, count);
  }
  return out;
}

std::vector<DocumentVector> project_documents(const std::vector<RawDocument>& raw_docs,
                                              const Vocabulary& vocabulary) {
  std::vector<DocumentVector> out;
  out.reserve(raw_docs.size());
  for (const auto& doc : raw_docs) out.push_back(project_document(doc, vocabulary));
  return out;
}

namespace {

std::vector<std::vector<Key>> keys_by_reviewer(const ScoreMatrix& scores) {
  std::vector<std::vector<Key>> by_reviewer(scores.n_reviewers());
  for (const auto& [k, _] : scores.entries()) by_reviewer[k.reviewer].push_back(k);
  return by_reviewer;  // inner vectors sorted by paper (map iteration order)
}

}  // namespace

std::vector<DatasetSplit> make_splits(const ScoreMatrix& scores, int n_splits,
                                      std::uint64_t seed) {
  if (n_splits < 2) throw std::invalid_argument("make_splits: n_splits must be >= 2");
  auto by_reviewer = keys_by_reviewer(scores);
  for (int r = 0; r < scores.n_reviewers(); ++r) {
    if (static_cast<int>(by_reviewer[r].size()) < n_splits) {
      std::ostringstream msg;
      msg << "make_splits: reviewer " << r << " has only " << by_reviewer[r].size()
          << " observed scores, need at least " << n_splits << " to stratify";
      throw std::invalid_argument(msg.str());
    }
  }

  // Deal each reviewer's shuffled keys round-robin into the test folds,
  // starting at a random offset so the remainders spread across folds.
  std::vector<std::vector<Key>> test_folds(n_splits);
  std::vector<std::vector<std::vector<Key>>> rest_per_split(
      n_splits, std::vector<std::vector<Key>>(scores.n_reviewers()));
  for (int r = 0; r < scores.n_reviewers(); ++r) {
    RandomEngine engine(derive_seed(seed, "splits/test-folds", r));
    auto keys = by_reviewer[r];
    std::shuffle(keys.begin(), keys.end(), engine);
    const int start = static_cast<int>(engine() % n_splits);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const int fold = (start + static_cast<int>(i)) % n_splits;
      test_folds[fold].push_back(keys[i]);
      for (int s = 0; s < n_splits; ++s)
        if (s != fold) rest_per_split[s][r].push_back(keys[i]);
    }
  }

  std::vector<DatasetSplit> splits(n_splits);
  for (int s = 0; s < n_splits; ++s) {
    DatasetSplit& split = splits[s];
    split.split_id = s;
    split.test = std::move(test_folds[s]);
    for (int r = 0; r < scores.n_reviewers(); ++r) {
      auto rest = std::move(rest_per_split[s][r]);
      RandomEngine engine(derive_seed(seed, "splits/validation", s, r));
      std::shuffle(rest.begin(), rest.end(), engine);
      const auto n_val = static_cast<std::size_t>(
          std::llround(0.25 * static_cast<double>(rest.size())));
      for (std::size_t i = 0; i < rest.size(); ++i) {
        if (i < n_val)
          split.validation.push_back(rest[i]);
        else
          split.train.push_back(rest[i]);
      }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.test.begin(), split.test.end());
  }
  return splits;
}

DatasetSplit subsample_train(const DatasetSplit& split, int k_per_reviewer,
                             std::uint64_t seed) {
  if (k_per_reviewer < 0)
    throw std::invalid_argument("subsample_train: negative budget");
  DatasetSplit out;
  out.split_id = split.split_id;
  out.validation = split.validation;
  out.test = split.test;

  std::map<int, std::vector<Key>> by_reviewer;
  for (const Key& k : split.train) by_reviewer[k.reviewer].push_back(k);
  for (auto& [r, keys] : by_reviewer) {
    RandomEngine engine(derive_seed(seed, "subsample", split.split_id, r));
    std::shuffle(keys.begin(), keys.end(), engine);
    const auto keep = std::min<std::size_t>(keys.size(), k_per_reviewer);
    out.train.insert(out.train.end(), keys.begin(), keys.begin() + keep);
  }
  std::sort(out.train.begin(), out.train.end());
  return out;
}

namespace {

std::vector<double> dirichlet(RandomEngine& engine, int k, double alpha) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> v(k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    v[i] = gamma(engine);
    sum += v[i];
  }
  if (sum <= 0.0) {  // pathological gamma underflow at tiny alpha
    std::fill(v.begin(), v.end(), 1.0 / k);
    return v;
  }
  for (double& x : v) x /= sum;
  return v;
}

int sample_categorical(RandomEngine& engine, const std::vector<double>& probs) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(engine);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    u -= probs[i];
    if (u <= 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::string padded_name(char prefix, int i, int width) {
  std::string digits = std::to_string(i);
  while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
  return prefix + digits;
}

}  // namespace

Corpus generate_synthetic(const SyntheticConfig& config) {
  if (config.n_reviewers < 1 || config.n_papers < 1 || config.n_topics < 1 ||
      config.obs_per_reviewer < 1)
    throw std::invalid_argument("generate_synthetic: all counts must be >= 1");
  const int n = config.n_reviewers;
  const int m = config.n_papers;
  const int k = config.n_topics;
  const int v = std::max(config.vocab_size, k);

  RandomEngine engine(derive_seed(config.seed, "synthetic"));

  // Topic mixtures for reviewers and papers.
  std::vector<std::vector<double>> reviewer_mix(n), paper_mix(m);
  for (int r = 0; r < n; ++r) reviewer_mix[r] = dirichlet(engine, k, config.topic_alpha);
  for (int p = 0; p < m; ++p) paper_mix[p] = dirichlet(engine, k, config.topic_alpha);

  // True suitabilities: mixture affinity affinely mapped onto the score range
  // and rounded to integers.
  Eigen::MatrixXd affinity(n, m);
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p) {
      double dot = 0.0;
      for (int t = 0; t < k; ++t) dot += reviewer_mix[r][t] * paper_mix[p][t];
      affinity(r, p) = dot;
    }
  const double lo = affinity.minCoeff(), hi = affinity.maxCoeff();
  const ScoreRange range = config.score_range;
  ScoreMatrix truth(n, m, range);
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p) {
      double s;
      if (hi - lo < 1e-12) {
        s = std::round(range.mid());
      } else {
        const double unit = (affinity(r, p) - lo) / (hi - lo);
        s = std::round(range.lo + unit * (range.hi - range.lo));
      }
      truth.add({r, p}, range.clip(s));
    }

  // Topic-word distributions: each topic concentrates on its own block of the
  // term index space, with a uniform background floor.
  const int name_width = static_cast<int>(std::to_string(v - 1).size());
  const auto sample_doc = [&](const std::vector<double>& mix, int length) {
    RawDocument doc;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> any_term(0, v - 1);
    const int block = v / k;
    for (int w = 0; w < length; ++w) {
      const int topic = sample_categorical(engine, mix);
      int term;
      if (unit(engine) < 0.9 && block > 0) {
        const int block_lo = topic * block;
        const int block_hi = (topic == k - 1) ? v : block_lo + block;
        std::uniform_int_distribution<int> in_block(block_lo, block_hi - 1);
        term = in_block(engine);
      } else {
        term = any_term(engine);
      }
      doc[padded_name('t', term, name_width)] += 1;
    }
    return doc;
  };

  std::vector<RawDocument> raw_papers(m);
  for (int p = 0; p < m; ++p) raw_papers[p] = sample_doc(paper_mix[p], config.words_per_doc);
  std::vector<std::vector<RawDocument>> raw_archives(n);
  for (int r = 0; r < n; ++r)
    for (int d = 0; d < config.archive_docs_per_reviewer; ++d)
      raw_archives[r].push_back(sample_doc(reviewer_mix[r], config.words_per_doc));

  Corpus corpus;
  corpus.vocabulary = build_vocabulary(raw_papers, static_cast<std::size_t>(v));
  corpus.paper_docs = project_documents(raw_papers, corpus.vocabulary);
  corpus.reviewer_archives.resize(n);
  for (int r = 0; r < n; ++r)
    corpus.reviewer_archives[r] = project_documents(raw_archives[r], corpus.vocabulary);

  // COI pairs, then observed scores revealed from the non-COI cells.
  std::set<Key> coi;
  const int n_coi = std::min(config.coi_per_reviewer, m);
  for (int r = 0; r < n; ++r) {
    std::vector<int> papers(m);
    std::iota(papers.begin(), papers.end(), 0);
    std::shuffle(papers.begin(), papers.end(), engine);
    for (int i = 0; i < n_coi; ++i) coi.insert({r, papers[i]});
  }
  corpus.coi.assign(coi.begin(), coi.end());

  corpus.scores = ScoreMatrix(n, m, range);
  for (int r = 0; r < n; ++r) {
    std::vector<int> papers;
    papers.reserve(m);
    for (int p = 0; p < m; ++p)
      if (!coi.count({r, p})) papers.push_back(p);
    std::shuffle(papers.begin(), papers.end(), engine);
    const int reveal = std::min<int>(config.obs_per_reviewer, papers.size());
    for (int i = 0; i < reveal; ++i)
      corpus.scores.add({r, papers[i]}, truth.at({r, papers[i]}));
  }
  corpus.ground_truth = std::move(truth);

  corpus.reviewer_ids.reserve(n);
  corpus.paper_ids.reserve(m);
  const int r_width = static_cast<int>(std::to_string(n - 1).size());
  const int p_width = static_cast<int>(std::to_string(m - 1).size());
  for (int r = 0; r < n; ++r) corpus.reviewer_ids.push_back(padded_name('r', r, r_width));
  for (int p = 0; p < m; ++p) corpus.paper_ids.push_back(padded_name('p', p, p_width));
  return corpus;
}

}  // namespace papermatch
