#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace papermatch {

// A reviewer-paper cell. Indices are dense and 0-based.
struct Key {
  int reviewer = 0;
  int paper = 0;
  auto operator<=>(const Key&) const = default;
};

struct ScoreRange {
  double lo = 0.0;
  double hi = 3.0;

  bool contains(double s) const { return s >= lo && s <= hi; }
  double clip(double s) const { return s < lo ? lo : (s > hi ? hi : s); }
  double mid() const { return 0.5 * (lo + hi); }
};

// Sparse reviewer x paper suitability scores with an observed mask given by
// the stored keys. Unstored cells are the unobserved set.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(int n_reviewers, int n_papers, ScoreRange range = {})
      : n_reviewers_(n_reviewers), n_papers_(n_papers), range_(range) {
    if (n_reviewers < 0 || n_papers < 0)
      throw std::invalid_argument("ScoreMatrix: negative dimension");
  }

  void add(Key k, double score);
  bool contains(Key k) const { return entries_.count(k) > 0; }
  double at(Key k) const;
  std::optional<double> find(Key k) const;

  const std::map<Key, double>& entries() const { return entries_; }
  std::vector<Key> keys() const;

  int n_reviewers() const { return n_reviewers_; }
  int n_papers() const { return n_papers_; }
  ScoreRange range() const { return range_; }
  std::size_t size() const { return entries_.size(); }

 private:
  int n_reviewers_ = 0;
  int n_papers_ = 0;
  ScoreRange range_{};
  std::map<Key, double> entries_;
};

// One fold assignment of the observed keys: train/validation/test partition.
struct DatasetSplit {
  std::vector<Key> train;
  std::vector<Key> validation;
  std::vector<Key> test;
  int split_id = 0;
};

// Term-count vector over a fixed vocabulary (term indices).
struct DocumentVector {
  std::map<int, long long> counts;
  long long total = 0;

  void add_term(int term, long long count) {
    if (count < 0) throw std::invalid_argument("DocumentVector: negative count");
    if (count == 0) return;
    counts[term] += count;
    total += count;
  }
};

// Terms ordered by descending tf-idf, ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<double> tfidf);

  std::size_t size() const { return terms_.size(); }
  const std::string& term(int i) const { return terms_.at(i); }
  double tfidf(int i) const { return tfidf_.at(i); }
  const std::vector<std::string>& terms() const { return terms_; }
  std::optional<int> find(const std::string& term) const;

 private:
  std::vector<std::string> terms_;
  std::vector<double> tfidf_;
  std::unordered_map<std::string, int> index_;
};

// Raw (pre-vocabulary) document: term string -> count.
using RawDocument = std::map<std::string, long long>;

struct Corpus {
  Vocabulary vocabulary;
  std::vector<DocumentVector> paper_docs;                     // size M
  std::vector<std::vector<DocumentVector>> reviewer_archives; // size N, one list per reviewer
  ScoreMatrix scores;                                         // observed suitabilities
  std::vector<Key> coi;                                       // sorted, unique
  std::optional<ScoreMatrix> ground_truth;                    // synthetic corpora keep full truth

  std::vector<std::string> reviewer_ids;
  std::vector<std::string> paper_ids;

  int n_reviewers() const { return scores.n_reviewers(); }
  int n_papers() const { return scores.n_papers(); }
};

}  // namespace papermatch
