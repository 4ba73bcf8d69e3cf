#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "papermatch/types.hpp"

namespace papermatch {

// Scores CSV: header `reviewer_id,paper_id,score`. Ids are strings; indices
// assigned densely in first-seen order.
struct LoadedScores {
  ScoreMatrix scores;
  std::vector<std::string> reviewer_ids;
  std::vector<std::string> paper_ids;
};

LoadedScores load_scores(const std::filesystem::path& path, ScoreRange range = {});

// Documents JSONL: one `{"id": str, "counts": {term: int}}` per line.
// Repeated ids are legal (a reviewer's archive is several documents).
std::vector<std::pair<std::string, RawDocument>> load_documents(
    const std::filesystem::path& path);

// COI CSV: header `reviewer_id,paper_id`.
std::vector<std::pair<std::string, std::string>> load_coi(
    const std::filesystem::path& path);

// Assemble a Corpus from the on-disk formats. Paths other than scores are
// optional (empty path = absent). The paper index comes from the papers file
// when present (scores must not mention unknown papers); reviewers are the
// union of archive ids and score ids. Vocabulary is built from the submitted
// papers and both sides are projected onto it.
struct CorpusPaths {
  std::filesystem::path scores;
  std::filesystem::path papers;        // optional
  std::filesystem::path archives;      // optional
  std::filesystem::path coi;           // optional
  std::filesystem::path ground_truth;  // optional
};

Corpus load_corpus(const CorpusPaths& paths, std::size_t vocab_size = 1000,
                   ScoreRange range = {});

// Writers for the same formats. All writes go through a temp file + rename.
void write_scores_csv(const std::filesystem::path& path, const ScoreMatrix& scores,
                      const std::vector<std::string>& reviewer_ids,
                      const std::vector<std::string>& paper_ids);
void write_documents_jsonl(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, DocumentVector>>& docs,
    const Vocabulary& vocabulary);
void write_coi_csv(const std::filesystem::path& path, const std::vector<Key>& coi,
                   const std::vector<std::string>& reviewer_ids,
                   const std::vector<std::string>& paper_ids);

// Atomic text-file write used by every serializer.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace papermatch
