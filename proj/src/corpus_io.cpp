#include "papermatch/corpus_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "papermatch/corpus.hpp"

namespace papermatch {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << path.string() << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Dense first-seen index assignment for string ids.
struct IdIndex {
  std::vector<std::string> ids;
  std::unordered_map<std::string, int> index;

  int get_or_add(const std::string& id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    const int i = static_cast<int>(ids.size());
    ids.push_back(id);
    index.emplace(id, i);
    return i;
  }
  std::optional<int> find(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

}  // namespace

LoadedScores load_scores(const std::filesystem::path& path, ScoreRange range) {
  auto in = open_or_throw(path);
  std::string line;
  std::size_t line_no = 0;

  IdIndex reviewers, papers;
  std::vector<std::tuple<int, int, double>> rows;

  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (trimmed == "reviewer_id,paper_id,score") continue;
      fail(path, line_no, "expected header 'reviewer_id,paper_id,score'");
    }
    auto fields = split_csv_row(trimmed);
    if (fields.size() != 3) fail(path, line_no, "expected 3 fields, got " +
                                                    std::to_string(fields.size()));
    const std::string rid = strip(fields[0]);
    const std::string pid = strip(fields[1]);
    if (rid.empty() || pid.empty()) fail(path, line_no, "empty id");
    double score;
    try {
      std::size_t used = 0;
      score = std::stod(strip(fields[2]), &used);
      if (used != strip(fields[2]).size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      fail(path, line_no, "malformed score '" + fields[2] + "'");
    }
    if (!range.contains(score))
      fail(path, line_no, "score out of range: " + strip(fields[2]));
    rows.emplace_back(reviewers.get_or_add(rid), papers.get_or_add(pid), score);
  }

  LoadedScores out;
  out.scores = ScoreMatrix(static_cast<int>(reviewers.ids.size()),
                           static_cast<int>(papers.ids.size()), range);
  for (auto& [r, p, s] : rows) out.scores.add({r, p}, s);  // throws on duplicates
  out.reviewer_ids = std::move(reviewers.ids);
  out.paper_ids = std::move(papers.ids);
  return out;
}

std::vector<std::pair<std::string, RawDocument>> load_documents(
    const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<std::pair<std::string, RawDocument>> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("counts"))
      fail(path, line_no, "expected object with 'id' and 'counts'");
    RawDocument doc;
    for (auto& [term, count] : obj["counts"].items()) {
      if (!count.is_number_integer() || count.get<long long>() < 0)
        fail(path, line_no, "counts must be nonnegative integers");
      doc[term] += count.get<long long>();
    }
    docs.emplace_back(obj["id"].get<std::string>(), std::move(doc));
  }
  return docs;
}

std::vector<std::pair<std::string, std::string>> load_coi(
    const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (trimmed == "reviewer_id,paper_id") continue;
      fail(path, line_no, "expected header 'reviewer_id,paper_id'");
    }
    auto fields = split_csv_row(trimmed);
    if (fields.size() != 2) fail(path, line_no, "expected 2 fields");
    pairs.emplace_back(strip(fields[0]), strip(fields[1]));
  }
  return pairs;
}

Corpus load_corpus(const CorpusPaths& paths, std::size_t vocab_size, ScoreRange range) {
  auto loaded = load_scores(paths.scores, range);

  IdIndex reviewers, papers;
  std::vector<std::pair<std::string, RawDocument>> paper_docs, archive_docs;

  if (!paths.papers.empty()) {
    paper_docs = load_documents(paths.papers);
    for (const auto& [id, _] : paper_docs) papers.get_or_add(id);
    for (const auto& id : loaded.paper_ids)
      if (!papers.find(id))
        throw std::runtime_error("scores reference paper '" + id +
                                 "' missing from " + paths.papers.string());
  } else {
    for (const auto& id : loaded.paper_ids) papers.get_or_add(id);
  }

  if (!paths.archives.empty()) {
    archive_docs = load_documents(paths.archives);
    for (const auto& [id, _] : archive_docs) reviewers.get_or_add(id);
  }
  for (const auto& id : loaded.reviewer_ids) reviewers.get_or_add(id);

  const int n = static_cast<int>(reviewers.ids.size());
  const int m = static_cast<int>(papers.ids.size());

  Corpus corpus;
  corpus.reviewer_ids = reviewers.ids;
  corpus.paper_ids = papers.ids;

  // Re-key scores onto the merged index.
  corpus.scores = ScoreMatrix(n, m, range);
  for (const auto& [k, s] : loaded.scores.entries()) {
    const int r = *reviewers.find(loaded.reviewer_ids[k.reviewer]);
    const int p = *papers.find(loaded.paper_ids[k.paper]);
    corpus.scores.add({r, p}, s);
  }

  // Vocabulary from submissions; both sides projected onto it.
  std::vector<RawDocument> raw_papers(m);
  for (auto& [id, doc] : paper_docs) {
    RawDocument& slot = raw_papers[*papers.find(id)];
    for (const auto& [term, count] : doc) slot[term] += count;
  }
  if (!paper_docs.empty()) {
    corpus.vocabulary = build_vocabulary(raw_papers, vocab_size);
    corpus.paper_docs = project_documents(raw_papers, corpus.vocabulary);
  } else {
    corpus.paper_docs.resize(m);
  }

  corpus.reviewer_archives.resize(n);
  for (auto& [id, doc] : archive_docs)
    corpus.reviewer_archives[*reviewers.find(id)].push_back(
        project_document(doc, corpus.vocabulary));

  if (!paths.coi.empty()) {
    for (const auto& [rid, pid] : load_coi(paths.coi)) {
      auto r = reviewers.find(rid);
      auto p = papers.find(pid);
      if (!r) throw std::runtime_error("COI references unknown reviewer '" + rid + "'");
      if (!p) throw std::runtime_error("COI references unknown paper '" + pid + "'");
      corpus.coi.push_back({*r, *p});
    }
    std::sort(corpus.coi.begin(), corpus.coi.end());
    corpus.coi.erase(std::unique(corpus.coi.begin(), corpus.coi.end()),
                     corpus.coi.end());
  }

  if (!paths.ground_truth.empty()) {
    auto truth = load_scores(paths.ground_truth, range);
    ScoreMatrix full(n, m, range);
    for (const auto& [k, s] : truth.scores.entries()) {
      auto r = reviewers.find(truth.reviewer_ids[k.reviewer]);
      auto p = papers.find(truth.paper_ids[k.paper]);
      if (!r || !p)
        throw std::runtime_error("ground truth references ids missing from corpus");
      full.add({*r, *p}, s);
    }
    corpus.ground_truth = std::move(full);
  }
  return corpus;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_scores_csv(const std::filesystem::path& path, const ScoreMatrix& scores,
                      const std::vector<std::string>& reviewer_ids,
                      const std::vector<std::string>& paper_ids) {
  std::ostringstream out;
  out << "reviewer_id,paper_id,score\n";
  for (const auto& [k, s] : scores.entries()) {
    std::ostringstream val;
    val.precision(17);
    val << s;
    out << reviewer_ids.at(k.reviewer) << "," << paper_ids.at(k.paper) << ","
        << val.str() << "\n";
  }
  write_file_atomic(path, out.str());
}

void write_documents_jsonl(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, DocumentVector>>& docs,
    const Vocabulary& vocabulary) {
  std::ostringstream out;
  for (const auto& [id, doc] : docs) {
    json counts = json::object();
    for (const auto& [term, count] : doc.counts)
      counts[vocabulary.term(term)] = count;
    json obj = {{"id", id}, {"counts", counts}};
    out << obj.dump() << "\n";
  }
  write_file_atomic(path, out.str());
}

void write_coi_csv(const std::filesystem::path& path, const std::vector<Key>& coi,
                   const std::vector<std::string>& reviewer_ids,
                   const std::vector<std::string>& paper_ids) {
  std::ostringstream out;
  out << "reviewer_id,paper_id\n";
  for (const Key& k : coi)
    out << reviewer_ids.at(k.reviewer) << "," << paper_ids.at(k.paper) << "\n";
  write_file_atomic(path, out.str());
}

}  // namespace papermatch
