#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

// CoNLL-style BIO parsing, entity span extraction and strict entity-level
// precision/recall/F1 with multi-run aggregation.

namespace biotok::ner {

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
};

struct EntitySpan {
  size_t start;  // inclusive token index
  size_t end;    // exclusive
  std::string type;
  std::string surface;

  friend bool operator<(const EntitySpan& a, const EntitySpan& b) {
    return std::tie(a.start, a.end, a.type) < std::tie(b.start, b.end, b.type);
  }
  friend bool operator==(const EntitySpan& a, const EntitySpan& b) {
    return a.start == b.start && a.end == b.end && a.type == b.type;
  }
};

inline bool valid_tag(std::string_view tag) {
  if (tag == "O") return true;
  if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-')
    return false;
  return true;
}

// Blank-line separated sentences, first column token, last column tag,
// consistent column count per file.
inline std::vector<TaggedSentence> parse_conll(std::istream& in,
                                               std::string_view name = "<conll>") {
  std::vector<TaggedSentence> sentences;
  TaggedSentence cur;
  std::string line;
  size_t line_no = 0;
  int columns = -1;

  auto fail = [&](const std::string& what) {
    throw std::runtime_error(std::string(name) + ":" + std::to_string(line_no) +
                             ": " + what);
  };
  auto flush = [&] {
    if (!cur.tokens.empty()) {
      sentences.push_back(std::move(cur));
      cur = {};
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    std::istringstream fields(line);
    std::vector<std::string> cols;
    std::string f;
    while (fields >> f) cols.push_back(std::move(f));
    if (cols.size() < 2) fail("expected at least token and tag columns");
    if (columns < 0) columns = static_cast<int>(cols.size());
    if (static_cast<int>(cols.size()) != columns)
      fail("ragged row: " + std::to_string(cols.size()) + " columns, file uses " +
           std::to_string(columns));
    const std::string& tag = cols.back();
    if (!valid_tag(tag)) fail("invalid tag '" + tag + "'");
    cur.tokens.push_back(cols.front());
    cur.tags.push_back(tag);
  }
  flush();
  return sentences;
}

inline std::vector<TaggedSentence> parse_conll_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_conll(in, path.string());
}

// JSON-lines alternative for predictions: {"tokens":[...],"tags":[...]},
// tokens optional.
inline std::vector<TaggedSentence> parse_jsonl_tags(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<TaggedSentence> sentences;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": " + e.what());
    }
    TaggedSentence s;
    if (!j.contains("tags") || !j["tags"].is_array())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": missing 'tags' array");
    for (const auto& t : j["tags"]) {
      std::string tag = t.get<std::string>();
      if (!valid_tag(tag))
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": invalid tag '" + tag + "'");
      s.tags.push_back(std::move(tag));
    }
    if (j.contains("tokens"))
      for (const auto& t : j["tokens"]) s.tokens.push_back(t.get<std::string>());
    else
      s.tokens.assign(s.tags.size(), "");
    if (s.tokens.size() != s.tags.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": tokens and tags lengths differ");
    sentences.push_back(std::move(s));
  }
  return sentences;
}

enum class BioMode { kStrict, kRepair };

// Maximal B-X (I-X)* runs. Strict mode rejects an I-X that does not continue
// an X run; repair mode starts a new span there.
inline std::vector<EntitySpan> extract_entities(const TaggedSentence& sent,
                                                BioMode mode = BioMode::kStrict) {
  if (sent.tokens.size() != sent.tags.size())
    throw std::invalid_argument("tokens and tags lengths differ");
  std::vector<EntitySpan> spans;
  std::string open_type;
  size_t open_start = 0;
  auto close = [&](size_t end) {
    if (open_type.empty()) return;
    EntitySpan span{open_start, end, open_type, ""};
    for (size_t t = span.start; t < span.end; ++t) {
      if (t > span.start) span.surface += ' ';
      span.surface += sent.tokens[t];
    }
    spans.push_back(std::move(span));
    open_type.clear();
  };

  for (size_t i = 0; i < sent.tags.size(); ++i) {
    const std::string& tag = sent.tags[i];
    if (!valid_tag(tag)) throw std::invalid_argument("invalid tag '" + tag + "'");
    if (tag == "O") {
      close(i);
      continue;
    }
    const char head = tag[0];
    std::string type = tag.substr(2);
    if (head == 'B') {
      close(i);
      open_type = std::move(type);
      open_start = i;
    } else {  // I-
      if (open_type == type) continue;
      if (mode == BioMode::kStrict)
        throw std::runtime_error("illegal I-" + type + " at token " +
                                 std::to_string(i));
      close(i);
      open_type = std::move(type);  // repair: orphan I-X behaves like B-X
      open_start = i;
    }
  }
  close(sent.tags.size());
  return spans;
}

struct TypeCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  void finalize() {
    precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    f1 = precision + recall == 0.0 ? 0.0
                                   : 2.0 * precision * recall / (precision + recall);
  }
};

struct NerScores {
  TypeCounts micro;
  std::map<std::string, TypeCounts> per_type;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

// Strict entity-level scoring: a predicted span counts as TP iff gold holds
// an identical (start, end, type) span in the same sentence.
inline NerScores score(std::span<const TaggedSentence> gold,
                       std::span<const TaggedSentence> pred,
                       BioMode mode = BioMode::kStrict) {
  if (gold.size() != pred.size())
    throw std::runtime_error("gold has " + std::to_string(gold.size()) +
                             " sentences, pred has " + std::to_string(pred.size()));
  NerScores scores;
  for (size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].tokens.size() != pred[s].tokens.size())
      throw std::runtime_error("sentence " + std::to_string(s) +
                               ": token counts differ (" +
                               std::to_string(gold[s].tokens.size()) + " vs " +
                               std::to_string(pred[s].tokens.size()) + ")");
    std::set<EntitySpan> gold_spans;
    for (auto& sp : extract_entities(gold[s], mode)) gold_spans.insert(sp);
    std::set<EntitySpan> pred_spans;
    for (auto& sp : extract_entities(pred[s], mode)) pred_spans.insert(sp);

    for (const auto& sp : pred_spans) {
      bool hit = gold_spans.count(sp) > 0;
      auto& row = scores.per_type[sp.type];
      if (hit)
        ++row.tp;
      else
        ++row.fp;
    }
    for (const auto& sp : gold_spans)
      if (!pred_spans.count(sp)) ++scores.per_type[sp.type].fn;
  }

  double psum = 0, rsum = 0, fsum = 0;
  for (auto& [type, row] : scores.per_type) {
    row.finalize();
    scores.micro.tp += row.tp;
    scores.micro.fp += row.fp;
    scores.micro.fn += row.fn;
    psum += row.precision;
    rsum += row.recall;
    fsum += row.f1;
  }
  scores.micro.finalize();
  if (!scores.per_type.empty()) {
    double n = static_cast<double>(scores.per_type.size());
    scores.macro_precision = psum / n;
    scores.macro_recall = rsum / n;
    scores.macro_f1 = fsum / n;
  }
  return scores;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (k-1); 0 when k == 1
};

inline MeanStd mean_std(std::span<const double> values) {
  MeanStd ms;
  const size_t k = values.size();
  if (k == 0) throw std::invalid_argument("no values to aggregate");
  for (double v : values) ms.mean += v;
  ms.mean /= static_cast<double>(k);
  if (k > 1) {
    double ss = 0;
    for (double v : values) ss += (v - ms.mean) * (v - ms.mean);
    ms.std = std::sqrt(ss / static_cast<double>(k - 1));
  }
  return ms;
}

struct RunAggregate {
  size_t runs = 0;
  MeanStd precision, recall, f1;
  std::map<std::string, std::array<MeanStd, 3>> per_type;  // P, R, F1
};

inline RunAggregate aggregate_runs(std::span<const NerScores> runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to aggregate");
  RunAggregate agg;
  agg.runs = runs.size();

  std::vector<double> p, r, f;
  for (const auto& s : runs) {
    p.push_back(s.micro.precision);
    r.push_back(s.micro.recall);
    f.push_back(s.micro.f1);
  }
  agg.precision = mean_std(p);
  agg.recall = mean_std(r);
  agg.f1 = mean_std(f);

  std::set<std::string> types;
  for (const auto& s : runs)
    for (const auto& [type, _] : s.per_type) types.insert(type);
  for (const auto& type : types) {
    std::vector<double> tp, tr, tf;
    for (const auto& s : runs) {
      auto it = s.per_type.find(type);
      TypeCounts row = it == s.per_type.end() ? TypeCounts{} : it->second;
      tp.push_back(row.precision);
      tr.push_back(row.recall);
      tf.push_back(row.f1);
    }
    agg.per_type[type] = {mean_std(tp), mean_std(tr), mean_std(tf)};
  }
  return agg;
}

}  // namespace biotok::ner
