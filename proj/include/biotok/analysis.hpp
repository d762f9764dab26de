#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "biotok/bpe.hpp"
#include "biotok/ner.hpp"

// Vocabulary-centric analyses: task/vocabulary overlap, annotation
// segmentation statistics, and entity scores dissected by how many subwords
// the annotation splits into.

namespace biotok::analysis {

// How an annotation surface is placed before encoding: as it would appear at
// the start of a word (no leading-space marker) or mid-sentence (marker on
// the first word too).
enum class AnnotationContext { kWordInitial, kMidSentence };

inline std::string sentence_text(const ner::TaggedSentence& sent) {
  std::string text;
  for (size_t i = 0; i < sent.tokens.size(); ++i) {
    if (i > 0) text += ' ';
    text += sent.tokens[i];
  }
  return text;
}

// Distinct subword types produced by encoding every sentence of the task.
inline std::set<std::string> task_token_set(std::span<const ner::TaggedSentence> corpus,
                                            const bpe::BpeVocab& vocab) {
  std::set<std::string> types;
  for (const auto& sent : corpus) {
    bpe::Segmentation seg = bpe::encode(sentence_text(sent), vocab);
    types.insert(seg.subwords.begin(), seg.subwords.end());
  }
  return types;
}

struct OverlapReport {
  std::string model;
  std::string task;
  size_t overlap_count = 0;
  size_t vocab_size = 0;
  double percent = 0.0;  // overlap_count / vocab_size
};

inline OverlapReport overlap(const bpe::BpeVocab& vocab,
                             const std::set<std::string>& token_set,
                             std::string model = "", std::string task = "") {
  OverlapReport report;
  report.model = std::move(model);
  report.task = std::move(task);
  report.vocab_size = vocab.size();
  for (const auto& t : token_set)
    if (vocab.id_of(t)) ++report.overlap_count;
  report.percent = report.vocab_size == 0
                       ? 0.0
                       : static_cast<double>(report.overlap_count) /
                             static_cast<double>(report.vocab_size);
  return report;
}

inline size_t subword_count(std::string_view surface, const bpe::BpeVocab& vocab,
                            AnnotationContext context) {
  if (surface.empty()) throw std::invalid_argument("empty annotation");
  if (context == AnnotationContext::kMidSentence) {
    std::string padded = " ";
    padded += surface;
    return bpe::encode(padded, vocab).ids.size();
  }
  return bpe::encode(surface, vocab).ids.size();
}

// One positive count per annotation instance, in input order.
inline std::vector<size_t> segment_annotations(std::span<const std::string> annotations,
                                               const bpe::BpeVocab& vocab,
                                               AnnotationContext context =
                                                   AnnotationContext::kWordInitial) {
  std::vector<size_t> counts;
  counts.reserve(annotations.size());
  for (const auto& a : annotations) counts.push_back(subword_count(a, vocab, context));
  return counts;
}

struct SegStatsReport {
  size_t count = 0;
  double mean = 0.0;
  double median = 0.0;                // mean of middle two for even n
  std::array<double, 5> buckets{};    // fractions for 1,2,3,4,5+ subwords
};

inline SegStatsReport seg_stats(std::span<const size_t> counts) {
  if (counts.empty()) throw std::invalid_argument("no annotation counts");
  SegStatsReport report;
  report.count = counts.size();

  std::vector<size_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0;
  for (size_t c : sorted) {
    sum += static_cast<double>(c);
    size_t bucket = std::min<size_t>(c, 5) - 1;
    report.buckets[bucket] += 1.0;
  }
  report.mean = sum / static_cast<double>(sorted.size());
  size_t mid = sorted.size() / 2;
  report.median = sorted.size() % 2 == 1
                      ? static_cast<double>(sorted[mid])
                      : (static_cast<double>(sorted[mid - 1]) +
                         static_cast<double>(sorted[mid])) / 2.0;
  for (auto& b : report.buckets) b /= static_cast<double>(sorted.size());
  return report;
}

struct BucketScores {
  size_t bucket = 0;  // subword count; the top bucket absorbs everything above
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t support = 0;  // gold spans in this bucket
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct DissectionReport {
  size_t max_bucket = 0;
  std::vector<BucketScores> buckets;  // 1..max_bucket, always all present
};

// Per-bucket strict scores. Gold spans land in the bucket of their surface's
// subword count (TP and FN); a spurious prediction lands in its own bucket.
inline DissectionReport dissect_scores(std::span<const ner::TaggedSentence> gold,
                                       std::span<const ner::TaggedSentence> pred,
                                       const bpe::BpeVocab& vocab,
                                       size_t max_bucket = 10,
                                       ner::BioMode mode = ner::BioMode::kStrict,
                                       AnnotationContext context =
                                           AnnotationContext::kWordInitial) {
  if (max_bucket == 0) throw std::invalid_argument("max_bucket must be positive");
  if (gold.size() != pred.size())
    throw std::runtime_error("gold has " + std::to_string(gold.size()) +
                             " sentences, pred has " + std::to_string(pred.size()));

  DissectionReport report;
  report.max_bucket = max_bucket;
  report.buckets.resize(max_bucket);
  for (size_t k = 0; k < max_bucket; ++k) report.buckets[k].bucket = k + 1;

  auto bucket_of = [&](const ner::EntitySpan& span) {
    size_t c = subword_count(span.surface, vocab, context);
    return std::min(c, max_bucket) - 1;
  };

  for (size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].tokens.size() != pred[s].tokens.size())
      throw std::runtime_error("sentence " + std::to_string(s) +
                               ": token counts differ (" +
                               std::to_string(gold[s].tokens.size()) + " vs " +
                               std::to_string(pred[s].tokens.size()) + ")");
    std::set<ner::EntitySpan> gold_spans;
    for (auto& sp : ner::extract_entities(gold[s], mode)) gold_spans.insert(sp);
    std::set<ner::EntitySpan> pred_spans;
    for (auto& sp : ner::extract_entities(pred[s], mode)) pred_spans.insert(sp);

    for (const auto& sp : gold_spans) {
      auto& row = report.buckets[bucket_of(sp)];
      ++row.support;
      if (pred_spans.count(sp))
        ++row.tp;
      else
        ++row.fn;
    }
    for (const auto& sp : pred_spans)
      if (!gold_spans.count(sp)) ++report.buckets[bucket_of(sp)].fp;
  }

  for (auto& row : report.buckets) {
    ner::TypeCounts counts{row.tp, row.fp, row.fn};
    counts.finalize();
    row.precision = counts.precision;
    row.recall = counts.recall;
    row.f1 = counts.f1;
  }
  return report;
}

// Gold entity surfaces, one per span instance, in corpus order.
inline std::vector<std::string> gold_annotations(
    std::span<const ner::TaggedSentence> corpus,
    ner::BioMode mode = ner::BioMode::kStrict, bool unique = false) {
  std::vector<std::string> surfaces;
  std::set<std::string> seen;
  for (const auto& sent : corpus)
    for (const auto& span : ner::extract_entities(sent, mode)) {
      if (unique && !seen.insert(span.surface).second) continue;
      surfaces.push_back(span.surface);
    }
  return surfaces;
}

}  // namespace biotok::analysis
