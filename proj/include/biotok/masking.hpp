#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "biotok/bpe.hpp"
#include "biotok/rng.hpp"

// Masked-LM example generation with the two corruption strategies: subword
// masking selects positions independently, whole-word masking selects entire
// word groups until the corruption budget is met.

namespace biotok::mask {

constexpr int32_t kIgnoreLabel = -100;

enum class Strategy { kSubword, kWholeWord };
enum class BudgetUnit { kSubword, kWord };

struct MaskingConfig {
  Strategy strategy = Strategy::kSubword;
  double mask_prob = 0.15;
  double replace_mask = 0.8;
  double replace_random = 0.1;
  double keep = 0.1;
  BudgetUnit budget_unit = BudgetUnit::kSubword;  // WWM budget accounting

  void validate() const {
    if (mask_prob < 0.0 || mask_prob > 1.0)
      throw std::invalid_argument("mask_prob must be in [0,1]");
    if (replace_mask < 0.0 || replace_random < 0.0 || keep < 0.0)
      throw std::invalid_argument("replacement fractions must be non-negative");
    double sum = replace_mask + replace_random + keep;
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("replacement fractions must sum to 1, got " +
                                  std::to_string(sum));
  }
};

struct MaskedExample {
  std::vector<int32_t> input_ids;
  std::vector<int32_t> labels;     // original id at corrupted positions, else kIgnoreLabel
  std::vector<size_t> selected;    // corrupted positions, ascending
  size_t maskable = 0;             // positions eligible for selection
};

// One example from one segmentation. Special-token positions are never
// selected. Identical (seg, config, seed) produce identical examples.
inline MaskedExample make_example(const bpe::Segmentation& seg,
                                  const bpe::BpeVocab& vocab,
                                  const MaskingConfig& cfg, Rng& rng) {
  cfg.validate();
  if (seg.ids.empty()) throw std::invalid_argument("empty segmentation");

  auto mask_id = vocab.special_id("<mask>");
  if (!mask_id) throw std::invalid_argument("vocabulary has no <mask> token");

  MaskedExample ex;
  ex.input_ids = seg.ids;
  ex.labels.assign(seg.ids.size(), kIgnoreLabel);

  std::vector<bool> maskable(seg.ids.size());
  for (size_t p = 0; p < seg.ids.size(); ++p) {
    maskable[p] = !vocab.is_special(seg.ids[p]);
    if (maskable[p]) ++ex.maskable;
  }

  if (cfg.strategy == Strategy::kSubword) {
    for (size_t p = 0; p < seg.ids.size(); ++p)
      if (maskable[p] && rng.next_double() < cfg.mask_prob)
        ex.selected.push_back(p);
  } else {
    // Candidate groups with their maskable position counts.
    std::vector<size_t> groups;
    std::vector<size_t> group_units;
    for (size_t g = 0; g < seg.word_groups.size(); ++g) {
      size_t units = 0;
      for (size_t p = seg.word_groups[g].first; p < seg.word_groups[g].second; ++p)
        if (maskable[p]) ++units;
      if (units > 0) {
        groups.push_back(g);
        group_units.push_back(cfg.budget_unit == BudgetUnit::kSubword ? units : 1);
      }
    }
    double budget = cfg.mask_prob;
    budget *= cfg.budget_unit == BudgetUnit::kSubword
                  ? static_cast<double>(ex.maskable)
                  : static_cast<double>(groups.size());

    std::vector<size_t> order(groups.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    double taken = 0;
    for (size_t i : order) {
      if (taken >= budget) break;
      size_t g = groups[i];
      for (size_t p = seg.word_groups[g].first; p < seg.word_groups[g].second; ++p)
        if (maskable[p]) ex.selected.push_back(p);
      taken += static_cast<double>(group_units[i]);
    }
    std::sort(ex.selected.begin(), ex.selected.end());
  }

  const auto& replacements = vocab.non_special_ids();
  for (size_t p : ex.selected) {
    ex.labels[p] = seg.ids[p];
    double u = rng.next_double();
    if (u < cfg.replace_mask) {
      ex.input_ids[p] = *mask_id;
    } else if (u < cfg.replace_mask + cfg.replace_random) {
      ex.input_ids[p] = replacements[static_cast<size_t>(
          rng.below(replacements.size()))];
    }  // else keep the original id
  }
  return ex;
}

struct MaskingStats {
  int64_t maskable = 0;
  int64_t selected = 0;
  int64_t masked = 0;
  int64_t randomized = 0;
  int64_t kept = 0;
  double selection_rate = 0.0;
  double mask_rate = 0.0;
  double random_rate = 0.0;
  double keep_rate = 0.0;
};

// Empirical corruption rates over all maskable positions. A random draw that
// reproduces the original id counts as kept; with realistic vocabulary sizes
// the bias is negligible.
inline MaskingStats masking_stats(std::span<const MaskedExample> examples,
                                  int32_t mask_id) {
  if (examples.empty()) throw std::invalid_argument("no examples");
  MaskingStats st;
  for (const auto& ex : examples) {
    st.maskable += static_cast<int64_t>(ex.maskable);
    st.selected += static_cast<int64_t>(ex.selected.size());
    for (size_t p : ex.selected) {
      if (ex.input_ids[p] == mask_id)
        ++st.masked;
      else if (ex.input_ids[p] == ex.labels[p])
        ++st.kept;
      else
        ++st.randomized;
    }
  }
  if (st.maskable > 0)
    st.selection_rate = static_cast<double>(st.selected) / static_cast<double>(st.maskable);
  if (st.selected > 0) {
    st.mask_rate = static_cast<double>(st.masked) / static_cast<double>(st.selected);
    st.random_rate = static_cast<double>(st.randomized) / static_cast<double>(st.selected);
    st.keep_rate = static_cast<double>(st.kept) / static_cast<double>(st.selected);
  }
  return st;
}

// Document-level packing: concatenates segmentations in order into chunks of
// at most max_len positions, never splitting a word group.
inline std::vector<bpe::Segmentation> pack_document(
    std::span<const bpe::Segmentation> sentences, size_t max_len) {
  if (max_len == 0) throw std::invalid_argument("max_len must be positive");
  std::vector<bpe::Segmentation> out;
  bpe::Segmentation cur;
  auto flush = [&] {
    if (!cur.ids.empty()) out.push_back(std::move(cur));
    cur = {};
  };
  for (const auto& seg : sentences) {
    for (auto [begin, end] : seg.word_groups) {
      size_t len = end - begin;
      if (!cur.ids.empty() && cur.ids.size() + len > max_len) flush();
      size_t at = cur.ids.size();
      for (size_t p = begin; p < end; ++p) {
        cur.ids.push_back(seg.ids[p]);
        cur.subwords.push_back(seg.subwords[p]);
      }
      cur.word_groups.emplace_back(at, cur.ids.size());
    }
  }
  flush();
  return out;
}

}  // namespace biotok::mask
