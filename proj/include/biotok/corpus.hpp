#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "biotok/lang_profiles.hpp"
#include "biotok/unicode.hpp"

// Corpus cleaning: sentence splitting, language detection, noise filtering
// and exact deduplication, with per-source statistics over the cleaned text.

namespace biotok::corpus {

struct RawDocument {
  std::string id;
  std::string source;
  std::string text;
  std::map<std::string, std::string> meta;
};

struct CleanDocument {
  std::string id;
  std::string source;
  std::vector<std::string> sentences;
};

struct SourceStats {
  int64_t tokens = 0;
  int64_t documents = 0;
  int64_t sentences = 0;
};

struct CorpusStats {
  std::map<std::string, SourceStats> per_source;

  SourceStats total() const {
    SourceStats t;
    for (const auto& [_, row] : per_source) {
      t.tokens += row.tokens;
      t.documents += row.documents;
      t.sentences += row.sentences;
    }
    return t;
  }
};

enum class DropReason { kTooShort, kLowAlphaRatio, kWrongLanguage, kMalformed };

inline const char* to_string(DropReason r) {
  switch (r) {
    case DropReason::kTooShort: return "too-short";
    case DropReason::kLowAlphaRatio: return "low-alpha-ratio";
    case DropReason::kWrongLanguage: return "wrong-language";
    case DropReason::kMalformed: return "malformed";
  }
  return "unknown";
}

struct FilterVerdict {
  bool keep = true;
  std::optional<DropReason> reason;  // present iff keep is false
};

// Number of maximal non-whitespace runs (ASCII whitespace), the token count
// used for corpus statistics.
inline size_t count_ws_tokens(std::string_view text) {
  size_t n = 0;
  bool in_run = false;
  for (char c : text) {
    bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    if (!ws && !in_run) ++n;
    in_run = !ws;
  }
  return n;
}

inline std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  };
  while (b < e && ws(s[b])) ++b;
  while (e > b && ws(s[e - 1])) --e;
  return s.substr(b, e - b);
}

struct SplitOptions {
  // Tokens ending in '.' that never close a sentence. Single letters plus a
  // dot (initials like "J.") are suppressed implicitly.
  std::vector<std::string> abbreviations = {
      "Dr.",  "Dra.",  "Sr.",   "Sra.",  "Srta.", "D.",    "Dña.",  "Prof.",
      "Lic.", "Ing.",  "Av.",   "Avda.", "Ud.",   "Uds.",  "Vd.",   "Vds.",
      "etc.", "p.ej.", "Fig.",  "fig.",  "No.",   "núm.",  "Núm.",  "pág.",
      "Pág.", "art.",  "Art.",  "cap.",  "Cap.",  "vol.",  "Vol.",  "ej.",
      "tel.", "Tel.",  "EE.UU.", "Sta.", "Sto.",  "dcha.", "izq.",  "Gral."};
};

// Splits after '.', '?', '!' or '…' when followed by whitespace and an
// uppercase letter or digit; end of input always closes the last sentence.
// Sentences are trimmed and never empty.
inline std::vector<std::string> split_sentences(std::string_view text,
                                                const SplitOptions& opts = {}) {
  std::vector<std::string> out;
  std::unordered_set<std::string_view> abbrev(opts.abbreviations.begin(),
                                              opts.abbreviations.end());

  auto is_terminator = [](char32_t cp) {
    return cp == '.' || cp == '?' || cp == '!' || cp == 0x2026;
  };

  auto flush = [&](size_t begin, size_t end) {
    std::string_view s = trim(text.substr(begin, end - begin));
    if (!s.empty()) out.emplace_back(s);
  };

  size_t start = 0;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    uni::Decoded d = uni::decode(text, i);
    if (!is_terminator(d.cp)) {
      i += static_cast<size_t>(d.len);
      continue;
    }
    // Consume the full terminator run ("...", "?!", ...).
    size_t run_begin = i;
    size_t run_len = 0;
    bool only_dot = true;
    while (i < n) {
      uni::Decoded t = uni::decode(text, i);
      if (!is_terminator(t.cp)) break;
      only_dot = only_dot && t.cp == '.';
      i += static_cast<size_t>(t.len);
      ++run_len;
    }

    // Boundary requires whitespace then an uppercase letter or digit.
    size_t j = i;
    size_t ws_seen = 0;
    while (j < n) {
      uni::Decoded w = uni::decode(text, j);
      if (!w.valid || !uni::is_space(w.cp)) break;
      j += static_cast<size_t>(w.len);
      ++ws_seen;
    }
    if (j >= n) continue;  // end of input closes the sentence below
    uni::Decoded next = uni::decode(text, j);
    if (ws_seen == 0 || !(uni::is_upper(next.cp) || uni::is_digit(next.cp))) continue;

    if (run_len == 1 && only_dot) {
      // Token ending at this dot, including any internal dots ("p.ej.").
      size_t b = run_begin;
      while (b > 0) {
        size_t p = b;
        do {
          --p;
        } while (p > 0 && (static_cast<unsigned char>(text[p]) & 0xC0) == 0x80);
        uni::Decoded prev = uni::decode(text, p);
        if (!(uni::is_letter(prev.cp) || prev.cp == '.')) break;
        b = p;
      }
      std::string_view word = text.substr(b, run_begin + 1 - b);
      size_t letters = 0;
      for (size_t p = b; p < run_begin;) {
        uni::Decoded c = uni::decode(text, p);
        if (uni::is_letter(c.cp)) ++letters;
        p += static_cast<size_t>(c.len);
      }
      bool initial = letters == 1 && word.size() >= 2 && word.find('.') == word.size() - 1;
      if (abbrev.count(word) || initial) continue;
    }

    flush(start, i);
    start = j;
  }
  flush(start, n);
  return out;
}

struct LangScore {
  std::string label;
  double score = 0.0;
};

// Stopword + trigram profile scorer. The score is the winner's share of the
// hits against the runner-up profile, so it lives in [0,1], grows with the
// match, and does not dilute as profiles are added.
inline LangScore detect_language(std::string_view sentence) {
  // Lowercase, letters kept, everything else collapsed to single spaces.
  std::u32string norm;
  norm.reserve(sentence.size() + 2);
  norm.push_back(U' ');
  bool letters_present = false;
  for (size_t i = 0; i < sentence.size();) {
    uni::Decoded d = uni::decode(sentence, i);
    i += static_cast<size_t>(d.len);
    if (d.valid && uni::is_letter(d.cp)) {
      norm.push_back(uni::to_lower(d.cp));
      letters_present = true;
    } else if (norm.back() != U' ') {
      norm.push_back(U' ');
    }
  }
  if (norm.back() != U' ') norm.push_back(U' ');
  if (!letters_present) return {"und", 0.0};

  std::vector<std::string> words;
  std::string cur;
  for (char32_t cp : norm) {
    if (cp == U' ') {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      uni::append_utf8(cur, cp);
    }
  }

  constexpr int kStopwordWeight = 3;
  double best = 0, second = 0;
  std::string_view best_label = "und";
  for (const auto& profile : profiles::kProfiles) {
    std::unordered_set<std::string_view> stop(profile.stopwords.begin(),
                                              profile.stopwords.end());
    std::unordered_set<std::string_view> tri(profile.trigrams.begin(),
                                             profile.trigrams.end());
    double hits = 0;
    for (const auto& w : words)
      if (stop.count(w)) hits += kStopwordWeight;
    for (size_t i = 0; i + 2 < norm.size(); ++i) {
      std::string g;
      uni::append_utf8(g, norm[i]);
      uni::append_utf8(g, norm[i + 1]);
      uni::append_utf8(g, norm[i + 2]);
      if (tri.count(g)) hits += 1;
    }
    if (hits > best) {  // ties keep the earlier (lexicographically first) label
      second = best;
      best = hits;
      best_label = profile.label;
    } else if (hits > second) {
      second = hits;
    }
  }
  if (best == 0) return {"und", 0.0};
  return {std::string(best_label), best / (best + second)};
}

struct FilterConfig {
  size_t min_chars = 10;        // codepoints
  size_t min_tokens = 3;        // whitespace tokens
  double min_alpha_ratio = 0.4; // letters / non-whitespace codepoints
  std::string lang = "es";      // empty disables the language gate
  double lang_threshold = 0.5;
};

// Pure in (sentence, config); checks run malformed, too-short,
// low-alpha-ratio, wrong-language, first failure wins.
inline FilterVerdict filter_sentence(std::string_view sentence,
                                     const FilterConfig& cfg) {
  if (!uni::is_valid_utf8(sentence))
    return {false, DropReason::kMalformed};

  size_t chars = 0, non_ws = 0, letters = 0;
  for (size_t i = 0; i < sentence.size();) {
    uni::Decoded d = uni::decode(sentence, i);
    i += static_cast<size_t>(d.len);
    ++chars;
    if (!uni::is_space(d.cp)) ++non_ws;
    if (uni::is_letter(d.cp)) ++letters;
  }
  if (chars < cfg.min_chars || count_ws_tokens(sentence) < cfg.min_tokens)
    return {false, DropReason::kTooShort};
  double ratio = non_ws == 0 ? 0.0 : static_cast<double>(letters) / non_ws;
  if (ratio < cfg.min_alpha_ratio)
    return {false, DropReason::kLowAlphaRatio};
  if (!cfg.lang.empty()) {
    LangScore ls = detect_language(sentence);
    if (ls.label != cfg.lang || ls.score < cfg.lang_threshold)
      return {false, DropReason::kWrongLanguage};
  }
  return {true, std::nullopt};
}

enum class DedupScope { kPerSource, kGlobal };
enum class DedupUnit { kSentence, kDocument };

struct DedupOptions {
  DedupScope scope = DedupScope::kGlobal;
  DedupUnit unit = DedupUnit::kSentence;
  bool case_insensitive = false;
};

// Dedup key: trimmed, internal whitespace collapsed, case-sensitive unless
// configured otherwise.
inline std::string dedup_key(std::string_view sentence, bool case_insensitive) {
  std::string key;
  key.reserve(sentence.size());
  bool pending_space = false;
  for (size_t i = 0; i < sentence.size();) {
    uni::Decoded d = uni::decode(sentence, i);
    i += static_cast<size_t>(d.len);
    if (d.valid && uni::is_space(d.cp)) {
      pending_space = !key.empty();
      continue;
    }
    if (pending_space) {
      key.push_back(' ');
      pending_space = false;
    }
    uni::append_utf8(key, case_insensitive ? uni::to_lower(d.cp) : d.cp);
  }
  return key;
}

namespace detail {

class DedupState {
 public:
  explicit DedupState(DedupOptions opts) : opts_(opts) {}

  // True the first time this sentence key is seen in its scope.
  bool first_occurrence(const std::string& source, std::string_view sentence) {
    auto& set = opts_.scope == DedupScope::kPerSource ? per_source_[source] : global_;
    return set.insert(dedup_key(sentence, opts_.case_insensitive)).second;
  }

  bool first_document(const std::string& source, const CleanDocument& doc) {
    std::string key;
    for (const auto& s : doc.sentences) {
      key += dedup_key(s, opts_.case_insensitive);
      key.push_back('\n');
    }
    auto& set = opts_.scope == DedupScope::kPerSource ? per_source_[source] : global_;
    return set.insert(std::move(key)).second;
  }

  const DedupOptions& options() const { return opts_; }

 private:
  DedupOptions opts_;
  std::unordered_set<std::string> global_;
  std::unordered_map<std::string, std::unordered_set<std::string>> per_source_;
};

}  // namespace detail

// First-occurrence-wins exact dedup over already-split documents. Document
// and sentence order are preserved; emptied documents are dropped.
inline std::vector<CleanDocument> dedup(std::span<const CleanDocument> docs,
                                        const DedupOptions& opts = {}) {
  detail::DedupState state(opts);
  std::vector<CleanDocument> out;
  for (const auto& doc : docs) {
    if (opts.unit == DedupUnit::kDocument) {
      if (state.first_document(doc.source, doc)) out.push_back(doc);
      continue;
    }
    CleanDocument kept{doc.id, doc.source, {}};
    for (const auto& s : doc.sentences)
      if (state.first_occurrence(doc.source, s)) kept.sentences.push_back(s);
    if (!kept.sentences.empty()) out.push_back(std::move(kept));
  }
  return out;
}

struct DropRecord {
  std::string id;
  int64_t sentence_index;  // -1 when the whole document is dropped
  std::string reason;
};

struct CleanConfig {
  SplitOptions split;
  FilterConfig filter;
  DedupOptions dedup;
  bool dedup_enabled = true;
  bool passthrough = false;  // split only: no filter, no dedup
};

// Streaming cleaner; results equal a sequential first-occurrence-wins pass
// over the input order.
class Cleaner {
 public:
  explicit Cleaner(CleanConfig cfg) : cfg_(std::move(cfg)), dedup_(cfg_.dedup) {}

  std::optional<CleanDocument> process(const RawDocument& raw) {
    if (raw.id.empty() || !seen_ids_.insert(raw.id).second) {
      log(raw.id.empty() ? "<missing-id>" : raw.id, -1, to_string(DropReason::kMalformed));
      return std::nullopt;
    }
    if (!uni::is_valid_utf8(raw.text)) {
      log(raw.id, -1, to_string(DropReason::kMalformed));
      return std::nullopt;
    }

    std::vector<std::string> sentences = split_sentences(raw.text, cfg_.split);
    CleanDocument doc{raw.id, raw.source, {}};
    for (size_t i = 0; i < sentences.size(); ++i) {
      std::string& s = sentences[i];
      if (!cfg_.passthrough) {
        FilterVerdict v = filter_sentence(s, cfg_.filter);
        if (!v.keep) {
          log(raw.id, static_cast<int64_t>(i), to_string(*v.reason));
          continue;
        }
        if (cfg_.dedup_enabled && cfg_.dedup.unit == DedupUnit::kSentence &&
            !dedup_.first_occurrence(raw.source, s)) {
          log(raw.id, static_cast<int64_t>(i), "duplicate");
          continue;
        }
      }
      doc.sentences.push_back(std::move(s));
    }
    if (doc.sentences.empty()) return std::nullopt;

    if (!cfg_.passthrough && cfg_.dedup_enabled &&
        cfg_.dedup.unit == DedupUnit::kDocument &&
        !dedup_.first_document(raw.source, doc)) {
      log(raw.id, -1, "duplicate");
      return std::nullopt;
    }

    SourceStats& row = stats_.per_source[doc.source];
    row.documents += 1;
    row.sentences += static_cast<int64_t>(doc.sentences.size());
    for (const auto& s : doc.sentences)
      row.tokens += static_cast<int64_t>(count_ws_tokens(s));
    return doc;
  }

  const CorpusStats& stats() const { return stats_; }
  const std::vector<DropRecord>& drop_log() const { return drop_log_; }

 private:
  void log(std::string id, int64_t index, std::string reason) {
    drop_log_.push_back({std::move(id), index, std::move(reason)});
  }

  CleanConfig cfg_;
  detail::DedupState dedup_;
  std::unordered_set<std::string> seen_ids_;
  CorpusStats stats_;
  std::vector<DropRecord> drop_log_;
};

struct CleanResult {
  std::vector<CleanDocument> docs;
  CorpusStats stats;
  std::vector<DropRecord> drop_log;
};

inline CleanResult clean_corpus(std::span<const RawDocument> raw,
                                const CleanConfig& cfg = {}) {
  Cleaner cleaner(cfg);
  CleanResult result;
  for (const auto& doc : raw)
    if (auto clean = cleaner.process(doc)) result.docs.push_back(std::move(*clean));
  result.stats = cleaner.stats();
  result.drop_log = cleaner.drop_log();
  return result;
}

}  // namespace biotok::corpus
