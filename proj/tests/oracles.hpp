#pragma once

// Brute-force reference implementations used only by tests. Each one follows
// the plainest possible route so it can arbitrate the real implementation:
// no incremental state, no shared code with the library beyond basic UTF-8
// decoding.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

// ---- whitespace token counting ----------------------------------------

inline size_t count_tokens(const std::string& text) {
  std::istringstream iss(text);
  std::string w;
  size_t n = 0;
  while (iss >> w) ++n;
  return n;
}

// ---- byte-level BPE trainer --------------------------------------------
//
// Recounts every adjacent pair over the full token sequences each round,
// picks the highest frequency, ties broken by lexicographically smallest
// (left, right). Pre-tokenization and the byte rendering are reimplemented
// from the stated rules rather than reused.

namespace detail {

inline bool byte_printable(int b) {
  return (b >= 0x21 && b <= 0x7E) || (b >= 0xA1 && b <= 0xAC) ||
         (b >= 0xAE && b <= 0xFF);
}

inline std::string byte_char(int b) {
  static std::vector<std::string> table = [] {
    std::vector<std::string> t(256);
    int next = 0;
    auto utf8 = [](int cp) {
      std::string s;
      if (cp < 0x80) {
        s.push_back(static_cast<char>(cp));
      } else if (cp < 0x800) {
        s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      } else {
        s.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      }
      return s;
    };
    for (int b = 0; b < 256; ++b)
      t[static_cast<size_t>(b)] = utf8(byte_printable(b) ? b : 256 + next++);
    return t;
  }();
  return table[static_cast<size_t>(b)];
}

inline bool ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Words split on whitespace; a word after exactly one preceding space takes
// it as its marker; other whitespace runs stand alone. ASCII-only handling
// is enough for the oracle corpora.
inline std::vector<std::string> pre_tokens(const std::string& text) {
  std::vector<std::string> out;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    if (ascii_space(static_cast<unsigned char>(text[i]))) {
      size_t j = i;
      while (j < n && ascii_space(static_cast<unsigned char>(text[j]))) ++j;
      if (j < n && text[j - 1] == ' ') {
        if (j - 1 > i) out.push_back(text.substr(i, j - 1 - i));
        size_t k = j;
        while (k < n && !ascii_space(static_cast<unsigned char>(text[k]))) ++k;
        out.push_back(text.substr(j - 1, k - (j - 1)));
        i = k;
      } else {
        out.push_back(text.substr(i, j - i));
        i = j;
      }
    } else {
      size_t k = i;
      while (k < n && !ascii_space(static_cast<unsigned char>(text[k]))) ++k;
      out.push_back(text.substr(i, k - i));
      i = k;
    }
  }
  return out;
}

}  // namespace detail

// Learned merges for the given sentences and merge budget.
inline std::vector<std::pair<std::string, std::string>> train_merges(
    const std::vector<std::string>& sentences, size_t n_merges) {
  // Every pre-token occurrence as a sequence of rendered byte symbols.
  std::vector<std::vector<std::string>> seqs;
  for (const auto& sentence : sentences)
    for (const auto& tok : detail::pre_tokens(sentence)) {
      std::vector<std::string> syms;
      for (unsigned char b : tok) syms.push_back(detail::byte_char(b));
      seqs.push_back(std::move(syms));
    }

  std::vector<std::pair<std::string, std::string>> merges;
  for (size_t round = 0; round < n_merges; ++round) {
    std::map<std::pair<std::string, std::string>, int64_t> counts;
    for (const auto& seq : seqs)
      for (size_t i = 0; i + 1 < seq.size(); ++i)
        ++counts[{seq[i], seq[i + 1]}];

    std::pair<std::string, std::string> best;
    int64_t best_count = 0;
    for (const auto& [pair, count] : counts) {
      // std::map iterates in lexicographic (left, right) order, so the first
      // maximum seen is the smallest tie.
      if (count > best_count) {
        best_count = count;
        best = pair;
      }
    }
    if (best_count <= 0) break;
    merges.push_back(best);

    std::string joined = best.first + best.second;
    for (auto& seq : seqs) {
      std::vector<std::string> next;
      for (size_t i = 0; i < seq.size();) {
        if (i + 1 < seq.size() && seq[i] == best.first && seq[i + 1] == best.second) {
          next.push_back(joined);
          i += 2;
        } else {
          next.push_back(seq[i]);
          ++i;
        }
      }
      seq = std::move(next);
    }
  }
  return merges;
}

// Segmentation by applying a merge list in rank order, each merge everywhere
// left to right. Valid for merge lists produced by training, where parts
// always precede the pairs built from them.
inline std::vector<std::string> apply_merges(
    const std::string& pre_token,
    const std::vector<std::pair<std::string, std::string>>& merges) {
  std::vector<std::string> syms;
  for (unsigned char b : pre_token) syms.push_back(detail::byte_char(b));
  for (const auto& [l, r] : merges) {
    std::vector<std::string> next;
    for (size_t i = 0; i < syms.size();) {
      if (i + 1 < syms.size() && syms[i] == l && syms[i + 1] == r) {
        next.push_back(l + r);
        i += 2;
      } else {
        next.push_back(syms[i]);
        ++i;
      }
    }
    syms = std::move(next);
  }
  return syms;
}

// ---- strict entity scoring ----------------------------------------------
//
// Materializes both span sets per sentence and intersects them. Spans come
// from a self-contained BIO walk (repair flavor: orphan I-X opens a span).

struct Span {
  size_t sentence;
  size_t start;
  size_t end;
  std::string type;

  bool operator<(const Span& o) const {
    return std::tie(sentence, start, end, type) <
           std::tie(o.sentence, o.start, o.end, o.type);
  }
};

inline std::set<Span> span_set(const std::vector<std::vector<std::string>>& tag_rows) {
  std::set<Span> spans;
  for (size_t s = 0; s < tag_rows.size(); ++s) {
    const auto& tags = tag_rows[s];
    size_t i = 0;
    while (i < tags.size()) {
      if (tags[i] == "O") {
        ++i;
        continue;
      }
      std::string type = tags[i].substr(2);
      size_t start = i;
      ++i;
      while (i < tags.size() && tags[i] == "I-" + type) ++i;
      spans.insert({s, start, i, type});
    }
  }
  return spans;
}

struct Prf {
  int64_t tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;
};

inline Prf prf_from_counts(int64_t tp, int64_t fp, int64_t fn) {
  Prf out;
  out.tp = tp;
  out.fp = fp;
  out.fn = fn;
  out.precision = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
  out.recall = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
  out.f1 = out.precision + out.recall == 0.0
               ? 0.0
               : 2 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

struct ScoreResult {
  Prf micro;
  std::map<std::string, Prf> per_type;
};

inline ScoreResult score(const std::vector<std::vector<std::string>>& gold_tags,
                         const std::vector<std::vector<std::string>>& pred_tags) {
  std::set<Span> gold = span_set(gold_tags);
  std::set<Span> pred = span_set(pred_tags);

  std::map<std::string, std::array<int64_t, 3>> counts;  // tp, fp, fn
  for (const auto& sp : pred)
    ++counts[sp.type][gold.count(sp) ? 0 : 1];
  for (const auto& sp : gold)
    if (!pred.count(sp)) ++counts[sp.type][2];

  ScoreResult out;
  int64_t tp = 0, fp = 0, fn = 0;
  for (const auto& [type, c] : counts) {
    out.per_type[type] = prf_from_counts(c[0], c[1], c[2]);
    tp += c[0];
    fp += c[1];
    fn += c[2];
  }
  out.micro = prf_from_counts(tp, fp, fn);
  return out;
}

}  // namespace oracle
