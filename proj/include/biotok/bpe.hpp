#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "biotok/unicode.hpp"

// Byte-level BPE: a 256-byte base alphabet rendered printably, plus ranked
// merges learned greedily by pair frequency. Encoding is lossless for any
// byte sequence; decode(encode(s)) == s holds byte for byte.

namespace biotok::bpe {

// Reserved tokens, lowest ids first when training.
struct Specials {
  std::string mask = "<mask>";
  std::string pad = "<pad>";
  std::string unk = "<unk>";
  std::string bos = "<s>";
  std::string eos = "</s>";

  std::vector<std::string> ordered() const { return {mask, pad, unk, bos, eos}; }
};

// Splits text into pre-tokens whose concatenation is exactly the input.
// Words are maximal non-whitespace runs; a word preceded by a single ASCII
// space absorbs it as its leading-space marker. Any other whitespace run is
// kept as a pre-token of its own.
inline std::vector<std::string_view> pre_tokenize(std::string_view text) {
  std::vector<std::string_view> out;
  size_t i = 0;
  const size_t n = text.size();
  auto advance_word = [&](size_t from) {
    size_t k = from;
    while (k < n) {
      uni::Decoded d = uni::decode(text, k);
      if (d.valid && uni::is_space(d.cp)) break;
      k += static_cast<size_t>(d.len);
    }
    return k;
  };
  while (i < n) {
    uni::Decoded d = uni::decode(text, i);
    if (d.valid && uni::is_space(d.cp)) {
      size_t j = i;
      while (j < n) {
        uni::Decoded w = uni::decode(text, j);
        if (!w.valid || !uni::is_space(w.cp)) break;
        j += static_cast<size_t>(w.len);
      }
      if (j < n && text[j - 1] == ' ') {
        if (j - 1 > i) out.push_back(text.substr(i, j - 1 - i));
        size_t k = advance_word(j);
        out.push_back(text.substr(j - 1, k - (j - 1)));
        i = k;
      } else {
        out.push_back(text.substr(i, j - i));
        i = j;
      }
    } else {
      size_t k = advance_word(i);
      out.push_back(text.substr(i, k - i));
      i = k;
    }
  }
  return out;
}

struct Segmentation {
  std::vector<std::string> subwords;                   // rendered token strings
  std::vector<int32_t> ids;                            // parallel ids
  std::vector<std::pair<size_t, size_t>> word_groups;  // [begin,end) position ranges
};

class BpeVocab {
 public:
  BpeVocab() = default;

  static constexpr size_t kBaseAlphabet = 256;

  size_t size() const { return tokens_.size(); }
  size_t budget() const { return budget_; }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::pair<std::string, std::string>>& merges() const {
    return merges_;
  }
  const std::vector<int32_t>& special_ids() const { return special_ids_; }
  const std::vector<int32_t>& non_special_ids() const { return non_special_ids_; }

  std::optional<int32_t> id_of(std::string_view token) const {
    auto it = token_to_id_.find(std::string(token));
    if (it == token_to_id_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& token_of(int32_t id) const {
    if (id < 0 || static_cast<size_t>(id) >= tokens_.size())
      throw std::out_of_range("token id " + std::to_string(id) +
                              " outside vocabulary of size " +
                              std::to_string(tokens_.size()));
    return tokens_[static_cast<size_t>(id)];
  }

  bool is_special(int32_t id) const {
    return std::binary_search(special_ids_.begin(), special_ids_.end(), id);
  }

  std::optional<int32_t> special_id(std::string_view name) const {
    auto id = id_of(name);
    if (id && is_special(*id)) return id;
    return std::nullopt;
  }

  int32_t base_id(unsigned char byte) const {
    return base_ids_[byte];
  }

  // rank and merged id for an adjacent pair, if the pair is a known merge
  struct MergeRule {
    int32_t rank;
    int32_t merged;
  };
  std::optional<MergeRule> merge_rule(int32_t left, int32_t right) const {
    auto it = merge_lookup_.find(pack(left, right));
    if (it == merge_lookup_.end()) return std::nullopt;
    return it->second;
  }

  // Assembles a vocabulary from explicit parts, validating the invariants
  // shared by trained and loaded models.
  static BpeVocab from_parts(std::vector<std::string> tokens,
                             std::vector<std::pair<std::string, std::string>> merges,
                             size_t budget,
                             const std::function<std::string(size_t merge_index)>& where) {
    BpeVocab v;
    v.tokens_ = std::move(tokens);
    v.merges_ = std::move(merges);
    v.budget_ = budget == 0 ? v.tokens_.size() : budget;
    v.token_to_id_.reserve(v.tokens_.size());
    for (size_t i = 0; i < v.tokens_.size(); ++i) {
      auto [it, fresh] = v.token_to_id_.emplace(v.tokens_[i], static_cast<int32_t>(i));
      if (!fresh)
        throw std::runtime_error("duplicate token '" + v.tokens_[i] + "' in vocabulary");
    }

    const auto& map = uni::byte_char_map();
    std::unordered_set<int32_t> non_special;
    for (int b = 0; b < 256; ++b) {
      std::string rendered = uni::to_utf8(map.byte_to_char[static_cast<size_t>(b)]);
      auto id = v.id_of(rendered);
      if (!id)
        throw std::runtime_error("vocabulary lacks base byte token '" + rendered +
                                 "' (byte " + std::to_string(b) + ")");
      v.base_ids_[b] = *id;
      non_special.insert(*id);
    }

    v.merge_lookup_.reserve(v.merges_.size());
    for (size_t r = 0; r < v.merges_.size(); ++r) {
      const auto& [l, rgt] = v.merges_[r];
      auto lid = v.id_of(l);
      auto rid = v.id_of(rgt);
      auto mid = v.id_of(l + rgt);
      if (!lid || !rid || !mid)
        throw std::runtime_error(where(r) + ": merge '" + l + "' + '" + rgt +
                                 "' references a token missing from the vocabulary");
      auto [it, fresh] = v.merge_lookup_.emplace(
          pack(*lid, *rid), MergeRule{static_cast<int32_t>(r), *mid});
      if (!fresh)
        throw std::runtime_error(where(r) + ": duplicate merge '" + l + " " + rgt + "'");
      non_special.insert(*mid);
    }

    for (size_t i = 0; i < v.tokens_.size(); ++i) {
      int32_t id = static_cast<int32_t>(i);
      if (!non_special.count(id)) v.special_ids_.push_back(id);
    }
    std::sort(v.special_ids_.begin(), v.special_ids_.end());
    for (size_t i = 0; i < v.tokens_.size(); ++i) {
      int32_t id = static_cast<int32_t>(i);
      if (!v.is_special(id)) v.non_special_ids_.push_back(id);
    }
    return v;
  }

 private:
  static uint64_t pack(int32_t l, int32_t r) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(l)) << 32) |
           static_cast<uint32_t>(r);
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int32_t> token_to_id_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::unordered_map<uint64_t, MergeRule> merge_lookup_;
  std::array<int32_t, 256> base_ids_{};
  std::vector<int32_t> special_ids_;      // sorted
  std::vector<int32_t> non_special_ids_;  // sorted
  size_t budget_ = 0;
};

namespace detail {

struct PairHash {
  size_t operator()(uint64_t v) const {
    v ^= v >> 33;
    v *= 0xFF51AFD7ED558CCDULL;
    v ^= v >> 33;
    return static_cast<size_t>(v);
  }
};

}  // namespace detail

// Greedy trainer over word-type frequencies. Each iteration merges the most
// frequent adjacent pair; equal frequencies resolve to the lexicographically
// smallest (left, right) token-string pair, which pins the merge list for a
// given corpus and budget.
class Trainer {
 public:
  Trainer(size_t vocab_size, Specials specials = {})
      : budget_(vocab_size), specials_(std::move(specials)) {
    const size_t reserved = BpeVocab::kBaseAlphabet + specials_.ordered().size();
    if (vocab_size <= reserved)
      throw std::invalid_argument(
          "vocab size " + std::to_string(vocab_size) + " must exceed " +
          std::to_string(reserved) + " (base alphabet + special tokens)");
  }

  void add_sentence(std::string_view sentence) {
    for (std::string_view tok : pre_tokenize(sentence))
      ++word_freq_[uni::render_bytes(tok)];
  }

  BpeVocab train() {
    if (word_freq_.empty()) throw std::invalid_argument("training corpus is empty");

    std::vector<std::string> tokens = specials_.ordered();
    const auto& map = uni::byte_char_map();
    std::unordered_map<std::string, int32_t> token_id;
    for (size_t i = 0; i < tokens.size(); ++i)
      token_id[tokens[i]] = static_cast<int32_t>(i);
    for (int b = 0; b < 256; ++b) {
      std::string rendered = uni::to_utf8(map.byte_to_char[static_cast<size_t>(b)]);
      token_id[rendered] = static_cast<int32_t>(tokens.size());
      tokens.push_back(rendered);
    }

    // Word types as symbol sequences; rendered chars are one symbol each.
    struct Word {
      std::vector<int32_t> syms;
      int64_t freq;
    };
    std::vector<Word> words;
    words.reserve(word_freq_.size());
    for (const auto& [rendered, freq] : word_freq_) {
      Word w;
      w.freq = freq;
      for (size_t i = 0; i < rendered.size();) {
        uni::Decoded d = uni::decode(rendered, i);
        w.syms.push_back(token_id.at(uni::to_utf8(d.cp)));
        i += static_cast<size_t>(d.len);
      }
      words.push_back(std::move(w));
    }

    auto pack = [](int32_t l, int32_t r) {
      return (static_cast<uint64_t>(static_cast<uint32_t>(l)) << 32) |
             static_cast<uint32_t>(r);
    };
    std::unordered_map<uint64_t, int64_t, detail::PairHash> pair_count;
    std::unordered_map<uint64_t, std::unordered_set<uint32_t>, detail::PairHash> pair_where;
    for (uint32_t wi = 0; wi < words.size(); ++wi) {
      const Word& w = words[wi];
      for (size_t i = 0; i + 1 < w.syms.size(); ++i) {
        uint64_t key = pack(w.syms[i], w.syms[i + 1]);
        pair_count[key] += w.freq;
        pair_where[key].insert(wi);
      }
    }

    std::vector<std::pair<std::string, std::string>> merges;
    while (tokens.size() < budget_) {
      uint64_t best_key = 0;
      int64_t best_count = 0;
      for (const auto& [key, count] : pair_count) {
        if (count <= 0) continue;
        if (count > best_count) {
          best_count = count;
          best_key = key;
        } else if (count == best_count && pair_less(tokens, key, best_key)) {
          best_key = key;
        }
      }
      if (best_count <= 0) break;  // corpus exhausted

      const int32_t left = static_cast<int32_t>(best_key >> 32);
      const int32_t right = static_cast<int32_t>(best_key & 0xFFFFFFFFu);
      std::string joined = tokens[static_cast<size_t>(left)] +
                           tokens[static_cast<size_t>(right)];
      merges.emplace_back(tokens[static_cast<size_t>(left)],
                          tokens[static_cast<size_t>(right)]);
      // A merge can spell out an existing token (text containing "<mask>"
      // literally); it then folds onto that id instead of minting a new one.
      int32_t merged;
      if (auto it = token_id.find(joined); it != token_id.end()) {
        merged = it->second;
      } else {
        merged = static_cast<int32_t>(tokens.size());
        token_id[joined] = merged;
        tokens.push_back(std::move(joined));
      }

      auto touched = pair_where[best_key];  // copy; rewrites mutate the index
      for (uint32_t wi : touched) {
        Word& w = words[wi];
        bool contains = false;
        for (size_t i = 0; i + 1 < w.syms.size(); ++i)
          if (pack(w.syms[i], w.syms[i + 1]) == best_key) {
            contains = true;
            break;
          }
        if (!contains) continue;  // stale index entry

        for (size_t i = 0; i + 1 < w.syms.size(); ++i)
          pair_count[pack(w.syms[i], w.syms[i + 1])] -= w.freq;

        std::vector<int32_t> next;
        next.reserve(w.syms.size());
        for (size_t i = 0; i < w.syms.size();) {
          if (i + 1 < w.syms.size() && pack(w.syms[i], w.syms[i + 1]) == best_key) {
            next.push_back(merged);
            i += 2;
          } else {
            next.push_back(w.syms[i]);
            ++i;
          }
        }
        w.syms = std::move(next);

        for (size_t i = 0; i + 1 < w.syms.size(); ++i) {
          uint64_t key = pack(w.syms[i], w.syms[i + 1]);
          pair_count[key] += w.freq;
          pair_where[key].insert(wi);
        }
      }
      pair_count.erase(best_key);
      pair_where.erase(best_key);
    }

    return BpeVocab::from_parts(std::move(tokens), std::move(merges), budget_,
                                [](size_t r) { return "merge " + std::to_string(r); });
  }

 private:
  static bool pair_less(const std::vector<std::string>& tokens, uint64_t a,
                        uint64_t b) {
    const auto& al = tokens[static_cast<size_t>(a >> 32)];
    const auto& ar = tokens[static_cast<size_t>(a & 0xFFFFFFFFu)];
    const auto& bl = tokens[static_cast<size_t>(b >> 32)];
    const auto& br = tokens[static_cast<size_t>(b & 0xFFFFFFFFu)];
    if (al != bl) return al < bl;
    return ar < br;
  }

  size_t budget_;
  Specials specials_;
  std::unordered_map<std::string, int64_t> word_freq_;
};

inline BpeVocab train_bpe(std::span<const std::string> corpus, size_t vocab_size,
                          const Specials& specials = {}) {
  Trainer trainer(vocab_size, specials);
  for (const auto& sentence : corpus) trainer.add_sentence(sentence);
  return trainer.train();
}

inline Segmentation encode(std::string_view text, const BpeVocab& vocab) {
  Segmentation seg;
  for (std::string_view tok : pre_tokenize(text)) {
    std::vector<int32_t> syms;
    syms.reserve(tok.size());
    for (unsigned char b : tok) syms.push_back(vocab.base_id(b));

    // Repeatedly apply the lowest-ranked merge present, all occurrences
    // left to right.
    while (syms.size() > 1) {
      int32_t best_rank = -1;
      std::optional<BpeVocab::MergeRule> best;
      for (size_t i = 0; i + 1 < syms.size(); ++i) {
        auto rule = vocab.merge_rule(syms[i], syms[i + 1]);
        if (rule && (best_rank < 0 || rule->rank < best_rank)) {
          best_rank = rule->rank;
          best = rule;
        }
      }
      if (!best) break;
      auto lookup = [&](size_t i) { return vocab.merge_rule(syms[i], syms[i + 1]); };
      std::vector<int32_t> next;
      next.reserve(syms.size());
      for (size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size()) {
          auto rule = lookup(i);
          if (rule && rule->rank == best_rank) {
            next.push_back(rule->merged);
            i += 2;
            continue;
          }
        }
        next.push_back(syms[i]);
        ++i;
      }
      syms = std::move(next);
    }

    size_t begin = seg.ids.size();
    for (int32_t id : syms) {
      seg.ids.push_back(id);
      seg.subwords.push_back(vocab.token_of(id));
    }
    seg.word_groups.emplace_back(begin, seg.ids.size());
  }
  return seg;
}

inline std::string decode(std::span<const int32_t> ids, const BpeVocab& vocab) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<size_t>(ids[i]) >= vocab.size())
      throw std::out_of_range("decode: id " + std::to_string(ids[i]) +
                              " at position " + std::to_string(i) +
                              " outside vocabulary of size " +
                              std::to_string(vocab.size()));
    const std::string& token = vocab.token_of(ids[i]);
    if (vocab.is_special(ids[i])) {
      out += token;  // specials render as their literal text
    } else if (!uni::unrender_bytes(token, out)) {
      throw std::runtime_error("decode: token '" + token +
                               "' is not a byte-level token");
    }
  }
  return out;
}

// On-disk layout: vocab.json (token -> id) and merges.txt (one "left right"
// per rank), the common published format for byte-level BPE models, plus a
// meta.json with the configured budget.
inline void save_vocab(const BpeVocab& vocab, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);

  nlohmann::json jv = nlohmann::json::object();
  for (size_t i = 0; i < vocab.size(); ++i)
    jv[vocab.tokens()[i]] = static_cast<int32_t>(i);
  std::ofstream vf(dir / "vocab.json", std::ios::binary);
  if (!vf) throw std::runtime_error("cannot write " + (dir / "vocab.json").string());
  vf << jv.dump() << "\n";

  std::ofstream mf(dir / "merges.txt", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write " + (dir / "merges.txt").string());
  mf << "#version: 0.2\n";
  for (const auto& [l, r] : vocab.merges()) mf << l << " " << r << "\n";

  nlohmann::json meta;
  meta["vocab_size_budget"] = vocab.budget();
  meta["vocab_size"] = vocab.size();
  nlohmann::json specials = nlohmann::json::array();
  for (int32_t id : vocab.special_ids()) specials.push_back(vocab.token_of(id));
  meta["special_tokens"] = specials;
  std::ofstream sf(dir / "meta.json", std::ios::binary);
  if (!sf) throw std::runtime_error("cannot write " + (dir / "meta.json").string());
  sf << meta.dump(2) << "\n";
}

inline BpeVocab load_vocab(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path vocab_path = fs::is_directory(dir) ? dir / "vocab.json" : dir;
  const fs::path merges_path =
      fs::is_directory(dir) ? dir / "merges.txt" : dir.parent_path() / "merges.txt";

  std::ifstream vf(vocab_path, std::ios::binary);
  if (!vf) throw std::runtime_error("cannot open " + vocab_path.string());
  nlohmann::json jv;
  try {
    vf >> jv;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(vocab_path.string() + ": " + e.what());
  }
  if (!jv.is_object())
    throw std::runtime_error(vocab_path.string() + ": expected a token->id object");

  std::vector<std::string> tokens(jv.size());
  std::vector<bool> seen(jv.size(), false);
  for (auto it = jv.begin(); it != jv.end(); ++it) {
    if (!it.value().is_number_integer())
      throw std::runtime_error(vocab_path.string() + ": id for token '" + it.key() +
                               "' is not an integer");
    int64_t id = it.value().get<int64_t>();
    if (id < 0 || static_cast<size_t>(id) >= tokens.size())
      throw std::runtime_error(vocab_path.string() + ": token '" + it.key() +
                               "' has id " + std::to_string(id) +
                               " outside [0, " + std::to_string(tokens.size()) + ")");
    if (seen[static_cast<size_t>(id)])
      throw std::runtime_error(vocab_path.string() + ": duplicate id " +
                               std::to_string(id));
    seen[static_cast<size_t>(id)] = true;
    tokens[static_cast<size_t>(id)] = it.key();
  }

  std::ifstream mf(merges_path, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot open " + merges_path.string());
  std::vector<std::pair<std::string, std::string>> merges;
  std::vector<size_t> merge_lines;
  std::string line;
  size_t line_no = 0;
  while (std::getline(mf, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("#version", 0) == 0) continue;
    size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size() ||
        line.find(' ', sp + 1) != std::string::npos)
      throw std::runtime_error(merges_path.string() + ":" + std::to_string(line_no) +
                               ": expected 'left right'");
    merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    merge_lines.push_back(line_no);
  }

  size_t budget = tokens.size();
  std::ifstream sf(fs::is_directory(dir) ? dir / "meta.json" : fs::path(),
                   std::ios::binary);
  if (sf) {
    try {
      nlohmann::json meta;
      sf >> meta;
      if (meta.contains("vocab_size_budget"))
        budget = meta["vocab_size_budget"].get<size_t>();
    } catch (const nlohmann::json::exception&) {
      // optional sidecar; ignore if malformed
    }
  }

  return BpeVocab::from_parts(
      std::move(tokens), std::move(merges), budget, [&](size_t r) {
        return merges_path.string() + ":" + std::to_string(merge_lines[r]);
      });
}

}  // namespace biotok::bpe
