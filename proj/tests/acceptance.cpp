// Acceptance suite: one checkable criterion per function, one PASS/FAIL line
// each. Run with a criterion number (1-10) or with no arguments for all.
// Exit codes: 0 pass, 1 fail, 77 skipped (environment-dependent input absent).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "biotok/analysis.hpp"
#include "biotok/bpe.hpp"
#include "biotok/corpus.hpp"
#include "biotok/masking.hpp"
#include "biotok/ner.hpp"
#include "biotok/report.hpp"
#include "biotok/rng.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace biotok;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kSkip = 77;

const size_t kReserved = 256 + bpe::Specials{}.ordered().size();

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- 1: byte-exact round-trip over fuzzed UTF-8 ---------------------------

int criterion_roundtrip(Check& c) {
  auto start = Clock::now();
  std::vector<std::string> corpus = {
      "la paciente presenta fiebre y dolor abdominal",
      "el tratamiento con insulina fue efectivo",
      "radiografía de tórax sin hallazgos relevantes",
      "niveles elevados de glucosa en sangre"};
  auto vocab = bpe::train_bpe(corpus, kReserved + 120);

  Rng rng(20260808);
  for (int i = 0; i < 10000; ++i) {
    std::string s = gen::utf8_string(rng, 120);
    auto seg = bpe::encode(s, vocab);
    std::string back = bpe::decode(seg.ids, vocab);
    if (back != s) {
      c.expect(false, "mismatch on fuzz case " + std::to_string(i));
      return 1;
    }
  }
  double elapsed = seconds_since(start);
  c.expect(elapsed < 30.0, "took " + std::to_string(elapsed) + "s (limit 30s)");
  c.detail = c.ok ? "10000 strings, " + report::fixed(elapsed, 2) + "s" : c.detail;
  return c.ok ? 0 : 1;
}

// ---- 2: trainer equals the brute-force reference --------------------------

int criterion_trainer_oracle(Check& c) {
  Rng rng(77);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> corpus;
    size_t budget_bytes = 1 + rng.below(200);
    size_t used = 0;
    while (used < budget_bytes) {
      std::string s = gen::ascii_sentence(rng, 6, 6, 2 + static_cast<int>(rng.below(4)));
      if (used + s.size() > 200) break;
      used += s.size();
      corpus.push_back(std::move(s));
    }
    if (corpus.empty()) corpus.push_back("ab");
    size_t merges = 1 + rng.below(10);

    auto expect = oracle::train_merges(corpus, merges);
    auto vocab = bpe::train_bpe(corpus, kReserved + merges);
    if (vocab.merges() != expect) {
      c.expect(false, "merge list mismatch on corpus " + std::to_string(round));
      return 1;
    }
  }
  c.detail = "200 corpora, exact";
  return 0;
}

// ---- 3: masking statistics and WWM atomicity -------------------------------

int criterion_masking_stats(Check& c) {
  Rng rng(3111);
  std::vector<std::string> train_corpus;
  for (int i = 0; i < 150; ++i) train_corpus.push_back(gen::ascii_sentence(rng, 10, 6, 6));
  auto vocab = bpe::train_bpe(train_corpus, kReserved + 300);

  auto make_pack = [&](size_t target_positions) {
    std::vector<bpe::Segmentation> parts;
    size_t have = 0;
    while (have < target_positions) {
      std::string text = gen::ascii_sentence(rng, 12, 8, 6);
      auto seg = bpe::encode(text, vocab);
      have += seg.ids.size();
      parts.push_back(std::move(seg));
    }
    auto packed = mask::pack_document(parts, 512);
    return packed;
  };

  // defaults (subword masking): selection and replacement rates
  mask::MaskingConfig defaults;
  int64_t maskable = 0;
  std::vector<mask::MaskedExample> examples;
  while (maskable < 100000) {
    for (auto& seg : make_pack(4096)) {
      auto ex = mask::make_example(seg, vocab, defaults, rng);
      maskable += static_cast<int64_t>(ex.maskable);
      examples.push_back(std::move(ex));
    }
  }
  auto st = mask::masking_stats(examples, *vocab.special_id("<mask>"));
  c.expect(st.maskable >= 100000, "fixture too small");
  c.expect(std::abs(st.selection_rate - 0.15) <= 0.005,
           "selection rate " + std::to_string(st.selection_rate));
  c.expect(std::abs(st.mask_rate - 0.8) <= 0.015,
           "mask rate " + std::to_string(st.mask_rate));
  c.expect(std::abs(st.random_rate - 0.1) <= 0.015,
           "random rate " + std::to_string(st.random_rate));
  c.expect(std::abs(st.keep_rate - 0.1) <= 0.015,
           "keep rate " + std::to_string(st.keep_rate));

  // whole-word masking: zero atomicity violations over the fuzz suite
  mask::MaskingConfig wwm;
  wwm.strategy = mask::Strategy::kWholeWord;
  int64_t wwm_positions = 0;
  int64_t violations = 0;
  while (wwm_positions < 100000) {
    for (auto& seg : make_pack(4096)) {
      auto ex = mask::make_example(seg, vocab, wwm, rng);
      wwm_positions += static_cast<int64_t>(ex.maskable);
      std::set<size_t> selected(ex.selected.begin(), ex.selected.end());
      for (auto [begin, end] : seg.word_groups) {
        size_t hit = 0;
        for (size_t p = begin; p < end; ++p) hit += selected.count(p);
        if (hit != 0 && hit != end - begin) ++violations;
      }
    }
  }
  c.expect(violations == 0, std::to_string(violations) + " atomicity violations");
  if (c.ok)
    c.detail = "rate " + report::fixed(st.selection_rate, 4) + ", split " +
               report::fixed(st.mask_rate, 3) + "/" +
               report::fixed(st.random_rate, 3) + "/" +
               report::fixed(st.keep_rate, 3) + ", wwm violations 0";
  return c.ok ? 0 : 1;
}

// ---- 4: scoring equals brute-force span intersection ------------------------

int criterion_ner_oracle(Check& c) {
  Rng rng(4111);
  for (int round = 0; round < 1000; ++round) {
    auto corpus = gen::bio_corpus(rng, 5, 10, 3);
    auto pred_tags = gen::perturb_tags(rng, corpus, 3);
    std::vector<ner::TaggedSentence> gold, pred;
    for (size_t i = 0; i < corpus.tags.size(); ++i) {
      gold.push_back({corpus.tokens[i], corpus.tags[i]});
      pred.push_back({corpus.tokens[i], pred_tags[i]});
    }
    auto mine = ner::score(gold, pred);
    auto ref = oracle::score(corpus.tags, pred_tags);
    bool micro_ok = mine.micro.tp == ref.micro.tp && mine.micro.fp == ref.micro.fp &&
                    mine.micro.fn == ref.micro.fn &&
                    mine.micro.precision == ref.micro.precision &&
                    mine.micro.recall == ref.micro.recall &&
                    mine.micro.f1 == ref.micro.f1;
    bool types_ok = mine.per_type.size() == ref.per_type.size();
    if (types_ok)
      for (const auto& [type, row] : ref.per_type) {
        auto it = mine.per_type.find(type);
        types_ok = types_ok && it != mine.per_type.end() && it->second.tp == row.tp &&
                   it->second.fp == row.fp && it->second.fn == row.fn &&
                   it->second.precision == row.precision &&
                   it->second.recall == row.recall && it->second.f1 == row.f1;
      }
    if (!micro_ok || !types_ok) {
      c.expect(false, "oracle mismatch on corpus " + std::to_string(round));
      return 1;
    }
    auto swapped = ner::score(pred, gold);
    bool sym = swapped.micro.precision == mine.micro.recall &&
               swapped.micro.recall == mine.micro.precision &&
               std::abs(swapped.micro.f1 - mine.micro.f1) < 1e-12;
    if (!sym) {
      c.expect(false, "symmetry violated on corpus " + std::to_string(round));
      return 1;
    }
  }
  c.detail = "1000 corpora, exact + symmetric";
  return 0;
}

// ---- 5: aggregation closed form --------------------------------------------

int criterion_aggregation(Check& c) {
  ner::NerScores a, b;
  a.micro.precision = a.micro.recall = a.micro.f1 = 0.8;
  b.micro.precision = b.micro.recall = b.micro.f1 = 0.9;
  std::vector<ner::NerScores> pair = {a, b};
  auto agg = ner::aggregate_runs(pair);
  c.expect(std::abs(agg.f1.mean - 0.85) <= 1e-9,
           "mean " + std::to_string(agg.f1.mean));
  c.expect(std::abs(agg.f1.std - 0.070710678) <= 1e-9,
           "std " + std::to_string(agg.f1.std));

  std::vector<ner::NerScores> same = {a, a, a, a, a};
  auto flat = ner::aggregate_runs(same);
  c.expect(flat.f1.std == 0.0, "identical runs std != 0");
  c.expect(flat.precision.std == 0.0, "identical runs std != 0");
  if (c.ok) c.detail = "mean 0.85, std 0.070710678, flat std 0";
  return c.ok ? 0 : 1;
}

// ---- 6: published overlap percentages reproduce ------------------------------

int criterion_overlap_consistency(Check& c) {
  struct Cell {
    size_t count, size;
    long pct;
  };
  const Cell cells[] = {{20620, 52000, 40}, {15792, 30000, 53}, {12829, 31000, 41}};
  for (const auto& cell : cells) {
    double percent = static_cast<double>(cell.count) / static_cast<double>(cell.size);
    long displayed = std::lround(percent * 100.0);
    c.expect(displayed == cell.pct,
             std::to_string(cell.count) + "/" + std::to_string(cell.size) + " -> " +
                 std::to_string(displayed) + " != " + std::to_string(cell.pct));

    // same result through the CSV display path
    nlohmann::json artifact = {
        {"rows",
         {{{"model", "m"},
           {"task", "t"},
           {"overlap_count", cell.count},
           {"vocab_size", cell.size},
           {"percent", percent}}}}};
    std::string csv = report::overlap_csv(artifact);
    std::string tail = "," + std::to_string(cell.pct) + "\n";
    c.expect(csv.find(tail) != std::string::npos, "csv row lacks " + tail);
  }
  if (c.ok) c.detail = "40% / 53% / 41% after integer rounding";
  return c.ok ? 0 : 1;
}

// ---- 7: bucket percentages sum to 100 ---------------------------------------

int criterion_bucket_sums(Check& c) {
  const double column[] = {2.79, 15.35, 23.18, 26.51, 32.17};
  double sum = 0;
  for (double v : column) sum += v;
  c.expect(std::abs(sum - 100.00) <= 0.01,
           "fixture column sums to " + std::to_string(sum));

  Rng rng(7111);
  for (int round = 0; round < 300; ++round) {
    std::vector<size_t> counts;
    size_t n = 1 + rng.below(80);
    for (size_t i = 0; i < n; ++i) counts.push_back(1 + rng.below(9));
    auto stats = analysis::seg_stats(counts);
    double s = 0;
    for (double b : stats.buckets) s += b;
    if (std::abs(s - 1.0) > 1e-9) {
      c.expect(false, "bucket sum " + std::to_string(s));
      return 1;
    }
  }
  if (c.ok) c.detail = "fixture sums to 100.00; 300 random reports sum to 1";
  return c.ok ? 0 : 1;
}

// ---- 8: dissection partitions the gold counts -------------------------------

int criterion_dissection_partition(Check& c) {
  Rng rng(8111);
  std::vector<std::string> train_corpus;
  for (int i = 0; i < 60; ++i) train_corpus.push_back(gen::ascii_sentence(rng, 6, 6, 8));
  auto vocab = bpe::train_bpe(train_corpus, kReserved + 120);

  for (int round = 0; round < 500; ++round) {
    auto corpus = gen::bio_corpus(rng, 5, 10, 3);
    auto pred_tags = gen::perturb_tags(rng, corpus, 3);
    std::vector<ner::TaggedSentence> gold, pred;
    for (size_t i = 0; i < corpus.tags.size(); ++i) {
      gold.push_back({corpus.tokens[i], corpus.tags[i]});
      pred.push_back({corpus.tokens[i], pred_tags[i]});
    }
    size_t max_bucket = 1 + rng.below(10);
    auto r = analysis::dissect_scores(gold, pred, vocab, max_bucket);
    auto plain = ner::score(gold, pred);
    int64_t tp = 0, fn = 0;
    for (const auto& row : r.buckets) {
      tp += row.tp;
      fn += row.fn;
    }
    if (tp != plain.micro.tp || fn != plain.micro.fn) {
      c.expect(false, "partition mismatch on fixture " + std::to_string(round));
      return 1;
    }
    if (max_bucket == 1) {
      const auto& only = r.buckets[0];
      bool same = only.tp == plain.micro.tp && only.fp == plain.micro.fp &&
                  only.fn == plain.micro.fn && only.precision == plain.micro.precision &&
                  only.recall == plain.micro.recall && only.f1 == plain.micro.f1;
      if (!same) {
        c.expect(false, "single-bucket mismatch on fixture " + std::to_string(round));
        return 1;
      }
    }
  }
  c.detail = "500 fixtures, exact partition";
  return 0;
}

// ---- 9: pipeline idempotence and the golden fixture --------------------------

int criterion_pipeline(Check& c) {
  // idempotence over random corpora
  Rng rng(9111);
  for (int round = 0; round < 100; ++round) {
    corpus::CleanConfig cfg;
    cfg.filter.lang.clear();
    cfg.filter.min_chars = 3;
    cfg.filter.min_tokens = 1;
    cfg.filter.min_alpha_ratio = 0.3;
    std::vector<corpus::RawDocument> raw;
    size_t n = 1 + rng.below(12);
    for (size_t i = 0; i < n; ++i) {
      std::string text;
      size_t sentences = 1 + rng.below(5);
      for (size_t s = 0; s < sentences; ++s) {
        text += gen::ascii_sentence(rng, 5, 5, 5);
        text += ". ";
      }
      raw.push_back({"d" + std::to_string(i), "s", text, {}});
    }
    auto once = corpus::clean_corpus(raw, cfg);
    std::vector<corpus::RawDocument> again;
    for (const auto& d : once.docs) {
      std::string text;
      for (const auto& s : d.sentences) {
        text += s;
        text += ' ';
      }
      again.push_back({d.id, d.source, text, {}});
    }
    auto twice = corpus::clean_corpus(again, cfg);
    std::multiset<std::string> m1, m2;
    for (const auto& d : once.docs)
      for (const auto& s : d.sentences) m1.insert(s);
    for (const auto& d : twice.docs)
      for (const auto& s : d.sentences) m2.insert(s);
    if (m1 != m2) {
      c.expect(false, "idempotence broken on corpus " + std::to_string(round));
      return 1;
    }
  }

  // end-to-end toy fixture against the checked-in golden reports
  const fs::path fixtures = BIOTOK_FIXTURES;
  const std::string bin = BIOTOK_BIN;
  fs::path work = fs::temp_directory_path() / "biotok_acceptance_pipeline";
  fs::remove_all(work);
  fs::create_directories(work);

  auto start = Clock::now();
  auto sh = [&](const std::string& args) {
    std::string cmd = "BIOTOK_LOG=none " + bin + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  const std::string F = fixtures.string();
  const std::string W = work.string();
  bool ran =
      sh("clean --input " + F + "/raw_docs.jsonl --out " + W + "/clean.jsonl" +
         " --stats-out " + W + "/stats --drop-log " + W + "/drop_log.jsonl") &&
      sh("train-bpe --input " + W + "/clean.jsonl --format jsonl --vocab-size 600 "
         "--out " + W + "/vocab") &&
      sh("encode --vocab " + W + "/vocab --input " + W + "/clean.jsonl "
         "--format jsonl --out " + W + "/encoded.jsonl") &&
      sh("mask --vocab " + W + "/vocab --input " + W + "/encoded.jsonl "
         "--strategy wwm --seed 42 --pack 128 --out " + W + "/masked.jsonl "
         "--stats-out " + W + "/masking_stats.json") &&
      sh("overlap --vocab " + W + "/vocab --task " + F + "/gold.conll "
         "--model toy-600 --out " + W + "/analysis") &&
      sh("seg-stats --vocab " + W + "/vocab --gold " + F + "/gold.conll "
         "--model toy-600 --out " + W + "/analysis") &&
      sh("dissect --vocab " + W + "/vocab --gold " + F + "/gold.conll --pred " + F +
         "/pred.conll --model toy-600 --max-bucket 8 --out " + W + "/analysis") &&
      sh("ner-eval --gold " + F + "/gold.conll --pred " + F + "/pred.conll "
         "--report json --out " + W + "/analysis/ner_scores.json") &&
      sh("report --in " + W + "/analysis --out " + W + "/report");
  double elapsed = seconds_since(start);
  c.expect(ran, "pipeline command failed");
  if (!ran) return 1;
  c.expect(elapsed < 10.0, "pipeline took " + std::to_string(elapsed) + "s (limit 10)");

  const char* files[] = {"clean.jsonl",        "stats.json",
                         "stats.csv",          "drop_log.jsonl",
                         "encoded.jsonl",      "masked.jsonl",
                         "masking_stats.json", "vocab/vocab.json",
                         "vocab/merges.txt",   "vocab/meta.json",
                         "analysis/overlap.json",   "analysis/overlap.csv",
                         "analysis/seg_stats.json", "analysis/seg_stats.csv",
                         "analysis/dissect.json",   "analysis/dissect.csv",
                         "analysis/ner_scores.json",
                         "report/report.json",
                         "report/report_overlap.csv",
                         "report/report_seg_stats.csv",
                         "report/report_dissection.csv",
                         "report/report_ner.csv"};
  for (const char* rel : files) {
    std::string got = slurp(work / rel);
    std::string want = slurp(fixtures / "golden" / rel);
    if (got.empty() || got != want) {
      c.expect(false, std::string(rel) + " differs from golden");
      return 1;
    }
  }
  fs::remove_all(work);
  if (c.ok)
    c.detail = "100 idempotence corpora; golden byte-identical in " +
               report::fixed(elapsed, 2) + "s";
  return c.ok ? 0 : 1;
}

// ---- 10: stretch, released vocabulary (environment-dependent) ----------------

int criterion_released_vocab(Check& c) {
  const char* vocab_dir = std::getenv("BIOTOK_RELEASED_VOCAB");
  const char* task_file = std::getenv("BIOTOK_TASK_CONLL");
  if (!vocab_dir || !task_file) {
    std::cout << "  (set BIOTOK_RELEASED_VOCAB and BIOTOK_TASK_CONLL to run; "
                 "compares overlap and segmentation against the published "
                 "values)\n";
    return kSkip;
  }
  auto vocab = bpe::load_vocab(vocab_dir);
  auto task = ner::parse_conll_file(task_file);
  auto token_set = analysis::task_token_set(task, vocab);
  auto ov = analysis::overlap(vocab, token_set, "released", "task");
  auto annotations = analysis::gold_annotations(task);
  auto counts = analysis::segment_annotations(annotations, vocab);
  auto stats = analysis::seg_stats(counts);
  std::cout << "  vocab size " << vocab.size() << ", overlap " << ov.overlap_count
            << " (" << std::lround(ov.percent * 100) << "%), mean subwords "
            << report::fixed(stats.mean, 2) << ", median "
            << report::fixed(stats.median, 1) << "\n";
  std::cout << "  compare against the published tables; deviations come from "
               "pre-tokenization unknowns and must be reported\n";
  c.detail = "informational";
  return 0;
}

struct Criterion {
  int number;
  const char* title;
  std::function<int(Check&)> fn;
};

const Criterion kCriteria[] = {
    {1, "byte-level round-trip on 10k fuzzed strings", criterion_roundtrip},
    {2, "trainer matches brute-force reference on 200 corpora", criterion_trainer_oracle},
    {3, "masking rates within bounds, whole-word atomicity exact", criterion_masking_stats},
    {4, "scorer matches span-set intersection on 1000 corpora", criterion_ner_oracle},
    {5, "aggregation closed forms", criterion_aggregation},
    {6, "overlap percentages reproduce published cells", criterion_overlap_consistency},
    {7, "segmentation bucket fractions sum to one", criterion_bucket_sums},
    {8, "dissection partitions gold counts exactly", criterion_dissection_partition},
    {9, "pipeline idempotent; toy fixture matches golden byte-for-byte", criterion_pipeline},
    {10, "released-vocabulary comparison (environment-dependent)", criterion_released_vocab},
};

int run_one(const Criterion& criterion) {
  Check check;
  int rc = 1;
  try {
    rc = criterion.fn(check);
  } catch (const std::exception& e) {
    check.ok = false;
    check.detail = std::string("exception: ") + e.what();
  }
  if (rc == kSkip) {
    std::cout << "SKIP  criterion " << criterion.number << ": " << criterion.title
              << "\n";
    return kSkip;
  }
  bool pass = rc == 0 && check.ok;
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << criterion.number << ": "
            << criterion.title;
  if (!check.detail.empty()) std::cout << " — " << check.detail;
  std::cout << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::cout.setf(std::ios::unitbuf);
  if (argc > 1) {
    int wanted = std::atoi(argv[1]);
    for (const auto& criterion : kCriteria)
      if (criterion.number == wanted) return run_one(criterion);
    std::cerr << "unknown criterion " << argv[1] << "\n";
    return 2;
  }
  int failures = 0;
  for (const auto& criterion : kCriteria) {
    int rc = run_one(criterion);
    if (rc != 0 && rc != kSkip) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
