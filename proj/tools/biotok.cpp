// biotok: corpus cleaning, byte-level BPE, masked-LM data generation, strict
// BIO NER scoring and vocabulary analyses behind one set of subcommands.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "biotok/analysis.hpp"
#include "biotok/bpe.hpp"
#include "biotok/corpus.hpp"
#include "biotok/jsonl.hpp"
#include "biotok/masking.hpp"
#include "biotok/ner.hpp"
#include "biotok/report.hpp"
#include "biotok/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace biotok;

namespace {

// ---- logging ---------------------------------------------------------------

enum class LogLevel { kDebug = 0, kInfo, kWarn, kError, kNone };

LogLevel g_log_level = LogLevel::kInfo;

LogLevel log_level_from_env() {
  const char* env = std::getenv("BIOTOK_LOG");
  if (!env) return LogLevel::kInfo;
  std::string v = env;
  if (v == "debug") return LogLevel::kDebug;
  if (v == "info") return LogLevel::kInfo;
  if (v == "warn") return LogLevel::kWarn;
  if (v == "error") return LogLevel::kError;
  if (v == "none") return LogLevel::kNone;
  return LogLevel::kInfo;
}

void log(LogLevel level, const std::string& msg) {
  static const char* names[] = {"debug", "info", "warn", "error"};
  if (level < g_log_level || level == LogLevel::kNone) return;
  std::cerr << "[biotok:" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

// ---- small I/O helpers -------------------------------------------------------

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

// Emit to a file when given, stdout otherwise.
void emit(const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    write_text(*path, text);
  } else {
    std::cout << text;
  }
}

fs::path strip_known_ext(const fs::path& p) {
  auto ext = p.extension().string();
  if (ext == ".json" || ext == ".csv") return p.parent_path() / p.stem();
  return p;
}

// ---- clean -----------------------------------------------------------------

struct CleanArgs {
  std::string input;
  std::string format = "jsonl";
  std::string source = "txt";
  std::string lang = "es";
  double lang_threshold = 0.5;
  size_t min_chars = 10;
  size_t min_tokens = 3;
  double alpha_ratio = 0.4;
  std::string dedup = "global";
  std::string dedup_unit = "sentence";
  bool dedup_case_insensitive = false;
  bool passthrough = false;
  std::optional<std::string> out;
  std::optional<std::string> stats_out;
  std::optional<std::string> drop_log;
};

std::vector<corpus::RawDocument> read_raw_documents(const CleanArgs& args) {
  std::vector<corpus::RawDocument> docs;
  auto in = open_in(args.input);
  if (args.format == "jsonl") {
    size_t bad = jsonl::for_each(
        in, args.input,
        [&](const json& record, size_t line_no) {
          corpus::RawDocument doc;
          if (!record.is_object() || !record.contains("text") ||
              !record.at("text").is_string()) {
            log(LogLevel::kWarn, args.input + ":" + std::to_string(line_no) +
                                     ": skipping record without text");
            return;
          }
          doc.text = record.at("text").get<std::string>();
          doc.id = record.contains("id") && record.at("id").is_string()
                       ? record.at("id").get<std::string>()
                       : "line-" + std::to_string(line_no);
          doc.source = record.contains("source") && record.at("source").is_string()
                           ? record.at("source").get<std::string>()
                           : "unknown";
          docs.push_back(std::move(doc));
        },
        /*skip_bad=*/true);
    if (bad > 0)
      log(LogLevel::kWarn, args.input + ": skipped " + std::to_string(bad) +
                               " unparseable lines");
  } else {  // plain text, blank-line document separator
    std::string line, text;
    size_t doc_no = 0;
    auto flush = [&] {
      if (text.empty()) return;
      corpus::RawDocument doc;
      doc.id = "doc-" + std::to_string(++doc_no);
      doc.source = args.source;
      doc.text = std::move(text);
      text.clear();
      docs.push_back(std::move(doc));
    };
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) {
        flush();
      } else {
        if (!text.empty()) text += '\n';
        text += line;
      }
    }
    flush();
  }
  return docs;
}

int run_clean(const CleanArgs& args) {
  corpus::CleanConfig cfg;
  cfg.filter.lang = args.lang == "none" ? "" : args.lang;
  cfg.filter.lang_threshold = args.lang_threshold;
  cfg.filter.min_chars = args.min_chars;
  cfg.filter.min_tokens = args.min_tokens;
  cfg.filter.min_alpha_ratio = args.alpha_ratio;
  cfg.dedup_enabled = args.dedup != "none";
  cfg.dedup.scope = args.dedup == "per-source" ? corpus::DedupScope::kPerSource
                                               : corpus::DedupScope::kGlobal;
  cfg.dedup.unit = args.dedup_unit == "document" ? corpus::DedupUnit::kDocument
                                                 : corpus::DedupUnit::kSentence;
  cfg.dedup.case_insensitive = args.dedup_case_insensitive;
  cfg.passthrough = args.passthrough;

  auto raw = read_raw_documents(args);
  log(LogLevel::kInfo, "cleaning " + std::to_string(raw.size()) + " documents");
  auto result = corpus::clean_corpus(raw, cfg);

  std::string clean_lines;
  for (const auto& doc : result.docs) {
    json record = {{"id", doc.id}, {"source", doc.source}, {"sentences", doc.sentences}};
    clean_lines += record.dump() + "\n";
  }
  emit(args.out, clean_lines);

  if (args.stats_out) {
    fs::path base = strip_known_ext(*args.stats_out);
    write_json(fs::path(base.string() + ".json"), report::stats_artifact(result.stats));
    write_text(fs::path(base.string() + ".csv"), report::stats_csv(result.stats));
  }
  if (args.drop_log) {
    std::string lines;
    for (const auto& rec : result.drop_log) {
      json record = {{"id", rec.id},
                     {"sentence_index", rec.sentence_index},
                     {"reason", rec.reason}};
      lines += record.dump() + "\n";
    }
    write_text(*args.drop_log, lines);
  }
  auto total = result.stats.total();
  log(LogLevel::kInfo, "kept " + std::to_string(total.documents) + " documents, " +
                           std::to_string(total.sentences) + " sentences, " +
                           std::to_string(total.tokens) + " tokens; dropped " +
                           std::to_string(result.drop_log.size()) + " entries");
  return 0;
}

// ---- train-bpe ---------------------------------------------------------------

struct TrainArgs {
  std::vector<std::string> inputs;
  std::string format = "txt";
  size_t vocab_size = 0;
  std::string out;
};

int run_train(const TrainArgs& args) {
  bpe::Trainer trainer(args.vocab_size);
  size_t sentences = 0;
  for (const auto& input : args.inputs) {
    auto in = open_in(input);
    if (args.format == "jsonl") {
      jsonl::for_each(in, input, [&](const json& record, size_t) {
        if (!record.contains("sentences")) return;
        for (const auto& s : record.at("sentences")) {
          trainer.add_sentence(s.get<std::string>());
          ++sentences;
        }
      });
    } else {
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        trainer.add_sentence(line);
        ++sentences;
      }
    }
  }
  log(LogLevel::kInfo, "training on " + std::to_string(sentences) + " sentences");
  auto vocab = trainer.train();
  bpe::save_vocab(vocab, args.out);
  log(LogLevel::kInfo, "vocab size " + std::to_string(vocab.size()) + " (budget " +
                           std::to_string(vocab.budget()) + "), " +
                           std::to_string(vocab.merges().size()) + " merges -> " +
                           args.out);
  return 0;
}

// ---- encode -------------------------------------------------------------------

struct EncodeArgs {
  std::string vocab;
  std::optional<std::string> input;
  std::optional<std::string> out;
  std::string format = "txt";
  bool ids_only = false;
  bool pieces_only = false;
};

json encode_record(const bpe::Segmentation& seg, const std::optional<std::string>& doc) {
  std::vector<size_t> words(seg.ids.size());
  for (size_t g = 0; g < seg.word_groups.size(); ++g)
    for (size_t p = seg.word_groups[g].first; p < seg.word_groups[g].second; ++p)
      words[p] = g;
  json record = {{"ids", seg.ids}, {"words", words}};
  if (doc) record["doc"] = *doc;
  return record;
}

int run_encode(const EncodeArgs& args) {
  auto vocab = bpe::load_vocab(args.vocab);
  std::ifstream file;
  std::istream* in = &std::cin;
  if (args.input) {
    file = open_in(*args.input);
    in = &file;
  }
  std::ofstream out_file;
  std::ostream* out = &std::cout;
  if (args.out) {
    out_file = open_out(*args.out);
    out = &out_file;
  }

  auto emit_seg = [&](const bpe::Segmentation& seg,
                      const std::optional<std::string>& doc) {
    if (args.ids_only) {
      for (size_t i = 0; i < seg.ids.size(); ++i)
        *out << (i ? " " : "") << seg.ids[i];
      *out << "\n";
    } else if (args.pieces_only) {
      for (size_t i = 0; i < seg.subwords.size(); ++i)
        *out << (i ? " " : "") << seg.subwords[i];
      *out << "\n";
    } else {
      *out << encode_record(seg, doc).dump() << "\n";
    }
  };

  if (args.format == "jsonl") {
    jsonl::for_each(*in, args.input.value_or("<stdin>"),
                    [&](const json& record, size_t) {
                      if (!record.contains("sentences")) return;
                      std::optional<std::string> doc;
                      if (record.contains("id"))
                        doc = record.at("id").get<std::string>();
                      for (const auto& s : record.at("sentences"))
                        emit_seg(bpe::encode(s.get<std::string>(), vocab), doc);
                    });
  } else {
    std::string line;
    while (std::getline(*in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      emit_seg(bpe::encode(line, vocab), std::nullopt);
    }
  }
  return 0;
}

// ---- mask ----------------------------------------------------------------------

struct MaskArgs {
  std::string vocab;
  std::string input;
  std::string out;
  std::string strategy = "swm";
  double mask_prob = 0.15;
  double replace_mask = 0.8;
  double replace_random = 0.1;
  double keep = 0.1;
  std::string budget_unit = "subword";
  uint64_t seed = 0;
  size_t pack = 0;  // 0 = no packing
  std::optional<std::string> stats_out;
};

int run_mask(const MaskArgs& args) {
  mask::MaskingConfig cfg;
  cfg.strategy = args.strategy == "wwm" ? mask::Strategy::kWholeWord
                                        : mask::Strategy::kSubword;
  cfg.mask_prob = args.mask_prob;
  cfg.replace_mask = args.replace_mask;
  cfg.replace_random = args.replace_random;
  cfg.keep = args.keep;
  cfg.budget_unit = args.budget_unit == "word" ? mask::BudgetUnit::kWord
                                               : mask::BudgetUnit::kSubword;
  cfg.validate();  // before any input is touched
  auto vocab = bpe::load_vocab(args.vocab);

  // Encoded records, with document runs preserved for packing.
  struct Encoded {
    std::string doc;
    bpe::Segmentation seg;
  };
  std::vector<Encoded> records;
  {
    auto in = open_in(args.input);
    jsonl::for_each(in, args.input, [&](const json& record, size_t line_no) {
      Encoded e;
      e.doc = record.contains("doc") ? record.at("doc").get<std::string>()
                                     : "#line-" + std::to_string(line_no);
      e.seg.ids = record.at("ids").get<std::vector<int32_t>>();
      std::vector<size_t> words = record.contains("words")
                                      ? record.at("words").get<std::vector<size_t>>()
                                      : std::vector<size_t>(e.seg.ids.size(), 0);
      if (words.size() != e.seg.ids.size())
        throw std::runtime_error(args.input + ":" + std::to_string(line_no) +
                                 ": ids and words lengths differ");
      for (size_t p = 0; p < words.size(); ++p) {
        if (p == 0 || words[p] != words[p - 1])
          e.seg.word_groups.emplace_back(p, p + 1);
        else
          e.seg.word_groups.back().second = p + 1;
        e.seg.subwords.push_back(vocab.token_of(e.seg.ids[p]));
      }
      records.push_back(std::move(e));
    });
  }

  std::vector<bpe::Segmentation> inputs;
  if (args.pack > 0) {
    size_t i = 0;
    while (i < records.size()) {
      size_t j = i;
      std::vector<bpe::Segmentation> doc_segs;
      while (j < records.size() && records[j].doc == records[i].doc)
        doc_segs.push_back(records[j++].seg);
      for (auto& seg : mask::pack_document(doc_segs, args.pack))
        inputs.push_back(std::move(seg));
      i = j;
    }
  } else {
    for (auto& r : records) inputs.push_back(std::move(r.seg));
  }

  Rng rng(args.seed);
  std::vector<mask::MaskedExample> examples;
  std::string lines;
  for (const auto& seg : inputs) {
    if (seg.ids.empty()) continue;
    auto ex = mask::make_example(seg, vocab, cfg, rng);
    json record = {{"input_ids", ex.input_ids},
                   {"labels", ex.labels},
                   {"selected", ex.selected}};
    lines += record.dump() + "\n";
    examples.push_back(std::move(ex));
  }
  write_text(args.out, lines);

  if (args.stats_out && !examples.empty()) {
    auto st = mask::masking_stats(examples, *vocab.special_id("<mask>"));
    json j = {{"kind", "masking_stats"},
              {"maskable", st.maskable},
              {"selected", st.selected},
              {"selection_rate", st.selection_rate},
              {"mask_rate", st.mask_rate},
              {"random_rate", st.random_rate},
              {"keep_rate", st.keep_rate}};
    write_json(*args.stats_out, j);
  }
  log(LogLevel::kInfo, "masked " + std::to_string(examples.size()) +
                           " examples -> " + args.out);
  return 0;
}

// ---- ner-eval -----------------------------------------------------------------

struct NerEvalArgs {
  std::string gold;
  std::vector<std::string> preds;
  std::string mode = "strict";
  std::string format = "json";
  std::optional<std::string> out;
};

std::vector<ner::TaggedSentence> load_tagged(const std::string& path) {
  if (fs::path(path).extension() == ".jsonl") return ner::parse_jsonl_tags(path);
  return ner::parse_conll_file(path);
}

int run_ner_eval(const NerEvalArgs& args) {
  auto mode = args.mode == "repair" ? ner::BioMode::kRepair : ner::BioMode::kStrict;
  auto gold = load_tagged(args.gold);

  json artifact;
  artifact["kind"] = "ner_scores";
  artifact["mode"] = args.mode;
  artifact["runs"] = json::array();
  std::vector<ner::NerScores> all_scores;
  for (const auto& pred_path : args.preds) {
    auto pred = load_tagged(pred_path);
    auto scores = ner::score(gold, pred, mode);
    artifact["runs"].push_back({{"name", fs::path(pred_path).stem().string()},
                                {"scores", report::to_json(scores)}});
    all_scores.push_back(std::move(scores));
  }
  if (all_scores.size() > 1)
    artifact["aggregate"] = report::to_json(ner::aggregate_runs(all_scores));

  if (args.format == "csv") {
    emit(args.out, report::ner_csv(artifact));
  } else {
    emit(args.out, artifact.dump(2) + "\n");
  }
  return 0;
}

// ---- analysis subcommands -------------------------------------------------------

struct OverlapArgs {
  std::string vocab;
  std::vector<std::string> tasks;
  std::string model;
  std::string union_name;  // merge all task files into one row (all splits)
  std::optional<std::string> out;
};

int run_overlap(const OverlapArgs& args) {
  auto vocab = bpe::load_vocab(args.vocab);
  std::string model =
      args.model.empty() ? fs::path(args.vocab).filename().string() : args.model;
  std::vector<analysis::OverlapReport> rows;
  if (!args.union_name.empty()) {
    std::set<std::string> token_set;
    for (const auto& task_path : args.tasks) {
      auto corpus = load_tagged(task_path);
      auto one = analysis::task_token_set(corpus, vocab);
      token_set.insert(one.begin(), one.end());
    }
    rows.push_back(analysis::overlap(vocab, token_set, model, args.union_name));
  } else {
    for (const auto& task_path : args.tasks) {
      auto corpus = load_tagged(task_path);
      auto token_set = analysis::task_token_set(corpus, vocab);
      rows.push_back(analysis::overlap(vocab, token_set, model,
                                       fs::path(task_path).stem().string()));
    }
  }
  for (const auto& row : rows)
    log(LogLevel::kInfo, row.task + ": " + std::to_string(row.overlap_count) + "/" +
                             std::to_string(row.vocab_size) + " tokens");
  json artifact = report::overlap_artifact(rows);
  if (args.out) {
    fs::path dir(*args.out);
    write_json(dir / "overlap.json", artifact);
    write_text(dir / "overlap.csv", report::overlap_csv(artifact));
  } else {
    std::cout << artifact.dump(2) << "\n";
  }
  return 0;
}

struct SegStatsArgs {
  std::string vocab;
  std::vector<std::string> golds;
  std::string model;
  std::string mode = "strict";
  std::string context = "word-initial";
  bool unique = false;
  std::optional<std::string> out;
};

int run_seg_stats(const SegStatsArgs& args) {
  auto vocab = bpe::load_vocab(args.vocab);
  auto mode = args.mode == "repair" ? ner::BioMode::kRepair : ner::BioMode::kStrict;
  auto context = args.context == "mid-sentence"
                     ? analysis::AnnotationContext::kMidSentence
                     : analysis::AnnotationContext::kWordInitial;
  std::string model =
      args.model.empty() ? fs::path(args.vocab).filename().string() : args.model;

  std::vector<json> rows;
  for (const auto& gold_path : args.golds) {
    auto corpus = load_tagged(gold_path);
    auto annotations = analysis::gold_annotations(corpus, mode, args.unique);
    if (annotations.empty())
      throw std::runtime_error(gold_path + ": no gold annotations to segment");
    auto counts = analysis::segment_annotations(annotations, vocab, context);
    auto stats = analysis::seg_stats(counts);
    rows.push_back(report::to_json(stats, model, fs::path(gold_path).stem().string()));
  }
  json artifact = report::seg_stats_artifact(rows);
  if (args.out) {
    fs::path dir(*args.out);
    write_json(dir / "seg_stats.json", artifact);
    write_text(dir / "seg_stats.csv", report::seg_stats_csv(artifact));
  } else {
    std::cout << artifact.dump(2) << "\n";
  }
  return 0;
}

struct DissectArgs {
  std::string vocab;
  std::string gold;
  std::string pred;
  std::string model;
  std::string task;
  std::string mode = "strict";
  std::string context = "word-initial";
  size_t max_bucket = 10;
  std::optional<std::string> out;
};

int run_dissect(const DissectArgs& args) {
  auto vocab = bpe::load_vocab(args.vocab);
  auto mode = args.mode == "repair" ? ner::BioMode::kRepair : ner::BioMode::kStrict;
  auto context = args.context == "mid-sentence"
                     ? analysis::AnnotationContext::kMidSentence
                     : analysis::AnnotationContext::kWordInitial;
  auto gold = load_tagged(args.gold);
  auto pred = load_tagged(args.pred);
  auto report_data =
      analysis::dissect_scores(gold, pred, vocab, args.max_bucket, mode, context);
  std::string model =
      args.model.empty() ? fs::path(args.vocab).filename().string() : args.model;
  std::string task =
      args.task.empty() ? fs::path(args.gold).stem().string() : args.task;
  json artifact = report::to_json(report_data, model, task);
  if (args.out) {
    fs::path dir(*args.out);
    write_json(dir / "dissect.json", artifact);
    write_text(dir / "dissect.csv", report::dissection_csv(artifact));
  } else {
    std::cout << artifact.dump(2) << "\n";
  }
  return 0;
}

// ---- report -----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;  // dirs or json files
  std::string out;
};

int run_report(const ReportArgs& args) {
  std::vector<fs::path> files;
  for (const auto& input : args.inputs) {
    fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
          found.push_back(entry.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }

  std::vector<json> artifacts;
  json consolidated = json::object();
  for (const auto& file : files) {
    auto in = open_in(file);
    json j;
    try {
      in >> j;
    } catch (const json::exception&) {
      log(LogLevel::kDebug, file.string() + ": not JSON, skipping");
      continue;
    }
    if (!j.is_object() || !j.contains("kind")) continue;
    std::string kind = j.at("kind").get<std::string>();
    consolidated[kind].push_back(j);
    artifacts.push_back(std::move(j));
    log(LogLevel::kDebug, file.string() + ": " + kind);
  }

  auto tables = report::merge_artifacts(artifacts);
  fs::path dir(args.out);
  write_json(dir / "report.json", consolidated);
  for (const auto& [family, csv] : tables)
    write_text(dir / ("report_" + family + ".csv"), csv);
  log(LogLevel::kInfo, "wrote " + std::to_string(tables.size() + 1) +
                           " report files to " + args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  g_log_level = log_level_from_env();

  CLI::App app{
      "Spanish biomedical text tooling: corpus cleaning, byte-level BPE, "
      "masked-LM data, NER evaluation and vocabulary analyses"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML config file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  auto clean_args = std::make_shared<CleanArgs>();
  auto* clean = app.add_subcommand("clean", "Clean and deduplicate a raw corpus");
  clean->add_option("--input", clean_args->input, "Input file")->required();
  clean->add_option("--format", clean_args->format, "Input format")
      ->check(CLI::IsMember({"jsonl", "txt"}));
  clean->add_option("--source", clean_args->source,
                    "Source tag for txt-format documents");
  clean->add_option("--lang", clean_args->lang,
                    "Language gate label, or 'none' to disable");
  clean->add_option("--lang-threshold", clean_args->lang_threshold,
                    "Minimum language score");
  clean->add_option("--min-chars", clean_args->min_chars, "Minimum codepoints");
  clean->add_option("--min-tokens", clean_args->min_tokens,
                    "Minimum whitespace tokens");
  clean->add_option("--alpha-ratio", clean_args->alpha_ratio,
                    "Minimum letter ratio over non-space codepoints");
  clean->add_option("--dedup", clean_args->dedup, "Dedup scope")
      ->check(CLI::IsMember({"per-source", "global", "none"}));
  clean->add_option("--dedup-unit", clean_args->dedup_unit, "Dedup granularity")
      ->check(CLI::IsMember({"sentence", "document"}));
  clean->add_flag("--dedup-case-insensitive", clean_args->dedup_case_insensitive,
                  "Fold case in dedup keys");
  clean->add_flag("--passthrough", clean_args->passthrough,
                  "Split only; keep every sentence (uncleaned corpora)");
  clean->add_option("--out", clean_args->out, "Clean JSONL output (default stdout)");
  clean->add_option("--stats-out", clean_args->stats_out,
                    "Statistics output base path (.json and .csv)");
  clean->add_option("--drop-log", clean_args->drop_log, "Drop log JSONL path");
  clean->callback([clean_args] { run_clean(*clean_args); });

  auto train_args = std::make_shared<TrainArgs>();
  auto* train = app.add_subcommand("train-bpe", "Learn a byte-level BPE vocabulary");
  train->add_option("--input", train_args->inputs, "Training text files")
      ->required()
      ->expected(-1);
  train->add_option("--format", train_args->format,
                    "txt: one sentence per line; jsonl: clean documents")
      ->check(CLI::IsMember({"txt", "jsonl"}));
  train->add_option("--vocab-size", train_args->vocab_size, "Total vocabulary budget")
      ->required();
  train->add_option("--out", train_args->out, "Output vocabulary directory")
      ->required();
  train->callback([train_args] { run_train(*train_args); });

  auto encode_args = std::make_shared<EncodeArgs>();
  auto* encode = app.add_subcommand("encode", "Encode text with a trained vocabulary");
  encode->add_option("--vocab", encode_args->vocab, "Vocabulary directory")->required();
  encode->add_option("--input", encode_args->input, "Input file (default stdin)");
  encode->add_option("--format", encode_args->format,
                     "txt: one text per line; jsonl: clean documents")
      ->check(CLI::IsMember({"txt", "jsonl"}));
  encode->add_option("--out", encode_args->out, "Output file (default stdout)");
  auto* ids_flag = encode->add_flag("--ids", encode_args->ids_only,
                                    "Print space-separated ids instead of JSONL");
  encode->add_flag("--pieces", encode_args->pieces_only,
                   "Print space-separated pieces instead of JSONL")
      ->excludes(ids_flag);
  encode->callback([encode_args] { run_encode(*encode_args); });

  auto mask_args = std::make_shared<MaskArgs>();
  auto* mask_cmd = app.add_subcommand("mask", "Generate masked-LM examples");
  mask_cmd->add_option("--vocab", mask_args->vocab, "Vocabulary directory")->required();
  mask_cmd->add_option("--input", mask_args->input, "Encoded JSONL input")->required();
  mask_cmd->add_option("--out", mask_args->out, "Masked JSONL output")->required();
  mask_cmd->add_option("--strategy", mask_args->strategy, "Masking strategy")
      ->check(CLI::IsMember({"swm", "wwm"}));
  mask_cmd->add_option("--mask-prob", mask_args->mask_prob, "Selection probability");
  mask_cmd->add_option("--replace-mask", mask_args->replace_mask,
                       "Fraction replaced by the mask token");
  mask_cmd->add_option("--replace-random", mask_args->replace_random,
                       "Fraction replaced by a random token");
  mask_cmd->add_option("--keep", mask_args->keep, "Fraction kept unchanged");
  mask_cmd->add_option("--budget-unit", mask_args->budget_unit,
                       "Whole-word budget accounting")
      ->check(CLI::IsMember({"subword", "word"}));
  mask_cmd->add_option("--seed", mask_args->seed, "RNG seed");
  mask_cmd->add_option("--pack", mask_args->pack,
                       "Pack each document's sentences up to N positions");
  mask_cmd->add_option("--stats-out", mask_args->stats_out,
                       "Write empirical masking statistics JSON");
  mask_cmd->callback([mask_args] { run_mask(*mask_args); });

  auto ner_args = std::make_shared<NerEvalArgs>();
  auto* ner_cmd = app.add_subcommand("ner-eval", "Strict entity-level NER scoring");
  ner_cmd->add_option("--gold", ner_args->gold, "Gold CoNLL file")->required();
  ner_cmd->add_option("--pred", ner_args->preds,
                      "Prediction file(s); repeat for multi-run aggregation")
      ->required()
      ->expected(-1);
  ner_cmd->add_option("--mode", ner_args->mode, "BIO validation mode")
      ->check(CLI::IsMember({"strict", "repair"}));
  ner_cmd->add_option("--report", ner_args->format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  ner_cmd->add_option("--out", ner_args->out, "Output file (default stdout)");
  ner_cmd->callback([ner_args] { run_ner_eval(*ner_args); });

  auto overlap_args = std::make_shared<OverlapArgs>();
  auto* overlap_cmd = app.add_subcommand("overlap", "Vocabulary/task overlap analysis");
  overlap_cmd->add_option("--vocab", overlap_args->vocab, "Vocabulary directory")
      ->required();
  overlap_cmd->add_option("--task", overlap_args->tasks, "Task CoNLL file(s)")
      ->required()
      ->expected(-1);
  overlap_cmd->add_option("--model", overlap_args->model,
                          "Model name (default: vocab directory name)");
  overlap_cmd->add_option("--union", overlap_args->union_name,
                          "Merge all task files into one row with this task name "
                          "(token set over all splits)");
  overlap_cmd->add_option("--out", overlap_args->out,
                          "Output directory (default: JSON to stdout)");
  overlap_cmd->callback([overlap_args] { run_overlap(*overlap_args); });

  auto seg_args = std::make_shared<SegStatsArgs>();
  auto* seg_cmd = app.add_subcommand("seg-stats", "Annotation segmentation statistics");
  seg_cmd->add_option("--vocab", seg_args->vocab, "Vocabulary directory")->required();
  seg_cmd->add_option("--gold", seg_args->golds, "Gold CoNLL file(s)")
      ->required()
      ->expected(-1);
  seg_cmd->add_option("--model", seg_args->model,
                      "Model name (default: vocab directory name)");
  seg_cmd->add_option("--mode", seg_args->mode, "BIO validation mode")
      ->check(CLI::IsMember({"strict", "repair"}));
  seg_cmd->add_option("--context", seg_args->context, "Annotation encoding context")
      ->check(CLI::IsMember({"word-initial", "mid-sentence"}));
  seg_cmd->add_flag("--unique", seg_args->unique,
                    "Count distinct surface forms instead of instances");
  seg_cmd->add_option("--out", seg_args->out,
                      "Output directory (default: JSON to stdout)");
  seg_cmd->callback([seg_args] { run_seg_stats(*seg_args); });

  auto dissect_args = std::make_shared<DissectArgs>();
  auto* dissect_cmd =
      app.add_subcommand("dissect", "Scores dissected by annotation subword count");
  dissect_cmd->add_option("--vocab", dissect_args->vocab, "Vocabulary directory")
      ->required();
  dissect_cmd->add_option("--gold", dissect_args->gold, "Gold CoNLL file")->required();
  dissect_cmd->add_option("--pred", dissect_args->pred, "Prediction file")->required();
  dissect_cmd->add_option("--max-bucket", dissect_args->max_bucket,
                          "Top bucket; larger counts merge into it");
  dissect_cmd->add_option("--mode", dissect_args->mode, "BIO validation mode")
      ->check(CLI::IsMember({"strict", "repair"}));
  dissect_cmd->add_option("--context", dissect_args->context,
                          "Annotation encoding context")
      ->check(CLI::IsMember({"word-initial", "mid-sentence"}));
  dissect_cmd->add_option("--model", dissect_args->model, "Model name");
  dissect_cmd->add_option("--task", dissect_args->task, "Task name");
  dissect_cmd->add_option("--out", dissect_args->out,
                          "Output directory (default: JSON to stdout)");
  dissect_cmd->callback([dissect_args] { run_dissect(*dissect_args); });

  auto report_args = std::make_shared<ReportArgs>();
  auto* report_cmd =
      app.add_subcommand("report", "Merge analysis artifacts into table CSVs");
  report_cmd->add_option("--in", report_args->inputs,
                         "Artifact JSON files or directories")
      ->required()
      ->expected(-1);
  report_cmd->add_option("--out", report_args->out, "Output directory")->required();
  report_cmd->callback([report_args] { run_report(*report_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "biotok: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
