#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biotok/analysis.hpp"
#include "biotok/corpus.hpp"
#include "biotok/ner.hpp"

// Report serialization: JSON artifacts carry full precision and a "kind"
// discriminator; CSV views round the way the published tables do (integer
// overlap percentages, two decimals elsewhere). All output uses '\n' and a
// fixed column order so repeated runs are byte-identical.

namespace biotok::report {

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

inline std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

// ---- JSON artifact builders ---------------------------------------------

inline nlohmann::json to_json(const analysis::OverlapReport& r) {
  return {{"model", r.model},
          {"task", r.task},
          {"overlap_count", r.overlap_count},
          {"vocab_size", r.vocab_size},
          {"percent", r.percent}};
}

inline nlohmann::json overlap_artifact(std::span<const analysis::OverlapReport> rows) {
  nlohmann::json j;
  j["kind"] = "overlap";
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(to_json(r));
  return j;
}

inline nlohmann::json to_json(const analysis::SegStatsReport& r,
                              const std::string& model, const std::string& task) {
  nlohmann::json buckets;
  const char* names[] = {"1", "2", "3", "4", "5+"};
  for (size_t i = 0; i < 5; ++i) buckets[names[i]] = r.buckets[i];
  return {{"model", model},    {"task", task},      {"count", r.count},
          {"mean", r.mean},    {"median", r.median}, {"buckets", buckets}};
}

inline nlohmann::json seg_stats_artifact(std::span<const nlohmann::json> rows) {
  nlohmann::json j;
  j["kind"] = "seg_stats";
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(r);
  return j;
}

inline nlohmann::json to_json(const analysis::DissectionReport& r,
                              const std::string& model, const std::string& task) {
  nlohmann::json j;
  j["kind"] = "dissection";
  j["model"] = model;
  j["task"] = task;
  j["max_bucket"] = r.max_bucket;
  j["rows"] = nlohmann::json::array();
  for (const auto& b : r.buckets)
    j["rows"].push_back({{"bucket", b.bucket},
                         {"tp", b.tp},
                         {"fp", b.fp},
                         {"fn", b.fn},
                         {"support", b.support},
                         {"precision", b.precision},
                         {"recall", b.recall},
                         {"f1", b.f1}});
  return j;
}

inline nlohmann::json to_json(const ner::TypeCounts& c) {
  return {{"tp", c.tp},       {"fp", c.fp},           {"fn", c.fn},
          {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
}

inline nlohmann::json to_json(const ner::NerScores& s) {
  nlohmann::json per_type;
  for (const auto& [type, row] : s.per_type) per_type[type] = to_json(row);
  return {{"micro", to_json(s.micro)},
          {"per_type", per_type},
          {"macro",
           {{"precision", s.macro_precision},
            {"recall", s.macro_recall},
            {"f1", s.macro_f1}}}};
}

inline nlohmann::json to_json(const ner::RunAggregate& agg) {
  auto ms = [](const ner::MeanStd& m) {
    return nlohmann::json{{"mean", m.mean}, {"std", m.std}};
  };
  nlohmann::json per_type;
  for (const auto& [type, rows] : agg.per_type)
    per_type[type] = {{"precision", ms(rows[0])},
                      {"recall", ms(rows[1])},
                      {"f1", ms(rows[2])}};
  return {{"runs", agg.runs},
          {"precision", ms(agg.precision)},
          {"recall", ms(agg.recall)},
          {"f1", ms(agg.f1)},
          {"per_type", per_type}};
}

inline nlohmann::json stats_artifact(const corpus::CorpusStats& stats) {
  nlohmann::json j;
  j["kind"] = "corpus_stats";
  j["rows"] = nlohmann::json::array();
  for (const auto& [source, row] : stats.per_source)
    j["rows"].push_back({{"source", source},
                         {"tokens", row.tokens},
                         {"documents", row.documents},
                         {"sentences", row.sentences}});
  auto total = stats.total();
  j["total"] = {{"tokens", total.tokens},
                {"documents", total.documents},
                {"sentences", total.sentences}};
  return j;
}

// ---- CSV views ------------------------------------------------------------

inline std::string stats_csv(const corpus::CorpusStats& stats) {
  std::string out = "source,documents,sentences,tokens\n";
  for (const auto& [source, row] : stats.per_source)
    out += csv_escape(source) + "," + std::to_string(row.documents) + "," +
           std::to_string(row.sentences) + "," + std::to_string(row.tokens) + "\n";
  auto total = stats.total();
  out += "TOTAL," + std::to_string(total.documents) + "," +
         std::to_string(total.sentences) + "," + std::to_string(total.tokens) + "\n";
  return out;
}

inline std::string overlap_csv(const nlohmann::json& artifact) {
  std::string out = "model,task,count,vocab_size,percent\n";
  for (const auto& r : artifact.at("rows")) {
    long pct = std::lround(r.at("percent").get<double>() * 100.0);
    out += csv_escape(r.at("model").get<std::string>()) + "," +
           csv_escape(r.at("task").get<std::string>()) + "," +
           std::to_string(r.at("overlap_count").get<int64_t>()) + "," +
           std::to_string(r.at("vocab_size").get<int64_t>()) + "," +
           std::to_string(pct) + "\n";
  }
  return out;
}

inline std::string seg_stats_csv(const nlohmann::json& artifact) {
  std::string out = "model,task,count,mean,median,pct_1,pct_2,pct_3,pct_4,pct_5plus\n";
  for (const auto& r : artifact.at("rows")) {
    const auto& b = r.at("buckets");
    out += csv_escape(r.at("model").get<std::string>()) + "," +
           csv_escape(r.at("task").get<std::string>()) + "," +
           std::to_string(r.at("count").get<int64_t>()) + "," +
           fixed(r.at("mean").get<double>(), 2) + "," +
           fixed(r.at("median").get<double>(), 1) + "," +
           fixed(b.at("1").get<double>() * 100.0, 2) + "," +
           fixed(b.at("2").get<double>() * 100.0, 2) + "," +
           fixed(b.at("3").get<double>() * 100.0, 2) + "," +
           fixed(b.at("4").get<double>() * 100.0, 2) + "," +
           fixed(b.at("5+").get<double>() * 100.0, 2) + "\n";
  }
  return out;
}

// Plot-ready dissection rows.
inline std::string dissection_csv(const nlohmann::json& artifact) {
  std::string out = "bucket,f1,precision,recall,support\n";
  for (const auto& r : artifact.at("rows")) {
    out += std::to_string(r.at("bucket").get<int64_t>()) + "," +
           fixed(r.at("f1").get<double>(), 6) + "," +
           fixed(r.at("precision").get<double>(), 6) + "," +
           fixed(r.at("recall").get<double>(), 6) + "," +
           std::to_string(r.at("support").get<int64_t>()) + "\n";
  }
  return out;
}

// Scores in the tables' display convention: x100, two decimals.
inline std::string ner_csv(const nlohmann::json& artifact) {
  std::string out = "run,scope,precision,recall,f1,tp,fp,fn\n";
  auto row = [&](const std::string& run, const std::string& scope,
                 const nlohmann::json& counts) {
    out += csv_escape(run) + "," + csv_escape(scope) + "," +
           fixed(counts.at("precision").get<double>() * 100.0, 2) + "," +
           fixed(counts.at("recall").get<double>() * 100.0, 2) + "," +
           fixed(counts.at("f1").get<double>() * 100.0, 2) + "," +
           std::to_string(counts.at("tp").get<int64_t>()) + "," +
           std::to_string(counts.at("fp").get<int64_t>()) + "," +
           std::to_string(counts.at("fn").get<int64_t>()) + "\n";
  };
  for (const auto& run : artifact.at("runs")) {
    const std::string name = run.at("name").get<std::string>();
    row(name, "micro", run.at("scores").at("micro"));
    for (const auto& [type, counts] : run.at("scores").at("per_type").items())
      row(name, type, counts);
  }
  if (artifact.contains("aggregate")) {
    const auto& agg = artifact.at("aggregate");
    auto pct = [&](const nlohmann::json& ms) {
      return fixed(ms.at("mean").get<double>() * 100.0, 2) + "±" +
             fixed(ms.at("std").get<double>() * 100.0, 2);
    };
    out += "aggregate,micro," + pct(agg.at("precision")) + "," +
           pct(agg.at("recall")) + "," + pct(agg.at("f1")) + ",,,\n";
  }
  return out;
}

// Merges kind-tagged artifacts into one CSV per table family. Missing
// artifacts produce an error naming what was searched for.
inline std::map<std::string, std::string> merge_artifacts(
    std::span<const nlohmann::json> artifacts) {
  std::map<std::string, std::string> out;
  nlohmann::json overlap_rows = nlohmann::json::array();
  nlohmann::json seg_rows = nlohmann::json::array();
  std::vector<const nlohmann::json*> dissections;
  std::vector<const nlohmann::json*> ner_runs;

  for (const auto& a : artifacts) {
    if (!a.contains("kind")) continue;
    const std::string kind = a.at("kind").get<std::string>();
    if (kind == "overlap") {
      for (const auto& r : a.at("rows")) overlap_rows.push_back(r);
    } else if (kind == "seg_stats") {
      for (const auto& r : a.at("rows")) seg_rows.push_back(r);
    } else if (kind == "dissection") {
      dissections.push_back(&a);
    } else if (kind == "ner_scores") {
      ner_runs.push_back(&a);
    }
  }

  if (!overlap_rows.empty())
    out["overlap"] = overlap_csv({{"rows", overlap_rows}});
  if (!seg_rows.empty())
    out["seg_stats"] = seg_stats_csv({{"rows", seg_rows}});
  if (!dissections.empty()) {
    std::string csv = "model,task,bucket,f1,precision,recall,support\n";
    for (const auto* d : dissections) {
      std::string prefix = csv_escape(d->at("model").get<std::string>()) + "," +
                           csv_escape(d->at("task").get<std::string>()) + ",";
      for (const auto& r : d->at("rows"))
        csv += prefix + std::to_string(r.at("bucket").get<int64_t>()) + "," +
               fixed(r.at("f1").get<double>(), 6) + "," +
               fixed(r.at("precision").get<double>(), 6) + "," +
               fixed(r.at("recall").get<double>(), 6) + "," +
               std::to_string(r.at("support").get<int64_t>()) + "\n";
    }
    out["dissection"] = csv;
  }
  if (!ner_runs.empty()) {
    std::string csv;
    for (const auto* n : ner_runs) {
      std::string one = ner_csv(*n);
      if (csv.empty())
        csv = one;
      else
        csv += one.substr(one.find('\n') + 1);  // drop repeated header
    }
    out["ner"] = csv;
  }

  if (out.empty())
    throw std::runtime_error(
        "no report artifacts found; expected JSON files with kind one of "
        "overlap, seg_stats, dissection, ner_scores");
  return out;
}

}  // namespace biotok::report
