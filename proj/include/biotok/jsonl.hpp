#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace biotok::jsonl {

// Calls fn(record, line_no) for every non-empty line. Returns the number of
// lines that failed to parse when skip_bad is set; otherwise the first bad
// line throws with its number.
inline size_t for_each(std::istream& in, std::string_view name,
                       const std::function<void(const nlohmann::json&, size_t)>& fn,
                       bool skip_bad = false) {
  std::string line;
  size_t line_no = 0;
  size_t bad = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      if (skip_bad) {
        ++bad;
        continue;
      }
      throw std::runtime_error(std::string(name) + ":" + std::to_string(line_no) +
                               ": " + e.what());
    }
    fn(record, line_no);
  }
  return bad;
}

inline size_t for_each_file(const std::filesystem::path& path,
                            const std::function<void(const nlohmann::json&, size_t)>& fn,
                            bool skip_bad = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return for_each(in, path.string(), fn, skip_bad);
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void write(const nlohmann::json& record) {
    out_ << record.dump() << "\n";
  }

 private:
  std::ostream& out_;
};

}  // namespace biotok::jsonl
