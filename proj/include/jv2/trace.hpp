#ifndef JV2_TRACE_HPP
#define JV2_TRACE_HPP

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "jv2/engine.hpp"

namespace jv2 {

/// One JSON object per line, keys in fixed order:
///   {"step":N,"kind":"Split","subjects":[ids...],"detail":{"key":"value",...}}
std::string traceLine(const Event& event);

/// Inverse of traceLine. Throws std::invalid_argument on malformed records.
Event parseTraceLine(const std::string& line);

/// Append-only JSONL writer. The file is created (truncated) on construction, so an empty run
/// still leaves an empty trace. Write failures throw std::runtime_error.
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);

  void write(const Event& event);
  void write(std::span<const Event> events);
  void flush();

 private:
  std::string path_;
  std::ofstream out_;
};

std::vector<Event> readTrace(const std::string& path);

}  // namespace jv2

#endif  // JV2_TRACE_HPP
