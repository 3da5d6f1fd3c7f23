#include "jv2/trace.hpp"

#include <stdexcept>

#include <json.hpp>

namespace jv2 {

namespace {

EventKind kindFromName(const std::string& name) {
  for (int k = 0; k <= int(EventKind::Diagnostic); ++k) {
    if (name == eventKindName(EventKind(k))) return EventKind(k);
  }
  throw std::invalid_argument("unknown event kind '" + name + "'");
}

}  // namespace

std::string traceLine(const Event& event) {
  nlohmann::ordered_json j;
  j["step"] = event.step;
  j["kind"] = eventKindName(event.kind);
  j["subjects"] = event.subjects;
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();
  for (const auto& [k, v] : event.detail) detail[k] = v;
  j["detail"] = detail;
  return j.dump();
}

Event parseTraceLine(const std::string& line) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
    Event e;
    e.step = j.at("step").get<std::uint64_t>();
    e.kind = kindFromName(j.at("kind").get<std::string>());
    e.subjects = j.at("subjects").get<std::vector<MachineId>>();
    for (const auto& [k, v] : j.at("detail").items()) e.detail.emplace_back(k, v.get<std::string>());
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("malformed trace record: ") + ex.what());
  }
}

TraceWriter::TraceWriter(const std::string& path) : path_(path), out_(path, std::ios::out | std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot create trace file " + path);
}

void TraceWriter::write(const Event& event) {
  out_ << traceLine(event) << '\n';
  if (!out_) throw std::runtime_error("failed writing to trace file " + path_);
}

void TraceWriter::write(std::span<const Event> events) {
  for (const Event& e : events) write(e);
}

void TraceWriter::flush() {
  out_.flush();
  if (!out_) throw std::runtime_error("failed flushing trace file " + path_);
}

std::vector<Event> readTrace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path);
  std::vector<Event> events;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    try {
      events.push_back(parseTraceLine(line));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return events;
}

}  // namespace jv2
