#include "accbo/harness/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>

#include "accbo/core/errors.hpp"

namespace accbo::harness {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  require(!columns_.empty(), "csv table needs at least one column");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  require(cells.size() == columns_.size(), "csv row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, table.str()); }

void write_json(const std::filesystem::path& path, const core::Json& node) { write_text(path, core::dump_json(node)); }

core::Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  try {
    return core::Json::parse(in);
  } catch (const core::Json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ACCBO_LOG");
    if (env == nullptr) return LogLevel::info;
    const std::string v(env);
    if (v == "quiet") return LogLevel::quiet;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
  }();
  return level;
}

namespace {

std::mutex log_mutex;

void emit(const char* tag, const std::string& message) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "[" << tag << "] " << message << '\n';
}

}  // namespace

void log_info(const std::string& message) {
  if (log_level() != LogLevel::quiet) emit("info", message);
}

void log_debug(const std::string& message) {
  if (log_level() == LogLevel::debug) emit("debug", message);
}

}  // namespace accbo::harness
