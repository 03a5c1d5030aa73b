#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "accbo/core/json_reader.hpp"

namespace accbo::harness {

/// 17 significant digits, so the text re-parses to the same double.
std::string format_double(double v);

/// Fixed-column CSV with LF line endings. Cells are written verbatim.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_json(const std::filesystem::path& path, const core::Json& node);
core::Json read_json_file(const std::filesystem::path& path);

enum class LogLevel { quiet, info, debug };

/// Level from ACCBO_LOG (quiet, info, debug); info when unset.
LogLevel log_level();
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace accbo::harness
