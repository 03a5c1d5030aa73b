#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "accbo/core/types.hpp"

namespace accbo::core {

using Json = nlohmann::json;

/// Strict reader for one JSON object. Every accessed key is remembered;
/// `finish()` rejects the keys nobody asked for. Errors are ConfigError
/// messages that carry the dotted field path.
class JsonObjectReader {
 public:
  JsonObjectReader(const Json& node, std::string path);

  bool has(const std::string& key) const;
  const Json& required_node(const std::string& key);
  const Json* optional_node(const std::string& key);
  std::string path_of(const std::string& key) const;
  const std::string& path() const { return path_; }

  double required_double(const std::string& key);
  std::optional<double> optional_double(const std::string& key);
  std::int64_t required_int(const std::string& key);
  std::optional<std::int64_t> optional_int(const std::string& key);
  std::uint64_t required_u64(const std::string& key);
  std::optional<std::uint64_t> optional_u64(const std::string& key);
  std::string required_string(const std::string& key);
  std::optional<std::string> optional_string(const std::string& key);
  std::optional<bool> optional_bool(const std::string& key);
  Vector required_vector(const std::string& key);
  Matrix required_matrix(const std::string& key);

  /// Throws if the object has keys that were never read.
  void finish() const;

 private:
  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

[[noreturn]] void config_error(const std::string& path, const std::string& message);

double json_to_double(const Json& node, const std::string& path);
std::int64_t json_to_int(const Json& node, const std::string& path);
Vector json_to_vector(const Json& node, const std::string& path);
/// Row-major array of equal-length rows.
Matrix json_to_matrix(const Json& node, const std::string& path);

Json vector_to_json(const Vector& v);
Json matrix_to_json(const Matrix& m);

/// Pretty JSON text with a trailing newline; doubles in shortest round-trip form.
std::string dump_json(const Json& node);

}  // namespace accbo::core
