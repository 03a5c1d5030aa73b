#include "accbo/core/json_reader.hpp"

#include <cmath>
#include <limits>

#include "accbo/core/errors.hpp"

namespace accbo::core {

void config_error(const std::string& path, const std::string& message) {
  throw ConfigError("field '" + path + "': " + message);
}

JsonObjectReader::JsonObjectReader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
  if (!node_.is_object()) config_error(path_, "expected an object");
}

std::string JsonObjectReader::path_of(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool JsonObjectReader::has(const std::string& key) const { return node_.contains(key); }

const Json& JsonObjectReader::required_node(const std::string& key) {
  seen_.insert(key);
  if (!node_.contains(key)) config_error(path_of(key), "missing required field");
  return node_.at(key);
}

const Json* JsonObjectReader::optional_node(const std::string& key) {
  seen_.insert(key);
  if (!node_.contains(key)) return nullptr;
  return &node_.at(key);
}

double JsonObjectReader::required_double(const std::string& key) {
  return json_to_double(required_node(key), path_of(key));
}

std::optional<double> JsonObjectReader::optional_double(const std::string& key) {
  const Json* n = optional_node(key);
  if (!n) return std::nullopt;
  return json_to_double(*n, path_of(key));
}

std::int64_t JsonObjectReader::required_int(const std::string& key) {
  return json_to_int(required_node(key), path_of(key));
}

std::optional<std::int64_t> JsonObjectReader::optional_int(const std::string& key) {
  const Json* n = optional_node(key);
  if (!n) return std::nullopt;
  return json_to_int(*n, path_of(key));
}

namespace {

std::uint64_t json_to_u64(const Json& node, const std::string& path) {
  if (node.is_number_unsigned()) return node.get<std::uint64_t>();
  if (node.is_number_integer() && node.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(node.get<std::int64_t>());
  config_error(path, "expected a nonnegative integer");
}

}  // namespace

std::uint64_t JsonObjectReader::required_u64(const std::string& key) {
  return json_to_u64(required_node(key), path_of(key));
}

std::optional<std::uint64_t> JsonObjectReader::optional_u64(const std::string& key) {
  const Json* n = optional_node(key);
  if (!n) return std::nullopt;
  return json_to_u64(*n, path_of(key));
}

std::string JsonObjectReader::required_string(const std::string& key) {
  const Json& n = required_node(key);
  if (!n.is_string()) config_error(path_of(key), "expected a string");
  return n.get<std::string>();
}

std::optional<std::string> JsonObjectReader::optional_string(const std::string& key) {
  const Json* n = optional_node(key);
  if (!n) return std::nullopt;
  if (!n->is_string()) config_error(path_of(key), "expected a string");
  return n->get<std::string>();
}

std::optional<bool> JsonObjectReader::optional_bool(const std::string& key) {
  const Json* n = optional_node(key);
  if (!n) return std::nullopt;
  if (!n->is_boolean()) config_error(path_of(key), "expected true or false");
  return n->get<bool>();
}

Vector JsonObjectReader::required_vector(const std::string& key) {
  return json_to_vector(required_node(key), path_of(key));
}

Matrix JsonObjectReader::required_matrix(const std::string& key) {
  return json_to_matrix(required_node(key), path_of(key));
}

void JsonObjectReader::finish() const {
  for (auto it = node_.begin(); it != node_.end(); ++it) {
    if (!seen_.count(it.key())) config_error(path_of(it.key()), "unknown field");
  }
}

double json_to_double(const Json& node, const std::string& path) {
  if (!node.is_number()) config_error(path, "expected a number");
  const double v = node.get<double>();
  if (!std::isfinite(v)) config_error(path, "expected a finite number");
  return v;
}

std::int64_t json_to_int(const Json& node, const std::string& path) {
  if (node.is_number_unsigned()) {
    const auto u = node.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) config_error(path, "integer too large");
    return static_cast<std::int64_t>(u);
  }
  if (node.is_number_integer()) return node.get<std::int64_t>();
  config_error(path, "expected an integer");
}

Vector json_to_vector(const Json& node, const std::string& path) {
  if (!node.is_array()) config_error(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v[static_cast<Eigen::Index>(i)] = json_to_double(node[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix json_to_matrix(const Json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) config_error(path, "expected a nonempty array of rows");
  const std::size_t rows = node.size();
  if (!node[0].is_array()) config_error(path + "[0]", "expected an array of numbers");
  const std::size_t cols = node[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    const Vector row = json_to_vector(node[r], row_path);
    if (static_cast<std::size_t>(row.size()) != cols) config_error(row_path, "row length differs from row 0");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

std::string dump_json(const Json& node) { return node.dump(2) + "\n"; }

}  // namespace accbo::core
