#include "accbo/core/random_stream.hpp"

#include <cmath>

namespace accbo::core {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), key_(mix64(seed ^ 0x5DEECE66DULL)) {}

RandomStream RandomStream::child(std::string_view label, std::uint64_t index) const {
  RandomStream out = *this;
  out.key_ = mix64(mix64(key_ ^ fnv1a(label)) + mix64(index ^ 0xD1B54A32D192ED03ULL));
  out.tail_ = std::make_shared<const Node>(Node{tail_, {std::string(label), index}});
  return out;
}

RandomStream RandomStream::child(std::string_view label, std::uint64_t i, std::uint64_t j) const {
  return child(label, i).child("#", j);
}

std::vector<StreamPathElement> RandomStream::path() const {
  std::vector<StreamPathElement> out;
  for (const Node* n = tail_.get(); n != nullptr; n = n->parent.get()) out.push_back(n->element);
  return {out.rbegin(), out.rend()};
}

std::string RandomStream::describe() const {
  std::string out = std::to_string(seed_);
  for (const auto& e : path()) out += "/" + e.label + ":" + std::to_string(e.index);
  return out;
}

Vector gaussian_vector(const RandomStream& stream, Eigen::Index dim, double stddev) {
  Vector out(dim);
  auto engine = stream.engine();
  fill_gaussian(engine, out, stddev);
  return out;
}

Vector unit_sphere_direction(const RandomStream& stream, Eigen::Index dim) {
  auto engine = stream.engine();
  Vector out(dim);
  for (;;) {
    fill_gaussian(engine, out, 1.0);
    const double n = out.norm();
    if (n > 1e-300) return out / n;
  }
}

}  // namespace accbo::core
