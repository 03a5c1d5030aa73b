#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "accbo/core/types.hpp"

namespace accbo::core {

/// SplitMix64 generator. Satisfies std::uniform_random_bit_generator, so it
/// plugs into the standard distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Finalizer of SplitMix64, used to hash path components into stream keys.
std::uint64_t mix64(std::uint64_t z);

struct StreamPathElement {
  std::string label;
  std::uint64_t index = 0;

  friend bool operator==(const StreamPathElement&, const StreamPathElement&) = default;
};

/// A named, reproducible source of randomness.
///
/// A stream is identified by a base seed and a path of (label, index) pairs.
/// Identical (seed, path) pairs always produce bit-identical draws; distinct
/// pairs hash to unrelated generator states. Streams are values: `child`
/// never mutates the parent, and `engine()` returns a fresh generator each
/// call, so a stream can be replayed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  RandomStream child(std::string_view label, std::uint64_t index = 0) const;
  RandomStream child(std::string_view label, std::uint64_t i, std::uint64_t j) const;

  SplitMix64 engine() const { return SplitMix64(key_); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t key() const { return key_; }
  /// Path from the root, outermost element first.
  std::vector<StreamPathElement> path() const;
  std::string describe() const;

 private:
  struct Node {
    std::shared_ptr<const Node> parent;
    StreamPathElement element;
  };

  std::uint64_t seed_;
  std::uint64_t key_;
  std::shared_ptr<const Node> tail_;
};

/// Fills `out` with iid N(0, stddev^2) entries drawn from `engine`.
template <class Engine>
void fill_gaussian(Engine& engine, Vector& out, double stddev) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = stddev * normal(engine);
}

/// Draws a vector of `dim` iid N(0, stddev^2) entries from a fresh engine of `stream`.
Vector gaussian_vector(const RandomStream& stream, Eigen::Index dim, double stddev);

/// Uniform direction on the unit sphere in R^dim.
Vector unit_sphere_direction(const RandomStream& stream, Eigen::Index dim);

}  // namespace accbo::core
