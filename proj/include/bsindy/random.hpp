#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bsindy {

/// Random source used throughout the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Variates are produced by Boost.Random distributions, which (unlike
/// the std:: distributions) have a single implementation, so a seed reproduces
/// the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();        ///< U(0,1), never exactly 0.
  double normal();         ///< N(0,1)
  double gamma(double shape, double scale);
  std::uint64_t uniform_index(std::uint64_t n);  ///< uniform on {0,...,n-1}

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent sub-seed from a root seed, a purpose tag and an index:
///   mix64(mix64(root ^ fnv1a(purpose)) + index).
std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose, std::uint64_t index = 0);

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a(std::string_view text);

}  // namespace bsindy
