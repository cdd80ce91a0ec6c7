#pragma once

#include <cstdint>
#include <random>

namespace specklewalk {

/// Named stream indices. Every random draw in the library comes from a
/// Stream built as Stream(master_seed, purpose, index), so that results do not
/// depend on evaluation order and trials can run in any order or in parallel.
enum class StreamPurpose : std::uint64_t {
  MediumRow = 1,
  RandomMask = 2,
  CalibrationReference = 3,
  CalibrationNoise = 4,
  Counts = 5,
  FringeCounts = 6,
  FringeJitter = 7,
  ScanCounts = 8,
  Trial = 9,
};

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child seed from (seed, purpose, index):
///   mix64(mix64(mix64(seed) ^ purpose * K1) ^ index * K2)
/// with K1, K2 odd 64-bit constants. Distinct triples give unrelated seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose,
                          std::uint64_t index) noexcept;

/// Portable random stream: std::mt19937_64 engine plus distribution code that
/// lives here instead of <random>, whose distributions are not bit-identical
/// across standard libraries.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  Stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index)
      : engine_(derive_seed(seed, static_cast<std::uint64_t>(purpose), index)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

  /// Poisson(mean). Inversion for mean < 10, PTRS rejection otherwise.
  /// mean must be finite and >= 0.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace specklewalk
