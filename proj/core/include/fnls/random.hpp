#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fnls {

/// SplitMix64 finalizer; a bijective mixer on 64-bit words.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derive a child key from a parent key and a path of counters. The result
/// depends only on the inputs, so a replicate's stream is independent of the
/// order or the shard in which it is generated.
[[nodiscard]] std::uint64_t derive_key(std::uint64_t seed,
                                       std::initializer_list<std::uint64_t> path) noexcept;

/// Counter-addressed Gaussian stream: `Stream(seed, {replicate, mode, ...})`.
class Stream {
 public:
  explicit Stream(std::uint64_t key);
  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace fnls
