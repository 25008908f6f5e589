#pragma once

#include <cstdint>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace maxstable {

// Mixes a 64-bit word (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

// A reproducible random stream. Streams are identified by (seed, id); the id
// is typically a replication index, so any scheduling of replications over
// threads consumes exactly the same numbers. Copying a stream snapshots its
// state, which is how common-random-number stencils replay draws.
class Stream {
 public:
  using Engine = std::mt19937_64;

  Stream(std::uint64_t seed, std::uint64_t id);

  // Derive an independent child stream (e.g. one per level or per batch).
  Stream split(std::uint64_t id) const;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() { return normal_(engine_); }
  /// Exp(1).
  double exponential() { return exponential_(engine_); }
  /// +1 or -1 with equal probability.
  int sign() noexcept { return (engine_() >> 63) ? 1 : -1; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t id() const noexcept { return id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t id_;
  Engine engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::exponential_distribution<double> exponential_;
};

}  // namespace maxstable
