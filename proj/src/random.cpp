#include "maxstable/random.hpp"

#include <array>

namespace maxstable {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t id) {
  const std::uint64_t a = mix64(seed);
  const std::uint64_t b = mix64(a ^ mix64(id + 0x632be59bd9b4e019ULL));
  std::array<std::uint32_t, 8> words{};
  std::uint64_t s = b;
  for (std::size_t i = 0; i < words.size(); i += 2) {
    s = mix64(s);
    words[i] = static_cast<std::uint32_t>(s);
    words[i + 1] = static_cast<std::uint32_t>(s >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}
}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t id)
    : seed_(seed), id_(id), engine_(seeded_engine(seed, id)) {}

Stream Stream::split(std::uint64_t id) const {
  return Stream(mix64(seed_ ^ 0x5bd1e9955bd1e995ULL) ^ id_, id);
}

std::uint64_t Stream::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace maxstable
