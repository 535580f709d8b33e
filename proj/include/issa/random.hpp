#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace issa {

/// Philox4x32-10 counter-based block cipher (Salmon et al., "Parallel random
/// numbers: as easy as 1, 2, 3"). Maps a 128-bit counter and 64-bit key to
/// 128 pseudo-random bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key);
};

/// FNV-1a hash used to turn readable role names ("x", "z", "env", ...) into
/// stream tags.
constexpr std::uint64_t role_tag(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hierarchical stream identity: (experiment, sample index, role tag).
struct StreamId {
  std::uint64_t experiment = 0;
  std::uint64_t sample = 0;
  std::uint64_t role = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// Random-variable cost metric. Each Poisson variate counts once regardless of
/// how many uniforms its sampler consumed internally.
struct DrawCounter {
  std::uint64_t exponentials = 0;
  std::uint64_t uniforms = 0;
  std::uint64_t poissons = 0;

  std::uint64_t total() const { return exponentials + uniforms + poissons; }

  DrawCounter& operator+=(const DrawCounter& other) {
    exponentials += other.exponentials;
    uniforms += other.uniforms;
    poissons += other.poissons;
    return *this;
  }
  DrawCounter& operator-=(const DrawCounter& other) {
    exponentials -= other.exponentials;
    uniforms -= other.uniforms;
    poissons -= other.poissons;
    return *this;
  }
  friend DrawCounter operator+(DrawCounter a, const DrawCounter& b) { return a += b; }
  friend DrawCounter operator-(DrawCounter a, const DrawCounter& b) { return a -= b; }
  friend bool operator==(const DrawCounter&, const DrawCounter&) = default;
};

/// Deterministic stream of variates. The Philox key is the master seed and the
/// upper 64 counter bits are a hash of the stream id, so any stream can be
/// created directly from (seed, id) with no sequential dependence on other
/// streams. Copying a stream copies its position: two copies replay the same
/// sequence.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamId id);

  /// Uniform on [0, 1).
  double uniform();
  /// Unit-rate exponential, strictly positive.
  double exponential();
  /// Poisson(mean); inversion below mean 10, PTRS transformed rejection above.
  /// Throws std::invalid_argument for negative or non-finite means. A zero
  /// mean returns 0 without consuming randomness.
  std::int64_t poisson(double mean);

  const DrawCounter& draws() const { return draws_; }
  std::uint64_t seed() const { return seed_; }
  const StreamId& id() const { return id_; }

 private:
  std::uint64_t next_u64();
  double next_unit();      // [0, 1), not counted
  double next_open_unit();  // (0, 1), not counted
  std::int64_t poisson_inversion(double mean);
  std::int64_t poisson_ptrs(double mean);

  std::uint64_t seed_;
  StreamId id_;
  Philox4x32::Key key_{};
  std::uint64_t stream_hash_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  DrawCounter draws_;
};

}  // namespace issa
