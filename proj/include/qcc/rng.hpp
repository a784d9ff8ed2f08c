#pragma once

#include <array>
#include <cstdint>

namespace qcc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The output
/// is a pure function of (key, counter), so draws can be addressed directly
/// by (seed, particle, step) without any shared state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Stream of one particle: draws are addressed by step index and a small
/// purpose tag, never by call order.
class ParticleStream {
 public:
  ParticleStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : seed_(master_seed), id_(stream_id) {}

  /// Standard normal draw for (step, tag) by Box-Muller on two 53-bit
  /// uniforms taken from one Philox block.
  double normal(std::uint64_t step, std::uint32_t tag = 0) const;
  /// Uniform in (0, 1).
  double uniform(std::uint64_t step, std::uint32_t tag = 0) const;

  std::uint64_t id() const { return id_; }

 private:
  Philox4x32::Counter block(std::uint64_t step, std::uint32_t tag) const;

  std::uint64_t seed_;
  std::uint64_t id_;
};

/// Tags separating independent uses of the same (particle, step) address.
namespace stream_tag {
inline constexpr std::uint32_t langevin = 0;
inline constexpr std::uint32_t initial_x = 1;
inline constexpr std::uint32_t initial_p = 2;
inline constexpr std::uint32_t sweep = 3;
}  // namespace stream_tag

}  // namespace qcc
