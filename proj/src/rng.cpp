#include "qcc/rng.hpp"

#include <cmath>
#include <numbers>

namespace qcc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
  // 53 random bits mapped to (0, 1): k/2^53 + 2^-54.
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

Philox4x32::Counter ParticleStream::block(std::uint64_t step, std::uint32_t tag) const {
  // Counter: (particle lo, particle hi, step lo, step hi ^ tag<<24). Steps
  // stay far below 2^40, so the tag byte never collides with step bits.
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(id_), static_cast<std::uint32_t>(id_ >> 32),
                                static_cast<std::uint32_t>(step),
                                static_cast<std::uint32_t>(step >> 32) ^ (tag << 24)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  return Philox4x32::generate(ctr, key);
}

double ParticleStream::normal(std::uint64_t step, std::uint32_t tag) const {
  const auto r = block(step, tag);
  const double u1 = to_unit_open(r[0], r[1]);
  const double u2 = to_unit_open(r[2], r[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double ParticleStream::uniform(std::uint64_t step, std::uint32_t tag) const {
  const auto r = block(step, tag);
  return to_unit_open(r[0], r[1]);
}

}  // namespace qcc
