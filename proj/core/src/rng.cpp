#include "angio/rng.hpp"

#include <cmath>
#include <numbers>

namespace angio {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

CellStream::CellStream(std::uint64_t seed, std::uint32_t replica, CellKind kind, std::uint32_t index) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      index_(index),
      tag_(replica << 2 | static_cast<std::uint32_t>(kind)) {}

std::array<double, 2> CellStream::uniform2(DrawPurpose purpose, std::uint64_t step) const noexcept {
    const std::uint32_t word1 = tag_ | static_cast<std::uint32_t>(purpose) << 1;
    const auto out = philox4x32_10({index_, word1, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)}, key_);
    return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

Vec2 CellStream::normal2(std::uint64_t step) const noexcept {
    const auto u = uniform2(DrawPurpose::Noise, step);
    const double radius = std::sqrt(-2.0 * std::log(1.0 - u[0]));  // 1 - u in (0, 1]
    const double angle = 2.0 * std::numbers::pi * u[1];
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace angio
