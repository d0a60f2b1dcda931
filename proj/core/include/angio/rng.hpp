#pragma once

#include <array>
#include <cstdint>

#include "angio/vec2.hpp"

namespace angio {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11): a keyed
/// bijection of a 128-bit counter. Every random draw in a run is a pure
/// function of (seed, replica, cell kind, cell index, purpose, step), so serial
/// and parallel executions agree bit-for-bit.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

enum class CellKind : std::uint32_t { Tip = 0, Stalk = 1 };

enum class DrawPurpose : std::uint32_t { Noise = 0, Placement = 1 };

/// Substream of one cell. Counter layout:
///   word0 = cell index
///   word1 = replica << 2 | purpose << 1 | kind
///   word2, word3 = low / high half of the step number
/// Key = low / high half of the 64-bit seed.
class CellStream {
public:
    CellStream(std::uint64_t seed, std::uint32_t replica, CellKind kind, std::uint32_t index) noexcept;

    /// Two independent uniforms in [0, 1) with 53-bit resolution.
    std::array<double, 2> uniform2(DrawPurpose purpose, std::uint64_t step) const noexcept;

    /// Standard 2D normal vector via Box-Muller.
    Vec2 normal2(std::uint64_t step) const noexcept;

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t index_;
    std::uint32_t tag_;
};

}  // namespace angio
