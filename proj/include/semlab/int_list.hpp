#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace semlab {

/// Parses comma-separated integer items. Each item is one of
///   7           single value
///   1..15       inclusive range, step 1
///   1..15:+2    inclusive range, additive step
///   1..4096:x8  inclusive range, geometric step
/// Throws std::invalid_argument on malformed input.
std::vector<std::int64_t> parse_int_list(std::string_view text);

/// Parses "Ex,Ey,Ez" or a single element count. A single count is split into
/// the most cube-like factorisation.
std::array<int, 3> parse_extents(std::string_view text);

/// Most cube-like (Ex, Ey, Ez) with Ex*Ey*Ez = count, Ex >= Ey >= Ez.
std::array<int, 3> factor_extents(std::int64_t count);

}  // namespace semlab
