#include "semlab/int_list.hpp"

#include <charconv>
#include <limits>
#include <stdexcept>
#include <string>

namespace semlab {

namespace {

std::int64_t to_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer list '" + std::string(whole) + "'");
  return v;
}

}  // namespace

std::vector<std::int64_t> parse_int_list(std::string_view text) {
  std::vector<std::int64_t> out;
  if (text.empty()) throw std::invalid_argument("empty integer list");
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    pos = comma == std::string_view::npos ? text.size() + 1 : comma + 1;

    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(to_int(item, text));
      continue;
    }
    const auto lo = to_int(item.substr(0, dots), text);
    auto rest = item.substr(dots + 2);
    std::int64_t step = 1;
    bool geometric = false;
    if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
      const auto spec = rest.substr(colon + 1);
      rest = rest.substr(0, colon);
      if (spec.size() < 2 || (spec[0] != 'x' && spec[0] != '+'))
        throw std::invalid_argument("bad range step in '" + std::string(text) + "'");
      geometric = spec[0] == 'x';
      step = to_int(spec.substr(1), text);
    }
    const auto hi = to_int(rest, text);
    if (hi < lo || step < 1 || (geometric && (step < 2 || lo < 1)))
      throw std::invalid_argument("bad range '" + std::string(item) + "'");
    for (std::int64_t v = lo; v <= hi;) {
      out.push_back(v);
      if (geometric) {
        if (v > std::numeric_limits<std::int64_t>::max() / step) break;
        v *= step;
      } else {
        v += step;
      }
    }
  }
  return out;
}

std::array<int, 3> factor_extents(std::int64_t count) {
  if (count < 1) throw std::invalid_argument("element count must be >= 1");
  std::array<int, 3> best{static_cast<int>(count), 1, 1};
  std::int64_t best_spread = count;
  for (std::int64_t c = 1; c * c * c <= count; ++c) {
    if (count % c) continue;
    const auto rest = count / c;
    for (std::int64_t b = c; b * b <= rest; ++b) {
      if (rest % b) continue;
      const auto a = rest / b;
      if (a - c < best_spread) {
        best_spread = a - c;
        best = {static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)};
      }
    }
  }
  return best;
}

std::array<int, 3> parse_extents(std::string_view text) {
  const auto values = parse_int_list(text);
  if (values.size() == 1) return factor_extents(values[0]);
  if (values.size() != 3) throw std::invalid_argument("extents must be N or Ex,Ey,Ez");
  for (auto v : values)
    if (v < 1) throw std::invalid_argument("extents must be >= 1");
  return {static_cast<int>(values[0]), static_cast<int>(values[1]), static_cast<int>(values[2])};
}

}  // namespace semlab
