#include "crystal/bundled.hpp"

#include <array>
#include <utility>

namespace crystal {

namespace {

// Alternating bond rates alpha = 1 (0 -> 1 inside a cell) and beta = 2
// (1 -> next cell's 0) on a ring with two sites per period. Positions are
// the evenly spaced, non-harmonic realization.
constexpr std::string_view kEx1Alternating = R"({
  "dimension": 1,
  "basis": [[2.0]],
  "vertices": ["0", "1"],
  "edges": [
    {"tail": "0", "head": "1", "shift": [0], "weight": 1},
    {"tail": "1", "head": "0", "shift": [1], "weight": 2}
  ],
  "positions": {"0": [0.0], "1": [1.0]}
})";

// Brick-wall (hexagonal) lattice with bond weights 1/3, 1/2, 1/6. Positions
// put the white vertex directly above the black one, which is not harmonic
// for these weights.
constexpr std::string_view kEx2HexagonalWeighted = R"({
  "dimension": 2,
  "basis": [[1.0, 1.0], [-1.0, 1.0]],
  "vertices": ["x0", "x1"],
  "edges": [
    {"tail": "x0", "head": "x1", "shift": [0, 0], "weight": "1/3"},
    {"tail": "x0", "head": "x1", "shift": [-1, 0], "weight": "1/2"},
    {"tail": "x0", "head": "x1", "shift": [0, -1], "weight": "1/6"}
  ],
  "positions": {"x0": [0.0, 0.0], "x1": [0.0, 1.0]}
})";

constexpr std::string_view kSquare2a = R"({
  "dimension": 2,
  "basis": [[1.0, 0.0], [0.0, 1.0]],
  "vertices": ["o"],
  "edges": [
    {"tail": "o", "head": "o", "shift": [1, 0], "weight": 1},
    {"tail": "o", "head": "o", "shift": [0, 1], "weight": 1}
  ],
  "positions": {"o": [0.0, 0.0]}
})";

constexpr std::string_view kSquare2b = R"({
  "dimension": 2,
  "basis": [[1.0, 0.0], [1.0, 1.0]],
  "vertices": ["o"],
  "edges": [
    {"tail": "o", "head": "o", "shift": [1, 0], "weight": 1},
    {"tail": "o", "head": "o", "shift": [0, 1], "weight": 1}
  ],
  "positions": {"o": [0.0, 0.0]}
})";

constexpr std::string_view kHexagonal3a = R"({
  "dimension": 2,
  "basis": [[0.8660254037844386, 1.5], [-0.8660254037844386, 1.5]],
  "vertices": ["x0", "x1"],
  "edges": [
    {"tail": "x0", "head": "x1", "shift": [0, 0], "weight": 1},
    {"tail": "x0", "head": "x1", "shift": [-1, 0], "weight": 1},
    {"tail": "x0", "head": "x1", "shift": [0, -1], "weight": 1}
  ],
  "positions": {"x0": [0.0, 0.0], "x1": [0.0, 1.0]}
})";

constexpr std::array<std::pair<std::string_view, std::string_view>, 5> kLattices{{
    {"ex1_alternating", kEx1Alternating},
    {"ex2_hexagonal_weighted", kEx2HexagonalWeighted},
    {"square_2a", kSquare2a},
    {"square_2b", kSquare2b},
    {"hexagonal_3a", kHexagonal3a},
}};

}  // namespace

std::optional<std::string_view> bundled_lattice(std::string_view name) {
  for (const auto& [key, text] : kLattices)
    if (key == name) return text;
  return std::nullopt;
}

std::vector<std::string> bundled_lattice_names() {
  std::vector<std::string> out;
  for (const auto& entry : kLattices) out.emplace_back(entry.first);
  return out;
}

}  // namespace crystal
