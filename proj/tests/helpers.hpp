#pragma once

#include "crystal/bundled.hpp"
#include "crystal/lattice_spec.hpp"

#include <string>

namespace testing {

inline crystal::LatticeSpec bundled(const std::string& name) {
  return crystal::parse_lattice_spec(std::string(*crystal::bundled_lattice(name)));
}

// Single vertex with one loop of shift (1), basis (u).
inline crystal::LatticeSpec ring_1a(double u = 1.0) {
  return crystal::parse_lattice_spec(R"({"dimension": 1, "basis": [[)" + std::to_string(u) +
                                     R"(]], "vertices": ["o"],
      "edges": [{"tail": "o", "head": "o", "shift": [1], "weight": 1}]})");
}

// Two vertices, unit weights, basis (2): x(1) = 1 is harmonic.
inline crystal::LatticeSpec ring_1b() {
  return crystal::parse_lattice_spec(R"({"dimension": 1, "basis": [[2]], "vertices": ["a", "b"],
      "edges": [{"tail": "a", "head": "b", "shift": [0], "weight": 1},
                {"tail": "b", "head": "a", "shift": [1], "weight": 1}],
      "positions": {"a": [0], "b": [1]}})");
}

// Hexagonal graph with basis (2,0),(0,1)-style brick positions, unit weights.
inline crystal::LatticeSpec brick_3b() {
  return crystal::parse_lattice_spec(R"({"dimension": 2, "basis": [[1, 1], [-1, 1]],
      "vertices": ["x0", "x1"],
      "edges": [{"tail": "x0", "head": "x1", "shift": [0, 0], "weight": 1},
                {"tail": "x0", "head": "x1", "shift": [-1, 0], "weight": 1},
                {"tail": "x0", "head": "x1", "shift": [0, -1], "weight": 1}],
      "positions": {"x0": [0, 0], "x1": [0, 1]}})");
}

}  // namespace testing
