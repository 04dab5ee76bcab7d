#pragma once

// Example lattices compiled into the library.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crystal {

std::optional<std::string_view> bundled_lattice(std::string_view name);
std::vector<std::string> bundled_lattice_names();

}  // namespace crystal
