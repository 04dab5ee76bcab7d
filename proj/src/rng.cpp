#include "crystal/rng.hpp"

#include <cmath>

namespace crystal {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t replica, StreamPurpose purpose) {
  std::uint64_t k = mix64(seed + kGamma);
  k = mix64(k ^ (replica + 0x632BE59BD9B4E019ULL));
  k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0x8CB92BA72F3D8DD7ULL));
  state_ = k;
}

Rng::result_type Rng::operator()() {
  state_ += kGamma;
  return mix64(state_);
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

}  // namespace crystal
