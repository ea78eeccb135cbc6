#include "bloch/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bloch {

double RngStream::exponential() {
  const double u = static_cast<double>((raw() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  return -std::log(u);
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  // Rejection sampling over the largest multiple of n to avoid modulo bias.
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  std::uint64_t x = raw();
  while (x >= limit) x = raw();
  return x % n;
}

}  // namespace bloch
