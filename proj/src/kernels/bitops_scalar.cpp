#include "universals/kernels/bitops.hpp"

#include <bit>

namespace universals::kernels {
namespace {

std::size_t popcount_scalar(const Word* a, std::size_t n) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<std::size_t>(std::popcount(a[i]));
  return total;
}

std::size_t and_popcount2_scalar(const Word* a, const Word* b, std::size_t n) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return total;
}

std::size_t and_popcount3_scalar(const Word* a, const Word* b, const Word* c, std::size_t n) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += static_cast<std::size_t>(std::popcount(a[i] & b[i] & c[i]));
  }
  return total;
}

void and_into_scalar(Word* dst, const Word* a, const Word* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] & b[i];
}

constexpr BitopsTable kScalar{
    Isa::kScalar, popcount_scalar, and_popcount2_scalar, and_popcount3_scalar, and_into_scalar,
};

}  // namespace

const BitopsTable& scalar_bitops() noexcept { return kScalar; }

}  // namespace universals::kernels
