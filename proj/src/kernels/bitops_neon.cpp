#include "universals/kernels/bitops.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

namespace universals::kernels {
namespace {

inline std::size_t reduce(uint8x16_t counts) { return vaddlvq_u8(counts); }

std::size_t popcount_neon(const Word* a, std::size_t n) {
  std::size_t total = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    total += reduce(vcntq_u8(vreinterpretq_u8_u64(vld1q_u64(a + i))));
  }
  for (; i < n; ++i) total += static_cast<std::size_t>(__builtin_popcountll(a[i]));
  return total;
}

std::size_t and_popcount2_neon(const Word* a, const Word* b, std::size_t n) {
  std::size_t total = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t v = vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i));
    total += reduce(vcntq_u8(vreinterpretq_u8_u64(v)));
  }
  for (; i < n; ++i) total += static_cast<std::size_t>(__builtin_popcountll(a[i] & b[i]));
  return total;
}

std::size_t and_popcount3_neon(const Word* a, const Word* b, const Word* c, std::size_t n) {
  std::size_t total = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t v =
        vandq_u64(vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i)), vld1q_u64(c + i));
    total += reduce(vcntq_u8(vreinterpretq_u8_u64(v)));
  }
  for (; i < n; ++i) {
    total += static_cast<std::size_t>(__builtin_popcountll(a[i] & b[i] & c[i]));
  }
  return total;
}

void and_into_neon(Word* dst, const Word* a, const Word* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_u64(dst + i, vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
  for (; i < n; ++i) dst[i] = a[i] & b[i];
}

constexpr BitopsTable kNeon{
    Isa::kNeon, popcount_neon, and_popcount2_neon, and_popcount3_neon, and_into_neon,
};

}  // namespace

const BitopsTable* neon_bitops() noexcept { return &kNeon; }

}  // namespace universals::kernels

#else

namespace universals::kernels {
const BitopsTable* neon_bitops() noexcept { return nullptr; }
}  // namespace universals::kernels

#endif
