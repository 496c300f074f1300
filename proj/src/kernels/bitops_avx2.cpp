// AVX2 bitset kernels. Functions carry target attributes instead of the whole
// file being built with -mavx2, so no inline function from a shared header is
// ever emitted with AVX2 code. Population counts use the nibble-table
// shuffle (vpshufb) reduced with vpsadbw.

#include "universals/kernels/bitops.hpp"

#if defined(UNIVERSALS_HAVE_AVX2)

#include <immintrin.h>

#define UNIVERSALS_AVX2 __attribute__((target("avx2,popcnt")))

namespace universals::kernels {
namespace {

UNIVERSALS_AVX2 inline __m256i popcount_bytes(__m256i v) {
  const __m256i table = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
  return _mm256_add_epi8(_mm256_shuffle_epi8(table, lo), _mm256_shuffle_epi8(table, hi));
}

UNIVERSALS_AVX2 inline std::size_t horizontal_sum(__m256i acc) {
  return static_cast<std::size_t>(_mm256_extract_epi64(acc, 0)) +
         static_cast<std::size_t>(_mm256_extract_epi64(acc, 1)) +
         static_cast<std::size_t>(_mm256_extract_epi64(acc, 2)) +
         static_cast<std::size_t>(_mm256_extract_epi64(acc, 3));
}

UNIVERSALS_AVX2 inline __m256i load(const Word* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

UNIVERSALS_AVX2 std::size_t popcount_avx2(const Word* a, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(load(a + i)), zero));
  }
  std::size_t total = horizontal_sum(acc);
  for (; i < n; ++i) total += static_cast<std::size_t>(__builtin_popcountll(a[i]));
  return total;
}

UNIVERSALS_AVX2 std::size_t and_popcount2_avx2(const Word* a, const Word* b, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v = _mm256_and_si256(load(a + i), load(b + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(v), zero));
  }
  std::size_t total = horizontal_sum(acc);
  for (; i < n; ++i) total += static_cast<std::size_t>(__builtin_popcountll(a[i] & b[i]));
  return total;
}

UNIVERSALS_AVX2 std::size_t and_popcount3_avx2(const Word* a, const Word* b, const Word* c,
                                               std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v = _mm256_and_si256(_mm256_and_si256(load(a + i), load(b + i)), load(c + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(v), zero));
  }
  std::size_t total = horizontal_sum(acc);
  for (; i < n; ++i) {
    total += static_cast<std::size_t>(__builtin_popcountll(a[i] & b[i] & c[i]));
  }
  return total;
}

UNIVERSALS_AVX2 void and_into_avx2(Word* dst, const Word* a, const Word* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i),
                        _mm256_and_si256(load(a + i), load(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] & b[i];
}

constexpr BitopsTable kAvx2{
    Isa::kAvx2, popcount_avx2, and_popcount2_avx2, and_popcount3_avx2, and_into_avx2,
};

}  // namespace

const BitopsTable* avx2_bitops() noexcept {
  __builtin_cpu_init();
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("popcnt")) return nullptr;
  return &kAvx2;
}

}  // namespace universals::kernels

#else

namespace universals::kernels {
const BitopsTable* avx2_bitops() noexcept { return nullptr; }
}  // namespace universals::kernels

#endif
