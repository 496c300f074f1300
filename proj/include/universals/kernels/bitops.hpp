#pragma once

// Bitset kernels over language masks: bit l of a mask is set when language l
// has some property (feature observed, value 1, ...). Every contingency count
// in the library reduces to an AND followed by a population count.
//
// Each ISA provides the same table of function pointers; the scalar table is
// the reference and the others are tested against it bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace universals::kernels {

using Word = std::uint64_t;

constexpr std::size_t words_for(std::size_t bits) noexcept { return (bits + 63) / 64; }

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa) noexcept;

struct BitopsTable {
  Isa isa;
  std::size_t (*popcount)(const Word* a, std::size_t n);
  std::size_t (*and_popcount2)(const Word* a, const Word* b, std::size_t n);
  std::size_t (*and_popcount3)(const Word* a, const Word* b, const Word* c, std::size_t n);
  // dst[i] = a[i] & b[i]; dst may alias a or b.
  void (*and_into)(Word* dst, const Word* a, const Word* b, std::size_t n);
};

const BitopsTable& scalar_bitops() noexcept;
// nullptr when the ISA was not compiled in or the CPU lacks it.
const BitopsTable* avx2_bitops() noexcept;
const BitopsTable* neon_bitops() noexcept;

// Every table usable on this machine, scalar first.
std::vector<const BitopsTable*> available_bitops();

// Fastest usable table, chosen once. UNIVERSALS_ISA=scalar|avx2|neon forces a
// choice (falls back to scalar when the forced ISA is unavailable).
const BitopsTable& active_bitops();

inline std::size_t popcount(std::span<const Word> a) {
  return active_bitops().popcount(a.data(), a.size());
}
inline std::size_t and_popcount(std::span<const Word> a, std::span<const Word> b) {
  return active_bitops().and_popcount2(a.data(), b.data(), a.size());
}
inline std::size_t and_popcount(std::span<const Word> a, std::span<const Word> b,
                                std::span<const Word> c) {
  return active_bitops().and_popcount3(a.data(), b.data(), c.data(), a.size());
}
inline void and_into(std::span<Word> dst, std::span<const Word> a, std::span<const Word> b) {
  active_bitops().and_into(dst.data(), a.data(), b.data(), dst.size());
}

}  // namespace universals::kernels
