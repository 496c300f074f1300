#include <cstdlib>
#include <string_view>

#include "universals/kernels/bitops.hpp"

namespace universals::kernels {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

std::vector<const BitopsTable*> available_bitops() {
  std::vector<const BitopsTable*> out{&scalar_bitops()};
  if (const auto* t = avx2_bitops()) out.push_back(t);
  if (const auto* t = neon_bitops()) out.push_back(t);
  return out;
}

namespace {

const BitopsTable& select_bitops() {
  const char* forced = std::getenv("UNIVERSALS_ISA");
  const std::string_view want = forced ? forced : "";
  if (want == "scalar") return scalar_bitops();
  if (want == "avx2") {
    const auto* t = avx2_bitops();
    return t ? *t : scalar_bitops();
  }
  if (want == "neon") {
    const auto* t = neon_bitops();
    return t ? *t : scalar_bitops();
  }
  if (const auto* t = avx2_bitops()) return *t;
  if (const auto* t = neon_bitops()) return *t;
  return scalar_bitops();
}

}  // namespace

const BitopsTable& active_bitops() {
  static const BitopsTable& table = select_bitops();
  return table;
}

}  // namespace universals::kernels
