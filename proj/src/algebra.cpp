#include "clifford/algebra.hpp"

#include <array>
#include <memory>
#include <mutex>

namespace clifford {

void check_dim(int dim) {
  if (dim < 0 || dim > kMaxDim) {
    throw ConfigurationError("algebra dimension " + std::to_string(dim) + " outside 0.." +
                             std::to_string(kMaxDim));
  }
}

BladeProduct blade_mul(BladeMask a, BladeMask b, int dim) {
  check_dim(dim);
  const BladeMask limit = BladeMask{1} << dim;
  if (a >= limit || b >= limit) {
    throw ConfigurationError("blade mask uses generators beyond dimension " + std::to_string(dim));
  }
  return {blade_sign(a, b), a ^ b};
}

BladeTable::BladeTable(int dim) : dim_(dim) {
  check_dim(dim);
  const std::size_t n = blade_count();
  signs_.resize(n * n);
  for (BladeMask a = 0; a < n; ++a) {
    for (BladeMask b = 0; b < n; ++b) {
      signs_[(std::size_t{a} << dim_) | b] = static_cast<std::int8_t>(blade_sign(a, b));
    }
  }
}

const BladeTable& blade_table(int dim) {
  check_dim(dim);
  static std::array<std::once_flag, kMaxDim + 1> flags;
  static std::array<std::unique_ptr<BladeTable>, kMaxDim + 1> tables;
  const auto idx = static_cast<std::size_t>(dim);
  std::call_once(flags[idx], [&] { tables[idx] = std::make_unique<BladeTable>(dim); });
  return *tables[idx];
}

std::string blade_name(BladeMask mask) {
  if (mask == 0) return "e";
  std::string out = "e";
  for (int i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1u) {
      if (out.size() > 1) out += '_';
      out += std::to_string(i);
    }
  }
  return out;
}

}  // namespace clifford
