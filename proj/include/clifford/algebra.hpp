#pragma once

// Complex Clifford algebra C_{0,d} on d anticommuting generators e_0..e_{d-1},
// each squaring to -1. Blades are bit masks (bit i <=> e_i present); the empty
// mask is the identity. Multivectors store a dense coefficient per blade.

#include <Eigen/Dense>

#include <bit>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "clifford/errors.hpp"

namespace clifford {

using Complex = std::complex<double>;
using BladeMask = std::uint32_t;

inline constexpr int kMaxDim = 12;

constexpr int grade(BladeMask b) { return std::popcount(b); }

constexpr BladeMask generator(int i) { return BladeMask{1} << i; }

// (-1)^(transpositions needed to sort the concatenated index list of a then b).
constexpr int reorder_sign(BladeMask a, BladeMask b) {
  int swaps = 0;
  for (a >>= 1; a != 0; a >>= 1) swaps += std::popcount(a & b);
  return (swaps & 1) ? -1 : 1;
}

// Full sign of e_a e_b: reordering, then one factor -1 per shared generator.
constexpr int blade_sign(BladeMask a, BladeMask b) {
  const int contraction = (std::popcount(a & b) & 1) ? -1 : 1;
  return reorder_sign(a, b) * contraction;
}

struct BladeProduct {
  int sign;
  BladeMask mask;
  friend bool operator==(const BladeProduct&, const BladeProduct&) = default;
};

// e_a e_b = sign * e_(a xor b). Throws ConfigurationError if a mask uses bits
// at or beyond dim.
BladeProduct blade_mul(BladeMask a, BladeMask b, int dim);

// Sign cache for all blade pairs of one dimension: entry (a << dim) | b.
class BladeTable {
 public:
  explicit BladeTable(int dim);

  int dim() const { return dim_; }
  std::size_t blade_count() const { return std::size_t{1} << dim_; }

  int sign(BladeMask a, BladeMask b) const {
    return signs_[(std::size_t{a} << dim_) | b];
  }
  BladeProduct product(BladeMask a, BladeMask b) const { return {sign(a, b), a ^ b}; }

 private:
  int dim_;
  std::vector<std::int8_t> signs_;
};

// Shared read-only table, built on first use.
const BladeTable& blade_table(int dim);

void check_dim(int dim);

enum class ContractPart { bullet, wedge };

template <typename Scalar>
class Multivector {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Multivector() : Multivector(0) {}

  explicit Multivector(int dim) : dim_(dim) {
    check_dim(dim);
    coeffs_ = Coeffs::Zero(Eigen::Index{1} << dim);
  }

  Multivector(int dim, Coeffs coeffs) : dim_(dim), coeffs_(std::move(coeffs)) {
    check_dim(dim);
    if (coeffs_.size() != (Eigen::Index{1} << dim)) {
      throw ConfigurationError("coefficient vector length must be 2^dim");
    }
  }

  static Multivector blade(int dim, BladeMask mask, Scalar value = Scalar(1)) {
    Multivector out(dim);
    out.at(mask) = value;
    return out;
  }

  static Multivector scalar(int dim, Scalar value) { return blade(dim, 0, value); }

  // Sum_i components[i] e_i.
  static Multivector vector(int dim, const std::vector<Scalar>& components) {
    Multivector out(dim);
    if (static_cast<int>(components.size()) > dim) {
      throw ConfigurationError("vector has more components than generators");
    }
    for (std::size_t i = 0; i < components.size(); ++i) out.at(generator(static_cast<int>(i))) = components[i];
    return out;
  }

  int dim() const { return dim_; }
  Eigen::Index size() const { return coeffs_.size(); }

  Scalar operator[](BladeMask mask) const { return coeffs_[static_cast<Eigen::Index>(mask)]; }
  Scalar& operator[](BladeMask mask) { return coeffs_[static_cast<Eigen::Index>(mask)]; }

  // Bounds-checked access.
  Scalar& at(BladeMask mask) {
    if (static_cast<Eigen::Index>(mask) >= size()) throw ConfigurationError("blade outside algebra");
    return (*this)[mask];
  }

  const Coeffs& coeffs() const { return coeffs_; }
  Coeffs& coeffs() { return coeffs_; }

  Multivector& operator+=(const Multivector& other) {
    require_same_dim(other);
    coeffs_ += other.coeffs_;
    return *this;
  }
  Multivector& operator-=(const Multivector& other) {
    require_same_dim(other);
    coeffs_ -= other.coeffs_;
    return *this;
  }
  Multivector& operator*=(const Scalar& s) {
    coeffs_ *= s;
    return *this;
  }

  void require_same_dim(const Multivector& other) const {
    if (other.dim_ != dim_) {
      throw ConfigurationError("dimension mismatch: " + std::to_string(dim_) + " vs " +
                               std::to_string(other.dim_));
    }
  }

 private:
  int dim_;
  Coeffs coeffs_;
};

using Mv = Multivector<Complex>;

template <typename Scalar>
Multivector<Scalar> operator+(Multivector<Scalar> a, const Multivector<Scalar>& b) {
  return a += b;
}

template <typename Scalar>
Multivector<Scalar> operator-(Multivector<Scalar> a, const Multivector<Scalar>& b) {
  return a -= b;
}

template <typename Scalar>
Multivector<Scalar> operator-(Multivector<Scalar> a) {
  a.coeffs() = -a.coeffs();
  return a;
}

template <typename Scalar>
Multivector<Scalar> operator*(const std::type_identity_t<Scalar>& s, Multivector<Scalar> a) {
  return a *= s;
}

template <typename Scalar>
Multivector<Scalar> operator*(Multivector<Scalar> a, const std::type_identity_t<Scalar>& s) {
  return a *= s;
}

template <typename Scalar>
Multivector<Scalar> geometric_product(const Multivector<Scalar>& a, const Multivector<Scalar>& b) {
  a.require_same_dim(b);
  const BladeTable& table = blade_table(a.dim());
  Multivector<Scalar> out(a.dim());
  const auto n = static_cast<BladeMask>(a.size());
  for (BladeMask i = 0; i < n; ++i) {
    const Scalar ai = a[i];
    if (ai == Scalar(0)) continue;
    for (BladeMask j = 0; j < n; ++j) {
      const Scalar bj = b[j];
      if (bj == Scalar(0)) continue;
      const Scalar term = ai * bj;
      if (table.sign(i, j) > 0) {
        out[i ^ j] += term;
      } else {
        out[i ^ j] -= term;
      }
    }
  }
  return out;
}

template <typename Scalar>
Multivector<Scalar> operator*(const Multivector<Scalar>& a, const Multivector<Scalar>& b) {
  return geometric_product(a, b);
}

// [a]_s. Throws GradeError for s outside 0..dim.
template <typename Scalar>
Multivector<Scalar> grade_project(const Multivector<Scalar>& a, int s) {
  if (s < 0 || s > a.dim()) throw GradeError("grade " + std::to_string(s) + " out of range");
  Multivector<Scalar> out(a.dim());
  for (BladeMask i = 0; i < static_cast<BladeMask>(a.size()); ++i) {
    if (grade(i) == s) out[i] = a[i];
  }
  return out;
}

template <typename Scalar>
double norm_inf(const Multivector<Scalar>& a) {
  return a.size() == 0 ? 0.0 : a.coeffs().cwiseAbs().maxCoeff();
}

// Grades carrying any coefficient with magnitude above tol, ascending.
template <typename Scalar>
std::vector<int> grades_present(const Multivector<Scalar>& a, double tol = 0.0) {
  std::vector<bool> seen(static_cast<std::size_t>(a.dim()) + 1, false);
  for (BladeMask i = 0; i < static_cast<BladeMask>(a.size()); ++i) {
    if (std::abs(a[i]) > tol) seen[static_cast<std::size_t>(grade(i))] = true;
  }
  std::vector<int> out;
  for (std::size_t s = 0; s < seen.size(); ++s) {
    if (seen[s]) out.push_back(static_cast<int>(s));
  }
  return out;
}

// The single grade of a, if it has exactly one (zero counts as grade 0).
template <typename Scalar>
std::optional<int> pure_grade(const Multivector<Scalar>& a, double tol = 0.0) {
  const auto gs = grades_present(a, tol);
  if (gs.empty()) return 0;
  if (gs.size() == 1) return gs.front();
  return std::nullopt;
}

// x . v = [xv]_{s-1} and x ^ v = [xv]_{s+1} for a 1-vector x and s-vector v.
template <typename Scalar>
Multivector<Scalar> contract(const Multivector<Scalar>& x, const Multivector<Scalar>& v, ContractPart part) {
  x.require_same_dim(v);
  const auto gx = grades_present(x);
  if (!(gx.empty() || (gx.size() == 1 && gx.front() == 1))) {
    throw GradeError("contract: x must be a pure 1-vector");
  }
  const auto gv = pure_grade(v);
  if (!gv) throw GradeError("contract: v must be of pure grade");
  const int s = *gv;
  if (s == 0) {
    return part == ContractPart::bullet ? Multivector<Scalar>(x.dim()) : geometric_product(x, v);
  }
  if (s == x.dim()) {
    return part == ContractPart::wedge ? Multivector<Scalar>(x.dim()) : geometric_product(x, v);
  }
  const Multivector<Scalar> xv = geometric_product(x, v);
  const Multivector<Scalar> vx = geometric_product(v, x);
  // bullet: (xv - (-1)^s vx)/2, wedge: (xv + (-1)^s vx)/2
  const double parity = (s % 2 == 0) ? 1.0 : -1.0;
  const double sign = part == ContractPart::bullet ? -parity : parity;
  Multivector<Scalar> out = xv + Scalar(sign) * vx;
  out *= Scalar(0.5);
  return out;
}

// Blade reversion-conjugation: e_A -> (-1)^(s(s+1)/2) e_A; scalars untouched.
template <typename Scalar>
Multivector<Scalar> conjugate(const Multivector<Scalar>& a) {
  Multivector<Scalar> out = a;
  for (BladeMask i = 0; i < static_cast<BladeMask>(a.size()); ++i) {
    const int s = grade(i);
    if (((s * (s + 1)) / 2) % 2 != 0) out[i] = -out[i];
  }
  return out;
}

std::string blade_name(BladeMask mask);

}  // namespace clifford
