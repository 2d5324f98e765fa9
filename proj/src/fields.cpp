#include "clifford/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace clifford {

namespace {

std::vector<char> stencil_mask(const GradedField& f, int reach) {
  const VoxelDomain& d = f.domain();
  std::vector<char> out(static_cast<std::size_t>(d.cell_count()), 0);
  for (Index c = 0; c < d.cell_count(); ++c) {
    if (!f.valid(c)) continue;
    bool ok = true;
    for (int axis = 0; axis < d.axes() && ok; ++axis) {
      for (int step = 1; step <= reach && ok; ++step) {
        const Index a = d.neighbor(c, axis, step);
        const Index b = d.neighbor(c, axis, -step);
        ok = a >= 0 && b >= 0 && f.valid(a) && f.valid(b);
      }
    }
    out[static_cast<std::size_t>(c)] = ok ? 1 : 0;
  }
  if (std::none_of(out.begin(), out.end(), [](char v) { return v != 0; })) {
    throw DomainError("no cell has a fully valid difference stencil");
  }
  return out;
}

std::vector<int> shift_support(const std::vector<int>& support, std::initializer_list<int> shifts, int dim) {
  std::set<int> out;
  for (int s : support) {
    for (int k : shifts) {
      if (s + k >= 0 && s + k <= dim) out.insert(s + k);
    }
  }
  return {out.begin(), out.end()};
}

// Grades that can appear in a product of a grade-a and a grade-b element.
std::vector<int> product_support(const std::vector<int>& ga, const std::vector<int>& gb, int dim) {
  std::set<int> out;
  for (int a : ga) {
    for (int b : gb) {
      for (int s = std::abs(a - b); s <= std::min(a + b, 2 * dim - a - b); s += 2) out.insert(s);
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace

// ---------------------------------------------------------------------------
// VoxelDomain

VoxelDomain::VoxelDomain(int m, Point origin, double h, std::vector<int> shape, std::vector<char> occupancy)
    : m_(m), origin_(std::move(origin)), h_(h), shape_(std::move(shape)), occupancy_(std::move(occupancy)) {
  check_dim(m + 2);
  if (m < 0) throw ConfigurationError("m must be non-negative");
  if (!(h > 0.0)) throw DomainError("spacing h must be positive");
  if (static_cast<int>(shape_.size()) != m + 1 || origin_.size() != m + 1) {
    throw DomainError("lattice shape and origin need m+1 entries");
  }
  strides_.resize(shape_.size());
  cell_count_ = 1;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (shape_[a] <= 0) throw DomainError("lattice extents must be positive");
    strides_[a] = cell_count_;
    cell_count_ *= shape_[a];
  }
  if (static_cast<Index>(occupancy_.size()) != cell_count_) {
    throw DomainError("occupancy size does not match lattice");
  }
  for (Index c = 0; c < cell_count_; ++c) {
    if (occupied(c)) interior_.push_back(c);
  }
  if (interior_.empty()) throw DomainError("domain has no interior cells");

  for (Index c : interior_) {
    for (int axis = 0; axis < axes(); ++axis) {
      for (int orientation : {-1, 1}) {
        const Index nb = neighbor(c, axis, orientation);
        if (nb >= 0 && occupied(nb)) continue;
        Point centre = center(c);
        centre[axis] += 0.5 * h_ * orientation;
        faces_.push_back({c, axis, orientation, std::move(centre)});
      }
    }
  }
}

VoxelDomain VoxelDomain::box(int m, Point origin, double h, std::vector<int> shape) {
  Index n = 1;
  for (int s : shape) n *= std::max(s, 0);
  return VoxelDomain(m, std::move(origin), h, std::move(shape), std::vector<char>(static_cast<std::size_t>(n), 1));
}

VoxelDomain VoxelDomain::unit_box(int m, int resolution) {
  if (resolution <= 0) throw DomainError("resolution must be positive");
  return box(m, Point::Zero(m + 1), 1.0 / resolution, std::vector<int>(static_cast<std::size_t>(m + 1), resolution));
}

VoxelDomain VoxelDomain::from_predicate(int m, Point origin, double h, std::vector<int> shape,
                                        const std::function<bool(const Point&)>& inside) {
  VoxelDomain lattice = box(m, origin, h, shape);
  std::vector<char> occ(static_cast<std::size_t>(lattice.cell_count()), 0);
  for (Index c = 0; c < lattice.cell_count(); ++c) occ[static_cast<std::size_t>(c)] = inside(lattice.center(c)) ? 1 : 0;
  return VoxelDomain(m, std::move(origin), h, std::move(shape), std::move(occ));
}

Point VoxelDomain::center(Index cell) const {
  Point p(axes());
  for (int a = 0; a < axes(); ++a) {
    const Index k = (cell / strides_[static_cast<std::size_t>(a)]) % shape_[static_cast<std::size_t>(a)];
    p[a] = origin_[a] + (static_cast<double>(k) + 0.5) * h_;
  }
  return p;
}

std::vector<int> VoxelDomain::coords(Index cell) const {
  std::vector<int> k(shape_.size());
  for (std::size_t a = 0; a < shape_.size(); ++a) k[a] = static_cast<int>((cell / strides_[a]) % shape_[a]);
  return k;
}

Index VoxelDomain::linear(std::span<const int> k) const {
  Index out = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (k[a] < 0 || k[a] >= shape_[a]) return -1;
    out += k[a] * strides_[a];
  }
  return out;
}

Index VoxelDomain::neighbor(Index cell, int axis, int step) const {
  const auto a = static_cast<std::size_t>(axis);
  const Index k = (cell / strides_[a]) % shape_[a] + step;
  if (k < 0 || k >= shape_[a]) return -1;
  return cell + step * strides_[a];
}

double VoxelDomain::cell_volume() const { return std::pow(h_, axes()); }

double VoxelDomain::face_area() const { return std::pow(h_, m_); }

double VoxelDomain::diameter() const {
  std::vector<int> lo(shape_), hi(shape_.size(), -1);
  for (Index c : interior_) {
    const auto k = coords(c);
    for (std::size_t a = 0; a < k.size(); ++a) {
      lo[a] = std::min(lo[a], k[a]);
      hi[a] = std::max(hi[a], k[a]);
    }
  }
  double sq = 0.0;
  for (std::size_t a = 0; a < lo.size(); ++a) {
    const double ext = (hi[a] - lo[a] + 1) * h_;
    sq += ext * ext;
  }
  return std::sqrt(sq);
}

double VoxelDomain::boundary_distance(Index cell) const {
  if (!occupied(cell)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < axes(); ++axis) {
    for (int dir : {-1, 1}) {
      int steps = 0;
      Index c = cell;
      while (true) {
        const Index nb = neighbor(c, axis, dir);
        if (nb < 0 || !occupied(nb)) break;
        c = nb;
        ++steps;
      }
      best = std::min(best, (steps + 0.5) * h_);
    }
  }
  return best;
}

bool VoxelDomain::same_lattice(const VoxelDomain& other) const {
  return m_ == other.m_ && h_ == other.h_ && shape_ == other.shape_ && origin_ == other.origin_;
}

// ---------------------------------------------------------------------------
// GradedField

GradedField::GradedField(DomainPtr domain, std::vector<int> grade_support) : domain_(std::move(domain)) {
  if (!domain_) throw DomainError("field needs a domain");
  set_grade_support(std::move(grade_support));
  valid_ = domain_->occupancy();
  coeffs_ = Coeffs::Zero(Index{1} << dim(), domain_->cell_count());
}

void GradedField::set_grade_support(std::vector<int> support) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  for (int s : support) {
    if (s < 0 || s > dim()) throw GradeError("grade " + std::to_string(s) + " outside algebra");
  }
  support_ = std::move(support);
}

void GradedField::set_valid_mask(std::vector<char> mask) {
  if (static_cast<Index>(mask.size()) != domain_->cell_count()) throw DomainError("mask size mismatch");
  valid_ = std::move(mask);
}

std::vector<Index> GradedField::valid_cells() const {
  std::vector<Index> out;
  for (Index c = 0; c < domain_->cell_count(); ++c) {
    if (valid(c)) out.push_back(c);
  }
  return out;
}

Mv GradedField::value(Index cell) const { return Mv(dim(), coeffs_.col(cell)); }

void GradedField::set_value(Index cell, const Mv& value) {
  if (value.dim() != dim()) throw ConfigurationError("value dimension does not match field");
  coeffs_.col(cell) = value.coeffs();
}

double GradedField::off_support_norm() const {
  std::vector<char> in_support(static_cast<std::size_t>(dim()) + 1, 0);
  for (int s : support_) in_support[static_cast<std::size_t>(s)] = 1;
  double worst = 0.0;
  for (Index c = 0; c < domain_->cell_count(); ++c) {
    if (!valid(c)) continue;
    for (Index b = 0; b < coeffs_.rows(); ++b) {
      if (!in_support[static_cast<std::size_t>(grade(static_cast<BladeMask>(b)))]) {
        worst = std::max(worst, std::abs(coeffs_(b, c)));
      }
    }
  }
  return worst;
}

void GradedField::check_support(double tol) const {
  const double off = off_support_norm();
  if (off > tol * std::max(1.0, max_norm(*this))) {
    throw GradeError("field has coefficients of magnitude " + std::to_string(off) + " outside its grade support");
  }
}

void GradedField::require_compatible(const GradedField& other) const {
  if (domain_ != other.domain_ && !domain_->same_lattice(*other.domain_)) {
    throw DomainError("fields live on different lattices");
  }
}

GradedField& GradedField::operator+=(const GradedField& other) {
  require_compatible(other);
  coeffs_ += other.coeffs_;
  valid_ = intersect_masks(valid_, other.valid_);
  support_ = merge_supports(support_, other.support_);
  return *this;
}

GradedField& GradedField::operator-=(const GradedField& other) {
  require_compatible(other);
  coeffs_ -= other.coeffs_;
  valid_ = intersect_masks(valid_, other.valid_);
  support_ = merge_supports(support_, other.support_);
  return *this;
}

GradedField& GradedField::operator*=(Complex s) {
  coeffs_ *= s;
  return *this;
}

GradedField operator+(GradedField a, const GradedField& b) { return a += b; }
GradedField operator-(GradedField a, const GradedField& b) { return a -= b; }
GradedField operator*(Complex s, GradedField a) { return a *= s; }

std::vector<int> all_grades(int dim) {
  std::vector<int> out(static_cast<std::size_t>(dim) + 1);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<int> merge_supports(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> out(a.begin(), a.end());
  out.insert(b.begin(), b.end());
  return {out.begin(), out.end()};
}

GradedField sample(const DomainPtr& domain, const FieldFunction& fn, std::vector<int> grade_support) {
  GradedField out(domain, std::move(grade_support));
  for (Index c : domain->interior_cells()) out.set_value(c, fn(domain->center(c)));
  out.check_support(1e-14);
  return out;
}

double max_norm(const GradedField& f) { return max_norm(f, f.valid_mask()); }

double max_norm(const GradedField& f, const std::vector<char>& mask) {
  double out = 0.0;
  for (Index c = 0; c < f.domain().cell_count(); ++c) {
    if (f.valid(c) && mask[static_cast<std::size_t>(c)]) out = std::max(out, f.coeffs().col(c).cwiseAbs().maxCoeff());
  }
  return out;
}

double l2_norm(const GradedField& f) { return l2_norm(f, f.valid_mask()); }

double l2_norm(const GradedField& f, const std::vector<char>& mask) {
  double sum = 0.0;
  for (Index c = 0; c < f.domain().cell_count(); ++c) {
    if (f.valid(c) && mask[static_cast<std::size_t>(c)]) sum += f.coeffs().col(c).squaredNorm();
  }
  return std::sqrt(sum * f.domain().cell_volume());
}

GradedField project_grades(const GradedField& f, const std::vector<int>& grades) {
  GradedField out(f.domain_ptr(), grades);
  out.set_valid_mask(f.valid_mask());
  std::vector<char> keep(static_cast<std::size_t>(f.dim()) + 1, 0);
  for (int s : grades) keep[static_cast<std::size_t>(s)] = 1;
  for (Index b = 0; b < f.coeffs().rows(); ++b) {
    if (keep[static_cast<std::size_t>(grade(static_cast<BladeMask>(b)))]) out.coeffs().row(b) = f.coeffs().row(b);
  }
  return out;
}

GradedField left_multiply(const Mv& a, const GradedField& f) {
  GradedField out(f.domain_ptr(), product_support(grades_present(a), f.grade_support(), f.dim()));
  out.set_valid_mask(f.valid_mask());
  const BladeTable& table = blade_table(f.dim());
  for (BladeMask i = 0; i < static_cast<BladeMask>(a.size()); ++i) {
    if (a[i] == Complex(0)) continue;
    for (BladeMask j = 0; j < static_cast<BladeMask>(a.size()); ++j) {
      out.coeffs().row(i ^ j) += (static_cast<double>(table.sign(i, j)) * a[i]) * f.coeffs().row(j);
    }
  }
  return out;
}

GradedField right_multiply(const GradedField& f, const Mv& a) {
  GradedField out(f.domain_ptr(), product_support(f.grade_support(), grades_present(a), f.dim()));
  out.set_valid_mask(f.valid_mask());
  const BladeTable& table = blade_table(f.dim());
  for (BladeMask i = 0; i < static_cast<BladeMask>(a.size()); ++i) {
    if (a[i] == Complex(0)) continue;
    for (BladeMask j = 0; j < static_cast<BladeMask>(a.size()); ++j) {
      out.coeffs().row(i ^ j) += (static_cast<double>(table.sign(j, i)) * a[i]) * f.coeffs().row(j);
    }
  }
  return out;
}

std::vector<char> intersect_masks(const std::vector<char>& a, const std::vector<char>& b) {
  if (a.size() != b.size()) throw DomainError("mask size mismatch");
  std::vector<char> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
  return out;
}

std::vector<char> margin_mask(const GradedField& f, double margin) {
  std::vector<char> out(f.valid_mask().size(), 0);
  for (Index c = 0; c < f.domain().cell_count(); ++c) {
    out[static_cast<std::size_t>(c)] = (f.valid(c) && f.domain().boundary_distance(c) >= margin) ? 1 : 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Difference operators

GradedField dirac(const GradedField& f, Complex alpha, Side side) {
  const VoxelDomain& d = f.domain();
  const int dim = f.dim();
  const BladeTable& table = blade_table(dim);
  const BladeMask top = generator(d.m() + 1);
  const Index blades = f.coeffs().rows();

  GradedField out(f.domain_ptr(), shift_support(f.grade_support(), {-1, 1}, dim));
  out.set_valid_mask(stencil_mask(f, 1));
  const double inv2h = 1.0 / (2.0 * d.h());

  Eigen::VectorXcd diff(blades);
  for (Index c = 0; c < d.cell_count(); ++c) {
    if (!out.valid(c)) continue;
    auto col = out.coeffs().col(c);
    for (int axis = 0; axis < d.axes(); ++axis) {
      const BladeMask ei = generator(axis);
      diff = (f.coeffs().col(d.neighbor(c, axis, 1)) - f.coeffs().col(d.neighbor(c, axis, -1))) * inv2h;
      for (BladeMask b = 0; b < static_cast<BladeMask>(blades); ++b) {
        if (diff[b] == Complex(0)) continue;
        const int sign = side == Side::left ? table.sign(ei, b) : table.sign(b, ei);
        col[ei ^ b] += static_cast<double>(sign) * diff[b];
      }
    }
    if (alpha != Complex(0)) {
      for (BladeMask b = 0; b < static_cast<BladeMask>(blades); ++b) {
        const Complex v = f.coeffs()(b, c);
        if (v == Complex(0)) continue;
        const int sign = side == Side::left ? table.sign(top, b) : table.sign(b, top);
        col[top ^ b] += static_cast<double>(sign) * alpha * v;
      }
    }
  }
  return out;
}

GradedField d_pm(const GradedField& f, DiracPart part) {
  if (f.grade_support().size() > 1) throw GradeError("d_pm needs a field of a single grade");
  f.check_support(1e-14);
  const int dim = f.dim();
  const int s = f.grade_support().empty() ? 0 : f.grade_support().front();
  const int target = part == DiracPart::plus ? s + 1 : s - 1;

  GradedField left = dirac(f, 0.0, Side::left);
  const GradedField right = dirac(f, 0.0, Side::right);
  // plus: (dF + (-1)^s F d)/2, minus: (dF - (-1)^s F d)/2
  const double parity = (s % 2 == 0) ? 1.0 : -1.0;
  const double sign = part == DiracPart::plus ? parity : -parity;
  left.coeffs() = 0.5 * (left.coeffs() + sign * right.coeffs());
  if (target < 0 || target > dim) {
    left.coeffs().setZero();
    left.set_grade_support({});
  } else {
    left.set_grade_support({target});
  }
  return left;
}

GradedField helmholtz(const GradedField& f, Complex alpha) {
  const VoxelDomain& d = f.domain();
  GradedField out(f.domain_ptr(), f.grade_support());
  out.set_valid_mask(stencil_mask(f, 2));
  const double inv4h2 = 1.0 / (4.0 * d.h() * d.h());
  const Complex a2 = alpha * alpha;
  for (Index c = 0; c < d.cell_count(); ++c) {
    if (!out.valid(c)) continue;
    auto col = out.coeffs().col(c);
    col = a2 * f.coeffs().col(c);
    for (int axis = 0; axis < d.axes(); ++axis) {
      col += (f.coeffs().col(d.neighbor(c, axis, 2)) - 2.0 * f.coeffs().col(c) + f.coeffs().col(d.neighbor(c, axis, -2))) *
             inv4h2;
    }
  }
  return out;
}

}  // namespace clifford
