#pragma once

// Voxel domains, multivector fields on their cell centres, and the
// central-difference perturbed Dirac calculus.

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "clifford/algebra.hpp"

namespace clifford {

using Index = Eigen::Index;
using Point = Eigen::VectorXd;

struct BoundaryFace {
  Index cell;       // interior cell owning the face
  int axis;         // normal axis
  int orientation;  // +1 or -1: outward normal is orientation * e_axis
  Point center;
};

// Axis-aligned lattice of cubic cells of side h in R^(m+1). Occupied cells form
// the interior of the domain; boundary faces separate occupied from
// unoccupied (or off-lattice) cells. Linear cell index: axis 0 fastest.
class VoxelDomain {
 public:
  VoxelDomain(int m, Point origin, double h, std::vector<int> shape, std::vector<char> occupancy);

  // Fully occupied box [origin, origin + h * shape).
  static VoxelDomain box(int m, Point origin, double h, std::vector<int> shape);
  // [0,1]^(m+1) split into resolution^(m+1) cells.
  static VoxelDomain unit_box(int m, int resolution);
  // Cells of the given lattice whose centre satisfies the predicate.
  static VoxelDomain from_predicate(int m, Point origin, double h, std::vector<int> shape,
                                    const std::function<bool(const Point&)>& inside);

  int m() const { return m_; }
  int axes() const { return m_ + 1; }
  int algebra_dim() const { return m_ + 2; }
  double h() const { return h_; }
  const Point& origin() const { return origin_; }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<Index>& strides() const { return strides_; }
  Index cell_count() const { return cell_count_; }

  bool occupied(Index cell) const { return occupancy_[static_cast<std::size_t>(cell)] != 0; }
  const std::vector<char>& occupancy() const { return occupancy_; }
  const std::vector<Index>& interior_cells() const { return interior_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return faces_; }

  Point center(Index cell) const;
  std::vector<int> coords(Index cell) const;
  Index linear(std::span<const int> coords) const;
  // Cell `step` cells along `axis`, or -1 when off the lattice.
  Index neighbor(Index cell, int axis, int step) const;

  double cell_volume() const;
  double face_area() const;
  // Diameter of the bounding box of occupied cells.
  double diameter() const;
  // Euclidean distance from a cell centre to the nearest boundary face centre
  // plane, measured along axes (distance to the exterior).
  double boundary_distance(Index cell) const;

  bool same_lattice(const VoxelDomain& other) const;

 private:
  int m_;
  Point origin_;
  double h_;
  std::vector<int> shape_;
  std::vector<Index> strides_;
  Index cell_count_;
  std::vector<char> occupancy_;
  std::vector<Index> interior_;
  std::vector<BoundaryFace> faces_;
};

using DomainPtr = std::shared_ptr<const VoxelDomain>;

// Multivector values at the cell centres of a voxel lattice. `valid` marks the
// cells carrying a defined value; derivative operators shrink it to cells whose
// stencil is fully valid. Coefficients live in a blades x cells matrix.
class GradedField {
 public:
  using Coeffs = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  // Zero field, valid on the occupied cells.
  GradedField(DomainPtr domain, std::vector<int> grade_support);

  const DomainPtr& domain_ptr() const { return domain_; }
  const VoxelDomain& domain() const { return *domain_; }
  int dim() const { return domain_->algebra_dim(); }

  const std::vector<int>& grade_support() const { return support_; }
  void set_grade_support(std::vector<int> support);

  bool valid(Index cell) const { return valid_[static_cast<std::size_t>(cell)] != 0; }
  const std::vector<char>& valid_mask() const { return valid_; }
  void set_valid_mask(std::vector<char> mask);
  std::vector<Index> valid_cells() const;

  Mv value(Index cell) const;
  void set_value(Index cell, const Mv& value);

  const Coeffs& coeffs() const { return coeffs_; }
  Coeffs& coeffs() { return coeffs_; }

  // Max |coefficient| outside the declared support over valid cells.
  double off_support_norm() const;
  // Throws GradeError if off_support_norm() > tol * max(1, max_norm()).
  void check_support(double tol = 1e-14) const;

  GradedField& operator+=(const GradedField& other);
  GradedField& operator-=(const GradedField& other);
  GradedField& operator*=(Complex s);

 private:
  void require_compatible(const GradedField& other) const;

  DomainPtr domain_;
  std::vector<int> support_;
  std::vector<char> valid_;
  Coeffs coeffs_;
};

GradedField operator+(GradedField a, const GradedField& b);
GradedField operator-(GradedField a, const GradedField& b);
GradedField operator*(Complex s, GradedField a);

std::vector<int> all_grades(int dim);
std::vector<int> merge_supports(const std::vector<int>& a, const std::vector<int>& b);

using FieldFunction = std::function<Mv(const Point&)>;

// Samples fn at the occupied cell centres.
GradedField sample(const DomainPtr& domain, const FieldFunction& fn, std::vector<int> grade_support);

// Max |coefficient| over valid cells (optionally only cells in `mask`).
double max_norm(const GradedField& f);
double max_norm(const GradedField& f, const std::vector<char>& mask);
// sqrt(h^n sum |coeffs|^2) over valid cells.
double l2_norm(const GradedField& f);
double l2_norm(const GradedField& f, const std::vector<char>& mask);

GradedField project_grades(const GradedField& f, const std::vector<int>& grades);
GradedField left_multiply(const Mv& a, const GradedField& f);
GradedField right_multiply(const GradedField& f, const Mv& a);
// Restricts validity to cells valid in both operands' masks.
std::vector<char> intersect_masks(const std::vector<char>& a, const std::vector<char>& b);
// Valid cells at distance >= margin from the domain exterior.
std::vector<char> margin_mask(const GradedField& f, double margin);

// (m, r, p, q, alpha) of a generalized perturbed Moisil-Teodorescu system.
// Validity (0 <= r <= m+2, 0 <= p <= q, r + 2q <= m+2, m >= 2) is checked by
// validate_spec in mt_solver.
struct SystemSpec {
  int m = 2;
  int r = 0;
  int p = 0;
  int q = 1;
  Complex alpha{0.0, 0.0};
};

enum class Side { left, right };
enum class DiracPart { plus, minus };

// Sum_i e_i D_i F + alpha e_{m+1} F (left) or Sum_i D_i F e_i + alpha F e_{m+1}
// (right), D_i the central difference along axis i.
GradedField dirac(const GradedField& f, Complex alpha, Side side);

// Grade-raising (plus) / grade-lowering (minus) half of the unperturbed Dirac
// action on a pure-grade field.
GradedField d_pm(const GradedField& f, DiracPart part);

// (Delta_2h + alpha^2) F with the wide Laplacian sum_i (F(x+2h e_i) - 2F +
// F(x-2h e_i)) / (4h^2), so dirac(dirac(F)) = -helmholtz(F) exactly.
GradedField helmholtz(const GradedField& f, Complex alpha);

}  // namespace clifford
