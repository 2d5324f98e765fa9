#include <doctest.h>

#include <random>

#include "clifford/fields.hpp"

using namespace clifford;

namespace {

DomainPtr box(int m, int n) { return std::make_shared<const VoxelDomain>(VoxelDomain::unit_box(m, n)); }

Index middle(const VoxelDomain& d) {
  std::vector<int> c(static_cast<std::size_t>(d.axes()), d.shape()[0] / 2);
  return d.linear(c);
}

GradedField linear_field(const DomainPtr& d, int axis, BladeMask blade) {
  return sample(d, [=](const Point& x) { return Mv::blade(d->algebra_dim(), blade, x[axis]); }, {grade(blade)});
}

}  // namespace

TEST_CASE("voxel lattice indexing") {
  const auto d = box(2, 4);
  CHECK(d->cell_count() == 64);
  CHECK(d->h() == doctest::Approx(0.25));
  const std::vector<int> c{1, 2, 3};
  const Index i = d->linear(c);
  CHECK(i == 1 + 4 * 2 + 16 * 3);
  CHECK(d->coords(i) == c);
  CHECK(d->center(i)[0] == doctest::Approx(0.375));
  CHECK(d->neighbor(i, 0, 1) == i + 1);
  CHECK(d->neighbor(d->linear(std::vector<int>{3, 0, 0}), 0, 1) == -1);
  CHECK(d->boundary_faces().size() == 6 * 16);
}

TEST_CASE("from_predicate keeps the cells inside") {
  const VoxelDomain d = VoxelDomain::from_predicate(2, Point::Zero(3), 0.1, {10, 10, 10},
                                                    [](const Point& x) { return (x.array() - 0.5).matrix().norm() < 0.3; });
  CHECK(d.interior_cells().size() > 0);
  CHECK(d.interior_cells().size() < 1000);
}

TEST_CASE("Dirac operator on linear fields") {
  const auto d = box(2, 6);
  const Index c = middle(*d);
  // F = x1 e0: left sum e_i D_i F = e1 e0 = -e01, right sum D_i F e_i = e0 e1 = e01.
  const GradedField f = linear_field(d, 1, 0b001);
  CHECK(dirac(f, 0.0, Side::left).coeffs()(0b011, c) == Complex(-1.0));
  CHECK(dirac(f, 0.0, Side::right).coeffs()(0b011, c) == Complex(1.0));
  // The perturbation multiplies by alpha e3 from the chosen side.
  const GradedField g = dirac(f, 2.0, Side::left);
  CHECK(g.coeffs()(0b1001, c).real() == doctest::Approx(-2.0 * d->center(c)[1]));
}

TEST_CASE("d_pm raises and lowers grade") {
  const auto d = box(2, 6);
  const Index c = middle(*d);
  const GradedField e = linear_field(d, 0, 0b010);  // x0 e1
  const GradedField plus = d_pm(e, DiracPart::plus);
  CHECK(plus.grade_support() == std::vector<int>{2});
  CHECK(plus.coeffs()(0b011, c) == Complex(1.0));
  CHECK(max_norm(d_pm(e, DiracPart::minus)) == 0.0);
  const GradedField f = linear_field(d, 1, 0b010);  // x1 e1: e1 . e1 = -1
  CHECK(d_pm(f, DiracPart::minus).coeffs()(0, c) == Complex(-1.0));
  CHECK(max_norm(d_pm(f, DiracPart::plus)) == 0.0);
}

TEST_CASE("d_pm needs a single-grade field") {
  const auto d = box(2, 4);
  CHECK_THROWS_AS(d_pm(GradedField(d, {1, 2}), DiracPart::plus), GradeError);
}

TEST_CASE("helmholtz of a constant is alpha^2 times it") {
  const auto d = box(2, 6);
  const Complex a(0.3, 0.7);
  const GradedField f = sample(d, [](const Point&) { return Mv::blade(4, 0b101, 2.0); }, {2});
  const GradedField h = helmholtz(f, a);
  CHECK(std::abs(h.coeffs()(0b101, middle(*d)) - 2.0 * a * a) < 1e-14);
}

TEST_CASE("dirac squared is minus the wide Helmholtz operator") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int m : {1, 2, 3}) {
    const auto d = box(m, 7);
    GradedField f(d, all_grades(m + 2));
    for (Index k = 0; k < f.coeffs().size(); ++k) f.coeffs().data()[k] = Complex(u(rng), u(rng));
    const Complex a(u(rng), u(rng));
    GradedField sum = dirac(dirac(f, a, Side::left), a, Side::left);
    sum += helmholtz(f, a);
    CHECK(max_norm(sum) <= 1e-12 * max_norm(helmholtz(f, a)));
  }
}

TEST_CASE("too small a lattice has no stencil interior") {
  const auto d = box(2, 2);
  CHECK_THROWS_AS(helmholtz(GradedField(d, {0}), 1.0), DomainError);
}

TEST_CASE("sample rejects values outside the declared grades") {
  const auto d = box(2, 3);
  CHECK_THROWS_AS(sample(d, [](const Point&) { return Mv::blade(4, 0b11); }, {1}), GradeError);
}

TEST_CASE("arithmetic intersects validity") {
  const auto d = box(2, 5);
  GradedField a(d, {0});
  const GradedField b = dirac(a, 1.0, Side::left);
  a += project_grades(b, {0});
  CHECK(a.valid_cells().size() == 27u);
}
