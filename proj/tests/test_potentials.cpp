#include <doctest.h>

#include <random>

#include "clifford/potentials.hpp"

using namespace clifford;

namespace {

DomainPtr box(int n) { return std::make_shared<const VoxelDomain>(VoxelDomain::unit_box(2, n)); }

PotentialConfig config() {
  PotentialConfig cfg;
  cfg.kernel = {3, {0.0, 1.0}, 1e-10};
  return cfg;
}

GradedField random_field(const DomainPtr& d, std::vector<int> grades, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  GradedField f(d, grades);
  for (Index c = 0; c < d->cell_count(); ++c) {
    for (Index b = 0; b < f.coeffs().rows(); ++b) {
      const int g = grade(static_cast<BladeMask>(b));
      if (std::find(grades.begin(), grades.end(), g) != grades.end()) f.coeffs()(b, c) = Complex(u(rng), u(rng));
    }
  }
  return f;
}

// pi(x) = (1 - |x - c|^2 / R^2)^3 e0 + i (same) e3
Mv bump(const Point& x) {
  const double u = 1.0 - (x.array() - 0.5).square().sum() / 0.16;
  const double p = u > 0 ? u * u * u : 0.0;
  Mv v(4);
  v[0b0001] = p;
  v[0b1000] = Complex(0.0, p);
  return v;
}

}  // namespace

TEST_CASE("Teodorescu transform of zero is zero") {
  const auto d = box(6);
  CHECK(max_norm(teodorescu(GradedField(d, {1}), config())) == 0.0);
}

TEST_CASE("lattice engine matches the direct sum") {
  const auto d = box(6);
  const GradedField f = random_field(d, {1, 2}, 3);
  const GradedField t = teodorescu(f, config());
  std::vector<Point> centers;
  for (Index c : {Index{0}, Index{43}, Index{215}}) centers.push_back(d->center(c));
  const auto direct = teodorescu_at(f, config(), centers);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const Index c = std::vector<Index>{0, 43, 215}[k];
    CHECK(norm_inf(t.value(c) - direct[k]) <= 1e-12 * norm_inf(direct[k]));
  }
}

TEST_CASE("direct sum at an outside point") {
  const auto d = box(4);
  const GradedField f = random_field(d, {0}, 5);
  Point x(3);
  x << 1.7, 0.2, -0.3;
  const auto got = teodorescu_at(f, config(), {x});
  Mv want(4);
  for (Index c = 0; c < d->cell_count(); ++c) {
    want += eval_kernel(x - d->center(c), config().kernel).combined * f.value(c);
  }
  want *= d->cell_volume();
  CHECK(norm_inf(got[0] - want) <= 1e-13 * norm_inf(want));
}

TEST_CASE("the kernel splits into E1 and e3 E2") {
  const auto d = box(5);
  const GradedField f = random_field(d, {1}, 9);
  const PotentialConfig cfg = config();
  const auto& mask = d->occupancy();
  GradedField parts = volume_potential(f, cfg, KernelPart::e1, mask);
  parts += left_multiply(Mv::blade(4, 0b1000), volume_potential(f, cfg, KernelPart::e2, mask));
  parts -= teodorescu(f, cfg);
  CHECK(max_norm(parts) <= 1e-13);
}

TEST_CASE("Cauchy operator refuses points on the boundary") {
  const auto d = box(4);
  const BoundaryData data = boundary_trace(d, bump);
  Point on(3);
  on << 0.0, 0.3, 0.6;
  CHECK_THROWS_AS(cauchy_at(data, config(), {on}), OnBoundaryError);
}

TEST_CASE("lattice and pointwise Cauchy agree") {
  const auto d = box(6);
  const BoundaryData data = boundary_trace(d, [](const Point& x) { return Mv::blade(4, 0b0011, x[0] + 2.0 * x[2]); });
  const GradedField c = cauchy(data, config(), d->occupancy());
  const auto direct = cauchy_at(data, config(), {d->center(100)});
  CHECK(norm_inf(c.value(100) - direct[0]) <= 1e-12 * norm_inf(direct[0]));
  CHECK(max_norm(cauchy(zero_boundary_data(d), config(), d->occupancy())) == 0.0);
}

TEST_CASE("Borel-Pompeiu closes for a compact bump") {
  const ResidualReport r = borel_pompeiu_residual(box(12), bump, config());
  CHECK(r.max_rel < 0.2);
  PotentialConfig refined = config();
  refined.singular_cell_policy = SingularCellPolicy::refine;
  refined.refinement_depth = 1;
  CHECK(borel_pompeiu_residual(box(12), bump, refined).max_rel < 0.2);
}

TEST_CASE("Cauchy reproduces a monogenic field away from the boundary") {
  // E_alpha(x - y0) with y0 outside the box is alpha-monogenic inside.
  Point y0(3);
  y0 << -0.4, 0.5, 0.5;
  const KernelParams params = config().kernel;
  const FieldFunction w = [&](const Point& x) { return eval_kernel(x - y0, params).combined; };
  const ResidualReport near = borel_pompeiu_residual(box(16), w, config(), 0.0);
  const ResidualReport inside = borel_pompeiu_residual(box(16), w, config(), 0.25);
  CHECK(inside.max_rel < 0.05);
  CHECK(inside.max_abs <= near.max_abs);
}

TEST_CASE("dimension mismatch is a configuration error") {
  PotentialConfig cfg = config();
  cfg.kernel.n = 4;
  CHECK_THROWS_AS(teodorescu(GradedField(box(3), {0}), cfg), ConfigurationError);
}
