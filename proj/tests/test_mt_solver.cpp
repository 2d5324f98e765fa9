#include <doctest.h>

#include <random>

#include "clifford/mt_solver.hpp"

using namespace clifford;

namespace {

DomainPtr box(int m, int n) { return std::make_shared<const VoxelDomain>(VoxelDomain::unit_box(m, n)); }

PotentialConfig config(const SystemSpec& spec) {
  PotentialConfig cfg;
  cfg.kernel = {spec.m + 1, spec.alpha, 1e-10};
  return cfg;
}

GradedField random_component(const DomainPtr& d, int s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  GradedField f(d, {s});
  const BladeMask top = generator(d->m() + 1);
  for (Index c = 0; c < d->cell_count(); ++c) {
    for (Index b = 0; b < f.coeffs().rows(); ++b) {
      if (grade(static_cast<BladeMask>(b)) == s && (b & top) == 0) f.coeffs()(b, c) = Complex(u(rng), u(rng));
    }
  }
  return f;
}

SolutionData random_solution(const SystemSpec& spec, const DomainPtr& d, std::mt19937_64& rng) {
  SolutionData f = make_solution(spec, d);
  for (auto& [slot, part] : f.components) part = random_component(d, slot.grade, rng);
  return f;
}

SourceData random_source(const SystemSpec& spec, const DomainPtr& d, std::mt19937_64& rng) {
  SourceData g = make_source(spec, d);
  for (auto& [slot, part] : g.components) part = random_component(d, slot.grade, rng);
  return g;
}

double sign(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

Slot plain(int s) { return {Family::plain, s}; }
Slot em1(int s) { return {Family::em1, s}; }

// The system written out equation by equation. `last_sign` is the exponent
// in the last equation's factor on d+ F^{r+2q}.
std::map<Slot, GradedField> written_out_system(const SolutionData& f, const SourceData& g, int last_sign) {
  const SystemSpec& s = f.spec;
  const int r = s.r, p = s.p, q = s.q, top = s.m + 1;
  const Complex a = s.alpha;
  auto F = [&](int k) {
    const Slot slot = k % 2 == r % 2 ? em1(k) : plain(k);
    return f.components.count(slot) ? f.components.at(slot) : GradedField(f.domain, {});
  };
  auto G = [&](const Slot& slot) { return g.components.count(slot) ? g.components.at(slot) : GradedField(f.domain, {slot.grade}); };
  auto dp = [](const GradedField& x) { return d_pm(x, DiracPart::plus); };
  auto dm = [](const GradedField& x) { return d_pm(x, DiracPart::minus); };
  std::map<Slot, GradedField> out;
  auto put = [&](const Slot& slot, GradedField lhs) {
    if (slot.grade < 0 || slot.grade > top) return;
    lhs.set_grade_support({slot.grade});
    lhs -= G(slot);
    out.emplace(slot, std::move(lhs));
  };
  put(plain(r + 2 * p), dm(F(r + 2 * p + 1)) - a * F(r + 2 * p));
  for (int j = p; j <= q - 1; ++j) {
    put(plain(r + 2 * j + 2), dp(F(r + 2 * j + 1)) + dm(F(r + 2 * j + 3)) - a * F(r + 2 * j + 2));
  }
  put(plain(r + 2 * q + 2), dp(F(r + 2 * q + 1)));
  put(em1(r + 2 * p - 1), dm(sign(r + 2 * p) * F(r + 2 * p)));
  for (int j = p; j <= q - 1; ++j) {
    put(em1(r + 2 * j + 1), dp(sign(r + 2 * j) * F(r + 2 * j)) + dm(sign(r + 2 * j + 2) * F(r + 2 * j + 2)) +
                                (a * sign(r + 2 * j + 1)) * F(r + 2 * j + 1));
  }
  put(em1(r + 2 * q + 1), dp(sign(last_sign) * F(r + 2 * q)) + (a * sign(r + 2 * q + 1)) * F(r + 2 * q + 1));
  return out;
}

double field_gap(const GradedField& a, const GradedField& b) {
  GradedField d = a;
  d -= b;
  return max_norm(d);
}

}  // namespace

TEST_CASE("validate_spec") {
  CHECK_NOTHROW(validate_spec({2, 0, 0, 1, {}}));
  CHECK_NOTHROW(validate_spec({3, 0, 0, 2, {}}));
  CHECK_THROWS_AS(validate_spec({2, 3, 0, 1, {}}), SpecError);
  try {
    validate_spec({2, 3, 2, 1, {}});
  } catch (const SpecError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("r + 2q <= m+2") != std::string::npos);
    CHECK(msg.find("0 <= p <= q") != std::string::npos);
  }
}

TEST_CASE("slots of the Moisil-Teodorescu system in R^3") {
  const SystemSpec spec{2, 0, 0, 1, {}};
  CHECK(solution_slots(spec) == std::vector<Slot>{plain(1), plain(3), em1(0), em1(2)});
  CHECK(source_slots(spec) == std::vector<Slot>{plain(0), plain(2), em1(1), em1(3)});
  CHECK(complement_slots(spec).empty());
  const SystemSpec maxwell{2, 1, 0, 0, {}};
  CHECK(complement_slots(maxwell) == std::vector<Slot>{plain(0), em1(3)});
}

TEST_CASE("e_{m+1} commutes with even blades and anticommutes with odd ones") {
  for (int m = 2; m <= 5; ++m) {
    for (int s = 0; s <= m + 1; ++s) CHECK(em1_commutation_sign(m, s) == sign(s));
  }
  CHECK_THROWS_AS(em1_commutation_sign(2, 4), GradeError);
}

TEST_CASE("assembly") {
  const SystemSpec spec{2, 0, 0, 1, {0.0, 1.0}};
  const auto d = box(2, 4);
  SourceData g = make_source(spec, d);
  CHECK(max_norm(assemble(g)) == 0.0);
  g.components.at(plain(0)) = sample(d, [](const Point&) { return Mv::scalar(4, 3.0); }, {0});
  const GradedField a = assemble(g);
  CHECK(a.value(5)[0] == Complex(3.0));
  CHECK(norm_inf(a.value(5) - Mv::scalar(4, 3.0)) == 0.0);

  std::mt19937_64 rng(1);
  const SourceData rs = random_source(spec, d, rng);
  const SourceData back = disassemble_source(assemble(rs), spec);
  for (const auto& [slot, part] : rs.components) CHECK(field_gap(back.components.at(slot), part) == 0.0);
  const SolutionData rf = random_solution(spec, d, rng);
  const SolutionData fback = disassemble_solution(assemble(rf), spec);
  for (const auto& [slot, part] : rf.components) CHECK(field_gap(fback.components.at(slot), part) == 0.0);

  // G^1 e3 with right multiplication: e1 e3 is the stored blade with sign +1.
  SourceData one = make_source(spec, d);
  one.components.at(em1(1)) = sample(d, [](const Point&) { return Mv::blade(4, 0b0010); }, {1});
  CHECK(assemble(one).value(0)[0b1010] == Complex(1.0));
  // e3 F^2 with left multiplication: e3 e0_1 = e0_1 e3 = e0_1_3.
  SolutionData two = make_solution(spec, d);
  two.components.at(em1(2)) = sample(d, [](const Point&) { return Mv::blade(4, 0b0011); }, {2});
  CHECK(assemble(two).value(0)[0b1011] == Complex(1.0));
}

TEST_CASE("mass outside the slots is a grade error") {
  const SystemSpec spec{2, 0, 0, 1, {}};
  const auto d = box(2, 3);
  const GradedField bad = sample(d, [](const Point&) { return Mv::blade(4, 0b0011); }, {2});
  CHECK_THROWS_AS(disassemble_solution(bad, spec), GradeError);
  SourceData g = make_source(spec, d);
  g.components.at(plain(0)) = sample(d, [](const Point&) { return Mv::blade(4, 0b1000); }, {1});
  CHECK_THROWS_AS(assemble(g), GradeError);
}

TEST_CASE("system residual: equations agree with the grade parts of d_alpha F - G") {
  std::mt19937_64 rng(2);
  for (const SystemSpec& spec : {SystemSpec{2, 0, 0, 1, {0.0, 1.0}}, SystemSpec{3, 0, 0, 2, {0.5, -0.2}},
                                 SystemSpec{3, 1, 0, 1, {1.0, 0.0}}, SystemSpec{4, 1, 1, 2, {0.0, 2.0}}}) {
    const auto d = box(spec.m, spec.m == 4 ? 5 : 6);
    const SystemResidual zero = system_residual(make_solution(spec, d), make_source(spec, d));
    CHECK(zero.max_abs() == 0.0);
    const SystemResidual r = system_residual(random_solution(spec, d, rng), random_source(spec, d, rng));
    CHECK(r.route_gap <= 1e-12 * r.max_abs());
    CHECK(r.off_system == 0.0);
  }
}

TEST_CASE("residual of a field against its own derivative vanishes") {
  const SystemSpec spec{3, 0, 0, 2, {0.3, 0.4}};
  const auto d = box(3, 6);
  std::mt19937_64 rng(3);
  const SolutionData f = random_solution(spec, d, rng);
  const SourceData g = disassemble_source(dirac(assemble(f), spec.alpha, Side::left), spec);
  CHECK(system_residual(f, g).max_abs() <= 1e-12);
}

TEST_CASE("equation by equation, the last sign is (-1)^(r+2q)") {
  std::mt19937_64 rng(4);
  for (const SystemSpec& spec : {SystemSpec{2, 0, 0, 1, {0.0, 1.0}}, SystemSpec{3, 1, 0, 1, {0.7, 0.1}},
                                 SystemSpec{4, 1, 0, 2, {0.0, 1.0}}}) {
    const auto d = box(spec.m, 5);
    const SolutionData f = random_solution(spec, d, rng);
    const SourceData g = random_source(spec, d, rng);
    const SystemResidual r = system_residual(f, g);
    const auto fixed = written_out_system(f, g, spec.r + 2 * spec.q);
    CHECK(fixed.size() == r.family_fields.size());
    for (const auto& [slot, field] : fixed) CHECK(field_gap(field, r.family_fields.at(slot)) <= 1e-12);

    const auto literal = written_out_system(f, g, 2 + 2 * spec.q);
    const Slot last = em1(spec.r + 2 * spec.q + 1);
    if (!literal.count(last)) continue;
    const double gap = field_gap(literal.at(last), r.family_fields.at(last));
    if (spec.r % 2 == 0) {
      CHECK(gap <= 1e-12);
    } else {
      CHECK(gap > 1.0);
    }
  }
}

TEST_CASE("P is the complementary part of the Teodorescu transform") {
  std::mt19937_64 rng(5);
  for (const SystemSpec& spec : {SystemSpec{2, 1, 0, 0, {0.0, 1.0}}, SystemSpec{2, 0, 0, 0, {1.0, 0.0}}}) {
    const auto d = box(2, 6);
    const SourceData g = random_source(spec, d, rng);
    const Obstruction p = compute_P(g, config(spec));
    const GradedField t = teodorescu(assemble(g), config(spec));
    CHECK_FALSE(p.parts.empty());
    for (const Slot& slot : complement_slots(spec)) {
      const GradedField direct = extract(t, slot, spec.m, Convention::left);
      CHECK(field_gap(p.parts.at(slot), direct) <= 1e-10 * std::max(1.0, max_norm(direct)));
    }
    // and nothing else is left outside the solution and complement slots
    GradedField rest = t;
    for (const Slot& slot : complement_slots(spec)) rest -= embed(extract(t, slot, spec.m, Convention::left), slot, spec.m, Convention::left);
    for (const Slot& slot : solution_slots(spec)) rest -= embed(extract(t, slot, spec.m, Convention::left), slot, spec.m, Convention::left);
    CHECK(max_norm(rest) <= 1e-12 * max_norm(t));
  }
}

TEST_CASE("source to P is linear") {
  const SystemSpec spec{2, 1, 0, 0, {0.0, 1.0}};
  const auto d = box(2, 5);
  std::mt19937_64 rng(6);
  const SourceData a = random_source(spec, d, rng), b = random_source(spec, d, rng);
  SourceData sum = a;
  for (auto& [slot, part] : sum.components) part = Complex(2.0, -1.0) * part + b.components.at(slot);
  const Obstruction pa = compute_P(a, config(spec)), pb = compute_P(b, config(spec)), ps = compute_P(sum, config(spec));
  GradedField combo = Complex(2.0, -1.0) * pa.field;
  combo += pb.field;
  CHECK(field_gap(ps.field, combo) <= 1e-12 * max_norm(ps.field));
}

TEST_CASE("P term by term, with the e_{m+1}-wedge term signed by (-1)^r") {
  std::mt19937_64 rng(7);
  for (const SystemSpec& spec : {SystemSpec{3, 1, 0, 0, {0.0, 1.0}}, SystemSpec{3, 2, 0, 0, {0.0, 1.0}}}) {
    const auto d = box(3, 5);
    const SourceData g = random_source(spec, d, rng);
    const PotentialConfig cfg = config(spec);
    const int r = spec.r, p = spec.p, q = spec.q, m = spec.m;
    auto comp = [&](const Slot& slot) {
      return g.components.count(slot) ? g.components.at(slot) : GradedField(d, {slot.grade});
    };
    auto e1 = [&](const Slot& slot, int target) {
      return extract(volume_potential(comp(slot), cfg, KernelPart::e1, d->occupancy()), plain(target), m, Convention::left);
    };
    auto e2 = [&](const Slot& slot) { return volume_potential(comp(slot), cfg, KernelPart::e2, d->occupancy()); };
    auto in = [&](int s) { return s >= 0 && s <= m + 1; };

    const Obstruction got = compute_P(g, cfg);
    const int low = r + 2 * p - 1, high = r + 2 * q + 3, elow = r + 2 * p - 2, ehigh = r + 2 * q + 2;
    if (in(low)) {
      GradedField want = e1(plain(r + 2 * p), low) + sign(r + 2 * p) * project_grades(e2(em1(r + 2 * p - 1)), {low});
      CHECK(field_gap(got.parts.at(plain(low)), want) <= 1e-12);
    }
    if (in(high)) CHECK(field_gap(got.parts.at(plain(high)), e1(plain(r + 2 * q + 2), high)) <= 1e-12);
    if (in(elow)) {
      CHECK(field_gap(got.parts.at(em1(elow)), sign(r + 2 * p) * e1(em1(r + 2 * p - 1), elow)) <= 1e-12);
    }
    if (in(ehigh)) {
      const GradedField wedge = e1(em1(r + 2 * q + 1), ehigh);
      const GradedField e2_part = project_grades(e2(plain(r + 2 * q + 2)), {ehigh});
      const GradedField unsigned_wedge = wedge + e2_part;
      const GradedField corrected = sign(r) * wedge + e2_part;
      CHECK(field_gap(got.parts.at(em1(ehigh)), corrected) <= 1e-12);
      if (r % 2 == 0) {
        CHECK(field_gap(got.parts.at(em1(ehigh)), unsigned_wedge) <= 1e-12);
      } else {
        CHECK(field_gap(got.parts.at(em1(ehigh)), unsigned_wedge) > 1e-3);
      }
    }
  }
}

TEST_CASE("solution term by term, same wedge sign") {
  std::mt19937_64 rng(8);
  const SystemSpec spec{3, 1, 0, 1, {0.0, 1.0}};
  const auto d = box(3, 5);
  const SourceData g = random_source(spec, d, rng);
  const PotentialConfig cfg = config(spec);
  const int r = spec.r, m = spec.m;
  auto comp = [&](const Slot& slot) {
    return g.components.count(slot) ? g.components.at(slot) : GradedField(d, {slot.grade});
  };
  auto e1 = [&](const Slot& slot, int target) {
    return extract(volume_potential(comp(slot), cfg, KernelPart::e1, d->occupancy()), plain(target), m, Convention::left);
  };
  auto e2 = [&](const Slot& slot, int target) {
    return project_grades(volume_potential(comp(slot), cfg, KernelPart::e2, d->occupancy()), {target});
  };
  auto in = [&](int s) { return s >= 0 && s <= m + 1; };
  const SolutionData f = build_solution(g, cfg, Verdict::case_a);
  for (int j = spec.p; j <= spec.q; ++j) {
    const int a = r + 2 * j + 1, b = r + 2 * j;
    GradedField fa = e1(plain(r + 2 * j), a);
    if (in(r + 2 * j + 2)) fa += e1(plain(r + 2 * j + 2), a);
    fa += sign(r + 2 * j + 2) * e2(em1(r + 2 * j + 1), a);
    CHECK(field_gap(f.components.at(plain(a)), fa) <= 1e-12);

    GradedField fb = e2(plain(r + 2 * j), b);
    if (in(r + 2 * j - 1)) fb += sign(r) * e1(em1(r + 2 * j - 1), b);
    if (in(r + 2 * j + 1)) fb += sign(r + 2 * j + 2) * e1(em1(r + 2 * j + 1), b);
    CHECK(field_gap(f.components.at(em1(b)), fb) <= 1e-12);
  }
}

TEST_CASE("solvability verdicts") {
  const SystemSpec spec{2, 0, 0, 0, {0.0, 1.0}};
  const auto d = box(2, 6);
  const Obstruction zero = compute_P(make_source(spec, d), config(spec));
  CHECK(solvability(zero, 1e-2).verdict == Verdict::case_a);

  SourceData g = make_source(spec, d);
  g.components.at(plain(2)) = sample(d, [](const Point&) { return Mv::blade(4, 0b011); }, {2});
  const Obstruction p = compute_P(g, config(spec));
  CHECK(p.max_norm > 1e-2 * p.source_scale);
  CHECK(solvability(p, 1e-2).verdict == Verdict::inconclusive);
  CHECK_THROWS_AS(build_solution(g, config(spec), Verdict::inconclusive), Error);
  CHECK_THROWS_AS(build_solution(g, config(spec), Verdict::case_b), Error);
}

TEST_CASE("zero source returns the monogenic addition") {
  const SystemSpec spec{2, 0, 0, 1, {0.0, 1.0}};
  const auto d = box(2, 5);
  std::mt19937_64 rng(9);
  const GradedField hat = assemble(random_solution(spec, d, rng));
  const SolutionData f = build_solution(make_source(spec, d), config(spec), Verdict::case_a, &hat);
  CHECK(field_gap(assemble(f), hat) == 0.0);
}

TEST_CASE("verify_pair rejects fields outside their slots") {
  const SystemSpec spec{2, 1, 0, 0, {0.0, 1.0}};
  const auto d = box(2, 6);
  const GradedField f1 = sample(d, [](const Point&) { return Mv::blade(4, 0b011); }, {2});
  const GradedField f2 = sample(d, [](const Point&) { return Mv::scalar(4, 1.0); }, {0});
  CHECK_NOTHROW(verify_pair(f1, f2, spec));
  CHECK_THROWS_AS(verify_pair(f2, f1, spec), GradeError);
  CHECK_THROWS_AS(verify_pair(f1 + f2, f2, spec), GradeError);
}

TEST_CASE("case B: a field that does not vanish on the boundary") {
  // W = exp(x0) e_0_1 + e_3 sin(x1) e_2 in the (2, 1, 0, 0) subspace. Its Cauchy
  // integral splits into a solution-slot part and a complement part, and the
  // complement part cancels the obstruction.
  const SystemSpec spec{2, 1, 0, 0, {0.0, 1.0}};
  const int n = 12;
  const double h = 1.0 / n;
  const auto d = box(2, n);
  const FieldFunction w = [](const Point& x) {
    Mv out(4);
    out[0b0011] = std::exp(x[0]);
    out[0b1100] = -std::sin(x[1]);  // e3 e2 = -e2_3
    return out;
  };
  Point origin = Point::Constant(3, -h);
  const auto big = std::make_shared<const VoxelDomain>(VoxelDomain::box(2, origin, h, {n + 2, n + 2, n + 2}));
  const GradedField dw_big = dirac(sample(big, w, {2, 3}), spec.alpha, Side::left);
  GradedField dw(d, {1, 2, 3, 4});
  for (Index c = 0; c < d->cell_count(); ++c) {
    auto xyz = d->coords(c);
    for (int& v : xyz) ++v;
    dw.coeffs().col(c) = dw_big.coeffs().col(big->linear(xyz));
  }
  const SourceData g = disassemble_source(dw, spec, 1e-10);
  const PotentialConfig cfg = config(spec);
  const Obstruction p = compute_P(g, cfg);
  CHECK(solvability(p, 1e-2).verdict == Verdict::inconclusive);

  const GradedField c = cauchy(boundary_trace(d, w), cfg, d->occupancy());
  GradedField tilde(d, {}), f2(d, {});
  for (const Slot& s : solution_slots(spec)) tilde += embed(extract(c, s, 2, Convention::left), s, 2, Convention::left);
  for (const Slot& s : complement_slots(spec)) f2 += embed(extract(c, s, 2, Convention::left), s, 2, Convention::left);
  const double gap = field_gap(f2, -1.0 * p.field) / max_norm(f2);
  MESSAGE("complement gap " << gap);
  CHECK(gap < 0.1);

  const PairOptions opts{0.2, 0.25};
  const Solvability sv = solvability(p, 1e-2, &tilde, opts);
  REQUIRE(sv.pair);
  MESSAGE("pair " << sv.pair->helmholtz_f1 << " " << sv.pair->helmholtz_f2 << " " << sv.pair->dirac);
  CHECK(sv.verdict == Verdict::case_b);

  const SolutionData f = build_solution(g, cfg, Verdict::case_b, nullptr, &tilde);
  const GradedField exact = sample(d, w, {2, 3});
  const auto inner = margin_mask(exact, 0.25);
  GradedField diff = assemble(f);
  diff -= exact;
  const double rel = max_norm(diff, inner) / max_norm(exact, inner);
  MESSAGE("recovery " << rel);
  CHECK(rel < 0.05);
}
