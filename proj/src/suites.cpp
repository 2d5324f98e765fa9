#include "clifford/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "clifford/field_io.hpp"

namespace clifford {

namespace {

Check make_check(std::string name, double measured, double limit, std::string detail = {}) {
  return {std::move(name), measured, limit, measured <= limit, std::move(detail)};
}

// Ratio check: pass iff every ratio lies in [lo, hi]; measured is the worst
// distance from 4 relative to 4.
Check ratio_check(std::string name, const std::vector<double>& ratios, double lo, double hi) {
  std::string detail = "ratios";
  bool ok = !ratios.empty();
  double worst = 0.0;
  for (double r : ratios) {
    detail += " " + format_real(r);
    ok = ok && r >= lo && r <= hi;
    worst = std::max(worst, std::abs(r - 4.0) / 4.0);
  }
  return {std::move(name), worst, 0.25, ok, detail};
}

Complex uniform_complex(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double re = u(rng);
  return {re, u(rng)};
}

DomainPtr unit_box(int m, int n) { return std::make_shared<const VoxelDomain>(VoxelDomain::unit_box(m, n)); }

double rel(double num, double den) { return den > 0.0 ? num / den : num; }

}  // namespace

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string SuiteReport::table() const {
  std::string out = "suite " + suite + " (seed " + std::to_string(seed) + ")\n";
  for (const Check& c : checks) {
    char line[256];
    std::snprintf(line, sizeof(line), "  %-4s %-56s %-11.4g <= %-9.3g", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                  c.measured, c.limit);
    std::string text = line;
    if (!c.detail.empty()) text += "  " + c.detail;
    out += text.substr(0, text.find_last_not_of(' ') + 1);
    out += "\n";
  }
  return out;
}

std::string SuiteReport::csv() const {
  std::string out = "suite,seed,check,measured,limit,pass,detail\n";
  for (const Check& c : checks) {
    out += suite + "," + std::to_string(seed) + "," + c.name + "," + format_real(c.measured) + "," +
           format_real(c.limit) + "," + (c.pass ? "1" : "0") + "," + c.detail + "\n";
  }
  return out;
}

Mv random_mv(int dim, Rng& rng) {
  Mv out(dim);
  for (Index k = 0; k < out.size(); ++k) out.coeffs()[k] = uniform_complex(rng);
  return out;
}

GradedField random_component(const DomainPtr& domain, int s, Rng& rng) {
  GradedField out(domain, {s});
  const BladeMask top = generator(domain->m() + 1);
  for (Index c = 0; c < domain->cell_count(); ++c) {
    for (Index b = 0; b < out.coeffs().rows(); ++b) {
      const auto blade = static_cast<BladeMask>(b);
      if (grade(blade) == s && (blade & top) == 0) out.coeffs()(b, c) = uniform_complex(rng);
    }
  }
  return out;
}

GradedField random_field(const DomainPtr& domain, Rng& rng) {
  GradedField out(domain, all_grades(domain->algebra_dim()));
  for (Index c = 0; c < domain->cell_count(); ++c) {
    for (Index b = 0; b < out.coeffs().rows(); ++b) out.coeffs()(b, c) = uniform_complex(rng);
  }
  return out;
}

FieldFunction manufactured_bump(int m) {
  return [m](const Point& x) {
    const double u = 1.0 - (x.array() - 0.5).square().sum() / 0.16;
    const double phi = u > 0.0 ? u * u * u : 0.0;
    Mv v(m + 2);
    v[generator(0)] = phi;
    v[generator(m + 1)] = Complex(0.0, phi);
    return v;
  };
}

std::vector<Check> check_algebra(std::uint64_t seed) {
  Rng rng(seed);
  double assoc = 0.0, conj = 0.0, square = 0.0, anti = 0.0, split = 0.0;
  int count = 0;
  for (int m = 2; m <= 5; ++m) {
    const int dim = m + 2;
    for (int k = 0; k < 250; ++k) {
      const Mv a = random_mv(dim, rng), b = random_mv(dim, rng), c = random_mv(dim, rng);
      count += 3;
      const Mv left = (a * b) * c;
      assoc = std::max(assoc, rel(norm_inf(left - a * (b * c)), norm_inf(left)));
      const Mv ab = a * b;
      conj = std::max(conj, rel(norm_inf(conjugate(ab) - conjugate(b) * conjugate(a)), norm_inf(ab)));
      Mv sum(dim);
      for (int s = 0; s <= dim; ++s) sum += grade_project(a, s);
      split = std::max(split, norm_inf(sum - a));
    }
    for (int i = 0; i < dim; ++i) {
      const Mv ei = Mv::blade(dim, generator(i));
      square = std::max(square, norm_inf(ei * ei + Mv::scalar(dim, 1.0)));
      for (int j = 0; j < dim; ++j) {
        if (i == j) continue;
        const Mv ej = Mv::blade(dim, generator(j));
        anti = std::max(anti, norm_inf(ei * ej + ej * ei));
      }
    }
  }
  const std::string n = std::to_string(count) + " multivectors, m = 2..5";
  return {make_check("associativity (relative)", assoc, 1e-10, n), make_check("e_i^2 = -1", square, 0.0),
          make_check("anticommutation e_i e_j = -e_j e_i", anti, 0.0), make_check("sum of grade parts", split, 0.0),
          make_check("conjugation anti-automorphism (relative)", conj, 1e-12)};
}

std::vector<Check> check_factorization(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Check> out;
  double identity = 0.0;
  for (int m : {2, 3}) {
    const Complex alpha = uniform_complex(rng);
    const GradedField f = random_field(unit_box(m, 9), rng);
    const GradedField helm = helmholtz(f, alpha);
    GradedField sum = dirac(dirac(f, alpha, Side::left), alpha, Side::left);
    sum += helm;
    identity = std::max(identity, rel(max_norm(sum), max_norm(helm)));
  }
  out.push_back(make_check("dirac(dirac F) + helmholtz F (relative)", identity, 1e-12));

  // (Delta_2h + alpha^2) against the analytic Laplacian of a Gaussian.
  const Complex alpha(0.0, 1.0);
  const double sigma = 0.15;
  auto gauss = [&](const Point& x) { return std::exp(-(x.array() - 0.5).square().sum() / (2 * sigma * sigma)); };
  std::vector<double> errors, hs;
  for (int n : {17, 21, 27, 33}) {
    const DomainPtr d = unit_box(2, n);
    const Mv shape = Mv::blade(4, generator(0)) + Mv::blade(4, 0b110, Complex(0.0, 1.0));
    const GradedField f = sample(d, [&](const Point& x) { return gauss(x) * shape; }, {1, 2});
    const GradedField exact = sample(
        d,
        [&](const Point& x) {
          const double r2 = (x.array() - 0.5).square().sum();
          const double lap = gauss(x) * (r2 / std::pow(sigma, 4) - 3.0 / (sigma * sigma));
          return (lap + alpha * alpha * gauss(x)) * shape;
        },
        {1, 2});
    GradedField diff = helmholtz(f, alpha);
    diff -= exact;
    errors.push_back(max_norm(diff));
    hs.push_back(d->h());
  }
  std::vector<double> ratios;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double p = std::log(errors[k] / errors[k + 1]) / std::log(hs[k] / hs[k + 1]);
    ratios.push_back(std::pow(2.0, p));
  }
  out.push_back(ratio_check("Gaussian Laplacian, ratio per h-halving (17..33)", ratios, 3.0, 5.0));
  return out;
}

std::vector<Check> check_system_equivalence(std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<SystemSpec> specs = {
      {2, 0, 0, 1, {0.0, 1.0}}, {3, 0, 0, 2, {0.5, 0.3}}, {3, 1, 0, 1, {1.0, 0.0}},
      {4, 2, 1, 2, {0.0, 2.0}}, {2, 1, 0, 0, {1.0, 0.0}}, {4, 0, 1, 2, {-0.7, 0.4}},
  };
  std::vector<Check> out;
  for (const SystemSpec& spec : specs) {
    const DomainPtr d = unit_box(spec.m, spec.m >= 4 ? 5 : 7);
    SolutionData f = make_solution(spec, d);
    for (auto& [slot, part] : f.components) part = random_component(d, slot.grade, rng);
    SourceData g = make_source(spec, d);
    for (auto& [slot, part] : g.components) part = random_component(d, slot.grade, rng);
    const SystemResidual r = system_residual(f, g);
    const std::string name = "system vs dirac decomposition (m=" + std::to_string(spec.m) + ",r=" +
                             std::to_string(spec.r) + ",p=" + std::to_string(spec.p) + ",q=" + std::to_string(spec.q) +
                             ")";
    out.push_back(make_check(name, std::max(r.route_gap, r.off_system) / std::max(1.0, r.max_abs()), 1e-12));
  }
  return out;
}

std::vector<Check> check_maxwell_identity(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Check> out;
  for (int m : {2, 3}) {
    const DomainPtr d = unit_box(m, 7);
    const EMPair pair{random_component(d, 1, rng), random_component(d, 2, rng), 1, uniform_complex(rng)};
    const MaxwellSource src = zero_maxwell_source(d, 1, pair.alpha);
    const MaxwellResidual r = maxwell_residual(pair, src);
    const std::string tag = " (m+1=" + std::to_string(m + 1) + ", r=1)";
    out.push_back(make_check("four Maxwell families vs dirac(M)" + tag, r.identity_gap / std::max(1.0, r.max_abs()),
                             1e-12));
    GradedField forms = assemble_M(pair);
    forms -= assemble_M_right(pair);
    out.push_back(make_check("two forms of M agree" + tag, max_norm(forms), 1e-14));
  }
  return out;
}

std::vector<Check> check_kernel() {
  std::vector<Check> out;
  const HelmholtzKernel k({3, {0.0, 1.0}, 1e-10});
  const double pi = std::acos(-1.0);
  double worst = 0.0;
  for (int i = 0; i <= 60; ++i) {
    const double r = 0.1 * std::pow(50.0, i / 60.0);
    const Complex exact = -std::exp(-r) / (4 * pi * r);
    worst = std::max(worst, std::abs(k.lambda(r) - exact) / std::abs(exact));
  }
  out.push_back(make_check("quadrature Lambda vs -exp(-r)/(4 pi r), r in [0.1,5]", worst, 1e-8));

  // Discrete left Dirac residual of E_alpha on the shell 0.8 <= |x| <= 1.2.
  std::vector<double> errors;
  for (double h : {0.1, 0.05, 0.025}) {
    const int n = static_cast<int>(std::ceil(1.3 / h)) + 2;
    const Point origin = Point::Constant(3, -0.5 * h);
    auto domain = std::make_shared<const VoxelDomain>(VoxelDomain::from_predicate(
        2, origin, h, {n, n, n}, [](const Point& x) { return x.norm() > 0.7 && x.norm() < 1.3; }));
    const GradedField e = sample(domain, [&](const Point& x) { return k.eval(x).combined; }, {1});
    const GradedField de = dirac(e, k.params().alpha, Side::left);
    std::vector<char> shell(de.valid_mask().size(), 0);
    for (Index c = 0; c < domain->cell_count(); ++c) {
      const double r = domain->center(c).norm();
      shell[static_cast<std::size_t>(c)] = (de.valid(c) && r >= 0.8 && r <= 1.2) ? 1 : 0;
    }
    errors.push_back(max_norm(de, shell));
  }
  out.push_back(ratio_check("dirac(E_alpha) on |x| ~ 1, ratio per h-halving",
                            {errors[0] / errors[1], errors[1] / errors[2]}, 3.0, 5.0));
  return out;
}

std::vector<Check> check_borel_pompeiu() {
  PotentialConfig cfg;
  cfg.kernel = {3, {0.0, 1.0}, 1e-10};
  std::vector<double> rels;
  std::string detail = "max_rel";
  for (int n : {16, 20, 24}) {
    rels.push_back(borel_pompeiu_residual(unit_box(2, n), manufactured_bump(2), cfg).max_rel);
    detail += " " + format_real(rels.back());
  }
  Check closure = make_check("Borel-Pompeiu closure at 24^3 (relative sup)", rels.back(), 0.05, detail);
  const bool decreasing = rels[0] > rels[1] && rels[1] > rels[2];
  Check monotone{"strictly decreasing over 16,20,24", decreasing ? 0.0 : 1.0, 0.0, decreasing, detail};
  return {closure, monotone};
}

std::vector<Check> check_round_trip() {
  const SystemSpec spec{2, 0, 0, 1, {0.0, 1.0}};
  PotentialConfig cfg;
  cfg.kernel = {3, spec.alpha, 1e-10};
  const DomainPtr d = unit_box(2, 24);
  const GradedField w = sample(d, manufactured_bump(2), {0, 1});
  GradedField dw = dirac(w, spec.alpha, Side::left);
  // W vanishes near the boundary, so d_alpha W extends by zero.
  dw.set_valid_mask(d->occupancy());
  const SourceData g = disassemble_source(dw, spec);
  const Obstruction p = compute_P(g, cfg);
  const Solvability s = solvability(p, 1e-2);
  const double scale = p.source_scale > 0.0 ? p.max_norm / p.source_scale : p.max_norm;
  std::vector<Check> out{make_check("||P|| / (||G|| diam) at 24^3", scale, 1e-2, "verdict " + verdict_name(s.verdict))};
  if (s.verdict == Verdict::case_a) {
    GradedField diff = assemble(build_solution(g, cfg, s.verdict));
    diff -= w;
    out.push_back(make_check("build_solution recovers W at 24^3 (relative sup)", max_norm(diff) / max_norm(w), 0.05));
  } else {
    out.push_back({"build_solution recovers W at 24^3 (relative sup)", 1.0, 0.05, false, "no case A verdict"});
  }
  return out;
}

std::vector<Check> check_plane_wave(std::uint64_t seed) {
  std::vector<Check> out;
  const Complex alpha(1.0, 0.0);
  const Complex i(0.0, 1.0);
  std::vector<double> errors;
  for (int n : {8, 16, 32}) {
    const DomainPtr d = unit_box(2, n);
    auto wave = [&](BladeMask b) {
      return [=](const Point& x) { return Mv::blade(4, b, std::exp(i * alpha * x[0])); };
    };
    const EMPair pair{sample(d, wave(0b010), {1}), sample(d, wave(0b011), {2}), 1, alpha};
    errors.push_back(maxwell_residual(pair, zero_maxwell_source(d, 1, alpha)).max_abs());
  }
  out.push_back(ratio_check("plane wave Maxwell residual, ratio per h-halving", {errors[0] / errors[1], errors[1] / errors[2]},
                            3.0, 5.0));

  // Random quadratic polynomial fields: central differences are exact.
  Rng rng(seed);
  const DomainPtr d = unit_box(2, 9);
  auto quadratic = [&](int s) {
    std::vector<std::pair<BladeMask, Eigen::Matrix<Complex, 10, 1>>> coeffs;
    for (BladeMask b = 0; b < 8; ++b) {
      if (grade(b) != s) continue;
      Eigen::Matrix<Complex, 10, 1> c;
      for (auto& v : c) v = uniform_complex(rng);
      coeffs.emplace_back(b, c);
    }
    return sample(
        d,
        [coeffs](const Point& x) {
          const double mono[10] = {1, x[0], x[1], x[2], x[0] * x[0], x[1] * x[1], x[2] * x[2],
                                   x[0] * x[1], x[0] * x[2], x[1] * x[2]};
          Mv v(4);
          for (const auto& [b, c] : coeffs) {
            for (int k = 0; k < 10; ++k) v[b] += c[k] * mono[k];
          }
          return v;
        },
        {s});
  };
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const EMPair pair{quadratic(1), quadratic(2), 1, alpha};
    const CurlReport c = curl_correspondence_check(pair);
    worst = std::max(worst, std::max(c.plus_error, c.minus_error) / std::max(1.0, c.scale));
  }
  out.push_back(make_check("curl correspondence on quadratic fields", worst, 1e-12));
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"algebra", "factorization", "kernel", "borel-pompeiu", "equivalence"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  SuiteReport out{name, seed, {}};
  auto append = [&](std::vector<Check> checks) {
    out.checks.insert(out.checks.end(), checks.begin(), checks.end());
  };
  if (name == "algebra") {
    append(check_algebra(seed));
  } else if (name == "factorization") {
    append(check_factorization(seed));
  } else if (name == "kernel") {
    append(check_kernel());
  } else if (name == "borel-pompeiu") {
    append(check_borel_pompeiu());
    append(check_round_trip());
  } else if (name == "equivalence") {
    append(check_system_equivalence(seed));
    append(check_maxwell_identity(seed));
    append(check_plane_wave(seed));
  } else {
    throw ConfigurationError("unknown suite '" + name + "'");
  }
  return out;
}

}  // namespace clifford
