#include "clifford/maxwell.hpp"

#include <algorithm>
#include <cmath>

namespace clifford {

namespace {

const Complex kI{0.0, 1.0};

double parity(int s) { return (s % 2 == 0) ? 1.0 : -1.0; }

// i (-1)^(r+1): the factor between M's e_{m+1} E part and E.
Complex em1_factor(int r) { return kI * parity(r + 1); }

bool grade_ok(int m, int s) { return s >= 0 && s <= m + 1; }

GradedField or_zero(const std::map<int, GradedField>& g, int s, const DomainPtr& domain) {
  auto it = g.find(s);
  return it != g.end() ? it->second : GradedField(domain, {s});
}

void require_3d(const GradedField& f) {
  if (f.domain().m() != 2) throw ConfigurationError("curl correspondence needs m+1 = 3");
}

}  // namespace

EMPair make_pair(const DomainPtr& domain, int r, Complex alpha) {
  return {GradedField(domain, {r}), GradedField(domain, {r + 1}), r, alpha};
}

void check_pair(const EMPair& pair) {
  const int m = pair.E.domain().m();
  if (pair.r < 0 || pair.r > m + 1) throw ConfigurationError("Maxwell pair needs 0 <= r <= m+1");
  if (!pair.E.domain().same_lattice(pair.H.domain())) throw ConfigurationError("E and H live on different lattices");
  embed(pair.E, {Family::em1, pair.r}, m, Convention::left);
  if (pair.r + 1 <= m + 1) {
    embed(pair.H, {Family::plain, pair.r + 1}, m, Convention::left);
  } else if (max_norm(pair.H) > 0.0) {
    throw GradeError("H must vanish when r = m+1");
  }
}

SystemSpec maxwell_spec(int m, int r, Complex alpha) {
  if (r < 0 || r > m + 1) throw SpecError("Maxwell systems need 0 <= r <= m+1, got r = " + std::to_string(r));
  const SystemSpec spec{m, r, 0, 0, alpha};
  validate_spec(spec);
  return spec;
}

GradedField assemble_M(const EMPair& pair) {
  check_pair(pair);
  const int m = pair.E.domain().m();
  GradedField out = embed(pair.E, {Family::em1, pair.r}, m, Convention::left);
  out *= -kI;
  if (pair.r + 1 <= m + 1) out += pair.H;
  return out;
}

GradedField assemble_M_right(const EMPair& pair) {
  check_pair(pair);
  const int m = pair.E.domain().m();
  GradedField out = embed(pair.E, {Family::em1, pair.r}, m, Convention::right);
  out *= em1_factor(pair.r);
  if (pair.r + 1 <= m + 1) out += pair.H;
  return out;
}

EMPair extract_EH(const GradedField& m_field, int r, Complex alpha) {
  const int m = m_field.domain().m();
  if (r < 0 || r > m + 1) throw ConfigurationError("Maxwell pair needs 0 <= r <= m+1");
  EMPair out{extract(m_field, {Family::em1, r}, m, Convention::left), GradedField(m_field.domain_ptr(), {r + 1}), r,
             alpha};
  out.E *= kI;
  if (r + 1 <= m + 1) out.H = extract(m_field, {Family::plain, r + 1}, m, Convention::left);
  GradedField rest = m_field;
  rest -= assemble_M(out);
  if (max_norm(rest) > 1e-12 * std::max(1.0, max_norm(m_field))) {
    throw GradeError("field is not of the form H - i e_{m+1} E");
  }
  return out;
}

MaxwellSource zero_maxwell_source(const DomainPtr& domain, int r, Complex alpha) {
  MaxwellSource out{domain, r, alpha, {}};
  for (int s = r - 1; s <= r + 2; ++s) {
    if (grade_ok(domain->m(), s)) out.g.emplace(s, GradedField(domain, {s}));
  }
  return out;
}

SourceData to_source_data(const MaxwellSource& source) {
  const SystemSpec spec = maxwell_spec(source.domain->m(), source.r, source.alpha);
  SourceData out{spec, source.domain, {}};
  const auto slots = source_slots(spec);
  for (const auto& [s, g] : source.g) {
    if (s < source.r - 1 || s > source.r + 2) throw GradeError("Maxwell source grade out of range r-1..r+2");
    const bool em1 = (s - source.r) % 2 != 0;
    const Slot slot{em1 ? Family::em1 : Family::plain, s};
    if (std::find(slots.begin(), slots.end(), slot) == slots.end()) {
      if (max_norm(g) > 0.0) throw GradeError("Maxwell source grade " + std::to_string(s) + " does not exist here");
      continue;
    }
    GradedField part = g;
    if (em1) part *= em1_factor(source.r);
    out.components.emplace(slot, std::move(part));
  }
  return out;
}

MaxwellSource from_source_data(const SourceData& source) {
  if (source.spec.p != 0 || source.spec.q != 0) throw SpecError("Maxwell sources need p = q = 0");
  MaxwellSource out{source.domain, source.spec.r, source.spec.alpha, {}};
  for (const auto& [slot, g] : source.components) {
    GradedField part = g;
    if (slot.family == Family::em1) part *= 1.0 / em1_factor(source.spec.r);
    out.g.emplace(slot.grade, std::move(part));
  }
  return out;
}

double MaxwellResidual::max_abs() const {
  double out = 0.0;
  for (const auto& e : equations) out = std::max(out, e.max_abs);
  return out;
}

MaxwellResidual maxwell_residual(const EMPair& pair, const MaxwellSource& source) {
  check_pair(pair);
  if (pair.r != source.r || pair.alpha != source.alpha) throw SpecError("pair and source differ in r or alpha");
  if (!pair.E.domain().same_lattice(*source.domain)) throw ConfigurationError("pair and source lattices differ");
  const DomainPtr& domain = pair.E.domain_ptr();
  const int m = domain->m();
  const int r = pair.r;
  const Complex a = pair.alpha;

  MaxwellResidual out;
  auto add = [&](const std::string& name, int s, GradedField field) {
    if (!grade_ok(m, s)) return;
    field.set_grade_support({s});
    field -= or_zero(source.g, s, domain);
    out.equations.push_back({name, s, max_norm(field), l2_norm(field)});
    out.fields.emplace(s, std::move(field));
  };
  const GradedField h = pair.H;
  add("dplus_E_minus_i_alpha_H", r + 1, d_pm(pair.E, DiracPart::plus) - (kI * a) * h);
  add("dminus_E", r - 1, d_pm(pair.E, DiracPart::minus));
  add("dminus_H_plus_i_alpha_E", r, d_pm(h, DiracPart::minus) + (kI * a) * pair.E);
  add("dplus_H", r + 2, d_pm(h, DiracPart::plus));

  // Same quantities read off d_alpha M - G.
  const SourceData g = to_source_data(source);
  GradedField residual = dirac(assemble_M(pair), a, Side::left);
  residual -= assemble(g);
  for (const auto& [s, field] : out.fields) {
    const bool em1 = (s - r) % 2 != 0;
    GradedField projected = extract(residual, {em1 ? Family::em1 : Family::plain, s}, m, Convention::right);
    if (em1) projected *= 1.0 / em1_factor(r);
    projected -= field;
    out.identity_gap = std::max(out.identity_gap, max_norm(projected));
  }
  return out;
}

MaxwellSolution solve_maxwell(const MaxwellSource& source, const PotentialConfig& cfg, double tol,
                              const GradedField* hat_h1, const GradedField* tilde_h1, const PairOptions& opts) {
  const SourceData data = to_source_data(source);
  MaxwellSolution out{compute_P(data, cfg), {}, std::nullopt, std::nullopt, std::nullopt};
  out.solvability = solvability(out.P, tol, tilde_h1, opts);
  if (out.solvability.verdict == Verdict::inconclusive) return out;
  out.solution = build_solution(data, cfg, out.solvability.verdict, hat_h1, tilde_h1);
  out.M = assemble(*out.solution);
  out.pair = extract_EH(*out.M, source.r, source.alpha);
  return out;
}

GradedField vector_to_bivector(const GradedField& v) {
  require_3d(v);
  GradedField out(v.domain_ptr(), {2});
  out.set_valid_mask(v.valid_mask());
  out.coeffs().row(0b011) = v.coeffs().row(0b100);
  out.coeffs().row(0b101) = -v.coeffs().row(0b010);
  out.coeffs().row(0b110) = v.coeffs().row(0b001);
  return out;
}

GradedField bivector_to_vector(const GradedField& b) {
  require_3d(b);
  GradedField out(b.domain_ptr(), {1});
  out.set_valid_mask(b.valid_mask());
  out.coeffs().row(0b100) = b.coeffs().row(0b011);
  out.coeffs().row(0b010) = -b.coeffs().row(0b101);
  out.coeffs().row(0b001) = b.coeffs().row(0b110);
  return out;
}

GradedField classical_curl(const GradedField& v) {
  require_3d(v);
  const VoxelDomain& d = v.domain();
  GradedField out(v.domain_ptr(), {1});
  std::vector<char> mask(v.valid_mask().size(), 0);
  const double inv2h = 1.0 / (2.0 * d.h());
  auto comp = [&](Index cell, int k) { return v.coeffs()(generator(k), cell); };
  for (Index c = 0; c < d.cell_count(); ++c) {
    if (!v.valid(c)) continue;
    Index plus[3], minus[3];
    bool ok = true;
    for (int axis = 0; axis < 3; ++axis) {
      plus[axis] = d.neighbor(c, axis, 1);
      minus[axis] = d.neighbor(c, axis, -1);
      ok = ok && plus[axis] >= 0 && minus[axis] >= 0 && v.valid(plus[axis]) && v.valid(minus[axis]);
    }
    if (!ok) continue;
    mask[static_cast<std::size_t>(c)] = 1;
    auto D = [&](int axis, int k) { return (comp(plus[axis], k) - comp(minus[axis], k)) * inv2h; };
    out.coeffs()(generator(0), c) = D(1, 2) - D(2, 1);
    out.coeffs()(generator(1), c) = D(2, 0) - D(0, 2);
    out.coeffs()(generator(2), c) = D(0, 1) - D(1, 0);
  }
  out.set_valid_mask(std::move(mask));
  return out;
}

CurlReport curl_correspondence_check(const EMPair& pair) {
  check_pair(pair);
  require_3d(pair.E);
  if (pair.r != 1) throw ConfigurationError("curl correspondence needs r = 1");
  CurlReport out;
  GradedField plus = d_pm(pair.E, DiracPart::plus);
  plus -= vector_to_bivector(classical_curl(pair.E));
  out.plus_error = max_norm(plus);
  GradedField minus = d_pm(pair.H, DiracPart::minus);
  minus -= classical_curl(bivector_to_vector(pair.H));
  out.minus_error = max_norm(minus);
  out.scale = std::max(max_norm(pair.E), max_norm(pair.H));
  return out;
}

}  // namespace clifford
