#include "clifford/mt_solver.hpp"

#include <algorithm>
#include <cmath>

namespace clifford {

namespace {

BladeMask top_blade(int m) { return generator(m + 1); }

bool in_range(const SystemSpec& spec, int s) { return s >= 0 && s <= spec.m + 1; }

// Coefficient sign with which embed() places component blade S in the algebra.
int embed_sign(BladeMask s, const Slot& slot, int m, Convention convention) {
  if (slot.family == Family::plain) return 1;
  const BladeTable& table = blade_table(m + 2);
  return convention == Convention::left ? table.sign(top_blade(m), s) : table.sign(s, top_blade(m));
}

bool component_blade(BladeMask b, int s, int m) { return grade(b) == s && (b & top_blade(m)) == 0; }

void check_component(const GradedField& c, int s, int m) {
  double off = 0.0;
  for (Index b = 0; b < c.coeffs().rows(); ++b) {
    if (component_blade(static_cast<BladeMask>(b), s, m)) continue;
    for (Index cell = 0; cell < c.domain().cell_count(); ++cell) {
      if (c.valid(cell)) off = std::max(off, std::abs(c.coeffs()(b, cell)));
    }
  }
  if (off > 1e-12 * std::max(1.0, max_norm(c))) {
    throw GradeError("component is not a pure grade-" + std::to_string(s) + " field in e_0..e_m");
  }
}

GradedField zero_field(const DomainPtr& domain, std::vector<int> support) { return GradedField(domain, std::move(support)); }

// Splits a full field onto the given slots; throws GradeError when anything
// beyond tol * scale is left over.
std::map<Slot, GradedField> decompose(const GradedField& field, const std::vector<Slot>& slots, int m,
                                      Convention convention, double tol) {
  std::map<Slot, GradedField> out;
  GradedField rest = field;
  for (const Slot& slot : slots) {
    GradedField part = extract(field, slot, m, convention);
    rest -= embed(part, slot, m, convention);
    out.emplace(slot, std::move(part));
  }
  const double leftover = max_norm(rest);
  if (leftover > tol * std::max(1.0, max_norm(field))) {
    throw GradeError("field has components outside the expected slots (" + std::to_string(leftover) + ")");
  }
  return out;
}

GradedField assemble_slots(const DomainPtr& domain, const std::map<Slot, GradedField>& parts, int m,
                           Convention convention) {
  GradedField out = zero_field(domain, {});
  for (const auto& [slot, part] : parts) out += embed(part, slot, m, convention);
  return out;
}

void require_slot(const std::vector<Slot>& slots, const Slot& slot) {
  if (std::find(slots.begin(), slots.end(), slot) == slots.end()) {
    throw GradeError("slot " + slot_name(slot) + " is not part of this system");
  }
}

}  // namespace

std::string slot_name(const Slot& slot) {
  return (slot.family == Family::plain ? "plain_" : "em1_") + std::to_string(slot.grade);
}

void validate_spec(const SystemSpec& spec) {
  std::string problems;
  auto fail = [&](const std::string& what) { problems += (problems.empty() ? "" : "; ") + what; };
  if (spec.m < 2) fail("m >= 2");
  if (spec.r < 0 || spec.r > spec.m + 2) fail("0 <= r <= m+2");
  if (spec.p < 0 || spec.p > spec.q) fail("0 <= p <= q");
  if (spec.r + 2 * spec.q > spec.m + 2) fail("r + 2q <= m+2");
  if (!problems.empty()) throw SpecError("invalid system spec, violated: " + problems);
}

std::vector<Slot> solution_slots(const SystemSpec& spec) {
  std::vector<Slot> out;
  for (int j = spec.p; j <= spec.q; ++j) {
    if (in_range(spec, spec.r + 2 * j + 1)) out.push_back({Family::plain, spec.r + 2 * j + 1});
    if (in_range(spec, spec.r + 2 * j)) out.push_back({Family::em1, spec.r + 2 * j});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Slot> source_slots(const SystemSpec& spec) {
  std::vector<Slot> out;
  for (int j = spec.p; j <= spec.q + 1; ++j) {
    if (in_range(spec, spec.r + 2 * j)) out.push_back({Family::plain, spec.r + 2 * j});
    if (in_range(spec, spec.r + 2 * j - 1)) out.push_back({Family::em1, spec.r + 2 * j - 1});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Slot> complement_slots(const SystemSpec& spec) {
  std::vector<Slot> out;
  for (int s : {spec.r + 2 * spec.p - 1, spec.r + 2 * spec.q + 3}) {
    if (in_range(spec, s)) out.push_back({Family::plain, s});
  }
  for (int s : {spec.r + 2 * spec.p - 2, spec.r + 2 * spec.q + 2}) {
    if (in_range(spec, s)) out.push_back({Family::em1, s});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int em1_commutation_sign(int m, int s) {
  if (s < 0 || s > m + 1) throw GradeError("no grade-" + std::to_string(s) + " blades in e_0..e_m");
  // Representative blade e_0 e_1 ... e_{s-1}.
  const BladeMask v = (BladeMask{1} << s) - 1;
  const BladeTable& table = blade_table(m + 2);
  return table.sign(top_blade(m), v) * table.sign(v, top_blade(m));
}

GradedField embed(const GradedField& component, const Slot& slot, int m, Convention convention) {
  check_component(component, slot.grade, m);
  const int total = slot.family == Family::plain ? slot.grade : slot.grade + 1;
  GradedField out = zero_field(component.domain_ptr(), {total});
  out.set_valid_mask(component.valid_mask());
  const BladeMask extra = slot.family == Family::plain ? 0 : top_blade(m);
  for (Index b = 0; b < component.coeffs().rows(); ++b) {
    const auto blade = static_cast<BladeMask>(b);
    if (!component_blade(blade, slot.grade, m)) continue;
    out.coeffs().row(blade | extra) =
        static_cast<double>(embed_sign(blade, slot, m, convention)) * component.coeffs().row(b);
  }
  return out;
}

GradedField extract(const GradedField& field, const Slot& slot, int m, Convention convention) {
  GradedField out = zero_field(field.domain_ptr(), {slot.grade});
  out.set_valid_mask(field.valid_mask());
  const BladeMask extra = slot.family == Family::plain ? 0 : top_blade(m);
  for (Index b = 0; b < field.coeffs().rows(); ++b) {
    const auto blade = static_cast<BladeMask>(b);
    if (!component_blade(blade, slot.grade, m)) continue;
    out.coeffs().row(b) = static_cast<double>(embed_sign(blade, slot, m, convention)) * field.coeffs().row(blade | extra);
  }
  return out;
}

SourceData make_source(const SystemSpec& spec, const DomainPtr& domain) {
  validate_spec(spec);
  SourceData out{spec, domain, {}};
  for (const Slot& s : source_slots(spec)) out.components.emplace(s, zero_field(domain, {s.grade}));
  return out;
}

SolutionData make_solution(const SystemSpec& spec, const DomainPtr& domain) {
  validate_spec(spec);
  SolutionData out{spec, domain, {}};
  for (const Slot& s : solution_slots(spec)) out.components.emplace(s, zero_field(domain, {s.grade}));
  return out;
}

GradedField assemble(const SourceData& source) {
  validate_spec(source.spec);
  const auto slots = source_slots(source.spec);
  for (const auto& [slot, part] : source.components) require_slot(slots, slot);
  return assemble_slots(source.domain, source.components, source.spec.m, Convention::right);
}

GradedField assemble(const SolutionData& solution) {
  validate_spec(solution.spec);
  const auto slots = solution_slots(solution.spec);
  for (const auto& [slot, part] : solution.components) require_slot(slots, slot);
  return assemble_slots(solution.domain, solution.components, solution.spec.m, Convention::left);
}

SourceData disassemble_source(const GradedField& g, const SystemSpec& spec, double tol) {
  validate_spec(spec);
  return {spec, g.domain_ptr(), decompose(g, source_slots(spec), spec.m, Convention::right, tol)};
}

SolutionData disassemble_solution(const GradedField& f, const SystemSpec& spec, double tol) {
  validate_spec(spec);
  return {spec, f.domain_ptr(), decompose(f, solution_slots(spec), spec.m, Convention::left, tol)};
}

std::vector<SystemTerm> derive_system_terms(const SystemSpec& spec) {
  validate_spec(spec);
  const int m = spec.m;
  const BladeTable& table = blade_table(m + 2);
  const BladeMask top = top_blade(m);
  // e_i e_{m+1} = anti * e_{m+1} e_i, e_{m+1}^2 = square
  const double anti = table.sign(generator(0), top) * table.sign(top, generator(0));
  const double square = table.sign(top, top);
  auto comm = [&](int s) { return in_range(spec, s) ? static_cast<double>(em1_commutation_sign(m, s)) : 0.0; };

  std::vector<SystemTerm> out;
  auto add = [&](const Slot& src, SystemTerm::Op op, Complex c, const Slot& target) {
    if (in_range(spec, target.grade)) out.push_back({src, op, c, target});
  };
  using Op = SystemTerm::Op;
  for (const Slot& s : solution_slots(spec)) {
    const int g = s.grade;
    if (s.family == Family::plain) {
      // d F = d+F + d-F; alpha e_{m+1} F = alpha comm(g) F e_{m+1}
      add(s, Op::plus, 1.0, {Family::plain, g + 1});
      add(s, Op::minus, 1.0, {Family::plain, g - 1});
      add(s, Op::identity, spec.alpha * comm(g), {Family::em1, g});
    } else {
      // d (e_{m+1} F) = anti e_{m+1} d F; e_{m+1} X = comm X e_{m+1};
      // alpha e_{m+1} e_{m+1} F = alpha square F
      add(s, Op::plus, anti * comm(g + 1), {Family::em1, g + 1});
      add(s, Op::minus, anti * comm(g - 1), {Family::em1, g - 1});
      add(s, Op::identity, spec.alpha * square, {Family::plain, g});
    }
  }
  return out;
}

double SystemResidual::max_abs() const {
  double out = off_system;
  for (const auto& f : families) out = std::max(out, f.max_abs);
  return out;
}

SystemResidual system_residual(const SolutionData& f, const SourceData& g) {
  if (f.spec.m != g.spec.m || f.spec.r != g.spec.r || f.spec.p != g.spec.p || f.spec.q != g.spec.q ||
      f.spec.alpha != g.spec.alpha) {
    throw SpecError("solution and source were built for different systems");
  }
  const SystemSpec& spec = f.spec;
  const int m = spec.m;
  const DomainPtr& domain = f.domain;
  auto component = [&](const auto& data, const Slot& slot) {
    auto it = data.components.find(slot);
    return it != data.components.end() ? it->second : zero_field(domain, {slot.grade});
  };

  SystemResidual out;
  // Equation route: sum of d+/d-/identity terms per target slot, minus G.
  std::map<Slot, GradedField> plus, minus;
  for (const Slot& slot : source_slots(spec)) {
    out.family_fields.emplace(slot, -1.0 * component(g, slot));
  }
  for (const SystemTerm& term : derive_system_terms(spec)) {
    const GradedField fs = component(f, term.source);
    GradedField contribution = fs;
    if (term.op == SystemTerm::Op::plus) {
      if (!plus.contains(term.source)) plus.emplace(term.source, d_pm(fs, DiracPart::plus));
      contribution = plus.at(term.source);
    } else if (term.op == SystemTerm::Op::minus) {
      if (!minus.contains(term.source)) minus.emplace(term.source, d_pm(fs, DiracPart::minus));
      contribution = minus.at(term.source);
    }
    contribution.set_grade_support({term.target.grade});
    auto it = out.family_fields.find(term.target);
    if (it == out.family_fields.end()) throw GradeError("derived term lands outside the source slots");
    it->second += term.coeff * contribution;
  }

  // Projection route: grade parts of d_alpha F - G.
  GradedField residual = dirac(assemble(f), spec.alpha, Side::left);
  residual -= assemble(g);
  GradedField rest = residual;
  for (const Slot& slot : source_slots(spec)) {
    GradedField part = extract(residual, slot, m, Convention::right);
    rest -= embed(part, slot, m, Convention::right);
    out.projected_fields.emplace(slot, std::move(part));
  }
  out.off_system = max_norm(rest);

  for (auto& [slot, field] : out.family_fields) {
    field.set_grade_support({slot.grade});
    out.families.push_back({slot, max_norm(field), l2_norm(field)});
    GradedField gap = field;
    gap -= out.projected_fields.at(slot);
    out.route_gap = std::max(out.route_gap, max_norm(gap));
  }
  return out;
}

std::map<Slot, GradedField> termwise_transform(const SourceData& source, const PotentialConfig& cfg,
                                               const std::vector<char>& eval_mask) {
  const SystemSpec& spec = source.spec;
  validate_spec(spec);
  const int m = spec.m;
  const double square = blade_table(m + 2).sign(top_blade(m), top_blade(m));
  auto comm = [&](int s) { return in_range(spec, s) ? static_cast<double>(em1_commutation_sign(m, s)) : 0.0; };

  std::map<Slot, GradedField> out;
  auto add = [&](const Slot& target, double coeff, const GradedField& part) {
    if (!in_range(spec, target.grade)) return;
    GradedField piece = extract(part, {Family::plain, target.grade}, m, Convention::left);
    piece *= coeff;
    auto it = out.find(target);
    if (it == out.end()) {
      out.emplace(target, std::move(piece));
    } else {
      it->second += piece;
    }
  };

  for (const auto& [slot, g] : source.components) {
    const int t = slot.grade;
    const GradedField e1 = volume_potential(g, cfg, KernelPart::e1, eval_mask);  // grades t-1 (bullet), t+1 (wedge)
    const GradedField e2 = volume_potential(g, cfg, KernelPart::e2, eval_mask);  // grade t
    if (slot.family == Family::plain) {
      // E1 G: bullet and wedge stay plain; e_{m+1} E2 G is an em1 part.
      add({Family::plain, t - 1}, 1.0, e1);
      add({Family::plain, t + 1}, 1.0, e1);
      add({Family::em1, t}, 1.0, e2);
    } else {
      // E1 G e_{m+1} = e_{m+1} comm (E1 G); e_{m+1} E2 G e_{m+1} = comm(t) square E2 G.
      add({Family::em1, t - 1}, comm(t - 1), e1);
      add({Family::em1, t + 1}, comm(t + 1), e1);
      add({Family::plain, t}, comm(t) * square, e2);
    }
  }
  return out;
}

Obstruction compute_P(const SourceData& source, const PotentialConfig& cfg) {
  return compute_P(source, cfg, source.domain->occupancy());
}

Obstruction compute_P(const SourceData& source, const PotentialConfig& cfg, const std::vector<char>& eval_mask) {
  const SystemSpec& spec = source.spec;
  const auto terms = termwise_transform(source, cfg, eval_mask);
  Obstruction out{spec, {}, zero_field(source.domain, {}), {}, 0.0, 0.0};
  out.field.set_valid_mask(eval_mask);
  for (const Slot& slot : complement_slots(spec)) {
    auto it = terms.find(slot);
    GradedField part = it != terms.end() ? it->second : zero_field(source.domain, {slot.grade});
    part.set_valid_mask(eval_mask);
    out.field += embed(part, slot, spec.m, Convention::left);
    const double norm = max_norm(part);
    out.max_norms.emplace(slot, norm);
    out.max_norm = std::max(out.max_norm, norm);
    out.parts.emplace(slot, std::move(part));
  }
  out.source_scale = max_norm(assemble(source)) * source.domain->diameter();
  return out;
}

PairReport verify_pair(const GradedField& f1, const GradedField& f2, const SystemSpec& spec, const PairOptions& opts) {
  validate_spec(spec);
  decompose(f1, solution_slots(spec), spec.m, Convention::left, 1e-12);
  decompose(f2, complement_slots(spec), spec.m, Convention::left, 1e-12);

  const double diam = f1.domain().diameter();
  const double a = std::abs(spec.alpha);
  auto relative = [&](const GradedField& residual, const GradedField& ref, double scale) {
    const std::vector<char> mask = intersect_masks(residual.valid_mask(), margin_mask(residual, opts.margin));
    const double denom = max_norm(ref) * scale;
    const double num = max_norm(residual, mask);
    return denom > 0.0 ? num / denom : num;
  };

  PairReport out;
  const double helm_scale = 1.0 / (diam * diam) + a * a;
  out.helmholtz_f1 = relative(helmholtz(f1, spec.alpha), f1, helm_scale);
  out.helmholtz_f2 = relative(helmholtz(f2, spec.alpha), f2, helm_scale);
  const GradedField sum = f1 + f2;
  out.dirac = relative(dirac(sum, spec.alpha, Side::left), sum, 1.0 / diam + a);
  out.pass = out.helmholtz_f1 <= opts.tol && out.helmholtz_f2 <= opts.tol && out.dirac <= opts.tol;
  return out;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::case_a:
      return "A";
    case Verdict::case_b:
      return "B-verified";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

Solvability solvability(const Obstruction& p, double tol, const GradedField* candidate, const PairOptions& opts) {
  Solvability out{Verdict::inconclusive, p.max_norm, tol * p.source_scale, std::nullopt};
  if (p.max_norm <= out.threshold) {
    out.verdict = Verdict::case_a;
    return out;
  }
  if (candidate != nullptr) {
    GradedField minus_p = p.field;
    minus_p *= -1.0;
    out.pair = verify_pair(*candidate, minus_p, p.spec, opts);
    if (out.pair->pass) out.verdict = Verdict::case_b;
  }
  return out;
}

SolutionData build_solution(const SourceData& source, const PotentialConfig& cfg, Verdict verdict,
                            const GradedField* hat_h1, const GradedField* tilde_h1) {
  const SystemSpec& spec = source.spec;
  if (verdict == Verdict::inconclusive) throw Error("build_solution needs a case A or verified case B verdict");
  if (verdict == Verdict::case_b && tilde_h1 == nullptr) throw Error("case B needs the hyper-conjugate candidate");

  const GradedField transform = teodorescu(assemble(source), cfg, source.domain->occupancy());
  SolutionData out{spec, source.domain, {}};
  for (const Slot& slot : solution_slots(spec)) out.components.emplace(slot, extract(transform, slot, spec.m, Convention::left));
  for (const GradedField* extra : {hat_h1, verdict == Verdict::case_b ? tilde_h1 : nullptr}) {
    if (extra == nullptr) continue;
    const SolutionData parts = disassemble_solution(*extra, spec);
    for (auto& [slot, part] : parts.components) out.components.at(slot) += part;
  }
  return out;
}

}  // namespace clifford
