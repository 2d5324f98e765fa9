#pragma once

// Inhomogeneous generalized perturbed Moisil-Teodorescu systems of type
// (r, p, q): assembly, residuals, the obstruction P, the solvability verdict
// and the explicit solution, plus hyper-conjugate pair verification.
//
// Component fields are pure s-vectors in the generators e_0..e_m. A field
// valued in the algebra splits into "plain" parts (no e_{m+1}) and "em1"
// parts carrying e_{m+1}. Solutions and obstructions write the em1 parts as
// e_{m+1} F^s (left); sources write them as G^s e_{m+1} (right).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clifford/fields.hpp"
#include "clifford/potentials.hpp"

namespace clifford {

enum class Family { plain, em1 };
enum class Convention { left, right };

struct Slot {
  Family family;
  int grade;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

std::string slot_name(const Slot& slot);

// Throws SpecError naming every violated constraint.
void validate_spec(const SystemSpec& spec);

// F^{r+2j+1} and e_{m+1} F^{r+2j}, j = p..q.
std::vector<Slot> solution_slots(const SystemSpec& spec);
// G^{r+2j} and G^{r+2j-1} e_{m+1}, j = p..q+1.
std::vector<Slot> source_slots(const SystemSpec& spec);
// Grades of P: plain r+2p-1, r+2q+3; em1 r+2p-2, r+2q+2.
std::vector<Slot> complement_slots(const SystemSpec& spec);

// Sign c with e_{m+1} v = c v e_{m+1} for a grade-s blade v in e_0..e_m.
int em1_commutation_sign(int m, int s);

// Embeds a pure-grade component into the algebra under the given convention.
GradedField embed(const GradedField& component, const Slot& slot, int m, Convention convention);
// Inverse of embed: reads the slot's coefficients out of a full field.
GradedField extract(const GradedField& field, const Slot& slot, int m, Convention convention);

struct SourceData {
  SystemSpec spec;
  DomainPtr domain;
  std::map<Slot, GradedField> components;  // absent slot = zero
};

struct SolutionData {
  SystemSpec spec;
  DomainPtr domain;
  std::map<Slot, GradedField> components;
};

// Zero-initialised containers covering every slot.
SourceData make_source(const SystemSpec& spec, const DomainPtr& domain);
SolutionData make_solution(const SystemSpec& spec, const DomainPtr& domain);

GradedField assemble(const SourceData& source);
GradedField assemble(const SolutionData& solution);
// Throws GradeError if the field has mass outside the slots (beyond tol * scale).
SourceData disassemble_source(const GradedField& g, const SystemSpec& spec, double tol = 1e-12);
SolutionData disassemble_solution(const GradedField& f, const SystemSpec& spec, double tol = 1e-12);

// One term c * op(F[source]) contributing to equation `target`.
struct SystemTerm {
  enum class Op { plus, minus, identity };
  Slot source;
  Op op;
  Complex coeff;
  Slot target;
};

// The equations of d_alpha F = G for subspace-valued F, derived from the
// algebra (anticommutation, e_{m+1}^2 = -1, e_{m+1} commutation).
std::vector<SystemTerm> derive_system_terms(const SystemSpec& spec);

struct FamilyResidual {
  Slot slot;
  double max_abs;
  double l2;
};

struct SystemResidual {
  std::vector<FamilyResidual> families;        // from the assembled equations
  std::map<Slot, GradedField> family_fields;   // residual fields, equation route
  std::map<Slot, GradedField> projected_fields;  // grade parts of d_alpha F - G
  double off_system = 0.0;  // mass of d_alpha F - G outside the source slots
  double route_gap = 0.0;   // max difference between the two routes
  double max_abs() const;
};

SystemResidual system_residual(const SolutionData& f, const SourceData& g);

struct Obstruction {
  SystemSpec spec;
  std::map<Slot, GradedField> parts;  // complement slots, left convention
  GradedField field;                  // assembled P
  std::map<Slot, double> max_norms;
  double max_norm = 0.0;
  double source_scale = 0.0;  // ||G||_inf * diam(Omega)
};

// Term-by-term evaluation of the E1-bullet, E1-wedge and E2 integrals of every
// source component, keyed by target slot (left convention), over eval_mask.
std::map<Slot, GradedField> termwise_transform(const SourceData& source, const PotentialConfig& cfg,
                                               const std::vector<char>& eval_mask);

Obstruction compute_P(const SourceData& source, const PotentialConfig& cfg);
Obstruction compute_P(const SourceData& source, const PotentialConfig& cfg, const std::vector<char>& eval_mask);

struct PairOptions {
  double tol = 1e-2;
  double margin = 0.0;  // ignore cells closer than this to the exterior
};

struct PairReport {
  double helmholtz_f1 = 0.0;  // relative residuals
  double helmholtz_f2 = 0.0;
  double dirac = 0.0;
  bool pass = false;
};

// Checks that (F1, F2) is a hyper-conjugate harmonic pair for the spec: F1 in
// the solution slots, F2 in the complement slots (GradeError otherwise), each
// annihilated by Helmholtz and F1 + F2 alpha-monogenic, up to opts.tol.
PairReport verify_pair(const GradedField& f1, const GradedField& f2, const SystemSpec& spec,
                       const PairOptions& opts = {});

enum class Verdict { case_a, case_b, inconclusive };
std::string verdict_name(Verdict v);

struct Solvability {
  Verdict verdict;
  double p_norm;
  double threshold;
  std::optional<PairReport> pair;
};

// case_a iff ||P|| <= tol * source_scale; case_b iff the candidate passes
// verify_pair against -P; inconclusive otherwise.
Solvability solvability(const Obstruction& p, double tol, const GradedField* candidate = nullptr,
                        const PairOptions& opts = {});

// F = solution-slot part of T[G] + hat_h1 (+ tilde_h1). Requires case_a, or
// case_b with tilde_h1 supplied.
SolutionData build_solution(const SourceData& source, const PotentialConfig& cfg, Verdict verdict,
                            const GradedField* hat_h1 = nullptr, const GradedField* tilde_h1 = nullptr);

}  // namespace clifford
