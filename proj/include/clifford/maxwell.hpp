#pragma once

// Maxwell's equations as the p = q = 0 instance of the Moisil-Teodorescu
// system: M = H - i e_{m+1} E with E an r-vector and H an (r+1)-vector.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clifford/mt_solver.hpp"

namespace clifford {

struct EMPair {
  GradedField E;  // pure grade r in e_0..e_m
  GradedField H;  // pure grade r+1 in e_0..e_m
  int r = 1;
  Complex alpha{1.0, 0.0};
};

// Zero pair on the domain.
EMPair make_pair(const DomainPtr& domain, int r, Complex alpha);
// Throws GradeError / ConfigurationError on impure or mismatched fields.
void check_pair(const EMPair& pair);

SystemSpec maxwell_spec(int m, int r, Complex alpha);

// H - i e_{m+1} E
GradedField assemble_M(const EMPair& pair);
// H + i (-1)^(r+1) E e_{m+1}
GradedField assemble_M_right(const EMPair& pair);
// H = grade r+1 without e_{m+1}; E = i times the e_{m+1} E-coefficient of grade r.
EMPair extract_EH(const GradedField& m_field, int r, Complex alpha);

// Right-hand sides of the four equations, keyed by grade r-1 .. r+2.
struct MaxwellSource {
  DomainPtr domain;
  int r = 1;
  Complex alpha{1.0, 0.0};
  std::map<int, GradedField> g;  // absent grade = zero
};

MaxwellSource zero_maxwell_source(const DomainPtr& domain, int r, Complex alpha);
// The four Maxwell right-hand sides are the general system source with the
// e_{m+1} families multiplied by i (-1)^(r+1).
SourceData to_source_data(const MaxwellSource& source);
MaxwellSource from_source_data(const SourceData& source);

struct MaxwellEquation {
  std::string name;
  int grade;
  double max_abs;
  double l2;
};

struct MaxwellResidual {
  std::vector<MaxwellEquation> equations;  // d+E - i a H, d-E, d-H + i a E, d+H (minus G)
  std::map<int, GradedField> fields;       // keyed by grade
  double identity_gap = 0.0;  // vs grade parts of dirac(assemble_M) - G
  double max_abs() const;
};

MaxwellResidual maxwell_residual(const EMPair& pair, const MaxwellSource& source);

struct MaxwellSolution {
  Obstruction P;
  Solvability solvability;
  std::optional<SolutionData> solution;
  std::optional<GradedField> M;
  std::optional<EMPair> pair;
};

// Runs the obstruction test and, for case A or verified case B, builds M.
MaxwellSolution solve_maxwell(const MaxwellSource& source, const PotentialConfig& cfg, double tol,
                              const GradedField* hat_h1 = nullptr, const GradedField* tilde_h1 = nullptr,
                              const PairOptions& opts = {});

struct CurlReport {
  double plus_error = 0.0;   // |d+E - *curl E|
  double minus_error = 0.0;  // |d-H - curl *H|
  double scale = 0.0;
};

// m+1 = 3, r = 1. Vector c maps to c2 e01 - c1 e02 + c0 e12.
GradedField vector_to_bivector(const GradedField& v);
GradedField bivector_to_vector(const GradedField& b);
// Central-difference curl of a 1-vector field, component by component.
GradedField classical_curl(const GradedField& v);
CurlReport curl_correspondence_check(const EMPair& pair);

}  // namespace clifford
