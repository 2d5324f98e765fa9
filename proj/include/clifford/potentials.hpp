#pragma once

// Teodorescu volume transform, boundary Cauchy operator and the Borel-Pompeiu
// residual, all by midpoint quadrature on the voxel lattice.

#include <vector>

#include "clifford/fields.hpp"
#include "clifford/kernels.hpp"

namespace clifford {

enum class SingularCellPolicy { skip, refine };

struct PotentialConfig {
  SingularCellPolicy singular_cell_policy = SingularCellPolicy::skip;
  // refine: the cell containing x is split into 2^depth subcells per axis and
  // subcells centred within h/4 of x are dropped.
  int refinement_depth = 0;
  KernelParams kernel;
};

// Which kernel multiplies the data from the left.
enum class KernelPart {
  full,  // E_alpha = E1 + e_{m+1} E2
  e1,    // E1 only
  e2,    // E2 as a scalar (no e_{m+1})
};

// sum_y K(x - y) F(y) h^(m+1) over the valid cells of F, evaluated at the
// cells flagged in eval_mask (lattice of F).
GradedField volume_potential(const GradedField& f, const PotentialConfig& cfg, KernelPart part,
                             const std::vector<char>& eval_mask);

GradedField teodorescu(const GradedField& f, const PotentialConfig& cfg, const std::vector<char>& eval_mask);
GradedField teodorescu(const GradedField& f, const PotentialConfig& cfg);

// Teodorescu transform at arbitrary points of R^(m+1).
std::vector<Mv> teodorescu_at(const GradedField& f, const PotentialConfig& cfg, const std::vector<Point>& points);

// One multivector per boundary face of the domain (blades x faces).
struct BoundaryData {
  DomainPtr domain;
  Eigen::MatrixXcd values;
};

BoundaryData zero_boundary_data(const DomainPtr& domain);
// Exact trace of a function sampled at the face centres.
BoundaryData boundary_trace(const DomainPtr& domain, const FieldFunction& fn);
// Trace taken from the cell owning each face.
BoundaryData boundary_trace(const GradedField& f);

// -sum_faces E_alpha(x - y) n(y) f(y) |face| at the lattice cells in eval_mask.
GradedField cauchy(const BoundaryData& data, const PotentialConfig& cfg, const std::vector<char>& eval_mask);
// Same at arbitrary points; throws OnBoundaryError for a point on a face.
std::vector<Mv> cauchy_at(const BoundaryData& data, const PotentialConfig& cfg, const std::vector<Point>& points);

struct ResidualReport {
  double max_abs = 0.0;
  double l2 = 0.0;
  double max_rel = 0.0;  // max_abs / max|W|
};

// ||C[W|_Gamma] + T[d_alpha W] - W|| over cells where d_alpha W is defined and
// whose distance to the exterior is at least `margin`.
ResidualReport borel_pompeiu_residual(const DomainPtr& domain, const FieldFunction& w, const PotentialConfig& cfg,
                                      double margin = 0.0);
ResidualReport borel_pompeiu_residual(const GradedField& w, const PotentialConfig& cfg, double margin = 0.0);

}  // namespace clifford
