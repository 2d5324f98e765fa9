#include "clifford/potentials.hpp"

#include <cmath>
#include <unordered_map>

namespace clifford {

namespace {

// Kernel coefficient on one blade, tabulated over lattice offsets d = y - x.
struct KernelComponent {
  BladeMask blade;
  std::vector<double> re, im;
};

// Offsets d_a in [-(N_a - 1), N_a - 1], axis 0 fastest.
struct OffsetLattice {
  std::vector<int> extent;  // N_a
  std::vector<Index> stride;
  Index size = 1;

  explicit OffsetLattice(const std::vector<int>& shape) : extent(shape), stride(shape.size()) {
    for (std::size_t a = 0; a < shape.size(); ++a) {
      stride[a] = size;
      size *= 2 * shape[a] - 1;
    }
  }
  int offset(Index idx, std::size_t a) const {
    return static_cast<int>((idx / stride[a]) % (2 * extent[a] - 1)) - (extent[a] - 1);
  }
};

std::vector<BladeMask> kernel_blades(int n, KernelPart part) {
  std::vector<BladeMask> out;
  if (part != KernelPart::e2) {
    for (int k = 0; k < n; ++k) out.push_back(generator(k));
  }
  if (part == KernelPart::full) out.push_back(generator(n));
  if (part == KernelPart::e2) out.push_back(0);
  return out;
}

// Kernel coefficients (aligned with kernel_blades) at argument x - y = v.
void kernel_coeffs(const HelmholtzKernel::Parts& p, const Point& v, KernelPart part, std::vector<Complex>& out) {
  out.clear();
  if (part != KernelPart::e2) {
    for (Index k = 0; k < v.size(); ++k) out.push_back(p.e1_scale * v[k]);
  }
  if (part != KernelPart::e1) out.push_back(p.e2);
}

// Average of the kernel over the singular cell (as a fraction of h^n), with
// subcells centred within h/4 of the cell centre excluded.
std::vector<Complex> singular_cell_average(const VoxelDomain& dom, const HelmholtzKernel& kernel, KernelPart part,
                                           int depth) {
  const int n = dom.axes();
  const int per_axis = 1 << depth;
  const double hs = dom.h() / per_axis;
  const double weight = std::pow(1.0 / per_axis, n);
  std::vector<Complex> total(kernel_blades(n, part).size(), Complex(0));
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<Complex> coeffs;
  Point v(n);
  while (true) {
    for (int a = 0; a < n; ++a) v[a] = -((idx[static_cast<std::size_t>(a)] + 0.5) * hs - 0.5 * dom.h());
    if (v.norm() >= 0.25 * dom.h()) {
      kernel_coeffs(kernel.parts(v.norm()), v, part, coeffs);
      for (std::size_t k = 0; k < total.size(); ++k) total[k] += weight * coeffs[k];
    }
    int a = 0;
    while (a < n && ++idx[static_cast<std::size_t>(a)] == per_axis) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == n) break;
  }
  return total;
}

std::vector<KernelComponent> tabulate_kernel(const VoxelDomain& dom, const PotentialConfig& cfg, KernelPart part,
                                             const HelmholtzKernel& kernel, const OffsetLattice& lattice) {
  const int n = dom.axes();
  const auto blades = kernel_blades(n, part);
  std::vector<KernelComponent> comps;
  for (BladeMask b : blades) {
    comps.push_back({b, std::vector<double>(static_cast<std::size_t>(lattice.size)),
                     std::vector<double>(static_cast<std::size_t>(lattice.size))});
  }
  std::unordered_map<long, HelmholtzKernel::Parts> radial;
  std::vector<Complex> coeffs;
  Point v(n);
  for (Index idx = 0; idx < lattice.size; ++idx) {
    long sq = 0;
    for (int a = 0; a < n; ++a) {
      const int d = lattice.offset(idx, static_cast<std::size_t>(a));
      v[a] = -d * dom.h();  // x - y
      sq += static_cast<long>(d) * d;
    }
    if (sq == 0) {
      if (cfg.singular_cell_policy == SingularCellPolicy::skip) continue;
      coeffs = singular_cell_average(dom, kernel, part, cfg.refinement_depth);
    } else {
      auto it = radial.find(sq);
      if (it == radial.end()) it = radial.emplace(sq, kernel.parts(dom.h() * std::sqrt(static_cast<double>(sq)))).first;
      kernel_coeffs(it->second, v, part, coeffs);
    }
    for (std::size_t k = 0; k < comps.size(); ++k) {
      comps[k].re[static_cast<std::size_t>(idx)] = coeffs[k].real();
      comps[k].im[static_cast<std::size_t>(idx)] = coeffs[k].imag();
    }
  }
  return comps;
}

inline void complex_dot(const double* kr, const double* ki, const double* fr, const double* fi, Index len, double& sr,
                        double& si) {
  double ar = 0.0, ai = 0.0;
#pragma omp simd reduction(+ : ar, ai)
  for (Index t = 0; t < len; ++t) {
    ar += kr[t] * fr[t] - ki[t] * fi[t];
    ai += kr[t] * fi[t] + ki[t] * fr[t];
  }
  sr += ar;
  si += ai;
}

std::vector<int> output_support(const std::vector<int>& support, KernelPart part, int dim) {
  if (part == KernelPart::e2) return support;
  std::vector<int> out;
  for (int s : support) {
    if (s - 1 >= 0) out.push_back(s - 1);
    if (s + 1 <= dim) out.push_back(s + 1);
  }
  return merge_supports(out, {});
}

void require_domain(const VoxelDomain& dom, const PotentialConfig& cfg) {
  if (dom.interior_cells().empty()) throw DomainError("empty domain");
  if (cfg.kernel.n != dom.axes()) throw ConfigurationError("kernel dimension does not match domain");
  if (cfg.refinement_depth < 0) throw ConfigurationError("refinement_depth must be non-negative");
}

}  // namespace

GradedField volume_potential(const GradedField& f, const PotentialConfig& cfg, KernelPart part,
                             const std::vector<char>& eval_mask) {
  const VoxelDomain& dom = f.domain();
  require_domain(dom, cfg);
  const int n = dom.axes();
  const int dim = f.dim();
  const BladeTable& table = blade_table(dim);
  const HelmholtzKernel kernel(cfg.kernel);
  const OffsetLattice lattice(dom.shape());
  const auto comps = tabulate_kernel(dom, cfg, part, kernel, lattice);

  GradedField out(f.domain_ptr(), output_support(f.grade_support(), part, dim));
  out.set_valid_mask(eval_mask);

  // Source data: one split re/im array per blade that is nonzero somewhere.
  struct Source {
    BladeMask blade;
    std::vector<double> re, im;
  };
  std::vector<Source> sources;
  std::vector<char> nonzero(static_cast<std::size_t>(dom.cell_count()), 0);
  for (Index b = 0; b < f.coeffs().rows(); ++b) {
    Source src{static_cast<BladeMask>(b), std::vector<double>(static_cast<std::size_t>(dom.cell_count()), 0.0),
               std::vector<double>(static_cast<std::size_t>(dom.cell_count()), 0.0)};
    bool any = false;
    for (Index c = 0; c < dom.cell_count(); ++c) {
      const Complex v = f.coeffs()(b, c);
      if (!f.valid(c) || v == Complex(0)) continue;
      src.re[static_cast<std::size_t>(c)] = v.real();
      src.im[static_cast<std::size_t>(c)] = v.imag();
      nonzero[static_cast<std::size_t>(c)] = 1;
      any = true;
    }
    if (any) sources.push_back(std::move(src));
  }
  if (sources.empty()) return out;

  // Rows along axis 0, trimmed to their nonzero span.
  struct Row {
    Index start;
    Index len;
    Index kernel_base;  // offset-lattice index contribution of axes >= 1, before subtracting x
    int lo;
  };
  std::vector<Row> rows;
  const int n0 = dom.shape()[0];
  for (Index c = 0; c < dom.cell_count(); c += n0) {
    int lo = -1, hi = -1;
    for (int k = 0; k < n0; ++k) {
      if (nonzero[static_cast<std::size_t>(c + k)]) {
        if (lo < 0) lo = k;
        hi = k;
      }
    }
    if (lo < 0) continue;
    const auto yc = dom.coords(c);
    Index base = lo + (n0 - 1);
    for (int a = 1; a < n; ++a) {
      base += static_cast<Index>(yc[static_cast<std::size_t>(a)] + dom.shape()[static_cast<std::size_t>(a)] - 1) *
              lattice.stride[static_cast<std::size_t>(a)];
    }
    rows.push_back({c + lo, hi - lo + 1, base, lo});
  }

  struct Pair {
    std::size_t comp, src;
    BladeMask target;
    double sign;
  };
  std::vector<Pair> pairs;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    for (std::size_t s = 0; s < sources.size(); ++s) {
      pairs.push_back({k, s, comps[k].blade ^ sources[s].blade,
                       static_cast<double>(table.sign(comps[k].blade, sources[s].blade))});
    }
  }

  const double weight = dom.cell_volume();
  std::vector<double> acc_re(pairs.size()), acc_im(pairs.size());
  for (Index x = 0; x < dom.cell_count(); ++x) {
    if (!eval_mask[static_cast<std::size_t>(x)]) continue;
    const auto xc = dom.coords(x);
    Index shift = xc[0];
    for (int a = 1; a < n; ++a) shift += xc[static_cast<std::size_t>(a)] * lattice.stride[static_cast<std::size_t>(a)];
    std::fill(acc_re.begin(), acc_re.end(), 0.0);
    std::fill(acc_im.begin(), acc_im.end(), 0.0);
    for (const Row& row : rows) {
      const Index kb = row.kernel_base - shift;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const KernelComponent& kc = comps[pairs[p].comp];
        const Source& src = sources[pairs[p].src];
        complex_dot(kc.re.data() + kb, kc.im.data() + kb, src.re.data() + row.start, src.im.data() + row.start,
                    row.len, acc_re[p], acc_im[p]);
      }
    }
    auto col = out.coeffs().col(x);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      col[pairs[p].target] += (pairs[p].sign * weight) * Complex(acc_re[p], acc_im[p]);
    }
  }
  return out;
}

GradedField teodorescu(const GradedField& f, const PotentialConfig& cfg, const std::vector<char>& eval_mask) {
  return volume_potential(f, cfg, KernelPart::full, eval_mask);
}

GradedField teodorescu(const GradedField& f, const PotentialConfig& cfg) {
  return teodorescu(f, cfg, f.domain().occupancy());
}

std::vector<Mv> teodorescu_at(const GradedField& f, const PotentialConfig& cfg, const std::vector<Point>& points) {
  const VoxelDomain& dom = f.domain();
  require_domain(dom, cfg);
  const HelmholtzKernel kernel(cfg.kernel);
  const double weight = dom.cell_volume();
  const auto cells = f.valid_cells();
  std::vector<Mv> out;
  for (const Point& x : points) {
    Mv acc(f.dim());
    for (Index c : cells) {
      const Point v = x - dom.center(c);
      if (v.norm() < 0.5 * dom.h() * 1e-12) continue;  // singular cell, skipped
      acc += geometric_product(kernel.eval(v).combined, f.value(c));
    }
    out.push_back(weight * acc);
  }
  return out;
}

BoundaryData zero_boundary_data(const DomainPtr& domain) {
  return {domain, Eigen::MatrixXcd::Zero(Index{1} << domain->algebra_dim(),
                                         static_cast<Index>(domain->boundary_faces().size()))};
}

BoundaryData boundary_trace(const DomainPtr& domain, const FieldFunction& fn) {
  BoundaryData out = zero_boundary_data(domain);
  const auto& faces = domain->boundary_faces();
  for (std::size_t i = 0; i < faces.size(); ++i) out.values.col(static_cast<Index>(i)) = fn(faces[i].center).coeffs();
  return out;
}

BoundaryData boundary_trace(const GradedField& f) {
  BoundaryData out = zero_boundary_data(f.domain_ptr());
  const auto& faces = f.domain().boundary_faces();
  for (std::size_t i = 0; i < faces.size(); ++i) out.values.col(static_cast<Index>(i)) = f.coeffs().col(faces[i].cell);
  return out;
}

namespace {

// out -= |face| (E(v) n) f for one face; E given by its radial parts.
void accumulate_face(const HelmholtzKernel::Parts& p, const Point& v, const BoundaryFace& face,
                     const Eigen::VectorXcd& data, const std::vector<BladeMask>& data_blades, double area,
                     const BladeTable& table, int n, Eigen::Ref<Eigen::VectorXcd> out) {
  const BladeMask normal = generator(face.axis);
  const double o = face.orientation;
  auto apply = [&](BladeMask kb, Complex kc) {
    const BladeMask en = kb ^ normal;
    const Complex c = kc * (o * table.sign(kb, normal)) * area;
    for (BladeMask b : data_blades) out[en ^ b] -= (static_cast<double>(table.sign(en, b)) * c) * data[b];
  };
  for (int k = 0; k < n; ++k) apply(generator(k), p.e1_scale * v[k]);
  apply(generator(n), p.e2);
}

std::vector<BladeMask> nonzero_blades(const Eigen::VectorXcd& v) {
  std::vector<BladeMask> out;
  for (Index b = 0; b < v.size(); ++b) {
    if (v[b] != Complex(0)) out.push_back(static_cast<BladeMask>(b));
  }
  return out;
}

}  // namespace

GradedField cauchy(const BoundaryData& data, const PotentialConfig& cfg, const std::vector<char>& eval_mask) {
  const VoxelDomain& dom = *data.domain;
  require_domain(dom, cfg);
  const int n = dom.axes();
  const BladeTable& table = blade_table(dom.algebra_dim());
  const HelmholtzKernel kernel(cfg.kernel);
  const auto& faces = dom.boundary_faces();

  GradedField out(data.domain, all_grades(dom.algebra_dim()));
  out.set_valid_mask(eval_mask);

  std::vector<std::size_t> active;
  std::vector<std::vector<BladeMask>> blades(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    blades[i] = nonzero_blades(data.values.col(static_cast<Index>(i)));
    if (!blades[i].empty()) active.push_back(i);
  }
  if (active.empty()) return out;

  // x - y_face is a multiple of h/2 in every axis; key radii by 4|x-y|^2/h^2.
  std::unordered_map<long, HelmholtzKernel::Parts> radial;
  const double area = dom.face_area();
  Point v(n);
  for (Index x = 0; x < dom.cell_count(); ++x) {
    if (!eval_mask[static_cast<std::size_t>(x)]) continue;
    const auto xc = dom.coords(x);
    auto col = out.coeffs().col(x);
    for (std::size_t i : active) {
      const BoundaryFace& face = faces[i];
      const auto yc = dom.coords(face.cell);
      long sq = 0;
      for (int a = 0; a < n; ++a) {
        long twice = 2L * (xc[static_cast<std::size_t>(a)] - yc[static_cast<std::size_t>(a)]);
        if (a == face.axis) twice -= face.orientation;
        v[a] = 0.5 * dom.h() * static_cast<double>(twice);
        sq += twice * twice;
      }
      auto it = radial.find(sq);
      if (it == radial.end()) it = radial.emplace(sq, kernel.parts(0.5 * dom.h() * std::sqrt(static_cast<double>(sq)))).first;
      const Eigen::VectorXcd face_data = data.values.col(static_cast<Index>(i));
      accumulate_face(it->second, v, face, face_data, blades[i], area, table, n, col);
    }
  }
  return out;
}

std::vector<Mv> cauchy_at(const BoundaryData& data, const PotentialConfig& cfg, const std::vector<Point>& points) {
  const VoxelDomain& dom = *data.domain;
  require_domain(dom, cfg);
  const int n = dom.axes();
  const BladeTable& table = blade_table(dom.algebra_dim());
  const HelmholtzKernel kernel(cfg.kernel);
  const auto& faces = dom.boundary_faces();
  const double tol = 1e-12 * dom.h();
  std::vector<Mv> out;
  for (const Point& x : points) {
    for (const BoundaryFace& face : faces) {
      bool on_face = std::abs(x[face.axis] - face.center[face.axis]) <= tol;
      for (int a = 0; a < n && on_face; ++a) {
        if (a != face.axis) on_face = std::abs(x[a] - face.center[a]) <= 0.5 * dom.h() + tol;
      }
      if (on_face) throw OnBoundaryError("Cauchy operator evaluated on the boundary");
    }
    Mv acc(dom.algebra_dim());
    for (std::size_t i = 0; i < faces.size(); ++i) {
      const Eigen::VectorXcd face_data = data.values.col(static_cast<Index>(i));
      const auto blades = nonzero_blades(face_data);
      if (blades.empty()) continue;
      const Point v = x - faces[i].center;
      accumulate_face(kernel.parts(v.norm()), v, faces[i], face_data, blades, dom.face_area(), table, n, acc.coeffs());
    }
    out.push_back(std::move(acc));
  }
  return out;
}

namespace {

ResidualReport bp_report(const GradedField& w, const GradedField& dw, const BoundaryData& trace,
                         const PotentialConfig& cfg, double margin) {
  const std::vector<char> mask = intersect_masks(dw.valid_mask(), margin_mask(w, margin));
  GradedField residual = cauchy(trace, cfg, mask);
  residual += teodorescu(dw, cfg, mask);
  GradedField wm = w;
  wm.set_valid_mask(mask);
  residual -= wm;
  ResidualReport out;
  out.max_abs = max_norm(residual);
  out.l2 = l2_norm(residual);
  const double scale = max_norm(w);
  out.max_rel = scale > 0.0 ? out.max_abs / scale : out.max_abs;
  return out;
}

}  // namespace

ResidualReport borel_pompeiu_residual(const DomainPtr& domain, const FieldFunction& w, const PotentialConfig& cfg,
                                      double margin) {
  const GradedField wf = sample(domain, w, all_grades(domain->algebra_dim()));
  const GradedField dw = dirac(wf, cfg.kernel.alpha, Side::left);
  return bp_report(wf, dw, boundary_trace(domain, w), cfg, margin);
}

ResidualReport borel_pompeiu_residual(const GradedField& w, const PotentialConfig& cfg, double margin) {
  const GradedField dw = dirac(w, cfg.kernel.alpha, Side::left);
  return bp_report(w, dw, boundary_trace(w), cfg, margin);
}

}  // namespace clifford
