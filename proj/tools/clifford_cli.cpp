// clifford: solve-mt, solve-maxwell and verify.
//
// Exit codes: 0 success (case A or verified case B, or all checks passed),
// 2 inconclusive solvability, 1 bad input or failed checks.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "clifford/field_io.hpp"
#include "clifford/scene.hpp"
#include "clifford/suites.hpp"

namespace fs = std::filesystem;
using namespace clifford;

namespace {

struct Flags {
  std::string scene;
  std::string out;  // solve commands default to ./out
  std::optional<double> tol;
  std::uint64_t seed = 0;
  std::optional<int> resolution;
  std::string suite;
};

class Report {
 public:
  void add(const std::string& key, const std::string& value) { text_ += key + "," + value + "\n"; }
  void add(const std::string& key, double value) { add(key, format_real(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  const std::string& text() const { return text_; }

 private:
  std::string text_ = "key,value\n";
};

Scene prepare(const Flags& flags) {
  Scene s = load_scene(flags.scene);
  if (flags.resolution) {
    if (*flags.resolution < 1) throw ConfigurationError("--resolution must be positive");
    s.resolution = *flags.resolution;
  }
  if (flags.tol) s.tolerance = *flags.tol;
  fs::create_directories(flags.out);
  return s;
}

void describe(Report& report, const std::string& command, const Scene& s, const Flags& flags, const DomainPtr& d) {
  report.add("command", command);
  report.add("scene", fs::path(flags.scene).filename().string());
  report.add("seed", std::to_string(flags.seed));
  report.add("resolution", s.resolution);
  report.add("h", d->h());
  report.add("m", s.spec.m);
  report.add("r", s.spec.r);
  report.add("p", s.spec.p);
  report.add("q", s.spec.q);
  report.add("alpha_re", s.spec.alpha.real());
  report.add("alpha_im", s.spec.alpha.imag());
  report.add("tolerance", s.tolerance);
}

// d_alpha W for a W that vanishes within two cells of the boundary, extended by
// zero to every occupied cell.
SourceData manufactured_source(const GradedField& w, const SystemSpec& spec) {
  const VoxelDomain& d = w.domain();
  const double scale = max_norm(w);
  for (Index c = 0; c < d.cell_count(); ++c) {
    if (!d.occupied(c) || d.boundary_distance(c) >= 2.0 * d.h()) continue;
    if (w.value(c).coeffs().cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ConfigurationError("manufactured field must vanish within two cells of the boundary");
    }
  }
  GradedField dw = dirac(w, spec.alpha, Side::left);
  for (Index c = 0; c < d.cell_count(); ++c) {
    if (!dw.valid(c)) dw.coeffs().col(c).setZero();
  }
  dw.set_valid_mask(d.occupancy());
  return disassemble_source(dw, spec);
}

void merge_into(SourceData& target, const SourceData& extra) {
  for (const auto& [slot, part] : extra.components) {
    auto it = target.components.find(slot);
    if (it == target.components.end()) {
      target.components.emplace(slot, part);
    } else {
      it->second += part;
    }
  }
}

void write_field(const Scene& s, const fs::path& dir, const std::string& name, const GradedField& f) {
  if (s.write_fields) write_dump(f, dir / (name + ".dump"));
  if (s.write_reports) write_text(dir / (name + "_norms.csv"), grade_norms_csv(f));
}

void report_solvability(Report& report, const Obstruction& p, const Solvability& verdict) {
  report.add("p_norm", p.max_norm);
  report.add("source_scale", p.source_scale);
  report.add("threshold", verdict.threshold);
  report.add("verdict", verdict_name(verdict.verdict));
  if (verdict.pair) {
    report.add("pair_helmholtz_f1", verdict.pair->helmholtz_f1);
    report.add("pair_helmholtz_f2", verdict.pair->helmholtz_f2);
    report.add("pair_dirac", verdict.pair->dirac);
  }
}

std::string study_csv(const std::vector<std::pair<int, std::pair<double, double>>>& rows) {
  std::string out = "resolution,h,max_abs,ratio\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& [n, values] = rows[k];
    out += std::to_string(n) + "," + format_real(values.first) + "," + format_real(values.second) + ",";
    out += k == 0 ? "" : format_real(rows[k - 1].second.second / values.second);
    out += "\n";
  }
  return out;
}

int solve_mt(const Flags& flags) {
  const Scene s = prepare(flags);
  const fs::path dir = flags.out;
  const DomainPtr d = scene_domain(s, s.resolution);
  SourceData g = scene_source(s, s.sources, d);
  std::optional<GradedField> w;
  if (!s.manufactured.empty()) {
    w = assemble(scene_solution(s, s.manufactured, d));
    merge_into(g, manufactured_source(*w, s.spec));
  }
  std::optional<GradedField> hat, tilde;
  if (!s.hat_h1.empty()) hat = assemble(scene_solution(s, s.hat_h1, d));
  if (!s.tilde_h1.empty()) tilde = assemble(scene_solution(s, s.tilde_h1, d));

  Report report;
  describe(report, "solve-mt", s, flags, d);
  const Obstruction p = compute_P(g, s.potential);
  const Solvability verdict = solvability(p, s.tolerance, tilde ? &*tilde : nullptr, s.pair);
  report_solvability(report, p, verdict);
  write_field(s, dir, "P", p.field);

  int code = 2;
  if (verdict.verdict != Verdict::inconclusive) {
    const SolutionData f = build_solution(g, s.potential, verdict.verdict, hat ? &*hat : nullptr,
                                          tilde ? &*tilde : nullptr);
    const GradedField assembled = assemble(f);
    write_field(s, dir, "solution", assembled);
    const SystemResidual r = system_residual(f, g);
    std::string csv = "family,max_abs,l2\n";
    for (const auto& fam : r.families) {
      csv += slot_name(fam.slot) + "," + format_real(fam.max_abs) + "," + format_real(fam.l2) + "\n";
    }
    csv += "route_gap," + format_real(r.route_gap) + ",\n";
    csv += "off_system," + format_real(r.off_system) + ",\n";
    if (s.write_reports) write_text(dir / "residual.csv", csv);
    report.add("residual_max", r.max_abs());
    if (w) report.add("recovery_rel", max_norm(assembled - *w) / std::max(max_norm(*w), 1e-300));
    code = 0;
  }

  if (!s.reference.empty()) {
    std::vector<std::pair<int, std::pair<double, double>>> rows;
    auto resolutions = s.study_resolutions.empty() ? std::vector<int>{s.resolution} : s.study_resolutions;
    for (int n : resolutions) {
      const DomainPtr dn = scene_domain(s, n);
      const SystemResidual r = system_residual(scene_solution(s, s.reference, dn), scene_source(s, s.sources, dn));
      rows.push_back({n, {dn->h(), r.max_abs()}});
    }
    if (s.write_reports) write_text(dir / "study.csv", study_csv(rows));
  }

  if (s.write_reports) write_text(dir / "report.csv", report.text());
  std::cout << "verdict " << verdict_name(verdict.verdict) << " (|P| = " << p.max_norm << ", threshold "
            << verdict.threshold << ")\n";
  return code;
}

int solve_maxwell_cmd(const Flags& flags) {
  const Scene s = prepare(flags);
  if (s.spec.p != 0 || s.spec.q != 0) throw ConfigurationError("Maxwell scenes need p = q = 0");
  const fs::path dir = flags.out;
  const DomainPtr d = scene_domain(s, s.resolution);
  MaxwellSource src = scene_maxwell_source(s, s.sources, d);
  std::optional<GradedField> m_exact;
  if (!s.manufactured.empty()) {
    m_exact = assemble_M(scene_pair(s, s.manufactured, d));
    const MaxwellSource extra = from_source_data(manufactured_source(*m_exact, s.spec));
    for (const auto& [grade, part] : extra.g) src.g.at(grade) += part;
  }
  std::optional<GradedField> hat, tilde;
  if (!s.hat_h1.empty()) hat = assemble_M(scene_pair(s, s.hat_h1, d));
  if (!s.tilde_h1.empty()) tilde = assemble_M(scene_pair(s, s.tilde_h1, d));

  Report report;
  describe(report, "solve-maxwell", s, flags, d);
  const MaxwellSolution sol =
      solve_maxwell(src, s.potential, s.tolerance, hat ? &*hat : nullptr, tilde ? &*tilde : nullptr, s.pair);
  report_solvability(report, sol.P, sol.solvability);
  write_field(s, dir, "P", sol.P.field);

  int code = 2;
  if (sol.M) {
    write_field(s, dir, "solution", *sol.M);
    write_field(s, dir, "E", sol.pair->E);
    write_field(s, dir, "H", sol.pair->H);
    const MaxwellResidual r = maxwell_residual(*sol.pair, src);
    std::string csv = "equation,grade,max_abs,l2\n";
    for (const auto& e : r.equations) {
      csv += e.name + "," + std::to_string(e.grade) + "," + format_real(e.max_abs) + "," + format_real(e.l2) + "\n";
    }
    csv += "identity_gap,," + format_real(r.identity_gap) + ",\n";
    if (s.write_reports) write_text(dir / "residual.csv", csv);
    report.add("residual_max", r.max_abs());
    if (m_exact) report.add("recovery_rel", max_norm(*sol.M - *m_exact) / std::max(max_norm(*m_exact), 1e-300));
    code = 0;
  }

  if (!s.reference.empty()) {
    std::vector<std::pair<int, std::pair<double, double>>> rows;
    auto resolutions = s.study_resolutions.empty() ? std::vector<int>{s.resolution} : s.study_resolutions;
    for (int n : resolutions) {
      const DomainPtr dn = scene_domain(s, n);
      const MaxwellResidual r = maxwell_residual(scene_pair(s, s.reference, dn), scene_maxwell_source(s, s.sources, dn));
      rows.push_back({n, {dn->h(), r.max_abs()}});
    }
    if (s.write_reports) write_text(dir / "study.csv", study_csv(rows));
  }

  if (s.write_reports) write_text(dir / "report.csv", report.text());
  std::cout << "verdict " << verdict_name(sol.solvability.verdict) << " (|P| = " << sol.P.max_norm << ", threshold "
            << sol.solvability.threshold << ")\n";
  return code;
}

int verify(const Flags& flags) {
  const SuiteReport report = run_suite(flags.suite, flags.seed);
  std::cout << report.table();
  if (!flags.out.empty()) {
    fs::create_directories(flags.out);
    write_text(fs::path(flags.out) / ("verify_" + flags.suite + ".csv"), report.csv());
  }
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complex Clifford analysis toolkit"};
  app.require_subcommand(1);
  Flags flags;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "seed for randomized checks")->capture_default_str();
  };
  auto solver = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--scene", flags.scene, "scene file (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--tol", flags.tol, "obstruction tolerance, relative to ||G|| diam");
    sub->add_option("--resolution", flags.resolution, "cells along the first axis");
  };
  CLI::App* mt = app.add_subcommand("solve-mt", "solvability test and solution of a Moisil-Teodorescu system");
  solver(mt);
  CLI::App* mx = app.add_subcommand("solve-maxwell", "solvability test and solution of Maxwell's equations");
  solver(mx);
  CLI::App* ver = app.add_subcommand("verify", "run a property suite");
  common(ver);
  ver->add_option("--suite", flags.suite, "algebra | factorization | kernel | borel-pompeiu | equivalence")
      ->required()
      ->check(CLI::IsMember(suite_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (!ver->parsed() && flags.out.empty()) flags.out = "out";
  try {
    if (mt->parsed()) return solve_mt(flags);
    if (mx->parsed()) return solve_maxwell_cmd(flags);
    return verify(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
