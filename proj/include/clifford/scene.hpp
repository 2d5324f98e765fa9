#pragma once

// YAML scene files driving the command-line tool. Schema version 1:
//
//   version: 1
//   algebra: {m: 2}
//   system: {r: 0, p: 0, q: 1, alpha_re: 0, alpha_im: 1}
//   domain: {origin: [0, 0, 0], extent: [1, 1, 1], resolution: 24}
//   sources: [term, ...]        right-hand side components
//   manufactured: [term, ...]   optional W; the source becomes d_alpha W
//   hat_h1: [term, ...]         optional alpha-monogenic addition
//   tilde_h1: [term, ...]       optional hyper-conjugate candidate
//   reference: [term, ...]      optional exact solution for a residual study
//   study: {resolutions: [8, 16, 32]}
//   solver: {tolerance: 1e-2, singular_cell_policy: skip, refinement_depth: 0,
//            kernel_tolerance: 1e-10, pair_tolerance: 1e-2, pair_margin: 0}
//   outputs: {fields: true, reports: true}
//
// A term names its slot (family: plain | em1, grade: s) or, in Maxwell scenes,
// field: E | H (solutions) or grade: s (sources), and a generator:
//   zero
//   constant    {coefficients: {e0_1: [re, im], ...}}
//   monomial    {exponents: [a0, ...], blade, coefficient}
//   bump        {center, radius, power (3), blade, coefficient}
//   plane_wave  {wavevector, blade, coefficient}    coefficient * exp(i k.x)
//   grid        {path}                              a field dump on the same lattice

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clifford/maxwell.hpp"

namespace clifford {

struct SceneTerm {
  int line = 0;
  std::optional<Family> family;  // implied by grade parity when absent
  int grade = 0;
  std::string field;  // "E" / "H" for Maxwell solution terms
  std::string generator = "zero";
  std::vector<std::pair<BladeMask, Complex>> coefficients;
  std::vector<int> exponents;
  Point center;
  double radius = 0.0;
  double power = 3.0;
  Point wavevector;
  std::filesystem::path path;
};

struct Scene {
  std::filesystem::path file;
  int version = 1;
  SystemSpec spec;
  Point origin;
  Point extent;
  int resolution = 16;
  std::vector<SceneTerm> sources;
  std::vector<SceneTerm> manufactured;
  std::vector<SceneTerm> hat_h1;
  std::vector<SceneTerm> tilde_h1;
  std::vector<SceneTerm> reference;
  std::vector<int> study_resolutions;
  double tolerance = 1e-2;
  PotentialConfig potential;
  PairOptions pair;
  bool write_fields = true;
  bool write_reports = true;
};

// Throws SceneError with a "file:line: " prefix.
Scene load_scene(const std::filesystem::path& file);
Scene parse_scene(const std::string& text, const std::filesystem::path& file = "<scene>");

// Cubic cells of side extent[0] / resolution over the scene box.
DomainPtr scene_domain(const Scene& scene, int resolution);

// Pure grade component field in e_0..e_m for a term.
GradedField realize_term(const SceneTerm& term, const DomainPtr& domain, int grade);

// Sum of terms by slot, Moisil-Teodorescu reading.
SolutionData scene_solution(const Scene& scene, const std::vector<SceneTerm>& terms, const DomainPtr& domain);
SourceData scene_source(const Scene& scene, const std::vector<SceneTerm>& terms, const DomainPtr& domain);
// Maxwell reading: E/H terms, and sources keyed by grade r-1..r+2.
EMPair scene_pair(const Scene& scene, const std::vector<SceneTerm>& terms, const DomainPtr& domain);
MaxwellSource scene_maxwell_source(const Scene& scene, const std::vector<SceneTerm>& terms, const DomainPtr& domain);

}  // namespace clifford
