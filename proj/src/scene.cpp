#include "clifford/scene.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "clifford/field_io.hpp"

namespace clifford {

namespace {

class Parser {
 public:
  explicit Parser(std::filesystem::path file) : file_(std::move(file)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw SceneError(file_.string() + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const { fail(line(n), msg); }
  static int line(const YAML::Node& n) { return n.Mark().line + 1; }

  void keys(const YAML::Node& map, const std::string& where, std::initializer_list<const char*> allowed) const {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!ok.contains(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  template <class T>
  T get(const YAML::Node& map, const char* key, const T& fallback) const {
    const YAML::Node n = map[key];
    if (!n.IsDefined() || n.IsNull()) return fallback;
    return as<T>(n, key);
  }

  template <class T>
  T need(const YAML::Node& map, const char* key) const {
    const YAML::Node n = map[key];
    if (!n.IsDefined() || n.IsNull()) fail(map, std::string("missing key '") + key + "'");
    return as<T>(n, key);
  }

  template <class T>
  T as(const YAML::Node& n, const std::string& what) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, "bad value for '" + what + "'");
    }
  }

  Point point(const YAML::Node& n, int size, const std::string& what) const {
    if (!n.IsSequence() || static_cast<int>(n.size()) != size) {
      fail(n, "'" + what + "' must be a list of " + std::to_string(size) + " numbers");
    }
    Point out(size);
    for (int i = 0; i < size; ++i) out[i] = as<double>(n[i], what);
    return out;
  }

  Complex complex(const YAML::Node& n, const std::string& what) const {
    if (n.IsScalar()) return {as<double>(n, what), 0.0};
    if (n.IsSequence() && n.size() == 2) return {as<double>(n[0], what), as<double>(n[1], what)};
    fail(n, "'" + what + "' must be a number or [re, im]");
  }

  // "e" is the scalar blade, "e0_2" is e_0 e_2.
  BladeMask blade(const YAML::Node& n, int m) const {
    const auto name = as<std::string>(n, "blade");
    if (name.empty() || name[0] != 'e') fail(n, "bad blade name '" + name + "'");
    BladeMask out = 0;
    std::stringstream rest(name.substr(1));
    std::string part;
    int previous = -1;
    while (std::getline(rest, part, '_')) {
      int i = -1;
      try {
        std::size_t used = 0;
        i = std::stoi(part, &used);
        if (used != part.size()) i = -1;
      } catch (const std::exception&) {
        i = -1;
      }
      if (i < 0 || i > m || i <= previous) fail(n, "bad blade name '" + name + "' (generators e0..e" + std::to_string(m) + ", ascending)");
      out |= generator(i);
      previous = i;
    }
    return out;
  }

  SceneTerm term(const YAML::Node& n, int m) const {
    keys(n, "term", {"family", "grade", "field", "generator", "coefficients", "exponents", "center", "radius", "power",
                     "wavevector", "blade", "coefficient", "path"});
    SceneTerm t;
    t.line = line(n);
    t.grade = get<int>(n, "grade", -1);
    t.field = get<std::string>(n, "field", "");
    if (!t.field.empty() && t.field != "E" && t.field != "H") fail(n["field"], "field must be E or H");
    const auto family = get<std::string>(n, "family", "");
    if (family == "em1") {
      t.family = Family::em1;
    } else if (family == "plain") {
      t.family = Family::plain;
    } else if (!family.empty() && family != "plain") {
      fail(n["family"], "family must be plain or em1");
    }
    if (t.grade < 0 && t.field.empty()) fail(n, "term needs a grade (or field: E|H)");
    t.generator = get<std::string>(n, "generator", "zero");
    const int axes = m + 1;
    auto single = [&] {
      t.coefficients.emplace_back(blade(need<YAML::Node>(n, "blade"), m),
                                  n["coefficient"] ? complex(n["coefficient"], "coefficient") : Complex(1.0, 0.0));
    };
    if (t.generator == "zero") {
    } else if (t.generator == "constant") {
      const YAML::Node c = need<YAML::Node>(n, "coefficients");
      if (!c.IsMap()) fail(c, "coefficients must map blade names to values");
      for (const auto& kv : c) t.coefficients.emplace_back(blade(kv.first, m), complex(kv.second, "coefficients"));
    } else if (t.generator == "monomial") {
      const YAML::Node e = need<YAML::Node>(n, "exponents");
      const Point p = point(e, axes, "exponents");
      for (int i = 0; i < axes; ++i) {
        if (p[i] < 0 || p[i] != std::floor(p[i])) fail(e, "exponents must be non-negative integers");
        t.exponents.push_back(static_cast<int>(p[i]));
      }
      single();
    } else if (t.generator == "bump") {
      t.center = point(need<YAML::Node>(n, "center"), axes, "center");
      t.radius = need<double>(n, "radius");
      t.power = get<double>(n, "power", 3.0);
      if (!(t.radius > 0.0) || !(t.power >= 1.0)) fail(n, "bump needs radius > 0 and power >= 1");
      single();
    } else if (t.generator == "plane_wave") {
      t.wavevector = point(need<YAML::Node>(n, "wavevector"), axes, "wavevector");
      single();
    } else if (t.generator == "grid") {
      t.path = need<std::string>(n, "path");
      if (t.path.is_relative()) t.path = file_.parent_path() / t.path;
    } else {
      fail(n["generator"], "unknown generator '" + t.generator + "'");
    }
    return t;
  }

  std::vector<SceneTerm> terms(const YAML::Node& root, const char* key, int m) const {
    std::vector<SceneTerm> out;
    const YAML::Node list = root[key];
    if (!list.IsDefined() || list.IsNull()) return out;
    if (!list.IsSequence()) fail(list, std::string("'") + key + "' must be a list of terms");
    for (const auto& n : list) out.push_back(term(n, m));
    return out;
  }

  Scene scene(const YAML::Node& root) const {
    if (!root.IsMap()) fail(root, "scene must be a mapping");
    keys(root, "scene", {"version", "algebra", "system", "domain", "sources", "manufactured", "hat_h1", "tilde_h1",
                         "reference", "study", "solver", "outputs"});
    Scene s;
    s.file = file_;
    s.version = need<int>(root, "version");
    if (s.version != 1) fail(root["version"], "unsupported scene version " + std::to_string(s.version));

    const YAML::Node algebra = need<YAML::Node>(root, "algebra");
    keys(algebra, "algebra", {"m"});
    s.spec.m = need<int>(algebra, "m");
    if (s.spec.m < 1 || s.spec.m + 2 > kMaxDim) fail(algebra, "m out of range");

    const YAML::Node system = need<YAML::Node>(root, "system");
    keys(system, "system", {"r", "p", "q", "alpha_re", "alpha_im"});
    s.spec.r = need<int>(system, "r");
    s.spec.p = get<int>(system, "p", 0);
    s.spec.q = get<int>(system, "q", 0);
    s.spec.alpha = {get<double>(system, "alpha_re", 0.0), get<double>(system, "alpha_im", 0.0)};
    try {
      validate_spec(s.spec);
    } catch (const SpecError& e) {
      fail(system, e.what());
    }

    const int axes = s.spec.m + 1;
    const YAML::Node domain = need<YAML::Node>(root, "domain");
    keys(domain, "domain", {"origin", "extent", "resolution"});
    s.origin = domain["origin"] ? point(domain["origin"], axes, "origin") : Point::Zero(axes);
    s.extent = domain["extent"] ? point(domain["extent"], axes, "extent") : Point::Ones(axes);
    s.resolution = need<int>(domain, "resolution");
    if (s.resolution < 1) fail(domain["resolution"], "resolution must be positive");
    if ((s.extent.array() <= 0.0).any()) fail(domain["extent"], "extent must be positive");

    s.sources = terms(root, "sources", s.spec.m);
    s.manufactured = terms(root, "manufactured", s.spec.m);
    s.hat_h1 = terms(root, "hat_h1", s.spec.m);
    s.tilde_h1 = terms(root, "tilde_h1", s.spec.m);
    s.reference = terms(root, "reference", s.spec.m);

    if (const YAML::Node study = root["study"]; study.IsDefined()) {
      keys(study, "study", {"resolutions"});
      const YAML::Node res = need<YAML::Node>(study, "resolutions");
      if (!res.IsSequence()) fail(res, "resolutions must be a list");
      for (const auto& r : res) {
        s.study_resolutions.push_back(as<int>(r, "resolutions"));
        if (s.study_resolutions.back() < 1) fail(r, "resolution must be positive");
      }
    }

    s.potential.kernel.n = axes;
    s.potential.kernel.alpha = s.spec.alpha;
    if (const YAML::Node solver = root["solver"]; solver.IsDefined()) {
      keys(solver, "solver", {"tolerance", "singular_cell_policy", "refinement_depth", "kernel_tolerance",
                              "pair_tolerance", "pair_margin"});
      s.tolerance = get<double>(solver, "tolerance", s.tolerance);
      const auto policy = get<std::string>(solver, "singular_cell_policy", "skip");
      if (policy == "refine") {
        s.potential.singular_cell_policy = SingularCellPolicy::refine;
      } else if (policy != "skip") {
        fail(solver["singular_cell_policy"], "singular_cell_policy must be skip or refine");
      }
      s.potential.refinement_depth = get<int>(solver, "refinement_depth", 0);
      s.potential.kernel.tolerance = get<double>(solver, "kernel_tolerance", s.potential.kernel.tolerance);
      s.pair.tol = get<double>(solver, "pair_tolerance", s.pair.tol);
      s.pair.margin = get<double>(solver, "pair_margin", s.pair.margin);
    }
    try {
      check_kernel_params(s.potential.kernel);
    } catch (const UnsupportedParameterError& e) {
      fail(system, e.what());
    }

    if (const YAML::Node outputs = root["outputs"]; outputs.IsDefined()) {
      keys(outputs, "outputs", {"fields", "reports"});
      s.write_fields = get<bool>(outputs, "fields", true);
      s.write_reports = get<bool>(outputs, "reports", true);
    }
    return s;
  }

 private:
  std::filesystem::path file_;
};

[[noreturn]] void term_error(const SceneTerm& t, const std::string& msg) {
  throw SceneError("term at line " + std::to_string(t.line) + ": " + msg);
}

// Family implied by the grade parity relative to r.
Family implied_family(const SystemSpec& spec, int grade, bool solution) {
  const bool same_parity = (grade - spec.r) % 2 == 0;
  return (same_parity != solution) ? Family::plain : Family::em1;
}

template <class Data>
void add_terms(Data& data, const Scene& scene, const std::vector<SceneTerm>& terms, const std::vector<Slot>& slots,
               bool solution) {
  for (const SceneTerm& t : terms) {
    if (t.grade < 0) term_error(t, "needs a grade");
    const Slot slot{implied_family(scene.spec, t.grade, solution), t.grade};
    if (t.family && *t.family != slot.family) {
      term_error(t, "grade " + std::to_string(t.grade) + " belongs to the " +
                        (slot.family == Family::plain ? "plain" : "em1") + " family in this system");
    }
    if (std::find(slots.begin(), slots.end(), slot) == slots.end()) {
      term_error(t, "grade " + std::to_string(t.grade) + " is not part of this system");
    }
    GradedField part = realize_term(t, data.domain, t.grade);
    auto it = data.components.find(slot);
    if (it == data.components.end()) {
      data.components.emplace(slot, std::move(part));
    } else {
      it->second += part;
    }
  }
}

}  // namespace

Scene parse_scene(const std::string& text, const std::filesystem::path& file) {
  Parser parser(file);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    parser.fail(e.mark.line + 1, e.msg);
  }
  return parser.scene(root);
}

Scene load_scene(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SceneError(file.string() + ":0: cannot open scene file");
  std::stringstream text;
  text << in.rdbuf();
  return parse_scene(text.str(), file);
}

DomainPtr scene_domain(const Scene& scene, int resolution) {
  const double h = scene.extent[0] / resolution;
  std::vector<int> shape;
  for (Index i = 0; i < scene.extent.size(); ++i) {
    const double cells = scene.extent[i] / h;
    const long rounded = std::lround(cells);
    if (rounded < 1 || std::abs(cells - static_cast<double>(rounded)) > 1e-9 * cells) {
      throw SceneError(scene.file.string() + ":0: extent " + std::to_string(scene.extent[i]) +
                       " is not a whole number of cells of side " + std::to_string(h));
    }
    shape.push_back(static_cast<int>(rounded));
  }
  return std::make_shared<const VoxelDomain>(VoxelDomain::box(scene.spec.m, scene.origin, h, shape));
}

GradedField realize_term(const SceneTerm& t, const DomainPtr& domain, int grade_s) {
  const int m = domain->m();
  const int dim = m + 2;
  for (const auto& [b, c] : t.coefficients) {
    if (grade(b) != grade_s) term_error(t, "blade " + blade_name(b) + " is not of grade " + std::to_string(grade_s));
  }
  if (t.generator == "grid") {
    const GradedField full = from_dump(read_dump(t.path), domain);
    GradedField out = extract(full, {Family::plain, grade_s}, m, Convention::left);
    GradedField rest = full;
    rest -= out;
    if (max_norm(rest) > 1e-12 * std::max(1.0, max_norm(full))) {
      term_error(t, "grid field is not a pure grade-" + std::to_string(grade_s) + " field in e0..e" + std::to_string(m));
    }
    return out;
  }
  const Complex i{0.0, 1.0};
  std::function<Complex(const Point&)> profile;
  if (t.generator == "zero") {
    return GradedField(domain, {grade_s});
  } else if (t.generator == "constant") {
    profile = [](const Point&) { return Complex(1.0, 0.0); };
  } else if (t.generator == "monomial") {
    profile = [&](const Point& x) {
      double v = 1.0;
      for (std::size_t k = 0; k < t.exponents.size(); ++k) v *= std::pow(x[static_cast<Index>(k)], t.exponents[k]);
      return Complex(v, 0.0);
    };
  } else if (t.generator == "bump") {
    profile = [&](const Point& x) {
      const double u = 1.0 - (x - t.center).squaredNorm() / (t.radius * t.radius);
      return Complex(u > 0.0 ? std::pow(u, t.power) : 0.0, 0.0);
    };
  } else if (t.generator == "plane_wave") {
    profile = [&](const Point& x) { return std::exp(i * t.wavevector.dot(x)); };
  } else {
    term_error(t, "unknown generator '" + t.generator + "'");
  }
  return sample(
      domain,
      [&](const Point& x) {
        Mv v(dim);
        const Complex p = profile(x);
        for (const auto& [b, c] : t.coefficients) v[b] += c * p;
        return v;
      },
      {grade_s});
}

SolutionData scene_solution(const Scene& scene, const std::vector<SceneTerm>& terms, const DomainPtr& domain) {
  SolutionData out = make_solution(scene.spec, domain);
  out.components.clear();
  add_terms(out, scene, terms, solution_slots(scene.spec), true);
  return out;
}

SourceData scene_source(const Scene& scene, const std::vector<SceneTerm>& terms, const DomainPtr& domain) {
  SourceData out = make_source(scene.spec, domain);
  out.components.clear();
  add_terms(out, scene, terms, source_slots(scene.spec), false);
  return out;
}

EMPair scene_pair(const Scene& scene, const std::vector<SceneTerm>& terms, const DomainPtr& domain) {
  const int r = scene.spec.r;
  EMPair out = make_pair(domain, r, scene.spec.alpha);
  for (const SceneTerm& t : terms) {
    std::string which = t.field;
    if (which.empty()) which = t.grade == r ? "E" : t.grade == r + 1 ? "H" : "";
    if (which == "E" && (t.grade < 0 || t.grade == r)) {
      out.E += realize_term(t, domain, r);
    } else if (which == "H" && (t.grade < 0 || t.grade == r + 1)) {
      out.H += realize_term(t, domain, r + 1);
    } else {
      term_error(t, "Maxwell terms are E (grade r) or H (grade r+1)");
    }
  }
  return out;
}

MaxwellSource scene_maxwell_source(const Scene& scene, const std::vector<SceneTerm>& terms, const DomainPtr& domain) {
  MaxwellSource out = zero_maxwell_source(domain, scene.spec.r, scene.spec.alpha);
  for (const SceneTerm& t : terms) {
    auto it = out.g.find(t.grade);
    if (it == out.g.end()) term_error(t, "Maxwell source grades are r-1..r+2 within 0..m+1");
    it->second += realize_term(t, domain, t.grade);
  }
  return out;
}

}  // namespace clifford
