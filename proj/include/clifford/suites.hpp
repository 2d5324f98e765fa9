#pragma once

// Property suites shared by `clifford verify` and the acceptance runner.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "clifford/maxwell.hpp"

namespace clifford {

struct Check {
  std::string name;
  double measured = 0.0;
  double limit = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  bool pass() const;
  std::string table() const;
  std::string csv() const;
};

using Rng = std::mt19937_64;

Mv random_mv(int dim, Rng& rng);
// Pure grade-s component in e_0..e_m with entries uniform in [-1,1] + i[-1,1].
GradedField random_component(const DomainPtr& domain, int s, Rng& rng);
// Every blade of the algebra filled.
GradedField random_field(const DomainPtr& domain, Rng& rng);

// phi(x) e_0 + i phi(x) e_{m+1}, phi = (1 - |x - c|^2 / R^2)^3 with c the centre
// of the unit box and R = 0.4: an element of the (m=2, r=0, p=0, q=1) subspace.
FieldFunction manufactured_bump(int m);

std::vector<Check> check_algebra(std::uint64_t seed);
std::vector<Check> check_factorization(std::uint64_t seed);
std::vector<Check> check_system_equivalence(std::uint64_t seed);
std::vector<Check> check_maxwell_identity(std::uint64_t seed);
std::vector<Check> check_kernel();
std::vector<Check> check_borel_pompeiu();
std::vector<Check> check_round_trip();
std::vector<Check> check_plane_wave(std::uint64_t seed);

const std::vector<std::string>& suite_names();
// algebra | factorization | kernel | borel-pompeiu | equivalence.
// Throws ConfigurationError for anything else.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

}  // namespace clifford
