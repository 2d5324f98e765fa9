#pragma once

// Binary field dumps and CSV summaries.
//
// Dump layout, all integers and floats little-endian:
//   "CLFDUMP\0"                 8 bytes
//   version                     u8 (= 1)
//   m                           u32
//   shape                       (m+1) x u32
//   h                           f64
//   origin                      (m+1) x f64
//   grade count, grades         u32, count x u32
//   blade count, blade masks    u32, count x u32 (ascending)
//   valid flags                 cells x u8
//   payload                     cells x blades x (re f64, im f64), cell-major

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "clifford/fields.hpp"

namespace clifford {

inline constexpr char kDumpMagic[8] = {'C', 'L', 'F', 'D', 'U', 'M', 'P', '\0'};
inline constexpr std::uint8_t kDumpVersion = 1;

struct FieldDump {
  int m = 0;
  std::vector<int> shape;
  double h = 0.0;
  Point origin;
  std::vector<int> grades;
  std::vector<BladeMask> blades;
  std::vector<char> valid;
  Eigen::MatrixXcd payload;  // blades x cells
};

// Blades of the given grades, ascending mask order.
std::vector<BladeMask> blades_of_grades(int dim, const std::vector<int>& grades);

FieldDump to_dump(const GradedField& f);
// Field on a fully occupied box lattice with the dump's valid flags.
GradedField from_dump(const FieldDump& dump);
// Field on an existing domain; throws ConfigurationError if the lattice differs.
GradedField from_dump(const FieldDump& dump, const DomainPtr& domain);

std::vector<std::uint8_t> encode_dump(const FieldDump& dump);
FieldDump decode_dump(const std::vector<std::uint8_t>& bytes);

void write_dump(const GradedField& f, const std::filesystem::path& path);
FieldDump read_dump(const std::filesystem::path& path);

// grade,max_abs,l2 rows for every grade in the field's support.
std::string grade_norms_csv(const GradedField& f);

// Writes text to a file, throwing Error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

// Round-trippable decimal rendering of a double.
std::string format_real(double v);

}  // namespace clifford
