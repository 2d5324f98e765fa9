#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "clifford/field_io.hpp"
#include "clifford/suites.hpp"

using namespace clifford;

namespace {

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return std::uint32_t(b[at]) | std::uint32_t(b[at + 1]) << 8 | std::uint32_t(b[at + 2]) << 16 |
         std::uint32_t(b[at + 3]) << 24;
}

}  // namespace

TEST_CASE("blades of grades") {
  CHECK(blades_of_grades(4, {1}) == std::vector<BladeMask>{1, 2, 4, 8});
  CHECK(blades_of_grades(3, {0, 2}) == std::vector<BladeMask>{0, 3, 5, 6});
}

TEST_CASE("header layout") {
  const auto d = std::make_shared<const VoxelDomain>(VoxelDomain::box(2, Point::Constant(3, -0.5), 0.25, {2, 3, 4}));
  const GradedField f = sample(d, [](const Point& x) { return Mv::blade(4, 0b011, Complex(x[0], x[2])); }, {2});
  const auto bytes = encode_dump(to_dump(f));
  CHECK(std::memcmp(bytes.data(), "CLFDUMP\0", 8) == 0);
  CHECK(bytes[8] == 1);
  CHECK(read_u32(bytes, 9) == 2);
  CHECK(read_u32(bytes, 13) == 2);
  CHECK(read_u32(bytes, 17) == 3);
  CHECK(read_u32(bytes, 21) == 4);
  double h = 0.0;
  std::memcpy(&h, bytes.data() + 25, 8);
  CHECK(h == 0.25);
  const std::size_t grades_at = 25 + 8 + 3 * 8;
  CHECK(read_u32(bytes, grades_at) == 1);
  CHECK(read_u32(bytes, grades_at + 4) == 2);
  CHECK(read_u32(bytes, grades_at + 8) == 6);  // C(4,2) blades
  const std::size_t cells = 24, blades = 6;
  const std::size_t header = grades_at + 12 + 4 * blades;
  CHECK(bytes.size() == header + cells + cells * blades * 16);
  // first payload value: cell 0, blade e0_1
  double re = 0.0, im = 0.0;
  std::memcpy(&re, bytes.data() + header + cells, 8);
  std::memcpy(&im, bytes.data() + header + cells + 8, 8);
  CHECK(re == d->center(0)[0]);
  CHECK(im == d->center(0)[2]);
}

TEST_CASE("round trip is bit exact") {
  Rng rng(21);
  const auto d = std::make_shared<const VoxelDomain>(VoxelDomain::unit_box(2, 5));
  const GradedField f = random_field(d, rng);
  const auto bytes = encode_dump(to_dump(f));
  const FieldDump back = decode_dump(bytes);
  CHECK(encode_dump(back) == bytes);
  const GradedField g = from_dump(back, d);
  CHECK((g.coeffs().array() == f.coeffs().array()).all());

  const auto path = std::filesystem::temp_directory_path() / "clifford_test_roundtrip.dump";
  write_dump(f, path);
  const GradedField h = from_dump(read_dump(path));
  CHECK((h.coeffs().array() == f.coeffs().array()).all());
  CHECK(h.domain().same_lattice(*d));
  std::filesystem::remove(path);
}

TEST_CASE("invalid cells are written as zeros") {
  Rng rng(22);
  const auto d = std::make_shared<const VoxelDomain>(VoxelDomain::unit_box(2, 4));
  const GradedField f = d_pm(random_component(d, 1, rng), DiracPart::plus);
  const FieldDump dump = to_dump(f);
  for (Index c = 0; c < d->cell_count(); ++c) {
    if (!f.valid(c)) CHECK(dump.payload.col(c).norm() == 0.0);
  }
  CHECK(decode_dump(encode_dump(dump)).valid == f.valid_mask());
}

TEST_CASE("malformed dumps") {
  const auto d = std::make_shared<const VoxelDomain>(VoxelDomain::unit_box(2, 3));
  const auto good = encode_dump(to_dump(sample(d, [](const Point&) { return Mv::scalar(4, 1.0); }, {0})));
  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_dump(bad), Error);
  bad = good;
  bad[8] = 2;
  CHECK_THROWS_AS(decode_dump(bad), Error);
  bad = good;
  bad.pop_back();
  CHECK_THROWS_AS(decode_dump(bad), Error);
  bad = good;
  bad.push_back(0);
  CHECK_THROWS_AS(decode_dump(bad), Error);
  CHECK_THROWS_AS(decode_dump({}), Error);
  CHECK_THROWS_AS(read_dump("/nonexistent/field.dump"), Error);
  const auto other = std::make_shared<const VoxelDomain>(VoxelDomain::unit_box(2, 4));
  CHECK_THROWS_AS(from_dump(decode_dump(good), other), ConfigurationError);
}

TEST_CASE("csv summaries") {
  const auto d = std::make_shared<const VoxelDomain>(VoxelDomain::unit_box(2, 2));
  const GradedField f = sample(d, [](const Point&) { return Mv::blade(4, 0b1, Complex(3.0, 4.0)); }, {1});
  const std::string csv = grade_norms_csv(f);
  CHECK(csv.rfind("grade,max_abs,l2\n1,5,", 0) == 0);
  CHECK(format_real(0.1) == "0.1");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}
