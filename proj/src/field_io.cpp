#include "clifford/field_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>

namespace clifford {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw ConfigurationError("field dump truncated at byte " + std::to_string(pos_));
  }
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<BladeMask> blades_of_grades(int dim, const std::vector<int>& grades) {
  std::vector<BladeMask> out;
  for (BladeMask b = 0; b < (BladeMask{1} << dim); ++b) {
    if (std::find(grades.begin(), grades.end(), grade(b)) != grades.end()) out.push_back(b);
  }
  return out;
}

FieldDump to_dump(const GradedField& f) {
  f.check_support(1e-14);
  const VoxelDomain& d = f.domain();
  FieldDump out;
  out.m = d.m();
  out.shape = d.shape();
  out.h = d.h();
  out.origin = d.origin();
  out.grades = f.grade_support();
  std::sort(out.grades.begin(), out.grades.end());
  out.blades = blades_of_grades(f.dim(), out.grades);
  out.valid = f.valid_mask();
  out.payload.resize(static_cast<Index>(out.blades.size()), d.cell_count());
  for (std::size_t k = 0; k < out.blades.size(); ++k) {
    out.payload.row(static_cast<Index>(k)) = f.coeffs().row(out.blades[k]);
  }
  // Invalid cells carry no data.
  for (Index c = 0; c < d.cell_count(); ++c) {
    if (!f.valid(c)) out.payload.col(c).setZero();
  }
  return out;
}

GradedField from_dump(const FieldDump& dump) {
  auto domain = std::make_shared<const VoxelDomain>(VoxelDomain::box(dump.m, dump.origin, dump.h, dump.shape));
  return from_dump(dump, domain);
}

GradedField from_dump(const FieldDump& dump, const DomainPtr& domain) {
  if (domain->m() != dump.m || domain->shape() != dump.shape || domain->h() != dump.h ||
      domain->origin() != dump.origin) {
    throw ConfigurationError("field dump lattice does not match the domain");
  }
  GradedField out(domain, dump.grades);
  for (std::size_t k = 0; k < dump.blades.size(); ++k) {
    out.coeffs().row(dump.blades[k]) = dump.payload.row(static_cast<Index>(k));
  }
  out.set_valid_mask(dump.valid);
  return out;
}

std::vector<std::uint8_t> encode_dump(const FieldDump& dump) {
  Writer w;
  w.bytes(kDumpMagic, sizeof(kDumpMagic));
  w.u8(kDumpVersion);
  w.u32(static_cast<std::uint32_t>(dump.m));
  for (int s : dump.shape) w.u32(static_cast<std::uint32_t>(s));
  w.f64(dump.h);
  for (Index i = 0; i < dump.origin.size(); ++i) w.f64(dump.origin[i]);
  w.u32(static_cast<std::uint32_t>(dump.grades.size()));
  for (int g : dump.grades) w.u32(static_cast<std::uint32_t>(g));
  w.u32(static_cast<std::uint32_t>(dump.blades.size()));
  for (BladeMask b : dump.blades) w.u32(b);
  for (char v : dump.valid) w.u8(v != 0 ? 1 : 0);
  for (Index c = 0; c < dump.payload.cols(); ++c) {
    for (Index k = 0; k < dump.payload.rows(); ++k) {
      w.f64(dump.payload(k, c).real());
      w.f64(dump.payload(k, c).imag());
    }
  }
  return w.take();
}

FieldDump decode_dump(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kDumpMagic) || std::memcmp(bytes.data(), kDumpMagic, sizeof(kDumpMagic)) != 0) {
    throw ConfigurationError("not a field dump (bad magic)");
  }
  Reader r(bytes);
  for (std::size_t i = 0; i < sizeof(kDumpMagic); ++i) r.u8();
  if (const int v = r.u8(); v != kDumpVersion) {
    throw ConfigurationError("unsupported field dump version " + std::to_string(v));
  }
  FieldDump out;
  out.m = static_cast<int>(r.u32());
  check_dim(out.m + 2);
  Index cells = 1;
  for (int i = 0; i <= out.m; ++i) {
    out.shape.push_back(static_cast<int>(r.u32()));
    cells *= out.shape.back();
  }
  out.h = r.f64();
  out.origin.resize(out.m + 1);
  for (int i = 0; i <= out.m; ++i) out.origin[i] = r.f64();
  const std::uint32_t ngrades = r.u32();
  for (std::uint32_t i = 0; i < ngrades; ++i) out.grades.push_back(static_cast<int>(r.u32()));
  const std::uint32_t nblades = r.u32();
  for (std::uint32_t i = 0; i < nblades; ++i) out.blades.push_back(r.u32());
  if (out.blades != blades_of_grades(out.m + 2, out.grades)) {
    throw ConfigurationError("field dump blade list does not match its grades");
  }
  out.valid.resize(static_cast<std::size_t>(cells));
  for (auto& v : out.valid) v = static_cast<char>(r.u8());
  out.payload.resize(nblades, cells);
  for (Index c = 0; c < cells; ++c) {
    for (Index k = 0; k < static_cast<Index>(nblades); ++k) {
      const double re = r.f64();
      out.payload(k, c) = Complex(re, r.f64());
    }
  }
  if (!r.done()) throw ConfigurationError("field dump has trailing bytes");
  return out;
}

void write_dump(const GradedField& f, const std::filesystem::path& path) {
  const auto bytes = encode_dump(to_dump(f));
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write " + path.string());
}

FieldDump read_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_dump(bytes);
}

std::string grade_norms_csv(const GradedField& f) {
  std::string out = "grade,max_abs,l2\n";
  for (int g : f.grade_support()) {
    const GradedField part = project_grades(f, {g});
    out += std::to_string(g) + "," + format_real(max_norm(part)) + "," + format_real(l2_norm(part)) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace clifford
