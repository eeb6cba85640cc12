#include "psidyn/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace psidyn {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; this build targets LE hosts");

namespace {

constexpr char kMagic[16] = {'P', 'S', 'I', 'D', 'Y', 'N', '-', 'F',
                             'I', 'E', 'L', 'D', '\0', '\0', '\0', '\0'};

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw InvalidArgument("truncated field file: " + path);
  }
  return v;
}

} // namespace

void dump_field(const Field& f, const std::string& path) {
  if (!f.grid) throw InvalidArgument("dump_field: empty field");
  require_finite(f, "dump_field");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open for writing: " + path);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid->dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid->n()));
  put<std::uint32_t>(out, f.side == Side::Frequency ? 1u : 0u);
  put<double>(out, f.grid->extent());
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(Complex)));
  if (!out) throw InvalidArgument("write failed: " + path);
}

Field load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open field file: " + path);
  char magic[16];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw InvalidArgument("not a field file (bad magic): " + path);
  }
  const auto dim = get<std::uint32_t>(in, path);
  const auto n = get<std::uint32_t>(in, path);
  const auto side_flag = get<std::uint32_t>(in, path);
  const auto extent = get<double>(in, path);
  if (side_flag > 1) throw InvalidArgument("bad side flag in field file: " + path);
  GridPtr grid = make_grid(static_cast<int>(dim), static_cast<int>(n), extent);
  Field f = Field::zeros(grid, side_flag == 1 ? Side::Frequency : Side::Physical);
  if (!in.read(reinterpret_cast<char*>(f.values.data()),
               static_cast<std::streamsize>(f.values.size() * sizeof(Complex)))) {
    throw InvalidArgument("truncated field file: " + path);
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw InvalidArgument("trailing bytes in field file: " + path);
  }
  return f;
}

std::string field_csv(const Field& f) {
  if (!f.grid) throw InvalidArgument("field_csv: empty field");
  const int d = f.grid->dim();
  std::string out;
  for (int a = 0; a < d; ++a) {
    out += 'i';
    out += static_cast<char>('0' + a);
    out += ',';
  }
  out += "re,im\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto idx = f.grid->unravel(k);
    for (int a = 0; a < d; ++a) {
      std::snprintf(buf, sizeof buf, "%d", idx[static_cast<std::size_t>(a)]);
      out += buf;
      out += ',';
    }
    fmt(f.values[k].real());
    out += ',';
    fmt(f.values[k].imag());
    out += '\n';
  }
  return out;
}

void dump_field_csv(const Field& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open for writing: " + path);
  const std::string body = field_csv(f);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw InvalidArgument("write failed: " + path);
}

} // namespace psidyn
