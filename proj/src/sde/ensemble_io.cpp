#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

#include "mcsle/errors.hpp"
#include "mcsle/sde.hpp"

namespace mcsle {

namespace {

constexpr std::array<char, 8> kMagic{'M', 'C', 'S', 'L', 'E', 'E', 'N', 'S'};
constexpr std::uint32_t kVersion = 1;

template <class U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> b{};
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

template <class U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!in) throw IoError("ensemble file truncated");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double d) { put_le(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_ensemble_csv(const PathEnsemble& e, std::ostream& out) {
  out << "path,t";
  for (std::size_t j = 1; j <= e.p; ++j) out << ",x_" << j;
  out << '\n';
  if (!e.stored()) return;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < e.paths; ++i) {
    for (std::size_t g = 0; g < e.grid.size(); ++g) {
      const auto s = e.snapshot(i, g);
      if (std::isnan(s[0])) break;
      out << i << ',' << e.grid[g];
      for (double v : s) out << ',' << v;
      out << '\n';
    }
  }
}

void write_ensemble_csv(const PathEnsemble& e, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_ensemble_csv(e, f);
  if (!f) throw IoError("write failed for '" + path + "'");
}

void write_ensemble_binary(const PathEnsemble& e, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.p));
  put_le<std::uint64_t>(out, e.paths);
  put_le<std::uint64_t>(out, e.grid.size());
  put_le<std::uint8_t>(out, e.stored() ? 1 : 0);
  for (double g : e.grid) put_f64(out, g);
  for (double t : e.lifetime) put_f64(out, t);
  for (PathStatus s : e.status) put_le<std::uint8_t>(out, static_cast<std::uint8_t>(s));
  for (double v : e.values) put_f64(out, v);
  put_f64(out, e.diffused_scale);
}

void write_ensemble_binary(const PathEnsemble& e, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_ensemble_binary(e, f);
  if (!f) throw IoError("write failed for '" + path + "'");
}

PathEnsemble read_ensemble_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("not an ensemble file (bad magic)");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) throw IoError("unsupported ensemble version " + std::to_string(version));
  PathEnsemble e;
  e.p = get_le<std::uint32_t>(in);
  e.paths = get_le<std::uint64_t>(in);
  const auto n_grid = get_le<std::uint64_t>(in);
  const bool stored = get_le<std::uint8_t>(in) != 0;
  e.grid.resize(n_grid);
  for (auto& g : e.grid) g = get_f64(in);
  e.lifetime.resize(e.paths);
  for (auto& t : e.lifetime) t = get_f64(in);
  e.status.resize(e.paths);
  for (auto& s : e.status) {
    const auto raw = get_le<std::uint8_t>(in);
    if (raw > 2) throw IoError("corrupt path status");
    s = static_cast<PathStatus>(raw);
  }
  if (stored) {
    e.values.resize(e.paths * n_grid * e.p);
    for (auto& v : e.values) v = get_f64(in);
  }
  e.diffused_scale = get_f64(in);
  return e;
}

PathEnsemble read_ensemble_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return read_ensemble_binary(f);
}

}  // namespace mcsle
