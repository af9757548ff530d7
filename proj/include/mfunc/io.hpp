#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "mfunc/density.hpp"
#include "mfunc/empirical.hpp"

namespace mfunc {

//! Shortest round-trip decimal representation.
inline std::string shortest_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_hex(std::string_view s) {
  static const char* hexd = "0123456789abcdef";
  std::uint64_t h = fnv1a64(s);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hexd[h & 0xf];
    h >>= 4;
  }
  return out;
}

// --- binary grid container --------------------------------------------------
//
// Layout (little-endian):
//   char[8] magic "MFGRID01"
//   u32 kind (0 = characteristic, 1 = density)
//   u32 n
//   f64 sigma, f64 half_width (z_max or w_max), u64 p_max
//   f64 err_a, f64 err_b, f64 err_c, f64 err_d   (kind-specific error fields)
//   u64 config_digest
//   u32 name_len, name bytes
//   samples row-major: kind 0 -> n*n complex values then n*n f64 abs_err;
//                      kind 1 -> n*n f64 values.

namespace detail {

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("grid file: truncated");
  return v;
}

inline constexpr char kGridMagic[8] = {'M', 'F', 'G', 'R', 'I', 'D', '0', '1'};

}  // namespace detail

inline void save_grid(const std::filesystem::path& path, const CharacteristicGrid& g,
                      std::uint64_t config_digest = 0) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out.write(detail::kGridMagic, 8);
  detail::put<std::uint32_t>(out, 0);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n));
  detail::put<double>(out, g.sigma);
  detail::put<double>(out, g.z_max);
  detail::put<std::uint64_t>(out, g.p_max);
  detail::put<double>(out, g.tail_cert);
  detail::put<double>(out, g.boundary_max);
  detail::put<double>(out, 0.0);
  detail::put<double>(out, 0.0);
  detail::put<std::uint64_t>(out, config_digest);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.spec_name.size()));
  out.write(g.spec_name.data(), static_cast<std::streamsize>(g.spec_name.size()));
  out.write(reinterpret_cast<const char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(std::complex<double>)));
  out.write(reinterpret_cast<const char*>(g.abs_err.data()),
            static_cast<std::streamsize>(g.abs_err.size() * sizeof(double)));
}

inline void save_grid(const std::filesystem::path& path, const DensityGrid& g,
                      std::uint64_t config_digest = 0) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out.write(detail::kGridMagic, 8);
  detail::put<std::uint32_t>(out, 1);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n));
  detail::put<double>(out, g.sigma);
  detail::put<double>(out, g.w_max);
  detail::put<std::uint64_t>(out, 0);
  detail::put<double>(out, g.eps_mass);
  detail::put<double>(out, g.eps_ring);
  detail::put<double>(out, g.imag_residue);
  detail::put<double>(out, g.inversion_err);
  detail::put<std::uint64_t>(out, config_digest);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.spec_name.size()));
  out.write(g.spec_name.data(), static_cast<std::streamsize>(g.spec_name.size()));
  out.write(reinterpret_cast<const char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(double)));
}

namespace detail {

inline void read_grid_header(std::ifstream& in, std::uint32_t expect_kind, std::uint32_t& n,
                             double& sigma, double& half, std::uint64_t& p_max, double err[4],
                             std::uint64_t& digest, std::string& name) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kGridMagic, 8) != 0)
    throw std::runtime_error("grid file: bad magic");
  const auto kind = get<std::uint32_t>(in);
  if (kind != expect_kind) throw std::runtime_error("grid file: wrong kind");
  n = get<std::uint32_t>(in);
  sigma = get<double>(in);
  half = get<double>(in);
  p_max = get<std::uint64_t>(in);
  for (int i = 0; i < 4; ++i) err[i] = get<double>(in);
  digest = get<std::uint64_t>(in);
  const auto len = get<std::uint32_t>(in);
  name.resize(len);
  in.read(name.data(), len);
  if (!in) throw std::runtime_error("grid file: truncated name");
}

}  // namespace detail

inline CharacteristicGrid load_characteristic_grid(const std::filesystem::path& path,
                                                   std::uint64_t* digest_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::uint32_t n;
  double sigma, half, err[4];
  std::uint64_t p_max, digest;
  std::string name;
  detail::read_grid_header(in, 0, n, sigma, half, p_max, err, digest, name);
  CharacteristicGrid g;
  g.n = static_cast<int>(n);
  g.sigma = sigma;
  g.z_max = half;
  g.p_max = p_max;
  g.tail_cert = err[0];
  g.boundary_max = err[1];
  g.spec_name = name;
  g.values.resize(static_cast<std::size_t>(n) * n);
  g.abs_err.resize(g.values.size());
  in.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(g.values.size() * sizeof(std::complex<double>)));
  in.read(reinterpret_cast<char*>(g.abs_err.data()),
          static_cast<std::streamsize>(g.abs_err.size() * sizeof(double)));
  if (!in) throw std::runtime_error("grid file: truncated data");
  if (digest_out) *digest_out = digest;
  return g;
}

inline DensityGrid load_density_grid(const std::filesystem::path& path,
                                     std::uint64_t* digest_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::uint32_t n;
  double sigma, half, err[4];
  std::uint64_t p_max, digest;
  std::string name;
  detail::read_grid_header(in, 1, n, sigma, half, p_max, err, digest, name);
  DensityGrid g;
  g.n = static_cast<int>(n);
  g.sigma = sigma;
  g.w_max = half;
  g.eps_mass = err[0];
  g.eps_ring = err[1];
  g.imag_residue = err[2];
  g.inversion_err = err[3];
  g.spec_name = name;
  g.cell_measure = g.dx() * g.dx() / (2.0 * std::numbers::pi);
  g.values.resize(static_cast<std::size_t>(n) * n);
  in.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("grid file: truncated data");
  if (digest_out) *digest_out = digest;
  return g;
}

// --- CSV export --------------------------------------------------------------

inline void export_density_csv(const std::filesystem::path& path, const DensityGrid& g,
                               const std::string& digest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << "# config_digest=" << digest << "\n";
  out << "x,y,value\n";
  for (int m = 0; m < g.n; ++m)
    for (int l = 0; l < g.n; ++l)
      out << shortest_double(g.x(l)) << ',' << shortest_double(g.y(m)) << ','
          << shortest_double(g.values[g.idx(l, m)]) << "\n";
}

inline void export_characteristic_csv(const std::filesystem::path& path,
                                      const CharacteristicGrid& g, const std::string& digest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << "# config_digest=" << digest << "\n";
  out << "x,y,re,im,abs_err\n";
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      out << shortest_double(g.x(j)) << ',' << shortest_double(g.y(k)) << ','
          << shortest_double(g.values[g.idx(j, k)].real()) << ','
          << shortest_double(g.values[g.idx(j, k)].imag()) << ','
          << shortest_double(g.abs_err[g.idx(j, k)]) << "\n";
}

inline void export_cloud_csv(const std::filesystem::path& path, const SampleCloud& cloud,
                             const std::string& digest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << "# config_digest=" << digest << "\n";
  out << "index,re,im\n";
  for (std::size_t i = 0; i < cloud.points.size(); ++i)
    out << i << ',' << shortest_double(cloud.points[i].real()) << ','
        << shortest_double(cloud.points[i].imag()) << "\n";
}

inline void export_histogram_csv(const std::filesystem::path& path, const Histogram2D& h,
                                 const std::string& digest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << "# config_digest=" << digest << "\n";
  out << "x_lo,x_hi,y_lo,y_hi,mass\n";
  for (int iy = 0; iy < h.ny; ++iy)
    for (int ix = 0; ix < h.nx; ++ix) {
      const double x0 = h.extent.x0 + ix * h.bin_width_x();
      const double y0 = h.extent.y0 + iy * h.bin_width_y();
      out << shortest_double(x0) << ',' << shortest_double(x0 + h.bin_width_x()) << ','
          << shortest_double(y0) << ',' << shortest_double(y0 + h.bin_width_y()) << ','
          << shortest_double(h.masses[static_cast<std::size_t>(iy) * h.nx + ix]) << "\n";
    }
}

}  // namespace mfunc
