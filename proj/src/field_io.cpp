// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace tvflow {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    while (!item.empty() && (item.back() == '\r' || item.back() == ' ')) item.pop_back();
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    parts.push_back(item);
  }
  return parts;
}

int parse_int(const std::string& s, std::size_t line) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw FormatError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

template <class T>
void put_le(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw FormatError("raw field truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

constexpr std::array<char, 4> kMagic{'T', 'V', 'F', '0'};

}  // namespace

void write_csv(std::ostream& out, const ScalarField& u) {
  const Grid& g = u.grid();
  out << (g.dimension() == 1 ? "i,value\n" : "i,j,value\n");
  for (std::size_t p = 0; p < g.cell_count(); ++p) {
    const auto [i, j] = g.cell_coords(p);
    out << i << ',';
    if (g.dimension() == 2) out << j << ',';
    out << format_double(u[p]) << '\n';
  }
}

void write_csv(std::ostream& out, const FaceVectorField& z) {
  const Grid& g = z.grid();
  out << "axis,i,j,value\n";
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i <= g.nx(); ++i) out << "0," << i << ',' << j << ',' << format_double(z[g.x_face(i, j)]) << '\n';
  }
  if (g.dimension() == 2) {
    for (int j = 0; j <= g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) out << "1," << i << ',' << j << ',' << format_double(z[g.y_face(i, j)]) << '\n';
    }
  }
}

ScalarField read_scalar_csv(std::istream& in, const Grid& grid) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV");
  const auto header = split(line);
  const std::size_t cols = grid.dimension() == 1 ? 2 : 3;
  if (header.size() != cols || header.back() != "value") {
    throw FormatError(std::string("CSV header must be ") + (cols == 2 ? "'i,value'" : "'i,j,value'"));
  }
  std::vector<double> values(grid.cell_count(), 0.0);
  std::vector<char> seen(grid.cell_count(), 0);
  std::size_t lineno = 1;
  const int c = grid.collar();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto parts = split(line);
    if (parts.size() != cols) throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(cols) + " columns");
    const int i = parse_int(parts[0], lineno);
    const int j = cols == 3 ? parse_int(parts[1], lineno) : 0;
    const bool in_x = i >= -c && i < grid.nx() + c;
    const bool in_y = grid.dimension() == 1 ? j == 0 : (j >= -c && j < grid.ny() + c);
    if (!in_x || !in_y) throw FormatError("line " + std::to_string(lineno) + ": cell index outside the grid");
    const std::size_t p = grid.cell(i, j);
    if (seen[p]) throw FormatError("line " + std::to_string(lineno) + ": duplicate cell");
    seen[p] = 1;
    values[p] = parse_double(parts.back(), lineno);
  }
  for (char s : seen) {
    if (!s) throw FormatError("CSV does not cover every cell of Omega and collar");
  }
  return ScalarField(grid, std::move(values));
}

FaceVectorField read_face_csv(std::istream& in, const Grid& grid) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV");
  if (split(line) != std::vector<std::string>{"axis", "i", "j", "value"}) {
    throw FormatError("face CSV header must be 'axis,i,j,value'");
  }
  std::vector<double> values(grid.face_count(), 0.0);
  std::vector<char> seen(grid.face_count(), 0);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto parts = split(line);
    if (parts.size() != 4) throw FormatError("line " + std::to_string(lineno) + ": expected 4 columns");
    const int axis = parse_int(parts[0], lineno);
    const int i = parse_int(parts[1], lineno);
    const int j = parse_int(parts[2], lineno);
    std::size_t f = 0;
    if (axis == 0 && i >= 0 && i <= grid.nx() && j >= 0 && j < grid.ny()) {
      f = grid.x_face(i, j);
    } else if (axis == 1 && grid.dimension() == 2 && i >= 0 && i < grid.nx() && j >= 0 && j <= grid.ny()) {
      f = grid.y_face(i, j);
    } else {
      throw FormatError("line " + std::to_string(lineno) + ": face index outside the grid");
    }
    if (seen[f]) throw FormatError("line " + std::to_string(lineno) + ": duplicate face");
    seen[f] = 1;
    values[f] = parse_double(parts[3], lineno);
  }
  for (char s : seen) {
    if (!s) throw FormatError("CSV does not cover every face");
  }
  return FaceVectorField(grid, std::move(values));
}

void write_raw(std::ostream& out, const ScalarField& u) {
  const Grid& g = u.grid();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dimension()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.padded_nx()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.padded_ny()));
  for (double v : u.values()) put_le<double>(out, v);
}

ScalarField read_raw(std::istream& in, const Grid& grid) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw FormatError("raw field: bad magic");
  const auto dim = get_le<std::uint32_t>(in);
  const auto px = get_le<std::uint32_t>(in);
  const auto py = get_le<std::uint32_t>(in);
  if (dim != static_cast<std::uint32_t>(grid.dimension()) ||
      px != static_cast<std::uint32_t>(grid.padded_nx()) ||
      py != static_cast<std::uint32_t>(grid.padded_ny())) {
    throw FormatError("raw field: header does not match the grid");
  }
  std::vector<double> values(grid.cell_count());
  for (double& v : values) v = get_le<double>(in);
  return ScalarField(grid, std::move(values));
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode);
  if (!f) throw FormatError("cannot write " + path.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream f(path, mode);
  if (!f) throw FormatError("cannot read " + path.string());
  return f;
}

}  // namespace

void save_csv(const std::filesystem::path& path, const ScalarField& u) {
  auto f = open_out(path);
  write_csv(f, u);
}

void save_csv(const std::filesystem::path& path, const FaceVectorField& z) {
  auto f = open_out(path);
  write_csv(f, z);
}

void save_raw(const std::filesystem::path& path, const ScalarField& u) {
  auto f = open_out(path, std::ios::out | std::ios::binary);
  write_raw(f, u);
}

ScalarField load_scalar_csv(const std::filesystem::path& path, const Grid& grid) {
  auto f = open_in(path);
  try {
    return read_scalar_csv(f, grid);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

ScalarField load_raw(const std::filesystem::path& path, const Grid& grid) {
  auto f = open_in(path, std::ios::in | std::ios::binary);
  try {
    return read_raw(f, grid);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace tvflow
