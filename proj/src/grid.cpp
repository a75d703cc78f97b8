// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvflow/error.hpp"
#include "tvflow/kernels.hpp"

namespace tvflow {

Grid Grid::build(const GridSpec& spec) {
  if (spec.dimension != 1 && spec.dimension != 2) {
    throw InvalidArgument("grid dimension must be 1 or 2, got " + std::to_string(spec.dimension));
  }
  if (!(spec.spacing > 0.0) || !std::isfinite(spec.spacing)) {
    throw InvalidArgument("grid spacing must be positive and finite");
  }
  if (spec.collar_width < 1) throw InvalidArgument("collar_width must be >= 1");
  const int nx = spec.shape[0];
  const int ny = spec.dimension == 2 ? spec.shape[1] : 1;
  if (nx < 1 || ny < 1) throw InvalidArgument("grid shape must have at least one cell per axis");
  if (!std::isfinite(spec.origin[0]) || !std::isfinite(spec.origin[1])) {
    throw InvalidArgument("grid origin must be finite");
  }

  auto layout = std::make_shared<Layout>();
  layout->spec = spec;
  if (spec.dimension == 1) {
    layout->spec.shape[1] = 1;
    layout->spec.origin[1] = 0.0;
  }
  const int c = spec.collar_width;
  layout->nx = nx;
  layout->ny = ny;
  layout->padded_nx = nx + 2 * c;
  layout->padded_ny = spec.dimension == 2 ? ny + 2 * c : 1;
  layout->cell_count =
      static_cast<std::size_t>(layout->padded_nx) * static_cast<std::size_t>(layout->padded_ny);
  layout->interior_count = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  layout->x_face_count = static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny);
  layout->face_count = layout->x_face_count +
                       (spec.dimension == 2 ? static_cast<std::size_t>(nx) * (ny + 1) : 0);
  layout->cell_volume = std::pow(spec.spacing, spec.dimension);
  layout->face_area = std::pow(spec.spacing, spec.dimension - 1);

  Grid grid(layout);
  layout->interior_mask.assign(layout->cell_count, 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) layout->interior_mask[grid.cell(i, j)] = 1;
  }

  // Groups: cell (i, j) owns x_face(i+1, j) when i+1 < nx and y_face(i, j+1) when j+1 < ny.
  for (int j = 0; j < ny; ++j) {
    const bool has_y = spec.dimension == 2 && j + 1 < ny;
    const std::size_t first = grid.interior_index(0, j);
    if (nx > 1) {
      GroupSegment seg;
      seg.first_cell = first;
      seg.x_face = static_cast<std::ptrdiff_t>(grid.x_face(1, j));
      seg.y_face = has_y ? static_cast<std::ptrdiff_t>(grid.y_face(0, j + 1)) : -1;
      seg.length = static_cast<std::size_t>(nx - 1);
      layout->segments.push_back(seg);
    }
    GroupSegment last;
    last.first_cell = grid.interior_index(nx - 1, j);
    last.y_face = has_y ? static_cast<std::ptrdiff_t>(grid.y_face(nx - 1, j + 1)) : -1;
    last.length = 1;
    layout->segments.push_back(last);
  }

  layout->boundary_mask.assign(layout->face_count, 0);
  for (int j = 0; j < ny; ++j) {
    layout->boundary.push_back({grid.x_face(0, j), -1, grid.cell(0, j), grid.cell(-1, j)});
    layout->boundary.push_back({grid.x_face(nx, j), +1, grid.cell(nx - 1, j), grid.cell(nx, j)});
  }
  if (spec.dimension == 2) {
    for (int i = 0; i < nx; ++i) {
      layout->boundary.push_back({grid.y_face(i, 0), -1, grid.cell(i, 0), grid.cell(i, -1)});
      layout->boundary.push_back({grid.y_face(i, ny), +1, grid.cell(i, ny - 1), grid.cell(i, ny)});
    }
  }
  for (const auto& b : layout->boundary) layout->boundary_mask[b.face] = 1;
  return grid;
}

std::array<int, 2> Grid::cell_coords(std::size_t padded) const {
  const int c = collar();
  const int cy = dimension() == 2 ? c : 0;
  const int w = padded_nx();
  return {static_cast<int>(padded % static_cast<std::size_t>(w)) - c,
          static_cast<int>(padded / static_cast<std::size_t>(w)) - cy};
}

std::array<double, 2> Grid::cell_center(int i, int j) const {
  const auto& s = spec();
  const double x = s.origin[0] + (i + 0.5) * s.spacing;
  const double y = dimension() == 2 ? s.origin[1] + (j + 0.5) * s.spacing : 0.0;
  return {x, y};
}

std::array<double, 2> Grid::sample_point(int i, int j) const {
  const auto& s = spec();
  auto p = cell_center(i, j);
  p[0] = std::clamp(p[0], s.origin[0], s.origin[0] + nx() * s.spacing);
  if (dimension() == 2) p[1] = std::clamp(p[1], s.origin[1], s.origin[1] + ny() * s.spacing);
  return p;
}

bool operator==(const Grid& a, const Grid& b) {
  if (a.layout_ == b.layout_) return true;
  const GridSpec& x = a.spec();
  const GridSpec& y = b.spec();
  return x.dimension == y.dimension && x.shape == y.shape && x.spacing == y.spacing &&
         x.collar_width == y.collar_width && x.origin == y.origin;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw GridMismatch();
}

namespace {

bool finite_all(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

ScalarField::ScalarField(Grid grid, double value)
    : grid_(std::move(grid)), values_(grid_.cell_count(), value) {
  if (!std::isfinite(value)) throw InvalidArgument("scalar field values must be finite");
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count()) {
    throw InvalidArgument("scalar field expects " + std::to_string(grid_.cell_count()) +
                          " values, got " + std::to_string(values_.size()));
  }
  if (!finite_all(values_)) throw InvalidArgument("scalar field values must be finite");
}

std::vector<double> ScalarField::interior() const {
  std::vector<double> out;
  out.reserve(grid_.interior_count());
  for (int j = 0; j < grid_.ny(); ++j) out.insert(out.end(), row(j), row(j) + grid_.nx());
  return out;
}

bool ScalarField::all_finite() const { return finite_all(values_); }

FaceVectorField::FaceVectorField(Grid grid, double value)
    : grid_(std::move(grid)), values_(grid_.face_count(), value) {
  if (!std::isfinite(value)) throw InvalidArgument("face field values must be finite");
}

FaceVectorField::FaceVectorField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.face_count()) {
    throw InvalidArgument("face field expects " + std::to_string(grid_.face_count()) +
                          " values, got " + std::to_string(values_.size()));
  }
  if (!finite_all(values_)) throw InvalidArgument("face field values must be finite");
}

bool FaceVectorField::all_finite() const { return finite_all(values_); }

FaceVectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  const auto& k = kernels::active();
  const double inv_h = 1.0 / g.spacing();
  FaceVectorField out(g);
  const auto n = static_cast<std::size_t>(g.nx());
  for (int j = 0; j < g.ny(); ++j) {
    const double* row = u.row(j);
    k.difference(row - 1, row, out.data() + g.x_face(0, j), n + 1, inv_h);
  }
  if (g.dimension() == 2) {
    for (int j = 0; j <= g.ny(); ++j) {
      const double* below = u.values().data() + g.cell(0, j - 1);
      const double* above = u.values().data() + g.cell(0, j);
      k.difference(below, above, out.data() + g.y_face(0, j), n, inv_h);
    }
  }
  return out;
}

ScalarField divergence(const FaceVectorField& z) {
  const Grid& g = z.grid();
  const auto& k = kernels::active();
  const double inv_h = 1.0 / g.spacing();
  ScalarField out(g);
  const auto n = static_cast<std::size_t>(g.nx());
  for (int j = 0; j < g.ny(); ++j) {
    const double* zx = z.data() + g.x_face(0, j);
    double* row = out.row(j);
    k.difference(zx, zx + 1, row, n, inv_h);
    if (g.dimension() == 2) {
      k.difference_accumulate(z.data() + g.y_face(0, j), z.data() + g.y_face(0, j + 1), row, n,
                              inv_h);
    }
  }
  return out;
}

ScalarField extend_with_boundary(const ScalarField& u, const ScalarField& u0) {
  require_same_grid(u.grid(), u0.grid());
  ScalarField out = u0;
  const Grid& g = u.grid();
  for (int j = 0; j < g.ny(); ++j) std::copy(u.row(j), u.row(j) + g.nx(), out.row(j));
  return out;
}

ScalarField extend_with_boundary(std::span<const double> interior, const ScalarField& u0) {
  const Grid& g = u0.grid();
  if (interior.size() != g.interior_count()) {
    throw InvalidArgument("interior values do not match the grid's Omega cell count");
  }
  if (!finite_all(interior)) throw InvalidArgument("scalar field values must be finite");
  ScalarField out = u0;
  const auto nx = static_cast<std::size_t>(g.nx());
  for (int j = 0; j < g.ny(); ++j) {
    std::copy_n(interior.begin() + static_cast<std::ptrdiff_t>(j * nx), nx, out.row(j));
  }
  return out;
}

std::vector<double> cell_group_norms(const FaceVectorField& z) {
  const Grid& g = z.grid();
  std::vector<double> norms(g.interior_count(), 0.0);
  for (const auto& seg : g.group_segments()) {
    for (std::size_t c = 0; c < seg.length; ++c) {
      double s = 0.0;
      if (seg.x_face >= 0) s += z[seg.x_face + c] * z[seg.x_face + c];
      if (seg.y_face >= 0) s += z[seg.y_face + c] * z[seg.y_face + c];
      norms[seg.first_cell + c] = std::sqrt(s);
    }
  }
  return norms;
}

double sup_norm(const FaceVectorField& z) {
  const auto norms = cell_group_norms(z);
  double m = norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
  for (const auto& b : z.grid().boundary_faces()) m = std::max(m, std::abs(z[b.face]));
  return m;
}

double integrate(const ScalarField& a) {
  const Grid& g = a.grid();
  const auto& k = kernels::active();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) s += k.sum(a.row(j), static_cast<std::size_t>(g.nx()));
  return s * g.cell_volume();
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  const Grid& g = a.grid();
  const auto& k = kernels::active();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) s += k.dot(a.row(j), b.row(j), static_cast<std::size_t>(g.nx()));
  return s * g.cell_volume();
}

double inner(const FaceVectorField& z, const FaceVectorField& w) {
  require_same_grid(z.grid(), w.grid());
  return kernels::active().dot(z.data(), w.data(), z.size()) * z.grid().cell_volume();
}

double interior_sup(const ScalarField& a) {
  const Grid& g = a.grid();
  const auto& k = kernels::active();
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j) m = std::max(m, k.max_abs(a.row(j), static_cast<std::size_t>(g.nx())));
  return m;
}

double l2_norm(const ScalarField& a) { return std::sqrt(inner(a, a)); }

double l2_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  const Grid& g = a.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double d = a.at(i, j) - b.at(i, j);
      s += d * d;
    }
  }
  return std::sqrt(s * g.cell_volume());
}

}  // namespace tvflow
