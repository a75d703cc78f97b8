// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

// Uniform Cartesian grids on a box Omega (1D segment or 2D rectangle),
// surrounded by a collar of ghost cells standing for Omega* \ Omega, and the
// staggered gradient/divergence pair acting on them.
//
// Cell values live at cell centres. Faces are the ones touching Omega: faces
// between two Omega cells ("interior faces") and faces between an Omega cell
// and a collar cell ("boundary faces"). Faces inside the collar carry no
// variable. Gradient is the forward difference across a face; divergence is
// its negative adjoint, so the discrete Gauss-Green formula is exact.
//
// For the isotropic total variation each Omega cell owns the group formed by
// its forward interior faces (at most one per axis), while every boundary
// face is a group of its own. The pointwise constraint |z| <= 1 is imposed
// per group.

namespace tvflow {

struct GridSpec {
  int dimension = 1;
  std::array<int, 2> shape{1, 1};
  double spacing = 1.0;
  int collar_width = 1;
  std::array<double, 2> origin{0.0, 0.0};
};

/// A run of consecutive Omega cells (same row) whose groups have the same
/// layout: each cell has an x component iff x_face >= 0, a y component iff
/// y_face >= 0, and both advance by one per cell.
struct GroupSegment {
  std::size_t first_cell = 0;  // interior (row-major) index
  std::ptrdiff_t x_face = -1;
  std::ptrdiff_t y_face = -1;
  std::size_t length = 0;
};

struct BoundaryFace {
  std::size_t face = 0;
  int normal = 1;  // sign of the outward normal along the face's axis
  std::size_t inner_cell = 0;  // padded index of the Omega cell
  std::size_t outer_cell = 0;  // padded index of the collar cell
};

class Grid {
 public:
  /// Validates the GridSpec and builds the index maps. Throws InvalidArgument.
  static Grid build(const GridSpec& spec);

  const GridSpec& spec() const { return layout_->spec; }
  int dimension() const { return layout_->spec.dimension; }
  int nx() const { return layout_->nx; }
  int ny() const { return layout_->ny; }
  int collar() const { return layout_->spec.collar_width; }
  double spacing() const { return layout_->spec.spacing; }

  int padded_nx() const { return layout_->padded_nx; }
  int padded_ny() const { return layout_->padded_ny; }
  std::size_t cell_count() const { return layout_->cell_count; }
  std::size_t interior_count() const { return layout_->interior_count; }
  std::size_t collar_count() const { return cell_count() - interior_count(); }
  std::size_t x_face_count() const { return layout_->x_face_count; }
  std::size_t face_count() const { return layout_->face_count; }

  /// h^d, the weight of one cell (and of one face in gradient pairings).
  double cell_volume() const { return layout_->cell_volume; }
  /// h^(d-1), the weight of one face in boundary integrals.
  double face_area() const { return layout_->face_area; }
  /// |Omega| = interior cells * h^d.
  double domain_volume() const { return cell_volume() * static_cast<double>(interior_count()); }

  /// Padded index of cell (i, j); collar cells have i < 0, i >= nx (same for j in 2D).
  std::size_t cell(int i, int j = 0) const {
    const int c = collar();
    const int cy = dimension() == 2 ? c : 0;
    return static_cast<std::size_t>(j + cy) * static_cast<std::size_t>(padded_nx()) +
           static_cast<std::size_t>(i + c);
  }
  std::size_t interior_index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx()) + static_cast<std::size_t>(i);
  }
  bool is_interior(int i, int j = 0) const { return i >= 0 && i < nx() && j >= 0 && j < ny(); }
  bool is_interior_cell(std::size_t padded) const { return layout_->interior_mask[padded] != 0; }

  /// Face between (i-1, j) and (i, j), i in [0, nx], j in [0, ny).
  std::size_t x_face(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx() + 1) + static_cast<std::size_t>(i);
  }
  /// Face between (i, j-1) and (i, j), i in [0, nx), j in [0, ny]. 2D only.
  std::size_t y_face(int i, int j) const {
    return x_face_count() + static_cast<std::size_t>(j) * static_cast<std::size_t>(nx()) +
           static_cast<std::size_t>(i);
  }

  /// Padded (i, j) coordinates of a padded index.
  std::array<int, 2> cell_coords(std::size_t padded) const;
  /// Geometric centre of cell (i, j).
  std::array<double, 2> cell_center(int i, int j = 0) const;
  /// Centre clamped to the closed box: collar cells sample the boundary trace.
  std::array<double, 2> sample_point(int i, int j = 0) const;

  const std::vector<GroupSegment>& group_segments() const { return layout_->segments; }
  const std::vector<BoundaryFace>& boundary_faces() const { return layout_->boundary; }
  /// Per-face flag: 1 for boundary faces (singleton groups).
  const std::vector<char>& boundary_face_mask() const { return layout_->boundary_mask; }

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  struct Layout {
    GridSpec spec;
    int nx = 0, ny = 0, padded_nx = 0, padded_ny = 0;
    std::size_t cell_count = 0, interior_count = 0, x_face_count = 0, face_count = 0;
    double cell_volume = 0.0, face_area = 0.0;
    std::vector<GroupSegment> segments;
    std::vector<BoundaryFace> boundary;
    std::vector<char> boundary_mask;
    std::vector<char> interior_mask;
  };

  explicit Grid(std::shared_ptr<const Layout> layout) : layout_(std::move(layout)) {}
  std::shared_ptr<const Layout> layout_;
};

inline Grid build_grid(const GridSpec& spec) { return Grid::build(spec); }

/// One value per cell of Omega and collar.
class ScalarField {
 public:
  explicit ScalarField(Grid grid, double value = 0.0);
  /// Takes padded values (size cell_count); rejects wrong size or non-finite entries.
  ScalarField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t padded) const { return values_[padded]; }
  double& operator[](std::size_t padded) { return values_[padded]; }
  double at(int i, int j = 0) const { return values_[grid_.cell(i, j)]; }
  double& at(int i, int j = 0) { return values_[grid_.cell(i, j)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  /// Pointer to the first Omega cell of row j.
  const double* row(int j = 0) const { return values_.data() + grid_.cell(0, j); }
  double* row(int j = 0) { return values_.data() + grid_.cell(0, j); }

  /// Omega values in row-major order.
  std::vector<double> interior() const;
  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// One value per face touching Omega: x-faces first, then y-faces.
class FaceVectorField {
 public:
  explicit FaceVectorField(Grid grid, double value = 0.0);
  FaceVectorField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t face) const { return values_[face]; }
  double& operator[](std::size_t face) { return values_[face]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Forward difference across every face touching Omega (collar values enter
/// at boundary faces).
FaceVectorField gradient(const ScalarField& u);

/// (div z)(cell) = sum over axes of (z_out - z_in) / h on Omega; zero on the collar.
ScalarField divergence(const FaceVectorField& z);

/// u on Omega, u0 on the collar.
ScalarField extend_with_boundary(const ScalarField& u, const ScalarField& u0);
ScalarField extend_with_boundary(std::span<const double> interior, const ScalarField& u0);

/// Euclidean norm of each Omega cell's group, in interior order.
std::vector<double> cell_group_norms(const FaceVectorField& z);

/// max over groups of the group's Euclidean norm (the pointwise sup norm of z).
double sup_norm(const FaceVectorField& z);

/// sum over Omega of a * h^d.
double integrate(const ScalarField& a);
/// sum over Omega of a * b * h^d.
double inner(const ScalarField& a, const ScalarField& b);
/// sum over faces of z * w * h^d.
double inner(const FaceVectorField& z, const FaceVectorField& w);
/// max over Omega of |a|.
double interior_sup(const ScalarField& a);
/// (sum over Omega of a^2 h^d)^(1/2).
double l2_norm(const ScalarField& a);
/// L2 norm of a - b over Omega.
double l2_distance(const ScalarField& a, const ScalarField& b);

void require_same_grid(const Grid& a, const Grid& b);

}  // namespace tvflow
