// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>

#include "tvflow/error.hpp"
#include "tvflow/grid.hpp"

// Field serialization.
//
// CSV: header "i,value" (1D) or "i,j,value" (2D), one row per cell of Omega
// and collar, indices relative to Omega (collar indices are negative or
// >= shape). Face fields use "axis,i,j,value" with axis 0 = x-face, 1 = y-face.
//
// Raw: 16-byte header {"TVF0", u32 dimension, u32 padded_nx, u32 padded_ny}
// followed by cell_count little-endian float64 values in padded row-major order.

namespace tvflow {

class FormatError : public Error {
 public:
  using Error::Error;
};

void write_csv(std::ostream& out, const ScalarField& u);
void write_csv(std::ostream& out, const FaceVectorField& z);
ScalarField read_scalar_csv(std::istream& in, const Grid& grid);
FaceVectorField read_face_csv(std::istream& in, const Grid& grid);

void write_raw(std::ostream& out, const ScalarField& u);
ScalarField read_raw(std::istream& in, const Grid& grid);

void save_csv(const std::filesystem::path& path, const ScalarField& u);
void save_csv(const std::filesystem::path& path, const FaceVectorField& z);
void save_raw(const std::filesystem::path& path, const ScalarField& u);
ScalarField load_scalar_csv(const std::filesystem::path& path, const Grid& grid);
ScalarField load_raw(const std::filesystem::path& path, const Grid& grid);

}  // namespace tvflow
