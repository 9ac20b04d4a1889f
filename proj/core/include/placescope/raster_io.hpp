// Copyright 2026 The Placescope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Raster exchange formats.
//
// ESRI ASCII grid: six header lines (ncols, nrows, xllcorner, yllcorner,
// cellsize, NODATA_value) followed by one text line per row, northernmost row
// first, values printed with 9 significant digits.
//
// Binary sidecar (little endian):
//   offset  0  char[4]  magic "PSRB"
//   offset  4  uint32   format version (1)
//   offset  8  uint64   n_cols
//   offset 16  uint64   n_rows
//   offset 24  float64  origin_x (lower-left corner)
//   offset 32  float64  origin_y
//   offset 40  float64  cell_size
//   offset 48  float64  nodata value
//   offset 56  float64  values[n_rows * n_cols], northernmost row first

#pragma once

#include <string>
#include <string_view>

#include "placescope/kde.hpp"

namespace placescope::kde {

inline constexpr double kNoData = -9999.0;
inline constexpr std::size_t kBinaryHeaderSize = 56;

std::string to_esri_ascii(const Raster& raster);

/// Accepts xllcorner/xllcenter variants; NODATA cells are rejected.
Raster read_esri_ascii(std::string_view text);

std::string to_binary(const Raster& raster);
Raster read_binary(std::string_view bytes);

}  // namespace placescope::kde
