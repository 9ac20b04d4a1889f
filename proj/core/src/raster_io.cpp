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

#include "placescope/raster_io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "placescope/error.hpp"

namespace placescope::kde {

static_assert(std::endian::native == std::endian::little,
              "binary raster I/O assumes a little-endian host");

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string nine_digits(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

template <typename T>
void put(std::string& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T get(std::string_view in, std::size_t offset) {
  T v;
  std::memcpy(&v, in.data() + offset, sizeof(T));
  return v;
}

}  // namespace

std::string to_esri_ascii(const Raster& raster) {
  const GridGeometry& g = raster.geometry();
  std::string out;
  out += "ncols         " + std::to_string(g.n_cols) + "\n";
  out += "nrows         " + std::to_string(g.n_rows) + "\n";
  out += "xllcorner     " + shortest(g.origin_x) + "\n";
  out += "yllcorner     " + shortest(g.origin_y) + "\n";
  out += "cellsize      " + shortest(g.cell_size) + "\n";
  out += "NODATA_value  " + shortest(kNoData) + "\n";
  for (std::size_t r = g.n_rows; r-- > 0;) {
    for (std::size_t c = 0; c < g.n_cols; ++c) {
      if (c) out += ' ';
      out += nine_digits(raster.at(c, r));
    }
    out += '\n';
  }
  return out;
}

Raster read_esri_ascii(std::string_view text) {
  std::istringstream in{std::string(text)};
  GridGeometry g;
  double nodata = kNoData;
  bool have_cols = false, have_rows = false, have_x = false, have_y = false,
       have_size = false, x_center = false, y_center = false;
  // Header lines start with a letter; the first numeric token ends them.
  std::string key;
  std::streampos data_start = in.tellg();
  while (in >> key) {
    if (key.empty() || !std::isalpha(static_cast<unsigned char>(key[0]))) {
      break;
    }
    for (char& ch : key) ch = static_cast<char>(std::tolower(ch));
    double value;
    if (!(in >> value)) throw InvalidArgument("bad ASCII grid header: " + key);
    if (key == "ncols") {
      g.n_cols = static_cast<std::size_t>(value);
      have_cols = true;
    } else if (key == "nrows") {
      g.n_rows = static_cast<std::size_t>(value);
      have_rows = true;
    } else if (key == "xllcorner" || key == "xllcenter") {
      g.origin_x = value;
      x_center = key == "xllcenter";
      have_x = true;
    } else if (key == "yllcorner" || key == "yllcenter") {
      g.origin_y = value;
      y_center = key == "yllcenter";
      have_y = true;
    } else if (key == "cellsize") {
      g.cell_size = value;
      have_size = true;
    } else if (key == "nodata_value") {
      nodata = value;
    } else {
      throw InvalidArgument("unknown ASCII grid header key: " + key);
    }
    data_start = in.tellg();
  }
  if (!(have_cols && have_rows && have_x && have_y && have_size)) {
    throw InvalidArgument("incomplete ASCII grid header");
  }
  if (x_center) g.origin_x -= 0.5 * g.cell_size;
  if (y_center) g.origin_y -= 0.5 * g.cell_size;

  in.clear();
  in.seekg(data_start);
  std::vector<double> values(g.n_cols * g.n_rows);
  for (std::size_t r = g.n_rows; r-- > 0;) {
    for (std::size_t c = 0; c < g.n_cols; ++c) {
      double v;
      if (!(in >> v)) throw InvalidArgument("ASCII grid has too few values");
      if (v == nodata) throw InvalidArgument("ASCII grid NODATA cells unsupported");
      values[r * g.n_cols + c] = v;
    }
  }
  return Raster(g, std::move(values));
}

std::string to_binary(const Raster& raster) {
  const GridGeometry& g = raster.geometry();
  std::string out;
  out.reserve(kBinaryHeaderSize + g.cell_count() * sizeof(double));
  out.append("PSRB", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, g.n_cols);
  put<std::uint64_t>(out, g.n_rows);
  put<double>(out, g.origin_x);
  put<double>(out, g.origin_y);
  put<double>(out, g.cell_size);
  put<double>(out, kNoData);
  for (std::size_t r = g.n_rows; r-- > 0;) {
    for (std::size_t c = 0; c < g.n_cols; ++c) put<double>(out, raster.at(c, r));
  }
  return out;
}

Raster read_binary(std::string_view bytes) {
  if (bytes.size() < kBinaryHeaderSize || bytes.substr(0, 4) != "PSRB") {
    throw InvalidArgument("not a binary raster");
  }
  if (get<std::uint32_t>(bytes, 4) != 1) {
    throw InvalidArgument("unsupported binary raster version");
  }
  GridGeometry g;
  g.n_cols = get<std::uint64_t>(bytes, 8);
  g.n_rows = get<std::uint64_t>(bytes, 16);
  g.origin_x = get<double>(bytes, 24);
  g.origin_y = get<double>(bytes, 32);
  g.cell_size = get<double>(bytes, 40);
  if (bytes.size() != kBinaryHeaderSize + g.n_cols * g.n_rows * sizeof(double)) {
    throw InvalidArgument("binary raster size does not match its header");
  }
  std::vector<double> values(g.n_cols * g.n_rows);
  std::size_t offset = kBinaryHeaderSize;
  for (std::size_t r = g.n_rows; r-- > 0;) {
    for (std::size_t c = 0; c < g.n_cols; ++c) {
      values[r * g.n_cols + c] = get<double>(bytes, offset);
      offset += sizeof(double);
    }
  }
  return Raster(g, std::move(values));
}

}  // namespace placescope::kde
