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

#include <cmath>
#include <string>

#include "doctest.h"
#include "placescope/error.hpp"

using namespace placescope;
using namespace placescope::kde;

namespace {

Raster sample() {
  // Row 0 is south; ESRI output lists the north row first.
  return Raster(GridGeometry{-250, 100, 50, 3, 2}, {1, 2, 3, 4.5, -0.125, 1e-7});
}

}  // namespace

TEST_CASE("esri ascii") {
  const auto text = to_esri_ascii(sample());
  CHECK(text.starts_with("ncols         3\nnrows         2\n"));
  const auto body = text.substr(text.find("NODATA_value"));
  CHECK(body.find("4.5 -0.125 1e-07\n1 2 3\n") != std::string::npos);

  const auto back = read_esri_ascii(text);
  CHECK(back == sample());

  const std::string centered =
      "ncols 2\nnrows 1\nxllcenter 5\nyllcenter 5\ncellsize 10\n1 2\n";
  const auto c = read_esri_ascii(centered);
  CHECK(c.geometry().origin_x == 0.0);
  CHECK(c.geometry().origin_y == 0.0);
  CHECK(c.at(1, 0) == 2.0);

  CHECK_THROWS(read_esri_ascii("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
                               "NODATA_value -9999\n1 -9999\n"));
  CHECK_THROWS(read_esri_ascii("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1\n"));
}

TEST_CASE("binary sidecar") {
  const auto bytes = to_binary(sample());
  CHECK(bytes.size() == kBinaryHeaderSize + 6 * sizeof(double));
  CHECK(bytes.substr(0, 4) == "PSRB");
  CHECK(read_binary(bytes) == sample());
  CHECK_THROWS(read_binary(bytes.substr(0, 60)));
  CHECK_THROWS(read_binary("XXXX" + bytes.substr(4)));
}
