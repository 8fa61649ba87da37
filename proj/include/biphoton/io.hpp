// Copyright 2026 The biphoton Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIPHOTON_IO_HPP
#define BIPHOTON_IO_HPP

#include <string>

#include "biphoton/shape_opt.hpp"
#include "biphoton/states.hpp"

namespace biphoton {

/// Contents of a BIPH1 matrix file. Real (f64) payloads are returned with a
/// zero imaginary part.
struct Biph1Matrix {
    CMatrix m;
    std::string dtype;  // "c128" or "f64"
    std::string tag;
};

void write_biph1(const CMatrix &m, const std::string &path, const std::string &tag);
void write_biph1(const RMatrix &m, const std::string &path, const std::string &tag);
Biph1Matrix read_biph1(const std::string &path);

void write_matrix(const ScatteringMatrix &s, const std::string &path);
/// Reads a square operator on circular n x n grids of unit pitch.
ScatteringMatrix read_matrix(const std::string &path, Boundary boundary = Boundary::circular);

void write_measured_tm(const MeasuredTM &tm, const std::string &path);

/// Max-normalized 16-bit PGM; negative values are clamped to 0. Returns the
/// normalization factor (the maximum), which is also written as a comment.
double write_pgm16(const RMatrix &img, const std::string &path);
/// Phase mask preview: [0, 2pi) mapped linearly to gray 0..255.
void write_mask_pgm(const PhaseMask &mask, const std::string &path);

struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 0;
    RMatrix values;  // rescaled to [0, 1] by maxval
};

PgmImage read_pgm(const std::string &path);
/// Square object from an 8- or 16-bit PGM, rescaled to [0, 1]; values below
/// `threshold` become 0 and, when binarize is set, the rest become 1.
ObjectImage load_object_pgm(const std::string &path, double threshold = 0.0, bool binarize = false);

/// Row-major CSV with 17 significant digits (exact round trip).
void write_csv(const RMatrix &img, const std::string &path);
RMatrix read_csv(const std::string &path);

void write_mask_biph1(const PhaseMask &mask, const std::string &path);

void write_text(const std::string &text, const std::string &path);

}  // namespace biphoton

#endif
