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

#include "biphoton/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace biphoton {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_f64(std::ostream &out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
}

double get_f64(const char *p) {
    std::uint64_t bits;
    std::memcpy(&bits, p, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    return std::bit_cast<double>(bits);
}

std::ofstream open_out(const std::string &path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail_io("cannot open " + path + " for writing");
    return f;
}

void finish(std::ofstream &f, const std::string &path) {
    f.flush();
    if (!f) fail_io("write failed: " + path);
}

void check_tag(const std::string &tag) {
    if (tag.find('\n') != std::string::npos || tag.find('\r') != std::string::npos) {
        fail("BIPH1 tag must be a single line");
    }
}

void write_header(std::ostream &f, Eigen::Index rows, Eigen::Index cols, const char *dtype, const std::string &tag) {
    f << "BIPH1\nrows=" << rows << "\ncols=" << cols << "\ndtype=" << dtype << "\ntag=" << tag << "\n\n";
}

std::string read_all(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail_io("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

long parse_long(const std::string &s, const std::string &what) {
    try {
        size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        fail_io("bad " + what + ": '" + s + "'");
    }
}

}  // namespace

void write_biph1(const CMatrix &m, const std::string &path, const std::string &tag) {
    check_tag(tag);
    auto f = open_out(path);
    write_header(f, m.rows(), m.cols(), "c128", tag);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            put_f64(f, m(r, c).real());
            put_f64(f, m(r, c).imag());
        }
    }
    finish(f, path);
}

void write_biph1(const RMatrix &m, const std::string &path, const std::string &tag) {
    check_tag(tag);
    auto f = open_out(path);
    write_header(f, m.rows(), m.cols(), "f64", tag);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(f, m(r, c));
    finish(f, path);
}

Biph1Matrix read_biph1(const std::string &path) {
    const std::string data = read_all(path);
    size_t pos = 0;
    auto next_line = [&]() -> std::string {
        const size_t end = data.find('\n', pos);
        if (end == std::string::npos) fail_io(path + ": truncated BIPH1 header");
        std::string line = data.substr(pos, end - pos);
        pos = end + 1;
        return line;
    };
    if (next_line() != "BIPH1") fail_io(path + ": not a BIPH1 file");
    long rows = -1, cols = -1;
    Biph1Matrix out;
    for (;;) {
        const std::string line = next_line();
        if (line.empty()) break;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail_io(path + ": malformed header line '" + line + "'");
        const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        if (key == "rows") {
            rows = parse_long(value, "rows");
        } else if (key == "cols") {
            cols = parse_long(value, "cols");
        } else if (key == "dtype") {
            out.dtype = value;
        } else if (key == "tag") {
            out.tag = value;
        } else {
            fail_io(path + ": unknown header key '" + key + "'");
        }
    }
    if (rows < 0 || cols < 0) fail_io(path + ": missing rows/cols");
    if (out.dtype != "c128" && out.dtype != "f64") fail_io(path + ": unsupported dtype '" + out.dtype + "'");
    const size_t per = out.dtype == "c128" ? 16 : 8;
    const size_t need = static_cast<size_t>(rows) * static_cast<size_t>(cols) * per;
    if (data.size() - pos != need) fail_io(path + ": payload size does not match the header");
    out.m.resize(rows, cols);
    const char *p = data.data() + pos;
    for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c) {
            if (per == 16) {
                out.m(r, c) = cplx(get_f64(p), get_f64(p + 8));
            } else {
                out.m(r, c) = cplx(get_f64(p), 0.0);
            }
            p += per;
        }
    }
    return out;
}

void write_matrix(const ScatteringMatrix &s, const std::string &path) {
    write_biph1(s.m, path, s.tag.empty() ? std::string("matrix") : s.tag);
}

ScatteringMatrix read_matrix(const std::string &path, Boundary boundary) {
    Biph1Matrix b = read_biph1(path);
    const auto side = [&](Eigen::Index d) {
        const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
        if (static_cast<Eigen::Index>(n) * n != d) fail_io(path + ": matrix dimension is not a square grid");
        return n;
    };
    ScatteringMatrix s;
    s.grid_in = make_grid(side(b.m.cols()), 1.0, boundary);
    s.grid_out = make_grid(side(b.m.rows()), 1.0, boundary);
    s.m = std::move(b.m);
    s.tag = b.tag;
    return s;
}

void write_measured_tm(const MeasuredTM &tm, const std::string &path) { write_biph1(tm.m, path, "measured"); }

double write_pgm16(const RMatrix &img, const std::string &path) {
    if (!img.allFinite()) fail_numeric("write_pgm16: non-finite values in " + path);
    const double factor = img.size() > 0 ? std::max(img.maxCoeff(), 0.0) : 0.0;
    auto f = open_out(path);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", factor);
    f << "P5\n# normalization " << buf << "\n" << img.cols() << " " << img.rows() << "\n65535\n";
    std::vector<unsigned char> row(static_cast<size_t>(img.cols()) * 2);
    for (Eigen::Index r = 0; r < img.rows(); ++r) {
        for (Eigen::Index c = 0; c < img.cols(); ++c) {
            const double v = factor > 0.0 ? std::clamp(img(r, c) / factor, 0.0, 1.0) : 0.0;
            const auto q = static_cast<unsigned>(std::lround(v * 65535.0));
            row[2 * c] = static_cast<unsigned char>(q >> 8);
            row[2 * c + 1] = static_cast<unsigned char>(q & 0xff);
        }
        f.write(reinterpret_cast<const char *>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    finish(f, path);
    return factor;
}

void write_mask_pgm(const PhaseMask &mask, const std::string &path) {
    const int side = mask.layout.macro_n;
    auto f = open_out(path);
    f << "P5\n# phase 0..2pi\n" << side << " " << side << "\n255\n";
    std::vector<unsigned char> px(mask.phases.size());
    for (size_t k = 0; k < px.size(); ++k) {
        const long g = std::lround(wrap_phase(mask.phases[k]) / kTwoPi * 255.0);
        px[k] = static_cast<unsigned char>(std::clamp(g, 0L, 255L));
    }
    f.write(reinterpret_cast<const char *>(px.data()), static_cast<std::streamsize>(px.size()));
    finish(f, path);
}

void write_mask_biph1(const PhaseMask &mask, const std::string &path) {
    const int side = mask.layout.macro_n;
    RMatrix m(side, side);
    for (int k = 0; k < side * side; ++k) m(k / side, k % side) = mask.phases[k];
    write_biph1(m, path, "mask");
}

PgmImage read_pgm(const std::string &path) {
    const std::string data = read_all(path);
    size_t pos = 0;
    auto token = [&]() {
        for (;;) {
            while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
            if (pos < data.size() && data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        const size_t start = pos;
        while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
        if (start == pos) fail_io(path + ": truncated PGM header");
        return data.substr(start, pos - start);
    };
    if (token() != "P5") fail_io(path + ": only binary PGM (P5) is supported");
    PgmImage img;
    img.width = static_cast<int>(parse_long(token(), "PGM width"));
    img.height = static_cast<int>(parse_long(token(), "PGM height"));
    img.maxval = static_cast<int>(parse_long(token(), "PGM maxval"));
    if (img.width <= 0 || img.height <= 0) fail_io(path + ": bad PGM size");
    if (img.maxval <= 0 || img.maxval > 65535) fail_io(path + ": bad PGM maxval");
    ++pos;  // single whitespace after maxval
    const size_t bpp = img.maxval > 255 ? 2 : 1;
    const size_t need = static_cast<size_t>(img.width) * img.height * bpp;
    if (data.size() < pos + need) fail_io(path + ": truncated PGM data");
    img.values.resize(img.height, img.width);
    const auto *p = reinterpret_cast<const unsigned char *>(data.data() + pos);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const unsigned v = bpp == 2 ? (static_cast<unsigned>(p[0]) << 8) | p[1] : p[0];
            img.values(r, c) = static_cast<double>(v) / img.maxval;
            p += bpp;
        }
    }
    return img;
}

ObjectImage load_object_pgm(const std::string &path, double threshold, bool binarize) {
    const PgmImage img = read_pgm(path);
    if (img.width != img.height) fail_io(path + ": object images must be square");
    std::vector<double> v(static_cast<size_t>(img.width) * img.height);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double x = img.values(r, c);
            if (x < threshold) {
                x = 0.0;
            } else if (binarize) {
                x = 1.0;
            }
            v[static_cast<size_t>(r) * img.width + c] = x;
        }
    }
    return make_object(img.width, std::move(v));
}

void write_csv(const RMatrix &img, const std::string &path) {
    auto f = open_out(path);
    char buf[40];
    for (Eigen::Index r = 0; r < img.rows(); ++r) {
        for (Eigen::Index c = 0; c < img.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", img(r, c));
            if (c) f << ',';
            f << buf;
        }
        f << '\n';
    }
    finish(f, path);
}

RMatrix read_csv(const std::string &path) {
    std::ifstream f(path);
    if (!f) fail_io("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        const char *p = line.c_str();
        for (;;) {
            char *end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p) fail_io(path + ":" + std::to_string(lineno) + ": bad number");
            row.push_back(v);
            if (*end == '\0') break;
            if (*end != ',') fail_io(path + ":" + std::to_string(lineno) + ": expected ','");
            p = end + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            fail_io(path + ":" + std::to_string(lineno) + ": ragged row");
        }
        rows.push_back(std::move(row));
    }
    RMatrix out(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c) out(r, c) = rows[r][c];
    return out;
}

void write_text(const std::string &text, const std::string &path) {
    auto f = open_out(path);
    f << text;
    finish(f, path);
}

}  // namespace biphoton
