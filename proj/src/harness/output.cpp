/*
   Copyright 2026 The glbm Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "glbm/harness/output.hpp"

#include <cblas.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "glbm/error.hpp"
#include "glbm/numfmt.hpp"

namespace glbm::harness {

namespace {

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5g", v);
    return buf;
}

std::string hex(const unsigned char* data, unsigned len) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(2 * len);
    for (unsigned k = 0; k < len; ++k) {
        s += digits[data[k] >> 4];
        s += digits[data[k] & 15];
    }
    return s;
}

} // namespace

ReportRow info_row(std::string metric, double value) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {std::move(metric), value, nan, nan, true};
}

void write_report_csv(std::span<const ReportRow> rows, std::ostream& out) {
    out << "metric,value,target,tolerance,pass\n";
    for (const auto& r : rows)
        out << r.metric << ',' << format_double(r.value) << ',' << format_double(r.target) << ','
            << format_double(r.tolerance) << ',' << (r.pass ? "true" : "false") << '\n';
}

void write_eigenvalues_header(std::ostream& out) { out << "trial,index,re,im\n"; }

void write_eigenvalues_rows(std::ostream& out, std::size_t trial, std::span<const cplx> eigenvalues) {
    for (std::size_t k = 0; k < eigenvalues.size(); ++k)
        out << trial << ',' << k << ',' << format_double(eigenvalues[k].real()) << ','
            << format_double(eigenvalues[k].imag()) << '\n';
}

void write_singular_values_header(std::ostream& out) { out << "trial,z_re,z_im,index,sigma\n"; }

void write_singular_values_rows(std::ostream& out, std::size_t trial, cplx z, std::span<const double> sigma) {
    const std::string zr = format_double(z.real());
    const std::string zi = format_double(z.imag());
    for (std::size_t k = 0; k < sigma.size(); ++k)
        out << trial << ',' << zr << ',' << zi << ',' << k << ',' << format_double(sigma[k]) << '\n';
}

void write_matrix_header(std::ostream& out) { out << "trial,row,col,re,im\n"; }

void write_matrix_rows(std::ostream& out, std::size_t trial, const ComplexMatrix& m) {
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c)
            out << trial << ',' << r << ',' << c << ',' << format_double(m(r, c).real()) << ','
                << format_double(m(r, c).imag()) << '\n';
}

void write_svg(const SvgScene& scene, std::ostream& out) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    auto extend = [&](cplx z) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
        xmin = std::min(xmin, z.real());
        xmax = std::max(xmax, z.real());
        ymin = std::min(ymin, z.imag());
        ymax = std::max(ymax, z.imag());
    };
    for (const auto& layer : scene.scatter)
        for (auto z : layer.points) extend(z);
    for (const auto& line : scene.curves)
        for (auto z : line.vertices) extend(z);
    if (!(xmin <= xmax)) xmin = ymin = -1.0, xmax = ymax = 1.0;
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
    const double pad = 0.05 * span;
    const double size = 800.0;
    const double scale = size / (span + 2 * pad);
    auto px = [&](cplx z) { return (z.real() - xmin + pad) * scale; };
    auto py = [&](cplx z) { return (ymax + pad - z.imag()) * scale; };
    const double width = (xmax - xmin + 2 * pad) * scale;
    const double height = (ymax - ymin + 2 * pad) * scale;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << short_number(width) << "\" height=\""
        << short_number(height) << "\" viewBox=\"0 0 " << short_number(width) << ' ' << short_number(height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!scene.title.empty()) out << "<title>" << scene.title << "</title>\n";
    for (const auto& layer : scene.scatter) {
        out << "<g fill=\"" << layer.color << "\">\n";
        for (auto z : layer.points) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
            out << "<circle cx=\"" << short_number(px(z)) << "\" cy=\"" << short_number(py(z)) << "\" r=\""
                << short_number(layer.radius) << "\"/>\n";
        }
        out << "</g>\n";
    }
    for (const auto& line : scene.curves) {
        if (line.vertices.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << scene.curve_color << "\" stroke-width=\"1\" points=\"";
        for (std::size_t k = 0; k < line.vertices.size(); ++k) {
            if (k > 0) out << ' ';
            out << short_number(px(line.vertices[k])) << ',' << short_number(py(line.vertices[k]));
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorCode::IoError,
            "SHA-256 digest failed");
    return hex(md, len);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::IoError, "cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    require(ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1, ErrorCode::IoError,
            "SHA-256 init failed");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    return hex(md, len);
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    require(!ec && std::filesystem::is_directory(root_), ErrorCode::IoError,
            "cannot create output directory " + root_.string());
}

std::ofstream OutputDir::open(const std::string& name, bool binary) {
    const auto path = record(name);
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    require(out.good(), ErrorCode::IoError, "cannot open " + path.string());
    return out;
}

std::filesystem::path OutputDir::record(const std::string& name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
    return root_ / name;
}

nlohmann::ordered_json OutputDir::inventory() const {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& name : files_) {
        const auto path = root_ / name;
        list.push_back({{"path", name}, {"bytes", std::filesystem::file_size(path)}, {"sha256", sha256_file(path)}});
    }
    return list;
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["spec"] = spec;
    j["seed"] = seed;
    j["workers"] = workers;
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto& b : streams) blocks.push_back({{"group", b.group}, {"first", b.first}, {"count", b.count}});
    j["streams"] = blocks;
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [name, sec] : timings) t[name] = sec;
    j["timings_seconds"] = t;
    j["versions"] = version_info();
    nlohmann::ordered_json f = nlohmann::ordered_json::array();
    for (const auto& x : failures) f.push_back({{"experiment", x.experiment}, {"trial", x.trial}, {"error", x.error}});
    j["failures"] = f;
    j["passed"] = passed;
    j["outputs"] = outputs;
    return j;
}

nlohmann::ordered_json version_info() {
    nlohmann::ordered_json v;
    v["glbm"] = "1.0.0";
#ifdef __VERSION__
    v["compiler"] = __VERSION__;
#endif
    v["cplusplus"] = static_cast<long>(__cplusplus);
    v["openblas"] = openblas_get_config();
    v["openssl"] = OPENSSL_VERSION_TEXT;
    return v;
}

} // namespace glbm::harness
