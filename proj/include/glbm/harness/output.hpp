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

#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glbm/matrix.hpp"
#include "glbm/region.hpp"

namespace glbm::harness {

/// One verification outcome. Info rows carry NaN target and tolerance and always pass.
struct ReportRow {
    std::string metric;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

ReportRow info_row(std::string metric, double value);

void write_report_csv(std::span<const ReportRow> rows, std::ostream& out);

void write_eigenvalues_header(std::ostream& out);
void write_eigenvalues_rows(std::ostream& out, std::size_t trial, std::span<const cplx> eigenvalues);
void write_singular_values_header(std::ostream& out);
void write_singular_values_rows(std::ostream& out, std::size_t trial, cplx z, std::span<const double> sigma);
void write_matrix_header(std::ostream& out);
void write_matrix_rows(std::ostream& out, std::size_t trial, const ComplexMatrix& m);

struct SvgLayer {
    std::vector<cplx> points;
    std::string color = "#1f4e9c";
    double radius = 0.6;
};

struct SvgScene {
    std::string title;
    std::vector<SvgLayer> scatter;
    std::vector<Polyline> curves;
    std::string curve_color = "#c0392b";
};

/// Thin scatter and polyline writer; the view box covers every point and vertex.
void write_svg(const SvgScene& scene, std::ostream& out);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Output directory that remembers every file written through it.
class OutputDir {
public:
    /// Creates the directory; throws io-error on failure.
    explicit OutputDir(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    /// Opens `name` for writing and records it in the inventory.
    std::ofstream open(const std::string& name, bool binary = false);
    /// Records a file written by other means.
    std::filesystem::path record(const std::string& name);
    /// [{path, bytes, sha256}] in the order files were recorded.
    nlohmann::ordered_json inventory() const;

private:
    std::filesystem::path root_;
    std::vector<std::string> files_;
};

struct TrialFailure {
    std::string experiment;
    std::size_t trial = 0;
    std::string error;
};

struct RunManifest {
    nlohmann::ordered_json spec;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    /// (group, first stream id, count) for every block of per-trial streams.
    struct StreamBlock {
        std::string group;
        std::uint64_t first = 0;
        std::uint64_t count = 0;
    };
    std::vector<StreamBlock> streams;
    std::vector<std::pair<std::string, double>> timings;
    std::vector<TrialFailure> failures;
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    bool passed = true;

    nlohmann::ordered_json to_json() const;
};

/// Library, compiler and BLAS identification for the manifest.
nlohmann::ordered_json version_info();

} // namespace glbm::harness
