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

// Command-line front end: glbm <kind> --config <file.json> [--seed S] [--out DIR] [--workers W]

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "glbm/error.hpp"
#include "glbm/harness/experiments.hpp"
#include "glbm/harness/verify.hpp"
#include "glbm/montecarlo.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_other = 1;
constexpr int exit_validation = 2;
constexpr int exit_threshold = 3;
constexpr int exit_check_failed = 4;

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    glbm::require(in.good(), glbm::ErrorCode::ValidationError, "cannot read config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        glbm::fail(glbm::ErrorCode::ValidationError, "config is not valid JSON: " + std::string(e.what()));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification tool for multiplicative (rho, zeta)-Brownian motions"};
    std::string kind_name;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> workers;

    std::string kinds;
    for (auto k : glbm::harness::kind_names()) kinds += (kinds.empty() ? "" : ", ") + std::string(k);
    app.add_option("kind", kind_name, "Experiment kind: " + kinds)->required();
    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--seed", seed, "Override the configured seed");
    app.add_option("--out", out_dir, "Override the configured output directory");
    app.add_option("--workers", workers, "Worker threads (default: GLBM_WORKERS or 1)")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        const auto kind = glbm::harness::parse_kind(kind_name);
        auto spec = glbm::harness::ExperimentSpec::parse(kind, load_config(config_path));
        if (seed) spec.set_seed(*seed);
        if (out_dir) spec.set_out(*out_dir);
        const unsigned w = workers ? *workers : glbm::workers_from_env();

        const auto manifest = glbm::harness::run(spec, w);
        for (const auto& f : manifest.failures)
            std::cerr << "trial failure: " << f.experiment << " #" << f.trial << ": " << f.error << '\n';
        std::cout << "wrote " << manifest.outputs.size() << " files to " << spec.text("out") << '\n';
        if (!manifest.passed) {
            std::cout << "verification FAILED (see report.csv)\n";
            return exit_check_failed;
        }
        return exit_ok;
    } catch (const glbm::harness::FailureThresholdExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_threshold;
    } catch (const glbm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == glbm::ErrorCode::ValidationError ? exit_validation : exit_other;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_other;
    }
}
