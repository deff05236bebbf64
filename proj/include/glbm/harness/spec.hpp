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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glbm/glflow.hpp"
#include "glbm/matrix.hpp"
#include "glbm/params.hpp"
#include "glbm/region.hpp"

namespace glbm::harness {

enum class ExperimentKind {
    Simulate,
    Spectrum,
    Boundary,
    Figure,
    VerifyMoments,
    VerifyRefinement,
    VerifyAffine,
    VerifyInverse,
    VerifySsv,
    VerifyWegner,
    VerifyLogtail,
    SdCheck,
};

std::string_view to_string(ExperimentKind kind);
/// Throws validation-error for unknown names.
ExperimentKind parse_kind(std::string_view name);
std::vector<std::string_view> kind_names();

/// A validated experiment description. Every key of the kind's schema is present
/// after parsing (defaults filled in), so getters never fall back silently.
class ExperimentSpec {
public:
    /// Validates `config` against the schema of `kind`; unknown keys, wrong types and
    /// out-of-range values throw validation-error before anything runs.
    static ExperimentSpec parse(ExperimentKind kind, const nlohmann::json& config);

    ExperimentKind kind() const noexcept { return kind_; }
    /// The validated parameters, defaults included, in schema order.
    const nlohmann::ordered_json& params() const noexcept { return params_; }

    bool has(const std::string& key) const;
    std::uint64_t uint(const std::string& key) const;
    double real(const std::string& key) const;
    cplx complex(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::string text(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<std::uint64_t> uints(const std::string& key) const;
    std::vector<cplx> complexes(const std::string& key) const;
    InitialCondition init(const std::string& key = "init") const;
    Window window(const std::string& key = "window") const;
    StepScheme scheme() const;

    /// Overrides applied by the command line after validation.
    void set_seed(std::uint64_t seed);
    void set_out(const std::string& dir);

private:
    ExperimentKind kind_ = ExperimentKind::Simulate;
    nlohmann::ordered_json params_;
};

/// Parses an initial-condition object: {"type": "identity" | "roots_of_unity" | "atomic" | "block" | "explicit", ...}.
InitialCondition parse_init(const nlohmann::json& j);
nlohmann::ordered_json init_to_json(const InitialCondition& init);

} // namespace glbm::harness
