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

#include <string>
#include <vector>

#include "glbm/glflow.hpp"
#include "glbm/harness/output.hpp"
#include "glbm/harness/spec.hpp"

namespace glbm::harness {

/// One panel of a figure preset: eigenvalues of B0 B_{t,zeta}(1) over the support domain
/// Sigma(b0, t), pushed forward under Psi when zeta != 0.
struct FigurePanel {
    std::string name;
    InitialCondition init;
    double t = 1.0;
    cplx zeta{};
};

const std::vector<FigurePanel>& figure_presets();

/// Panels selected by a preset name: an exact panel name, a figure prefix such as "fig5",
/// or "all". Throws validation-error when nothing matches.
std::vector<FigurePanel> select_panels(const std::string& preset);

/// Runs the experiment, writes its files and manifest.json under the configured output
/// directory, and returns the manifest. Throws FailureThresholdExceeded when fewer
/// than 90% of the trials of any stage succeed.
RunManifest run(const ExperimentSpec& spec, unsigned workers);

} // namespace glbm::harness
