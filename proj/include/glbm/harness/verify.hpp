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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "glbm/brownmap.hpp"
#include "glbm/glflow.hpp"
#include "glbm/harness/output.hpp"
#include "glbm/montecarlo.hpp"
#include "glbm/ncpoly.hpp"
#include "glbm/region.hpp"

namespace glbm::harness {

/// Raised when fewer than 90% of the trials of an experiment succeed.
class FailureThresholdExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::uint64_t seed = 0;
    unsigned workers = 1;
    /// Offset added to every stream id, so that several stages of one run stay disjoint.
    std::uint64_t first_stream = 0;
};

/// Outcome of one verification plus the data worth writing out.
struct VerifyReport {
    std::string name;
    std::vector<ReportRow> rows;
    std::vector<TrialFailure> failures;
    std::vector<RunManifest::StreamBlock> streams;
    /// Eigenvalue samples, one vector per panel or sample.
    std::vector<std::vector<cplx>> eigenvalues;
    std::vector<Region> regions;

    bool pass() const;
    void check(std::string metric, double value, double target, double tolerance, bool ok);
};

/// Level-set field and scale of the support domain for an initial condition:
/// the unitary formula for circle data, the general one otherwise.
struct SupportField {
    ScalarField field;
    /// Largest |lambda| of the initial data.
    double radius = 1.0;
    bool unitary = true;
};

SupportField support_field(const InitialCondition& init);

/// Sigma(b0, t) on a lattice of spacing h, starting from a window of twice the data radius.
Region support_region(const InitialCondition& init, double t, double h);

/// Eigenvalues of B0 B(t_final) for driver (rho, zeta) in `steps` steps.
std::vector<cplx> simulate_eigenvalues(const InitialCondition& init, std::size_t n, double rho, cplx zeta,
                                       double t_final, std::size_t steps, RngStream& rng);

// Exact second moment of the Euler product against its closed form.
struct MomentsOptions {
    double rho = 1.0;
    cplx zeta{};
    std::size_t n = 32;
    unsigned level = 3;
    double t = 1.0;
    std::size_t trials = 400;
};
VerifyReport verify_moments(const MomentsOptions& opts, const RunOptions& run);

// Coupled refinement gap and its dyadic decay rate.
struct RefinementOptions {
    double rho = 1.0;
    cplx zeta{};
    std::size_t n = 64;
    double t = 1.0;
    unsigned first_level = 3;
    unsigned last_level = 7;
    std::size_t trials = 100;
    double slope_min = -0.65;
    double slope_max = -0.35;
};
VerifyReport verify_refinement(const RefinementOptions& opts, const RunOptions& run);

// Median |B(t) - I - W(t)| and its log-log slope in t.
struct AffineOptions {
    double rho = 1.0;
    cplx zeta{};
    std::size_t n = 128;
    std::size_t steps = 512;
    std::vector<double> ts{0.02, 0.04, 0.08, 0.16, 0.32};
    std::size_t trials = 50;
    double slope_min = 0.8;
    double slope_max = 1.2;
};
VerifyReport verify_affine(const AffineOptions& opts, const RunOptions& run);

// Schwinger-Dyson sides against each other and, when given, an exact target.
struct SdOptions {
    NCPoly q = NCPoly::monomial(1.0, {1, 1, 1});
    std::uint32_t index = 1;
    std::uint32_t nvars = 1;
    std::size_t n = 32;
    std::size_t trials = 2000;
    bool has_target = true;
    cplx target = 2.0 + 1.0 / (32.0 * 32.0);
};
VerifyReport verify_sd(const SdOptions& opts, const RunOptions& run);

// Ginibre driver at unit time: eigenvalues inside radius 1.05 and ts W^2 centered at 0.
struct CircularOptions {
    std::size_t n = 1024;
    double radius = 1.05;
    double min_fraction = 0.97;
    std::size_t moment_trials = 100;
};
VerifyReport verify_circular(const CircularOptions& opts, const RunOptions& run);

// Eigenvalues of B0 B_{1,0}(t) inside the dilated support domain.
struct ContainmentOptions {
    InitialCondition init{IdentityInit{}};
    double t = 3.0;
    std::size_t n = 1024;
    std::size_t steps = 96;
    double margin = 0.05;
    double min_fraction = 0.95;
    double h = 0.01;
};
VerifyReport verify_containment(const ContainmentOptions& opts, const RunOptions& run);

// Boundary-curve count across the figure-eight transition of the point-mass domain.
struct TopologyOptions {
    double h = 0.01;
    double t_below = 3.9;
    double t_above = 4.1;
};
VerifyReport verify_topology(const TopologyOptions& opts);

// Push-forward under Psi: identity at zeta = 0 and containment of B(t, zeta) eigenvalues.
struct PushforwardOptions {
    InitialCondition init{IdentityInit{}};
    double t = 3.0;
    cplx zeta{2.0, -1.0};
    std::size_t n = 1024;
    std::size_t cloud_n = 1024;
    std::size_t steps = 96;
    double min_fraction = 0.93;
    double margin = 0.0;
    double h = 0.01;
};
VerifyReport verify_pushforward(const PushforwardOptions& opts, const RunOptions& run);

// General formula against the unitary one on roots-of-unity data.
struct ReductionOptions {
    std::size_t k = 6;
    std::size_t grid = 200;
    Window window{-2.5, 2.5, -2.5, 2.5};
    double guard = 1e-3;
    double tolerance = 1e-10;
};
VerifyReport verify_reduction(const ReductionOptions& opts);

// Smallest singular value of G + I against N^2 delta^2.
struct GinibreSsvOptions {
    std::size_t n = 32;
    std::size_t trials = 2000;
    std::vector<double> deltas{1e-3, 3e-3, 1e-2};
};
VerifyReport verify_ginibre_ssv(const GinibreSsvOptions& opts, const RunOptions& run);

// Intermediate singular values sigma_{N-l}(B(1) - z) >= c (l/N)^2.
struct IntermediateSvOptions {
    std::size_t n = 256;
    std::size_t trials = 100;
    std::size_t steps = 64;
    cplx z{1.0, 0.0};
    std::size_t ell_min = 20;
    double c = 1e-3;
    double min_fraction = 0.99;
};
VerifyReport verify_intermediate_sv(const IntermediateSvOptions& opts, const RunOptions& run);

// Mean Wegner transform over an eta grid in [N^{-2/11}, 1].
struct WegnerOptions {
    std::size_t n = 512;
    std::size_t steps = 32;
    std::size_t trials = 10;
    std::vector<cplx> zs{0.5, 4.0};
    /// Points among `zs` outside the spectrum, where the values must level off.
    std::vector<cplx> outside{4.0};
    std::size_t eta_points = 8;
    double bound = 20.0;
    double ratio = 2.0;
};
VerifyReport verify_wegner(const WegnerOptions& opts, const RunOptions& run);

// Tail mass of |log sigma| beyond a level.
struct LogTailOptions {
    std::size_t n = 256;
    std::size_t steps = 64;
    std::size_t trials = 100;
    cplx z{};
    double level = 10.0;
    double max_mass = 0.01;
    double min_fraction = 0.95;
};
VerifyReport verify_logtail(const LogTailOptions& opts, const RunOptions& run);

// Median |B C - I| of forward and inverse schemes on shared increments.
struct InverseOptions {
    double rho = 1.0;
    cplx zeta{};
    std::size_t n = 32;
    double t = 1.0;
    std::vector<std::size_t> ks{16, 64, 256, 1024};
    std::size_t trials = 20;
};
VerifyReport verify_inverse(const InverseOptions& opts, const RunOptions& run);

} // namespace glbm::harness
