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

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "glbm/matrix.hpp"
#include "glbm/params.hpp"
#include "glbm/rng.hpp"

namespace glbm {

/// B (I + dW + (zeta dt / 2) I). No normalization or projection.
ComplexMatrix step(const ComplexMatrix& b, const EllipticParams& params, const ComplexMatrix& dw, double dt);

/// In-place variant of `step` that reuses `scratch` for the product.
void step_in_place(ComplexMatrix& b, const EllipticParams& params, const ComplexMatrix& dw, double dt,
                   ComplexMatrix& scratch);

/// exp(dW) for a normal increment e^{i theta} a X, by diagonalizing the Hermitian X.
ComplexMatrix group_exponential_factor(const EllipticParams& params, const ComplexMatrix& dw);

/// Resolves Auto to the scheme actually used for these parameters.
StepScheme resolve_scheme(StepScheme scheme, const EllipticParams& params);

struct PathState {
    ComplexMatrix b;
    double t = 0.0;
    std::size_t increments_consumed = 0;
};

PathState start_path(ComplexMatrix b0);

/// Right-multiplies the state by one step factor of the given scheme and advances the clock.
void advance(PathState& state, const EllipticParams& params, const ComplexMatrix& dw, double dt,
             StepScheme scheme = StepScheme::Euler);

// Initial conditions.

struct IdentityInit {};
struct RootsOfUnityInit {
    std::size_t k = 1;
};
/// Atoms (lambda, weight); N * weight must be an integer for every atom.
struct AtomicNormalInit {
    std::vector<std::pair<cplx, double>> atoms;
};
/// 2x2 block {b00, b01, b10, b11} repeated along the diagonal.
struct NonNormalBlockInit {
    std::array<cplx, 4> block{};
};
struct ExplicitInit {
    ComplexMatrix matrix;
};

struct InitialCondition {
    std::variant<IdentityInit, RootsOfUnityInit, AtomicNormalInit, NonNormalBlockInit, ExplicitInit> kind;
    /// Conjugate the realized matrix by an independent Haar unitary.
    bool haar_conjugate = false;

    bool is_identity() const noexcept { return std::holds_alternative<IdentityInit>(kind) && !haar_conjugate; }
};

struct RealizedInitial {
    ComplexMatrix b0;
    double sigma_min = 1.0;
    double sigma_max = 1.0;
    /// Smallest K with 1/K <= sigma_min and sigma_max <= K; infinite for singular B0.
    double k_bound = 1.0;
};

/// Throws invalid-parameter on divisibility or weight violations and dimension-mismatch
/// for an explicit matrix of the wrong size.
void check_initial(const InitialCondition& init, std::size_t n);

/// Largest dimension <= n that the initial condition accepts; n itself for an explicit matrix.
/// Throws invalid-parameter when no such dimension exists.
std::size_t compatible_dimension(const InitialCondition& init, std::size_t n);

/// Validates with check_initial, then builds B0 (Haar-conjugated when requested).
RealizedInitial make_initial(const InitialCondition& init, std::size_t n, RngStream& rng);

// Increment paths.

/// Independent elliptic increments for every step of the grid.
std::vector<ComplexMatrix> sample_path(const EllipticParams& params, const TimeGrid& grid, std::size_t n,
                                       RngStream& rng);

/// B0 times the product of step factors over `increments`.
/// Throws numerical-overflow when the product leaves the finite range.
ComplexMatrix simulate_forward(const ComplexMatrix& b0, const EllipticParams& params,
                               std::span<const ComplexMatrix> increments, double dt,
                               StepScheme scheme = StepScheme::Euler);

/// B0 Prod (I + dW_i + zeta dt/2 I) with fresh increments drawn from `rng`.
/// Auto uses the group exponential in the degenerate mode.
ComplexMatrix simulate_endpoint(const SimConfig& config, const ComplexMatrix& b0, RngStream& rng);

/// Left-multiplicative scheme C_i = (I - dW_i + zeta dt/2 I) C_{i-1}, C_0 = I.
ComplexMatrix simulate_inverse(const EllipticParams& params, std::span<const ComplexMatrix> increments, double dt);

/// Dyadic increment hierarchy: level l holds 2^l increments of size t / 2^l,
/// each one the exact entrywise sum of its two children at level l + 1.
class CoupledIncrements {
public:
    CoupledIncrements(const EllipticParams& params, double t, std::size_t finest_level, std::size_t n, RngStream& rng);
    /// Builds the hierarchy from 2^L finest increments.
    static CoupledIncrements from_finest(std::vector<ComplexMatrix> finest, double t);

    std::size_t finest_level() const noexcept { return levels_.size() - 1; }
    double t() const noexcept { return t_; }
    double dt(std::size_t level) const;
    /// Throws level-out-of-range above the finest level.
    std::span<const ComplexMatrix> level(std::size_t l) const;

private:
    CoupledIncrements() = default;
    void build_coarse(std::vector<ComplexMatrix> finest);

    double t_ = 0.0;
    std::vector<std::vector<ComplexMatrix>> levels_;
};

/// sqrt(ts[(B_n - B_{n-1})(B_n - B_{n-1})^*]) for the Euler products from I at levels n and n - 1.
double refine_gap(const CoupledIncrements& coupled, const EllipticParams& params, std::size_t n);

/// Operator norm |B(t) - I - W(t)| with W(t) the sum of the path's own increments.
/// Throws invalid-usage unless the initial condition is the identity.
double affine_deviation(const InitialCondition& init, const EllipticParams& params,
                        std::span<const ComplexMatrix> increments, double dt);

/// Same quantity for freshly drawn increments, without storing the path.
/// Bit-identical to affine_deviation on the path sample_path would draw from the same stream.
double sample_affine_deviation(const EllipticParams& params, const TimeGrid& grid, std::size_t n, RngStream& rng);

} // namespace glbm
