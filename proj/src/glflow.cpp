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

#include "glbm/glflow.hpp"

#include <lapacke.h>

#include <cmath>
#include <numbers>

#include "glbm/error.hpp"
#include "glbm/sampling.hpp"
#include "glbm/spectral.hpp"

namespace glbm {

namespace {

void check_same_dim(const ComplexMatrix& lhs, const ComplexMatrix& rhs, const char* what) {
    require(lhs.dim() == rhs.dim(), ErrorCode::DimensionMismatch,
            std::string(what) + ": " + std::to_string(lhs.dim()) + " vs " + std::to_string(rhs.dim()));
}

void check_finite(const ComplexMatrix& m, std::size_t step_index) {
    if (!m.all_finite())
        fail(ErrorCode::NumericalOverflow, "product left the finite range at step " + std::to_string(step_index));
}

// b <- b * factor, for a general factor matrix.
void right_multiply(ComplexMatrix& b, const ComplexMatrix& factor, ComplexMatrix& scratch) {
    if (scratch.dim() != b.dim()) scratch = ComplexMatrix(b.dim());
    gemm_into(b, factor, scratch);
    std::swap(b, scratch);
}

void apply_step(ComplexMatrix& b, const EllipticParams& params, const ComplexMatrix& dw, double dt, StepScheme scheme,
                ComplexMatrix& scratch) {
    if (scheme == StepScheme::GroupExponential)
        right_multiply(b, group_exponential_factor(params, dw), scratch);
    else
        step_in_place(b, params, dw, dt, scratch);
}

ComplexMatrix euler_product(std::span<const ComplexMatrix> increments, const EllipticParams& params, double dt,
                            std::size_t n) {
    ComplexMatrix b = ComplexMatrix::identity(n);
    ComplexMatrix scratch(n);
    for (const auto& dw : increments) step_in_place(b, params, dw, dt, scratch);
    return b;
}

} // namespace

ComplexMatrix step(const ComplexMatrix& b, const EllipticParams& params, const ComplexMatrix& dw, double dt) {
    ComplexMatrix out = b;
    ComplexMatrix scratch(b.dim());
    step_in_place(out, params, dw, dt, scratch);
    return out;
}

void step_in_place(ComplexMatrix& b, const EllipticParams& params, const ComplexMatrix& dw, double dt,
                   ComplexMatrix& scratch) {
    check_same_dim(b, dw, "step");
    if (scratch.dim() != b.dim()) scratch = ComplexMatrix(b.dim());
    // scratch = (1 + zeta dt/2) B + B dW
    const cplx diag = 1.0 + params.zeta() * (0.5 * dt);
    auto dst = scratch.entries();
    auto src = b.entries();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = diag * src[i];
    gemm_into(b, dw, scratch, 1.0, 1.0);
    std::swap(b, scratch);
}

ComplexMatrix group_exponential_factor(const EllipticParams& params, const ComplexMatrix& dw) {
    require(params.degenerate(), ErrorCode::InvalidUsage, "group exponential needs a normal (degenerate) increment");
    const std::size_t n = dw.dim();
    const cplx unphase = std::conj(params.phase()) / params.a();
    ComplexMatrix x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, i) = {(unphase * dw(i, i)).real(), 0.0};
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx v = 0.5 * (unphase * dw(i, j) + std::conj(unphase * dw(j, i)));
            x(i, j) = v;
            x(j, i) = std::conj(v);
        }
    }
    std::vector<double> lambda(n);
    const int ni = static_cast<int>(n);
    const int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'V', 'U', ni, reinterpret_cast<lapack_complex_double*>(x.data()),
                                    ni, lambda.data());
    require(info == 0, ErrorCode::SolverFailure, "zheevd failed (info=" + std::to_string(info) + ")");

    // x now holds the eigenvectors V column-wise; form (V diag(f)) V*.
    const cplx scale = params.phase() * params.a();
    ComplexMatrix vf = x;
    for (std::size_t j = 0; j < n; ++j) {
        const cplx f = std::exp(scale * lambda[j]);
        for (std::size_t i = 0; i < n; ++i) vf(i, j) *= f;
    }
    return vf * x.adjoint();
}

StepScheme resolve_scheme(StepScheme scheme, const EllipticParams& params) {
    if (scheme == StepScheme::Auto) return params.degenerate() ? StepScheme::GroupExponential : StepScheme::Euler;
    return scheme;
}

PathState start_path(ComplexMatrix b0) { return PathState{std::move(b0), 0.0, 0}; }

void advance(PathState& state, const EllipticParams& params, const ComplexMatrix& dw, double dt, StepScheme scheme) {
    ComplexMatrix scratch;
    apply_step(state.b, params, dw, dt, resolve_scheme(scheme, params), scratch);
    state.t += dt;
    ++state.increments_consumed;
}

void check_initial(const InitialCondition& init, std::size_t n) {
    require(n >= 1, ErrorCode::InvalidParameter, "N must be >= 1");
    std::visit(
        [n](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, RootsOfUnityInit>) {
                require(spec.k >= 1 && n % spec.k == 0, ErrorCode::InvalidParameter,
                        "roots of unity: N must be divisible by k");
            } else if constexpr (std::is_same_v<T, AtomicNormalInit>) {
                require(!spec.atoms.empty(), ErrorCode::InvalidParameter, "atomic init needs at least one atom");
                double total = 0.0;
                double count_total = 0.0;
                for (const auto& [lambda, w] : spec.atoms) {
                    require(w > 0.0, ErrorCode::InvalidParameter, "atom weights must be positive");
                    total += w;
                    const double count = w * static_cast<double>(n);
                    require(std::abs(count - std::round(count)) <= 1e-9, ErrorCode::InvalidParameter,
                            "atomic init: N * weight must be an integer");
                    count_total += std::round(count);
                }
                require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidParameter,
                        "atomic init: weights must sum to 1");
                require(count_total == static_cast<double>(n), ErrorCode::InvalidParameter,
                        "atomic init: multiplicities must sum to N");
            } else if constexpr (std::is_same_v<T, NonNormalBlockInit>) {
                require(n % 2 == 0, ErrorCode::InvalidParameter, "block init: N must be even");
            } else if constexpr (std::is_same_v<T, ExplicitInit>) {
                require(spec.matrix.dim() == n, ErrorCode::DimensionMismatch, "explicit init has the wrong dimension");
                require(spec.matrix.all_finite(), ErrorCode::InvalidParameter, "explicit init has non-finite entries");
            }
        },
        init.kind);
}

std::size_t compatible_dimension(const InitialCondition& init, std::size_t n) {
    if (std::holds_alternative<ExplicitInit>(init.kind)) return n;
    for (std::size_t m = n; m >= 1; --m) {
        try {
            check_initial(init, m);
            return m;
        } catch (const Error&) {
        }
    }
    fail(ErrorCode::InvalidParameter, "no dimension <= N fits the initial condition");
}

RealizedInitial make_initial(const InitialCondition& init, std::size_t n, RngStream& rng) {
    check_initial(init, n);
    ComplexMatrix b0 = std::visit(
        [n](const auto& spec) -> ComplexMatrix {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, IdentityInit>) {
                return ComplexMatrix::identity(n);
            } else if constexpr (std::is_same_v<T, RootsOfUnityInit>) {
                std::vector<cplx> diag(n);
                const std::size_t reps = n / spec.k;
                for (std::size_t j = 0; j < spec.k; ++j) {
                    const cplx root =
                        std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(spec.k));
                    for (std::size_t r = 0; r < reps; ++r) diag[j * reps + r] = root;
                }
                return ComplexMatrix::diagonal(diag);
            } else if constexpr (std::is_same_v<T, AtomicNormalInit>) {
                std::vector<cplx> diag;
                diag.reserve(n);
                for (const auto& [lambda, w] : spec.atoms)
                    diag.insert(diag.end(), static_cast<std::size_t>(std::round(w * static_cast<double>(n))), lambda);
                return ComplexMatrix::diagonal(diag);
            } else if constexpr (std::is_same_v<T, NonNormalBlockInit>) {
                ComplexMatrix m(n);
                for (std::size_t i = 0; i < n; i += 2) {
                    m(i, i) = spec.block[0];
                    m(i, i + 1) = spec.block[1];
                    m(i + 1, i) = spec.block[2];
                    m(i + 1, i + 1) = spec.block[3];
                }
                return m;
            } else {
                return spec.matrix;
            }
        },
        init.kind);

    if (init.haar_conjugate) {
        const ComplexMatrix u = sample_haar_unitary(n, rng);
        b0 = u * b0 * u.adjoint();
    }

    RealizedInitial out;
    const SingularSpectrum sv = singular_values(b0);
    out.sigma_max = sv.largest();
    out.sigma_min = sv.smallest();
    out.k_bound =
        out.sigma_min > 0.0 ? std::max(out.sigma_max, 1.0 / out.sigma_min) : std::numeric_limits<double>::infinity();
    out.b0 = std::move(b0);
    return out;
}

std::vector<ComplexMatrix> sample_path(const EllipticParams& params, const TimeGrid& grid, std::size_t n,
                                       RngStream& rng) {
    std::vector<ComplexMatrix> out;
    out.reserve(grid.steps());
    for (std::size_t i = 0; i < grid.steps(); ++i) out.push_back(sample_elliptic_increment(params, grid.dt(), n, rng));
    return out;
}

ComplexMatrix simulate_forward(const ComplexMatrix& b0, const EllipticParams& params,
                               std::span<const ComplexMatrix> increments, double dt, StepScheme scheme) {
    const StepScheme s = resolve_scheme(scheme, params);
    ComplexMatrix b = b0;
    ComplexMatrix scratch(b0.dim());
    for (std::size_t i = 0; i < increments.size(); ++i) {
        apply_step(b, params, increments[i], dt, s, scratch);
        check_finite(b, i + 1);
    }
    return b;
}

ComplexMatrix simulate_endpoint(const SimConfig& config, const ComplexMatrix& b0, RngStream& rng) {
    config.validate();
    require(b0.dim() == config.n, ErrorCode::DimensionMismatch, "initial matrix does not match N");
    if (config.grid.t_final() == 0.0) return b0;
    const StepScheme s = resolve_scheme(config.scheme, config.params);
    const double dt = config.grid.dt();
    ComplexMatrix b = b0;
    ComplexMatrix scratch(config.n);
    for (std::size_t i = 0; i < config.grid.steps(); ++i) {
        const ComplexMatrix dw = sample_elliptic_increment(config.params, dt, config.n, rng);
        apply_step(b, config.params, dw, dt, s, scratch);
        check_finite(b, i + 1);
    }
    return b;
}

ComplexMatrix simulate_inverse(const EllipticParams& params, std::span<const ComplexMatrix> increments, double dt) {
    require(!increments.empty(), ErrorCode::InvalidParameter, "inverse scheme needs at least one increment");
    const std::size_t n = increments.front().dim();
    const cplx diag = 1.0 + params.zeta() * (0.5 * dt);
    ComplexMatrix c = ComplexMatrix::identity(n);
    ComplexMatrix next(n);
    for (std::size_t i = 0; i < increments.size(); ++i) {
        check_same_dim(c, increments[i], "simulate_inverse");
        auto dst = next.entries();
        auto src = c.entries();
        for (std::size_t e = 0; e < dst.size(); ++e) dst[e] = diag * src[e];
        gemm_into(increments[i], c, next, -1.0, 1.0);
        std::swap(c, next);
        check_finite(c, i + 1);
    }
    return c;
}

CoupledIncrements::CoupledIncrements(const EllipticParams& params, double t, std::size_t finest_level, std::size_t n,
                                     RngStream& rng)
    : t_(t) {
    require(std::isfinite(t) && t >= 0.0, ErrorCode::InvalidParameter, "t must be >= 0");
    require(finest_level < 30, ErrorCode::LevelOutOfRange, "finest level too large");
    const std::size_t count = std::size_t{1} << finest_level;
    const double dt = t / static_cast<double>(count);
    std::vector<ComplexMatrix> finest;
    finest.reserve(count);
    for (std::size_t i = 0; i < count; ++i) finest.push_back(sample_elliptic_increment(params, dt, n, rng));
    build_coarse(std::move(finest));
}

CoupledIncrements CoupledIncrements::from_finest(std::vector<ComplexMatrix> finest, double t) {
    const std::size_t count = finest.size();
    require(count >= 1 && (count & (count - 1)) == 0, ErrorCode::InvalidParameter,
            "finest level needs a power-of-two number of increments");
    for (const auto& m : finest) check_same_dim(finest.front(), m, "coupled increments");
    CoupledIncrements out;
    out.t_ = t;
    out.build_coarse(std::move(finest));
    return out;
}

void CoupledIncrements::build_coarse(std::vector<ComplexMatrix> finest) {
    std::size_t levels = 0;
    while ((std::size_t{1} << levels) < finest.size()) ++levels;
    levels_.assign(levels + 1, {});
    levels_[levels] = std::move(finest);
    for (std::size_t l = levels; l-- > 0;) {
        const auto& children = levels_[l + 1];
        auto& parents = levels_[l];
        parents.reserve(children.size() / 2);
        for (std::size_t i = 0; i < children.size(); i += 2) parents.push_back(children[i] + children[i + 1]);
    }
}

double CoupledIncrements::dt(std::size_t l) const {
    require(l < levels_.size(), ErrorCode::LevelOutOfRange, "level " + std::to_string(l) + " not available");
    return t_ / static_cast<double>(std::size_t{1} << l);
}

std::span<const ComplexMatrix> CoupledIncrements::level(std::size_t l) const {
    require(l < levels_.size(), ErrorCode::LevelOutOfRange, "level " + std::to_string(l) + " not available");
    return levels_[l];
}

double refine_gap(const CoupledIncrements& coupled, const EllipticParams& params, std::size_t n) {
    require(n >= 1 && n <= coupled.finest_level(), ErrorCode::LevelOutOfRange,
            "refinement level must lie in [1, " + std::to_string(coupled.finest_level()) + "]");
    const auto fine = coupled.level(n);
    const auto coarse = coupled.level(n - 1);
    const std::size_t dim = fine.front().dim();
    const ComplexMatrix bn = euler_product(fine, params, coupled.dt(n), dim);
    const ComplexMatrix bm = euler_product(coarse, params, coupled.dt(n - 1), dim);
    return std::sqrt(ntrace_gram(bn - bm));
}

double affine_deviation(const InitialCondition& init, const EllipticParams& params,
                        std::span<const ComplexMatrix> increments, double dt) {
    require(init.is_identity(), ErrorCode::InvalidUsage, "affine deviation is defined from the identity only");
    require(!increments.empty(), ErrorCode::InvalidParameter, "affine deviation needs at least one increment");
    const std::size_t n = increments.front().dim();
    ComplexMatrix w(n);
    for (const auto& dw : increments) w += dw;
    ComplexMatrix diff = euler_product(increments, params, dt, n);
    diff -= w;
    diff.add_identity(-1.0);
    return operator_norm(diff);
}

double sample_affine_deviation(const EllipticParams& params, const TimeGrid& grid, std::size_t n, RngStream& rng) {
    const double dt = grid.dt();
    ComplexMatrix w(n);
    ComplexMatrix b = ComplexMatrix::identity(n);
    ComplexMatrix scratch(n);
    for (std::size_t i = 0; i < grid.steps(); ++i) {
        const ComplexMatrix dw = sample_elliptic_increment(params, dt, n, rng);
        step_in_place(b, params, dw, dt, scratch);
        w += dw;
    }
    b -= w;
    b.add_identity(-1.0);
    return operator_norm(b);
}

} // namespace glbm
