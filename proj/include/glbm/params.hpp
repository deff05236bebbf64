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
#include <cstddef>
#include <cstdint>

namespace glbm {

/// Driver coefficients of the elliptic Brownian motion W = e^{i theta}(a X + i b Y),
/// parametrized by rho = E ts|W(1)|^2 and zeta = E ts W(1)^2.
///
/// Immutable once built. The boundary |zeta| = rho is accepted and flagged
/// `degenerate` (b = 0); callers needing strict ellipticity check the flag.
class EllipticParams {
public:
    /// Throws invalid-parameter when rho <= 0 or |zeta| > rho.
    static EllipticParams from_rho_zeta(double rho, std::complex<double> zeta);

    double rho() const noexcept { return rho_; }
    std::complex<double> zeta() const noexcept { return zeta_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    /// theta in (-pi/2, pi/2]; zero when zeta = 0.
    double theta() const noexcept { return theta_; }
    /// e^{i theta}, computed as the principal square root of zeta/|zeta| so that
    /// special angles (theta = pi/2 for zeta < 0) are exact.
    std::complex<double> phase() const noexcept { return phase_; }
    bool degenerate() const noexcept { return degenerate_; }

private:
    EllipticParams() = default;

    double rho_ = 1.0;
    std::complex<double> zeta_{};
    double a_ = 0.0;
    double b_ = 0.0;
    double theta_ = 0.0;
    std::complex<double> phase_{1.0, 0.0};
    bool degenerate_ = false;
};

/// Uniform time discretization: `steps` increments of size t_final/steps.
/// The time after i steps is t_final * i / steps, so the endpoint is t_final exactly.
class TimeGrid {
public:
    TimeGrid(double t_final, std::size_t steps);

    double t_final() const noexcept { return t_final_; }
    std::size_t steps() const noexcept { return steps_; }
    double dt() const noexcept { return t_final_ / static_cast<double>(steps_); }
    double time_at(std::size_t i) const noexcept {
        return i == steps_ ? t_final_ : t_final_ * static_cast<double>(i) / static_cast<double>(steps_);
    }

private:
    double t_final_;
    std::size_t steps_;
};

/// How one multiplicative step is formed.
enum class StepScheme {
    /// Euler factor for elliptic parameters, group exponential in the degenerate mode.
    Auto,
    /// I + dW + (zeta dt / 2) I.
    Euler,
    /// exp(dW); only available for degenerate (normal) increments.
    GroupExponential,
};

struct SimConfig {
    std::size_t n = 1;
    EllipticParams params = EllipticParams::from_rho_zeta(1.0, 0.0);
    TimeGrid grid{1.0, 1};
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    StepScheme scheme = StepScheme::Auto;

    /// Throws invalid-parameter when N < 1 or trials < 1.
    void validate() const;
};

/// Result of folding time into the parameters: W_{rho,zeta}(t) has the law of W_{t rho, t zeta}(1).
struct UnitTimeParams {
    double rho = 0.0;
    std::complex<double> zeta{};

    /// t = 0 collapses to no diffusion; simulation then returns the initial matrix.
    bool zero_diffusion() const noexcept { return rho == 0.0; }
    /// Throws invalid-usage for the zero-diffusion sentinel.
    EllipticParams params() const;
};

UnitTimeParams reduce_time_param(double rho, std::complex<double> zeta, double t);

/// Closed-form E ts[B B*] after `steps` Euler factors of size dt from B(0) = I:
/// (|1 + zeta dt/2|^2 + rho dt)^steps. Exact at every N.
double second_moment_closed_form(const EllipticParams& params, double dt, std::size_t steps);

} // namespace glbm
