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

#include "glbm/params.hpp"

#include <cmath>
#include <numbers>

#include "glbm/error.hpp"

namespace glbm {

namespace {
// |zeta| within this relative distance of rho counts as the boundary.
constexpr double kBoundaryTol = 1e-12;
} // namespace

EllipticParams EllipticParams::from_rho_zeta(double rho, std::complex<double> zeta) {
    require(std::isfinite(rho) && rho > 0.0, ErrorCode::InvalidParameter, "rho must be positive");
    require(std::isfinite(zeta.real()) && std::isfinite(zeta.imag()), ErrorCode::InvalidParameter,
            "zeta must be finite");
    const double mod = std::abs(zeta);
    require(mod <= rho * (1.0 + kBoundaryTol), ErrorCode::InvalidParameter, "ellipticity violated: |zeta| > rho");

    EllipticParams p;
    p.rho_ = rho;
    p.zeta_ = zeta;
    p.degenerate_ = mod >= rho * (1.0 - kBoundaryTol);
    const double m = std::min(mod, rho);
    p.a_ = std::sqrt(0.5 * (rho + m));
    p.b_ = p.degenerate_ ? 0.0 : std::sqrt(0.5 * (rho - m));

    if (mod == 0.0) {
        p.theta_ = 0.0;
        p.phase_ = {1.0, 0.0};
    } else {
        double arg = std::atan2(zeta.imag(), zeta.real());
        if (arg <= -std::numbers::pi) arg = std::numbers::pi;
        const std::complex<double> unit = zeta / mod;
        // Negative real zeta (either sign of zero imaginary part) maps to theta = pi/2.
        if (unit.imag() == 0.0 && unit.real() < 0.0) {
            arg = std::numbers::pi;
            p.phase_ = {0.0, 1.0};
        } else {
            p.phase_ = std::sqrt(unit);
        }
        p.theta_ = 0.5 * arg;
    }
    return p;
}

TimeGrid::TimeGrid(double t_final, std::size_t steps) : t_final_(t_final), steps_(steps) {
    require(std::isfinite(t_final) && t_final >= 0.0, ErrorCode::InvalidParameter, "t_final must be >= 0");
    require(steps >= 1, ErrorCode::InvalidParameter, "steps must be >= 1");
}

void SimConfig::validate() const {
    require(n >= 1, ErrorCode::InvalidParameter, "N must be >= 1");
    require(trials >= 1, ErrorCode::InvalidParameter, "trials must be >= 1");
    if (scheme == StepScheme::GroupExponential)
        require(params.degenerate(), ErrorCode::InvalidParameter,
                "group-exponential steps need degenerate (normal) increments");
}

EllipticParams UnitTimeParams::params() const {
    require(!zero_diffusion(), ErrorCode::InvalidUsage, "zero-diffusion sentinel has no driver");
    return EllipticParams::from_rho_zeta(rho, zeta);
}

UnitTimeParams reduce_time_param(double rho, std::complex<double> zeta, double t) {
    require(std::isfinite(t) && t >= 0.0, ErrorCode::InvalidParameter, "t must be >= 0");
    // Validates the original pair; the scaled pair inherits |t zeta| <= t rho.
    (void)EllipticParams::from_rho_zeta(rho, zeta);
    if (t == 0.0) return {};
    UnitTimeParams out{t * rho, t * zeta};
    (void)out.params();
    return out;
}

double second_moment_closed_form(const EllipticParams& params, double dt, std::size_t steps) {
    const double factor = std::norm(1.0 + params.zeta() * (0.5 * dt)) + params.rho() * dt;
    return std::pow(factor, static_cast<double>(steps));
}

} // namespace glbm
