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

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "glbm/matrix.hpp"

namespace glbm {

/// Atomic probability measure on the unit circle: (angle, weight) pairs.
class CircleMeasure {
public:
    /// Throws invalid-parameter unless weights are positive and sum to 1 within 1e-12.
    explicit CircleMeasure(std::vector<std::pair<double, double>> atoms);

    static CircleMeasure point_mass(double angle = 0.0);
    /// Uniform mass on the k-th roots of unity.
    static CircleMeasure roots_of_unity(std::size_t k);

    std::span<const std::pair<double, double>> atoms() const noexcept { return atoms_; }
    /// e^{i angle} of every atom, in order.
    std::vector<cplx> points() const;

private:
    std::vector<std::pair<double, double>> atoms_;
};

/// log(x) / (x - 1), continued by 1 at x = 1 through a 4th-order series when |x - 1| < band.
/// +inf at x = 0.
double log_ratio(double x, double band);

/// log|z|^2 / (|z|^2 - 1) * (sum_k w_k / |xi_k - z|^2)^{-1}.
/// 0 on an atom, +inf at z = 0; series branch for ||z| - 1| < 1e-4.
double t_unitary(const CircleMeasure& mu, cplx z);

/// Spectral data of the initial condition: atoms of a normal b0, or a matrix B0.
class InitialSpectralData {
public:
    /// Throws invalid-parameter unless weights are positive and sum to 1 within 1e-12.
    static InitialSpectralData atomic(std::vector<std::pair<cplx, double>> atoms);
    static InitialSpectralData from_circle(const CircleMeasure& mu);
    /// Throws invalid-parameter when B0 is singular.
    static InitialSpectralData matrix(ComplexMatrix b0);

    bool is_matrix() const noexcept { return std::holds_alternative<ComplexMatrix>(data_); }
    const std::vector<std::pair<cplx, double>>& atoms() const { return std::get<0>(data_); }
    const ComplexMatrix& b0() const { return std::get<1>(data_); }
    /// Largest |lambda| among atoms, or the operator norm of B0.
    double spectral_radius_bound() const;

private:
    std::variant<std::vector<std::pair<cplx, double>>, ComplexMatrix> data_;
};

/// p0 = tau[|b0 - z|^{-2}], p2 = tau[b0^* b0 |b0 - z|^{-2}]; `singular` when z hits the point spectrum.
struct TildeMoments {
    double p0 = 0.0;
    double p2 = 0.0;
    bool singular = false;
};

TildeMoments tilde_moments(const InitialSpectralData& data, cplx z);

/// log(|z|^2 p0 / p2) / (|z|^2 p0 - p2), continued through its removable singularity;
/// 0 on the point spectrum. Coincides with t_unitary for unitary atomic data.
double t_general(const InitialSpectralData& data, cplx z);

/// Weighted point cloud standing in for a measure on the plane.
struct PointCloud {
    std::vector<cplx> points;
    std::vector<double> weights;

    /// Equal weights 1/M.
    static PointCloud uniform(std::vector<cplx> points);
    /// Largest pairwise distance.
    double diameter() const;
    /// 3 * diameter / sqrt(M).
    double default_exclusion_radius() const;
};

struct JValue {
    cplx value{};
    double excluded_mass = 0.0;
    std::size_t excluded_count = 0;
};

/// 1/2 sum_k w_k (xi_k + z) / (xi_k - z) over cloud points farther than `eps` from z.
/// Throws undefined-at-z when every point is excluded.
JValue j_transform(const PointCloud& mu, cplx z, double eps);
JValue j_transform(const PointCloud& mu, cplx z);

/// z exp(zeta J(z)); 0 at z = 0 and the identity when zeta = 0.
cplx psi_map(const PointCloud& mu, cplx zeta, cplx z, double eps);
cplx psi_map(const PointCloud& mu, cplx zeta, cplx z);

} // namespace glbm
