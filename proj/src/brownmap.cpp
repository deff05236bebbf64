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

#include "glbm/brownmap.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "glbm/error.hpp"
#include "glbm/spectral.hpp"

namespace glbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWeightTol = 1e-12;
// Guard bands of the removable singularities.
constexpr double kUnitCircleBand = 1e-4;
constexpr double kGeneralBand = 1e-8;

template <class Atoms>
void check_weights(const Atoms& atoms) {
    require(!atoms.empty(), ErrorCode::InvalidParameter, "measure needs at least one atom");
    double total = 0.0;
    for (const auto& [where, w] : atoms) {
        require(std::isfinite(w) && w > 0.0, ErrorCode::InvalidParameter, "atom weights must be positive");
        total += w;
    }
    require(std::abs(total - 1.0) <= kWeightTol, ErrorCode::InvalidParameter, "atom weights must sum to 1");
}

double log_ratio_series(double u) {
    // log(1 + u) / u = 1 - u/2 + u^2/3 - u^3/4 + u^4/5 - ...
    return 1.0 + u * (-0.5 + u * (1.0 / 3.0 + u * (-0.25 + u * 0.2)));
}

} // namespace

CircleMeasure::CircleMeasure(std::vector<std::pair<double, double>> atoms) : atoms_(std::move(atoms)) {
    check_weights(atoms_);
    for (const auto& [angle, w] : atoms_)
        require(std::isfinite(angle), ErrorCode::InvalidParameter, "atom angles must be finite");
}

CircleMeasure CircleMeasure::point_mass(double angle) { return CircleMeasure({{angle, 1.0}}); }

CircleMeasure CircleMeasure::roots_of_unity(std::size_t k) {
    require(k >= 1, ErrorCode::InvalidParameter, "k must be >= 1");
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t j = 0; j < k; ++j)
        atoms.emplace_back(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(k),
                           1.0 / static_cast<double>(k));
    return CircleMeasure(std::move(atoms));
}

std::vector<cplx> CircleMeasure::points() const {
    std::vector<cplx> out;
    out.reserve(atoms_.size());
    for (const auto& [angle, w] : atoms_) out.push_back(std::polar(1.0, angle));
    return out;
}

double log_ratio(double x, double band) {
    if (x == 0.0) return kInf;
    const double u = x - 1.0;
    if (std::abs(u) < band) return log_ratio_series(u);
    return std::log(x) / u;
}

double t_unitary(const CircleMeasure& mu, cplx z) {
    const double r = std::abs(z);
    if (r == 0.0) return kInf;
    double s = 0.0;
    for (const auto& [angle, w] : mu.atoms()) {
        const double d2 = std::norm(std::polar(1.0, angle) - z);
        if (d2 == 0.0) return 0.0;
        s += w / d2;
    }
    const double r2 = r * r;
    const double factor = std::abs(r - 1.0) < kUnitCircleBand ? log_ratio_series(r2 - 1.0) : std::log(r2) / (r2 - 1.0);
    return factor / s;
}

InitialSpectralData InitialSpectralData::atomic(std::vector<std::pair<cplx, double>> atoms) {
    check_weights(atoms);
    InitialSpectralData out;
    out.data_ = std::move(atoms);
    return out;
}

InitialSpectralData InitialSpectralData::from_circle(const CircleMeasure& mu) {
    std::vector<std::pair<cplx, double>> atoms;
    for (const auto& [angle, w] : mu.atoms()) atoms.emplace_back(std::polar(1.0, angle), w);
    return atomic(std::move(atoms));
}

InitialSpectralData InitialSpectralData::matrix(ComplexMatrix b0) {
    require(b0.dim() >= 1, ErrorCode::InvalidParameter, "B0 must be non-empty");
    const SingularSpectrum sv = singular_values(b0);
    require(sv.smallest() > 1e-14 * sv.largest(), ErrorCode::InvalidParameter, "B0 must be invertible");
    InitialSpectralData out;
    out.data_ = std::move(b0);
    return out;
}

double InitialSpectralData::spectral_radius_bound() const {
    if (is_matrix()) return operator_norm(b0());
    double m = 0.0;
    for (const auto& [lambda, w] : atoms()) m = std::max(m, std::abs(lambda));
    return m;
}

TildeMoments tilde_moments(const InitialSpectralData& data, cplx z) {
    TildeMoments out;
    if (!data.is_matrix()) {
        for (const auto& [lambda, w] : data.atoms()) {
            const double d2 = std::norm(lambda - z);
            if (d2 == 0.0) {
                out.singular = true;
                return out;
            }
            out.p0 += w / d2;
            out.p2 += w * std::norm(lambda) / d2;
        }
        return out;
    }

    const ComplexMatrix& b0 = data.b0();
    const std::size_t n = b0.dim();
    const int ni = static_cast<int>(n);
    ComplexMatrix inv = b0;
    inv.add_identity(-z);
    std::vector<lapack_int> ipiv(n);
    auto* a = reinterpret_cast<lapack_complex_double*>(inv.data());
    int info = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, ni, ni, a, ni, ipiv.data());
    require(info >= 0, ErrorCode::SolverFailure, "zgetrf rejected its arguments");
    if (info > 0) {
        out.singular = true;
        return out;
    }
    info = LAPACKE_zgetri(LAPACK_ROW_MAJOR, ni, a, ni, ipiv.data());
    require(info == 0, ErrorCode::SolverFailure, "zgetri failed");
    if (!inv.all_finite()) {
        out.singular = true;
        return out;
    }
    out.p0 = ntrace_gram(inv);
    out.p2 = ntrace_gram(b0 * inv);
    return out;
}

double t_general(const InitialSpectralData& data, cplx z) {
    const TildeMoments m = tilde_moments(data, z);
    if (m.singular) return 0.0;
    const double r2 = std::norm(z);
    if (r2 == 0.0 || m.p2 == 0.0) return kInf;
    const double x = r2 * m.p0 / m.p2;
    return log_ratio(x, kGeneralBand) / m.p2;
}

PointCloud PointCloud::uniform(std::vector<cplx> points) {
    PointCloud out;
    const double w = points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size());
    out.weights.assign(points.size(), w);
    out.points = std::move(points);
    return out;
}

double PointCloud::diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) best = std::max(best, std::norm(points[i] - points[j]));
    return std::sqrt(best);
}

double PointCloud::default_exclusion_radius() const {
    if (points.empty()) return 0.0;
    return 3.0 * diameter() / std::sqrt(static_cast<double>(points.size()));
}

JValue j_transform(const PointCloud& mu, cplx z, double eps) {
    require(mu.points.size() == mu.weights.size(), ErrorCode::DimensionMismatch, "cloud weights do not match points");
    JValue out;
    cplx acc{};
    bool any = false;
    for (std::size_t k = 0; k < mu.points.size(); ++k) {
        const cplx xi = mu.points[k];
        const double d = std::abs(xi - z);
        if (d == 0.0 || d < eps) {
            out.excluded_mass += mu.weights[k];
            ++out.excluded_count;
            continue;
        }
        acc += mu.weights[k] * (xi + z) / (xi - z);
        any = true;
    }
    if (!any) fail(ErrorCode::UndefinedAtPoint, "every cloud point lies within the exclusion radius");
    out.value = 0.5 * acc;
    return out;
}

JValue j_transform(const PointCloud& mu, cplx z) { return j_transform(mu, z, mu.default_exclusion_radius()); }

cplx psi_map(const PointCloud& mu, cplx zeta, cplx z, double eps) {
    if (z == cplx{} || zeta == cplx{}) return z;
    return z * std::exp(zeta * j_transform(mu, z, eps).value);
}

cplx psi_map(const PointCloud& mu, cplx zeta, cplx z) { return psi_map(mu, zeta, z, mu.default_exclusion_radius()); }

} // namespace glbm
