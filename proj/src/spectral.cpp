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

#include "glbm/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "glbm/error.hpp"

namespace glbm {

namespace {

lapack_complex_double* as_lapack(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

void require_finite(const ComplexMatrix& a, const char* what) {
    require(a.all_finite(), ErrorCode::InvalidParameter, std::string(what) + ": non-finite entries");
}

} // namespace

Spectrum eigenvalues(const ComplexMatrix& a, bool with_residual) {
    require_finite(a, "eigenvalues");
    const std::size_t n = a.dim();
    Spectrum out;
    if (n == 0) return out;
    const int ni = static_cast<int>(n);
    ComplexMatrix work = a;
    out.eigenvalues.resize(n);
    ComplexMatrix vr = with_residual ? ComplexMatrix(n) : ComplexMatrix{};
    const int info = LAPACKE_zgeev(LAPACK_ROW_MAJOR, 'N', with_residual ? 'V' : 'N', ni, as_lapack(work.data()), ni,
                                   as_lapack(out.eigenvalues.data()), nullptr, ni,
                                   with_residual ? as_lapack(vr.data()) : nullptr, ni);
    if (info != 0)
        fail(ErrorCode::SolverFailure, "zgeev did not converge (info=" + std::to_string(info) + ", N=" +
                                           std::to_string(n) + ", |A|_F=" + std::to_string(frobenius_norm(a)) + ")");

    if (!with_residual) {
        out.residual = static_cast<double>(n) * std::numeric_limits<double>::epsilon();
        return out;
    }

    const double scale = std::max(operator_norm(a), std::numeric_limits<double>::min());
    const ComplexMatrix av = a * vr;
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += std::norm(av(i, j) - out.eigenvalues[j] * vr(i, j));
            den += std::norm(vr(i, j));
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    out.residual = worst / scale;
    out.residual_from_vectors = true;
    return out;
}

SingularSpectrum singular_values(const ComplexMatrix& a, cplx z) {
    require_finite(a, "singular_values");
    const std::size_t n = a.dim();
    SingularSpectrum out;
    out.shift = z;
    if (n == 0) return out;
    ComplexMatrix work = a;
    if (z != cplx{}) work.add_identity(-z);
    const int ni = static_cast<int>(n);
    out.values.resize(n);
    const int info = LAPACKE_zgesdd(LAPACK_ROW_MAJOR, 'N', ni, ni, as_lapack(work.data()), ni, out.values.data(),
                                    nullptr, ni, nullptr, ni);
    if (info != 0) fail(ErrorCode::SolverFailure, "zgesdd did not converge (info=" + std::to_string(info) + ")");
    // LAPACK already sorts descending; enforce it so the invariant never depends on the backend.
    std::sort(out.values.begin(), out.values.end(), std::greater<>());
    for (auto& s : out.values) s = std::max(s, 0.0);
    return out;
}

double operator_norm(const ComplexMatrix& a) {
    if (a.dim() == 0) return 0.0;
    return singular_values(a).largest();
}

LogPotential log_potential(const SingularSpectrum& sv) {
    LogPotential out;
    if (sv.values.empty()) return out;
    double acc = 0.0;
    for (double s : sv.values) {
        if (s == 0.0) {
            out.neg_infinite = true;
            out.value = -std::numeric_limits<double>::infinity();
            return out;
        }
        acc += std::log(s);
    }
    out.value = acc / static_cast<double>(sv.values.size());
    return out;
}

LogPotential log_potential(const ComplexMatrix& a, cplx z) { return log_potential(singular_values(a, z)); }

LogPotential log_potential_from_eigenvalues(std::span<const cplx> eigenvalues, cplx z) {
    LogPotential out;
    if (eigenvalues.empty()) return out;
    double acc = 0.0;
    for (const cplx& lam : eigenvalues) {
        const double d = std::abs(z - lam);
        if (d == 0.0) {
            out.neg_infinite = true;
            out.value = -std::numeric_limits<double>::infinity();
            return out;
        }
        acc += std::log(d);
    }
    out.value = acc / static_cast<double>(eigenvalues.size());
    return out;
}

double wegner_transform(const SingularSpectrum& sv, double eta) {
    require(eta > 0.0, ErrorCode::InvalidParameter, "eta must be positive");
    if (sv.values.empty()) return 0.0;
    double acc = 0.0;
    for (double s : sv.values) acc += eta / (eta * eta + s * s);
    return -acc / static_cast<double>(sv.values.size());
}

double wegner_transform(const ComplexMatrix& a, cplx z, double eta) {
    return wegner_transform(singular_values(a, z), eta);
}

double sv_counting(const SingularSpectrum& sv, double eta) {
    if (sv.values.empty()) return 0.0;
    const auto count = std::count_if(sv.values.begin(), sv.values.end(), [eta](double s) { return s <= eta; });
    return static_cast<double>(count) / static_cast<double>(sv.values.size());
}

double sv_counting(const ComplexMatrix& a, cplx z, double eta) { return sv_counting(singular_values(a, z), eta); }

double log_tail_mass(const SingularSpectrum& sv, double level) {
    require(level > 0.0, ErrorCode::InvalidParameter, "tail level must be positive");
    if (sv.values.empty()) return 0.0;
    double acc = 0.0;
    for (double s : sv.values) {
        const double l = s == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(std::log(s));
        if (l > level) acc += l;
    }
    return acc / static_cast<double>(sv.values.size());
}

double log_tail_mass(const ComplexMatrix& a, cplx z, double level) {
    return log_tail_mass(singular_values(a, z), level);
}

bool weyl_consistent(std::span<const cplx> eigenvalues, const SingularSpectrum& sv, double rel_tol) {
    if (sv.values.empty()) return eigenvalues.empty();
    const double top = sv.largest();
    const double slack = rel_tol * std::max(top, 1.0);
    for (const cplx& lam : eigenvalues) {
        const double m = std::abs(lam);
        if (m > top + slack || m < sv.smallest() - slack) return false;
    }
    return true;
}

} // namespace glbm
