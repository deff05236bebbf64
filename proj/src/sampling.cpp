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

#include "glbm/sampling.hpp"

#include <lapacke.h>

#include <cmath>

#include "glbm/error.hpp"

namespace glbm {

namespace {
void check_time(double t) {
    require(std::isfinite(t) && t >= 0.0, ErrorCode::InvalidParameter, "time increment must be >= 0");
}

void check_dim(std::size_t n) { require(n >= 1, ErrorCode::InvalidParameter, "N must be >= 1"); }
} // namespace

ComplexMatrix sample_gue(std::size_t n, double t, RngStream& rng) {
    check_dim(n);
    check_time(t);
    ComplexMatrix x(n);
    if (t == 0.0) return x;
    const double diag_sd = std::sqrt(t / static_cast<double>(n));
    const double off_sd = std::sqrt(t / (2.0 * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) {
        x(i, i) = {diag_sd * rng.normal(), 0.0};
        for (std::size_t j = i + 1; j < n; ++j) {
            const double re = off_sd * rng.normal();
            const double im = off_sd * rng.normal();
            x(i, j) = {re, im};
            x(j, i) = {re, -im};
        }
    }
    return x;
}

ComplexMatrix sample_ginibre(std::size_t n, double t, RngStream& rng) {
    check_dim(n);
    check_time(t);
    ComplexMatrix g(n);
    if (t == 0.0) return g;
    const double sd = std::sqrt(t / (2.0 * static_cast<double>(n)));
    for (auto& v : g.entries()) {
        const double re = sd * rng.normal();
        const double im = sd * rng.normal();
        v = {re, im};
    }
    return g;
}

ComplexMatrix sample_elliptic_increment(const EllipticParams& params, double dt, std::size_t n, RngStream& rng) {
    check_dim(n);
    check_time(dt);
    ComplexMatrix w(n);
    if (dt == 0.0) return w;

    const double a = params.a();
    const double b = params.b();
    const ComplexMatrix x = sample_gue(n, dt, rng);
    const bool with_y = b > 0.0;
    const ComplexMatrix y = with_y ? sample_gue(n, dt, rng) : ComplexMatrix{};
    const double pr = params.phase().real();
    const double pi = params.phase().imag();

    auto out = w.entries();
    auto xs = x.entries();
    for (std::size_t k = 0; k < out.size(); ++k) {
        // a X + i b Y, then the phase, written out so zero terms stay exact zeros.
        double re = a * xs[k].real();
        double im = a * xs[k].imag();
        if (with_y) {
            const cplx yk = y.entries()[k];
            re -= b * yk.imag();
            im += b * yk.real();
        }
        out[k] = {pr * re - pi * im, pr * im + pi * re};
    }
    return w;
}

ComplexMatrix sample_haar_unitary(std::size_t n, RngStream& rng) {
    ComplexMatrix q = sample_ginibre(n, static_cast<double>(n), rng);
    const int ni = static_cast<int>(n);
    std::vector<cplx> tau(n);
    auto* a = reinterpret_cast<lapack_complex_double*>(q.data());
    auto* tp = reinterpret_cast<lapack_complex_double*>(tau.data());
    int info = LAPACKE_zgeqrf(LAPACK_ROW_MAJOR, ni, ni, a, ni, tp);
    require(info == 0, ErrorCode::SolverFailure, "zgeqrf failed");
    std::vector<cplx> phases(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx r = q(i, i);
        const double m = std::abs(r);
        phases[i] = m > 0.0 ? r / m : cplx{1.0, 0.0};
    }
    info = LAPACKE_zungqr(LAPACK_ROW_MAJOR, ni, ni, ni, a, ni, tp);
    require(info == 0, ErrorCode::SolverFailure, "zungqr failed");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) *= phases[j];
    return q;
}

} // namespace glbm
