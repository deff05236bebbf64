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

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "glbm/error.hpp"
#include "glbm/matrix.hpp"
#include "glbm/rng.hpp"

namespace testing {

using glbm::ComplexMatrix;
using glbm::cplx;

/// |value - target| <= k * se.
inline bool within_se(double value, double target, double se, double k = 4.0) {
    return std::abs(value - target) <= k * se;
}

/// Sample mean and standard error, computed here without the library's reducers.
struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

inline Moments naive_moments(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// Two-sample z statistic for equal means.
inline double two_sample_z(const std::vector<double>& a, const std::vector<double>& b) {
    const Moments ma = naive_moments(a), mb = naive_moments(b);
    return (ma.mean - mb.mean) / std::sqrt(ma.se * ma.se + mb.se * mb.se);
}

/// Dense matrix with independent uniform(-1, 1) real and imaginary parts.
inline ComplexMatrix random_matrix(std::size_t n, glbm::RngStream& rng) {
    ComplexMatrix m(n);
    for (auto& v : m.entries()) v = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    return m;
}

/// Triple-loop product, independent of BLAS.
inline ComplexMatrix naive_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.dim();
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
}

/// Normalized trace tr(A)/N.
inline cplx ts(const ComplexMatrix& a) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a(i, i);
    return s / static_cast<double>(a.dim());
}

inline double max_entry_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) d = std::max(d, std::abs(a.entries()[i] - b.entries()[i]));
    return d;
}

inline bool is_code(const glbm::Error& e, glbm::ErrorCode code) { return e.code() == code; }

} // namespace testing

/// Checks that `expr` throws glbm::Error with the given code.
#define CHECK_THROWS_CODE(expr, expected)                                                                              \
    do {                                                                                                               \
        bool thrown_ = false;                                                                                          \
        try {                                                                                                          \
            (void)(expr);                                                                                              \
        } catch (const glbm::Error& e_) {                                                                              \
            thrown_ = true;                                                                                            \
            CHECK_MESSAGE(e_.code() == (expected), e_.what());                                                         \
        }                                                                                                              \
        CHECK_MESSAGE(thrown_, #expr " did not throw");                                                                \
    } while (false)
