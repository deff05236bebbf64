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
#include <span>
#include <vector>

namespace glbm {

using cplx = std::complex<double>;

/// Dense square complex matrix stored row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}
    ComplexMatrix(std::size_t n, std::vector<cplx> row_major);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix zeros(std::size_t n) { return ComplexMatrix(n); }
    static ComplexMatrix diagonal(std::span<const cplx> diag);

    std::size_t dim() const noexcept { return n_; }
    bool empty() const noexcept { return n_ == 0; }

    cplx& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
    const cplx& operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }

    cplx* data() noexcept { return data_.data(); }
    const cplx* data() const noexcept { return data_.data(); }
    std::span<cplx> entries() noexcept { return data_; }
    std::span<const cplx> entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const;

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(cplx s);

    /// Adds s to every diagonal entry.
    ComplexMatrix& add_identity(cplx s);

    /// Sum of diagonal entries.
    cplx trace() const;
    /// Normalized trace, trace / N.
    cplx ntrace() const;

    bool all_finite() const;

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(cplx s, ComplexMatrix m);

/// Matrix product through BLAS zgemm.
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// out = alpha * lhs * rhs + beta * out. `out` must not alias lhs or rhs.
void gemm_into(const ComplexMatrix& lhs, const ComplexMatrix& rhs, ComplexMatrix& out, cplx alpha = 1.0,
               cplx beta = 0.0);

/// ts[A B] without forming the product.
cplx ntrace_product(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// ts[A A*] (squared normalized Hilbert-Schmidt norm).
double ntrace_gram(const ComplexMatrix& m);

/// Frobenius norm.
double frobenius_norm(const ComplexMatrix& m);

/// Largest absolute entry difference.
double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// Pins BLAS to a single thread; called by parallel Monte Carlo drivers.
void set_blas_single_threaded();

} // namespace glbm
