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

#include "glbm/matrix.hpp"

#include <cblas.h>

#include <cmath>

#include "glbm/error.hpp"

namespace glbm {

ComplexMatrix::ComplexMatrix(std::size_t n, std::vector<cplx> row_major) : n_(n), data_(std::move(row_major)) {
    require(data_.size() == n * n, ErrorCode::DimensionMismatch, "row-major data does not have N*N entries");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    require(n_ == rhs.n_, ErrorCode::DimensionMismatch, "matrix sum");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
    require(n_ == rhs.n_, ErrorCode::DimensionMismatch, "matrix difference");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

ComplexMatrix& ComplexMatrix::add_identity(cplx s) {
    for (std::size_t i = 0; i < n_; ++i) (*this)(i, i) += s;
    return *this;
}

cplx ComplexMatrix::trace() const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) acc += (*this)(i, i);
    return acc;
}

cplx ComplexMatrix::ntrace() const { return n_ == 0 ? cplx{} : trace() / static_cast<double>(n_); }

bool ComplexMatrix::all_finite() const {
    for (const auto& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(cplx s, ComplexMatrix m) { return m *= s; }

void gemm_into(const ComplexMatrix& lhs, const ComplexMatrix& rhs, ComplexMatrix& out, cplx alpha, cplx beta) {
    const std::size_t n = lhs.dim();
    require(rhs.dim() == n && out.dim() == n, ErrorCode::DimensionMismatch, "matrix product");
    if (n == 0) return;
    const int ni = static_cast<int>(n);
    cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, ni, ni, ni, &alpha, lhs.data(), ni, rhs.data(), ni, &beta,
                out.data(), ni);
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    ComplexMatrix out(lhs.dim());
    gemm_into(lhs, rhs, out);
    return out;
}

cplx ntrace_product(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    const std::size_t n = lhs.dim();
    require(rhs.dim() == n, ErrorCode::DimensionMismatch, "trace of product");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) acc += lhs(i, j) * rhs(j, i);
    return n == 0 ? acc : acc / static_cast<double>(n);
}

double ntrace_gram(const ComplexMatrix& m) {
    if (m.dim() == 0) return 0.0;
    double acc = 0.0;
    for (const auto& v : m.entries()) acc += std::norm(v);
    return acc / static_cast<double>(m.dim());
}

double frobenius_norm(const ComplexMatrix& m) {
    double acc = 0.0;
    for (const auto& v : m.entries()) acc += std::norm(v);
    return std::sqrt(acc);
}

double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    require(lhs.dim() == rhs.dim(), ErrorCode::DimensionMismatch, "matrix comparison");
    double worst = 0.0;
    auto a = lhs.entries();
    auto b = rhs.entries();
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

void set_blas_single_threaded() { openblas_set_num_threads(1); }

} // namespace glbm
