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

#include "glbm/matrix.hpp"

namespace glbm {

/// Eigenvalues of a dense matrix, counted with multiplicity.
struct Spectrum {
    std::vector<cplx> eigenvalues;
    /// max_j |A v_j - lambda_j v_j| / |A| when eigenvectors were computed,
    /// otherwise the backward-error bound N * eps of the QR iteration.
    double residual = 0.0;
    bool residual_from_vectors = false;
};

/// Singular values of A - zI, sorted descending.
struct SingularSpectrum {
    std::vector<double> values;
    cplx shift{};

    std::size_t size() const noexcept { return values.size(); }
    double largest() const { return values.front(); }
    double smallest() const { return values.back(); }
};

/// Hessenberg reduction plus shifted QR (LAPACK zgeev).
/// With `with_residual`, right eigenvectors are formed to measure the residual.
Spectrum eigenvalues(const ComplexMatrix& a, bool with_residual = false);

SingularSpectrum singular_values(const ComplexMatrix& a, cplx z = 0.0);

/// Operator norm |A| = sigma_1(A).
double operator_norm(const ComplexMatrix& a);

/// (1/N) sum_j log sigma_j; `neg_infinite` flags a zero singular value.
struct LogPotential {
    double value = 0.0;
    bool neg_infinite = false;
};

/// Canonical singular-value route: (1/N) sum log sigma_j(A - z).
LogPotential log_potential(const ComplexMatrix& a, cplx z);
LogPotential log_potential(const SingularSpectrum& sv);
/// Eigenvalue route: (1/N) sum log |z - lambda_j|.
LogPotential log_potential_from_eigenvalues(std::span<const cplx> eigenvalues, cplx z);

/// Im ts[(i eta - |A - z|)^{-1}] = -(1/N) sum eta / (eta^2 + sigma_j^2), in [-1/eta, 0).
double wegner_transform(const SingularSpectrum& sv, double eta);
double wegner_transform(const ComplexMatrix& a, cplx z, double eta);

/// Fraction of sigma_j(A - z) that are <= eta.
double sv_counting(const SingularSpectrum& sv, double eta);
double sv_counting(const ComplexMatrix& a, cplx z, double eta);

/// (1/N) sum over |log sigma_j| > level of |log sigma_j|; zero singular values count as +inf.
double log_tail_mass(const SingularSpectrum& sv, double level);
double log_tail_mass(const ComplexMatrix& a, cplx z, double level);

/// Weyl's inequalities sigma_1 >= |lambda_j| >= sigma_N, with relative slack.
bool weyl_consistent(std::span<const cplx> eigenvalues, const SingularSpectrum& sv, double rel_tol = 1e-10);

} // namespace glbm
