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

#include "glbm/matrix.hpp"
#include "glbm/params.hpp"
#include "glbm/rng.hpp"

namespace glbm {

/// GUE increment of time t: exactly Hermitian, diagonal entries N(0, t/N),
/// off-diagonal real and imaginary parts each N(0, t/(2N)).
/// Draw order: rows top to bottom, for each row the diagonal then the upper triangle.
ComplexMatrix sample_gue(std::size_t n, double t, RngStream& rng);

/// Ginibre increment: N^2 independent complex Gaussians of total variance t/N.
ComplexMatrix sample_ginibre(std::size_t n, double t, RngStream& rng);

/// Elliptic increment e^{i theta}(a X + i b Y) with X, Y independent GUE(dt).
/// Y is not drawn when b = 0, which keeps the degenerate mode exactly normal.
ComplexMatrix sample_elliptic_increment(const EllipticParams& params, double dt, std::size_t n, RngStream& rng);

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix,
/// with the phases of R's diagonal folded back into Q.
ComplexMatrix sample_haar_unitary(std::size_t n, RngStream& rng);

} // namespace glbm
