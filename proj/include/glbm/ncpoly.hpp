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
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glbm/matrix.hpp"

namespace glbm {

/// Word over indeterminates X_1..X_d, stored as 1-based indices. The empty word is 1.
using Word = std::vector<std::uint32_t>;

/// Noncommutative polynomial in selfadjoint indeterminates, merged by word.
/// Terms are kept in lexicographic word order and zero coefficients are dropped.
class NCPoly {
public:
    NCPoly() = default;

    static NCPoly constant(cplx c);
    /// X_i; throws index-out-of-range for i = 0.
    static NCPoly variable(std::uint32_t i);
    static NCPoly monomial(cplx c, Word word);

    void add_term(const Word& word, cplx c);

    const std::map<Word, cplx>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    /// Longest word length; 0 for constants and the zero polynomial.
    std::size_t degree() const;
    /// Largest indeterminate index used; 0 for constants.
    std::uint32_t max_index() const;

    NCPoly& operator+=(const NCPoly& rhs);
    NCPoly& operator-=(const NCPoly& rhs);
    friend NCPoly operator+(NCPoly lhs, const NCPoly& rhs) { return lhs += rhs; }
    friend NCPoly operator-(NCPoly lhs, const NCPoly& rhs) { return lhs -= rhs; }
    friend NCPoly operator*(const NCPoly& lhs, const NCPoly& rhs);
    friend NCPoly operator*(cplx s, const NCPoly& p);
    friend bool operator==(const NCPoly&, const NCPoly&) = default;

private:
    std::map<Word, cplx> terms_;
};

/// Element of P_d (x) P_d, merged by (left word, right word).
class TensorPoly {
public:
    TensorPoly() = default;

    /// a (x) b.
    static TensorPoly tensor(const NCPoly& a, const NCPoly& b);

    void add_term(const Word& left, const Word& right, cplx c);

    const std::map<std::pair<Word, Word>, cplx>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    TensorPoly& operator+=(const TensorPoly& rhs);
    friend TensorPoly operator+(TensorPoly lhs, const TensorPoly& rhs) { return lhs += rhs; }
    /// (A (x) B)(C (x) D) = AC (x) BD.
    friend TensorPoly operator*(const TensorPoly& lhs, const TensorPoly& rhs);
    friend bool operator==(const TensorPoly&, const TensorPoly&) = default;

private:
    std::map<std::pair<Word, Word>, cplx> terms_;
};

/// d_i M = sum over M = A X_i B of A (x) B, extended linearly.
/// Throws index-out-of-range unless 1 <= i <= nvars.
TensorPoly nc_derivative(const NCPoly& p, std::uint32_t i, std::uint32_t nvars);

/// D_i = m o d_i with m(A (x) B) = BA.
NCPoly cyclic_derivative(const NCPoly& p, std::uint32_t i, std::uint32_t nvars);

/// Words evaluated as left-to-right matrix products; the empty word is I.
/// Throws dimension-mismatch when fewer matrices than indeterminates are given.
ComplexMatrix eval_poly(const NCPoly& p, std::span<const ComplexMatrix> mats);

/// sum c ts(left) ts(right).
cplx eval_tensor_tstrace(const TensorPoly& t, std::span<const ComplexMatrix> mats);

struct SDResult {
    cplx lhs_mean{};
    cplx rhs_mean{};
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    std::size_t trials = 0;

    /// sqrt(lhs_se^2 + rhs_se^2).
    double combined_se() const;
    /// |lhs - rhs| <= k * combined_se.
    bool sides_agree(double k = 4.0) const;
};

/// Monte Carlo over independent GUE(1) tuples of size `nvars` (trial i uses stream (seed, i)):
/// lhs = E ts(X_i Q(X)), rhs = E ts (x) ts(d_i Q(X)).
SDResult sd_check(const NCPoly& q, std::uint32_t i, std::uint32_t nvars, std::size_t n, std::size_t trials,
                  std::uint64_t seed, unsigned workers = 1);

/// "re+imi * x1.x2.x1" terms joined by " + "; the empty word is "1" and the zero polynomial "0".
std::string to_string(const NCPoly& p);
/// Terms "re+imi * left (x) right" joined by " + ".
std::string to_string(const TensorPoly& t);
/// Inverses of to_string; bit-exact on coefficients. Throw parse-error on malformed input.
NCPoly parse_ncpoly(const std::string& text);
TensorPoly parse_tensorpoly(const std::string& text);

} // namespace glbm
