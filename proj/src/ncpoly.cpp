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

#include "glbm/ncpoly.hpp"

#include <cmath>
#include <unordered_map>

#include "glbm/error.hpp"
#include "glbm/montecarlo.hpp"
#include "glbm/numfmt.hpp"
#include "glbm/sampling.hpp"

namespace glbm {

namespace {

template <class Key>
void accumulate(std::map<Key, cplx>& terms, const Key& key, cplx c) {
    if (c == cplx{}) return;
    auto [it, inserted] = terms.try_emplace(key, c);
    if (inserted) return;
    it->second += c;
    if (it->second == cplx{}) terms.erase(it);
}

Word concat(const Word& a, const Word& b) {
    Word w;
    w.reserve(a.size() + b.size());
    w.insert(w.end(), a.begin(), a.end());
    w.insert(w.end(), b.begin(), b.end());
    return w;
}

// Normalized traces of word products, memoized per evaluation.
class WordTraces {
public:
    explicit WordTraces(std::span<const ComplexMatrix> mats) : mats_(mats) {}

    ComplexMatrix product(const Word& w) const {
        require(!mats_.empty(), ErrorCode::DimensionMismatch, "no matrices to evaluate on");
        const std::size_t n = mats_.front().dim();
        if (w.empty()) return ComplexMatrix::identity(n);
        ComplexMatrix acc = at(w.front());
        for (std::size_t k = 1; k < w.size(); ++k) acc = acc * at(w[k]);
        return acc;
    }

    cplx ntrace(const Word& w) {
        auto it = cache_.find(w);
        if (it != cache_.end()) return it->second;
        cplx v;
        if (w.empty())
            v = 1.0;
        else if (w.size() == 1)
            v = at(w.front()).ntrace();
        else {
            // ts(A B) without forming the last product.
            const Word head(w.begin(), w.end() - 1);
            v = ntrace_product(product(head), at(w.back()));
        }
        cache_.emplace(w, v);
        return v;
    }

private:
    const ComplexMatrix& at(std::uint32_t idx) const {
        require(idx >= 1 && idx <= mats_.size(), ErrorCode::DimensionMismatch,
                "indeterminate X" + std::to_string(idx) + " has no matrix");
        return mats_[idx - 1];
    }

    struct WordHash {
        std::size_t operator()(const Word& w) const noexcept {
            std::size_t h = w.size();
            for (auto x : w) h = h * 1000003u ^ x;
            return h;
        }
    };

    std::span<const ComplexMatrix> mats_;
    std::unordered_map<Word, cplx, WordHash> cache_;
};

std::string format_number(double v) {
    std::string s = format_double(v);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string format_coefficient(cplx c) {
    std::string s = format_number(c.real());
    if (std::signbit(c.imag()))
        s += "-" + format_number(-c.imag());
    else
        s += "+" + format_number(c.imag());
    return s + "i";
}

std::string format_word(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k > 0) s += '.';
        s += 'x' + std::to_string(w[k]);
    }
    return s;
}

[[noreturn]] void parse_fail(const std::string& what, const std::string& text) {
    fail(ErrorCode::ParseError, what + ": \"" + text + "\"");
}

cplx parse_coefficient(const std::string& s) {
    if (s.size() < 2 || s.back() != 'i') parse_fail("coefficient must end in 'i'", s);
    const std::string body = s.substr(0, s.size() - 1);
    // The real/imaginary split is the last sign not at the front and not part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) parse_fail("coefficient needs a signed imaginary part", s);
    double re = 0.0;
    double im = 0.0;
    if (!parse_double(body.substr(0, split), re)) parse_fail("bad real part", s);
    const bool negative = body[split] == '-';
    if (!parse_double(body.substr(split + 1), im)) parse_fail("bad imaginary part", s);
    return {re, negative ? -im : im};
}

Word parse_word(const std::string& s) {
    if (s == "1") return {};
    Word w;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t dot = s.find('.', pos);
        const std::string tok = s.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (tok.size() < 2 || tok[0] != 'x') parse_fail("bad letter", s);
        std::uint64_t idx = 0;
        for (std::size_t k = 1; k < tok.size(); ++k) {
            if (tok[k] < '0' || tok[k] > '9') parse_fail("bad letter index", s);
            idx = idx * 10 + static_cast<std::uint64_t>(tok[k] - '0');
            if (idx > 0xffffffffULL) parse_fail("letter index too large", s);
        }
        if (idx == 0) parse_fail("letter indices start at 1", s);
        w.push_back(static_cast<std::uint32_t>(idx));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return w;
}

std::vector<std::string> split_terms(const std::string& text) {
    std::vector<std::string> out;
    const std::string sep = " + ";
    std::size_t pos = 0;
    while (true) {
        const std::size_t at = text.find(sep, pos);
        out.push_back(text.substr(pos, at == std::string::npos ? std::string::npos : at - pos));
        if (at == std::string::npos) break;
        pos = at + sep.size();
    }
    return out;
}

std::pair<cplx, std::string> split_term(const std::string& term) {
    const std::string sep = " * ";
    const std::size_t at = term.find(sep);
    if (at == std::string::npos) parse_fail("term needs 'coefficient * word'", term);
    return {parse_coefficient(term.substr(0, at)), term.substr(at + sep.size())};
}

} // namespace

NCPoly NCPoly::constant(cplx c) { return monomial(c, {}); }

NCPoly NCPoly::variable(std::uint32_t i) {
    require(i >= 1, ErrorCode::IndexOutOfRange, "indeterminate indices start at 1");
    return monomial(1.0, {i});
}

NCPoly NCPoly::monomial(cplx c, Word word) {
    for (auto x : word) require(x >= 1, ErrorCode::IndexOutOfRange, "indeterminate indices start at 1");
    NCPoly p;
    accumulate(p.terms_, word, c);
    return p;
}

void NCPoly::add_term(const Word& word, cplx c) {
    for (auto x : word) require(x >= 1, ErrorCode::IndexOutOfRange, "indeterminate indices start at 1");
    accumulate(terms_, word, c);
}

std::size_t NCPoly::degree() const {
    std::size_t d = 0;
    for (const auto& [w, c] : terms_) d = std::max(d, w.size());
    return d;
}

std::uint32_t NCPoly::max_index() const {
    std::uint32_t m = 0;
    for (const auto& [w, c] : terms_)
        for (auto x : w) m = std::max(m, x);
    return m;
}

NCPoly& NCPoly::operator+=(const NCPoly& rhs) {
    for (const auto& [w, c] : rhs.terms_) accumulate(terms_, w, c);
    return *this;
}

NCPoly& NCPoly::operator-=(const NCPoly& rhs) {
    for (const auto& [w, c] : rhs.terms_) accumulate(terms_, w, -c);
    return *this;
}

NCPoly operator*(const NCPoly& lhs, const NCPoly& rhs) {
    NCPoly out;
    for (const auto& [wa, ca] : lhs.terms_)
        for (const auto& [wb, cb] : rhs.terms_) accumulate(out.terms_, concat(wa, wb), ca * cb);
    return out;
}

NCPoly operator*(cplx s, const NCPoly& p) {
    NCPoly out;
    for (const auto& [w, c] : p.terms_) accumulate(out.terms_, w, s * c);
    return out;
}

TensorPoly TensorPoly::tensor(const NCPoly& a, const NCPoly& b) {
    TensorPoly out;
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [wb, cb] : b.terms()) accumulate(out.terms_, std::pair{wa, wb}, ca * cb);
    return out;
}

void TensorPoly::add_term(const Word& left, const Word& right, cplx c) {
    for (auto x : left) require(x >= 1, ErrorCode::IndexOutOfRange, "indeterminate indices start at 1");
    for (auto x : right) require(x >= 1, ErrorCode::IndexOutOfRange, "indeterminate indices start at 1");
    accumulate(terms_, std::pair{left, right}, c);
}

TensorPoly& TensorPoly::operator+=(const TensorPoly& rhs) {
    for (const auto& [k, c] : rhs.terms_) accumulate(terms_, k, c);
    return *this;
}

TensorPoly operator*(const TensorPoly& lhs, const TensorPoly& rhs) {
    TensorPoly out;
    for (const auto& [ka, ca] : lhs.terms_)
        for (const auto& [kb, cb] : rhs.terms_)
            accumulate(out.terms_, std::pair{concat(ka.first, kb.first), concat(ka.second, kb.second)}, ca * cb);
    return out;
}

TensorPoly nc_derivative(const NCPoly& p, std::uint32_t i, std::uint32_t nvars) {
    require(i >= 1 && i <= nvars, ErrorCode::IndexOutOfRange,
            "derivative index " + std::to_string(i) + " outside 1.." + std::to_string(nvars));
    require(p.max_index() <= nvars, ErrorCode::IndexOutOfRange, "polynomial uses more indeterminates than declared");
    TensorPoly out;
    for (const auto& [w, c] : p.terms()) {
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (w[k] != i) continue;
            out.add_term(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k)),
                         Word(w.begin() + static_cast<std::ptrdiff_t>(k) + 1, w.end()), c);
        }
    }
    return out;
}

NCPoly cyclic_derivative(const NCPoly& p, std::uint32_t i, std::uint32_t nvars) {
    NCPoly out;
    const TensorPoly d = nc_derivative(p, i, nvars);
    for (const auto& [k, c] : d.terms()) out.add_term(concat(k.second, k.first), c);
    return out;
}

ComplexMatrix eval_poly(const NCPoly& p, std::span<const ComplexMatrix> mats) {
    require(p.max_index() <= mats.size(), ErrorCode::DimensionMismatch, "fewer matrices than indeterminates");
    require(!mats.empty(), ErrorCode::DimensionMismatch, "no matrices to evaluate on");
    const std::size_t n = mats.front().dim();
    for (const auto& m : mats) require(m.dim() == n, ErrorCode::DimensionMismatch, "matrices differ in size");
    WordTraces words(mats);
    ComplexMatrix out(n);
    for (const auto& [w, c] : p.terms()) {
        ComplexMatrix term = words.product(w);
        term *= c;
        out += term;
    }
    return out;
}

cplx eval_tensor_tstrace(const TensorPoly& t, std::span<const ComplexMatrix> mats) {
    WordTraces words(mats);
    cplx acc{};
    for (const auto& [k, c] : t.terms()) acc += c * words.ntrace(k.first) * words.ntrace(k.second);
    return acc;
}

double SDResult::combined_se() const { return std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se); }

bool SDResult::sides_agree(double k) const { return std::abs(lhs_mean - rhs_mean) <= k * combined_se(); }

SDResult sd_check(const NCPoly& q, std::uint32_t i, std::uint32_t nvars, std::size_t n, std::size_t trials,
                  std::uint64_t seed, unsigned workers) {
    require(n >= 2, ErrorCode::InvalidParameter, "Schwinger-Dyson check needs N >= 2");
    require(trials >= 2, ErrorCode::InvalidParameter, "Schwinger-Dyson check needs at least 2 trials");
    const NCPoly xq = NCPoly::variable(i) * q;
    const TensorPoly dq = nc_derivative(q, i, nvars);

    struct Pair {
        cplx lhs;
        cplx rhs;
    };
    const auto outcomes = run_trials<Pair>(trials, seed, workers, [&](RngStream& rng, std::size_t) {
        std::vector<ComplexMatrix> xs;
        xs.reserve(nvars);
        for (std::uint32_t k = 0; k < nvars; ++k) xs.push_back(sample_gue(n, 1.0, rng));
        WordTraces words(xs);
        cplx lhs{};
        for (const auto& [w, c] : xq.terms()) lhs += c * words.ntrace(w);
        return Pair{lhs, eval_tensor_tstrace(dq, xs)};
    });

    std::vector<cplx> lhs, rhs;
    for (const auto& o : outcomes) {
        if (!o.ok) fail(ErrorCode::NumericalOverflow, "trial " + std::to_string(o.index) + " failed: " + o.error);
        lhs.push_back(o.value.lhs);
        rhs.push_back(o.value.rhs);
    }
    const ComplexMeanSE l = mean_se(lhs);
    const ComplexMeanSE r = mean_se(rhs);
    return SDResult{l.mean, r.mean, l.se, r.se, trials};
}

std::string to_string(const NCPoly& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (const auto& [w, c] : p.terms()) {
        if (!s.empty()) s += " + ";
        s += format_coefficient(c) + " * " + format_word(w);
    }
    return s;
}

std::string to_string(const TensorPoly& t) {
    if (t.is_zero()) return "0";
    std::string s;
    for (const auto& [k, c] : t.terms()) {
        if (!s.empty()) s += " + ";
        s += format_coefficient(c) + " * " + format_word(k.first) + " (x) " + format_word(k.second);
    }
    return s;
}

NCPoly parse_ncpoly(const std::string& text) {
    NCPoly p;
    if (text == "0") return p;
    for (const auto& term : split_terms(text)) {
        auto [c, word] = split_term(term);
        p.add_term(parse_word(word), c);
    }
    return p;
}

TensorPoly parse_tensorpoly(const std::string& text) {
    TensorPoly t;
    if (text == "0") return t;
    for (const auto& term : split_terms(text)) {
        auto [c, rest] = split_term(term);
        const std::string sep = " (x) ";
        const std::size_t at = rest.find(sep);
        if (at == std::string::npos) parse_fail("tensor term needs 'left (x) right'", term);
        t.add_term(parse_word(rest.substr(0, at)), parse_word(rest.substr(at + sep.size())), c);
    }
    return t;
}

} // namespace glbm
