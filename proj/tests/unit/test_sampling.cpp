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

#include "support.hpp"

#include "glbm/matrix.hpp"
#include "glbm/params.hpp"
#include "glbm/sampling.hpp"

using namespace glbm;
using testing::naive_moments;
using testing::ts;
using testing::within_se;

TEST_CASE("rng streams replay and separate") {
    RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool differs_c = false, differs_d = false;
    for (int k = 0; k < 100; ++k) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs_c |= x != c.next_u64();
        differs_d |= x != d.next_u64();
    }
    CHECK(differs_c);
    CHECK(differs_d);
}

TEST_CASE("rng uniform and normal moments") {
    RngStream rng(1, 0);
    std::vector<double> u, z, z2;
    for (int k = 0; k < 20000; ++k) {
        const double x = rng.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        u.push_back(x);
        const double g = rng.normal();
        z.push_back(g);
        z2.push_back(g * g);
    }
    const auto mu = naive_moments(u), mz = naive_moments(z), mz2 = naive_moments(z2);
    CHECK(within_se(mu.mean, 0.5, mu.se));
    CHECK(within_se(mz.mean, 0.0, mz.se));
    CHECK(within_se(mz2.mean, 1.0, mz2.se));
}

TEST_CASE("GUE with N = 1 is one real standard normal") {
    RngStream rng(5, 0), replay(5, 0);
    const auto x = sample_gue(1, 1.0, rng);
    CHECK(x(0, 0).imag() == 0.0);
    CHECK(x(0, 0).real() == replay.normal());
}

TEST_CASE("zero time gives zero matrices") {
    RngStream rng(1, 1);
    CHECK(sample_gue(5, 0.0, rng) == ComplexMatrix(5));
    CHECK(sample_ginibre(5, 0.0, rng) == ComplexMatrix(5));
    CHECK(sample_elliptic_increment(EllipticParams::from_rho_zeta(2.0, cplx(0.6, 1.0)), 0.0, 5, rng) ==
          ComplexMatrix(5));
}

TEST_CASE("negative time and empty dimension are rejected") {
    RngStream rng(1, 1);
    CHECK_THROWS_CODE(sample_gue(3, -1.0, rng), ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(sample_ginibre(3, -1.0, rng), ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(sample_elliptic_increment(EllipticParams::from_rho_zeta(1.0, 0.0), -0.1, 3, rng),
                      ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(sample_gue(0, 1.0, rng), ErrorCode::InvalidParameter);
}

TEST_CASE("GUE output is exactly Hermitian with the stated entry variances") {
    const std::size_t n = 16;
    const double t = 0.7;
    std::vector<double> diag, off_re, off_im, tr2;
    for (std::size_t i = 0; i < 400; ++i) {
        RngStream rng(9, i);
        const auto x = sample_gue(n, t, rng);
        CHECK(x == x.adjoint());
        diag.push_back(x(2, 2).real() * x(2, 2).real());
        off_re.push_back(x(1, 5).real() * x(1, 5).real());
        off_im.push_back(x(1, 5).imag() * x(1, 5).imag());
        tr2.push_back(ts(testing::naive_product(x, x)).real());
    }
    const auto md = naive_moments(diag), mr = naive_moments(off_re), mi = naive_moments(off_im),
               mt = naive_moments(tr2);
    CHECK(within_se(md.mean, t / n, md.se));
    CHECK(within_se(mr.mean, t / (2.0 * n), mr.se));
    CHECK(within_se(mi.mean, t / (2.0 * n), mi.se));
    CHECK(within_se(mt.mean, t, mt.se));
}

TEST_CASE("GUE second moment at N = 32 over 1000 trials") {
    std::vector<double> xs;
    for (std::size_t i = 0; i < 1000; ++i) {
        RngStream rng(2, i);
        const auto x = sample_gue(32, 1.0, rng);
        xs.push_back(ntrace_product(x, x).real());
    }
    const auto m = naive_moments(xs);
    CHECK(within_se(m.mean, 1.0, m.se));
}

TEST_CASE("Ginibre moments at N = 32 over 1000 trials") {
    std::vector<double> gram, sq_re, sq_im;
    for (std::size_t i = 0; i < 1000; ++i) {
        RngStream rng(3, i);
        const auto g = sample_ginibre(32, 1.0, rng);
        gram.push_back(ts(testing::naive_product(g, g.adjoint())).real());
        const cplx s = ts(testing::naive_product(g, g));
        sq_re.push_back(s.real());
        sq_im.push_back(s.imag());
    }
    const auto mg = naive_moments(gram), mr = naive_moments(sq_re), mi = naive_moments(sq_im);
    CHECK(within_se(mg.mean, 1.0, mg.se));
    CHECK(within_se(mr.mean, 0.0, mr.se));
    CHECK(within_se(mi.mean, 0.0, mi.se));
}

TEST_CASE("unitary driver increments are exactly skew-Hermitian") {
    const auto p = EllipticParams::from_rho_zeta(1.0, -1.0);
    RngStream rng(4, 0), replay(4, 0);
    const auto w = sample_elliptic_increment(p, 0.25, 8, rng);
    const auto x = sample_gue(8, 0.25, replay);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            CHECK(w(i, j) == -std::conj(w(j, i)));
            CHECK(w(i, j) == cplx(-x(i, j).imag(), x(i, j).real()));
        }
}

TEST_CASE("elliptic increment moments for rho = 2, zeta = 0.6 + i") {
    const auto p = EllipticParams::from_rho_zeta(2.0, cplx(0.6, 1.0));
    const double dt = 0.1;
    std::vector<double> gram, sq_re, sq_im;
    for (std::size_t i = 0; i < 2000; ++i) {
        RngStream rng(6, i);
        const auto w = sample_elliptic_increment(p, dt, 32, rng);
        gram.push_back(ts(testing::naive_product(w, w.adjoint())).real());
        const cplx s = ts(testing::naive_product(w, w));
        sq_re.push_back(s.real());
        sq_im.push_back(s.imag());
    }
    const auto mg = naive_moments(gram), mr = naive_moments(sq_re), mi = naive_moments(sq_im);
    CHECK(within_se(mg.mean, 0.2, mg.se));
    CHECK(within_se(mr.mean, 0.06, mr.se));
    CHECK(within_se(mi.mean, 0.1, mi.se));
}

TEST_CASE("sampling is bit-reproducible per stream") {
    const auto p = EllipticParams::from_rho_zeta(1.5, cplx(0.2, -0.7));
    RngStream a(77, 5), b(77, 5);
    for (int k = 0; k < 3; ++k) {
        CHECK(sample_elliptic_increment(p, 0.3, 12, a) == sample_elliptic_increment(p, 0.3, 12, b));
        CHECK(sample_gue(7, 1.0, a) == sample_gue(7, 1.0, b));
        CHECK(sample_ginibre(7, 1.0, a) == sample_ginibre(7, 1.0, b));
    }
}

TEST_CASE("conjugating the driver by a fixed unitary leaves moment laws unchanged") {
    const auto p = EllipticParams::from_rho_zeta(1.0, cplx(0.5, 0.3));
    const std::size_t n = 12, trials = 1500;
    RngStream urng(100, 0);
    const auto u = sample_haar_unitary(n, urng);
    std::vector<double> plain[4], conj[4];
    auto record = [](std::vector<double>* out, const ComplexMatrix& w) {
        const auto w2 = testing::naive_product(w, w);
        out[0].push_back(ts(testing::naive_product(w, w.adjoint())).real());
        out[1].push_back(ts(w2).real());
        out[2].push_back(ts(w2).imag());
        out[3].push_back(ts(testing::naive_product(w2, w)).real());
    };
    for (std::size_t i = 0; i < trials; ++i) {
        RngStream ra(101, i), rb(102, i);
        record(plain, sample_elliptic_increment(p, 1.0, n, ra));
        const auto w = sample_elliptic_increment(p, 1.0, n, rb);
        record(conj, testing::naive_product(testing::naive_product(u, w), u.adjoint()));
    }
    for (int k = 0; k < 4; ++k) {
        CAPTURE(k);
        CHECK(std::abs(testing::two_sample_z(plain[k], conj[k])) <= 4.0);
    }
}

TEST_CASE("Haar unitary is unitary") {
    RngStream rng(8, 0);
    const auto u = sample_haar_unitary(20, rng);
    const auto g = testing::naive_product(u.adjoint(), u);
    CHECK(testing::max_entry_diff(g, ComplexMatrix::identity(20)) <= 1e-12);
}
