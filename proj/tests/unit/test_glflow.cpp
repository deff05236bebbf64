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

#include <numbers>

#include "glbm/glflow.hpp"
#include "glbm/matrix.hpp"
#include "glbm/sampling.hpp"
#include "glbm/spectral.hpp"

using namespace glbm;
using testing::max_entry_diff;
using testing::naive_moments;
using testing::naive_product;
using testing::within_se;

namespace {

ComplexMatrix scaled_identity(std::size_t n, cplx s) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
    return m;
}

SimConfig config(std::size_t n, double rho, cplx zeta, double t, std::size_t steps) {
    SimConfig c;
    c.n = n;
    c.params = EllipticParams::from_rho_zeta(rho, zeta);
    c.grid = TimeGrid(t, steps);
    return c;
}

} // namespace

TEST_CASE("step with zero increment and zero drift leaves B unchanged") {
    RngStream rng(1, 0);
    const auto b = testing::random_matrix(5, rng);
    CHECK(step(b, EllipticParams::from_rho_zeta(1.0, 0.0), ComplexMatrix(5), 0.3) == b);
}

TEST_CASE("one step from the identity is I + dW + (zeta t / 2) I") {
    RngStream rng(2, 0);
    const cplx zeta{0.6, 1.0};
    const auto p = EllipticParams::from_rho_zeta(2.0, zeta);
    const auto dw = testing::random_matrix(6, rng);
    const auto got = step(ComplexMatrix::identity(6), p, dw, 0.4);
    const auto want = dw + scaled_identity(6, 1.0 + zeta * 0.2);
    CHECK(max_entry_diff(got, want) <= 1e-15);
}

TEST_CASE("step right-multiplies the factor") {
    RngStream rng(3, 0);
    const cplx zeta{0.3, -0.2};
    const auto p = EllipticParams::from_rho_zeta(1.0, zeta);
    const auto b = testing::random_matrix(7, rng);
    const auto dw = testing::random_matrix(7, rng);
    const auto want = naive_product(b, dw + scaled_identity(7, 1.0 + zeta * 0.05));
    CHECK(max_entry_diff(step(b, p, dw, 0.1), want) <= 1e-13);
    ComplexMatrix inplace = b, scratch;
    step_in_place(inplace, p, dw, 0.1, scratch);
    CHECK(max_entry_diff(inplace, want) <= 1e-13);
    CHECK_THROWS_CODE(step(b, p, ComplexMatrix(3), 0.1), ErrorCode::DimensionMismatch);
}

TEST_CASE("scalar path matches the direct product of (1 + w_i)") {
    const auto p = EllipticParams::from_rho_zeta(1.0, 0.0);
    RngStream rng(4, 0);
    const auto path = sample_path(p, TimeGrid(1.0, 25), 1, rng);
    cplx want = 1.0;
    for (const auto& w : path) want *= 1.0 + w(0, 0);
    const auto got = simulate_forward(ComplexMatrix::identity(1), p, path, 1.0 / 25);
    CHECK(std::abs(got(0, 0) - want) <= 1e-13 * std::abs(want));
}

TEST_CASE("simulate_endpoint replays the stream that sample_path draws") {
    const auto c = config(6, 2.0, cplx(0.6, 1.0), 1.3, 9);
    c.validate();
    RngStream a(5, 2), b(5, 2);
    RngStream init_rng(0, 0);
    const auto b0 = make_initial(InitialCondition{RootsOfUnityInit{3}, false}, 6, init_rng).b0;
    const auto path = sample_path(c.params, c.grid, 6, b);
    CHECK(simulate_endpoint(c, b0, a) == simulate_forward(b0, c.params, path, c.grid.dt()));
}

TEST_CASE("zero time returns the initial matrix exactly") {
    RngStream rng(6, 0), init_rng(6, 1);
    const auto b0 = testing::random_matrix(4, init_rng);
    CHECK(simulate_endpoint(config(4, 1.0, 0.0, 0.0, 5), b0, rng) == b0);
    auto state = start_path(b0);
    CHECK(state.b == b0);
    CHECK(state.t == 0.0);
    CHECK(state.increments_consumed == 0);
}

TEST_CASE("advance tracks time and increments") {
    const auto p = EllipticParams::from_rho_zeta(1.0, 0.5);
    RngStream rng(7, 0);
    auto state = start_path(ComplexMatrix::identity(3));
    const auto dw = sample_elliptic_increment(p, 0.25, 3, rng);
    advance(state, p, dw, 0.25);
    advance(state, p, dw, 0.25);
    CHECK(state.t == 0.5);
    CHECK(state.increments_consumed == 2);
    const auto once = step(ComplexMatrix::identity(3), p, dw, 0.25);
    CHECK(max_entry_diff(state.b, naive_product(once, once)) <= 1e-14);
}

TEST_CASE("endpoint second moment matches (1 + 1/8)^8 at N = 32, k = 8") {
    std::vector<double> xs;
    const auto c = config(32, 1.0, 0.0, 1.0, 8);
    for (std::size_t i = 0; i < 400; ++i) {
        RngStream rng(8, i);
        xs.push_back(ntrace_gram(simulate_endpoint(c, ComplexMatrix::identity(32), rng)));
    }
    const auto m = naive_moments(xs);
    const double exact = std::pow(1.125, 8);
    CHECK(exact == doctest::Approx(2.56578).epsilon(1e-5));
    CHECK(within_se(m.mean, exact, m.se));
}

TEST_CASE("second-moment identity over several parameter sets") {
    struct Case {
        double rho;
        cplx zeta;
        std::size_t level;
        double t;
        std::size_t n;
    };
    for (const Case& cs : {Case{2.0, cplx(0.6, 1.0), 3, 1.0, 16}, Case{1.0, cplx(-0.5, 0.5), 2, 1.5, 8},
                           Case{0.5, cplx(0.0, 0.4), 4, 0.75, 12}}) {
        const double scale = std::ldexp(1.0, static_cast<int>(cs.level));
        const auto steps = static_cast<std::size_t>(std::floor(cs.t * scale));
        const auto c = config(cs.n, cs.rho, cs.zeta, steps / scale, steps);
        const double exact = std::pow(
            1.0 + (cs.rho + cs.zeta.real()) / scale + std::norm(cs.zeta) / (4.0 * scale * scale), double(steps));
        std::vector<double> xs;
        for (std::size_t i = 0; i < 600; ++i) {
            RngStream rng(9, i);
            xs.push_back(ntrace_gram(simulate_endpoint(c, ComplexMatrix::identity(cs.n), rng)));
        }
        const auto m = naive_moments(xs);
        CAPTURE(cs.rho);
        CAPTURE(cs.level);
        CHECK(within_se(m.mean, exact, m.se));
    }
}

TEST_CASE("unitary driver endpoints are unitary") {
    auto c = config(16, 1.0, -1.0, 1.0, 1024);
    RngStream rng(10, 0);
    const auto b = simulate_endpoint(c, ComplexMatrix::identity(16), rng);
    CHECK(max_entry_diff(b.adjoint() * b, ComplexMatrix::identity(16)) <= 1e-6);
    for (const auto& lambda : eigenvalues(b).eigenvalues) CHECK(std::abs(std::abs(lambda) - 1.0) <= 1e-8);

    c.grid = TimeGrid(0.7, 50);
    RngStream rng2(10, 1);
    const auto b2 = simulate_endpoint(c, ComplexMatrix::identity(16), rng2);
    for (const auto& lambda : eigenvalues(b2).eigenvalues) CHECK(std::abs(std::abs(lambda) - 1.0) <= 1e-8);
}

TEST_CASE("group exponential factor is exp of the increment") {
    const auto p = EllipticParams::from_rho_zeta(1.0, -1.0);
    RngStream rng(11, 0);
    const auto dw = sample_elliptic_increment(p, 0.01, 6, rng);
    const auto e = group_exponential_factor(p, dw);
    // Taylor series of exp(dW) to high order.
    ComplexMatrix sum = ComplexMatrix::identity(6), term = ComplexMatrix::identity(6);
    for (int k = 1; k < 20; ++k) {
        term = (1.0 / k) * naive_product(term, dw);
        sum += term;
    }
    CHECK(max_entry_diff(e, sum) <= 1e-13);
    CHECK(resolve_scheme(StepScheme::Auto, p) == StepScheme::GroupExponential);
    CHECK(resolve_scheme(StepScheme::Auto, EllipticParams::from_rho_zeta(1.0, 0.0)) == StepScheme::Euler);
    CHECK_THROWS_CODE(group_exponential_factor(EllipticParams::from_rho_zeta(1.0, 0.0), dw), ErrorCode::InvalidUsage);
}

TEST_CASE("one-step inverse algebra") {
    RngStream rng(12, 0);
    const cplx zeta{0.4, -0.3};
    const double dt = 0.2;
    const auto p = EllipticParams::from_rho_zeta(1.0, zeta);
    const std::vector<ComplexMatrix> inc{sample_elliptic_increment(p, dt, 5, rng)};
    const auto b = simulate_forward(ComplexMatrix::identity(5), p, inc, dt);
    const auto c = simulate_inverse(p, inc, dt);
    const cplx h = zeta * dt / 2.0;
    const auto want = scaled_identity(5, 1.0 + zeta * dt + h * h) - naive_product(inc[0], inc[0]);
    CHECK(max_entry_diff(naive_product(b, c), want) <= 1e-14);
}

TEST_CASE("inverse with zero increments and zero drift is the identity") {
    const auto p = EllipticParams::from_rho_zeta(1.0, 0.0);
    const std::vector<ComplexMatrix> inc(4, ComplexMatrix(3));
    const auto b = simulate_forward(ComplexMatrix::identity(3), p, inc, 0.25);
    const auto c = simulate_inverse(p, inc, 0.25);
    CHECK(c == ComplexMatrix::identity(3));
    CHECK(b * c == ComplexMatrix::identity(3));
}

TEST_CASE("inverse scheme multiplies factors on the left") {
    RngStream rng(13, 0);
    const auto p = EllipticParams::from_rho_zeta(1.0, cplx(0.2, 0.1));
    const double dt = 0.1;
    const auto inc = sample_path(p, TimeGrid(0.3, 3), 4, rng);
    ComplexMatrix want = ComplexMatrix::identity(4);
    for (const auto& dw : inc) want = naive_product(scaled_identity(4, 1.0 + p.zeta() * dt / 2.0) - dw, want);
    CHECK(max_entry_diff(simulate_inverse(p, inc, dt), want) <= 1e-14);
}

TEST_CASE("coupled increments: parents are sums of children") {
    const auto p = EllipticParams::from_rho_zeta(1.0, cplx(0.1, 0.2));
    RngStream rng(14, 0);
    const CoupledIncrements c(p, 2.0, 4, 5, rng);
    CHECK(c.finest_level() == 4);
    for (std::size_t l = 0; l < 4; ++l) {
        const auto parents = c.level(l), children = c.level(l + 1);
        REQUIRE(parents.size() == (std::size_t{1} << l));
        for (std::size_t i = 0; i < parents.size(); ++i) CHECK(parents[i] == children[2 * i] + children[2 * i + 1]);
        CHECK(c.dt(l) == 2.0 / double(std::size_t{1} << l));
    }
    CHECK_THROWS_CODE(c.level(5), ErrorCode::LevelOutOfRange);
    CHECK_THROWS_CODE(refine_gap(c, p, 5), ErrorCode::LevelOutOfRange);
    CHECK_THROWS_CODE(refine_gap(c, p, 0), ErrorCode::LevelOutOfRange);
    CHECK_THROWS_CODE(CoupledIncrements::from_finest(std::vector<ComplexMatrix>(3, ComplexMatrix(2)), 1.0),
                      ErrorCode::InvalidParameter);
}

TEST_CASE("finest level replays the stream") {
    const auto p = EllipticParams::from_rho_zeta(1.0, 0.0);
    RngStream a(15, 0), b(15, 0);
    const CoupledIncrements c(p, 1.0, 3, 4, a);
    const auto path = sample_path(p, TimeGrid(1.0, 8), 4, b);
    for (std::size_t i = 0; i < 8; ++i) CHECK(c.level(3)[i] == path[i]);
}

TEST_CASE("refinement gap with a zero sibling and zero drift vanishes") {
    RngStream rng(16, 0);
    const auto p = EllipticParams::from_rho_zeta(1.0, 0.0);
    const auto d = testing::random_matrix(4, rng);
    const auto c = CoupledIncrements::from_finest({d, ComplexMatrix(4)}, 1.0);
    CHECK(refine_gap(c, p, 1) == 0.0);
}

TEST_CASE("refinement gap equals the deterministic factor mismatch") {
    RngStream rng(17, 0);
    const auto p = EllipticParams::from_rho_zeta(1.0, 0.0);
    const auto d1 = testing::random_matrix(4, rng), d2 = testing::random_matrix(4, rng);
    const auto c = CoupledIncrements::from_finest({d1, d2}, 1.0);
    // (I + d1)(I + d2) - (I + d1 + d2) = d1 d2.
    const auto m = naive_product(d1, d2);
    const double want = std::sqrt(testing::ts(naive_product(m, m.adjoint())).real());
    CHECK(refine_gap(c, p, 1) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("refinement gap at t = 0 is zero") {
    RngStream rng(18, 0);
    const auto p = EllipticParams::from_rho_zeta(1.0, cplx(0.3, 0.3));
    const CoupledIncrements c(p, 0.0, 3, 4, rng);
    for (std::size_t n = 1; n <= 3; ++n) CHECK(refine_gap(c, p, n) == 0.0);
}

TEST_CASE("affine deviation for a single step") {
    RngStream rng(19, 0);
    const auto id = InitialCondition{IdentityInit{}, false};
    const auto p0 = EllipticParams::from_rho_zeta(1.0, 0.0);
    const std::vector<ComplexMatrix> one{sample_elliptic_increment(p0, 0.5, 8, rng)};
    CHECK(affine_deviation(id, p0, one, 0.5) <= 1e-15);
    const cplx zeta{0.6, -0.8};
    const auto p = EllipticParams::from_rho_zeta(1.5, zeta);
    CHECK(affine_deviation(id, p, one, 0.5) == doctest::Approx(std::abs(zeta) * 0.5 / 2.0).epsilon(1e-13));
    CHECK_THROWS_CODE(affine_deviation(InitialCondition{RootsOfUnityInit{2}, false}, p, one, 0.5),
                      ErrorCode::InvalidUsage);
    CHECK_THROWS_CODE(affine_deviation(InitialCondition{IdentityInit{}, true}, p, one, 0.5), ErrorCode::InvalidUsage);
}

TEST_CASE("streamed affine deviation matches the stored-path computation") {
    const auto p = EllipticParams::from_rho_zeta(1.0, cplx(0.2, 0.5));
    const TimeGrid g(0.3, 40);
    RngStream a(20, 0), b(20, 0);
    const auto path = sample_path(p, g, 10, b);
    CHECK(sample_affine_deviation(p, g, 10, a) ==
          affine_deviation(InitialCondition{IdentityInit{}, false}, p, path, g.dt()));
}

TEST_CASE("make_initial examples") {
    RngStream rng(21, 0);
    const auto id = make_initial(InitialCondition{IdentityInit{}, false}, 4, rng);
    CHECK(id.b0 == ComplexMatrix::identity(4));
    CHECK(id.k_bound == doctest::Approx(1.0));

    const auto roots = make_initial(InitialCondition{RootsOfUnityInit{6}, false}, 12, rng);
    std::vector<int> hits(6, 0);
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 12; ++j)
            if (i != j) CHECK(roots.b0(i, j) == cplx(0.0));
        const double angle = std::arg(roots.b0(i, i)) * 3.0 / std::numbers::pi;
        const long k = std::lround(angle < -1e-9 ? angle + 6.0 : angle);
        CHECK(std::abs(roots.b0(i, i) - std::polar(1.0, std::numbers::pi * k / 3.0)) <= 1e-15);
        ++hits[static_cast<std::size_t>(k % 6)];
    }
    for (int h : hits) CHECK(h == 2);
    CHECK(roots.sigma_min == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(roots.sigma_max == doctest::Approx(1.0).epsilon(1e-14));

    const cplx b00{1.0, 1.0}, b11{-1.0, 1.0};
    const auto block = make_initial(InitialCondition{NonNormalBlockInit{{b00, 1.0, 0.0, b11}}, false}, 4, rng);
    for (std::size_t k = 0; k < 4; k += 2) {
        CHECK(block.b0(k, k) == b00);
        CHECK(block.b0(k, k + 1) == cplx(1.0));
        CHECK(block.b0(k + 1, k + 1) == b11);
    }
    CHECK(block.b0(0, 2) == cplx(0.0));
    CHECK(block.b0(1, 3) == cplx(0.0));
    int near_a = 0, near_b = 0;
    for (const auto& lambda : eigenvalues(block.b0).eigenvalues) {
        near_a += std::abs(lambda - b00) <= 1e-10;
        near_b += std::abs(lambda - b11) <= 1e-10;
    }
    CHECK(near_a == 2);
    CHECK(near_b == 2);
    CHECK(block.k_bound >= block.sigma_max);
    CHECK(1.0 / block.k_bound <= block.sigma_min);
}

TEST_CASE("atomic initial condition realizes the prescribed multiplicities") {
    RngStream rng(22, 0);
    const InitialCondition init{AtomicNormalInit{{{1.0, 0.125},
                                                  {-1.0, 0.125},
                                                  {3.0, 0.125},
                                                  {-3.0, 0.125},
                                                  {cplx(0.0, 1.0), 0.25},
                                                  {cplx(0.0, -1.0), 0.25}}},
                                false};
    const auto r = make_initial(init, 16, rng);
    int count_i = 0, count_three = 0;
    for (std::size_t i = 0; i < 16; ++i) {
        count_i += r.b0(i, i) == cplx(0.0, 1.0);
        count_three += r.b0(i, i) == cplx(3.0);
    }
    CHECK(count_i == 4);
    CHECK(count_three == 2);
    CHECK(r.sigma_max == doctest::Approx(3.0));
    CHECK(r.sigma_min == doctest::Approx(1.0));
    CHECK(r.k_bound == doctest::Approx(3.0));
}

TEST_CASE("Haar conjugation preserves the spectrum") {
    RngStream rng(23, 0);
    const auto r = make_initial(InitialCondition{RootsOfUnityInit{4}, true}, 8, rng);
    CHECK_FALSE(r.b0 == make_initial(InitialCondition{RootsOfUnityInit{4}, false}, 8, rng).b0);
    for (const auto& lambda : eigenvalues(r.b0).eigenvalues) {
        const cplx q = lambda * lambda * lambda * lambda;
        CHECK(std::abs(q - 1.0) <= 1e-10);
    }
}

TEST_CASE("initial condition validation") {
    RngStream rng(24, 0);
    CHECK_THROWS_CODE(make_initial(InitialCondition{RootsOfUnityInit{6}, false}, 10, rng), ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(make_initial(InitialCondition{NonNormalBlockInit{}, false}, 5, rng), ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(make_initial(InitialCondition{AtomicNormalInit{{{1.0, 0.3}, {2.0, 0.7}}}, false}, 4, rng),
                      ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(make_initial(InitialCondition{AtomicNormalInit{{{1.0, 0.5}, {2.0, 0.25}}}, false}, 4, rng),
                      ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(make_initial(InitialCondition{AtomicNormalInit{}, false}, 4, rng), ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(make_initial(InitialCondition{ExplicitInit{ComplexMatrix::identity(3)}, false}, 4, rng),
                      ErrorCode::DimensionMismatch);
    ComplexMatrix bad = ComplexMatrix::identity(2);
    bad(0, 1) = cplx(NAN, 0.0);
    CHECK_THROWS_CODE(make_initial(InitialCondition{ExplicitInit{bad}, false}, 2, rng), ErrorCode::InvalidParameter);
}

TEST_CASE("overflow aborts with numerical-overflow") {
    const auto p = EllipticParams::from_rho_zeta(1.0, 0.0);
    const std::vector<ComplexMatrix> inc(2000, scaled_identity(2, 1e200));
    CHECK_THROWS_CODE(simulate_forward(ComplexMatrix::identity(2), p, inc, 1e-3), ErrorCode::NumericalOverflow);
}

TEST_CASE("endpoints are deterministic per seed") {
    const auto c = config(8, 1.0, cplx(0.3, 0.4), 1.0, 16);
    RngStream a(25, 3), b(25, 3);
    CHECK(simulate_endpoint(c, ComplexMatrix::identity(8), a) == simulate_endpoint(c, ComplexMatrix::identity(8), b));
}

TEST_CASE("endpoint moment laws are invariant under conjugating the driver") {
    const auto p = EllipticParams::from_rho_zeta(1.0, cplx(0.2, 0.4));
    const std::size_t n = 8, trials = 800;
    const TimeGrid g(1.0, 8);
    RngStream urng(26, 0);
    const auto u = sample_haar_unitary(n, urng);
    std::vector<double> plain_gram, conj_gram, plain_tr, conj_tr;
    for (std::size_t i = 0; i < trials; ++i) {
        RngStream ra(27, i), rb(28, i);
        const auto b1 = simulate_forward(ComplexMatrix::identity(n), p, sample_path(p, g, n, ra), g.dt());
        auto path = sample_path(p, g, n, rb);
        for (auto& dw : path) dw = u * dw * u.adjoint();
        const auto b2 = simulate_forward(ComplexMatrix::identity(n), p, path, g.dt());
        plain_gram.push_back(ntrace_gram(b1));
        conj_gram.push_back(ntrace_gram(b2));
        plain_tr.push_back(b1.ntrace().real());
        conj_tr.push_back(b2.ntrace().real());
    }
    CHECK(std::abs(testing::two_sample_z(plain_gram, conj_gram)) <= 4.0);
    CHECK(std::abs(testing::two_sample_z(plain_tr, conj_tr)) <= 4.0);
}

TEST_CASE("compatible dimension rounds down to an accepted size") {
    CHECK(compatible_dimension(InitialCondition{IdentityInit{}}, 1024) == 1024);
    CHECK(compatible_dimension(InitialCondition{RootsOfUnityInit{6}}, 1024) == 1020);
    CHECK(compatible_dimension(InitialCondition{RootsOfUnityInit{6}}, 12) == 12);
    CHECK(compatible_dimension(InitialCondition{NonNormalBlockInit{}}, 7) == 6);
    CHECK_THROWS_CODE(compatible_dimension(InitialCondition{RootsOfUnityInit{6}}, 5), ErrorCode::InvalidParameter);
    const ExplicitInit e{ComplexMatrix::identity(3)};
    CHECK(compatible_dimension(InitialCondition{e}, 3) == 3);
}
