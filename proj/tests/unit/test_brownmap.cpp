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

#include "glbm/brownmap.hpp"
#include "glbm/glflow.hpp"
#include "glbm/region.hpp"
#include "glbm/sampling.hpp"
#include "glbm/spectral.hpp"

using namespace glbm;

namespace {

constexpr double pi = std::numbers::pi;

// Direct evaluation for a single atom c: log(|z|^2/|c|^2) |c - z|^2 / (|z|^2 - |c|^2).
double point_mass_t(cplx c, cplx z) {
    const double r = std::norm(z), s = std::norm(c);
    return std::log(r / s) * std::norm(c - z) / (r - s);
}

} // namespace

TEST_CASE("circle measure validation") {
    CHECK_THROWS_CODE(CircleMeasure({{0.0, 0.5}, {1.0, 0.4}}), ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(CircleMeasure({{0.0, 1.5}, {1.0, -0.5}}), ErrorCode::InvalidParameter);
    const auto roots = CircleMeasure::roots_of_unity(6);
    REQUIRE(roots.atoms().size() == 6);
    for (const auto& p : roots.points()) CHECK(std::abs(std::pow(p, 6) - 1.0) <= 1e-13);
}

TEST_CASE("log ratio continuation") {
    CHECK(log_ratio(1.0, 1e-4) == 1.0);
    for (double d : {1e-5, -3e-5, 9e-5})
        CHECK(log_ratio(1.0 + d, 1e-4) == doctest::Approx(std::log1p(d) / d).epsilon(1e-14));
    CHECK(log_ratio(4.0, 1e-4) == doctest::Approx(std::log(4.0) / 3.0).epsilon(1e-15));
    CHECK(std::isinf(log_ratio(0.0, 1e-4)));
}

TEST_CASE("unitary T for a point mass") {
    const auto mu = CircleMeasure::point_mass();
    CHECK(t_unitary(mu, 2.0) == doctest::Approx(std::log(4.0) / 3.0).epsilon(1e-14));
    CHECK(t_unitary(mu, 2.0) == doctest::Approx(0.462098).epsilon(1e-6));
    CHECK(t_unitary(mu, -1.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(t_unitary(mu, 1.0) == 0.0);
    CHECK(t_unitary(mu, 1.0 + 1e-9) <= 1e-15);
    CHECK(std::isinf(t_unitary(mu, 0.0)));
}

TEST_CASE("unitary T is continuous across the unit circle") {
    const auto mu = CircleMeasure({{0.3, 0.25}, {2.0, 0.5}, {-2.5, 0.25}});
    for (double angle : {1.0, -1.0, 3.0}) {
        const double inside = t_unitary(mu, std::polar(1.0 - 2e-4, angle));
        const double outside = t_unitary(mu, std::polar(1.0 + 2e-4, angle));
        const double on = t_unitary(mu, std::polar(1.0, angle));
        CHECK(std::abs(on - 0.5 * (inside + outside)) <= 1e-6);
        CHECK(std::abs(t_unitary(mu, std::polar(1.0 + 5e-5, angle)) - on) <= 1e-3 * on);
    }
}

TEST_CASE("unitary T is rotation covariant") {
    const std::vector<std::pair<double, double>> atoms{{0.1, 0.3}, {1.7, 0.2}, {-2.2, 0.5}};
    const CircleMeasure mu(atoms);
    RngStream rng(1, 0);
    for (int k = 0; k < 50; ++k) {
        const double alpha = 2.0 * pi * rng.uniform();
        std::vector<std::pair<double, double>> rotated = atoms;
        for (auto& a : rotated) a.first += alpha;
        const cplx z{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        const double a = t_unitary(mu, z), b = t_unitary(CircleMeasure(rotated), std::polar(1.0, alpha) * z);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, a));
    }
}

TEST_CASE("general T for a single atom") {
    const auto one = InitialSpectralData::atomic({{1.0, 1.0}});
    CHECK(t_general(one, 2.0) == doctest::Approx(0.462098).epsilon(1e-6));
    const cplx c{2.0, 0.5};
    const auto data = InitialSpectralData::atomic({{c, 1.0}});
    for (cplx z : {cplx(0.3, 0.1), cplx(-3.0, 1.0), cplx(0.0, 4.0)})
        CHECK(t_general(data, z) == doctest::Approx(point_mass_t(c, z)).epsilon(1e-12));
    CHECK(t_general(data, c) == 0.0);
}

TEST_CASE("general T at its removable singularity matches two-sided offsets") {
    const cplx c{2.0, 0.5};
    const auto data = InitialSpectralData::atomic({{c, 1.0}});
    for (double angle : {1.0, 2.5, -2.0}) {
        const cplx z = std::polar(std::abs(c), angle);
        const double on = t_general(data, z);
        const double limit = std::norm(c - z) / std::norm(c);
        CHECK(std::isfinite(on));
        CHECK(on > 0.0);
        CHECK(on == doctest::Approx(limit).epsilon(1e-9));
        const double below = t_general(data, z * (1.0 - 1e-6)), above = t_general(data, z * (1.0 + 1e-6));
        CHECK(std::abs(on - 0.5 * (below + above)) <= 1e-8 * limit);
    }
}

TEST_CASE("general T reduces to the unitary formula on unitary data") {
    const auto mu = CircleMeasure({{0.0, 0.125}, {pi, 0.125}, {pi / 2, 0.25}, {-pi / 2, 0.25}, {1.0, 0.25}});
    const auto data = InitialSpectralData::from_circle(mu);
    double worst = 0.0;
    for (int i = 0; i <= 80; ++i)
        for (int j = 0; j <= 80; ++j) {
            const cplx z{-2.5 + i * 0.0625, -2.5 + j * 0.0625};
            if (std::abs(std::abs(z) - 1.0) < 1e-3 || std::abs(z) == 0.0) continue;
            const double a = t_unitary(mu, z), b = t_general(data, z);
            if (a == 0.0) continue;
            worst = std::max(worst, std::abs(a - b));
        }
    CHECK(worst <= 1e-10);
}

TEST_CASE("matrix data moments match the atomic form for a normal matrix") {
    const std::vector<cplx> diag{cplx(1.0, 1.0), cplx(-2.0, 0.0), cplx(0.0, 0.5), cplx(0.5, -0.5)};
    const auto m = InitialSpectralData::matrix(ComplexMatrix::diagonal(diag));
    std::vector<std::pair<cplx, double>> atoms;
    for (const auto& d : diag) atoms.push_back({d, 0.25});
    const auto a = InitialSpectralData::atomic(atoms);
    for (cplx z : {cplx(0.2, 0.3), cplx(3.0, -1.0)}) {
        const auto tm = tilde_moments(m, z), ta = tilde_moments(a, z);
        CHECK(tm.p0 == doctest::Approx(ta.p0).epsilon(1e-12));
        CHECK(tm.p2 == doctest::Approx(ta.p2).epsilon(1e-12));
        CHECK(t_general(m, z) == doctest::Approx(t_general(a, z)).epsilon(1e-10));
    }
    CHECK(t_general(m, diag[1]) == 0.0);
    CHECK_THROWS_CODE(InitialSpectralData::matrix(ComplexMatrix(2)), ErrorCode::InvalidParameter);
}

TEST_CASE("non-normal matrix moments follow the resolvent traces") {
    ComplexMatrix b(2);
    b(0, 0) = cplx(1.0, 1.0);
    b(0, 1) = 1.0;
    b(1, 1) = cplx(-1.0, 1.0);
    const auto data = InitialSpectralData::matrix(b);
    const cplx z{0.4, -0.7};
    // R = (B - z)^{-1} in closed form for an upper-triangular 2x2.
    const cplx a = b(0, 0) - z, d = b(1, 1) - z;
    ComplexMatrix r(2);
    r(0, 0) = 1.0 / a;
    r(0, 1) = -1.0 / (a * d);
    r(1, 1) = 1.0 / d;
    const auto rr = testing::naive_product(r, r.adjoint());
    const double p0 = testing::ts(rr).real();
    const double p2 = testing::ts(testing::naive_product(testing::naive_product(b.adjoint(), b), rr)).real();
    const auto tm = tilde_moments(data, z);
    CHECK(tm.p0 == doctest::Approx(p0).epsilon(1e-12));
    CHECK(tm.p2 == doctest::Approx(p2).epsilon(1e-12));
}

TEST_CASE("J transform of a point mass") {
    const auto mu = PointCloud::uniform({1.0});
    CHECK(std::abs(j_transform(mu, 0.0).value - 0.5) <= 1e-15);
    for (cplx z : {cplx(2.0), cplx(0.3, 0.4), cplx(-5.0, 2.0)})
        CHECK(std::abs(j_transform(mu, z).value - 0.5 * (1.0 + z) / (1.0 - z)) <= 1e-14);
    CHECK_THROWS_CODE(j_transform(mu, 1.0, 0.1), ErrorCode::UndefinedAtPoint);
}

TEST_CASE("J transform reports excluded mass") {
    const auto mu = PointCloud::uniform({0.0, 1.0, 2.0, 3.0});
    const auto j = j_transform(mu, 1.05, 0.1);
    CHECK(j.excluded_count == 1);
    CHECK(j.excluded_mass == doctest::Approx(0.25));
    cplx want = 0.0;
    for (double x : {0.0, 2.0, 3.0}) want += 0.125 * (x + 1.05) / (x - 1.05);
    CHECK(std::abs(j.value - want) <= 1e-14);
    CHECK(mu.diameter() == doctest::Approx(3.0));
    CHECK(mu.default_exclusion_radius() == doctest::Approx(4.5));
}

TEST_CASE("J transform of an eigenvalue cloud matches its far-field series") {
    const auto p = EllipticParams::from_rho_zeta(1.0, 0.0);
    SimConfig c;
    c.n = 256;
    c.params = p;
    c.grid = TimeGrid(1.0, 32);
    RngStream rng(2, 0);
    const auto cloud = eigenvalues(simulate_endpoint(c, ComplexMatrix::identity(256), rng)).eigenvalues;
    const auto mu = PointCloud::uniform(cloud);
    for (cplx z : {cplx(10.0), cplx(0.0, 10.0), std::polar(10.0, 2.2)}) {
        const cplx j = j_transform(mu, z).value;
        // 1/2 - z * mean 1/(z - xi), and -1/2 - sum_k m_k / z^k.
        cplx resolvent = 0.0;
        for (const auto& xi : cloud) resolvent += 1.0 / (z - xi);
        resolvent /= double(cloud.size());
        CHECK(std::abs(j - (0.5 - z * resolvent)) <= 1e-12);
        cplx series = -0.5;
        for (int k = 1; k <= 30; ++k) {
            cplx m = 0.0;
            for (const auto& xi : cloud) m += std::pow(xi, k);
            series -= m / double(cloud.size()) / std::pow(z, k);
        }
        CHECK(std::abs(j - series) <= 1e-3);
    }
}

TEST_CASE("psi map examples") {
    const auto mu = PointCloud::uniform({1.0});
    CHECK(psi_map(mu, 1.0, 0.0) == cplx(0.0));
    CHECK(std::abs(psi_map(mu, 1.0, 2.0) - 2.0 * std::exp(-1.5)) <= 1e-14);
    CHECK(std::abs(psi_map(mu, 1.0, 2.0) - 0.44626) <= 1e-5);
    for (cplx z : {cplx(0.3, 0.2), cplx(-4.0, 1.0)}) CHECK(psi_map(mu, 0.0, z) == z);
}

TEST_CASE("push-forward by a point mass at the origin is a rigid spiral scaling") {
    const Region disk =
        sigma_region([](cplx z) { return std::abs(z); }, 1.0, Window{-1.5, 1.5, -1.5, 1.5}, 0.05, RegionOptions{});
    const auto origin = PointCloud::uniform({0.0});
    const cplx zeta{0.5, 0.3};
    const auto mapped = pushforward_region(disk, origin, zeta, 0.0);
    REQUIRE(mapped.boundary.size() == disk.boundary.size());
    const cplx factor = std::exp(-zeta / 2.0);
    for (std::size_t c = 0; c < disk.boundary.size(); ++c) {
        REQUIRE(mapped.boundary[c].vertices.size() == disk.boundary[c].vertices.size());
        for (std::size_t k = 0; k < disk.boundary[c].vertices.size(); ++k)
            CHECK(std::abs(mapped.boundary[c].vertices[k] - factor * disk.boundary[c].vertices[k]) <= 1e-13);
    }
    CHECK(region_contains(mapped, 0.1 * factor));
    CHECK_FALSE(region_contains(mapped, 1.2 * factor));

    const auto process = zeta_support_region(disk, origin, zeta, 0.0);
    for (std::size_t c = 0; c < disk.boundary.size(); ++c)
        for (std::size_t k = 0; k < disk.boundary[c].vertices.size(); ++k)
            CHECK(std::abs(process.boundary[c].vertices[k] - disk.boundary[c].vertices[k] / factor) <= 1e-13);

    const auto same = pushforward_region(disk, origin, 0.0, 0.0);
    for (std::size_t c = 0; c < disk.boundary.size(); ++c)
        for (std::size_t k = 0; k < disk.boundary[c].vertices.size(); ++k)
            CHECK(std::abs(same.boundary[c].vertices[k] - disk.boundary[c].vertices[k]) <= 1e-12);
}

TEST_CASE("eigenvalue density respects the angular bound on annular sectors") {
    // Sector count bound: N * dtheta * log(r2 / r1) / (pi t) * (1 + slack).
    const double t = 1.0;
    const std::size_t n = 256;
    SimConfig c;
    c.n = n;
    c.params = EllipticParams::from_rho_zeta(t, 0.0);
    c.grid = TimeGrid(1.0, 64);
    RngStream rng(3, 0);
    const auto ev = eigenvalues(simulate_endpoint(c, ComplexMatrix::identity(n), rng)).eigenvalues;
    const std::size_t sectors = 8;
    const std::vector<double> radii{std::exp(-2.0), std::exp(-1.0), 1.0, std::exp(1.0), std::exp(2.0)};
    for (std::size_t s = 0; s < sectors; ++s)
        for (std::size_t r = 0; r + 1 < radii.size(); ++r) {
            std::size_t count = 0;
            for (const auto& z : ev) {
                const double a = std::arg(z) + pi;
                const auto sector = std::min(sectors - 1, static_cast<std::size_t>(a / (2.0 * pi / sectors)));
                count += sector == s && std::abs(z) >= radii[r] && std::abs(z) < radii[r + 1];
            }
            const double bound = n * (2.0 * pi / sectors) * std::log(radii[r + 1] / radii[r]) / (pi * t) * 1.5;
            CAPTURE(s);
            CAPTURE(r);
            CHECK(static_cast<double>(count) <= bound);
        }
}
