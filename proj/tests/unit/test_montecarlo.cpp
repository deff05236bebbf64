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

#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "glbm/montecarlo.hpp"

using namespace glbm;

namespace {

std::vector<double> draws(unsigned workers) {
    const auto outcomes = run_trials<double>(37, 99, workers, [](RngStream& rng, std::size_t) {
        double s = 0.0;
        for (int k = 0; k < 10; ++k) s += rng.normal();
        return s;
    });
    return successes(outcomes);
}

} // namespace

TEST_CASE("count reduction") {
    const auto n = parallel_mc<int>(
        7, 1, 3, [](RngStream&, std::size_t) { return 1; },
        [](const std::vector<TrialOutcome<int>>& o) {
            int total = 0;
            for (const auto& x : o) total += x.value;
            return total;
        });
    CHECK(n == 7);
}

TEST_CASE("results do not depend on the worker count") {
    const auto one = draws(1), eight = draws(8);
    REQUIRE(one.size() == eight.size());
    CHECK(std::memcmp(one.data(), eight.data(), one.size() * sizeof(double)) == 0);
    const auto a = mean_se(one), b = mean_se(eight);
    CHECK(std::memcmp(&a.mean, &b.mean, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.se, &b.se, sizeof(double)) == 0);
}

TEST_CASE("trial i uses stream (seed, first_stream + i)") {
    const auto outcomes = run_trials<std::uint64_t>(
        5, 42, 2, [](RngStream& rng, std::size_t) { return rng.stream_id() * 1000 + rng.seed(); }, 10);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(outcomes[i].index == i);
        CHECK(outcomes[i].value == (10 + i) * 1000 + 42);
    }
    const auto replay = run_trials<double>(3, 8, 1, [](RngStream& rng, std::size_t) { return rng.uniform(); });
    RngStream direct(8, 2);
    CHECK(replay[2].value == direct.uniform());
}

TEST_CASE("trial exceptions become failure records") {
    const auto outcomes = run_trials<int>(6, 1, 2, [](RngStream&, std::size_t i) {
        if (i % 3 == 1) throw std::runtime_error("boom " + std::to_string(i));
        return int(i);
    });
    CHECK(failure_count(outcomes) == 2);
    CHECK_FALSE(outcomes[1].ok);
    CHECK(outcomes[4].error == "boom 4");
    CHECK(successes(outcomes) == std::vector<int>{0, 2, 3, 5});
}

TEST_CASE("mean and standard error match a direct computation") {
    RngStream rng(3, 0);
    std::vector<double> xs(1001);
    for (auto& x : xs) x = 5.0 + rng.normal();
    const auto m = mean_se(xs);
    // Extended-precision accumulation as the reference.
    long double sum = 0.0L;
    for (double x : xs) sum += x;
    const long double mean = sum / xs.size();
    long double ss = 0.0L;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const auto se = static_cast<double>(std::sqrt(ss / (xs.size() - 1) / xs.size()));
    CHECK(m.n == xs.size());
    CHECK(std::abs(m.mean - static_cast<double>(mean)) <= 1e-15 * std::abs(m.mean));
    CHECK(std::abs(m.se - se) <= 1e-15);
    CHECK(mean_se(std::vector<double>{2.0}).se == 0.0);
}

TEST_CASE("complex mean and standard error") {
    const std::vector<cplx> zs{cplx(1.0, 0.0), cplx(3.0, 2.0), cplx(2.0, 4.0)};
    const auto m = mean_se(zs);
    CHECK(m.mean == cplx(2.0, 2.0));
    // Var re = 1, Var im = 4.
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("pairwise sum is exact on representable data and order-fixed") {
    std::vector<double> xs;
    for (int k = 1; k <= 1000; ++k) xs.push_back(k);
    CHECK(pairwise_sum(xs) == 500500.0);
    std::vector<double> tricky{1e16, 1.0, -1e16, 1.0};
    CHECK(pairwise_sum(tricky) == pairwise_sum(tricky));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("median and least squares") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{1.0, 3.0, 5.0, 7.0};
    const auto fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<double> flat{1.0, 1.0};
    CHECK_THROWS_CODE(least_squares(flat, flat), ErrorCode::InvalidParameter);
}

TEST_CASE("worker count from the environment") {
    ::setenv("GLBM_WORKERS", "3", 1);
    CHECK(workers_from_env() == 3);
    ::setenv("GLBM_WORKERS", "junk", 1);
    CHECK(workers_from_env() == 1);
    ::unsetenv("GLBM_WORKERS");
    CHECK(workers_from_env() == 1);
}
