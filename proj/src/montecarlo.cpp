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

#include "glbm/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "glbm/numfmt.hpp"

namespace glbm {

namespace {

template <class V>
V pairwise(std::span<const V> xs) {
    if (xs.empty()) return V{};
    if (xs.size() <= 8) {
        V acc{};
        for (const V& x : xs) acc += x;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise(xs.first(half)) + pairwise(xs.subspan(half));
}

} // namespace

unsigned workers_from_env() {
    const char* env = std::getenv("GLBM_WORKERS");
    if (env == nullptr) return 1;
    double v = 0.0;
    if (!parse_double(env, v) || v < 1.0 || v != std::floor(v) || v > 4096.0) return 1;
    return static_cast<unsigned>(v);
}

double pairwise_sum(std::span<const double> xs) { return pairwise(xs); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> xs) { return pairwise(xs); }

MeanSE mean_se(std::span<const double> xs) {
    MeanSE out;
    out.n = xs.size();
    if (xs.empty()) return out;
    out.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    std::vector<double> dev(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) dev[k] = (xs[k] - out.mean) * (xs[k] - out.mean);
    const double var = pairwise_sum(dev) / static_cast<double>(xs.size() - 1);
    out.se = std::sqrt(var / static_cast<double>(xs.size()));
    return out;
}

ComplexMeanSE mean_se(std::span<const std::complex<double>> xs) {
    ComplexMeanSE out;
    out.n = xs.size();
    if (xs.empty()) return out;
    out.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    std::vector<double> dev(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) dev[k] = std::norm(xs[k] - out.mean);
    const double var = pairwise_sum(dev) / static_cast<double>(xs.size() - 1);
    out.se = std::sqrt(var / static_cast<double>(xs.size()));
    return out;
}

double median(std::vector<double> xs) {
    require(!xs.empty(), ErrorCode::InvalidParameter, "median of an empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), ErrorCode::DimensionMismatch, "fit needs equally many x and y");
    require(x.size() >= 2, ErrorCode::InvalidParameter, "fit needs at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = pairwise_sum(x) / n;
    const double my = pairwise_sum(y) / n;
    std::vector<double> sxy(x.size()), sxx(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy[k] = (x[k] - mx) * (y[k] - my);
        sxx[k] = (x[k] - mx) * (x[k] - mx);
    }
    const double den = pairwise_sum(sxx);
    require(den > 0.0, ErrorCode::InvalidParameter, "fit needs at least two distinct x");
    LinearFit fit;
    fit.slope = pairwise_sum(sxy) / den;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

} // namespace glbm
