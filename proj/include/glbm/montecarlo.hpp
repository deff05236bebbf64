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

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "glbm/error.hpp"
#include "glbm/matrix.hpp"
#include "glbm/rng.hpp"

namespace glbm {

/// Result of one trial; failed trials keep their index and the error text.
template <class T>
struct TrialOutcome {
    std::size_t index = 0;
    bool ok = false;
    T value{};
    std::string error;
};

/// Worker count from GLBM_WORKERS, or 1 when unset or malformed.
unsigned workers_from_env();

/// Runs `per_trial(rng, i)` for i < trials with rng = RngStream(seed, first_stream + i).
/// Outcomes come back in index order whatever the worker count; exceptions
/// become failed outcomes instead of aborting the run.
template <class T, class Fn>
std::vector<TrialOutcome<T>> run_trials(std::size_t trials, std::uint64_t seed, unsigned workers, Fn&& per_trial,
                                        std::uint64_t first_stream = 0) {
    set_blas_single_threaded();
    std::vector<TrialOutcome<T>> out(trials);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < trials; i = next++) {
            auto& slot = out[i];
            slot.index = i;
            try {
                RngStream rng(seed, first_stream + i);
                slot.value = per_trial(rng, i);
                slot.ok = true;
            } catch (const std::exception& e) {
                slot.ok = false;
                slot.error = e.what();
            }
        }
    };
    if (workers <= 1 || trials <= 1) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t count = std::min<std::size_t>(workers, trials);
    pool.reserve(count);
    for (std::size_t k = 0; k < count; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return out;
}

/// run_trials followed by a reduction over the ordered outcomes.
template <class T, class Fn, class Reduce>
auto parallel_mc(std::size_t trials, std::uint64_t seed, unsigned workers, Fn&& per_trial, Reduce&& reduce) {
    return reduce(run_trials<T>(trials, seed, workers, std::forward<Fn>(per_trial)));
}

/// Successful values in index order.
template <class T>
std::vector<T> successes(const std::vector<TrialOutcome<T>>& outcomes) {
    std::vector<T> v;
    for (const auto& o : outcomes)
        if (o.ok) v.push_back(o.value);
    return v;
}

template <class T>
std::size_t failure_count(const std::vector<TrialOutcome<T>>& outcomes) {
    std::size_t n = 0;
    for (const auto& o : outcomes) n += o.ok ? 0 : 1;
    return n;
}

/// Fixed-order pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> xs);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> xs);

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

struct ComplexMeanSE {
    std::complex<double> mean{};
    /// sqrt((Var re + Var im) / n).
    double se = 0.0;
    std::size_t n = 0;
};

/// Sample mean and standard error (unbiased variance); se = 0 for n < 2.
MeanSE mean_se(std::span<const double> xs);
ComplexMeanSE mean_se(std::span<const std::complex<double>> xs);

double median(std::vector<double> xs);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Throws invalid-parameter for fewer than 2 distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

} // namespace glbm
