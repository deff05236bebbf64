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

#include "glbm/harness/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "glbm/error.hpp"
#include "glbm/numfmt.hpp"
#include "glbm/sampling.hpp"
#include "glbm/spectral.hpp"

namespace glbm::harness {

namespace {

constexpr double min_success_fraction = 0.9;

VerifyReport named(std::string name) {
    VerifyReport r;
    r.name = std::move(name);
    return r;
}

std::string fmt_metric(const std::string& base, double x) { return base + "@" + format_double(x); }

// Successful values in index order; failures go to the report, and too many of them abort.
template <class T>
std::vector<T> collect(VerifyReport& report, const std::vector<TrialOutcome<T>>& outcomes, const std::string& group,
                       std::uint64_t first_stream = 0) {
    for (const auto& o : outcomes)
        if (!o.ok) report.failures.push_back({report.name + "/" + group, o.index, o.error});
    report.streams.push_back({group, first_stream, outcomes.size()});
    std::vector<T> values = successes(outcomes);
    if (static_cast<double>(values.size()) < min_success_fraction * static_cast<double>(outcomes.size()))
        throw FailureThresholdExceeded(report.name + "/" + group + ": only " + std::to_string(values.size()) + " of " +
                                       std::to_string(outcomes.size()) + " trials succeeded");
    return values;
}

ComplexMatrix euler_from_identity(const EllipticParams& params, double dt, std::size_t steps, std::size_t n,
                                  RngStream& rng) {
    ComplexMatrix b = ComplexMatrix::identity(n);
    ComplexMatrix scratch(n);
    for (std::size_t i = 0; i < steps; ++i)
        step_in_place(b, params, sample_elliptic_increment(params, dt, n, rng), dt, scratch);
    return b;
}

ComplexMatrix endpoint_from_identity(std::size_t n, double rho, cplx zeta, double t, std::size_t steps,
                                     RngStream& rng) {
    SimConfig cfg;
    cfg.n = n;
    cfg.params = EllipticParams::from_rho_zeta(rho, zeta);
    cfg.grid = TimeGrid(t, steps);
    return simulate_endpoint(cfg, ComplexMatrix::identity(n), rng);
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t k = 0; k < points; ++k)
        out[k] = std::exp(llo + (lhi - llo) * static_cast<double>(k) / static_cast<double>(points - 1));
    out.back() = hi;
    return out;
}

std::optional<CircleMeasure> circle_measure_of(const InitialCondition& init) {
    if (std::holds_alternative<IdentityInit>(init.kind)) return CircleMeasure::point_mass();
    if (const auto* r = std::get_if<RootsOfUnityInit>(&init.kind)) return CircleMeasure::roots_of_unity(r->k);
    if (const auto* a = std::get_if<AtomicNormalInit>(&init.kind)) {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& [lambda, w] : a->atoms) {
            if (std::abs(std::abs(lambda) - 1.0) > 1e-12) return std::nullopt;
            atoms.emplace_back(std::arg(lambda), w);
        }
        return CircleMeasure(std::move(atoms));
    }
    return std::nullopt;
}

InitialSpectralData general_data_of(const InitialCondition& init) {
    if (const auto* a = std::get_if<AtomicNormalInit>(&init.kind)) return InitialSpectralData::atomic(a->atoms);
    if (const auto* b = std::get_if<NonNormalBlockInit>(&init.kind)) {
        ComplexMatrix m(2);
        m(0, 0) = b->block[0];
        m(0, 1) = b->block[1];
        m(1, 0) = b->block[2];
        m(1, 1) = b->block[3];
        return InitialSpectralData::matrix(std::move(m));
    }
    if (const auto* e = std::get_if<ExplicitInit>(&init.kind)) return InitialSpectralData::matrix(e->matrix);
    fail(ErrorCode::InvalidUsage, "initial condition has no general spectral data");
}

} // namespace

bool VerifyReport::pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

void VerifyReport::check(std::string metric, double value, double target, double tolerance, bool ok) {
    rows.push_back({std::move(metric), value, target, tolerance, ok});
}

SupportField support_field(const InitialCondition& init) {
    SupportField out;
    if (auto mu = circle_measure_of(init)) {
        out.unitary = true;
        out.radius = 1.0;
        out.field = [m = *mu](cplx z) { return t_unitary(m, z); };
        return out;
    }
    auto data = std::make_shared<InitialSpectralData>(general_data_of(init));
    out.unitary = false;
    out.radius = data->spectral_radius_bound();
    out.field = [data](cplx z) { return t_general(*data, z); };
    return out;
}

Region support_region(const InitialCondition& init, double t, double h) {
    const SupportField sf = support_field(init);
    const double half = 2.0 * std::max(sf.radius, 0.5);
    return sigma_region(sf.field, t, Window{-half, half, -half, half}, h);
}

std::vector<cplx> simulate_eigenvalues(const InitialCondition& init, std::size_t n, double rho, cplx zeta,
                                       double t_final, std::size_t steps, RngStream& rng) {
    n = compatible_dimension(init, n);
    const RealizedInitial b0 = make_initial(init, n, rng);
    SimConfig cfg;
    cfg.n = n;
    cfg.params = EllipticParams::from_rho_zeta(rho, zeta);
    cfg.grid = TimeGrid(t_final, steps);
    return eigenvalues(simulate_endpoint(cfg, b0.b0, rng)).eigenvalues;
}

VerifyReport verify_moments(const MomentsOptions& o, const RunOptions& run) {
    VerifyReport report = named("moments");
    const EllipticParams params = EllipticParams::from_rho_zeta(o.rho, o.zeta);
    require(o.level < 30, ErrorCode::LevelOutOfRange, "moment level too large");
    const double dt = std::ldexp(1.0, -static_cast<int>(o.level));
    const auto steps = static_cast<std::size_t>(std::floor(o.t / dt));
    const double target = second_moment_closed_form(params, dt, steps);

    auto outcomes = run_trials<double>(
        o.trials, run.seed, run.workers,
        [&](RngStream& rng, std::size_t) { return ntrace_gram(euler_from_identity(params, dt, steps, o.n, rng)); },
        run.first_stream);
    const auto values = collect(report, outcomes, "trials", run.first_stream);
    const MeanSE m = mean_se(values);
    report.rows.push_back(info_row("steps", static_cast<double>(steps)));
    report.rows.push_back(info_row("standard_error", m.se));
    report.rows.push_back(info_row("z_score", m.se > 0.0 ? (m.mean - target) / m.se : 0.0));
    report.check("mean_ts_BBstar", m.mean, target, 4.0 * m.se, std::abs(m.mean - target) <= 4.0 * m.se);
    return report;
}

VerifyReport verify_refinement(const RefinementOptions& o, const RunOptions& run) {
    VerifyReport report = named("refinement");
    require(o.first_level >= 1 && o.first_level < o.last_level, ErrorCode::InvalidParameter,
            "refinement levels must satisfy 1 <= first < last");
    const EllipticParams params = EllipticParams::from_rho_zeta(o.rho, o.zeta);
    const std::size_t count = o.last_level - o.first_level + 1;

    auto outcomes = run_trials<std::vector<double>>(
        o.trials, run.seed, run.workers,
        [&](RngStream& rng, std::size_t) {
            const CoupledIncrements coupled(params, o.t, o.last_level, o.n, rng);
            std::vector<double> gaps(count);
            for (std::size_t k = 0; k < count; ++k) gaps[k] = refine_gap(coupled, params, o.first_level + k);
            return gaps;
        },
        run.first_stream);
    const auto values = collect(report, outcomes, "trials", run.first_stream);

    std::vector<double> levels(count), log2_rms(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> sq;
        sq.reserve(values.size());
        for (const auto& g : values) sq.push_back(g[k] * g[k]);
        const double rms = std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
        levels[k] = static_cast<double>(o.first_level + k);
        log2_rms[k] = std::log2(rms);
        report.rows.push_back(info_row("rms_gap_level_" + std::to_string(o.first_level + k), rms));
    }
    const LinearFit fit = least_squares(levels, log2_rms);
    const double mid = 0.5 * (o.slope_min + o.slope_max);
    report.check("log2_slope", fit.slope, mid, 0.5 * (o.slope_max - o.slope_min),
                 fit.slope >= o.slope_min && fit.slope <= o.slope_max);
    return report;
}

VerifyReport verify_affine(const AffineOptions& o, const RunOptions& run) {
    VerifyReport report = named("affine");
    require(!o.ts.empty() && o.trials >= 1, ErrorCode::InvalidParameter, "affine check needs times and trials");
    for (double t : o.ts) require(t > 0.0, ErrorCode::InvalidParameter, "affine times must be positive");
    const EllipticParams params = EllipticParams::from_rho_zeta(o.rho, o.zeta);

    // Stream id = time index * trials + trial.
    auto outcomes = run_trials<double>(
        o.ts.size() * o.trials, run.seed, run.workers,
        [&](RngStream& rng, std::size_t id) {
            const TimeGrid grid(o.ts[id / o.trials], o.steps);
            return sample_affine_deviation(params, grid, o.n, rng);
        },
        run.first_stream);
    for (const auto& out : outcomes)
        if (!out.ok) report.failures.push_back({report.name, out.index, out.error});
    report.streams.push_back({"time_major_trials", run.first_stream, outcomes.size()});

    std::vector<double> log_t, log_med, medians;
    for (std::size_t ti = 0; ti < o.ts.size(); ++ti) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < o.trials; ++i) {
            const auto& out = outcomes[ti * o.trials + i];
            if (out.ok) vals.push_back(out.value);
        }
        if (static_cast<double>(vals.size()) < min_success_fraction * static_cast<double>(o.trials))
            throw FailureThresholdExceeded("affine: too many failed trials at t=" + format_double(o.ts[ti]));
        const double med = median(vals);
        medians.push_back(med);
        log_t.push_back(std::log(o.ts[ti]));
        log_med.push_back(std::log(med));
        report.rows.push_back(info_row(fmt_metric("median_deviation", o.ts[ti]), med));
    }
    bool monotone = true;
    for (std::size_t k = 1; k < medians.size(); ++k) monotone = monotone && medians[k] > medians[k - 1];
    report.check("medians_monotone", monotone ? 1.0 : 0.0, 1.0, 0.0, monotone);
    if (o.ts.size() >= 2) {
        const LinearFit fit = least_squares(log_t, log_med);
        report.check("loglog_slope", fit.slope, 0.5 * (o.slope_min + o.slope_max), 0.5 * (o.slope_max - o.slope_min),
                     fit.slope >= o.slope_min && fit.slope <= o.slope_max);
    }
    return report;
}

VerifyReport verify_sd(const SdOptions& o, const RunOptions& run) {
    VerifyReport report = named("schwinger_dyson");
    const SDResult r = sd_check(o.q, o.index, o.nvars, o.n, o.trials, run.seed, run.workers);
    report.streams.push_back({"trials", 0, o.trials});
    report.rows.push_back(info_row("lhs_imag", r.lhs_mean.imag()));
    report.rows.push_back(info_row("rhs_imag", r.rhs_mean.imag()));
    const double gap = std::abs(r.lhs_mean - r.rhs_mean);
    report.check("sides_gap", gap, 0.0, 4.0 * r.combined_se(), r.sides_agree(4.0));
    if (o.has_target) {
        const double dl = std::abs(r.lhs_mean - o.target);
        const double dr = std::abs(r.rhs_mean - o.target);
        report.check("lhs_mean", r.lhs_mean.real(), o.target.real(), 4.0 * r.lhs_se, dl <= 4.0 * r.lhs_se);
        report.check("rhs_mean", r.rhs_mean.real(), o.target.real(), 4.0 * r.rhs_se, dr <= 4.0 * r.rhs_se);
    } else {
        report.rows.push_back(info_row("lhs_mean", r.lhs_mean.real()));
        report.rows.push_back(info_row("rhs_mean", r.rhs_mean.real()));
    }
    return report;
}

VerifyReport verify_circular(const CircularOptions& o, const RunOptions& run) {
    VerifyReport report = named("circular");
    const EllipticParams params = EllipticParams::from_rho_zeta(1.0, 0.0);

    auto outcomes = run_trials<cplx>(
        o.moment_trials, run.seed, run.workers,
        [&](RngStream& rng, std::size_t) {
            const ComplexMatrix w = sample_elliptic_increment(params, 1.0, o.n, rng);
            return ntrace_product(w, w);
        },
        run.first_stream);
    const auto values = collect(report, outcomes, "moment_trials", run.first_stream);
    const ComplexMeanSE m = mean_se(values);
    report.check("abs_mean_ts_W2", std::abs(m.mean), 0.0, 4.0 * m.se, std::abs(m.mean) <= 4.0 * m.se);

    const std::uint64_t sample_stream = run.first_stream + o.moment_trials;
    RngStream rng(run.seed, sample_stream);
    report.streams.push_back({"eigenvalue_sample", sample_stream, 1});
    auto eigs = eigenvalues(sample_elliptic_increment(params, 1.0, o.n, rng)).eigenvalues;
    const auto inside = std::count_if(eigs.begin(), eigs.end(), [&](cplx z) { return std::abs(z) <= o.radius; });
    const double frac = static_cast<double>(inside) / static_cast<double>(eigs.size());
    report.check(fmt_metric("fraction_inside_radius", o.radius), frac, o.min_fraction, 0.0, frac >= o.min_fraction);
    report.eigenvalues.push_back(std::move(eigs));
    return report;
}

VerifyReport verify_containment(const ContainmentOptions& o, const RunOptions& run) {
    VerifyReport report = named("containment");
    RngStream rng(run.seed, run.first_stream);
    report.streams.push_back({"sample", run.first_stream, 1});
    auto eigs = simulate_eigenvalues(o.init, o.n, 1.0, 0.0, o.t, o.steps, rng);
    Region region = support_region(o.init, o.t, o.h);
    const double frac = containment_fraction(eigs, region, o.margin);
    report.rows.push_back(info_row("N_used", static_cast<double>(eigs.size())));
    report.rows.push_back(info_row("boundary_curves", static_cast<double>(region.component_count)));
    report.check(fmt_metric("fraction_inside_margin", o.margin), frac, o.min_fraction, 0.0, frac >= o.min_fraction);
    report.eigenvalues.push_back(std::move(eigs));
    report.regions.push_back(std::move(region));
    return report;
}

VerifyReport verify_topology(const TopologyOptions& o) {
    VerifyReport report = named("topology");
    const InitialCondition point_mass{IdentityInit{}};
    for (const auto& [t, expected] : {std::pair{o.t_below, 1.0}, std::pair{o.t_above, 2.0}}) {
        Region region = support_region(point_mass, t, o.h);
        const auto count = static_cast<double>(region.component_count);
        report.check(fmt_metric("component_count", t), count, expected, 0.0, count == expected);
        report.regions.push_back(std::move(region));
    }
    const double at_minus_one = t_unitary(CircleMeasure::point_mass(), -1.0);
    report.check("T_point_mass_at_minus_1", at_minus_one, 4.0, 1e-10, std::abs(at_minus_one - 4.0) <= 1e-10);
    return report;
}

VerifyReport verify_pushforward(const PushforwardOptions& o, const RunOptions& run) {
    VerifyReport report = named("pushforward");
    RngStream cloud_rng(run.seed, run.first_stream);
    RngStream sample_rng(run.seed, run.first_stream + 1);
    report.streams.push_back({"cloud", run.first_stream, 1});
    report.streams.push_back({"sample", run.first_stream + 1, 1});

    const Region base = support_region(o.init, o.t, o.h);
    const PointCloud cloud =
        PointCloud::uniform(simulate_eigenvalues(o.init, o.cloud_n, o.t, 0.0, 1.0, o.steps, cloud_rng));
    const double eps = cloud.default_exclusion_radius();
    report.rows.push_back(info_row("exclusion_radius", eps));

    const Region same = pushforward_region(base, cloud, 0.0, eps);
    double worst = 0.0;
    for (std::size_t c = 0; c < base.boundary.size(); ++c)
        for (std::size_t v = 0; v < base.boundary[c].vertices.size(); ++v)
            worst = std::max(worst, std::abs(same.boundary[c].vertices[v] - base.boundary[c].vertices[v]));
    report.check("zero_zeta_vertex_shift", worst, 0.0, 1e-12, worst <= 1e-12);

    Region mapped = zeta_support_region(base, cloud, o.zeta, eps);
    report.rows.push_back(info_row("flagged_vertices", static_cast<double>(mapped.flagged_vertices)));
    auto eigs = simulate_eigenvalues(o.init, o.n, o.t, o.zeta, 1.0, o.steps, sample_rng);
    const double frac = containment_fraction(eigs, mapped, o.margin);
    report.check(fmt_metric("fraction_inside_margin", o.margin), frac, o.min_fraction, 0.0, frac >= o.min_fraction);
    report.eigenvalues.push_back(std::move(eigs));
    report.regions.push_back(std::move(mapped));
    return report;
}

VerifyReport verify_reduction(const ReductionOptions& o) {
    VerifyReport report = named("reduction");
    require(o.grid >= 2, ErrorCode::InvalidParameter, "reduction grid needs at least 2 points per side");
    const CircleMeasure mu = CircleMeasure::roots_of_unity(o.k);
    const InitialSpectralData data = InitialSpectralData::from_circle(mu);
    double worst = 0.0;
    std::size_t evaluated = 0;
    const double span = static_cast<double>(o.grid - 1);
    for (std::size_t j = 0; j < o.grid; ++j)
        for (std::size_t i = 0; i < o.grid; ++i) {
            const cplx z{o.window.re_min + (o.window.re_max - o.window.re_min) * static_cast<double>(i) / span,
                         o.window.im_min + (o.window.im_max - o.window.im_min) * static_cast<double>(j) / span};
            if (std::abs(std::abs(z) - 1.0) < o.guard) continue;
            worst = std::max(worst, std::abs(t_general(data, z) - t_unitary(mu, z)));
            ++evaluated;
        }
    report.rows.push_back(info_row("points_evaluated", static_cast<double>(evaluated)));
    report.check("sup_abs_difference", worst, 0.0, o.tolerance, worst <= o.tolerance);
    return report;
}

VerifyReport verify_ginibre_ssv(const GinibreSsvOptions& o, const RunOptions& run) {
    VerifyReport report = named("ginibre_ssv");
    auto outcomes = run_trials<double>(
        o.trials, run.seed, run.workers,
        [&](RngStream& rng, std::size_t) { return singular_values(sample_ginibre(o.n, 1.0, rng), -1.0).smallest(); },
        run.first_stream);
    const auto values = collect(report, outcomes, "trials", run.first_stream);
    const auto count = static_cast<double>(values.size());
    const double n2 = static_cast<double>(o.n * o.n);
    for (double delta : o.deltas) {
        const auto hits = std::count_if(values.begin(), values.end(), [&](double s) { return s <= delta; });
        const double p = static_cast<double>(hits) / count;
        const double bound = std::min(1.0, n2 * delta * delta);
        const double slack = 4.0 * std::sqrt(bound * (1.0 - bound) / count);
        report.check(fmt_metric("prob_sigma_min_below", delta), p, bound, slack, p <= bound + slack);
    }
    return report;
}

VerifyReport verify_intermediate_sv(const IntermediateSvOptions& o, const RunOptions& run) {
    VerifyReport report = named("intermediate_sv");
    require(o.ell_min >= 1 && o.ell_min < o.n, ErrorCode::InvalidParameter, "ell_min must lie in [1, N)");
    auto outcomes = run_trials<double>(
        o.trials, run.seed, run.workers,
        [&](RngStream& rng, std::size_t) {
            const SingularSpectrum sv = singular_values(endpoint_from_identity(o.n, 1.0, 0.0, 1.0, o.steps, rng), o.z);
            // Smallest ratio sigma_{N-l} / (c (l/N)^2); the trial passes when it is >= 1.
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t ell = o.ell_min; ell < o.n; ++ell) {
                const double frac = static_cast<double>(ell) / static_cast<double>(o.n);
                worst = std::min(worst, sv.values[o.n - ell - 1] / (o.c * frac * frac));
            }
            return worst;
        },
        run.first_stream);
    const auto values = collect(report, outcomes, "trials", run.first_stream);
    const auto good = std::count_if(values.begin(), values.end(), [](double r) { return r >= 1.0; });
    const double frac = static_cast<double>(good) / static_cast<double>(values.size());
    report.rows.push_back(info_row("min_ratio", *std::min_element(values.begin(), values.end())));
    report.check("fraction_trials_passing", frac, o.min_fraction, 0.0, frac >= o.min_fraction);
    return report;
}

VerifyReport verify_wegner(const WegnerOptions& o, const RunOptions& run) {
    VerifyReport report = named("wegner");
    require(!o.zs.empty() && o.eta_points >= 1, ErrorCode::InvalidParameter,
            "Wegner check needs points and an eta grid");
    const double eta_min = std::pow(static_cast<double>(o.n), -2.0 / 11.0);
    const std::vector<double> etas = log_grid(eta_min, 1.0, o.eta_points);

    // values[z][eta] per trial.
    auto outcomes = run_trials<std::vector<double>>(
        o.trials, run.seed, run.workers,
        [&](RngStream& rng, std::size_t) {
            const ComplexMatrix b = endpoint_from_identity(o.n, 1.0, 0.0, 1.0, o.steps, rng);
            std::vector<double> out;
            out.reserve(o.zs.size() * etas.size());
            for (cplx z : o.zs) {
                const SingularSpectrum sv = singular_values(b, z);
                for (double eta : etas) out.push_back(wegner_transform(sv, eta));
            }
            return out;
        },
        run.first_stream);
    const auto values = collect(report, outcomes, "trials", run.first_stream);

    double worst = 0.0;
    for (std::size_t zi = 0; zi < o.zs.size(); ++zi) {
        std::vector<double> means(etas.size());
        for (std::size_t e = 0; e < etas.size(); ++e) {
            std::vector<double> xs;
            for (const auto& v : values) xs.push_back(v[zi * etas.size() + e]);
            means[e] = mean_se(xs).mean;
            worst = std::max(worst, std::abs(means[e]));
            report.rows.push_back(info_row("mean_transform_z" + format_double(o.zs[zi].real()) + "_" +
                                               format_double(o.zs[zi].imag()) + fmt_metric("", etas[e]),
                                           means[e]));
        }
        if (std::find(o.outside.begin(), o.outside.end(), o.zs[zi]) == o.outside.end()) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        double lo_eta = std::numeric_limits<double>::infinity(), hi_eta = 0.0;
        for (std::size_t e = 0; e < etas.size(); ++e) {
            if (etas[e] > 10.0 * eta_min * (1.0 + 1e-12)) continue;
            lo = std::min(lo, std::abs(means[e]));
            hi = std::max(hi, std::abs(means[e]));
            lo_eta = std::min(lo_eta, std::abs(means[e]) / etas[e]);
            hi_eta = std::max(hi_eta, std::abs(means[e]) / etas[e]);
        }
        const std::string tag = format_double(o.zs[zi].real()) + "_" + format_double(o.zs[zi].imag());
        report.rows.push_back(info_row("lowest_decade_ratio_per_eta_z" + tag, hi_eta / lo_eta));
        const double ratio = hi / lo;
        report.check("lowest_decade_ratio_z" + tag, ratio, 1.0, o.ratio - 1.0, ratio <= o.ratio);
    }
    report.check("max_abs_mean_transform", worst, 0.0, o.bound, worst <= o.bound);
    return report;
}

VerifyReport verify_logtail(const LogTailOptions& o, const RunOptions& run) {
    VerifyReport report = named("logtail");
    auto outcomes = run_trials<double>(
        o.trials, run.seed, run.workers,
        [&](RngStream& rng, std::size_t) {
            return log_tail_mass(endpoint_from_identity(o.n, 1.0, 0.0, 1.0, o.steps, rng), o.z, o.level);
        },
        run.first_stream);
    const auto values = collect(report, outcomes, "trials", run.first_stream);
    const auto good = std::count_if(values.begin(), values.end(), [&](double m) { return m < o.max_mass; });
    const double frac = static_cast<double>(good) / static_cast<double>(values.size());
    report.rows.push_back(info_row("max_tail_mass", *std::max_element(values.begin(), values.end())));
    report.check("fraction_below_max_mass", frac, o.min_fraction, 0.0, frac >= o.min_fraction);
    return report;
}

VerifyReport verify_inverse(const InverseOptions& o, const RunOptions& run) {
    VerifyReport report = named("inverse");
    require(!o.ks.empty(), ErrorCode::InvalidParameter, "inverse check needs step counts");
    std::vector<std::size_t> levels;
    for (std::size_t k : o.ks) {
        require(k >= 1 && (k & (k - 1)) == 0, ErrorCode::InvalidParameter, "inverse step counts must be powers of two");
        levels.push_back(static_cast<std::size_t>(std::countr_zero(k)));
    }
    const std::size_t finest = *std::max_element(levels.begin(), levels.end());
    const EllipticParams params = EllipticParams::from_rho_zeta(o.rho, o.zeta);

    // Every k uses the coarsenings of one shared path per trial.
    auto outcomes = run_trials<std::vector<double>>(
        o.trials, run.seed, run.workers,
        [&](RngStream& rng, std::size_t) {
            const CoupledIncrements coupled(params, o.t, finest, o.n, rng);
            std::vector<double> defects;
            for (std::size_t l : levels) {
                const auto incs = coupled.level(l);
                const double dt = coupled.dt(l);
                ComplexMatrix bc = simulate_forward(ComplexMatrix::identity(o.n), params, incs, dt) *
                                   simulate_inverse(params, incs, dt);
                bc.add_identity(-1.0);
                defects.push_back(operator_norm(bc));
            }
            return defects;
        },
        run.first_stream);
    const auto values = collect(report, outcomes, "trials", run.first_stream);
    std::vector<double> medians;
    for (std::size_t k = 0; k < o.ks.size(); ++k) {
        std::vector<double> xs;
        for (const auto& v : values) xs.push_back(v[k]);
        medians.push_back(median(xs));
        report.rows.push_back(info_row("median_defect_k" + std::to_string(o.ks[k]), medians.back()));
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < medians.size(); ++k) decreasing = decreasing && medians[k] < medians[k - 1];
    report.check("medians_strictly_decreasing", decreasing ? 1.0 : 0.0, 1.0, 0.0, decreasing);
    return report;
}

} // namespace glbm::harness
