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

#include "glbm/harness/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>

#include "glbm/error.hpp"
#include "glbm/harness/verify.hpp"
#include "glbm/montecarlo.hpp"
#include "glbm/numfmt.hpp"
#include "glbm/spectral.hpp"

namespace glbm::harness {

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
public:
    explicit Stopwatch(RunManifest& manifest) : manifest_(manifest) {}
    template <class Fn>
    auto time(const std::string& stage, Fn&& fn) {
        const auto start = Clock::now();
        struct Record {
            RunManifest& m;
            std::string stage;
            Clock::time_point start;
            ~Record() { m.timings.emplace_back(stage, std::chrono::duration<double>(Clock::now() - start).count()); }
        } record{manifest_, stage, start};
        return fn();
    }

private:
    RunManifest& manifest_;
};

InitialCondition fig5_init() {
    AtomicNormalInit a;
    a.atoms = {{1.0, 0.125}, {-1.0, 0.125}, {3.0, 0.125}, {-3.0, 0.125}, {{0.0, 1.0}, 0.25}, {{0.0, -1.0}, 0.25}};
    return {a, false};
}

void write_report(OutputDir& dir, const VerifyReport& report) {
    auto out = dir.open("report.csv");
    write_report_csv(report.rows, out);
}

void absorb(RunManifest& manifest, const VerifyReport& report) {
    manifest.streams.insert(manifest.streams.end(), report.streams.begin(), report.streams.end());
    manifest.failures.insert(manifest.failures.end(), report.failures.begin(), report.failures.end());
    manifest.passed = manifest.passed && report.pass();
}

void write_region_files(OutputDir& dir, const Region& region, const std::string& prefix) {
    {
        auto out = dir.open(prefix + "boundary.csv");
        write_polylines_csv(region, out);
    }
    const auto bin = dir.record(prefix + "membership.bin");
    const auto header = dir.record(prefix + "membership.json");
    write_membership_grid(region, bin, header);
}

void write_scene(OutputDir& dir, const std::string& name, const std::string& title, std::vector<cplx> points,
                 const Region* region) {
    SvgScene scene;
    scene.title = title;
    scene.scatter.push_back({std::move(points)});
    if (region != nullptr) scene.curves = region->boundary;
    auto out = dir.open(name);
    write_svg(scene, out);
}

void validate_init(const InitialCondition& init, std::size_t n) {
    try {
        check_initial(init, n);
    } catch (const Error& e) {
        fail(ErrorCode::ValidationError, std::string("'init': ") + e.what());
    }
}

RunOptions options(const ExperimentSpec& spec, unsigned workers) { return {spec.uint("seed"), workers, 0}; }

void run_simulate(const ExperimentSpec& spec, unsigned workers, OutputDir& dir, RunManifest& manifest) {
    SimConfig cfg;
    cfg.n = spec.uint("N");
    cfg.params = EllipticParams::from_rho_zeta(spec.real("rho"), spec.complex("zeta"));
    cfg.grid = TimeGrid(spec.real("t"), spec.uint("steps"));
    cfg.seed = spec.uint("seed");
    cfg.trials = spec.uint("trials");
    cfg.scheme = spec.scheme();
    cfg.validate();
    const InitialCondition init = spec.init();
    validate_init(init, cfg.n);

    auto outcomes = Stopwatch(manifest).time("trials", [&] {
        return run_trials<ComplexMatrix>(cfg.trials, cfg.seed, workers, [&](RngStream& rng, std::size_t) {
            const RealizedInitial b0 = make_initial(init, cfg.n, rng);
            return simulate_endpoint(cfg, b0.b0, rng);
        });
    });
    std::vector<ComplexMatrix> endpoints;
    std::vector<std::size_t> index;
    for (const auto& o : outcomes) {
        if (o.ok) {
            endpoints.push_back(o.value);
            index.push_back(o.index);
        } else {
            manifest.failures.push_back({"simulate", o.index, o.error});
        }
    }
    manifest.streams.push_back({"trials", 0, cfg.trials});
    if (static_cast<double>(endpoints.size()) < 0.9 * static_cast<double>(cfg.trials))
        throw FailureThresholdExceeded("simulate: only " + std::to_string(endpoints.size()) + " of " +
                                       std::to_string(cfg.trials) + " trials succeeded");

    if (spec.flag("write_endpoints")) {
        auto out = dir.open("endpoints.csv");
        write_matrix_header(out);
        for (std::size_t k = 0; k < endpoints.size(); ++k) write_matrix_rows(out, index[k], endpoints[k]);
    }
    auto out = dir.open("eigenvalues.csv");
    write_eigenvalues_header(out);
    Stopwatch(manifest).time("eigenvalues", [&] {
        for (std::size_t k = 0; k < endpoints.size(); ++k)
            write_eigenvalues_rows(out, index[k], eigenvalues(endpoints[k]).eigenvalues);
        return 0;
    });
}

void run_spectrum(const ExperimentSpec& spec, unsigned workers, OutputDir& dir, RunManifest& manifest) {
    SimConfig cfg;
    cfg.n = spec.uint("N");
    cfg.params = EllipticParams::from_rho_zeta(spec.real("rho"), spec.complex("zeta"));
    cfg.grid = TimeGrid(spec.real("t"), spec.uint("steps"));
    cfg.seed = spec.uint("seed");
    cfg.trials = spec.uint("trials");
    cfg.scheme = spec.scheme();
    cfg.validate();
    const InitialCondition init = spec.init();
    validate_init(init, cfg.n);
    const std::vector<cplx> zs = spec.complexes("z");

    struct TrialSpectra {
        std::vector<cplx> eigs;
        std::vector<SingularSpectrum> sv;
    };
    auto outcomes = Stopwatch(manifest).time("trials", [&] {
        return run_trials<TrialSpectra>(cfg.trials, cfg.seed, workers, [&](RngStream& rng, std::size_t) {
            const RealizedInitial b0 = make_initial(init, cfg.n, rng);
            const ComplexMatrix b = simulate_endpoint(cfg, b0.b0, rng);
            TrialSpectra t;
            t.eigs = eigenvalues(b).eigenvalues;
            for (cplx z : zs) t.sv.push_back(singular_values(b, z));
            return t;
        });
    });
    manifest.streams.push_back({"trials", 0, cfg.trials});
    std::size_t ok = 0;
    for (const auto& o : outcomes) {
        if (o.ok)
            ++ok;
        else
            manifest.failures.push_back({"spectrum", o.index, o.error});
    }
    if (static_cast<double>(ok) < 0.9 * static_cast<double>(cfg.trials))
        throw FailureThresholdExceeded("spectrum: only " + std::to_string(ok) + " of " + std::to_string(cfg.trials) +
                                       " trials succeeded");

    {
        auto out = dir.open("eigenvalues.csv");
        write_eigenvalues_header(out);
        for (const auto& o : outcomes)
            if (o.ok) write_eigenvalues_rows(out, o.index, o.value.eigs);
    }
    if (!zs.empty()) {
        auto out = dir.open("singular_values.csv");
        write_singular_values_header(out);
        for (const auto& o : outcomes)
            if (o.ok)
                for (std::size_t k = 0; k < zs.size(); ++k)
                    write_singular_values_rows(out, o.index, zs[k], o.value.sv[k].values);

        // Mean log potential per z over trials with a finite value.
        std::vector<ReportRow> rows;
        for (std::size_t k = 0; k < zs.size(); ++k) {
            std::vector<double> vals;
            for (const auto& o : outcomes) {
                if (!o.ok) continue;
                const LogPotential lp = log_potential(o.value.sv[k]);
                if (!lp.neg_infinite) vals.push_back(lp.value);
            }
            const std::string tag = format_double(zs[k].real()) + "_" + format_double(zs[k].imag());
            if (!vals.empty()) rows.push_back(info_row("mean_log_potential_z" + tag, mean_se(vals).mean));
        }
        auto rep = dir.open("report.csv");
        write_report_csv(rows, rep);
    }
}

Region zeta_region(const Region& base, const InitialCondition& init, double t, cplx zeta, std::size_t n,
                   std::size_t steps, std::uint64_t seed, std::uint64_t stream, RunManifest& manifest,
                   const std::string& group) {
    if (zeta == 0.0) return base;
    RngStream rng(seed, stream);
    manifest.streams.push_back({group, stream, 1});
    const PointCloud cloud = PointCloud::uniform(simulate_eigenvalues(init, n, t, 0.0, 1.0, steps, rng));
    return zeta_support_region(base, cloud, zeta, cloud.default_exclusion_radius());
}

void run_boundary(const ExperimentSpec& spec, OutputDir& dir, RunManifest& manifest) {
    const InitialCondition init = spec.init();
    const double t = spec.real("t");
    const cplx zeta = spec.complex("zeta");
    const SupportField sf = support_field(init);
    Region base =
        Stopwatch(manifest).time("region", [&] { return sigma_region(sf.field, t, spec.window(), spec.real("h")); });
    Region region = Stopwatch(manifest).time("pushforward", [&] {
        return zeta_region(base, init, t, zeta, spec.uint("N"), spec.uint("steps"), spec.uint("seed"), 0, manifest,
                           "cloud");
    });
    write_region_files(dir, region, "");
    std::vector<ReportRow> rows{info_row("boundary_curves", static_cast<double>(region.component_count)),
                                info_row("flagged_vertices", static_cast<double>(region.flagged_vertices))};
    {
        auto out = dir.open("report.csv");
        write_report_csv(rows, out);
    }
    write_scene(dir, "boundary.svg", "support boundary", {}, &region);
}

void run_figure(const ExperimentSpec& spec, OutputDir& dir, RunManifest& manifest) {
    const auto panels = select_panels(spec.text("preset"));
    const std::size_t n = spec.uint("N");
    const std::size_t steps = spec.uint("steps");
    const std::uint64_t seed = spec.uint("seed");
    std::vector<ReportRow> rows;
    const auto& all = figure_presets();
    for (const auto& panel : panels) {
        // Streams are tied to the panel's position in the full preset list, so a panel
        // looks the same whether it runs alone or as part of a group.
        std::size_t p = 0;
        while (all[p].name != panel.name) ++p;
        const std::uint64_t sample_stream = 2 * p, cloud_stream = 2 * p + 1;

        std::vector<cplx> eigs = Stopwatch(manifest).time(panel.name + "/sample", [&] {
            RngStream rng(seed, sample_stream);
            return simulate_eigenvalues(panel.init, n, panel.t, panel.zeta, 1.0, steps, rng);
        });
        manifest.streams.push_back({panel.name + "/sample", sample_stream, 1});
        const Region base = Stopwatch(manifest).time(
            panel.name + "/region", [&] { return support_region(panel.init, panel.t, spec.real("h")); });
        const Region region = Stopwatch(manifest).time(panel.name + "/pushforward", [&] {
            return zeta_region(base, panel.init, panel.t, panel.zeta, n, steps, seed, cloud_stream, manifest,
                               panel.name + "/cloud");
        });

        {
            auto out = dir.open(panel.name + "_eigenvalues.csv");
            write_eigenvalues_header(out);
            write_eigenvalues_rows(out, 0, eigs);
        }
        {
            auto out = dir.open(panel.name + "_boundary.csv");
            write_polylines_csv(region, out);
        }
        const double frac = containment_fraction(eigs, region, spec.real("margin"));
        rows.push_back(info_row(panel.name + "/N_used", static_cast<double>(eigs.size())));
        rows.push_back(info_row(panel.name + "/fraction_inside_margin", frac));
        rows.push_back(info_row(panel.name + "/boundary_curves", static_cast<double>(region.component_count)));
        write_scene(dir, panel.name + ".svg",
                    panel.name + ": t=" + format_double(panel.t) + " zeta=" + format_double(panel.zeta.real()) +
                        (panel.zeta.imag() < 0 ? "" : "+") + format_double(panel.zeta.imag()) + "i",
                    std::move(eigs), &region);
    }
    auto out = dir.open("report.csv");
    write_report_csv(rows, out);
}

VerifyReport run_verify(const ExperimentSpec& spec, unsigned workers, RunManifest& manifest) {
    const RunOptions run = options(spec, workers);
    Stopwatch watch(manifest);
    switch (spec.kind()) {
    case ExperimentKind::VerifyMoments: {
        MomentsOptions o;
        o.rho = spec.real("rho");
        o.zeta = spec.complex("zeta");
        o.n = spec.uint("N");
        o.level = static_cast<unsigned>(spec.uint("level"));
        o.t = spec.real("t");
        o.trials = spec.uint("trials");
        return watch.time("verify", [&] { return verify_moments(o, run); });
    }
    case ExperimentKind::VerifyRefinement: {
        RefinementOptions o;
        o.rho = spec.real("rho");
        o.zeta = spec.complex("zeta");
        o.n = spec.uint("N");
        o.t = spec.real("t");
        const auto lv = spec.uints("levels");
        o.first_level = static_cast<unsigned>(lv[0]);
        o.last_level = static_cast<unsigned>(lv[1]);
        o.trials = spec.uint("trials");
        o.slope_min = spec.real("slope_min");
        o.slope_max = spec.real("slope_max");
        return watch.time("verify", [&] { return verify_refinement(o, run); });
    }
    case ExperimentKind::VerifyAffine: {
        AffineOptions o;
        o.rho = spec.real("rho");
        o.zeta = spec.complex("zeta");
        o.n = spec.uint("N");
        o.steps = spec.uint("steps");
        o.ts = spec.reals("t_list");
        o.trials = spec.uint("trials");
        o.slope_min = spec.real("slope_min");
        o.slope_max = spec.real("slope_max");
        return watch.time("verify", [&] { return verify_affine(o, run); });
    }
    case ExperimentKind::VerifyInverse: {
        InverseOptions o;
        o.rho = spec.real("rho");
        o.zeta = spec.complex("zeta");
        o.n = spec.uint("N");
        o.t = spec.real("t");
        o.ks.clear();
        for (auto k : spec.uints("k_list")) o.ks.push_back(k);
        o.trials = spec.uint("trials");
        return watch.time("verify", [&] { return verify_inverse(o, run); });
    }
    case ExperimentKind::VerifySsv: {
        GinibreSsvOptions g;
        g.n = spec.uint("N");
        g.trials = spec.uint("trials");
        g.deltas = spec.reals("delta_list");
        IntermediateSvOptions m;
        m.n = spec.uint("intermediate_N");
        m.trials = spec.uint("intermediate_trials");
        m.steps = spec.uint("intermediate_steps");
        m.z = spec.complex("z");
        m.ell_min = spec.uint("ell_min");
        m.c = spec.real("c");
        m.min_fraction = spec.real("min_fraction");
        VerifyReport a = watch.time("ginibre", [&] { return verify_ginibre_ssv(g, run); });
        RunOptions second = run;
        second.first_stream = g.trials;
        VerifyReport b = watch.time("intermediate", [&] { return verify_intermediate_sv(m, second); });
        for (auto& r : a.rows) r.metric = "ginibre/" + r.metric;
        for (auto& r : b.rows) a.rows.push_back({"intermediate/" + r.metric, r.value, r.target, r.tolerance, r.pass});
        a.failures.insert(a.failures.end(), b.failures.begin(), b.failures.end());
        for (auto& s : a.streams) s.group = "ginibre/" + s.group;
        for (auto& s : b.streams) a.streams.push_back({"intermediate/" + s.group, s.first, s.count});
        a.name = "ssv";
        return a;
    }
    case ExperimentKind::VerifyWegner: {
        WegnerOptions o;
        o.n = spec.uint("N");
        o.steps = spec.uint("steps");
        o.trials = spec.uint("trials");
        o.zs = spec.complexes("z");
        o.outside = spec.complexes("outside");
        o.eta_points = spec.uint("eta_points");
        o.bound = spec.real("bound");
        o.ratio = spec.real("ratio");
        return watch.time("verify", [&] { return verify_wegner(o, run); });
    }
    case ExperimentKind::VerifyLogtail: {
        LogTailOptions o;
        o.n = spec.uint("N");
        o.steps = spec.uint("steps");
        o.trials = spec.uint("trials");
        o.z = spec.complex("z");
        o.level = spec.real("tail_level");
        o.max_mass = spec.real("max_mass");
        o.min_fraction = spec.real("min_fraction");
        return watch.time("verify", [&] { return verify_logtail(o, run); });
    }
    case ExperimentKind::SdCheck: {
        SdOptions o;
        try {
            o.q = parse_ncpoly(spec.text("polynomial"));
        } catch (const Error& e) {
            fail(ErrorCode::ValidationError, std::string("'polynomial': ") + e.what());
        }
        o.index = static_cast<std::uint32_t>(spec.uint("index"));
        o.nvars = static_cast<std::uint32_t>(spec.uint("nvars"));
        require(o.q.max_index() <= o.nvars, ErrorCode::ValidationError,
                "'polynomial' uses more than 'nvars' variables");
        o.n = spec.uint("N");
        o.trials = spec.uint("trials");
        o.has_target = spec.has("target");
        if (o.has_target) o.target = spec.complex("target");
        return watch.time("verify", [&] { return verify_sd(o, run); });
    }
    default: break;
    }
    fail(ErrorCode::InvalidUsage, "not a verification kind");
}

} // namespace

const std::vector<FigurePanel>& figure_presets() {
    static const std::vector<FigurePanel> presets = [] {
        const InitialCondition identity{IdentityInit{}, false};
        const InitialCondition u6{RootsOfUnityInit{6}, false};
        const InitialCondition block{NonNormalBlockInit{{cplx{1.0, 1.0}, 1.0, 0.0, cplx{-1.0, 1.0}}}, false};
        std::vector<FigurePanel> p{
            {"fig1-left", identity, 2.0, {0.6, 1.0}},  {"fig1-right", u6, 2.0, {0.6, 1.0}},
            {"fig2-left", identity, 3.0, 0.0},         {"fig2-right", identity, 4.0, 0.0},
            {"fig3-left", u6, 2.0 / 3.0, 0.0},         {"fig3-right", u6, 0.7, 0.0},
            {"fig4-left", identity, 3.0, {2.0, -1.0}}, {"fig4-right", u6, 2.0 / 3.0, {0.0, -1.0 / 3.0}},
        };
        for (double t : {0.8, 1.0, 1.2})
            for (double z : {0.0, 0.5})
                p.push_back({"fig5-t" + format_double(t) + "-zeta" + format_double(z), fig5_init(), t, z});
        p.push_back({"fig6-left", block, 1.0, 0.0});
        p.push_back({"fig6-right", block, 1.0, {0.5, 0.5}});
        return p;
    }();
    return presets;
}

std::vector<FigurePanel> select_panels(const std::string& preset) {
    std::vector<FigurePanel> out;
    for (const auto& p : figure_presets())
        if (preset == "all" || p.name == preset || p.name.rfind(preset + "-", 0) == 0) out.push_back(p);
    if (out.empty()) {
        std::string names;
        for (const auto& p : figure_presets()) names += (names.empty() ? "" : ", ") + p.name;
        fail(ErrorCode::ValidationError, "unknown figure preset '" + preset + "' (known: " + names + ")");
    }
    return out;
}

RunManifest run(const ExperimentSpec& spec, unsigned workers) {
    if (spec.kind() == ExperimentKind::Figure)
        for (const auto& panel : select_panels(spec.text("preset"))) validate_init(panel.init, spec.uint("N"));
    if (spec.kind() == ExperimentKind::Boundary && spec.complex("zeta") != 0.0)
        validate_init(spec.init(), spec.uint("N"));
    RunManifest manifest;
    manifest.spec = spec.params();
    manifest.seed = spec.uint("seed");
    manifest.workers = workers;
    OutputDir dir(spec.text("out"));

    switch (spec.kind()) {
    case ExperimentKind::Simulate: run_simulate(spec, workers, dir, manifest); break;
    case ExperimentKind::Spectrum: run_spectrum(spec, workers, dir, manifest); break;
    case ExperimentKind::Boundary: run_boundary(spec, dir, manifest); break;
    case ExperimentKind::Figure: run_figure(spec, dir, manifest); break;
    default: {
        const VerifyReport report = run_verify(spec, workers, manifest);
        absorb(manifest, report);
        write_report(dir, report);
        break;
    }
    }

    manifest.outputs = dir.inventory();
    std::ofstream out(dir.root() / "manifest.json");
    require(out.good(), ErrorCode::IoError, "cannot write manifest.json");
    out << manifest.to_json().dump(2) << '\n';
    return manifest;
}

} // namespace glbm::harness
