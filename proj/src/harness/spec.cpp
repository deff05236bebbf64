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

#include "glbm/harness/spec.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "glbm/error.hpp"

namespace glbm::harness {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

enum class FieldType {
    UInt,
    PosUInt,
    Real,
    NonNegReal,
    PosReal,
    Complex,
    OptComplex,
    ComplexList,
    PosRealList,
    UIntList,
    Init,
    WindowBox,
    String,
    Bool,
    Scheme,
};

struct Field {
    const char* name;
    FieldType type;
    ordered_json fallback;
};

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 12> kKindNames{{
    {ExperimentKind::Simulate, "simulate"},
    {ExperimentKind::Spectrum, "spectrum"},
    {ExperimentKind::Boundary, "boundary"},
    {ExperimentKind::Figure, "figure"},
    {ExperimentKind::VerifyMoments, "verify-moments"},
    {ExperimentKind::VerifyRefinement, "verify-refinement"},
    {ExperimentKind::VerifyAffine, "verify-affine"},
    {ExperimentKind::VerifyInverse, "verify-inverse"},
    {ExperimentKind::VerifySsv, "verify-ssv"},
    {ExperimentKind::VerifyWegner, "verify-wegner"},
    {ExperimentKind::VerifyLogtail, "verify-logtail"},
    {ExperimentKind::SdCheck, "sd-check"},
}};

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::ValidationError, what); }

ordered_json identity_init() { return ordered_json{{"type", "identity"}}; }

std::vector<Field> schema(ExperimentKind kind) {
    std::vector<Field> f{{"seed", FieldType::UInt, 0}, {"out", FieldType::String, "out"}};
    auto add = [&f](std::initializer_list<Field> more) { f.insert(f.end(), more); };
    switch (kind) {
    case ExperimentKind::Simulate:
        add({{"N", FieldType::PosUInt, 4},
             {"rho", FieldType::PosReal, 1.0},
             {"zeta", FieldType::Complex, 0.0},
             {"t", FieldType::NonNegReal, 1.0},
             {"steps", FieldType::PosUInt, 8},
             {"trials", FieldType::PosUInt, 1},
             {"init", FieldType::Init, identity_init()},
             {"scheme", FieldType::Scheme, "auto"},
             {"write_endpoints", FieldType::Bool, true}});
        break;
    case ExperimentKind::Spectrum:
        add({{"N", FieldType::PosUInt, 64},
             {"rho", FieldType::PosReal, 1.0},
             {"zeta", FieldType::Complex, 0.0},
             {"t", FieldType::NonNegReal, 1.0},
             {"steps", FieldType::PosUInt, 16},
             {"trials", FieldType::PosUInt, 1},
             {"init", FieldType::Init, identity_init()},
             {"scheme", FieldType::Scheme, "auto"},
             {"z", FieldType::ComplexList, json::array()}});
        break;
    case ExperimentKind::Boundary:
        add({{"init", FieldType::Init, identity_init()},
             {"t", FieldType::PosReal, 3.0},
             {"zeta", FieldType::Complex, 0.0},
             {"window", FieldType::WindowBox, json::array({-2.0, 2.0, -2.0, 2.0})},
             {"h", FieldType::PosReal, 0.01},
             {"N", FieldType::PosUInt, 1024},
             {"steps", FieldType::PosUInt, 64}});
        break;
    case ExperimentKind::Figure:
        add({{"preset", FieldType::String, "fig2-left"},
             {"N", FieldType::PosUInt, 1024},
             {"steps", FieldType::PosUInt, 64},
             {"h", FieldType::PosReal, 0.01},
             {"margin", FieldType::NonNegReal, 0.05}});
        break;
    case ExperimentKind::VerifyMoments:
        add({{"rho", FieldType::PosReal, 1.0},
             {"zeta", FieldType::Complex, 0.0},
             {"N", FieldType::PosUInt, 32},
             {"level", FieldType::UInt, 3},
             {"t", FieldType::NonNegReal, 1.0},
             {"trials", FieldType::PosUInt, 400}});
        break;
    case ExperimentKind::VerifyRefinement:
        add({{"rho", FieldType::PosReal, 1.0},
             {"zeta", FieldType::Complex, 0.0},
             {"N", FieldType::PosUInt, 64},
             {"t", FieldType::PosReal, 1.0},
             {"levels", FieldType::UIntList, json::array({3, 7})},
             {"trials", FieldType::PosUInt, 100},
             {"slope_min", FieldType::Real, -0.65},
             {"slope_max", FieldType::Real, -0.35}});
        break;
    case ExperimentKind::VerifyAffine:
        add({{"rho", FieldType::PosReal, 1.0},
             {"zeta", FieldType::Complex, 0.0},
             {"N", FieldType::PosUInt, 128},
             {"steps", FieldType::PosUInt, 512},
             {"t_list", FieldType::PosRealList, json::array({0.02, 0.04, 0.08, 0.16, 0.32})},
             {"trials", FieldType::PosUInt, 50},
             {"slope_min", FieldType::Real, 0.8},
             {"slope_max", FieldType::Real, 1.2}});
        break;
    case ExperimentKind::VerifyInverse:
        add({{"rho", FieldType::PosReal, 1.0},
             {"zeta", FieldType::Complex, 0.0},
             {"N", FieldType::PosUInt, 32},
             {"t", FieldType::PosReal, 1.0},
             {"k_list", FieldType::UIntList, json::array({16, 64, 256, 1024})},
             {"trials", FieldType::PosUInt, 20}});
        break;
    case ExperimentKind::VerifySsv:
        add({{"N", FieldType::PosUInt, 32},
             {"trials", FieldType::PosUInt, 2000},
             {"delta_list", FieldType::PosRealList, json::array({1e-3, 3e-3, 1e-2})},
             {"intermediate_N", FieldType::PosUInt, 256},
             {"intermediate_trials", FieldType::PosUInt, 100},
             {"intermediate_steps", FieldType::PosUInt, 64},
             {"z", FieldType::Complex, 1.0},
             {"ell_min", FieldType::PosUInt, 20},
             {"c", FieldType::PosReal, 1e-3},
             {"min_fraction", FieldType::NonNegReal, 0.99}});
        break;
    case ExperimentKind::VerifyWegner:
        add({{"N", FieldType::PosUInt, 512},
             {"steps", FieldType::PosUInt, 32},
             {"trials", FieldType::PosUInt, 10},
             {"z", FieldType::ComplexList, json::array({0.5, 4.0})},
             {"outside", FieldType::ComplexList, json::array({4.0})},
             {"eta_points", FieldType::PosUInt, 8},
             {"bound", FieldType::PosReal, 20.0},
             {"ratio", FieldType::PosReal, 2.0}});
        break;
    case ExperimentKind::VerifyLogtail:
        add({{"N", FieldType::PosUInt, 256},
             {"steps", FieldType::PosUInt, 64},
             {"trials", FieldType::PosUInt, 100},
             {"z", FieldType::Complex, 0.0},
             {"tail_level", FieldType::PosReal, 10.0},
             {"max_mass", FieldType::PosReal, 0.01},
             {"min_fraction", FieldType::NonNegReal, 0.95}});
        break;
    case ExperimentKind::SdCheck:
        add({{"polynomial", FieldType::String, "1.0+0.0i * x1.x1.x1"},
             {"index", FieldType::PosUInt, 1},
             {"nvars", FieldType::PosUInt, 1},
             {"N", FieldType::PosUInt, 32},
             {"trials", FieldType::PosUInt, 2000},
             {"target", FieldType::OptComplex, nullptr}});
        break;
    }
    return f;
}

bool is_real(const json& v) { return v.is_number() && std::isfinite(v.get<double>()); }

bool is_complex(const json& v) {
    if (is_real(v)) return true;
    return v.is_array() && v.size() == 2 && is_real(v[0]) && is_real(v[1]);
}

cplx to_complex(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    return {v[0].get<double>(), v[1].get<double>()};
}

bool is_uint(const json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0); }

void check_field(const Field& field, const json& v) {
    const std::string name = field.name;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) invalid("'" + name + "' must be " + what);
    };
    switch (field.type) {
    case FieldType::UInt: expect(is_uint(v), "a nonnegative integer"); break;
    case FieldType::PosUInt: expect(is_uint(v) && v.get<std::uint64_t>() >= 1, "a positive integer"); break;
    case FieldType::Real: expect(is_real(v), "a finite number"); break;
    case FieldType::NonNegReal: expect(is_real(v) && v.get<double>() >= 0.0, "a nonnegative number"); break;
    case FieldType::PosReal: expect(is_real(v) && v.get<double>() > 0.0, "a positive number"); break;
    case FieldType::Complex: expect(is_complex(v), "a number or a [re, im] pair"); break;
    case FieldType::OptComplex: expect(v.is_null() || is_complex(v), "null, a number or a [re, im] pair"); break;
    case FieldType::ComplexList:
        expect(v.is_array(), "a list of numbers or [re, im] pairs");
        for (const auto& e : v) expect(is_complex(e), "a list of numbers or [re, im] pairs");
        break;
    case FieldType::PosRealList:
        expect(v.is_array() && !v.empty(), "a non-empty list of positive numbers");
        for (const auto& e : v) expect(is_real(e) && e.get<double>() > 0.0, "a non-empty list of positive numbers");
        break;
    case FieldType::UIntList:
        expect(v.is_array() && !v.empty(), "a non-empty list of nonnegative integers");
        for (const auto& e : v) expect(is_uint(e), "a non-empty list of nonnegative integers");
        break;
    case FieldType::Init: try { (void)parse_init(v);
        } catch (const Error& e) {
            invalid("'" + name + "': " + e.what());
        }
        break;
    case FieldType::WindowBox:
        expect(v.is_array() && v.size() == 4 && is_real(v[0]) && is_real(v[1]) && is_real(v[2]) && is_real(v[3]),
               "[re_min, re_max, im_min, im_max]");
        expect(v[0].get<double>() < v[1].get<double>() && v[2].get<double>() < v[3].get<double>(),
               "a window with re_min < re_max and im_min < im_max");
        break;
    case FieldType::String: expect(v.is_string(), "a string"); break;
    case FieldType::Bool: expect(v.is_boolean(), "a boolean"); break;
    case FieldType::Scheme:
        expect(v.is_string() && (v == "auto" || v == "euler" || v == "group-exponential"),
               "one of \"auto\", \"euler\", \"group-exponential\"");
        break;
    }
}

void cross_check(ExperimentKind kind, const ExperimentSpec& spec) {
    const auto& p = spec.params();
    if (p.contains("rho") && p.contains("zeta")) {
        try {
            (void)EllipticParams::from_rho_zeta(spec.real("rho"), spec.complex("zeta"));
        } catch (const Error& e) {
            invalid(std::string("driver parameters: ") + e.what());
        }
    }
    if (p.contains("scheme") && spec.scheme() == StepScheme::GroupExponential &&
        !EllipticParams::from_rho_zeta(spec.real("rho"), spec.complex("zeta")).degenerate())
        invalid("scheme 'group-exponential' needs |zeta| = rho");
    if (kind == ExperimentKind::VerifyRefinement) {
        const auto lv = spec.uints("levels");
        if (lv.size() != 2 || lv[0] < 1 || lv[0] + 1 > lv[1] || lv[1] > 20)
            invalid("'levels' must be [first, last] with 1 <= first < last <= 20");
    }
    if (kind == ExperimentKind::VerifyMoments && spec.uint("level") > 30) invalid("'level' must be <= 30");
    if (kind == ExperimentKind::VerifyInverse)
        for (auto k : spec.uints("k_list"))
            if (k == 0) invalid("'k_list' entries must be positive");
    if (kind == ExperimentKind::SdCheck) {
        if (spec.uint("index") > spec.uint("nvars")) invalid("'index' must not exceed 'nvars'");
        if (spec.uint("N") < 2 || spec.uint("trials") < 2) invalid("sd-check needs N >= 2 and trials >= 2");
    }
    if (kind == ExperimentKind::VerifyWegner) {
        const auto zs = spec.complexes("z");
        if (zs.empty()) invalid("'z' must not be empty");
        for (cplx w : spec.complexes("outside"))
            if (std::find(zs.begin(), zs.end(), w) == zs.end())
                invalid("every 'outside' point must also appear in 'z'");
    }
    if (kind == ExperimentKind::Boundary || kind == ExperimentKind::Figure)
        if (spec.real("h") > 1.0) invalid("'h' must be <= 1");
}

} // namespace

std::string_view to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames)
        if (n == name) return k;
    invalid("unknown experiment kind '" + std::string(name) + "'");
}

std::vector<std::string_view> kind_names() {
    std::vector<std::string_view> out;
    for (const auto& [k, n] : kKindNames) out.push_back(n);
    return out;
}

ExperimentSpec ExperimentSpec::parse(ExperimentKind kind, const nlohmann::json& config) {
    if (!config.is_object()) invalid("configuration must be a JSON object");
    const auto fields = schema(kind);
    for (const auto& [key, value] : config.items()) {
        if (key == "kind") {
            if (!value.is_string() || value.get<std::string>() != to_string(kind))
                invalid("'kind' in the configuration does not match the requested experiment");
            continue;
        }
        bool known = false;
        for (const auto& f : fields) known |= key == f.name;
        if (!known) invalid("unknown key '" + key + "' for kind " + std::string(to_string(kind)));
    }
    ExperimentSpec spec;
    spec.kind_ = kind;
    spec.params_["kind"] = to_string(kind);
    for (const auto& f : fields) {
        const bool given = config.contains(f.name);
        const ordered_json value = given ? ordered_json(config.at(f.name)) : f.fallback;
        check_field(f, json(value));
        spec.params_[f.name] = value;
    }
    cross_check(kind, spec);
    return spec;
}

bool ExperimentSpec::has(const std::string& key) const { return params_.contains(key) && !params_.at(key).is_null(); }

std::uint64_t ExperimentSpec::uint(const std::string& key) const { return params_.at(key).get<std::uint64_t>(); }

double ExperimentSpec::real(const std::string& key) const { return params_.at(key).get<double>(); }

cplx ExperimentSpec::complex(const std::string& key) const { return to_complex(json(params_.at(key))); }

bool ExperimentSpec::flag(const std::string& key) const { return params_.at(key).get<bool>(); }

std::string ExperimentSpec::text(const std::string& key) const { return params_.at(key).get<std::string>(); }

std::vector<double> ExperimentSpec::reals(const std::string& key) const {
    return params_.at(key).get<std::vector<double>>();
}

std::vector<std::uint64_t> ExperimentSpec::uints(const std::string& key) const {
    return params_.at(key).get<std::vector<std::uint64_t>>();
}

std::vector<cplx> ExperimentSpec::complexes(const std::string& key) const {
    std::vector<cplx> out;
    for (const auto& e : params_.at(key)) out.push_back(to_complex(json(e)));
    return out;
}

InitialCondition ExperimentSpec::init(const std::string& key) const { return parse_init(json(params_.at(key))); }

Window ExperimentSpec::window(const std::string& key) const {
    const auto& v = params_.at(key);
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
}

StepScheme ExperimentSpec::scheme() const {
    const std::string s = text("scheme");
    if (s == "euler") return StepScheme::Euler;
    if (s == "group-exponential") return StepScheme::GroupExponential;
    return StepScheme::Auto;
}

void ExperimentSpec::set_seed(std::uint64_t seed) { params_["seed"] = seed; }

void ExperimentSpec::set_out(const std::string& dir) { params_["out"] = dir; }

InitialCondition parse_init(const nlohmann::json& j) {
    auto bad = [](const std::string& what) { fail(ErrorCode::ValidationError, "init: " + what); };
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) bad("needs a string 'type'");
    const std::string type = j.at("type");
    InitialCondition init;
    std::vector<std::string> allowed{"type", "haar_conjugate"};
    if (type == "identity") {
        init.kind = IdentityInit{};
    } else if (type == "roots_of_unity") {
        allowed.push_back("k");
        if (!j.contains("k") || !is_uint(j.at("k")) || j.at("k").get<std::uint64_t>() < 1)
            bad("roots_of_unity needs a positive integer 'k'");
        init.kind = RootsOfUnityInit{j.at("k").get<std::size_t>()};
    } else if (type == "atomic") {
        allowed.push_back("atoms");
        if (!j.contains("atoms") || !j.at("atoms").is_array() || j.at("atoms").empty())
            bad("atomic needs a non-empty 'atoms' list of [re, im, weight]");
        AtomicNormalInit a;
        for (const auto& e : j.at("atoms")) {
            if (!e.is_array() || e.size() != 3 || !is_real(e[0]) || !is_real(e[1]) || !is_real(e[2]))
                bad("each atom must be [re, im, weight]");
            a.atoms.emplace_back(cplx{e[0].get<double>(), e[1].get<double>()}, e[2].get<double>());
        }
        init.kind = std::move(a);
    } else if (type == "block") {
        allowed.push_back("block");
        if (!j.contains("block") || !j.at("block").is_array() || j.at("block").size() != 4)
            bad("block needs four entries [b00, b01, b10, b11]");
        NonNormalBlockInit b;
        for (std::size_t k = 0; k < 4; ++k) {
            if (!is_complex(j.at("block")[k])) bad("block entries must be numbers or [re, im] pairs");
            b.block[k] = to_complex(j.at("block")[k]);
        }
        init.kind = b;
    } else if (type == "explicit") {
        allowed.push_back("entries");
        if (!j.contains("entries") || !j.at("entries").is_array()) bad("explicit needs row-major 'entries'");
        const auto& e = j.at("entries");
        const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(e.size()))));
        if (n == 0 || n * n != e.size()) bad("explicit 'entries' must hold N*N values");
        std::vector<cplx> vals;
        for (const auto& v : e) {
            if (!is_complex(v)) bad("explicit entries must be numbers or [re, im] pairs");
            vals.push_back(to_complex(v));
        }
        init.kind = ExplicitInit{ComplexMatrix(n, std::move(vals))};
    } else {
        bad("unknown type '" + type + "'");
    }
    if (j.contains("haar_conjugate")) {
        if (!j.at("haar_conjugate").is_boolean()) bad("'haar_conjugate' must be a boolean");
        init.haar_conjugate = j.at("haar_conjugate").get<bool>();
    }
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const auto& a : allowed) ok |= key == a;
        if (!ok) bad("unknown key '" + key + "' for type " + type);
    }
    return init;
}

nlohmann::ordered_json init_to_json(const InitialCondition& init) {
    ordered_json j = std::visit(
        [](const auto& spec) -> ordered_json {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, IdentityInit>) {
                return {{"type", "identity"}};
            } else if constexpr (std::is_same_v<T, RootsOfUnityInit>) {
                return {{"type", "roots_of_unity"}, {"k", spec.k}};
            } else if constexpr (std::is_same_v<T, AtomicNormalInit>) {
                ordered_json atoms = ordered_json::array();
                for (const auto& [l, w] : spec.atoms) atoms.push_back({l.real(), l.imag(), w});
                return {{"type", "atomic"}, {"atoms", atoms}};
            } else if constexpr (std::is_same_v<T, NonNormalBlockInit>) {
                ordered_json b = ordered_json::array();
                for (const auto& v : spec.block) b.push_back({v.real(), v.imag()});
                return {{"type", "block"}, {"block", b}};
            } else {
                ordered_json e = ordered_json::array();
                for (const auto& v : spec.matrix.entries()) e.push_back({v.real(), v.imag()});
                return {{"type", "explicit"}, {"entries", e}};
            }
        },
        init.kind);
    if (init.haar_conjugate) j["haar_conjugate"] = true;
    return j;
}

} // namespace glbm::harness
