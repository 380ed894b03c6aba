#pragma once

// Machine-readable analysis reports: the full pipeline (validate -> cycles ->
// transfer matrix -> peripheral spectrum -> verification -> Lawton/Cohen ->
// optional cascade cross-check) serialized as deterministic JSON. Complex
// numbers are [re, im] pairs; snapped angles are exact rationals (a, b)
// meaning 2 pi a / b.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ruelle/cascade.hpp"
#include "ruelle/cycles.hpp"
#include "ruelle/filters.hpp"
#include "ruelle/peripheral.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle {

inline constexpr const char* version_string = "1.0.0";

struct AnalyzeOptions {
    int p_max = 20;
    double qmf_tol = default_qmf_tol;
    double cycle_tol = 1e-8;
    double rank_tol = 1e-9;
    int grid = 1024;
    std::uint64_t seed = 0x52554C45;
    bool crosscheck = false;
};

namespace detail {

inline nlohmann::json json_cplx(cplx c) { return {c.real(), c.imag()}; }

inline nlohmann::json json_point(const CirclePoint& p) {
    nlohmann::json j;
    if (p.rational_angle)
        j["angle"] = {p.rational_angle->num, p.rational_angle->den};
    else
        j["angle_radians"] = p.angle;
    j["value"] = json_cplx(p.value);
    return j;
}

inline nlohmann::json json_poly(const LaurentPoly& p) {
    auto arr = nlohmann::json::array();
    for (const auto& [k, c] : p.coeffs()) arr.push_back({k, c.real(), c.imag()});
    return arr;
}

inline nlohmann::json json_cycle(const Cycle& c) {
    nlohmann::json j;
    j["period"] = c.period_p;
    j["trivial"] = c.is_trivial;
    auto pts = nlohmann::json::array();
    for (const auto& z : c.points) pts.push_back(json_point(z));
    j["points"] = pts;
    j["phases"] = c.phases;
    j["theta_C"] = c.theta_C;
    return j;
}

inline nlohmann::json json_validation(const FilterValidation& v) {
    nlohmann::json j;
    j["lipschitz_ok"] = v.lipschitz_ok;
    j["finite_zeros_ok"] = v.finite_zeros_ok;
    j["qmf_ok"] = v.qmf_ok;
    j["normalized_at_one_ok"] = v.normalized_at_one_ok;
    j["qmf_residual"] = v.qmf_residual;
    j["normalization_residual"] = v.normalization_residual;
    j["all_ok"] = v.all_ok();
    return j;
}

// default cascade start: the averaging box whose translates form a partition
// of unity over the limit support [a_min/(N-1), a_max/(N-1)]
inline GridFunction cascade_start_for(const FilterSpec& f) {
    int span = f.m0.degree_max() - f.m0.degree_min();
    int width = std::max(1, (span + f.scale_N - 2) / (f.scale_N - 1));
    return GridFunction::box(width);
}

}  // namespace detail

struct AnalysisResult {
    nlohmann::json report;
    bool validation_ok = false;
    bool invariants_ok = false;  // Lawton/Cohen equivalence + finite residuals
};

inline AnalysisResult analyze(FilterSpec spec, const AnalyzeOptions& opt = {}) {
    AnalysisResult result;
    nlohmann::json& rep = result.report;
    rep["schema"] = "1";
    rep["provenance"] = {{"seed", opt.seed},
                         {"version", version_string},
                         {"tolerances",
                          {{"qmf_tol", opt.qmf_tol},
                           {"cycle_tol", opt.cycle_tol},
                           {"rank_tol", opt.rank_tol}}},
                         {"p_max", opt.p_max},
                         {"grid", opt.grid}};

    spec = validate(std::move(spec), opt.qmf_tol);
    rep["filter"] = to_json(spec);
    rep["validation"] = detail::json_validation(spec.validation);
    result.validation_ok = spec.validation.all_ok();
    if (!result.validation_ok) {
        rep["error"] = "filter failed validation; analysis requires R1 = 1 and m0(1) = sqrt(N)";
        return result;
    }

    CycleOptions copt;
    copt.cycle_tol = opt.cycle_tol;
    copt.p_max = opt.p_max;
    CycleReport cycles = find_cycles(spec, copt);
    auto jc = nlohmann::json::array();
    for (const Cycle& c : cycles.cycles) jc.push_back(detail::json_cycle(c));
    rep["cycles"] = jc;
    auto jn = nlohmann::json::array();
    for (const CirclePoint& z : cycles.near_cycles) jn.push_back(detail::json_point(z));
    rep["near_cycles"] = jn;

    TransferOperator op = TransferOperator::build(spec);
    rep["window"] = {{"d_star", op.d_star()}, {"d", op.window()}, {"dim", op.dim()}};

    PeripheralSpectrum sp = build_spectrum(op, cycles.cycles, opt.rank_tol);
    auto je = nlohmann::json::array();
    for (const Eigenvalue& e : sp.eigenvalues) je.push_back({e.a, e.b});
    rep["eigenvalues"] = je;

    nlohmann::json funcs;
    for (std::size_t i = 0; i < sp.cycles.size(); ++i) {
        funcs["h_C" + std::to_string(i + 1)] = detail::json_poly(sp.h_funcs[i]);
        for (int k = 0; k < sp.cycles[i].period_p; ++k)
            funcs["g" + std::to_string(k + 1) + "_C" + std::to_string(i + 1)] =
                detail::json_poly(sp.g_funcs[i][static_cast<std::size_t>(k)]);
    }
    for (const auto& [key, h] : sp.h_lambda) {
        const Eigenvalue& e = sp.eigenvalues[key.first];
        funcs["h_C" + std::to_string(key.second + 1) + "_lambda_" + std::to_string(e.a) + "_" +
              std::to_string(e.b)] = detail::json_poly(h);
    }
    rep["eigenfunctions"] = funcs;

    LawtonCohenReport lc = lawton_cohen_report(sp);
    rep["lawton_cohen"] = {{"cohen_holds", lc.cohen_holds},
                           {"lawton_holds", lc.lawton_holds},
                           {"equivalent", lc.equivalent},
                           {"n_cycles", lc.n_cycles},
                           {"dim_fixed_space", lc.dim_fixed_space}};

    VerificationReport ver = verify_spectrum(op, sp, opt.grid, opt.seed);
    rep["verification"] = {{"g_shift", ver.g_shift},
                           {"g_delta", ver.g_delta},
                           {"h_negativity", ver.h_negativity},
                           {"h_vanish_other", ver.h_vanish_other},
                           {"cesaro_vs_nu", ver.cesaro_vs_nu},
                           {"cesaro_not_converged", ver.cesaro_not_converged},
                           {"nu_intertwine", ver.nu_intertwine},
                           {"partition_of_unity", ver.partition_of_unity}};

    double decay = estimate_residual_decay(op, sp, 8, 24, opt.seed);
    rep["diagnostics"] = {{"residual_decay", decay},
                          {"nu_gram_condition", sp.diagnostics.nu_gram_condition}};
    auto jd = nlohmann::json::array();
    for (const auto& [l, dim] : sp.diagnostics.eigenspace_dims)
        jd.push_back({sp.eigenvalues[l].a, sp.eigenvalues[l].b, dim});
    rep["diagnostics"]["eigenspace_dims"] = jd;

    if (opt.crosscheck) {
        CascadeResult cas = cascade_fixed_point(spec, 12, detail::cascade_start_for(spec));
        LaurentPoly time_h = autocorrelation_h(cas.phi);
        double coeff_disc = 0;
        LaurentPoly diff = time_h - sp.h_funcs[0];
        coeff_disc = diff.linf_coeff_norm();
        CrosscheckReport fr =
            crosscheck_h(spec, sp.cycles[0], sp, 30, 2000, {0.1, 1.0, 2.5});
        rep["crosscheck"] = {{"time_domain_coeff_discrepancy", coeff_disc},
                             {"frequency_max_discrepancy", fr.max_discrepancy},
                             {"frequency_max_tail_estimate", fr.max_tail_estimate},
                             {"cascade_final_distance", cas.successive_distances.back()}};
    }

    bool finite = true;
    for (const auto& [k, v] : rep["verification"].items())
        if (v.is_number() && !std::isfinite(v.get<double>())) finite = false;
    result.invariants_ok = lc.equivalent && finite && ver.h_negativity <= 1e-8;
    rep["status"] = result.invariants_ok ? "ok" : "invariant_violated";
    return result;
}

}  // namespace ruelle
