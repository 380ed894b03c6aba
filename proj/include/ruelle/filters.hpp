#pragma once

// Wavelet filter ingestion, builtin constructions and validation of the
// standing hypotheses: Lipschitz regularity, finitely many zeros, the QMF
// identity R1 = 1 and the normalization m0(1) = sqrt(N).

#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "ruelle/errors.hpp"
#include "ruelle/lpoly.hpp"

namespace ruelle {

struct FilterValidation {
    bool validated = false;
    bool lipschitz_ok = false;
    bool finite_zeros_ok = false;
    bool qmf_ok = false;
    bool normalized_at_one_ok = false;
    double qmf_residual = 0.0;
    double normalization_residual = 0.0;

    bool all_ok() const {
        return lipschitz_ok && finite_zeros_ok && qmf_ok && normalized_at_one_ok;
    }
};

struct FilterSpec {
    int scale_N = 2;
    LaurentPoly m0;
    std::string name;
    FilterValidation validation;
};

inline constexpr double default_qmf_tol = 1e-10;

// qmf_ok iff the autocorrelation c of m0 satisfies c_{N m} = delta_{m,0}
// (this is exactly R_{m0,m0} 1 = 1); normalized_at_one_ok iff m0(1) = sqrt(N).
// Any nonzero trigonometric polynomial is Lipschitz with finitely many zeros.
inline FilterSpec validate(FilterSpec spec, double tol = default_qmf_tol) {
    if (spec.m0.is_zero()) throw DegenerateInput("validate: zero filter polynomial");
    FilterValidation v;
    v.lipschitz_ok = true;
    v.finite_zeros_ok = true;

    LaurentPoly corr = cross_correlation(spec.m0, spec.m0);
    double qmf_res = 0.0;
    const int N = spec.scale_N;
    int m_lo = corr.degree_min() / N - 1;
    int m_hi = corr.degree_max() / N + 1;
    for (int m = m_lo; m <= m_hi; ++m) {
        cplx target = (m == 0) ? cplx{1.0} : cplx{0.0};
        qmf_res = std::max(qmf_res, std::abs(corr.coeff(N * m) - target));
    }
    v.qmf_residual = qmf_res;
    v.qmf_ok = qmf_res <= tol;

    v.normalization_residual =
        std::abs(eval(spec.m0, CirclePoint::one()) - cplx{std::sqrt(double(N))});
    v.normalized_at_one_ok = v.normalization_residual <= tol;

    v.validated = true;
    spec.validation = v;
    return spec;
}

// ---------------------------------------------------------------------------
// Builtins

inline FilterSpec builtin_haar() {
    const double c = 1.0 / std::sqrt(2.0);
    FilterSpec f;
    f.scale_N = 2;
    f.name = "haar";
    f.m0 = LaurentPoly({{0, c}, {1, c}});
    return validate(std::move(f));
}

// (1 + z^m)/sqrt(2), m odd >= 3
inline FilterSpec builtin_stretched_haar(int m) {
    if (m < 3 || m % 2 == 0)
        throw InvalidParam("stretched_haar: stretch must be odd and >= 3, got " +
                           std::to_string(m));
    const double c = 1.0 / std::sqrt(2.0);
    FilterSpec f;
    f.scale_N = 2;
    f.name = "stretched_haar_" + std::to_string(m);
    f.m0 = LaurentPoly({{0, c}, {m, c}});
    return validate(std::move(f));
}

inline FilterSpec builtin_daubechies4() {
    // (1+sqrt 3, 3+sqrt 3, 3-sqrt 3, 1-sqrt 3)/(4 sqrt 2), radicals evaluated
    // at 17 significant digits
    FilterSpec f;
    f.scale_N = 2;
    f.name = "daubechies4";
    f.m0 = LaurentPoly({{0, 0.48296291314469025},
                        {1, 0.83651630373746899},
                        {2, 0.22414386804185735},
                        {3, -0.12940952255092145}});
    return validate(std::move(f));
}

inline FilterSpec builtin(const std::string& name, int param = 0) {
    if (name == "haar") return builtin_haar();
    if (name == "stretched_haar") return builtin_stretched_haar(param == 0 ? 3 : param);
    if (name == "daubechies4") return builtin_daubechies4();
    throw UnknownFilter("unknown builtin filter: " + name);
}

// ---------------------------------------------------------------------------
// JSON persistence
//
// Schema: {"name": string, "N": int, "offset": int, "coeffs": [[re, im], ...]}
// with a_{offset + j} = coeffs[j].

inline nlohmann::json to_json(const FilterSpec& spec) {
    nlohmann::json j;
    j["name"] = spec.name;
    j["N"] = spec.scale_N;
    int offset = spec.m0.degree_min();
    j["offset"] = offset;
    auto coeffs = nlohmann::json::array();
    for (int k = offset; k <= spec.m0.degree_max(); ++k) {
        cplx c = spec.m0.coeff(k);
        coeffs.push_back({c.real(), c.imag()});
    }
    j["coeffs"] = coeffs;
    return j;
}

inline FilterSpec filter_from_json(const nlohmann::json& j) {
    for (const char* field : {"name", "N", "offset", "coeffs"})
        if (!j.contains(field)) throw SchemaError(std::string("filter JSON: missing field '") + field + "'");
    if (!j["coeffs"].is_array()) throw SchemaError("filter JSON: 'coeffs' must be an array");
    FilterSpec f;
    f.name = j["name"].get<std::string>();
    f.scale_N = j["N"].get<int>();
    if (f.scale_N < 2) throw SchemaError("filter JSON: N must be >= 2");
    int offset = j["offset"].get<int>();
    std::map<int, cplx> coeffs;
    int k = offset;
    for (const auto& c : j["coeffs"]) {
        if (!c.is_array() || c.size() != 2)
            throw SchemaError("filter JSON: coefficients must be [re, im] pairs");
        coeffs[k++] = cplx{c[0].get<double>(), c[1].get<double>()};
    }
    f.m0 = LaurentPoly(std::move(coeffs));
    if (f.m0.is_zero()) throw SchemaError("filter JSON: zero filter polynomial");
    return f;
}

inline void save(const FilterSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << to_json(spec).dump(2) << "\n";
}

inline FilterSpec load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("filter JSON: ") + e.what());
    }
    return filter_from_json(j);
}

}  // namespace ruelle
