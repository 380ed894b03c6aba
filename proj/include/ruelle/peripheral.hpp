#pragma once

// Peripheral spectral analysis of the transfer operator: every eigenvalue of
// modulus one is a root of unity whose order divides some cycle period, the
// eigenspace for lambda is spanned by the cycle eigenfunctions h^lambda_{C_i}
// normalized against the weighted point masses nu_i^lambda, and the g / h
// families are recovered from these by a finite inverse DFT over the roots
// of unity of each cycle period.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "ruelle/cycles.hpp"
#include "ruelle/errors.hpp"
#include "ruelle/lpoly.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle {

// root of unity e^{2 pi i a/b}, gcd(a, b) = 1
struct Eigenvalue {
    std::int64_t a = 0;
    std::int64_t b = 1;
    cplx value{1.0, 0.0};

    static Eigenvalue from_rational(std::int64_t a, std::int64_t b) {
        std::int64_t g = std::gcd(a, b);
        a /= g;
        b /= g;
        Eigenvalue e;
        e.a = a;
        e.b = b;
        e.value = std::polar(1.0, two_pi * double(a) / double(b));
        return e;
    }

    bool is_unit_for_period(int p) const { return p % b == 0; }  // lambda^p = 1

    cplx power(std::int64_t k) const {
        std::int64_t r = (a * (k % b)) % b;
        if (r < 0) r += b;
        return std::polar(1.0, two_pi * double(r) / double(b));
    }

    bool operator<(const Eigenvalue& o) const { return a * o.b < o.a * b; }
    bool operator==(const Eigenvalue& o) const { return a == o.a && b == o.b; }
};

// union over cycles of the p_i-th roots of unity, deduplicated, sorted by
// angle with 1 first
inline std::vector<Eigenvalue> candidate_eigenvalues(const std::vector<Cycle>& cycles) {
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    std::vector<Eigenvalue> out;
    for (const Cycle& c : cycles) {
        for (int k = 0; k < c.period_p; ++k) {
            Eigenvalue e = Eigenvalue::from_rational(k, c.period_p);
            if (seen.insert({e.a, e.b}).second) out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// basis of null(matrix - lambda I) from the SVD of the window matrix, with
// relative rank threshold
inline std::vector<LaurentPoly> eigenspace(const TransferOperator& op, cplx lambda,
                                           double rank_tol = 1e-9) {
    const int n = op.dim();
    Eigen::MatrixXcd shifted = op.matrix() - lambda * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    std::vector<LaurentPoly> basis;
    for (int j = n - 1; j >= 0; --j) {
        if (sv(j) <= rank_tol * std::max(smax, 1.0))
            basis.push_back(op.window_to_poly(svd.matrixV().col(j)));
        else
            break;
    }
    return basis;
}

// nu_i^lambda(f) = (1/p) sum_k lambda^{k-1} f(z_k)
inline cplx nu_apply(const Cycle& cycle, cplx lambda, const LaurentPoly& f) {
    const int p = cycle.period_p;
    cplx lam_pow = std::pow(lambda, p);
    if (std::abs(lam_pow - cplx{1.0}) > 1e-10)
        throw EigenvalueMismatch("nu_apply: lambda^p != 1 for this cycle");
    cplx s = 0;
    cplx lk = 1.0;
    for (int k = 0; k < p; ++k) {
        s += lk * eval(f, cycle.points[k]);
        lk *= lambda;
    }
    return s / double(p);
}

struct SpectrumDiagnostics {
    double nu_gram_condition = 1.0;  // worst condition of the nu-normalization solve
    double residual_decay = -1.0;    // filled by estimate_residual_decay
    std::map<std::size_t, int> eigenspace_dims;  // eigenvalue index -> dimension
};

struct PeripheralSpectrum {
    std::vector<Cycle> cycles;
    std::vector<Eigenvalue> eigenvalues;
    // g_funcs[i][k-1] = g_{k, C_i}; permuted cyclically by R
    std::vector<std::vector<LaurentPoly>> g_funcs;
    // h_funcs[i] = h_{C_i} = sum_k g_{k, C_i}; fixed points, partition of unity
    std::vector<LaurentPoly> h_funcs;
    // (eigenvalue index, cycle index) -> h^lambda_{C_i}
    std::map<std::pair<std::size_t, std::size_t>, LaurentPoly> h_lambda;
    SpectrumDiagnostics diagnostics;

    std::vector<std::size_t> cycles_for(std::size_t lambda_idx) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < cycles.size(); ++i)
            if (eigenvalues[lambda_idx].is_unit_for_period(cycles[i].period_p)) out.push_back(i);
        return out;
    }

    // T_lambda f = sum_{i in I(lambda)} nu_i^lambda(f) h^lambda_{C_i}
    LaurentPoly project(std::size_t lambda_idx, const LaurentPoly& f) const {
        LaurentPoly out;
        for (std::size_t i : cycles_for(lambda_idx))
            out += nu_apply(cycles[i], eigenvalues[lambda_idx].value, f) *
                   h_lambda.at({lambda_idx, i});
        return out;
    }
};

inline PeripheralSpectrum build_spectrum(const TransferOperator& op,
                                         const std::vector<Cycle>& cycles,
                                         double rank_tol = 1e-9) {
    if (cycles.empty()) throw InvalidParam("build_spectrum: no cycles (is m0(1) = sqrt(N)?)");
    PeripheralSpectrum sp;
    sp.cycles = cycles;
    sp.eigenvalues = candidate_eigenvalues(cycles);

    for (std::size_t l = 0; l < sp.eigenvalues.size(); ++l) {
        const Eigenvalue& lam = sp.eigenvalues[l];
        std::vector<LaurentPoly> basis = eigenspace(op, lam.value, rank_tol);
        std::vector<std::size_t> index_set = sp.cycles_for(l);
        if (basis.size() != index_set.size())
            throw DimensionMismatch(
                "build_spectrum: eigenspace dim " + std::to_string(basis.size()) +
                " != cycle count " + std::to_string(index_set.size()) + " for eigenvalue " +
                std::to_string(lam.a) + "/" + std::to_string(lam.b));
        sp.diagnostics.eigenspace_dims[l] = static_cast<int>(basis.size());

        const int dim = static_cast<int>(basis.size());
        // normalize: nu_j^lambda(h^lambda_{C_i}) = delta_{ij}
        Eigen::MatrixXcd M(dim, dim);
        for (int j = 0; j < dim; ++j)
            for (int b = 0; b < dim; ++b)
                M(j, b) = nu_apply(sp.cycles[index_set[j]], lam.value, basis[b]);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
        double cond = svd.singularValues()(0) / svd.singularValues()(dim - 1);
        sp.diagnostics.nu_gram_condition = std::max(sp.diagnostics.nu_gram_condition, cond);
        if (cond > 1e8)
            throw IllConditioned("build_spectrum: nu-normalization condition " +
                                 std::to_string(cond));
        Eigen::MatrixXcd X = M.fullPivLu().solve(Eigen::MatrixXcd::Identity(dim, dim));
        for (int i = 0; i < dim; ++i) {
            LaurentPoly h;
            for (int b = 0; b < dim; ++b) h += X(b, i) * basis[b];
            sp.h_lambda[{l, index_set[i]}] = h;
        }
    }

    // g_{k,i} = (1/p_i) sum_{lambda^{p_i}=1} lambda^{k-1} h^lambda_{C_i}
    // (finite inverse DFT of h^lambda = sum_k lambda^{-k+1} g_k)
    sp.g_funcs.resize(cycles.size());
    sp.h_funcs.resize(cycles.size());
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const int p = cycles[i].period_p;
        sp.g_funcs[i].resize(p);
        for (int k = 1; k <= p; ++k) {
            LaurentPoly g;
            for (std::size_t l = 0; l < sp.eigenvalues.size(); ++l) {
                if (!sp.eigenvalues[l].is_unit_for_period(p)) continue;
                g += sp.eigenvalues[l].power(k - 1) * sp.h_lambda.at({l, i});
            }
            g *= cplx{1.0 / p};
            sp.g_funcs[i][k - 1] = g;
        }
        LaurentPoly h;
        for (int k = 0; k < p; ++k) h += sp.g_funcs[i][k];
        sp.h_funcs[i] = h;
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Fixed-point decomposition: h = sum alpha_i h_{C_i} with alpha_i = h|_{C_i}

struct FixedPointDecomposition {
    std::vector<cplx> alpha;
    double reconstruction_residual = 0.0;
};

inline FixedPointDecomposition decompose_fixed_point(const TransferOperator& op,
                                                     const PeripheralSpectrum& sp,
                                                     const LaurentPoly& h) {
    if (sup_grid_norm(op.apply(h) - h) > 1e-8)
        throw NotAFixedPoint("decompose_fixed_point: R h != h");
    FixedPointDecomposition out;
    LaurentPoly recon;
    for (std::size_t i = 0; i < sp.cycles.size(); ++i) {
        const Cycle& c = sp.cycles[i];
        cplx a = eval(h, c.points[0]);
        for (int k = 1; k < c.period_p; ++k)
            if (std::abs(eval(h, c.points[k]) - a) > 1e-8)
                throw NotCycleConstant("decompose_fixed_point: h not constant on cycle " +
                                       std::to_string(i));
        out.alpha.push_back(a);
        recon += a * sp.h_funcs[i];
    }
    out.reconstruction_residual = sup_grid_norm(h - recon);
    return out;
}

// ---------------------------------------------------------------------------
// Product on the fixed-point algebra: h1 * h2 = lim R^n(h1 h2)

inline LaurentPoly transfer_product(const TransferOperator& op, const LaurentPoly& h1,
                                    const LaurentPoly& h2, double tol = 1e-9,
                                    int n_max = 8192) {
    if (sup_grid_norm(op.apply(h1) - h1) > 1e-8 || sup_grid_norm(op.apply(h2) - h2) > 1e-8)
        throw NotAFixedPoint("transfer_product: factors must be fixed points of R");
    LaurentPoly cur = h1 * h2;
    for (int n = 0; n < n_max; ++n) {
        LaurentPoly next = op.apply(cur);
        if (sup_grid_norm(next - cur) <= tol) return next;
        cur = next;
    }
    throw NotConverged("transfer_product: no convergence after " + std::to_string(n_max) +
                       " iterations, last residual " +
                       std::to_string(sup_grid_norm(op.apply(cur) - cur)));
}

// ---------------------------------------------------------------------------
// Lawton / Cohen report

struct LawtonCohenReport {
    bool cohen_holds = false;   // exactly one cycle and it is trivial
    bool lawton_holds = false;  // 1 is a simple eigenvalue
    bool equivalent = false;    // the two readouts agree (they must)
    int n_cycles = 0;
    int dim_fixed_space = 0;
};

inline LawtonCohenReport lawton_cohen_report(const PeripheralSpectrum& sp) {
    LawtonCohenReport r;
    r.n_cycles = static_cast<int>(sp.cycles.size());
    r.cohen_holds = r.n_cycles == 1 && sp.cycles[0].is_trivial;
    std::size_t one_idx = 0;
    for (std::size_t l = 0; l < sp.eigenvalues.size(); ++l)
        if (sp.eigenvalues[l].b == 1) one_idx = l;
    r.dim_fixed_space = sp.diagnostics.eigenspace_dims.at(one_idx);
    r.lawton_holds = r.dim_fixed_space == 1;
    r.equivalent = r.cohen_holds == r.lawton_holds;
    return r;
}

// ---------------------------------------------------------------------------
// Verification and decay diagnostics

namespace detail {

inline double uniform_pm1(std::mt19937_64& gen) {
    return 2.0 * ((gen() >> 11) * 0x1.0p-53) - 1.0;
}

inline LaurentPoly random_window_poly(std::mt19937_64& gen, int d) {
    std::map<int, cplx> c;
    for (int k = -d; k <= d; ++k) c[k] = cplx{uniform_pm1(gen), uniform_pm1(gen)};
    return LaurentPoly(std::move(c));
}

}  // namespace detail

struct VerificationReport {
    double g_shift = 0.0;            // R g_k = g_{k+1 mod p}
    double g_delta = 0.0;            // g_{k,i}(z_{l,j}) = delta_{ij} delta_{kl}
    double h_negativity = 0.0;       // -min Re h_{C_i} over the grid (clamped at 0)
    double h_vanish_other = 0.0;     // h_{C_i} on cycles j != i
    double cesaro_vs_nu = 0.0;       // T_lambda f vs sum nu h^lambda
    double cesaro_not_converged = 0; // count of NotConverged projections
    double nu_intertwine = 0.0;      // nu(R f) = lambda nu(f)
    double partition_of_unity = 0.0; // 1 - sum h_{C_i}
    double max_residual() const {
        double m = std::max({g_shift, g_delta, h_negativity, h_vanish_other, nu_intertwine,
                             partition_of_unity});
        return std::max(m, cesaro_vs_nu);
    }
};

inline VerificationReport verify_spectrum(const TransferOperator& op,
                                          const PeripheralSpectrum& sp, int grid_size = 1024,
                                          std::uint64_t seed = 0x52554C45, int n_random = 16) {
    VerificationReport rep;
    const std::size_t n = sp.cycles.size();

    for (std::size_t i = 0; i < n; ++i) {
        const int p = sp.cycles[i].period_p;
        for (int k = 0; k < p; ++k) {
            rep.g_shift = std::max(
                rep.g_shift,
                sup_grid_norm(op.apply(sp.g_funcs[i][k]) - sp.g_funcs[i][(k + 1) % p],
                              grid_size));
            for (std::size_t j = 0; j < n; ++j)
                for (int l = 0; l < sp.cycles[j].period_p; ++l) {
                    cplx v = eval(sp.g_funcs[i][k], sp.cycles[j].points[l]);
                    cplx want = (i == j && k == l) ? cplx{1.0} : cplx{0.0};
                    rep.g_delta = std::max(rep.g_delta, std::abs(v - want));
                }
        }
        for (int t = 0; t < grid_size; ++t) {
            double v = eval(sp.h_funcs[i], std::polar(1.0, two_pi * t / grid_size)).real();
            rep.h_negativity = std::max(rep.h_negativity, -v);
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            for (const CirclePoint& z : sp.cycles[j].points)
                rep.h_vanish_other = std::max(rep.h_vanish_other, std::abs(eval(sp.h_funcs[i], z)));
        }
    }

    LaurentPoly partition;
    for (std::size_t i = 0; i < n; ++i) partition += sp.h_funcs[i];
    partition -= LaurentPoly::constant(1.0);
    rep.partition_of_unity = std::max(partition.l1_norm(), 0.0);

    std::mt19937_64 gen(seed);
    for (int trial = 0; trial < n_random; ++trial) {
        LaurentPoly f = detail::random_window_poly(gen, op.window());
        LaurentPoly rf = op.apply(f);
        for (std::size_t l = 0; l < sp.eigenvalues.size(); ++l) {
            cplx lam = sp.eigenvalues[l].value;
            CesaroResult ces = cesaro_project(op, f, lam);
            if (!ces.converged) rep.cesaro_not_converged += 1;
            rep.cesaro_vs_nu =
                std::max(rep.cesaro_vs_nu, sup_grid_norm(ces.value - sp.project(l, f), grid_size));
            for (std::size_t i : sp.cycles_for(l)) {
                cplx lhs = nu_apply(sp.cycles[i], lam, rf);
                cplx rhs = lam * nu_apply(sp.cycles[i], lam, f);
                rep.nu_intertwine = std::max(rep.nu_intertwine, std::abs(lhs - rhs));
            }
        }
    }
    return rep;
}

// Geometric decay ratio of the non-peripheral remainder: subtract
// sum lambda^k T_lambda f from R^k f for random window polynomials and track
// the tail ratio. A value < 1 certifies numerically that no peripheral
// eigenvalue was missed.
inline double estimate_residual_decay(const TransferOperator& op, const PeripheralSpectrum& sp,
                                      int trials = 8, int n = 24,
                                      std::uint64_t seed = 0x52554C45) {
    std::mt19937_64 gen(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        LaurentPoly f = detail::random_window_poly(gen, op.window());
        std::vector<LaurentPoly> proj(sp.eigenvalues.size());
        for (std::size_t l = 0; l < sp.eigenvalues.size(); ++l) proj[l] = sp.project(l, f);
        LaurentPoly rk = f;
        double prev_norm = -1.0;
        for (int k = 1; k <= n; ++k) {
            rk = op.apply(rk);
            LaurentPoly residual = rk;
            for (std::size_t l = 0; l < sp.eigenvalues.size(); ++l)
                residual -= sp.eigenvalues[l].power(k) * proj[l];
            double norm = sup_grid_norm(residual);
            if (k > n / 2 && prev_norm > 1e-12) worst = std::max(worst, norm / prev_norm);
            prev_norm = norm;
        }
    }
    return worst;
}

}  // namespace ruelle
