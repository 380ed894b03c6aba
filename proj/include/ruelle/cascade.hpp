#pragma once

// Time-domain cascade iteration for the scaling function, truncated infinite
// products for the frequency-side phi functions, periodization and the
// cross-checks that bridge the wavelet side to the eigenvector-derived h
// functions. Grid functions are piecewise constant on a uniform lattice of
// step 1/M, which the cascade operator maps exactly to step 1/(M N).

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "ruelle/cycles.hpp"
#include "ruelle/errors.hpp"
#include "ruelle/filters.hpp"
#include "ruelle/lpoly.hpp"
#include "ruelle/peripheral.hpp"

namespace ruelle {

struct GridFunction {
    std::vector<cplx> samples;  // value on the cell [origin + i*step, origin + (i+1)*step)
    double origin = 0.0;
    double step = 1.0;
    std::pair<double, double> support_hint{0.0, 1.0};

    // denominator M with step = 1/M
    std::int64_t inv_step() const {
        double m = 1.0 / step;
        auto mi = static_cast<std::int64_t>(std::llround(m));
        if (mi <= 0 || std::abs(m - double(mi)) > 1e-9 * m)
            throw GridMismatch("grid step must be the reciprocal of an integer");
        return mi;
    }

    cplx at(double x) const {
        double idx = (x - origin) / step;
        auto i = static_cast<std::int64_t>(std::floor(idx + 1e-9));
        if (i < 0 || i >= static_cast<std::int64_t>(samples.size())) return {};
        return samples[static_cast<std::size_t>(i)];
    }

    static GridFunction unit_box() {
        GridFunction g;
        g.samples = {cplx{1.0}};
        return g;
    }

    // (1/w) chi_{[0,w)}
    static GridFunction box(int width) {
        GridFunction g;
        g.samples.assign(static_cast<std::size_t>(width), cplx{1.0 / width});
        g.support_hint = {0.0, double(width)};
        return g;
    }
};

// M_a psi = sqrt(N) sum_n a_n psi(N x - n), sampled on the refined grid step/N
inline GridFunction cascade_step(const FilterSpec& a, const GridFunction& psi) {
    const int N = a.scale_N;
    const std::int64_t M = psi.inv_step();  // checks the lattice
    const double sqrtN = std::sqrt(double(N));

    const double in_lo = psi.origin;
    const double in_hi = psi.origin + double(psi.samples.size()) * psi.step;
    const int a_min = a.m0.degree_min();
    const int a_max = a.m0.degree_max();

    GridFunction out;
    out.step = psi.step / N;
    out.origin = (in_lo + a_min) / N;
    const double out_hi = (in_hi + a_max) / N;
    const auto len = static_cast<std::size_t>(std::llround((out_hi - out.origin) / out.step));
    out.samples.assign(len, cplx{});
    out.support_hint = {out.origin, out_hi};

    // N x - n lands back on the coarse lattice; midpoint sampling keeps the
    // cell lookup away from cell boundaries
    (void)M;
    for (const auto& [n_deg, an] : a.m0.coeffs()) {
        for (std::size_t i = 0; i < len; ++i) {
            double x = out.origin + (double(i) + 0.5) * out.step;
            double y = N * x - double(n_deg);
            double idx = (y - psi.origin) / psi.step;
            auto j = static_cast<std::int64_t>(std::floor(idx));
            if (j >= 0 && j < static_cast<std::int64_t>(psi.samples.size()))
                out.samples[i] += sqrtN * an * psi.samples[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

// L2 distance on the finer of the two lattices
inline double grid_l2_distance(const GridFunction& f, const GridFunction& g) {
    const GridFunction& fine = f.step <= g.step ? f : g;
    const GridFunction& coarse = f.step <= g.step ? g : f;
    double lo = std::min(fine.origin, coarse.origin);
    double hi = std::max(fine.origin + double(fine.samples.size()) * fine.step,
                         coarse.origin + double(coarse.samples.size()) * coarse.step);
    double s = 0;
    auto count = static_cast<std::int64_t>(std::llround((hi - lo) / fine.step));
    for (std::int64_t i = 0; i < count; ++i) {
        double x = lo + (double(i) + 0.5) * fine.step;
        s += std::norm(fine.at(x) - coarse.at(x));
    }
    return std::sqrt(s * fine.step);
}

struct CascadeResult {
    GridFunction phi;
    std::vector<double> successive_distances;  // L2 grid distance per iteration
};

// n_iter cascade steps from start (default: the unit box). The limit's
// support is [a_min/(N-1), a_max/(N-1)] for a convergent cascade.
inline CascadeResult cascade_fixed_point(const FilterSpec& a, int n_iter,
                                         GridFunction start = GridFunction::unit_box()) {
    if (!a.validation.validated || !a.validation.qmf_ok)
        throw InvalidParam("cascade_fixed_point: filter must be QMF-validated");
    CascadeResult res;
    res.phi = std::move(start);
    for (int i = 0; i < n_iter; ++i) {
        GridFunction next = cascade_step(a, res.phi);
        res.successive_distances.push_back(grid_l2_distance(next, res.phi));
        res.phi = std::move(next);
    }
    return res;
}

// A_n = int conj(phi(x)) phi(x - n) dx at integer lags, exact for piecewise
// constant phi (cell-aligned sums); returns sum_n A_n z^n
inline LaurentPoly autocorrelation_h(const GridFunction& phi) {
    const std::int64_t M = phi.inv_step();
    const auto len = static_cast<std::int64_t>(phi.samples.size());
    if (len == 0) return {};
    const int width = static_cast<int>(len / M) + 1;
    LaurentPoly out;
    for (int n = -width; n <= width; ++n) {
        const std::int64_t shift = n * M;  // phi(x - n) sample index offset
        cplx s = 0;
        for (std::int64_t i = 0; i < len; ++i) {
            std::int64_t j = i - shift;
            if (j >= 0 && j < len)
                s += std::conj(phi.samples[static_cast<std::size_t>(i)]) *
                     phi.samples[static_cast<std::size_t>(j)];
        }
        out.set_coeff(n, s * phi.step);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Frequency-side infinite products

// m0^{(p)}(z) = m0(z) m0(z^N) ... m0(z^{N^{p-1}})
inline LaurentPoly iterated_filter(const LaurentPoly& m0, int N, int p) {
    LaurentPoly out = LaurentPoly::constant(1.0);
    int power = 1;
    for (int j = 0; j < p; ++j) {
        out = out * m0.compose_power(power);
        power *= N;
    }
    return out;
}

struct PhiValue {
    cplx value{1.0, 0.0};
    double tail_bound = 0.0;  // bound on |phi - truncation|
};

// K-term truncation of
//   phi_{k,C}(x) = prod_j e^{-i theta_C} (m0^{(p)})(z_k e^{-i x / N^{jp}}) / N^{p/2}
// (the trivial cycle with p = 1, z = 1, theta_C = 0 reduces to the plain
// scaling-function product). The e^{-ix} argument convention matches the
// classical Fourier transform of the scaling function.
inline PhiValue phi_product(const FilterSpec& m0, const Cycle& cycle, int k_index, double x,
                            int K) {
    if (K < 1) throw InvalidParam("phi_product: K must be >= 1");
    const int N = m0.scale_N;
    const int p = cycle.period_p;
    const double scale = std::pow(double(N), double(p) / 2.0);
    const LaurentPoly mp = iterated_filter(m0.m0, N, p);
    const cplx zk = cycle.points.at(static_cast<std::size_t>(k_index)).value;
    const cplx phase = std::polar(1.0, -cycle.theta_C);

    const double Np = std::pow(double(N), double(p));
    PhiValue out;
    double ratio = 1.0;
    for (int j = 1; j <= K; ++j) {
        ratio /= Np;
        cplx arg = zk * std::polar(1.0, -x * ratio);
        out.value *= phase * eval(mp, arg) / scale;
    }
    // Lipschitz tail: each omitted factor differs from 1 by at most
    // (sum |j c_j| / N^{p/2}) |x| N^{-mp}, partial products stay <= 1
    double lip = 0;
    for (const auto& [deg, c] : mp.coeffs()) lip += std::abs(double(deg) * c);
    lip /= scale;
    out.tail_bound = lip * std::abs(x) * (ratio / Np) / (1.0 - 1.0 / Np);
    return out;
}

// ---------------------------------------------------------------------------
// Cross-check of eigenvector g functions against periodized |phi|^2

struct CrosscheckProbe {
    double angle = 0.0;
    int k_index = 0;
    double periodized = 0.0;   // sum over |j| <= K_per of |phi(t - ang_k + 2 pi j)|^2
    double eigenvector = 0.0;  // Re g_{k,C}(e^{it})
    double discrepancy = 0.0;
    double tail_estimate = 0.0;
};

struct CrosscheckReport {
    std::vector<CrosscheckProbe> probes;
    double max_discrepancy = 0.0;
    double max_tail_estimate = 0.0;
};

// g_{k,C}(e^{it}) should equal Per|phi_{k,C}|^2 (t - angle(z_k)); the
// periodization tail is estimated from the observed 1/x^2 decay of |phi|^2
inline CrosscheckReport crosscheck_h(const FilterSpec& m0, const Cycle& cycle,
                                     const PeripheralSpectrum& sp, int K, int K_per,
                                     const std::vector<double>& probe_angles) {
    std::size_t cycle_idx = sp.cycles.size();
    for (std::size_t i = 0; i < sp.cycles.size(); ++i)
        if (sp.cycles[i].period_p == cycle.period_p &&
            std::abs(sp.cycles[i].points[0].value - cycle.points[0].value) < 1e-9)
            cycle_idx = i;
    if (cycle_idx == sp.cycles.size())
        throw InvalidParam("crosscheck_h: cycle not found in spectrum");

    CrosscheckReport rep;
    for (int k = 0; k < cycle.period_p; ++k) {
        const double ang_k = cycle.points[static_cast<std::size_t>(k)].angle;
        for (double t : probe_angles) {
            CrosscheckProbe probe;
            probe.angle = t;
            probe.k_index = k;
            double sum = 0.0;
            double decay_c = 0.0;  // max of x^2 |phi(x)|^2 near the truncation edge
            for (int j = -K_per; j <= K_per; ++j) {
                double x = t - ang_k + two_pi * j;
                double v = std::norm(phi_product(m0, cycle, k, x, K).value);
                sum += v;
                if (std::abs(j) > K_per - 50) decay_c = std::max(decay_c, x * x * v);
            }
            probe.periodized = sum;
            probe.eigenvector = eval(sp.g_funcs[cycle_idx][static_cast<std::size_t>(k)],
                                     std::polar(1.0, t))
                                    .real();
            probe.discrepancy = std::abs(probe.periodized - probe.eigenvector);
            // sum_{|j| > K_per} C / (2 pi j)^2 ~ C / (2 pi^2 K_per)
            probe.tail_estimate = decay_c / (2.0 * std::numbers::pi * std::numbers::pi * K_per);
            rep.max_discrepancy = std::max(rep.max_discrepancy, probe.discrepancy);
            rep.max_tail_estimate = std::max(rep.max_tail_estimate, probe.tail_estimate);
            rep.probes.push_back(probe);
        }
    }
    return rep;
}

// CSV emission of grid samples for external plotting: x,re,im
inline void write_csv(const GridFunction& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << "x,re,im\n";
    for (std::size_t i = 0; i < g.samples.size(); ++i) {
        double x = g.origin + double(i) * g.step;
        out << x << "," << g.samples[i].real() << "," << g.samples[i].imag() << "\n";
    }
}

}  // namespace ruelle
