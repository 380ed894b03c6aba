#pragma once

// Detection and certification of m0-cycles: finite orbits {z_1,...,z_p} of
// z -> z^N on the circle with |m0(z_k)| = sqrt(N) at every point. Cycle
// points are the unit-circle roots of |m0|^2 - N, grouped into orbits.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ruelle/errors.hpp"
#include "ruelle/filters.hpp"
#include "ruelle/lpoly.hpp"

namespace ruelle {

struct Cycle {
    std::vector<CirclePoint> points;  // z_1..z_p with z_k^N = z_{k+1}, z_p^N = z_1
    int period_p = 1;
    std::vector<double> phases;  // theta_k with m0(z_k) = sqrt(N) e^{i theta_k}
    double theta_C = 0.0;        // theta_1 + ... + theta_p
    bool is_trivial = false;     // points = {1}
};

struct CycleOptions {
    double cycle_tol = 1e-8;   // on | |m0(z_k)| - sqrt(N) |
    int p_max = 20;            // orbit search bound, N^p_max capped at 2^20
    double match_tol = 1e-10;  // orbit point matching without rational angles
    double near_tol = 1e-3;    // near-cycle report band
};

struct CycleReport {
    std::vector<Cycle> cycles;             // trivial cycle first
    std::vector<CirclePoint> near_cycles;  // | |m0| - sqrt(N) | within near_tol only
};

struct Orbit {
    int period = 0;
    std::vector<CirclePoint> points;
};

// Minimal period of z under z -> z^N, or nullopt if the orbit does not close
// within p_max steps. Exact on the rational-angle lattice when available.
inline std::optional<Orbit> orbit_closure(const CirclePoint& z, int N, int p_max,
                                          double match_tol = 1e-10) {
    Orbit orbit;
    CirclePoint cur = z;
    for (int p = 1; p <= p_max; ++p) {
        orbit.points.push_back(cur);
        cur = cur.pow(N);
        bool closed = false;
        if (cur.rational_angle && z.rational_angle)
            closed = *cur.rational_angle == *z.rational_angle;
        else
            closed = std::abs(cur.value - z.value) <= match_tol;
        if (closed) {
            orbit.period = p;
            return orbit;
        }
    }
    return std::nullopt;
}

namespace detail {

inline int effective_p_max(int N, int requested) {
    // keep N^p_max <= 2^20 so snapping denominators N^p - 1 stay bounded
    int p = 0;
    std::int64_t pw = 1;
    while (p < requested && pw * N <= (1 << 20)) {
        pw *= N;
        ++p;
    }
    return std::max(p, 1);
}

}  // namespace detail

// Roots of |m0|^2 - N on the circle, grouped into orbits of z -> z^N.
// Precondition: m0 QMF-validated, so |m0|^2 <= N on the circle and every
// root is a genuine cycle point candidate.
inline CycleReport find_cycles(const FilterSpec& m0, const CycleOptions& opt = {}) {
    if (!m0.validation.validated || !m0.validation.qmf_ok)
        throw InvalidParam("find_cycles: filter must be QMF-validated (R1 = 1)");
    const int N = m0.scale_N;
    const int p_max = detail::effective_p_max(N, opt.p_max);
    const double sqrtN = std::sqrt(double(N));

    LaurentPoly target = cross_correlation(m0.m0, m0.m0);
    target.add_to_coeff(0, cplx{-double(N)});

    UnitRootOptions ropt;
    ropt.tol = opt.cycle_tol;
    ropt.near_tol = opt.near_tol;
    std::int64_t den_cap = 1;
    for (int i = 0; i < p_max; ++i) den_cap *= N;
    ropt.snap_den_max = den_cap - 1;

    UnitRootResult rr = unit_circle_roots_full(target, ropt);

    CycleReport report;
    for (const cplx& r : rr.near_circle)
        report.near_cycles.push_back(CirclePoint::from_angle(std::arg(r)));

    // match an orbit iterate against the root set
    auto find_root = [&](const CirclePoint& z) -> int {
        for (std::size_t i = 0; i < rr.roots.size(); ++i) {
            const CirclePoint& q = rr.roots[i].point;
            if (z.rational_angle && q.rational_angle) {
                if (*z.rational_angle == *q.rational_angle) return static_cast<int>(i);
            } else if (std::abs(z.value - q.value) <= 1e-7) {
                return static_cast<int>(i);
            }
        }
        return -1;
    };

    std::vector<bool> used(rr.roots.size(), false);
    for (std::size_t i = 0; i < rr.roots.size(); ++i) {
        if (used[i]) continue;
        const CirclePoint& start = rr.roots[i].point;
        double mval = std::abs(eval(m0.m0, start));
        if (std::abs(mval - sqrtN) > opt.near_tol) {
            // a non-cycle zero of |m0|^2 - N cannot occur for QMF filters;
            // reaching here signals tolerance inconsistency
            throw OrbitEscape("find_cycles: root fails |m0| = sqrt(N) beyond tolerance");
        }

        auto orb = orbit_closure(start, N, p_max, opt.match_tol);
        if (!orb) {
            std::string ang = std::to_string(start.angle);
            throw OrbitEscape("find_cycles: orbit of angle " + ang + " does not close within p_max");
        }
        Cycle cyc;
        cyc.period_p = orb->period;
        for (const CirclePoint& z : orb->points) {
            int idx = find_root(z);
            if (idx < 0)
                throw OrbitEscape("find_cycles: orbit leaves the root set of |m0|^2 - N");
            used[idx] = true;
            cyc.points.push_back(z);
            double theta = std::arg(eval(m0.m0, z));
            cyc.phases.push_back(theta);
            cyc.theta_C += theta;
            if (std::abs(std::abs(eval(m0.m0, z)) - sqrtN) > opt.cycle_tol)
                report.near_cycles.push_back(z);
        }
        cyc.is_trivial = cyc.period_p == 1 && std::abs(cyc.points[0].value - cplx{1.0}) <= 1e-10;
        report.cycles.push_back(std::move(cyc));
    }

    std::sort(report.cycles.begin(), report.cycles.end(), [](const Cycle& a, const Cycle& b) {
        if (a.is_trivial != b.is_trivial) return a.is_trivial;
        if (a.period_p != b.period_p) return a.period_p < b.period_p;
        return a.points[0].angle < b.points[0].angle;
    });
    return report;
}

// Cohen's criterion: exactly one cycle and it is {1}
inline bool cohen_condition(const CycleReport& report) {
    return report.cycles.size() == 1 && report.cycles[0].is_trivial;
}

}  // namespace ruelle
