#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ymh/common.hpp"
#include "ymh/model.hpp"

namespace ymh {

/// Result of a curvature-constant evaluation. `optimal_delta` is set for
/// the constants defined through a sup over a Young-inequality parameter.
struct BoundReport {
    std::string name;
    double value = 0.0;
    bool positive = false;
    bool has_delta = false;
    double optimal_delta = 0.0;
    std::string warning;

    BoundReport& finish() {
        positive = value > 0.0;
        return *this;
    }
};

/// Bakry-Emery constant for the Q-marginal of the Euclidean-target model:
/// (N+2)/4 - 1 - kappa N / m - 2 kappa^2 N / m^2 - 8 (d-1) N |beta|.
inline BoundReport k_euclidean(int N, double beta, double kappa, double m, int d) {
    require(m > 0.0, "k_euclidean: m must be positive");
    BoundReport r;
    r.name = "K_euclidean";
    r.value = 0.25 * (N + 2) - 1.0 - kappa * N / m - 2.0 * kappa * kappa * N / (m * m) -
              8.0 * (d - 1) * N * std::abs(beta);
    return r.finish();
}

namespace detail {

/// sup over delta > 0 of min(c1 - a delta, c2 - dd / delta): the first
/// branch falls and the second rises, so the optimum sits at the positive
/// root of a delta^2 + (c2 - c1) delta - dd = 0.
inline void sup_min_branches(double c1, double a, double c2, double dd, BoundReport& r) {
    if (a <= 0.0 || dd <= 0.0) {  // kappa = 0: both branches are flat
        r.value = std::min(c1, c2);
        r.has_delta = false;
        return;
    }
    const double b = c2 - c1;
    const double delta = (-b + std::sqrt(b * b + 4.0 * a * dd)) / (2.0 * a);
    r.value = c1 - a * delta;
    r.has_delta = true;
    r.optimal_delta = delta;
}

}  // namespace detail

/// Log-Sobolev constant for the sphere-valued model:
/// sup_delta min{ (N+2)/4 - 1 - 8(d-1)|beta|N - 2(2 delta + 1)|kappa|N,
///                (N-2) - 4|kappa|N d (2 + 1/delta) }.
inline BoundReport k_sphere(int N, double beta, double kappa, int d) {
    require(N >= 2, "k_sphere: invalid dimension");
    BoundReport r;
    r.name = "K_sphere";
    const double ak = std::abs(kappa);
    const double c1 = 0.25 * (N + 2) - 1.0 - 8.0 * (d - 1) * std::abs(beta) * N - 2.0 * ak * N;
    const double c2 = (N - 2.0) - 8.0 * ak * N * d;
    detail::sup_min_branches(c1, 4.0 * ak * N, c2, 4.0 * ak * N * d, r);
    if (N == 2)
        r.warning = "sphere constant is never positive for N = 2 (flat circle branch)";
    return r.finish();
}

/// Log-Sobolev constant for the group-valued model:
/// sup_delta min{ (N+2)/4 - 1 - 8(d-1)|beta|N - 2|kappa|N(1 + 2 delta),
///                (N+2)/4 - 1 - 4|kappa|N d (2 + 1/delta) }.
inline BoundReport k_group(int N, double beta, double kappa, int d) {
    require(N >= 2, "k_group: invalid dimension");
    BoundReport r;
    r.name = "K_group";
    const double ak = std::abs(kappa);
    const double base = 0.25 * (N + 2) - 1.0;
    const double c1 = base - 8.0 * (d - 1) * std::abs(beta) * N - 2.0 * ak * N;
    const double c2 = base - 8.0 * ak * N * d;
    detail::sup_min_branches(c1, 4.0 * ak * N, c2, 4.0 * ak * N * d, r);
    return r.finish();
}

/// Constant for the U-gauge-fixed measure:
/// (N+2)/4 - 1 - N (8(d-1)|beta| + 2|kappa|).
inline BoundReport k_ugauge(int N, double beta, double kappa, int d) {
    BoundReport r;
    r.name = "K_ugauge";
    r.value = 0.25 * (N + 2) - 1.0 -
              N * (8.0 * (d - 1) * std::abs(beta) + 2.0 * std::abs(kappa));
    return r.finish();
}

enum class CurvedSpace { GroupEdge, Sphere };

/// Ricci lower-bound constants per unit tangent: (N+2)/4 - 1 on SO(N)
/// with the HS metric, N-2 on the unit sphere.
inline double ricci_constant(CurvedSpace space, int N) {
    switch (space) {
        case CurvedSpace::GroupEdge:
            require(N >= 2, "ricci_constant: N >= 2 required for SO(N)");
            return 0.25 * (N + 2) - 1.0;
        case CurvedSpace::Sphere:
            require(N >= 2, "ricci_constant: N >= 2 required for the sphere");
            return static_cast<double>(N - 2);
    }
    return 0.0;
}

/// Ricci quadratic form of the product configuration space evaluated on
/// a tangent vector with edge part norm^2 vq2 and site part norm^2 vp2.
inline double ricci_form(HiggsTarget target, int N, double vq2, double vp2) {
    const double edge = ricci_constant(CurvedSpace::GroupEdge, N) * vq2;
    switch (target) {
        case HiggsTarget::Euclidean: return edge;  // flat site factors
        case HiggsTarget::Sphere: return edge + ricci_constant(CurvedSpace::Sphere, N) * vp2;
        case HiggsTarget::Group:
            return edge + ricci_constant(CurvedSpace::GroupEdge, N) * vp2;
    }
    return edge;
}

/// Large-N variance bound n(n-3)/(K N) for a length-n loop or line.
inline double variance_bound(int n, double K, int N) {
    require(n >= 1, "variance_bound: loop length must be >= 1");
    if (K <= 0.0) throw NumericError("variance_bound: bound-unavailable (K <= 0)");
    return static_cast<double>(n) * (n - 3.0) / (K * static_cast<double>(N));
}

struct RegionPoint {
    double beta = 0.0;
    double kappa = 0.0;
    double K = 0.0;
    bool has_delta = false;
    double delta = 0.0;
};

struct RegionMap {
    std::vector<RegionPoint> points;            // row-major over (beta, kappa)
    std::vector<std::pair<double, double>> boundary;  // K = 0 crossings
    std::size_t n_beta = 0, n_kappa = 0;
};

/// K evaluated on a (beta, kappa) grid for one target, with the K = 0
/// contour located by sign changes between adjacent grid points.
inline RegionMap admissible_region(HiggsTarget target, int N, int d,
                                   const std::vector<double>& betas,
                                   const std::vector<double>& kappas, double m = 1.0) {
    require(!betas.empty() && !kappas.empty(), "admissible_region: empty grid");
    RegionMap map;
    map.n_beta = betas.size();
    map.n_kappa = kappas.size();
    map.points.reserve(betas.size() * kappas.size());
    for (double b : betas) {
        for (double k : kappas) {
            BoundReport rep;
            switch (target) {
                case HiggsTarget::Euclidean: rep = k_euclidean(N, b, k, m, d); break;
                case HiggsTarget::Sphere: rep = k_sphere(N, b, k, d); break;
                case HiggsTarget::Group: rep = k_group(N, b, k, d); break;
            }
            map.points.push_back({b, k, rep.value, rep.has_delta, rep.optimal_delta});
        }
    }
    auto at = [&](std::size_t i, std::size_t j) -> const RegionPoint& {
        return map.points[i * map.n_kappa + j];
    };
    for (std::size_t i = 0; i < map.n_beta; ++i)
        for (std::size_t j = 0; j < map.n_kappa; ++j) {
            if (at(i, j).K == 0.0) {
                map.boundary.push_back({at(i, j).beta, at(i, j).kappa});
                continue;
            }
            if (i + 1 < map.n_beta && at(i, j).K * at(i + 1, j).K < 0.0)
                map.boundary.push_back(
                    {0.5 * (at(i, j).beta + at(i + 1, j).beta), at(i, j).kappa});
            if (j + 1 < map.n_kappa && at(i, j).K * at(i, j + 1).K < 0.0)
                map.boundary.push_back(
                    {at(i, j).beta, 0.5 * (at(i, j).kappa + at(i, j + 1).kappa)});
        }
    return map;
}

}  // namespace ymh
