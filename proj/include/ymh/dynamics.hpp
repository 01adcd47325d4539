#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ymh/model.hpp"

namespace ymh {

enum class Scheme { Geodesic, ItoProject };

struct IntegratorSettings {
    double dt = 1e-3;
    Scheme scheme = Scheme::Geodesic;
    std::uint64_t seed = 0;
    std::int64_t steps = 0;
    std::int64_t thinning = 1;

    void validate() const {
        require(dt > 0.0, "IntegratorSettings: dt must be positive");
        require(steps >= 0, "IntegratorSettings: steps must be >= 0");
        require(thinning >= 1, "IntegratorSettings: thinning must be >= 1");
    }
};

/// One step's worth of Brownian increments, before the sqrt(2 dt) scale:
/// a standard algebra Gaussian per edge and the target's site noise
/// (free Gaussian vector, tangent-projected Gaussian, or algebra Gaussian).
struct TangentNoise {
    std::vector<Matrix> xi;   // per edge, skew
    std::vector<Vector> eta;  // Euclidean/Sphere sites
    std::vector<Matrix> zeta; // Group sites, skew

    static TangentNoise zero(const FieldConfiguration& cfg) {
        TangentNoise n;
        n.xi.assign(cfg.lat().edge_count(), Matrix::Zero(cfg.N, cfg.N));
        if (cfg.target == HiggsTarget::Group)
            n.zeta.assign(cfg.lat().site_count(), Matrix::Zero(cfg.N, cfg.N));
        else
            n.eta.assign(cfg.lat().site_count(), Vector::Zero(cfg.N));
        return n;
    }
};

// noise stream kinds for the counter-based generator
inline constexpr std::uint32_t kNoiseEdge = 0;
inline constexpr std::uint32_t kNoiseSite = 1;

/// Per-component noise keyed by (seed, step, component id): evaluation
/// order and threading cannot change the realization. Sphere noise is a
/// standard Gaussian projected to the tangent plane at the current site
/// value, so its covariance is the tangent projector.
inline TangentNoise sample_noise(const FieldConfiguration& cfg, std::uint64_t seed,
                                 std::int64_t step) {
    TangentNoise n = TangentNoise::zero(cfg);
    const auto edges = cfg.lat().edge_count();
    for (std::int64_t e = 0; e < edges; ++e) {
        Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(step), kNoiseEdge,
                             static_cast<std::uint64_t>(e));
        n.xi[e] = algebra_gaussian(cfg.N, 1.0, rng);
    }
    const auto sites = cfg.lat().site_count();
    for (std::int64_t x = 0; x < sites; ++x) {
        Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(step), kNoiseSite,
                             static_cast<std::uint64_t>(x));
        if (cfg.target == HiggsTarget::Group) {
            n.zeta[x] = algebra_gaussian(cfg.N, 1.0, rng);
        } else {
            Vector g(cfg.N);
            for (int i = 0; i < cfg.N; ++i) g(i) = rng.gaussian();
            n.eta[x] = (cfg.target == HiggsTarget::Sphere)
                           ? sphere_tangent_project(cfg.phi_vec[x], g)
                           : g;
        }
    }
    return n;
}

/// Gradient drift of the Langevin SDE: edge components grad_edge, site
/// components grad_site (the measure is exp(S), so the drift is +grad S).
inline TangentVector drift(const FieldConfiguration& cfg, const Couplings& c) {
    require(cfg.target == c.target && cfg.N == c.N, "drift: target mismatch");
    TangentVector tv = TangentVector::zero(cfg);
    const auto edges = cfg.lat().edge_count();
    for (std::int64_t e = 0; e < edges; ++e) tv.X[e] = grad_edge(cfg, c, e);
    const auto sites = cfg.lat().site_count();
    for (std::int64_t x = 0; x < sites; ++x) {
        if (cfg.target == HiggsTarget::Group)
            tv.Y[x] = grad_site_group(cfg, c, x);
        else
            tv.v[x] = grad_site_vec(cfg, c, x);
    }
    return tv;
}

namespace detail {
inline void check_increment(double norm, double limit, const char* where) {
    if (!(norm <= limit))
        throw NumericError(std::string("step-too-large in ") + where +
                           ": increment norm " + std::to_string(norm));
}
}  // namespace detail

/// Geodesic Euler step: exponentials of (dt drift + sqrt(2 dt) noise).
/// The Ito corrections -(N-1)/2 Q, -(N-1) Phi, -(N-1)/2 Phi are generated
/// automatically by the second-order term of the exponential maps, since
/// E[xi^2] = -(N-1)/2 I for the algebra Gaussian and the sphere geodesic
/// contracts by E|eta|^2/2 = (N-1) dt.
inline FieldConfiguration step_geodesic(const FieldConfiguration& cfg, const Couplings& c,
                                        double dt, const TangentNoise& noise) {
    thread_local Matrix inc, rot;
    const TangentVector g = drift(cfg, c);
    const double root = std::sqrt(2.0 * dt);
    FieldConfiguration out = cfg;
    const auto edges = cfg.lat().edge_count();
    for (std::int64_t e = 0; e < edges; ++e) {
        inc = dt * g.X[e] + root * noise.xi[e];
        detail::check_increment(inc.norm(), 1.0, "step_geodesic(edge)");
        matrix_exp_into(rot, inc);
        out.Q[e].noalias() = rot * cfg.Q[e];
    }
    const auto sites = cfg.lat().site_count();
    for (std::int64_t x = 0; x < sites; ++x) {
        switch (cfg.target) {
            case HiggsTarget::Euclidean:
                out.phi_vec[x] = cfg.phi_vec[x] + dt * g.v[x] + root * noise.eta[x];
                break;
            case HiggsTarget::Sphere: {
                Vector inc = dt * g.v[x] + root * noise.eta[x];
                detail::check_increment(inc.norm(), 1.0, "step_geodesic(site)");
                out.phi_vec[x] = sphere_exp(cfg.phi_vec[x], inc);
                break;
            }
            case HiggsTarget::Group: {
                inc = dt * g.Y[x] + root * noise.zeta[x];
                detail::check_increment(inc.norm(), 1.0, "step_geodesic(site)");
                matrix_exp_into(rot, inc);
                out.phi_mat[x].noalias() = rot * cfg.phi_mat[x];
                break;
            }
        }
    }
    return out;
}

/// Explicit Euler-Maruyama on the Ito form with the correction terms
/// written out, followed by a projection back to the manifold (polar
/// retraction on group components, radial normalization on the sphere).
/// Kept as an independent cross-check of the geodesic scheme.
inline FieldConfiguration step_ito_project(const FieldConfiguration& cfg, const Couplings& c,
                                           double dt, const TangentNoise& noise) {
    if (dt == 0.0) return cfg;
    const TangentVector g = drift(cfg, c);
    const double root = std::sqrt(2.0 * dt);
    const double ito_edge = -0.5 * (cfg.N - 1) * dt;
    FieldConfiguration out = cfg;
    const auto edges = cfg.lat().edge_count();
    for (std::int64_t e = 0; e < edges; ++e) {
        Matrix q = cfg.Q[e];
        q += dt * g.X[e] * cfg.Q[e] + ito_edge * cfg.Q[e] + root * noise.xi[e] * cfg.Q[e];
        out.Q[e] = retract_orthogonal(q);
    }
    const auto sites = cfg.lat().site_count();
    for (std::int64_t x = 0; x < sites; ++x) {
        switch (cfg.target) {
            case HiggsTarget::Euclidean:
                out.phi_vec[x] = cfg.phi_vec[x] + dt * g.v[x] + root * noise.eta[x];
                break;
            case HiggsTarget::Sphere: {
                Vector p = cfg.phi_vec[x];
                p += dt * g.v[x] - (cfg.N - 1) * dt * cfg.phi_vec[x] + root * noise.eta[x];
                const double r = p.norm();
                if (r <= 1e-12)
                    throw NumericError("step_ito_project: sphere normalization failed");
                out.phi_vec[x] = p / r;
                break;
            }
            case HiggsTarget::Group: {
                Matrix p = cfg.phi_mat[x];
                p += dt * g.Y[x] * cfg.phi_mat[x] + ito_edge * cfg.phi_mat[x] +
                     root * noise.zeta[x] * cfg.phi_mat[x];
                out.phi_mat[x] = retract_orthogonal(p);
                break;
            }
        }
    }
    return out;
}

inline FieldConfiguration step(const FieldConfiguration& cfg, const Couplings& c,
                               const IntegratorSettings& s, std::int64_t step_index) {
    const TangentNoise noise = sample_noise(cfg, s.seed, step_index);
    return s.scheme == Scheme::Geodesic ? step_geodesic(cfg, c, s.dt, noise)
                                        : step_ito_project(cfg, c, s.dt, noise);
}

using Observer = std::pair<std::string, std::function<double(const FieldConfiguration&)>>;

/// Time series of observable records plus the final configuration.
struct Trajectory {
    std::vector<std::string> columns;
    std::vector<double> times;
    std::vector<std::vector<double>> rows;  // one row per record
    FieldConfiguration final_config;
};

/// Integrate the Langevin dynamics, evaluating observers at the initial
/// configuration and every `thinning` steps. Deterministic given the seed.
inline Trajectory run(const FieldConfiguration& cfg0, const Couplings& c,
                      const IntegratorSettings& s, const std::vector<Observer>& observers) {
    s.validate();
    Trajectory traj;
    for (const auto& [name, fn] : observers) traj.columns.push_back(name);

    auto record = [&](const FieldConfiguration& cfg, std::int64_t step_index) {
        std::vector<double> row;
        row.reserve(observers.size());
        for (const auto& [name, fn] : observers) row.push_back(fn(cfg));
        traj.times.push_back(static_cast<double>(step_index) * s.dt);
        traj.rows.push_back(std::move(row));
    };

    FieldConfiguration cfg = cfg0;
    record(cfg, 0);
    for (std::int64_t k = 1; k <= s.steps; ++k) {
        try {
            cfg = step(cfg, c, s, k - 1);
        } catch (const NumericError& err) {
            throw NumericError("run: step " + std::to_string(k) + " failed: " + err.what());
        }
        if (k % s.thinning == 0) record(cfg, k);
    }
    traj.final_config = std::move(cfg);
    return traj;
}

}  // namespace ymh
