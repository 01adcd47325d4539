#pragma once

#include <algorithm>
#include <vector>

#include "ymh/dynamics.hpp"
#include "ymh/model.hpp"

namespace ymh {

/// Proposal step sizes for the manifold-adapted random-walk Metropolis.
struct ProposalScales {
    double eps_q = 0.4;
    double eps_phi = 0.4;

    void validate() const {
        require(eps_q > 0.0 && eps_phi > 0.0, "ProposalScales: step sizes must be positive");
    }
};

struct AcceptanceStats {
    std::int64_t edge_proposed = 0, edge_accepted = 0;
    std::int64_t site_proposed = 0, site_accepted = 0;

    double edge_rate() const {
        return edge_proposed ? static_cast<double>(edge_accepted) / edge_proposed : 0.0;
    }
    double site_rate() const {
        return site_proposed ? static_cast<double>(site_accepted) / site_proposed : 0.0;
    }

    AcceptanceStats& operator+=(const AcceptanceStats& o) {
        edge_proposed += o.edge_proposed;
        edge_accepted += o.edge_accepted;
        site_proposed += o.site_proposed;
        site_accepted += o.site_accepted;
        return *this;
    }
};

enum class SweepOrder { Deterministic, Randomized };

/// Accept rule for a density proportional to exp(S): accept with
/// probability min(1, exp(S_new - S_old)).
inline bool metropolis_accept(double delta_s, Rng& rng) {
    if (delta_s >= 0.0) return true;
    return rng.uniform() < std::exp(delta_s);
}

namespace detail {

/// Change of the hopping sum over the edges incident to site x if the
/// site value were replaced; uses the reversal-invariant per-edge terms.
inline double site_hopping(const FieldConfiguration& cfg, Site x) {
    thread_local Matrix ev, mt;
    thread_local Vector tv;
    double h = 0.0;
    const Lattice& lat = cfg.lat();
    for (const auto& e : lat.edges_at_view(x)) {
        const Site y = lat.edge_to(e);
        switch (cfg.target) {
            case HiggsTarget::Euclidean:
                edge_value_into(ev, cfg, e);
                tv.noalias() = ev * cfg.phi_vec[y];
                tv -= cfg.phi_vec[x];
                h += tv.squaredNorm();
                break;
            case HiggsTarget::Sphere:
                edge_value_into(ev, cfg, e);
                tv.noalias() = ev * cfg.phi_vec[y];
                h += cfg.phi_vec[x].dot(tv);
                break;
            case HiggsTarget::Group:
                edge_value_into(ev, cfg, e);
                mt.noalias() = ev * cfg.phi_mat[y];
                // Tr(Phi_x^t M) = sum_ij Phi_x(i,j) M(i,j)
                h += (cfg.phi_mat[x].array() * mt.array()).sum();
                break;
        }
    }
    return h;
}

/// Action change for replacing edge ei by q_new (plaquette + hopping parts).
inline double edge_action_delta(const FieldConfiguration& cfg, const Couplings& c,
                                std::int64_t ei, const Matrix& q_new) {
    thread_local Matrix staple;
    const Lattice& lat = cfg.lat();
    const DirectedEdge e = lat.positive_edge(ei);
    const Matrix& q_old = cfg.Q[ei];
    double delta = 0.0;
    if (c.beta != 0.0) {
        edge_staple_into(staple, cfg, e);
        // Tr((q_new - q_old) staple) without temporaries
        delta += c.N * c.beta *
                 ((q_new - q_old).array() * staple.transpose().array()).sum();
    }
    if (c.kappa != 0.0) {
        const Site x = lat.edge_from(e), y = lat.edge_to(e);
        switch (cfg.target) {
            case HiggsTarget::Euclidean: {
                const double h_new = (q_new * cfg.phi_vec[y] - cfg.phi_vec[x]).squaredNorm();
                const double h_old = (q_old * cfg.phi_vec[y] - cfg.phi_vec[x]).squaredNorm();
                delta -= c.kappa * c.N * (h_new - h_old);
                break;
            }
            case HiggsTarget::Sphere: {
                const double h = cfg.phi_vec[x].dot((q_new - q_old) * cfg.phi_vec[y]);
                delta += 2.0 * c.kappa * c.N * h;
                break;
            }
            case HiggsTarget::Group: {
                const double h =
                    (cfg.phi_mat[x].transpose() * (q_new - q_old) * cfg.phi_mat[y]).trace();
                delta += 2.0 * c.kappa * c.N * h;
                break;
            }
        }
    }
    return delta;
}

inline double site_action_term(const FieldConfiguration& cfg, const Couplings& c, Site x) {
    double s = 0.0;
    const double hop = site_hopping(cfg, x);
    switch (cfg.target) {
        case HiggsTarget::Euclidean:
            s = -c.kappa * c.N * hop - c.m * c.N * cfg.phi_vec[x].squaredNorm();
            break;
        case HiggsTarget::Sphere:
        case HiggsTarget::Group:
            s = 2.0 * c.kappa * c.N * hop;
            break;
    }
    return s;
}

}  // namespace detail

/// One full sweep of symmetric manifold-adapted proposals against
/// exp(S_YMH): per positive edge Q <- exp(eps_q xi) Q, per site the
/// target-specific geodesic proposal. Proposals are symmetric w.r.t. the
/// reference measures, so the accept rule carries no Jacobian factor.
inline AcceptanceStats metropolis_sweep(FieldConfiguration& cfg, const Couplings& c,
                                        const ProposalScales& scales, Rng& rng,
                                        SweepOrder order = SweepOrder::Deterministic) {
    require(cfg.target == c.target && cfg.N == c.N, "metropolis_sweep: target mismatch");
    AcceptanceStats stats;
    const Lattice& lat = cfg.lat();
    const std::int64_t n_edges = lat.edge_count();
    const std::int64_t n_sites = lat.site_count();

    std::vector<std::int64_t> edge_order(n_edges), site_order(n_sites);
    for (std::int64_t i = 0; i < n_edges; ++i) edge_order[i] = i;
    for (std::int64_t i = 0; i < n_sites; ++i) site_order[i] = i;
    if (order == SweepOrder::Randomized) {
        for (std::int64_t i = n_edges - 1; i > 0; --i)
            std::swap(edge_order[i], edge_order[rng.uniform_below(i + 1)]);
        for (std::int64_t i = n_sites - 1; i > 0; --i)
            std::swap(site_order[i], site_order[rng.uniform_below(i + 1)]);
    }

    thread_local Matrix xi, rot, q_new;
    for (std::int64_t ei : edge_order) {
        algebra_gaussian_into(xi, cfg.N, 1.0, rng);
        xi *= scales.eps_q;
        matrix_exp_into(rot, xi);
        q_new.noalias() = rot * cfg.Q[ei];
        const double delta = detail::edge_action_delta(cfg, c, ei, q_new);
        ++stats.edge_proposed;
        if (metropolis_accept(delta, rng)) {
            cfg.Q[ei].swap(q_new);
            ++stats.edge_accepted;
        }
    }

    for (std::int64_t x : site_order) {
        const double s_old = detail::site_action_term(cfg, c, x);
        ++stats.site_proposed;
        switch (cfg.target) {
            case HiggsTarget::Euclidean: {
                Vector old = cfg.phi_vec[x];
                Vector prop = old;
                for (int i = 0; i < cfg.N; ++i) prop(i) += scales.eps_phi * rng.gaussian();
                cfg.phi_vec[x] = prop;
                const double delta = detail::site_action_term(cfg, c, x) - s_old;
                if (metropolis_accept(delta, rng))
                    ++stats.site_accepted;
                else
                    cfg.phi_vec[x] = std::move(old);
                break;
            }
            case HiggsTarget::Sphere: {
                Vector old = cfg.phi_vec[x];
                Vector g(cfg.N);
                for (int i = 0; i < cfg.N; ++i) g(i) = rng.gaussian();
                cfg.phi_vec[x] =
                    sphere_exp(old, scales.eps_phi * sphere_tangent_project(old, g));
                const double delta = detail::site_action_term(cfg, c, x) - s_old;
                if (metropolis_accept(delta, rng))
                    ++stats.site_accepted;
                else
                    cfg.phi_vec[x] = std::move(old);
                break;
            }
            case HiggsTarget::Group: {
                Matrix old = cfg.phi_mat[x];
                cfg.phi_mat[x] =
                    group_exp(scales.eps_phi * algebra_gaussian(cfg.N, 1.0, rng)) * old;
                const double delta = detail::site_action_term(cfg, c, x) - s_old;
                if (metropolis_accept(delta, rng))
                    ++stats.site_accepted;
                else
                    cfg.phi_mat[x] = std::move(old);
                break;
            }
        }
    }
    return stats;
}

/// Edge-only sweep against the U-gauge-fixed action
/// N beta sum_p Tr(Q_p) + 2 kappa N sum_e Tr(Q_e).
inline AcceptanceStats metropolis_sweep_gaugefixed(FieldConfiguration& cfg, const Couplings& c,
                                                   const ProposalScales& scales, Rng& rng) {
    require(c.target == HiggsTarget::Group, "metropolis_sweep_gaugefixed: Group target only");
    AcceptanceStats stats;
    const Lattice& lat = cfg.lat();
    thread_local Matrix xi, rot, q_new, staple;
    for (std::int64_t ei = 0; ei < lat.edge_count(); ++ei) {
        algebra_gaussian_into(xi, cfg.N, 1.0, rng);
        xi *= scales.eps_q;
        matrix_exp_into(rot, xi);
        q_new.noalias() = rot * cfg.Q[ei];
        double delta = 2.0 * c.kappa * c.N * (q_new - cfg.Q[ei]).trace();
        if (c.beta != 0.0) {
            edge_staple_into(staple, cfg, lat.positive_edge(ei));
            delta += c.N * c.beta *
                     ((q_new - cfg.Q[ei]).array() * staple.transpose().array()).sum();
        }
        ++stats.edge_proposed;
        if (metropolis_accept(delta, rng)) {
            cfg.Q[ei].swap(q_new);
            ++stats.edge_accepted;
        }
    }
    return stats;
}

/// Multiplicative step-size adjustment toward the 0.4 +- 0.1 acceptance
/// window. Only called during burn-in; scales are frozen afterwards so
/// the chain stays exact.
inline void autotune(ProposalScales& scales, const AcceptanceStats& window) {
    auto adjust = [](double eps, double rate) {
        if (rate > 0.5) eps *= 1.25;
        if (rate < 0.3) eps /= 1.25;
        return std::clamp(eps, 1e-4, 10.0);
    };
    if (window.edge_proposed > 0) scales.eps_q = adjust(scales.eps_q, window.edge_rate());
    if (window.site_proposed > 0) scales.eps_phi = adjust(scales.eps_phi, window.site_rate());
}

struct MetropolisSettings {
    std::int64_t sweeps = 0;
    std::int64_t burnin = 0;
    std::int64_t thinning = 1;
    std::uint64_t seed = 0;
    ProposalScales scales;
    bool gaugefixed = false;
    SweepOrder order = SweepOrder::Deterministic;
    std::int64_t tune_interval = 100;
};

/// Burn in with autotuning, freeze the scales, then sample with
/// observers evaluated every `thinning` sweeps. Returns the record
/// stream in the same shape as the Langevin driver.
inline Trajectory run_metropolis(const FieldConfiguration& cfg0, const Couplings& c,
                                 const MetropolisSettings& s,
                                 const std::vector<Observer>& observers,
                                 ProposalScales* tuned = nullptr,
                                 AcceptanceStats* totals = nullptr) {
    require(s.sweeps >= 0 && s.burnin >= 0 && s.thinning >= 1,
            "run_metropolis: invalid settings");
    s.scales.validate();
    FieldConfiguration cfg = cfg0;
    Rng rng(s.seed);
    ProposalScales scales = s.scales;

    AcceptanceStats window;
    for (std::int64_t k = 0; k < s.burnin; ++k) {
        window += s.gaugefixed ? metropolis_sweep_gaugefixed(cfg, c, scales, rng)
                               : metropolis_sweep(cfg, c, scales, rng, s.order);
        if ((k + 1) % s.tune_interval == 0) {
            autotune(scales, window);
            window = AcceptanceStats{};
        }
    }

    Trajectory traj;
    for (const auto& [name, fn] : observers) traj.columns.push_back(name);
    auto record = [&](const FieldConfiguration& f, std::int64_t sweep) {
        std::vector<double> row;
        row.reserve(observers.size());
        for (const auto& [name, fn] : observers) row.push_back(fn(f));
        traj.times.push_back(static_cast<double>(sweep));
        traj.rows.push_back(std::move(row));
    };

    AcceptanceStats all;
    record(cfg, 0);
    for (std::int64_t k = 1; k <= s.sweeps; ++k) {
        all += s.gaugefixed ? metropolis_sweep_gaugefixed(cfg, c, scales, rng)
                            : metropolis_sweep(cfg, c, scales, rng, s.order);
        if (k % s.thinning == 0) record(cfg, k);
    }
    if (tuned) *tuned = scales;
    if (totals) *totals = all;
    traj.final_config = std::move(cfg);
    return traj;
}

}  // namespace ymh
