#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ymh/model.hpp"

namespace ymh {

/// Chained path check: v(e_i) = u(e_{i+1}).
inline bool path_connected(const Lattice& lat, const std::vector<DirectedEdge>& path) {
    if (path.empty()) return false;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (lat.edge_to(path[i]) != lat.edge_from(path[i + 1])) return false;
    return true;
}

inline bool path_closed(const Lattice& lat, const std::vector<DirectedEdge>& path) {
    return path_connected(lat, path) && lat.edge_to(path.back()) == lat.edge_from(path.front());
}

/// Build a path from a start site and a list of (axis, direction) steps.
inline std::vector<DirectedEdge> step_path(const Lattice& lat, Site start,
                                           const std::vector<std::pair<int, int>>& steps) {
    std::vector<DirectedEdge> path;
    path.reserve(steps.size());
    Site at = start;
    for (const auto& [axis, dir] : steps) {
        require(axis >= 0 && axis < lat.dim(), "step_path: invalid axis");
        if (dir > 0) {
            path.push_back(DirectedEdge{at, static_cast<std::int16_t>(axis), false});
            at = lat.neighbor(at, axis, +1);
        } else {
            const Site prev = lat.neighbor(at, axis, -1);
            path.push_back(DirectedEdge{prev, static_cast<std::int16_t>(axis), true});
            at = prev;
        }
    }
    return path;
}

/// Rectangular a x b loop in the (ax1, ax2) plane starting at base.
inline std::vector<DirectedEdge> rectangle_loop(const Lattice& lat, Site base, int ax1, int a,
                                                int ax2, int b) {
    require(a >= 1 && b >= 1 && ax1 != ax2, "rectangle_loop: degenerate spec");
    std::vector<std::pair<int, int>> steps;
    for (int i = 0; i < a; ++i) steps.push_back({ax1, +1});
    for (int i = 0; i < b; ++i) steps.push_back({ax2, +1});
    for (int i = 0; i < a; ++i) steps.push_back({ax1, -1});
    for (int i = 0; i < b; ++i) steps.push_back({ax2, -1});
    return step_path(lat, base, steps);
}

/// W_l = Tr(Q_{e1} ... Q_{en}) for a closed loop.
inline double wilson_loop(const FieldConfiguration& cfg, const std::vector<DirectedEdge>& loop) {
    require(path_closed(cfg.lat(), loop), "wilson_loop: not-a-loop");
    return path_product(cfg, loop).trace();
}

/// W_l = Tr(Phi_{u(e1)}^t Q_{e1} ... Q_{en} Phi_{v(en)}) for a connected
/// path; the trace is a no-op for the vector-valued targets.
inline double wilson_line(const FieldConfiguration& cfg, const std::vector<DirectedEdge>& path) {
    require(path_connected(cfg.lat(), path), "wilson_line: disconnected path");
    const Lattice& lat = cfg.lat();
    const Site u = lat.edge_from(path.front());
    const Site v = lat.edge_to(path.back());
    const Matrix prod = path_product(cfg, path);
    if (cfg.target == HiggsTarget::Group)
        return (cfg.phi_mat[u].transpose() * prod * cfg.phi_mat[v]).trace();
    return cfg.phi_vec[u].dot(prod * cfg.phi_vec[v]);
}

inline double plaquette_mean(const FieldConfiguration& cfg) {
    double s = 0.0;
    for (const auto& p : cfg.lat().plaquettes()) s += plaquette_product(cfg, p).trace();
    return s / static_cast<double>(cfg.lat().plaquette_count());
}

inline double hopping_mean(const FieldConfiguration& cfg) {
    double s = 0.0;
    for (std::int64_t e = 0; e < cfg.lat().edge_count(); ++e)
        s += hopping_term(cfg, cfg.lat().positive_edge(e));
    return s / static_cast<double>(cfg.lat().edge_count());
}

/// |Phi_x|^2 at one site (Euclidean target).
inline double higgs_second_moment_site(const FieldConfiguration& cfg, Site x) {
    require(cfg.target == HiggsTarget::Euclidean, "higgs_second_moment: wrong target");
    return cfg.phi_vec[x].squaredNorm();
}

/// Volume average of |Phi_x|^2; same mean as any single site by
/// translation invariance, with smaller variance.
inline double higgs_second_moment_mean(const FieldConfiguration& cfg) {
    require(cfg.target == HiggsTarget::Euclidean, "higgs_second_moment: wrong target");
    double s = 0.0;
    for (const auto& p : cfg.phi_vec) s += p.squaredNorm();
    return s / static_cast<double>(cfg.phi_vec.size());
}

enum class ObservableKind {
    WilsonLoop,
    WilsonLine,
    PlaquetteMean,
    HoppingMean,
    HiggsSecondMoment,
    LocalFunction,
};

struct LocalFunctionEntry {
    std::function<double(const FieldConfiguration&)> fn;
    bool gauge_invariant = false;
};

/// Named local observables available to configs and the CLI.
inline std::map<std::string, LocalFunctionEntry>& local_function_registry() {
    static std::map<std::string, LocalFunctionEntry> registry = {
        {"mean_edge_trace",
         {[](const FieldConfiguration& cfg) {
              double s = 0.0;
              for (const auto& q : cfg.Q) s += q.trace();
              return s / static_cast<double>(cfg.Q.size());
          },
          false}},
        {"action_plaquette_density",
         {[](const FieldConfiguration& cfg) { return plaquette_mean(cfg); }, true}},
    };
    return registry;
}

struct ObservableSpec {
    ObservableKind kind = ObservableKind::PlaquetteMean;
    std::vector<DirectedEdge> path;  // loops and lines
    Site site = 0;                   // HiggsSecondMoment
    std::string name;                // LocalFunction key
    bool normalize = false;          // divide by N

    void validate(const Lattice& lat) const {
        switch (kind) {
            case ObservableKind::WilsonLoop:
                require(path_closed(lat, path), "ObservableSpec: WilsonLoop path not closed");
                break;
            case ObservableKind::WilsonLine:
                require(path_connected(lat, path),
                        "ObservableSpec: WilsonLine path not connected");
                break;
            case ObservableKind::LocalFunction:
                require(local_function_registry().count(name) > 0,
                        "ObservableSpec: unknown local function " + name);
                break;
            default:
                break;
        }
    }

    bool gauge_invariant() const {
        if (kind == ObservableKind::LocalFunction) {
            auto it = local_function_registry().find(name);
            return it != local_function_registry().end() && it->second.gauge_invariant;
        }
        return true;
    }

    std::string label() const {
        switch (kind) {
            case ObservableKind::WilsonLoop: return "wilson_loop";
            case ObservableKind::WilsonLine: return "wilson_line";
            case ObservableKind::PlaquetteMean: return "plaquette_mean";
            case ObservableKind::HoppingMean: return "hopping_mean";
            case ObservableKind::HiggsSecondMoment: return "higgs_second_moment";
            case ObservableKind::LocalFunction: return name;
        }
        return "?";
    }

    double evaluate(const FieldConfiguration& cfg) const {
        double value = 0.0;
        switch (kind) {
            case ObservableKind::WilsonLoop: value = wilson_loop(cfg, path); break;
            case ObservableKind::WilsonLine: value = wilson_line(cfg, path); break;
            case ObservableKind::PlaquetteMean: value = plaquette_mean(cfg); break;
            case ObservableKind::HoppingMean: value = hopping_mean(cfg); break;
            case ObservableKind::HiggsSecondMoment:
                value = higgs_second_moment_site(cfg, site);
                break;
            case ObservableKind::LocalFunction:
                value = local_function_registry().at(name).fn(cfg);
                break;
        }
        return normalize ? value / static_cast<double>(cfg.N) : value;
    }

    /// Sites the observable depends on, for separation distances.
    std::vector<Site> support(const Lattice& lat) const {
        std::vector<Site> sites;
        switch (kind) {
            case ObservableKind::WilsonLoop:
            case ObservableKind::WilsonLine:
                for (const auto& e : path) {
                    sites.push_back(lat.edge_from(e));
                    sites.push_back(lat.edge_to(e));
                }
                break;
            case ObservableKind::HiggsSecondMoment:
                sites.push_back(site);
                break;
            default:
                for (Site x = 0; x < lat.site_count(); ++x) sites.push_back(x);
                break;
        }
        return sites;
    }
};

}  // namespace ymh
