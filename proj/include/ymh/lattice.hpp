#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ymh/common.hpp"

namespace ymh {

using Site = std::int32_t;

/// An oriented lattice edge. Positive edges run from `base` to
/// `base + axis_hat`; the reversed flag flips start and end.
struct DirectedEdge {
    Site base = 0;  // base of the underlying positive edge
    std::int16_t axis = 0;
    bool reversed = false;

    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Closed length-4 path tracing the boundary of a unit square.
struct Plaquette {
    std::array<DirectedEdge, 4> edges;
};

/// Periodic d-dimensional torus Z^d cap L T^d: sites, positive edges,
/// canonical plaquettes, incidence and torus distance. Immutable after
/// construction and freely shared between workers.
class Lattice {
public:
    Lattice(int d, int L) : d_(d), L_(L) {
        require(d >= 2 && L >= 2, "build_lattice: unsupported-geometry (need d >= 2, L >= 2)");
        n_sites_ = 1;
        for (int i = 0; i < d; ++i) n_sites_ *= L;

        neighbors_.resize(static_cast<std::size_t>(n_sites_) * d * 2);
        std::vector<int> c(d);
        for (Site s = 0; s < n_sites_; ++s) {
            site_coords(s, c);
            for (int a = 0; a < d; ++a) {
                const int orig = c[a];
                c[a] = (orig + 1) % L_;
                neighbors_[neighbor_slot(s, a, +1)] = site_index(c);
                c[a] = (orig - 1 + L_) % L_;
                neighbors_[neighbor_slot(s, a, -1)] = site_index(c);
                c[a] = orig;
            }
        }

        for (int mu = 0; mu < d; ++mu)
            for (int nu = mu + 1; nu < d; ++nu) planes_.push_back({mu, nu});

        plaquettes_.reserve(static_cast<std::size_t>(n_sites_) * planes_.size());
        for (Site z = 0; z < n_sites_; ++z) {
            for (const auto& [mu, nu] : planes_) {
                // walk z -> z+mu -> z+mu+nu -> z+nu -> z
                const Site zmu = neighbor(z, mu, +1);
                const Site znu = neighbor(z, nu, +1);
                Plaquette p;
                p.edges[0] = DirectedEdge{z, static_cast<std::int16_t>(mu), false};
                p.edges[1] = DirectedEdge{zmu, static_cast<std::int16_t>(nu), false};
                p.edges[2] = DirectedEdge{znu, static_cast<std::int16_t>(mu), true};
                p.edges[3] = DirectedEdge{z, static_cast<std::int16_t>(nu), true};
                plaquettes_.push_back(p);
            }
        }

        // incidence table: the 2(d-1) oriented plaquettes starting at each
        // directed edge, for both orientations of every positive edge
        through_stride_ = 2 * (d_ - 1);
        through_.resize(static_cast<std::size_t>(edge_count()) * 2 * through_stride_);
        for (std::int64_t ei = 0; ei < edge_count(); ++ei) {
            for (int rev = 0; rev < 2; ++rev) {
                DirectedEdge e = positive_edge(ei);
                e.reversed = rev != 0;
                std::size_t slot = (static_cast<std::size_t>(ei) * 2 + rev) * through_stride_;
                for (const auto& p : build_plaquettes_through(e)) through_[slot++] = p;
            }
        }

        // per-site table of the 2d outgoing directed edges
        edges_at_.resize(static_cast<std::size_t>(n_sites_) * 2 * d_);
        for (Site x = 0; x < n_sites_; ++x) {
            std::size_t slot = static_cast<std::size_t>(x) * 2 * d_;
            for (int a = 0; a < d_; ++a) {
                edges_at_[slot++] = DirectedEdge{x, static_cast<std::int16_t>(a), false};
                edges_at_[slot++] =
                    DirectedEdge{neighbor(x, a, -1), static_cast<std::int16_t>(a), true};
            }
        }
    }

    int dim() const { return d_; }
    int side() const { return L_; }
    std::int64_t site_count() const { return n_sites_; }
    std::int64_t edge_count() const { return n_sites_ * d_; }
    std::int64_t plaquette_count() const { return static_cast<std::int64_t>(plaquettes_.size()); }
    const std::vector<Plaquette>& plaquettes() const { return plaquettes_; }

    Site neighbor(Site s, int axis, int dir) const {
        return neighbors_[neighbor_slot(s, axis, dir)];
    }

    void site_coords(Site s, std::vector<int>& out) const {
        out.resize(d_);
        for (int a = d_ - 1; a >= 0; --a) {
            out[a] = static_cast<int>(s % L_);
            s = static_cast<Site>(s / L_);
        }
    }

    std::vector<int> site_coords(Site s) const {
        std::vector<int> c;
        site_coords(s, c);
        return c;
    }

    Site site_index(const std::vector<int>& coords) const {
        Site s = 0;
        for (int a = 0; a < d_; ++a) {
            int v = coords[a] % L_;
            if (v < 0) v += L_;
            s = static_cast<Site>(s * L_ + v);
        }
        return s;
    }

    /// Positive edges are indexed as site * d + axis.
    std::int64_t edge_index(Site base, int axis) const {
        return static_cast<std::int64_t>(base) * d_ + axis;
    }

    DirectedEdge positive_edge(std::int64_t index) const {
        require(index >= 0 && index < edge_count(), "positive_edge: invalid-edge");
        return DirectedEdge{static_cast<Site>(index / d_),
                            static_cast<std::int16_t>(index % d_), false};
    }

    std::int64_t positive_index(const DirectedEdge& e) const { return edge_index(e.base, e.axis); }

    Site edge_from(const DirectedEdge& e) const {
        return e.reversed ? neighbor(e.base, e.axis, +1) : e.base;
    }
    Site edge_to(const DirectedEdge& e) const {
        return e.reversed ? e.base : neighbor(e.base, e.axis, +1);
    }

    static DirectedEdge reversed(DirectedEdge e) {
        e.reversed = !e.reversed;
        return e;
    }

    bool contains(const DirectedEdge& e) const {
        return e.base >= 0 && e.base < n_sites_ && e.axis >= 0 && e.axis < d_;
    }

    /// The 2(d-1) oriented plaquettes p with p starting at e: for each
    /// transverse axis the square is closed upward and downward.
    std::vector<Plaquette> plaquettes_through(const DirectedEdge& e) const {
        auto view = plaquettes_through_view(e);
        return {view.begin(), view.end()};
    }

    /// Table-backed view of the same, for hot loops.
    std::span<const Plaquette> plaquettes_through_view(const DirectedEdge& e) const {
        require(contains(e), "plaquettes_through: invalid-edge");
        const std::size_t slot =
            (static_cast<std::size_t>(positive_index(e)) * 2 + (e.reversed ? 1 : 0)) *
            through_stride_;
        return {through_.data() + slot, static_cast<std::size_t>(through_stride_)};
    }

    /// All 2d directed edges starting at x (d forward, d reversed).
    std::vector<DirectedEdge> edges_at(Site x) const {
        auto view = edges_at_view(x);
        return {view.begin(), view.end()};
    }

    std::span<const DirectedEdge> edges_at_view(Site x) const {
        require(x >= 0 && x < n_sites_, "edges_at: invalid site");
        return {edges_at_.data() + static_cast<std::size_t>(x) * 2 * d_,
                static_cast<std::size_t>(2 * d_)};
    }

    /// l^1 torus distance between sites.
    int torus_distance(Site a, Site b) const {
        std::vector<int> ca = site_coords(a), cb = site_coords(b);
        int dist = 0;
        for (int i = 0; i < d_; ++i) {
            int diff = std::abs(ca[i] - cb[i]);
            dist += std::min(diff, L_ - diff);
        }
        return dist;
    }

    /// min over pairs; zero iff the site sets intersect.
    int torus_distance(const std::vector<Site>& a, const std::vector<Site>& b) const {
        require(!a.empty() && !b.empty(), "torus_distance: invalid-region (empty set)");
        int best = d_ * L_;
        for (Site x : a)
            for (Site y : b) best = std::min(best, torus_distance(x, y));
        return best;
    }

    std::vector<Site> plaquette_sites(const Plaquette& p) const {
        std::vector<Site> s;
        s.reserve(4);
        for (const auto& e : p.edges) s.push_back(edge_from(e));
        return s;
    }

    std::vector<Site> edge_sites(const DirectedEdge& e) const {
        return {edge_from(e), edge_to(e)};
    }

private:
    std::size_t neighbor_slot(Site s, int axis, int dir) const {
        return (static_cast<std::size_t>(s) * d_ + axis) * 2 + (dir > 0 ? 0 : 1);
    }

    std::vector<Plaquette> build_plaquettes_through(const DirectedEdge& e) const {
        std::vector<Plaquette> result;
        result.reserve(2 * (d_ - 1));
        const Site c0 = edge_from(e);
        const Site c1 = edge_to(e);
        for (int nu = 0; nu < d_; ++nu) {
            if (nu == e.axis) continue;
            for (int sign : {+1, -1}) {
                const Site c2 = neighbor(c1, nu, sign);
                const Site c3 = neighbor(c0, nu, sign);
                Plaquette p;
                p.edges[0] = e;
                p.edges[1] = edge_between(c1, c2, nu, sign);
                p.edges[2] = edge_between(c2, c3, e.axis, e.reversed ? +1 : -1);
                p.edges[3] = edge_between(c3, c0, nu, -sign);
                result.push_back(p);
            }
        }
        return result;
    }

    /// Directed edge from `from` to `to` along `axis`; dir is +1 when the
    /// walk goes in the positive axis direction.
    DirectedEdge edge_between(Site from, Site /*to*/, int axis, int dir) const {
        if (dir > 0) return DirectedEdge{from, static_cast<std::int16_t>(axis), false};
        return DirectedEdge{neighbor(from, axis, -1), static_cast<std::int16_t>(axis), true};
    }

    int d_, L_;
    std::int64_t n_sites_ = 0;
    std::vector<Site> neighbors_;
    std::vector<std::pair<int, int>> planes_;
    std::vector<Plaquette> plaquettes_;
    std::vector<Plaquette> through_;
    int through_stride_ = 0;
    std::vector<DirectedEdge> edges_at_;
};

}  // namespace ymh
