#pragma once

#include <memory>
#include <vector>

#include "ymh/geometry.hpp"
#include "ymh/lattice.hpp"
#include "ymh/rng.hpp"

namespace ymh {

enum class HiggsTarget { Euclidean, Sphere, Group };

inline const char* target_name(HiggsTarget t) {
    switch (t) {
        case HiggsTarget::Euclidean: return "euclidean";
        case HiggsTarget::Sphere: return "sphere";
        case HiggsTarget::Group: return "group";
    }
    return "?";
}

/// Model couplings in the 't Hooft normalization: the action carries
/// N*beta on plaquettes, N*kappa on hopping and N*m on the mass term.
struct Couplings {
    int N = 2;
    double beta = 0.0;
    double kappa = 0.0;
    double m = 0.0;  // only used by the Euclidean target
    HiggsTarget target = HiggsTarget::Euclidean;

    void validate() const { require(N >= 2, "Couplings: N must be >= 2"); }

    /// Gibbs sampling of the Euclidean target needs a normalizable
    /// measure: m > 0, with kappa = 0 admitted as the decoupled
    /// (exact Gaussian) case.
    void validate_for_measure() const {
        validate();
        if (target == HiggsTarget::Euclidean)
            require(m > 0.0 && kappa >= 0.0,
                    "Couplings: Euclidean Gibbs measure requires m > 0 and kappa >= 0");
    }
};

/// Edge field Q and Higgs field Phi over a lattice. Edge matrices are
/// stored for positive edges only; reversed edges read the transpose.
struct FieldConfiguration {
    std::shared_ptr<const Lattice> lattice;
    int N = 0;
    HiggsTarget target = HiggsTarget::Euclidean;
    std::vector<Matrix> Q;        // per positive edge
    std::vector<Vector> phi_vec;  // Euclidean / Sphere sites
    std::vector<Matrix> phi_mat;  // Group sites

    const Lattice& lat() const { return *lattice; }

    static FieldConfiguration cold(std::shared_ptr<const Lattice> lattice, const Couplings& c) {
        c.validate();
        FieldConfiguration cfg;
        cfg.lattice = std::move(lattice);
        cfg.N = c.N;
        cfg.target = c.target;
        cfg.Q.assign(cfg.lat().edge_count(), Matrix::Identity(c.N, c.N));
        const auto sites = cfg.lat().site_count();
        if (c.target == HiggsTarget::Group) {
            cfg.phi_mat.assign(sites, Matrix::Identity(c.N, c.N));
        } else {
            Vector v = Vector::Zero(c.N);
            if (c.target == HiggsTarget::Sphere) v(0) = 1.0;
            cfg.phi_vec.assign(sites, v);
        }
        return cfg;
    }

    /// Disordered start: Haar edges; Higgs uniform on the sphere / Haar on
    /// the group / centered Gaussian with the free-field scale (Euclidean).
    static FieldConfiguration hot(std::shared_ptr<const Lattice> lattice, const Couplings& c,
                                  Rng& rng) {
        FieldConfiguration cfg = cold(std::move(lattice), c);
        for (auto& q : cfg.Q) q = haar_sample(c.N, rng);
        const auto sites = cfg.lat().site_count();
        for (std::int64_t x = 0; x < sites; ++x) {
            switch (c.target) {
                case HiggsTarget::Group:
                    cfg.phi_mat[x] = haar_sample(c.N, rng);
                    break;
                case HiggsTarget::Sphere: {
                    Vector v(c.N);
                    for (int i = 0; i < c.N; ++i) v(i) = rng.gaussian();
                    cfg.phi_vec[x] = v.normalized();
                    break;
                }
                case HiggsTarget::Euclidean: {
                    const double sd =
                        c.m > 0.0 ? 1.0 / std::sqrt(2.0 * c.m * c.N) : 1.0;
                    Vector v(c.N);
                    for (int i = 0; i < c.N; ++i) v(i) = sd * rng.gaussian();
                    cfg.phi_vec[x] = v;
                    break;
                }
            }
        }
        return cfg;
    }

    /// Componentwise manifold membership, used by tests and after loads.
    bool valid(double orth_tol = kOrthTol, double sphere_tol = kSphereTol) const {
        for (const auto& q : Q)
            if (!is_special_orthogonal(q, orth_tol)) return false;
        if (target == HiggsTarget::Group) {
            for (const auto& p : phi_mat)
                if (!is_special_orthogonal(p, orth_tol)) return false;
        } else if (target == HiggsTarget::Sphere) {
            for (const auto& p : phi_vec)
                if (!is_unit_vector(p, sphere_tol)) return false;
        } else {
            for (const auto& p : phi_vec)
                if (!p.allFinite()) return false;
        }
        return true;
    }
};

/// Tangent vector at a configuration: skew X_e per edge (tangent X_e Q_e)
/// and per-site Higgs tangents (free vector, base-orthogonal vector, or
/// skew Y_x with tangent Y_x Phi_x for the group target).
struct TangentVector {
    std::vector<Matrix> X;    // per positive edge, skew
    std::vector<Vector> v;    // Euclidean/Sphere sites
    std::vector<Matrix> Y;    // Group sites, skew

    static TangentVector zero(const FieldConfiguration& cfg) {
        TangentVector t;
        t.X.assign(cfg.lat().edge_count(), Matrix::Zero(cfg.N, cfg.N));
        if (cfg.target == HiggsTarget::Group)
            t.Y.assign(cfg.lat().site_count(), Matrix::Zero(cfg.N, cfg.N));
        else
            t.v.assign(cfg.lat().site_count(), Vector::Zero(cfg.N));
        return t;
    }

    /// Squared norm: sum of HS norms of edge parts plus site tangents
    /// (|Y_x Phi_x| = |Y_x| on the group since Phi is orthogonal).
    double squared_norm() const {
        double s = 0.0;
        for (const auto& x : X) s += x.squaredNorm();
        for (const auto& w : v) s += w.squaredNorm();
        for (const auto& y : Y) s += y.squaredNorm();
        return s;
    }

    TangentVector& operator+=(const TangentVector& o) {
        for (std::size_t i = 0; i < X.size(); ++i) X[i] += o.X[i];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        for (std::size_t i = 0; i < Y.size(); ++i) Y[i] += o.Y[i];
        return *this;
    }

    TangentVector& operator*=(double a) {
        for (auto& x : X) x *= a;
        for (auto& w : v) w *= a;
        for (auto& y : Y) y *= a;
        return *this;
    }
};

/// Q_e for either orientation: stored matrix for positive edges, its
/// transpose (= inverse) for reversed edges.
inline Matrix edge_value(const FieldConfiguration& cfg, const DirectedEdge& e) {
    const Matrix& q = cfg.Q[cfg.lat().positive_index(e)];
    if (e.reversed) return q.transpose();
    return q;
}

/// Allocation-free variant for hot loops.
inline void edge_value_into(Matrix& out, const FieldConfiguration& cfg, const DirectedEdge& e) {
    const Matrix& q = cfg.Q[cfg.lat().positive_index(e)];
    if (e.reversed)
        out = q.transpose();
    else
        out = q;
}

/// Higgs value at a site, vector targets.
inline const Vector& site_value_vec(const FieldConfiguration& cfg, Site x) {
    return cfg.phi_vec[x];
}

/// Ordered product of edge values along a path.
inline Matrix path_product(const FieldConfiguration& cfg, const std::vector<DirectedEdge>& path) {
    require(!path.empty(), "path_product: empty path");
    Matrix prod = edge_value(cfg, path[0]);
    for (std::size_t i = 1; i < path.size(); ++i) prod *= edge_value(cfg, path[i]);
    return prod;
}

inline Matrix plaquette_product(const FieldConfiguration& cfg, const Plaquette& p) {
    const Lattice& lat = cfg.lat();
    for (int i = 0; i < 4; ++i)
        require(lat.edge_to(p.edges[i]) == lat.edge_from(p.edges[(i + 1) % 4]),
                "plaquette_product: non-closed path");
    Matrix prod = edge_value(cfg, p.edges[0]);
    for (int i = 1; i < 4; ++i) prod *= edge_value(cfg, p.edges[i]);
    return prod;
}

/// Sum over the 2(d-1) plaquettes p > e of the partial products
/// Q_{e2} Q_{e3} Q_{e4}, so that sum_p Q_p = Q_e * staple(e).
inline void edge_staple_into(Matrix& staple, const FieldConfiguration& cfg,
                             const DirectedEdge& e) {
    thread_local Matrix e1, e2, e3, t;
    staple = Matrix::Zero(cfg.N, cfg.N);
    t.resize(cfg.N, cfg.N);
    for (const auto& p : cfg.lat().plaquettes_through_view(e)) {
        edge_value_into(e1, cfg, p.edges[1]);
        edge_value_into(e2, cfg, p.edges[2]);
        edge_value_into(e3, cfg, p.edges[3]);
        t.noalias() = e1 * e2;
        staple.noalias() += t * e3;
    }
}

inline Matrix edge_staple(const FieldConfiguration& cfg, const DirectedEdge& e) {
    Matrix staple;
    edge_staple_into(staple, cfg, e);
    return staple;
}

/// Gauge covariant derivative Q_e Phi_{v(e)} - Phi_{u(e)}, vector targets.
inline Vector covariant_derivative_vec(const FieldConfiguration& cfg, const DirectedEdge& e) {
    require(cfg.target != HiggsTarget::Group, "covariant_derivative_vec: target mismatch");
    return edge_value(cfg, e) * cfg.phi_vec[cfg.lat().edge_to(e)] -
           cfg.phi_vec[cfg.lat().edge_from(e)];
}

/// Gauge covariant derivative for the group target.
inline Matrix covariant_derivative_mat(const FieldConfiguration& cfg, const DirectedEdge& e) {
    require(cfg.target == HiggsTarget::Group, "covariant_derivative_mat: target mismatch");
    return edge_value(cfg, e) * cfg.phi_mat[cfg.lat().edge_to(e)] -
           cfg.phi_mat[cfg.lat().edge_from(e)];
}

/// Hopping scalar on one positive edge e = (x, y):
///   Euclidean: |Q_e Phi_y - Phi_x|^2
///   Sphere:    Phi_x . Q_e Phi_y
///   Group:     Tr(Phi_x^t Q_e Phi_y)
inline double hopping_term(const FieldConfiguration& cfg, const DirectedEdge& e) {
    const Lattice& lat = cfg.lat();
    const Site x = lat.edge_from(e), y = lat.edge_to(e);
    switch (cfg.target) {
        case HiggsTarget::Euclidean:
            return (edge_value(cfg, e) * cfg.phi_vec[y] - cfg.phi_vec[x]).squaredNorm();
        case HiggsTarget::Sphere:
            return cfg.phi_vec[x].dot(edge_value(cfg, e) * cfg.phi_vec[y]);
        case HiggsTarget::Group:
            return (cfg.phi_mat[x].transpose() * edge_value(cfg, e) * cfg.phi_mat[y]).trace();
    }
    return 0.0;
}

/// The action S(Q, Phi) = N beta sum_p Tr(Q_p) - S2 with the
/// target-specific Higgs part; the measure is proportional to exp(S).
inline double action(const FieldConfiguration& cfg, const Couplings& c) {
    require(cfg.target == c.target && cfg.N == c.N, "action: target mismatch");
    const Lattice& lat = cfg.lat();
    double s1 = 0.0;
    for (const auto& p : lat.plaquettes()) s1 += plaquette_product(cfg, p).trace();
    s1 *= c.N * c.beta;

    double hop = 0.0;
    for (std::int64_t ei = 0; ei < lat.edge_count(); ++ei)
        hop += hopping_term(cfg, lat.positive_edge(ei));

    switch (cfg.target) {
        case HiggsTarget::Euclidean: {
            double mass = 0.0;
            for (const auto& p : cfg.phi_vec) mass += p.squaredNorm();
            return s1 - c.kappa * c.N * hop - c.m * c.N * mass;
        }
        case HiggsTarget::Sphere:
        case HiggsTarget::Group:
            return s1 + 2.0 * c.kappa * c.N * hop;
    }
    return 0.0;
}

/// Gradient of the action along edge e in E+, returned as the skew X_e
/// with tangent X_e Q_e:
///   X_e = -1/2 N beta sum_{p > e} (Q_p - Q_p^t)
///         - kappa N (Q_e Phi_y Phi_x^t - Phi_x Phi_y^t Q_e^t).
inline void grad_edge_into(Matrix& x, const FieldConfiguration& cfg, const Couplings& c,
                           std::int64_t edge_idx) {
    thread_local Matrix staple, qp_sum, m, t;
    const Lattice& lat = cfg.lat();
    const DirectedEdge e = lat.positive_edge(edge_idx);
    const Matrix& qe = cfg.Q[edge_idx];
    x = Matrix::Zero(cfg.N, cfg.N);
    if (c.beta != 0.0) {
        edge_staple_into(staple, cfg, e);
        qp_sum.noalias() = qe * staple;
        x.noalias() += (-0.5 * c.N * c.beta) * qp_sum;
        x.noalias() += (0.5 * c.N * c.beta) * qp_sum.transpose();
    }
    if (c.kappa != 0.0) {
        const Site sx = lat.edge_from(e), sy = lat.edge_to(e);
        if (cfg.target == HiggsTarget::Group) {
            t.noalias() = qe * cfg.phi_mat[sy];
            m.noalias() = t * cfg.phi_mat[sx].transpose();
        } else {
            m.noalias() = (qe * cfg.phi_vec[sy]) * cfg.phi_vec[sx].transpose();
        }
        x.noalias() -= (c.kappa * c.N) * m;
        x.noalias() += (c.kappa * c.N) * m.transpose();
    }
}

inline Matrix grad_edge(const FieldConfiguration& cfg, const Couplings& c,
                        std::int64_t edge_idx) {
    Matrix x;
    grad_edge_into(x, cfg, c, edge_idx);
    return x;
}

/// Site gradient for the vector-valued targets:
///   Euclidean: 2 kappa N sum_{e=(x,y)} (Q_e Phi_y - Phi_x) - 2 m N Phi_x
///   Sphere:    2 kappa N sum_{e=(x,y)} (Q_e Phi_y - (Phi_x . Q_e Phi_y) Phi_x)
/// where the sum runs over the 2d directed edges leaving x.
inline Vector grad_site_vec(const FieldConfiguration& cfg, const Couplings& c, Site x) {
    require(cfg.target != HiggsTarget::Group, "grad_site_vec: target mismatch");
    const Lattice& lat = cfg.lat();
    const Vector& phix = cfg.phi_vec[x];
    Vector g = Vector::Zero(cfg.N);
    if (c.kappa != 0.0) {
        for (const auto& e : lat.edges_at(x)) {
            Vector qphi = edge_value(cfg, e) * cfg.phi_vec[lat.edge_to(e)];
            if (cfg.target == HiggsTarget::Euclidean)
                g += qphi - phix;
            else
                g += qphi - phix.dot(qphi) * phix;
        }
        g *= 2.0 * c.kappa * c.N;
    }
    if (cfg.target == HiggsTarget::Euclidean) g -= 2.0 * c.m * c.N * phix;
    return g;
}

/// Site gradient for the group target, returned as the skew Y_x with
/// tangent Y_x Phi_x:
///   Y_x = kappa N sum_{e=(x,y)} (Q_e Phi_y Phi_x^t - Phi_x Phi_y^t Q_e^t).
inline Matrix grad_site_group(const FieldConfiguration& cfg, const Couplings& c, Site x) {
    require(cfg.target == HiggsTarget::Group, "grad_site_group: target mismatch");
    const Lattice& lat = cfg.lat();
    Matrix y = Matrix::Zero(cfg.N, cfg.N);
    if (c.kappa == 0.0) return y;
    const Matrix& phix = cfg.phi_mat[x];
    for (const auto& e : lat.edges_at(x)) {
        Matrix m = edge_value(cfg, e) * cfg.phi_mat[lat.edge_to(e)] * phix.transpose();
        y += m - m.transpose();
    }
    return c.kappa * c.N * y;
}

/// New configuration with Q_e -> g_x Q_e g_y^-1 and Phi_x -> g_x Phi_x.
inline FieldConfiguration gauge_transform(const FieldConfiguration& cfg,
                                          const std::vector<Matrix>& g) {
    const Lattice& lat = cfg.lat();
    require(static_cast<std::int64_t>(g.size()) == lat.site_count(),
            "gauge_transform: g must be defined on all sites");
    FieldConfiguration out = cfg;
    for (std::int64_t ei = 0; ei < lat.edge_count(); ++ei) {
        const DirectedEdge e = lat.positive_edge(ei);
        out.Q[ei] = g[lat.edge_from(e)] * cfg.Q[ei] * g[lat.edge_to(e)].transpose();
    }
    for (std::int64_t x = 0; x < lat.site_count(); ++x) {
        if (cfg.target == HiggsTarget::Group)
            out.phi_mat[x] = g[x] * cfg.phi_mat[x];
        else
            out.phi_vec[x] = g[x] * cfg.phi_vec[x];
    }
    return out;
}

/// Displace a configuration along a tangent vector by parameter t:
/// exp(t X_e) Q_e on edges and the target geodesic on sites.
inline FieldConfiguration displace(const FieldConfiguration& cfg, const TangentVector& tv,
                                   double t) {
    FieldConfiguration out = cfg;
    for (std::size_t ei = 0; ei < cfg.Q.size(); ++ei)
        if (tv.X[ei].squaredNorm() > 0.0) out.Q[ei] = group_exp(t * tv.X[ei]) * cfg.Q[ei];
    const auto sites = cfg.lat().site_count();
    for (std::int64_t x = 0; x < sites; ++x) {
        switch (cfg.target) {
            case HiggsTarget::Euclidean:
                out.phi_vec[x] = cfg.phi_vec[x] + t * tv.v[x];
                break;
            case HiggsTarget::Sphere:
                out.phi_vec[x] = sphere_exp(cfg.phi_vec[x], t * tv.v[x]);
                break;
            case HiggsTarget::Group:
                if (tv.Y[x].squaredNorm() > 0.0)
                    out.phi_mat[x] = group_exp(t * tv.Y[x]) * cfg.phi_mat[x];
                break;
        }
    }
    return out;
}

/// Quadratic form Hess_S(v, v) = d^2/dt^2 S(Gamma(t)) at t = 0 along the
/// geodesic Gamma through cfg with velocity v, via a 5-point central
/// second difference with a Richardson consistency check. Used for
/// verifying curvature bounds, not for exact curvature computation.
inline double hessian_form(const FieldConfiguration& cfg, const Couplings& c,
                           const TangentVector& tv, double h = 1e-2) {
    const double norm = std::sqrt(tv.squared_norm());
    if (norm == 0.0) return 0.0;

    auto second_diff = [&](double step) {
        const double fp2 = action(displace(cfg, tv, 2.0 * step), c);
        const double fp1 = action(displace(cfg, tv, step), c);
        const double f0 = action(cfg, c);
        const double fm1 = action(displace(cfg, tv, -step), c);
        const double fm2 = action(displace(cfg, tv, -2.0 * step), c);
        return (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * step * step);
    };

    // work at unit tangent scale to keep the stencil well conditioned
    const double step = h / norm;
    const double d1 = second_diff(step);
    const double d2 = second_diff(step / 2.0);
    const double scale = std::max({std::abs(d1), std::abs(d2), 1.0});
    if (std::abs(d1 - d2) > 1e-3 * scale)
        throw NumericError("hessian_form: finite-difference step failed consistency check");
    return d2;
}

/// Gauge transformation with g_x = Phi_x^t, sending Phi to the identity
/// at every site (the U-gauge).
inline FieldConfiguration ugauge_fix(const FieldConfiguration& cfg) {
    require(cfg.target == HiggsTarget::Group, "ugauge_fix: target mismatch");
    std::vector<Matrix> g;
    g.reserve(cfg.phi_mat.size());
    for (const auto& p : cfg.phi_mat) g.push_back(p.transpose());
    FieldConfiguration out = gauge_transform(cfg, g);
    for (auto& p : out.phi_mat) p = Matrix::Identity(cfg.N, cfg.N);
    return out;
}

/// Action of the U-gauge-fixed model on the Q field alone:
/// N beta sum_p Tr(Q_p) + 2 kappa N sum_e Tr(Q_e).
inline double gauge_fixed_action(const FieldConfiguration& cfg, const Couplings& c) {
    const Lattice& lat = cfg.lat();
    double s1 = 0.0;
    for (const auto& p : lat.plaquettes()) s1 += plaquette_product(cfg, p).trace();
    double edge_tr = 0.0;
    for (const auto& q : cfg.Q) edge_tr += q.trace();
    return c.N * c.beta * s1 + 2.0 * c.kappa * c.N * edge_tr;
}

}  // namespace ymh
