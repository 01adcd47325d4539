// Acceptance suite: each criterion prints one [PASS]/[FAIL] line plus
// supporting detail. Usage: acceptance [--quick] [criterion numbers].
// With no numbers, all criteria run. --quick shrinks the statistical
// runs for development; the registered test suite runs at full size.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ymh/driver.hpp"

using namespace ymh;

namespace {

bool g_quick = false;

double scale_count(double full) { return g_quick ? full / 20.0 : full; }

struct Criterion {
    int id;
    std::string title;
    std::function<bool(std::ostream&)> run;
};

Couplings make_couplings(HiggsTarget t, int n, double beta, double kappa, double m = 1.0) {
    Couplings c;
    c.N = n;
    c.beta = beta;
    c.kappa = kappa;
    c.m = m;
    c.target = t;
    return c;
}

std::vector<Matrix> random_gauge(const Lattice& lat, int n, Rng& rng) {
    std::vector<Matrix> g;
    for (std::int64_t x = 0; x < lat.site_count(); ++x) g.push_back(haar_sample(n, rng));
    return g;
}

TangentVector random_tangent(const FieldConfiguration& cfg, Rng& rng, bool edges = true,
                             bool sites = true) {
    TangentVector tv = TangentVector::zero(cfg);
    if (edges)
        for (auto& x : tv.X) x = algebra_gaussian(cfg.N, 1.0, rng);
    if (sites) {
        for (std::int64_t s = 0; s < cfg.lat().site_count(); ++s) {
            switch (cfg.target) {
                case HiggsTarget::Group:
                    tv.Y[s] = algebra_gaussian(cfg.N, 1.0, rng);
                    break;
                case HiggsTarget::Sphere: {
                    Vector w(cfg.N);
                    for (int i = 0; i < cfg.N; ++i) w(i) = rng.gaussian();
                    tv.v[s] = sphere_tangent_project(cfg.phi_vec[s], w);
                    break;
                }
                case HiggsTarget::Euclidean: {
                    Vector w(cfg.N);
                    for (int i = 0; i < cfg.N; ++i) w(i) = rng.gaussian();
                    tv.v[s] = w;
                    break;
                }
            }
        }
    }
    return tv;
}

double gradient_pairing(const FieldConfiguration& cfg, const Couplings& c,
                        const TangentVector& tv) {
    double sum = 0.0;
    for (std::int64_t ei = 0; ei < cfg.lat().edge_count(); ++ei)
        sum += hs_inner(grad_edge(cfg, c, ei), tv.X[ei]);
    for (std::int64_t x = 0; x < cfg.lat().site_count(); ++x) {
        if (cfg.target == HiggsTarget::Group)
            sum += hs_inner(grad_site_group(cfg, c, x), tv.Y[x]);
        else
            sum += grad_site_vec(cfg, c, x).dot(tv.v[x]);
    }
    return sum;
}

double fd_directional(const FieldConfiguration& cfg, const Couplings& c,
                      const TangentVector& tv) {
    const double steps[] = {1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6};
    double best = 0.0, best_gap = 1e300, prev = 0.0;
    bool have_prev = false;
    for (double h : steps) {
        const double d =
            (action(displace(cfg, tv, h), c) - action(displace(cfg, tv, -h), c)) / (2.0 * h);
        if (have_prev && std::abs(d - prev) < best_gap) {
            best_gap = std::abs(d - prev);
            best = d;
        }
        prev = d;
        have_prev = true;
    }
    return best;
}

ConfigMap base_config(HiggsTarget target, int d, int L, int N, double beta, double kappa,
                      double m, std::uint64_t seed) {
    std::ostringstream ss;
    ss << "[lattice]\nd = " << d << "\nL = " << L << "\n[couplings]\nN = " << N
       << "\nbeta = " << beta << "\nkappa = " << kappa << "\nm = " << m << "\ntarget = \""
       << target_name(target) << "\"\n[run]\nseed = " << seed << "\n";
    return ConfigMap::parse(ss.str());
}

// -------------------------------------------------------------------
// 1. gradient exactness

bool criterion_gradients(std::ostream& os) {
    auto lat = std::make_shared<Lattice>(2, 3);
    Rng rng(1001);
    double worst = 0.0;
    for (HiggsTarget t : {HiggsTarget::Euclidean, HiggsTarget::Sphere, HiggsTarget::Group}) {
        for (int N : {2, 3, 5}) {
            Couplings c = make_couplings(t, N, 0.3, 0.25, 0.8);
            for (int cfg_i = 0; cfg_i < 7; ++cfg_i) {
                auto cfg = FieldConfiguration::hot(lat, c, rng);
                for (int trial = 0; trial < 20; ++trial) {
                    TangentVector tv = random_tangent(cfg, rng);
                    const double exact = gradient_pairing(cfg, c, tv);
                    const double fd = fd_directional(cfg, c, tv);
                    const double rel =
                        std::abs(exact - fd) / std::max(1.0, std::abs(exact));
                    worst = std::max(worst, rel);
                }
            }
        }
    }
    os << "    max relative gradient error over targets x N x 7 cfgs x 20 tangents: "
       << worst << " (tolerance 1e-6)\n";
    return worst <= 1e-6;
}

// -------------------------------------------------------------------
// 2. gauge invariance and covariance

bool criterion_gauge(std::ostream& os) {
    auto lat = std::make_shared<Lattice>(2, 3);
    Rng rng(2002);
    bool pass = true;
    double worst_inv = 0.0, worst_cov = 0.0;
    for (HiggsTarget t : {HiggsTarget::Euclidean, HiggsTarget::Sphere, HiggsTarget::Group}) {
        Couplings c = make_couplings(t, 3, 0.3, 0.25, 1.0);
        auto cfg = FieldConfiguration::hot(lat, c, rng);
        auto loop = rectangle_loop(*lat, 0, 0, 2, 1, 1);
        auto line = step_path(*lat, 0, {{0, +1}, {1, +1}});
        const double s0 = action(cfg, c);
        const double w0 = wilson_loop(cfg, loop);
        const double l0 = wilson_line(cfg, line);
        for (int trial = 0; trial < 50; ++trial) {
            auto g = random_gauge(*lat, c.N, rng);
            auto moved = gauge_transform(cfg, g);
            worst_inv = std::max(
                worst_inv, std::abs(action(moved, c) - s0) / (1.0 + std::abs(s0)));
            worst_inv = std::max(
                worst_inv, std::abs(wilson_loop(moved, loop) - w0) / (1.0 + std::abs(w0)));
            worst_inv = std::max(
                worst_inv, std::abs(wilson_line(moved, line) - l0) / (1.0 + std::abs(l0)));
        }

        // pathwise gauge covariance of one Langevin step under
        // conjugated noise realizations
        auto g = random_gauge(*lat, c.N, rng);
        const double dt = 2e-3;
        TangentNoise noise = sample_noise(cfg, 777, 0);
        TangentNoise conj = noise;
        for (std::int64_t e = 0; e < lat->edge_count(); ++e) {
            const Site x = lat->edge_from(lat->positive_edge(e));
            conj.xi[e] = g[x] * noise.xi[e] * g[x].transpose();
        }
        for (std::int64_t x = 0; x < lat->site_count(); ++x) {
            if (t == HiggsTarget::Group)
                conj.zeta[x] = g[x] * noise.zeta[x] * g[x].transpose();
            else
                conj.eta[x] = g[x] * noise.eta[x];
        }
        auto a = gauge_transform(step_geodesic(cfg, c, dt, noise), g);
        auto b = step_geodesic(gauge_transform(cfg, g), c, dt, conj);
        for (std::size_t e = 0; e < a.Q.size(); ++e)
            worst_cov = std::max(worst_cov, (a.Q[e] - b.Q[e]).cwiseAbs().maxCoeff());
        for (std::size_t x = 0; x < a.phi_vec.size(); ++x)
            worst_cov =
                std::max(worst_cov, (a.phi_vec[x] - b.phi_vec[x]).cwiseAbs().maxCoeff());
        for (std::size_t x = 0; x < a.phi_mat.size(); ++x)
            worst_cov =
                std::max(worst_cov, (a.phi_mat[x] - b.phi_mat[x]).cwiseAbs().maxCoeff());
    }
    os << "    worst relative invariance defect (action/loops/lines, 50 gauges): "
       << worst_inv << " (tolerance 1e-9)\n";
    os << "    worst pathwise covariance defect of one step: " << worst_cov
       << " (tolerance 1e-10)\n";
    pass = worst_inv <= 1e-9 && worst_cov <= 1e-10;
    return pass;
}

// -------------------------------------------------------------------
// 3. geometry constants and curvature inequality

bool criterion_geometry(std::ostream& os) {
    bool pass = true;

    double worst_basis = 0.0;
    for (int n = 2; n <= 8; ++n) {
        Matrix sum = Matrix::Zero(n, n);
        for (const auto& v : so_basis(n)) sum += v * v;
        const double defect = (sum + 0.5 * (n - 1) * Matrix::Identity(n, n)).norm();
        worst_basis = std::max(worst_basis, defect);
    }
    os << "    max | sum v_a^2 + (N-1)/2 I | over N=2..8: " << worst_basis
       << " (tolerance 1e-12)\n";
    pass = pass && worst_basis <= 1e-12;

    auto lat = std::make_shared<Lattice>(2, 2);
    Rng rng(3003);

    // sphere target
    {
        Couplings c = make_couplings(HiggsTarget::Sphere, 8, 0.001, 0.002);
        auto k = k_sphere(c.N, c.beta, c.kappa, lat->dim());
        double min_margin = 1e300;
        for (int trial = 0; trial < 200; ++trial) {
            auto cfg = FieldConfiguration::hot(lat, c, rng);
            TangentVector tv = random_tangent(cfg, rng);
            double vq2 = 0.0, vp2 = 0.0;
            for (const auto& x : tv.X) vq2 += x.squaredNorm();
            for (const auto& w : tv.v) vp2 += w.squaredNorm();
            const double lhs = ricci_form(c.target, c.N, vq2, vp2) - hessian_form(cfg, c, tv);
            min_margin = std::min(min_margin, lhs / (vq2 + vp2));
        }
        os << "    sphere: min (Ricci-Hess)/|v|^2 = " << min_margin << " vs K = " << k.value
           << " - tol " << 1e-3 * c.N << "\n";
        pass = pass && k.positive && min_margin >= k.value - 1e-3 * c.N;
    }

    // group target
    {
        Couplings c = make_couplings(HiggsTarget::Group, 8, 0.002, 0.005);
        auto k = k_group(c.N, c.beta, c.kappa, lat->dim());
        double min_margin = 1e300;
        for (int trial = 0; trial < 200; ++trial) {
            auto cfg = FieldConfiguration::hot(lat, c, rng);
            TangentVector tv = random_tangent(cfg, rng);
            double vq2 = 0.0, vp2 = 0.0;
            for (const auto& x : tv.X) vq2 += x.squaredNorm();
            for (const auto& y : tv.Y) vp2 += y.squaredNorm();
            const double lhs = ricci_form(c.target, c.N, vq2, vp2) - hessian_form(cfg, c, tv);
            min_margin = std::min(min_margin, lhs / (vq2 + vp2));
        }
        os << "    group: min (Ricci-Hess)/|v|^2 = " << min_margin << " vs K = " << k.value
           << " - tol " << 1e-3 * c.N << "\n";
        pass = pass && k.positive && min_margin >= k.value - 1e-3 * c.N;
    }

    // Euclidean target: the certified pointwise inequalities are the
    // site-marginal convexity (-Hess >= 2 m N on Phi directions, any Q)
    // and the Yang-Mills Hessian bound on edge directions; the formula
    // constant itself certifies the Q-marginal, which has no pointwise
    // finite-difference form.
    {
        Couplings c = make_couplings(HiggsTarget::Euclidean, 8, 0.002, 0.05, 1.0);
        auto k = k_euclidean(c.N, c.beta, c.kappa, c.m, lat->dim());
        double min_site = 1e300;
        for (int trial = 0; trial < 200; ++trial) {
            auto cfg = FieldConfiguration::hot(lat, c, rng);
            TangentVector tv = random_tangent(cfg, rng, false, true);
            const double n2 = tv.squared_norm();
            min_site = std::min(min_site, -hessian_form(cfg, c, tv) / n2);
        }
        Couplings ym = make_couplings(HiggsTarget::Euclidean, 8, 0.002, 0.0, 1.0);
        const double ym_bound = 8.0 * (lat->dim() - 1) * ym.N * std::abs(ym.beta);
        double max_ym = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            auto cfg = FieldConfiguration::hot(lat, ym, rng);
            TangentVector tv = random_tangent(cfg, rng, true, false);
            max_ym = std::max(max_ym,
                              std::abs(hessian_form(cfg, ym, tv)) / tv.squared_norm());
        }
        os << "    euclidean: K formula = " << k.value
           << " (>0), min -Hess/|v|^2 on site directions = " << min_site << " vs 2mN = "
           << 2.0 * c.m * c.N << ", max |Hess_YM|/|v|^2 = " << max_ym
           << " vs 8(d-1)N|beta| = " << ym_bound << "\n";
        pass = pass && k.positive && min_site >= 2.0 * c.m * c.N - 1e-3 * c.N &&
               max_ym <= ym_bound + 1e-3 * c.N;
    }
    return pass;
}

// -------------------------------------------------------------------
// 4. stationarity cross-validation

bool criterion_stationarity(std::ostream& os) {
    bool pass = true;
    for (HiggsTarget t : {HiggsTarget::Euclidean, HiggsTarget::Sphere, HiggsTarget::Group}) {
        ConfigMap cm = base_config(t, 2, 3, 3, 0.2, 0.2, 1.0, 4004);
        cm.apply_override("run.engine=langevin");
        cm.apply_override("compare.dts=[2e-3, 1e-3]");
        cm.apply_override("compare.time=" + std::to_string(scale_count(3000.0)));
        cm.apply_override("compare.burnin_time=60.0");
        cm.apply_override("langevin.thinning=10");
        cm.apply_override("metropolis.sweeps=" +
                          std::to_string((long)scale_count(400000)));
        cm.apply_override("metropolis.burnin=30000");
        cm.apply_override("metropolis.thinning=4");
        if (t == HiggsTarget::Euclidean)
            cm.apply_override(
                "observables.names=[\"plaquette_mean\", \"hopping_mean\", "
                "\"higgs_second_moment\"]");
        auto rep = run_oracle_compare(ExperimentConfig::load(cm));
        for (const auto& row : rep.rows) {
            os << "    " << target_name(t) << " " << row.observable << ": langevin(dt->0) "
               << row.extrapolated << " +- " << row.extrapolated_error << ", metropolis "
               << row.metropolis << " +- " << row.metropolis_error << ", |z| = " << row.z
               << "\n";
            pass = pass && row.z <= 3.0;
        }
    }
    os << "    (threshold: |z| <= 3 for every observable and target)\n";
    return pass;
}

// -------------------------------------------------------------------
// 5. moment bound

bool criterion_moment_bound(std::ostream& os) {
    bool pass = true;
    const double m = 1.0;
    for (double kappa : {0.0, 0.05, 0.2}) {
        ConfigMap cm = base_config(HiggsTarget::Euclidean, 2, 4, 3, 0.1, kappa, m, 5005);
        cm.apply_override("metropolis.sweeps=" + std::to_string((long)scale_count(300000)));
        cm.apply_override("metropolis.burnin=20000");
        cm.apply_override("metropolis.thinning=3");
        cm.apply_override("observables.names=[\"higgs_second_moment\"]");
        auto e = ExperimentConfig::load(cm);
        auto lat = e.make_lattice();
        auto traj = run_metropolis(FieldConfiguration::cold(lat, e.couplings), e.couplings,
                                   e.metropolis, e.make_observers(*lat));
        std::vector<double> series;
        for (const auto& r : traj.rows) series.push_back(r[0]);
        auto rep = higgs_second_moment_report(series, m);
        os << "    kappa = " << kappa << ": E|Phi|^2 = " << rep.moment.estimate << " +- "
           << rep.moment.std_error << ", bound 1/(2m) = " << rep.bound << "\n";
        if (kappa == 0.0)
            pass = pass && std::abs(rep.moment.estimate - rep.bound) <=
                               3.0 * rep.moment.std_error;
        else
            pass = pass && rep.satisfied_within(3.0);
    }
    os << "    (kappa = 0 must equal the bound within 3 sigma; kappa > 0 must not exceed "
          "it by more than 3 sigma)\n";
    return pass;
}

// -------------------------------------------------------------------
// 6. mass gap

bool criterion_mass_gap(std::ostream& os) {
    bool pass = true;
    for (HiggsTarget t : {HiggsTarget::Euclidean, HiggsTarget::Group}) {
        ConfigMap cm = base_config(t, 2, 16, 3, 0.05, 0.05, 1.0, 6006);
        cm.apply_override("metropolis.sweeps=" + std::to_string((long)scale_count(300000)));
        cm.apply_override("metropolis.burnin=20000");
        cm.apply_override("metropolis.thinning=4");
        cm.apply_override("massgap.distances=[1, 2, 3, 4, 5]");
        auto rep = run_massgap(ExperimentConfig::load(cm));
        os << "    " << target_name(t) << " covariances:\n";
        for (const auto& p : rep.points)
            os << "      r = " << p.distance << ": cov = " << p.cov << " +- " << p.error
               << " (|z| = " << std::abs(p.cov) / p.error << ")\n";
        if (rep.fit_ok) {
            os << "      fitted rate " << rep.fit.rate << " with 95% CI [" << rep.ci_low
               << ", " << rep.ci_high << "]\n";
            pass = pass && rep.fit.rate > 0.0 && rep.ci_low > 0.0;
        } else {
            os << "      " << rep.fit_error << "\n";
            pass = false;
        }
    }
    os << "    (threshold: positive fitted decay rate with 95% CI excluding 0, both "
          "targets)\n";
    return pass;
}

// -------------------------------------------------------------------
// 7. large N

bool criterion_large_n(std::ostream& os) {
    ConfigMap cm = base_config(HiggsTarget::Group, 2, 6, 4, 0.02, 0.02, 1.0, 7007);
    cm.apply_override("metropolis.sweeps=" + std::to_string((long)scale_count(150000)));
    cm.apply_override("metropolis.burnin=10000");
    cm.apply_override("metropolis.thinning=2");
    cm.apply_override("largen.ladder=[4, 8, 16]");
    cm.apply_override("largen.loop_a=1");
    cm.apply_override("largen.loop_b=1");
    auto e = ExperimentConfig::load(cm);
    auto rep = run_largen(e);
    bool pass = true;
    for (const auto& row : rep.rows) {
        os << "    N = " << row.N << ": var(W/N) = " << row.var_scaled << " +- "
           << row.var_error;
        if (row.bound >= 0.0) os << ", bound n(n-3)/(K N) = " << row.bound;
        os << ", defect = " << row.defect << " +- " << row.defect_error << "\n";
    }
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i];
        const auto& b = rep.rows[i + 1];
        const double sigma = std::sqrt(a.var_error * a.var_error + b.var_error * b.var_error);
        if (!(b.var_scaled <= a.var_scaled + 3.0 * sigma)) {
            os << "    FAIL: var not nonincreasing from N=" << a.N << " to N=" << b.N << "\n";
            pass = false;
        }
    }
    for (const auto& row : rep.rows) {
        if (row.bound >= 0.0 && !(row.var_scaled <= row.bound + 3.0 * row.var_error)) {
            os << "    FAIL: variance bound violated at N=" << row.N << "\n";
            pass = false;
        }
    }
    const auto& first = rep.rows.front();
    const auto& last = rep.rows.back();
    const double dsigma =
        std::sqrt(first.defect_error * first.defect_error +
                  last.defect_error * last.defect_error);
    if (!(last.defect <= first.defect + 3.0 * dsigma)) {
        os << "    FAIL: factorization defect does not shrink within errors\n";
        pass = false;
    }
    const auto k16 = k_ugauge(16, 0.02, 0.02, 2);
    os << "    (K_ugauge at N=16: " << k16.value << "; bound asserted where positive)\n";
    return pass;
}

// -------------------------------------------------------------------
// 8. U-gauge equivalence

bool criterion_ugauge(std::ostream& os) {
    ConfigMap cm = base_config(HiggsTarget::Group, 2, 3, 3, 0.1, 0.1, 1.0, 8008);
    cm.apply_override("metropolis.sweeps=" + std::to_string((long)scale_count(400000)));
    cm.apply_override("metropolis.burnin=20000");
    cm.apply_override("metropolis.thinning=4");
    auto rep = run_gaugefix_check(ExperimentConfig::load(cm));
    bool pass = true;
    for (const auto& row : rep.rows) {
        os << "    " << row.label << ": E_mu = " << row.mean_mu << " +- " << row.err_mu
           << ", E_nu = " << row.mean_nu << " +- " << row.err_nu << ", |z| = " << row.z
           << "\n";
        pass = pass && row.z <= 3.0;
    }
    os << "    (threshold: |z| <= 3 for the plaquette loop and the length-2 line)\n";
    return pass;
}

// -------------------------------------------------------------------
// 9. bound formulas

bool criterion_bound_formulas(std::ostream& os) {
    bool pass = true;
    auto check = [&](const char* what, double got, double expected) {
        const bool ok = std::abs(got - expected) <= 1e-12;
        if (!ok) os << "    FAIL " << what << ": got " << got << " expected " << expected << "\n";
        pass = pass && ok;
    };
    check("k_euclidean(10,0,0,1,2)", k_euclidean(10, 0, 0, 1, 2).value, 2.0);
    check("k_euclidean(10,0.1,0,1,2)", k_euclidean(10, 0.1, 0, 1, 2).value, -6.0);
    check("k_sphere(10,0,0,2)", k_sphere(10, 0, 0, 2).value, 2.0);
    check("k_group(10,0,0,2)", k_group(10, 0, 0, 2).value, 2.0);
    check("k_ugauge(10,0,0,2)", k_ugauge(10, 0, 0, 2).value, 2.0);
    check("k_ugauge(10,0.01,0.05,2)", k_ugauge(10, 0.01, 0.05, 2).value, 0.2);
    check("ricci(SO(10))", ricci_constant(CurvedSpace::GroupEdge, 10), 2.0);
    check("ricci(S^9)", ricci_constant(CurvedSpace::Sphere, 10), 8.0);
    check("ricci(SO(2))", ricci_constant(CurvedSpace::GroupEdge, 2), 0.0);
    check("variance_bound(4,2,100)", variance_bound(4, 2.0, 100), 0.02);
    check("variance_bound(3,1.7,10)", variance_bound(3, 1.7, 10), 0.0);

    // delta-optimized constants vs 10^4-point zooming grid search
    auto grid_search = [](double c1, double a, double c2, double dd) {
        double lo = 1e-9, hi = 1e9, best_delta = 1.0, best = -1e300;
        for (int round = 0; round < 7; ++round) {
            const int pts = 2000;
            best = -1e300;
            for (int i = 0; i <= pts; ++i) {
                const double delta =
                    round == 0 ? lo * std::pow(hi / lo, double(i) / pts)
                               : lo + (hi - lo) * double(i) / pts;
                const double v = std::min(c1 - a * delta, c2 - dd / delta);
                if (v > best) {
                    best = v;
                    best_delta = delta;
                }
            }
            const double width = round == 0 ? best_delta * 0.9 : (hi - lo) / 200.0;
            lo = std::max(best_delta - width, 1e-12);
            hi = best_delta + width;
        }
        return best;
    };
    Rng rng(9009);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int N = 3 + int(rng.uniform_below(16));
        const int d = 2 + int(rng.uniform_below(3));
        const double beta = 0.01 * rng.uniform();
        const double kappa = 1e-4 + 0.01 * rng.uniform();
        auto rs = k_sphere(N, beta, kappa, d);
        const double c1s =
            0.25 * (N + 2) - 1.0 - 8.0 * (d - 1) * beta * N - 2.0 * kappa * N;
        worst_gap = std::max(worst_gap,
                             std::abs(rs.value - grid_search(c1s, 4.0 * kappa * N,
                                                             (N - 2.0) - 8.0 * kappa * N * d,
                                                             4.0 * kappa * N * d)));
        auto rg = k_group(N, beta, kappa, d);
        const double base = 0.25 * (N + 2) - 1.0;
        worst_gap = std::max(
            worst_gap, std::abs(rg.value - grid_search(base - 8.0 * (d - 1) * beta * N -
                                                           2.0 * kappa * N,
                                                       4.0 * kappa * N,
                                                       base - 8.0 * kappa * N * d,
                                                       4.0 * kappa * N * d)));
    }
    os << "    max |closed-form - grid search| over 20 random draws: " << worst_gap
       << " (tolerance 1e-9)\n";
    pass = pass && worst_gap <= 1e-9;

    // equivalence with the published smallness condition
    bool iff_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 3 + int(rng.uniform_below(20));
        const int d = 2 + int(rng.uniform_below(3));
        const double beta = 0.02 * rng.uniform();
        const double kappa = 0.2 * rng.uniform();
        const double m = 0.5 + rng.uniform();
        const bool positive = k_euclidean(N, beta, kappa, m, d).positive;
        const double lhs =
            8.0 * (d - 1) * beta + kappa / m + 2.0 * kappa * kappa / (m * m);
        iff_ok = iff_ok && (positive == (lhs < 0.25 - 0.5 / N));
    }
    os << "    smallness-condition equivalence on 100 random draws: "
       << (iff_ok ? "ok" : "violated") << "\n";
    return pass && iff_ok;
}

// -------------------------------------------------------------------
// 10. estimator calibration

bool criterion_estimators(std::ostream& os) {
    Rng rng(1010);
    bool pass = true;

    const std::size_t n = 100000;
    std::vector<double> iid(n);
    const double sigma = 1.7;
    for (auto& x : iid) x = sigma * rng.gaussian();
    auto ri = estimate(iid);
    const double expect_err = sigma / std::sqrt(double(n));
    os << "    iid: tau_int = " << ri.tau_int << " (target 0.5 +- 0.1), error = "
       << ri.std_error << " vs sigma/sqrt(n) = " << expect_err << " (+- 15%)\n";
    pass = pass && std::abs(ri.tau_int - 0.5) <= 0.1 &&
           std::abs(ri.std_error - expect_err) <= 0.15 * expect_err;

    const double rho = 0.9;
    std::vector<double> ar(200000);
    double x = rng.gaussian();
    const double innov = std::sqrt(1.0 - rho * rho);
    for (auto& v : ar) {
        x = rho * x + innov * rng.gaussian();
        v = x;
    }
    auto ra = estimate(ar);
    const double tau_expected = (1.0 + rho) / (2.0 * (1.0 - rho));
    os << "    AR(1) rho=0.9: tau_int = " << ra.tau_int << " vs " << tau_expected
       << " (+- 20%)\n";
    pass = pass && std::abs(ra.tau_int - tau_expected) <= 0.2 * tau_expected;

    int covered = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> xs(2000);
        for (auto& v : xs) v = rng.gaussian();
        auto res = estimate(xs);
        if (std::abs(res.estimate) <= res.std_error) ++covered;
    }
    const double coverage = covered / double(reps);
    os << "    1-sigma coverage over " << reps << " iid repetitions: " << coverage
       << " (target 0.68 +- 0.05)\n";
    pass = pass && coverage >= 0.63 && coverage <= 0.73;
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> criteria = {
        {1, "gradient exactness (directional derivatives, all targets)", criterion_gradients},
        {2, "gauge invariance and pathwise gauge covariance", criterion_gauge},
        {3, "geometry constants and curvature lower bound", criterion_geometry},
        {4, "stationarity: Langevin dt->0 vs Metropolis", criterion_stationarity},
        {5, "Euclidean second-moment bound E|Phi|^2 <= 1/(2m)", criterion_moment_bound},
        {6, "mass gap: covariance decay of translated plaquettes", criterion_mass_gap},
        {7, "large-N variance bound and factorization", criterion_large_n},
        {8, "U-gauge equivalence of gauge-invariant observables", criterion_ugauge},
        {9, "closed-form curvature constants", criterion_bound_formulas},
        {10, "estimator calibration (tau_int, errors, coverage)", criterion_estimators},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            g_quick = true;
            continue;
        }
        selected.push_back(std::atoi(argv[i]));
    }
    if (selected.empty())
        for (const auto& c : criteria) selected.push_back(c.id);

    int failures = 0;
    for (int id : selected) {
        const auto it = std::find_if(criteria.begin(), criteria.end(),
                                     [id](const Criterion& c) { return c.id == id; });
        if (it == criteria.end()) {
            std::cerr << "unknown criterion " << id << "\n";
            return 2;
        }
        std::ostringstream detail;
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = it->run(detail);
        } catch (const std::exception& err) {
            detail << "    exception: " << err.what() << "\n";
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", it->id,
                    it->title.c_str(), secs);
        std::fputs(detail.str().c_str(), stdout);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
