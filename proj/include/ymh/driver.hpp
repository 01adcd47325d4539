#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ymh/bounds.hpp"
#include "ymh/config.hpp"
#include "ymh/csv.hpp"
#include "ymh/dynamics.hpp"
#include "ymh/estimators.hpp"
#include "ymh/observables.hpp"
#include "ymh/oracle.hpp"
#include "ymh/serialize.hpp"

namespace ymh {

/// Run up to `threads` jobs concurrently; order of completion does not
/// matter, results land at their own indices.
inline void parallel_run(std::vector<std::function<void()>> jobs, int threads) {
    if (threads <= 1 || jobs.size() <= 1) {
        for (auto& job : jobs) job();
        return;
    }
    std::vector<std::thread> pool;
    std::size_t next = 0;
    while (next < jobs.size()) {
        const std::size_t batch =
            std::min<std::size_t>(static_cast<std::size_t>(threads), jobs.size() - next);
        pool.clear();
        for (std::size_t i = 0; i < batch; ++i) pool.emplace_back(jobs[next + i]);
        for (auto& t : pool) t.join();
        next += batch;
    }
}

inline HiggsTarget parse_target(const std::string& name) {
    if (name == "euclidean") return HiggsTarget::Euclidean;
    if (name == "sphere") return HiggsTarget::Sphere;
    if (name == "group") return HiggsTarget::Group;
    throw InvalidArgument("config: unknown target '" + name +
                          "' (expected euclidean, sphere or group)");
}

/// Full experiment description assembled from a ConfigMap, validated
/// against the module preconditions before any run starts.
struct ExperimentConfig {
    ConfigMap raw;
    int d = 2, L = 3;
    Couplings couplings;

    std::string engine = "metropolis";
    std::uint64_t seed = 0;
    std::string out = "";
    int threads = 1;

    IntegratorSettings langevin;
    std::int64_t langevin_burnin = 0;
    MetropolisSettings metropolis;

    std::vector<std::string> observable_names;

    static ExperimentConfig load(const ConfigMap& cm) {
        ExperimentConfig e;
        e.raw = cm;
        e.d = static_cast<int>(cm.get_int("lattice.d", 2));
        e.L = static_cast<int>(cm.get_int("lattice.L", 3));
        require(e.d >= 2 && e.L >= 2, "config: lattice.d and lattice.L must be >= 2");

        e.couplings.N = static_cast<int>(cm.get_int("couplings.N", 3));
        e.couplings.beta = cm.get_double("couplings.beta", 0.0);
        e.couplings.kappa = cm.get_double("couplings.kappa", 0.0);
        e.couplings.m = cm.get_double("couplings.m", 1.0);
        e.couplings.target = parse_target(cm.get_string("couplings.target", "euclidean"));
        e.couplings.validate();

        e.engine = cm.get_string("run.engine", "metropolis");
        require(e.engine == "metropolis" || e.engine == "langevin",
                "config: run.engine must be metropolis or langevin");
        e.seed = static_cast<std::uint64_t>(cm.get_int("run.seed", 0));
        e.out = cm.get_string("run.out", "");
        e.threads = static_cast<int>(cm.get_int("run.threads", 1));

        e.langevin.dt = cm.get_double("langevin.dt", 1e-3);
        e.langevin.steps = cm.get_int("langevin.steps", 10000);
        e.langevin.thinning = cm.get_int("langevin.thinning", 10);
        e.langevin.seed = e.seed;
        const std::string scheme = cm.get_string("langevin.scheme", "geodesic");
        require(scheme == "geodesic" || scheme == "ito-project",
                "config: langevin.scheme must be geodesic or ito-project");
        e.langevin.scheme = scheme == "geodesic" ? Scheme::Geodesic : Scheme::ItoProject;
        e.langevin_burnin = cm.get_int("langevin.burnin", 0);
        e.langevin.validate();

        e.metropolis.sweeps = cm.get_int("metropolis.sweeps", 10000);
        e.metropolis.burnin = cm.get_int("metropolis.burnin", 1000);
        e.metropolis.thinning = cm.get_int("metropolis.thinning", 1);
        e.metropolis.seed = e.seed;
        e.metropolis.scales.eps_q = cm.get_double("metropolis.eps_q", 0.4);
        e.metropolis.scales.eps_phi = cm.get_double("metropolis.eps_phi", 0.4);
        e.metropolis.gaugefixed = cm.get_bool("metropolis.gaugefixed", false);
        require(e.metropolis.sweeps >= 0 && e.metropolis.burnin >= 0 &&
                    e.metropolis.thinning >= 1,
                "config: invalid metropolis settings");
        if (e.metropolis.gaugefixed)
            require(e.couplings.target == HiggsTarget::Group,
                    "config: gaugefixed sampling requires the group target");

        e.observable_names = cm.get_string_array("observables.names");
        if (e.observable_names.empty())
            e.observable_names = {"plaquette_mean", "hopping_mean"};
        return e;
    }

    std::shared_ptr<const Lattice> make_lattice() const {
        return std::make_shared<Lattice>(d, L);
    }

    std::vector<Observer> make_observers(const Lattice& lat) const {
        std::vector<Observer> obs;
        for (const auto& name : observable_names) {
            if (name == "plaquette_mean") {
                obs.push_back({name, [](const FieldConfiguration& f) {
                                   return plaquette_mean(f) / static_cast<double>(f.N);
                               }});
            } else if (name == "hopping_mean") {
                obs.push_back({name, [](const FieldConfiguration& f) {
                                   return hopping_mean(f);
                               }});
            } else if (name == "higgs_second_moment") {
                require(couplings.target == HiggsTarget::Euclidean,
                        "config: higgs_second_moment needs the euclidean target");
                obs.push_back({name, [](const FieldConfiguration& f) {
                                   return higgs_second_moment_mean(f);
                               }});
            } else if (name == "wilson_plaquette") {
                auto loop = rectangle_loop(lat, 0, 0, 1, 1, 1);
                obs.push_back({name, [loop](const FieldConfiguration& f) {
                                   return wilson_loop(f, loop) / static_cast<double>(f.N);
                               }});
            } else if (local_function_registry().count(name)) {
                obs.push_back({name, local_function_registry().at(name).fn});
            } else {
                throw InvalidArgument("config: unknown observable '" + name + "'");
            }
        }
        return obs;
    }
};

/// Pull one observable column out of a record stream, tagged with its
/// provenance for downstream estimation.
inline SampleSeries extract_series(const Trajectory& traj, std::size_t column,
                                   std::uint64_t seed, const std::string& params) {
    require(column < traj.columns.size(), "extract_series: unknown column");
    SampleSeries s;
    s.name = traj.columns[column];
    s.times = traj.times;
    s.seed = seed;
    s.params = params;
    s.values.reserve(traj.rows.size());
    for (const auto& row : traj.rows) s.values.push_back(row[column]);
    return s;
}

/// Assemble one row of the large-N factorization table from sampled
/// loop statistics and the curvature constant of the sampled measure.
inline FactorizationRow factorization_report_row(int N, int loop_length,
                                                 const EstimatorResult& var,
                                                 const EstimatorResult& defect,
                                                 const BoundReport& k) {
    FactorizationRow row;
    row.N = N;
    row.var_scaled = var.estimate;
    row.var_error = var.std_error;
    row.bound = k.positive ? variance_bound(loop_length, k.value, N) : -1.0;
    row.defect = std::abs(defect.estimate);
    row.defect_error = defect.std_error;
    return row;
}

inline void write_provenance(CsvWriter& w, const ExperimentConfig& e,
                             const std::string& command) {
    w.comment("command", command);
    w.comment("version", std::string(kVersion));
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(e.raw.hash()));
    w.comment("config_hash", std::string(hash));
    w.comment("seed", static_cast<std::int64_t>(e.seed));
    for (const auto& [k, v] : e.raw.raw()) w.comment("config." + k, v);
}

// ---------------------------------------------------------------------
// simulate

struct SimulateResult {
    Trajectory traj;
    std::uint64_t config_hash = 0;
};

inline SimulateResult run_simulate(const ExperimentConfig& e) {
    auto lat = e.make_lattice();
    auto observers = e.make_observers(*lat);
    SimulateResult result;
    result.config_hash = e.raw.hash();
    if (e.engine == "langevin") {
        e.couplings.validate_for_measure();
        auto cfg = FieldConfiguration::cold(lat, e.couplings);
        if (e.langevin_burnin > 0) {
            IntegratorSettings warm = e.langevin;
            warm.steps = e.langevin_burnin;
            warm.thinning = e.langevin_burnin;
            cfg = run(cfg, e.couplings, warm, {}).final_config;
            IntegratorSettings main = e.langevin;
            main.seed = e.seed + 0x9e37;  // distinct stream for measurement
            result.traj = run(cfg, e.couplings, main, observers);
        } else {
            result.traj = run(cfg, e.couplings, e.langevin, observers);
        }
    } else {
        e.couplings.validate_for_measure();
        auto cfg = FieldConfiguration::cold(lat, e.couplings);
        result.traj = run_metropolis(cfg, e.couplings, e.metropolis, observers);
    }
    return result;
}

inline void write_simulate_csv(const SimulateResult& r, const ExperimentConfig& e,
                               std::ostream& os) {
    CsvWriter w(os);
    write_provenance(w, e, "simulate");
    std::vector<std::string> header = {"time"};
    for (const auto& c : r.traj.columns) header.push_back(c);
    w.header(header);
    for (std::size_t i = 0; i < r.traj.rows.size(); ++i) {
        std::vector<double> row = {r.traj.times[i]};
        for (double v : r.traj.rows[i]) row.push_back(v);
        w.row(row);
    }
}

// ---------------------------------------------------------------------
// bounds region map

struct BoundsGrid {
    HiggsTarget target = HiggsTarget::Group;
    int N = 3, d = 2;
    double m = 1.0;
    std::vector<double> betas, kappas;

    static BoundsGrid load(const ConfigMap& cm) {
        BoundsGrid g;
        g.target = parse_target(cm.get_string("bounds.target", "group"));
        g.N = static_cast<int>(cm.get_int("bounds.N", 3));
        g.d = static_cast<int>(cm.get_int("bounds.d", 2));
        g.m = cm.get_double("bounds.m", 1.0);
        auto linspace = [](double lo, double hi, std::int64_t n) {
            std::vector<double> xs;
            require(n >= 1, "config: grid count must be >= 1");
            if (n == 1) return std::vector<double>{lo};
            for (std::int64_t i = 0; i < n; ++i)
                xs.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                      static_cast<double>(n - 1));
            return xs;
        };
        g.betas = linspace(cm.get_double("bounds.beta_min", 0.0),
                           cm.get_double("bounds.beta_max", 0.0),
                           cm.get_int("bounds.beta_count", 1));
        g.kappas = linspace(cm.get_double("bounds.kappa_min", 0.0),
                            cm.get_double("bounds.kappa_max", 0.0),
                            cm.get_int("bounds.kappa_count", 1));
        return g;
    }
};

inline void write_bounds_csv(const BoundsGrid& g, const RegionMap& map, std::ostream& os) {
    CsvWriter w(os);
    w.comment("command", "bounds");
    w.comment("version", std::string(kVersion));
    w.comment("target", target_name(g.target));
    w.comment("N", static_cast<std::int64_t>(g.N));
    w.comment("d", static_cast<std::int64_t>(g.d));
    if (g.target == HiggsTarget::Euclidean) w.comment("m", g.m);
    w.header({"beta", "kappa", "K", "delta_star", "positive"});
    for (const auto& p : map.points) {
        std::vector<std::string> row = {csv_number(p.beta), csv_number(p.kappa),
                                        csv_number(p.K),
                                        p.has_delta ? csv_number(p.delta) : "none",
                                        p.K > 0.0 ? "1" : "0"};
        w.row(row);
    }
    for (const auto& [b, k] : map.boundary)
        w.comment("boundary", csv_number(b) + "," + csv_number(k));
}

// ---------------------------------------------------------------------
// mass gap

struct MassGapReport {
    std::vector<CovariancePoint> points;
    std::vector<int> distances;
    bool fit_ok = false;
    MassGapFit fit;
    std::string fit_error;
    double ci_low = 0.0, ci_high = 0.0;  // 95% interval on the rate
    std::string warning;                  // set when K <= 0 at the run couplings
};

/// Covariance of the plaquette-trace field between translated plaquettes
/// at the scheduled support distances, averaged over all positions and
/// both axes of the (0,1) plane, with jackknife-over-batches errors.
class PlaquetteCovarianceAccumulator {
public:
    PlaquetteCovarianceAccumulator(const Lattice& lat, std::vector<int> distances)
        : lat_(lat), distances_(std::move(distances)) {
        require(!distances_.empty(), "massgap: empty distance schedule");
        // bases of (0,1)-plane plaquettes, one per site
        for (Site z = 0; z < lat.site_count(); ++z) {
            plaq_index_.push_back(find_plane_plaquette(z));
        }
        for (int r : distances_) {
            require(r >= 0 && r + 1 < lat.side(), "massgap: distance out of range");
            std::vector<std::pair<Site, Site>> pairs;
            for (Site z = 0; z < lat.site_count(); ++z)
                for (int axis : {0, 1}) {
                    Site target = z;
                    for (int s = 0; s < r + 1; ++s) target = lat.neighbor(target, axis, +1);
                    pairs.push_back({z, target});
                }
            pair_sets_.push_back(std::move(pairs));
        }
        samples_a_.resize(distances_.size());
    }

    void measure(const FieldConfiguration& cfg) {
        std::vector<double>& field = scratch_;
        field.resize(plaq_index_.size());
        const auto& plqs = lat_.plaquettes();
        const double n = static_cast<double>(cfg.N);
        for (std::size_t z = 0; z < plaq_index_.size(); ++z)
            field[z] = plaquette_product(cfg, plqs[plaq_index_[z]]).trace() / n;

        double vol_mean = 0.0;
        for (double v : field) vol_mean += v;
        vol_mean /= static_cast<double>(field.size());
        samples_b_.push_back(vol_mean);

        for (std::size_t k = 0; k < distances_.size(); ++k) {
            double a = 0.0;
            for (const auto& [z1, z2] : pair_sets_[k]) a += field[z1] * field[z2];
            samples_a_[k].push_back(a / static_cast<double>(pair_sets_[k].size()));
        }
    }

    std::vector<CovariancePoint> covariances() const {
        require(samples_b_.size() >= 100, "massgap: too-few-samples");
        const int nbatch = 50;
        const std::size_t bs = samples_b_.size() / nbatch;
        const std::size_t used = bs * nbatch;
        std::vector<CovariancePoint> points;
        for (std::size_t k = 0; k < distances_.size(); ++k) {
            double asum = 0.0, bsum = 0.0;
            std::vector<double> ab(nbatch, 0.0), bb(nbatch, 0.0);
            for (std::size_t s = 0; s < used; ++s) {
                asum += samples_a_[k][s];
                bsum += samples_b_[s];
                ab[s / bs] += samples_a_[k][s];
                bb[s / bs] += samples_b_[s];
            }
            auto cov_of = [&](double sa, double sb, double count) {
                const double mb = sb / count;
                return sa / count - mb * mb;
            };
            const double full = cov_of(asum, bsum, static_cast<double>(used));
            std::vector<double> loo(nbatch);
            for (int b = 0; b < nbatch; ++b)
                loo[b] = cov_of(asum - ab[b], bsum - bb[b], static_cast<double>(used - bs));
            double lmean = 0.0;
            for (double v : loo) lmean += v;
            lmean /= nbatch;
            double jvar = 0.0;
            for (double v : loo) jvar += (v - lmean) * (v - lmean);
            jvar *= (nbatch - 1.0) / static_cast<double>(nbatch);
            points.push_back({static_cast<double>(distances_[k]), full, std::sqrt(jvar)});
        }
        return points;
    }

private:
    std::size_t find_plane_plaquette(Site z) const {
        const auto& plqs = lat_.plaquettes();
        for (std::size_t i = 0; i < plqs.size(); ++i) {
            const auto& e0 = plqs[i].edges[0];
            const auto& e1 = plqs[i].edges[1];
            if (!e0.reversed && e0.base == z && e0.axis == 0 && e1.axis == 1) return i;
        }
        throw InvalidArgument("massgap: no (0,1)-plane plaquette at site");
    }

    const Lattice& lat_;
    std::vector<int> distances_;
    std::vector<std::size_t> plaq_index_;
    std::vector<std::vector<std::pair<Site, Site>>> pair_sets_;
    std::vector<std::vector<double>> samples_a_;
    std::vector<double> samples_b_;
    std::vector<double> scratch_;
};

inline MassGapReport finish_massgap(std::vector<CovariancePoint> points,
                                    std::vector<int> distances) {
    MassGapReport rep;
    rep.points = std::move(points);
    rep.distances = std::move(distances);
    try {
        rep.fit = mass_gap_fit(rep.points);
        rep.fit_ok = true;
        rep.ci_low = rep.fit.rate - 1.96 * rep.fit.rate_error;
        rep.ci_high = rep.fit.rate + 1.96 * rep.fit.rate_error;
    } catch (const NumericError& err) {
        rep.fit_ok = false;
        rep.fit_error = err.what();
    }
    return rep;
}

inline MassGapReport run_massgap(const ExperimentConfig& e) {
    std::vector<int> distances;
    for (auto v : e.raw.get_int_array("massgap.distances", {1, 2, 3, 4, 5}))
        distances.push_back(static_cast<int>(v));

    if (e.raw.get_bool("massgap.synthetic", false)) {
        // test hook: inject a known exponential decay with relative noise
        const double rate = e.raw.get_double("massgap.rate", 0.7);
        const double amplitude = e.raw.get_double("massgap.amplitude", 2.0);
        const double noise = e.raw.get_double("massgap.noise", 0.05);
        Rng rng(e.seed);
        std::vector<CovariancePoint> pts;
        for (int r : distances) {
            const double base = amplitude * std::exp(-rate * r);
            pts.push_back({static_cast<double>(r), base * (1.0 + noise * rng.gaussian()),
                           noise * base});
        }
        return finish_massgap(std::move(pts), std::move(distances));
    }

    e.couplings.validate_for_measure();
    auto lat = e.make_lattice();
    PlaquetteCovarianceAccumulator acc(*lat, distances);

    // strong coupling is recommended for a clean exponential regime
    BoundReport kbound;
    switch (e.couplings.target) {
        case HiggsTarget::Euclidean:
            kbound = k_euclidean(e.couplings.N, e.couplings.beta, e.couplings.kappa,
                                 e.couplings.m, e.d);
            break;
        case HiggsTarget::Sphere:
            kbound = k_sphere(e.couplings.N, e.couplings.beta, e.couplings.kappa, e.d);
            break;
        case HiggsTarget::Group:
            kbound = k_group(e.couplings.N, e.couplings.beta, e.couplings.kappa, e.d);
            break;
    }

    auto cfg = FieldConfiguration::cold(lat, e.couplings);
    Rng rng(e.seed);
    e.metropolis.scales.validate();
    ProposalScales scales = e.metropolis.scales;
    AcceptanceStats window;
    for (std::int64_t k = 0; k < e.metropolis.burnin; ++k) {
        window += metropolis_sweep(cfg, e.couplings, scales, rng);
        if ((k + 1) % e.metropolis.tune_interval == 0) {
            autotune(scales, window);
            window = AcceptanceStats{};
        }
    }
    for (std::int64_t k = 1; k <= e.metropolis.sweeps; ++k) {
        metropolis_sweep(cfg, e.couplings, scales, rng);
        if (k % e.metropolis.thinning == 0) acc.measure(cfg);
    }
    auto rep = finish_massgap(acc.covariances(), std::move(distances));
    if (!kbound.positive)
        rep.warning = kbound.name + " = " + csv_number(kbound.value) +
                      " <= 0 at these couplings; decay-rate positivity is not certified";
    return rep;
}

inline void write_massgap_csv(const MassGapReport& rep, const ExperimentConfig& e,
                              std::ostream& os) {
    CsvWriter w(os);
    write_provenance(w, e, "massgap");
    w.header({"distance", "cov", "cov_error", "excluded"});
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const bool excluded =
            rep.fit_ok ? std::find(rep.fit.excluded.begin(), rep.fit.excluded.end(),
                                   static_cast<int>(i)) != rep.fit.excluded.end()
                       : true;
        w.row(std::vector<std::string>{csv_number(rep.points[i].distance),
                                       csv_number(rep.points[i].cov),
                                       csv_number(rep.points[i].error),
                                       excluded ? "1" : "0"});
    }
    if (rep.fit_ok) {
        w.comment("fit_rate", rep.fit.rate);
        w.comment("fit_rate_error", rep.fit.rate_error);
        w.comment("fit_amplitude", rep.fit.amplitude);
        w.comment("fit_ci_low", rep.ci_low);
        w.comment("fit_ci_high", rep.ci_high);
    } else {
        w.comment("fit_error", rep.fit_error);
    }
    if (!rep.warning.empty()) w.comment("warning", rep.warning);
}

// ---------------------------------------------------------------------
// large N

struct LargeNReport {
    int loop_length = 4;
    std::vector<FactorizationRow> rows;
};

/// Factorization table across an N ladder for the group target, sampled
/// in the U-gauge-fixed measure (gauge-invariant loop statistics agree
/// with the full measure, and the relevant constant is K_ugauge).
inline LargeNReport run_largen(const ExperimentConfig& e) {
    require(e.couplings.target == HiggsTarget::Group, "largen: group target required");
    std::vector<int> ladder;
    for (auto v : e.raw.get_int_array("largen.ladder", {4, 8, 16}))
        ladder.push_back(static_cast<int>(v));
    require(!ladder.empty(), "largen: missing N ladder");
    require(e.raw.has("largen.loop_a") && e.raw.has("largen.loop_b"),
            "largen: missing loop spec (largen.loop_a, largen.loop_b)");
    const int la = static_cast<int>(e.raw.get_int("largen.loop_a", 1));
    const int lb = static_cast<int>(e.raw.get_int("largen.loop_b", 1));

    auto lat = e.make_lattice();
    LargeNReport rep;
    rep.loop_length = 2 * (la + lb);
    rep.rows.resize(ladder.size());

    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        jobs.push_back([&, i]() {
            Couplings c = e.couplings;
            c.N = ladder[i];
            auto loop1 = rectangle_loop(*lat, 0, 0, la, 1, lb);
            Site far = 0;
            for (int s = 0; s < lat->side() / 2; ++s) far = lat->neighbor(far, 0, +1);
            auto loop2 = rectangle_loop(*lat, far, 0, la, 1, lb);

            MetropolisSettings ms = e.metropolis;
            ms.gaugefixed = true;
            ms.seed = e.seed + 101 * static_cast<std::uint64_t>(i);
            std::vector<Observer> obs = {
                {"w1", [loop1](const FieldConfiguration& f) {
                     return wilson_loop(f, loop1) / static_cast<double>(f.N);
                 }},
                {"w2", [loop2](const FieldConfiguration& f) {
                     return wilson_loop(f, loop2) / static_cast<double>(f.N);
                 }}};
            auto traj = run_metropolis(FieldConfiguration::cold(lat, c), c, ms, obs);

            auto w1 = extract_series(traj, 0, ms.seed, e.raw.canonical());
            auto w2 = extract_series(traj, 1, ms.seed, e.raw.canonical());
            rep.rows[i] = factorization_report_row(
                c.N, rep.loop_length, covariance(w1.values, w1.values),
                covariance(w1.values, w2.values),
                k_ugauge(c.N, c.beta, c.kappa, lat->dim()));
        });
    }
    parallel_run(std::move(jobs), e.threads);
    return rep;
}

inline void write_largen_csv(const LargeNReport& rep, const ExperimentConfig& e,
                             std::ostream& os) {
    CsvWriter w(os);
    write_provenance(w, e, "largen");
    w.comment("loop_length", static_cast<std::int64_t>(rep.loop_length));
    w.header({"N", "var_scaled", "var_error", "bound", "defect", "defect_error"});
    for (const auto& r : rep.rows)
        w.row(std::vector<std::string>{
            std::to_string(r.N), csv_number(r.var_scaled), csv_number(r.var_error),
            r.bound >= 0.0 ? csv_number(r.bound) : "unavailable", csv_number(r.defect),
            csv_number(r.defect_error)});
}

// ---------------------------------------------------------------------
// U-gauge equivalence check

struct GaugeFixRow {
    std::string label;
    double mean_mu = 0.0, err_mu = 0.0;
    double mean_nu = 0.0, err_nu = 0.0;
    double z = 0.0;
};

struct GaugeFixReport {
    std::vector<GaugeFixRow> rows;
};

/// Expectations of gauge-invariant observables under the full measure
/// against the U-gauge-fixed measure evaluated at Phi = Id.
inline GaugeFixReport run_gaugefix_check(const ExperimentConfig& e,
                                         std::vector<ObservableSpec> specs = {}) {
    require(e.couplings.target == HiggsTarget::Group, "gaugefix-check: group target required");
    auto lat = e.make_lattice();

    if (specs.empty()) {
        ObservableSpec loop;
        loop.kind = ObservableKind::WilsonLoop;
        loop.path = rectangle_loop(*lat, 0, 0, 1, 1, 1);
        loop.normalize = true;
        specs.push_back(loop);

        ObservableSpec line;
        line.kind = ObservableKind::WilsonLine;
        line.path = step_path(*lat, 0, {{0, +1}, {1, +1}});
        line.normalize = true;
        specs.push_back(line);
    }
    for (const auto& s : specs) {
        s.validate(*lat);
        require(s.gauge_invariant(),
                "gaugefix-check: observable '" + s.label() + "' is not gauge invariant");
    }

    std::vector<Observer> obs;
    for (const auto& s : specs)
        obs.push_back({s.label(), [s](const FieldConfiguration& f) { return s.evaluate(f); }});

    Trajectory mu_traj, nu_traj;
    std::vector<std::function<void()>> jobs;
    jobs.push_back([&]() {
        MetropolisSettings ms = e.metropolis;
        ms.gaugefixed = false;
        mu_traj = run_metropolis(FieldConfiguration::cold(lat, e.couplings), e.couplings, ms,
                                 obs);
    });
    jobs.push_back([&]() {
        MetropolisSettings ms = e.metropolis;
        ms.gaugefixed = true;
        ms.seed = e.seed + 7777;
        nu_traj = run_metropolis(FieldConfiguration::cold(lat, e.couplings), e.couplings, ms,
                                 obs);
    });
    parallel_run(std::move(jobs), e.threads);

    GaugeFixReport rep;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        auto mu = estimate(extract_series(mu_traj, k, e.seed, "mu").values);
        auto nu = estimate(extract_series(nu_traj, k, e.seed + 7777, "nu").values);
        GaugeFixRow row;
        row.label = specs[k].label();
        row.mean_mu = mu.estimate;
        row.err_mu = mu.std_error;
        row.mean_nu = nu.estimate;
        row.err_nu = nu.std_error;
        const double sigma =
            std::sqrt(mu.std_error * mu.std_error + nu.std_error * nu.std_error);
        row.z = sigma > 0.0 ? std::abs(mu.estimate - nu.estimate) / sigma : 0.0;
        rep.rows.push_back(row);
    }
    return rep;
}

inline void write_gaugefix_csv(const GaugeFixReport& rep, const ExperimentConfig& e,
                               std::ostream& os) {
    CsvWriter w(os);
    write_provenance(w, e, "gaugefix-check");
    w.header({"observable", "mean_mu", "err_mu", "mean_nu", "err_nu", "z"});
    for (const auto& r : rep.rows)
        w.row(std::vector<std::string>{r.label, csv_number(r.mean_mu), csv_number(r.err_mu),
                                       csv_number(r.mean_nu), csv_number(r.err_nu),
                                       csv_number(r.z)});
}

// ---------------------------------------------------------------------
// Langevin vs Metropolis cross-validation

struct CompareRow {
    std::string observable;
    std::vector<double> dt_means, dt_errors;
    double extrapolated = 0.0, extrapolated_error = 0.0;
    double metropolis = 0.0, metropolis_error = 0.0;
    double z = 0.0;
};

struct CompareReport {
    std::vector<double> dts;
    std::vector<CompareRow> rows;
};

/// Stationary means from the Langevin integrator at a dt ladder with a
/// linear dt -> 0 extrapolation, cross-validated against the exact
/// Metropolis sampler of the same measure.
inline CompareReport run_oracle_compare(const ExperimentConfig& e) {
    e.couplings.validate_for_measure();
    CompareReport rep;
    rep.dts = e.raw.get_double_array("compare.dts", {2e-3, 1e-3});
    require(rep.dts.size() >= 2, "oracle-compare: need at least two dt values");
    const double total_time = e.raw.get_double("compare.time", 50.0);
    const double burnin_time = e.raw.get_double("compare.burnin_time", 5.0);

    auto lat = e.make_lattice();
    auto observers = e.make_observers(*lat);

    std::vector<Trajectory> langevin_trajs(rep.dts.size());
    Trajectory met_traj;
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < rep.dts.size(); ++i) {
        jobs.push_back([&, i]() {
            IntegratorSettings s = e.langevin;
            s.dt = rep.dts[i];
            s.steps = static_cast<std::int64_t>(std::llround(total_time / s.dt));
            s.seed = e.seed + 31 * (i + 1);
            IntegratorSettings warm = s;
            warm.steps = static_cast<std::int64_t>(std::llround(burnin_time / s.dt));
            warm.thinning = std::max<std::int64_t>(warm.steps, 1);
            auto cfg = FieldConfiguration::cold(lat, e.couplings);
            cfg = run(cfg, e.couplings, warm, {}).final_config;
            s.seed = e.seed + 67 * (i + 1);
            langevin_trajs[i] = run(cfg, e.couplings, s, observers);
        });
    }
    jobs.push_back([&]() {
        met_traj = run_metropolis(FieldConfiguration::cold(lat, e.couplings), e.couplings,
                                  e.metropolis, observers);
    });
    parallel_run(std::move(jobs), e.threads);

    for (std::size_t k = 0; k < observers.size(); ++k) {
        CompareRow row;
        row.observable = observers[k].first;
        for (const auto& traj : langevin_trajs) {
            std::vector<double> series;
            for (const auto& r : traj.rows) series.push_back(r[k]);
            auto est = estimate(series);
            row.dt_means.push_back(est.estimate);
            row.dt_errors.push_back(est.std_error);
        }
        // weighted linear fit y = a + b dt; report the intercept
        double s = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < rep.dts.size(); ++i) {
            const double sig = std::max(row.dt_errors[i], 1e-300);
            const double wgt = 1.0 / (sig * sig);
            s += wgt;
            sx += wgt * rep.dts[i];
            sxx += wgt * rep.dts[i] * rep.dts[i];
            sy += wgt * row.dt_means[i];
            sxy += wgt * rep.dts[i] * row.dt_means[i];
        }
        const double det = s * sxx - sx * sx;
        require(det > 0.0, "oracle-compare: dt values must be distinct");
        row.extrapolated = (sxx * sy - sx * sxy) / det;
        row.extrapolated_error = std::sqrt(sxx / det);

        std::vector<double> met_series;
        for (const auto& r : met_traj.rows) met_series.push_back(r[k]);
        auto met = estimate(met_series);
        row.metropolis = met.estimate;
        row.metropolis_error = met.std_error;

        const double sigma = std::sqrt(row.extrapolated_error * row.extrapolated_error +
                                       row.metropolis_error * row.metropolis_error);
        row.z = sigma > 0.0 ? std::abs(row.extrapolated - row.metropolis) / sigma : 0.0;
        rep.rows.push_back(row);
    }
    return rep;
}

inline void write_compare_csv(const CompareReport& rep, const ExperimentConfig& e,
                              std::ostream& os) {
    CsvWriter w(os);
    write_provenance(w, e, "oracle-compare");
    std::vector<std::string> header = {"observable"};
    for (double dt : rep.dts) {
        header.push_back("mean_dt_" + csv_number(dt));
        header.push_back("err_dt_" + csv_number(dt));
    }
    for (const char* c : {"extrapolated", "extrap_err", "metropolis", "met_err", "z"})
        header.push_back(c);
    w.header(header);
    for (const auto& r : rep.rows) {
        std::vector<std::string> row = {r.observable};
        for (std::size_t i = 0; i < rep.dts.size(); ++i) {
            row.push_back(csv_number(r.dt_means[i]));
            row.push_back(csv_number(r.dt_errors[i]));
        }
        row.push_back(csv_number(r.extrapolated));
        row.push_back(csv_number(r.extrapolated_error));
        row.push_back(csv_number(r.metropolis));
        row.push_back(csv_number(r.metropolis_error));
        row.push_back(csv_number(r.z));
        w.row(row);
    }
}

}  // namespace ymh
