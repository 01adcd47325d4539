#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "ymh/common.hpp"

namespace ymh {

/// Observable series with provenance, as produced by the run drivers.
struct SampleSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::string params;  // echoed configuration summary
};

struct EstimatorResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double tau_int = 0.5;  // integrated autocorrelation time
    std::int64_t n = 0;
};

namespace detail {

/// Autocovariance Gamma(t) for t = 0..maxlag via FFT.
inline std::vector<double> autocovariance(const std::vector<double>& xs, std::size_t maxlag) {
    const std::size_t n = xs.size();
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    std::size_t padded = 1;
    while (padded < 2 * n) padded <<= 1;
    std::vector<double> centered(padded, 0.0);
    for (std::size_t i = 0; i < n; ++i) centered[i] = xs[i] - mean;

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, centered);
    for (auto& z : spectrum) z = std::norm(z);
    std::vector<double> corr;
    fft.inv(corr, spectrum);

    std::vector<double> gamma(maxlag + 1);
    for (std::size_t t = 0; t <= maxlag; ++t)
        gamma[t] = corr[t] / static_cast<double>(n - t);
    return gamma;
}

inline std::vector<double> batch_means(const std::vector<double>& xs, int nbatch) {
    const std::size_t bs = xs.size() / nbatch;
    std::vector<double> means(nbatch, 0.0);
    for (int b = 0; b < nbatch; ++b) {
        for (std::size_t i = 0; i < bs; ++i) means[b] += xs[b * bs + i];
        means[b] /= static_cast<double>(bs);
    }
    return means;
}

inline int default_batches(std::size_t n) {
    return static_cast<int>(std::clamp<std::size_t>(n / 20, 10, 50));
}

}  // namespace detail

/// Mean with two error estimates: integrated autocorrelation time with a
/// self-consistent (Madras-Sokal style) window, and non-overlapping batch
/// means. The reported standard error is the larger of the two.
inline EstimatorResult estimate(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    require(n >= 100, "estimate: too-few-samples (need >= 100)");
    EstimatorResult r;
    r.n = static_cast<std::int64_t>(n);
    r.estimate = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);

    const std::size_t maxlag = std::min<std::size_t>(n / 4, 20000);
    const auto gamma = detail::autocovariance(xs, maxlag);
    if (gamma[0] <= 0.0) {
        r.std_error = 0.0;
        r.tau_int = 0.5;
        return r;
    }

    // self-consistent truncation: stop once the window exceeds 6 tau
    double tau = 0.5;
    for (std::size_t t = 1; t <= maxlag; ++t) {
        tau += gamma[t] / gamma[0];
        if (static_cast<double>(t) >= 6.0 * std::max(tau, 0.5)) break;
    }
    tau = std::max(tau, 0.5);
    const double err_tau = std::sqrt(2.0 * tau * gamma[0] / static_cast<double>(n));

    const int nbatch = detail::default_batches(n);
    const auto means = detail::batch_means(xs, nbatch);
    const double bmean =
        std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(nbatch);
    double bvar = 0.0;
    for (double v : means) bvar += (v - bmean) * (v - bmean);
    bvar /= (nbatch - 1.0);
    const double err_batch = std::sqrt(bvar / nbatch);

    r.tau_int = tau;
    r.std_error = std::max(err_tau, err_batch);
    return r;
}

/// Covariance of two aligned series with a jackknife-over-batches error.
inline EstimatorResult covariance(const std::vector<double>& f, const std::vector<double>& g) {
    require(f.size() == g.size(), "covariance: length mismatch");
    const std::size_t n = f.size();
    require(n >= 100, "covariance: too-few-samples (need >= 100)");

    const int nbatch = detail::default_batches(n);
    const std::size_t bs = n / nbatch;
    const std::size_t used = bs * nbatch;

    double fsum = 0.0, gsum = 0.0, fgsum = 0.0;
    for (std::size_t i = 0; i < used; ++i) {
        fsum += f[i];
        gsum += g[i];
        fgsum += f[i] * g[i];
    }
    std::vector<double> bf(nbatch, 0.0), bg(nbatch, 0.0), bfg(nbatch, 0.0);
    for (int b = 0; b < nbatch; ++b) {
        for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) {
            bf[b] += f[i];
            bg[b] += g[i];
            bfg[b] += f[i] * g[i];
        }
    }

    auto cov_of = [](double sf, double sg, double sfg, double count) {
        const double mf = sf / count, mg = sg / count;
        return sfg / count - mf * mg;
    };
    const double full = cov_of(fsum, gsum, fgsum, static_cast<double>(used));

    std::vector<double> loo(nbatch);
    for (int b = 0; b < nbatch; ++b)
        loo[b] = cov_of(fsum - bf[b], gsum - bg[b], fgsum - bfg[b],
                        static_cast<double>(used - bs));
    const double lmean =
        std::accumulate(loo.begin(), loo.end(), 0.0) / static_cast<double>(nbatch);
    double jvar = 0.0;
    for (double v : loo) jvar += (v - lmean) * (v - lmean);
    jvar *= (nbatch - 1.0) / static_cast<double>(nbatch);

    EstimatorResult r;
    r.estimate = full;
    r.std_error = std::sqrt(jvar);
    r.tau_int = 0.5;
    r.n = static_cast<std::int64_t>(used);
    return r;
}

struct CovariancePoint {
    double distance = 0.0;
    double cov = 0.0;   // signed; the fit uses |cov|
    double error = 0.0;
};

struct MassGapFit {
    double rate = 0.0;
    double rate_error = 0.0;
    double amplitude = 0.0;
    std::vector<int> used;      // indices of points entering the fit
    std::vector<int> excluded;  // noise-dominated points (|cov| < 2 sigma)
};

/// Weighted least squares of log|cov| against distance:
/// |cov(r)| ~ A exp(-c r). Points below the 2-sigma noise floor are
/// excluded (and recorded); at least 3 informative points are required.
inline MassGapFit mass_gap_fit(const std::vector<CovariancePoint>& points) {
    MassGapFit fit;
    std::vector<int> keep;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (std::abs(points[i].cov) >= 2.0 * points[i].error && points[i].error >= 0.0 &&
            std::abs(points[i].cov) > 0.0)
            keep.push_back(static_cast<int>(i));
        else
            fit.excluded.push_back(static_cast<int>(i));
    }
    if (keep.size() < 3)
        throw NumericError("mass_gap_fit: insufficient-signal (" +
                           std::to_string(keep.size()) + " points above the noise floor)");

    // y = log A - c r, weights 1/sigma_y^2 with sigma_y = sigma/|cov|
    double s = 0.0, sr = 0.0, srr = 0.0, sy = 0.0, sry = 0.0;
    for (int i : keep) {
        const double a = std::abs(points[i].cov);
        const double y = std::log(a);
        double sig = points[i].error > 0.0 ? points[i].error / a : 1e-12;
        sig = std::max(sig, 1e-12);
        const double w = 1.0 / (sig * sig);
        const double r = points[i].distance;
        s += w;
        sr += w * r;
        srr += w * r * r;
        sy += w * y;
        sry += w * r * y;
    }
    const double det = s * srr - sr * sr;
    if (det <= 0.0) throw NumericError("mass_gap_fit: degenerate design (identical distances)");
    const double intercept = (srr * sy - sr * sry) / det;
    const double slope = (s * sry - sr * sy) / det;
    fit.rate = -slope;
    fit.rate_error = std::sqrt(s / det);
    fit.amplitude = std::exp(intercept);
    fit.used = keep;
    return fit;
}

/// One row of the large-N factorization table.
struct FactorizationRow {
    int N = 0;
    double var_scaled = 0.0;        // var(W_l / N)
    double var_error = 0.0;
    double bound = -1.0;            // n(n-3)/(K N); negative when K <= 0
    double defect = 0.0;            // |E[W1 W2]/N^2 - E[W1]E[W2]/N^2|
    double defect_error = 0.0;
};

/// Comparison of a sampled Euclidean second moment against 1/(2m).
struct MomentBoundReport {
    EstimatorResult moment;
    double bound = 0.0;
    double slack = 0.0;  // bound - estimate
    bool satisfied_within(double nsigma) const {
        return moment.estimate <= bound + nsigma * moment.std_error;
    }
};

inline MomentBoundReport higgs_second_moment_report(const std::vector<double>& series,
                                                    double m) {
    require(m > 0.0, "higgs_second_moment_report: m must be positive");
    MomentBoundReport rep;
    rep.moment = estimate(series);
    rep.bound = 1.0 / (2.0 * m);
    rep.slack = rep.bound - rep.moment.estimate;
    return rep;
}

}  // namespace ymh
