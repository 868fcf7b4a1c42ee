#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "bgsa/errors.hpp"
#include "bgsa/rng.hpp"

namespace bgsa {

/// Scaled inverse chi-squared distribution, Inv-chi2(dof, scale_sq).
///
/// A draw is dof * scale_sq / c with c ~ chi2(dof), so the density is
/// proportional to x^-(dof/2 + 1) exp(-dof * scale_sq / (2x)) on x > 0.
struct ScaledInvChiSq {
    double dof;
    double scale_sq;

    ScaledInvChiSq(double dof_, double scale_sq_);

    // Only defined for dof > 2.
    double mean() const;
    double mode() const { return dof * scale_sq / (dof + 2.0); }
};

double sinvchisq_sample(const ScaledInvChiSq& dist, Rng& rng);

// Same as sinvchisq_sample but reuses a chi-squared draw given as log(c).
double sinvchisq_from_log_chisq(const ScaledInvChiSq& dist, double log_chisq);

double sinvchisq_logpdf(double x, const ScaledInvChiSq& dist);

struct SliceConfig {
    double initial_width = 1.0;
    int max_step_out = 100;

    void validate() const;
};

struct SliceDraw {
    double x;
    double log_density;  // log-density at x
    double level;        // log slice height used for this step
};

/// One univariate slice-sampling update (stepping out, then shrinkage).
///
/// `log_density` may return -inf outside the support; it must be finite at x0.
template <class LogDensity>
SliceDraw slice_sample_step(LogDensity&& log_density, double x0, const SliceConfig& cfg, Rng& rng) {
    const double f0 = log_density(x0);
    if (std::isnan(f0) || !std::isfinite(x0)) {
        throw StateError("slice sampler: log-density is NaN at the starting point");
    }
    if (f0 == -std::numeric_limits<double>::infinity()) {
        throw StateError("slice sampler: starting point has zero density");
    }
    const double level = f0 + std::log(uniform01(rng));

    const double w = cfg.initial_width;
    double left = x0 - w * uniform01(rng);
    double right = left + w;
    long j = static_cast<long>(std::floor(cfg.max_step_out * uniform01(rng)));
    long k = cfg.max_step_out - 1 - j;
    while (j > 0 && log_density(left) > level) {
        left -= w;
        --j;
    }
    while (k > 0 && log_density(right) > level) {
        right += w;
        --k;
    }

    for (;;) {
        if (right - left < 1e-12) {
            throw DegenerateDensityError("slice sampler: interval collapsed without acceptance");
        }
        const double x1 = left + (right - left) * uniform01(rng);
        const double f1 = log_density(x1);
        if (f1 > level) {
            return {x1, f1, level};
        }
        if (x1 < x0) {
            left = x1;
        } else {
            right = x1;
        }
    }
}

}  // namespace bgsa
