#include "bgsa/distributions.hpp"

#include <cmath>
#include <limits>

namespace bgsa {

ScaledInvChiSq::ScaledInvChiSq(double dof_, double scale_sq_) : dof(dof_), scale_sq(scale_sq_) {
    if (!std::isfinite(dof) || !std::isfinite(scale_sq) || dof <= 0.0 || scale_sq <= 0.0) {
        throw DomainError("Inv-chi2 requires finite dof > 0 and scale > 0 (got dof=" + std::to_string(dof) +
                          ", scale=" + std::to_string(scale_sq) + ")");
    }
}

double ScaledInvChiSq::mean() const {
    if (dof <= 2.0) {
        return std::numeric_limits<double>::infinity();
    }
    return dof * scale_sq / (dof - 2.0);
}

double sinvchisq_from_log_chisq(const ScaledInvChiSq& dist, double log_chisq) {
    const double x = std::exp(std::log(dist.dof * dist.scale_sq) - log_chisq);
    if (x > std::numeric_limits<double>::max()) {
        return std::numeric_limits<double>::max();
    }
    if (x < std::numeric_limits<double>::min()) {
        return std::numeric_limits<double>::min();
    }
    return x;
}

double sinvchisq_sample(const ScaledInvChiSq& dist, Rng& rng) {
    // chi2(dof) = 2 * Gamma(dof / 2)
    const double log_chisq = std::log(2.0) + log_gamma_draw(0.5 * dist.dof, rng);
    return sinvchisq_from_log_chisq(dist, log_chisq);
}

double sinvchisq_logpdf(double x, const ScaledInvChiSq& dist) {
    if (!(x > 0.0)) {
        throw DomainError("Inv-chi2 log-density evaluated at non-positive x");
    }
    const double half = 0.5 * dist.dof;
    return half * std::log(half) + half * std::log(dist.scale_sq) - std::lgamma(half) - (half + 1.0) * std::log(x) -
           half * dist.scale_sq / x;
}

void SliceConfig::validate() const {
    if (!(initial_width > 0.0) || !std::isfinite(initial_width)) {
        throw InputError("slice initial width must be positive");
    }
    if (max_step_out < 1) {
        throw InputError("slice max_step_out must be at least 1");
    }
}

}  // namespace bgsa
