#include "pvsim/estimation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pvsim/errors.hpp"

namespace pvsim {

namespace {

void require_positive_n(double n) {
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw Error(ErrorKind::Domain, "ideality factor must be positive and finite, got " +
                                           std::to_string(n));
    }
}

double checked(double value, const char* what, double n) {
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::NumericalRange,
                    std::string(what) + " is not representable at n=" + std::to_string(n));
    }
    return value;
}

// Terms shared by the residual and its slope.
struct ResidualTerms {
    double i0;       // I_0|stc
    double excess;   // I_sc - I_mp + I_0
    double log_term; // ln(excess / I_0)
};

ResidualTerms residual_terms(double n, const PanelDatasheet& ds, const StcContext& ctx) {
    const double i0 = saturation_current_at_stc(n, ds, ctx);
    const double gap = ds.isc_stc - ds.imp_stc;
    const double log_term = checked(std::log1p(gap / i0), "ln((I_sc - I_mp + I_0) / I_0)", n);
    return {i0, gap + i0, log_term};
}

} // namespace

double saturation_current_at_stc(double n, const PanelDatasheet& ds, const StcContext& ctx) {
    require_positive_n(n);
    const double denom = std::expm1(ctx.inv_thermal_voltage * ds.voc_stc / n);
    const double i0 = ds.isc_stc / denom;
    if (!std::isfinite(denom) || !(i0 > 0.0) || !std::isfinite(i0)) {
        throw Error(ErrorKind::NumericalRange,
                    "saturation current overflows at n=" + std::to_string(n));
    }
    return i0;
}

double saturation_current_slope(double n, const PanelDatasheet& ds, const StcContext& ctx) {
    const double i0 = saturation_current_at_stc(n, ds, ctx);
    const double x = ctx.inv_thermal_voltage * ds.voc_stc / n;
    // m V_oc I_sc e^x / (n^2 (e^x - 1)^2), written via I_0 so it stays finite
    // wherever I_0 itself is.
    return checked((x / n) * i0 * (1.0 + 1.0 / std::expm1(x)), "dI_0/dn", n);
}

double series_resistance_at_stc(double n, double i0_stc, const PanelDatasheet& ds,
                                const StcContext& ctx) {
    require_positive_n(n);
    if (!(i0_stc > 0.0)) {
        throw Error(ErrorKind::Domain, "saturation current must be positive");
    }
    const double m = ctx.inv_thermal_voltage;
    const double rs = checked(n / (m * ds.imp_stc) * std::log1p((ds.isc_stc - ds.imp_stc) / i0_stc) -
                                  ds.vmp_stc / ds.imp_stc,
                              "series resistance", n);
    if (rs < 0.0) {
        throw Error(ErrorKind::InconsistentDatasheet,
                    "datasheet admits no physical series resistance (R_s = " + std::to_string(rs) +
                        " ohm < 0)");
    }
    return rs;
}

double ideality_residual(double n, const PanelDatasheet& ds, const StcContext& ctx) {
    const auto t = residual_terms(n, ds, ctx);
    const double m = ctx.inv_thermal_voltage;
    return checked(n * ds.imp_stc + t.excess * (n * t.log_term - 2.0 * m * ds.vmp_stc), "f(n)", n);
}

double ideality_residual_slope(double n, const PanelDatasheet& ds, const StcContext& ctx) {
    const auto t = residual_terms(n, ds, ctx);
    const double m = ctx.inv_thermal_voltage;
    const double di0 = saturation_current_slope(n, ds, ctx);
    const double gap = ds.isc_stc - ds.imp_stc;
    const double value = ds.imp_stc + di0 * (n * t.log_term - 2.0 * m * ds.vmp_stc) +
                         t.excess * (t.log_term - n * gap / (t.excess * t.i0) * di0);
    return checked(value, "f'(n)", n);
}

IdealityEstimate estimate_ideality_factor(const PanelDatasheet& ds, const StcContext& ctx,
                                          const NewtonOptions& opts) {
    if (!(opts.initial_n > 0.0) || !(opts.initial_n < opts.n_upper_bound)) {
        throw Error(ErrorKind::InvalidArgument, "initial_n must lie in (0, n_upper_bound)");
    }
    if (!(opts.tolerance > 0.0) || opts.max_iterations < 1 || !(opts.residual_gate > 0.0)) {
        throw Error(ErrorKind::InvalidArgument,
                    "tolerance and residual_gate must be positive, max_iterations >= 1");
    }

    double n = opts.initial_n;
    double f = ideality_residual(n, ds, ctx);
    double gate = opts.residual_gate * std::abs(f);
    if (gate == 0.0) {
        // Initial guess is an exact root; scale by the first term of f instead.
        gate = opts.residual_gate * n * ds.imp_stc;
    }

    for (int iteration = 1; iteration <= opts.max_iterations; ++iteration) {
        const double slope = ideality_residual_slope(n, ds, ctx);
        if (slope == 0.0) {
            throw Error(ErrorKind::SingularStep,
                        "f'(n) vanished at n=" + std::to_string(n) + " on iteration " +
                            std::to_string(iteration));
        }
        const double next = n - f / slope;
        if (!(next > 0.0 && next < opts.n_upper_bound)) {
            throw Error(ErrorKind::Divergence,
                        "Newton iterate n=" + std::to_string(next) + " left (0, " +
                            std::to_string(opts.n_upper_bound) + ") on iteration " +
                            std::to_string(iteration));
        }
        const double step = std::abs(next - n);
        n = next;
        f = ideality_residual(n, ds, ctx);
        if (step <= opts.tolerance && std::abs(f) <= gate) {
            return {n, iteration, std::abs(f)};
        }
    }
    throw Error(ErrorKind::NonConvergence,
                "Newton iteration did not converge within " + std::to_string(opts.max_iterations) +
                    " iterations (last n=" + std::to_string(n) + ")");
}

EstimatedParams estimate_parameters(const PanelDatasheet& ds, const StcContext& ctx,
                                    const NewtonOptions& opts) {
    validate(ds);
    const auto ideality = estimate_ideality_factor(ds, ctx, opts);
    const double i0 = saturation_current_at_stc(ideality.n, ds, ctx);
    const double rs = series_resistance_at_stc(ideality.n, i0, ds, ctx);
    return {ideality.n, rs, i0, ideality.iterations, ideality.residual};
}

std::vector<ResidualSample> sample_residual(const PanelDatasheet& ds, const StcContext& ctx,
                                            double n_min, double n_max, std::size_t count) {
    if (!(n_min > 0.0) || !(n_min < n_max) || !std::isfinite(n_max)) {
        throw Error(ErrorKind::InvalidArgument, "n range must satisfy 0 < n_min < n_max");
    }
    if (count < 2) {
        throw Error(ErrorKind::InvalidArgument, "sample count must be at least 2");
    }
    std::vector<ResidualSample> samples;
    samples.reserve(count);
    const double span = n_max - n_min;
    for (std::size_t i = 0; i < count; ++i) {
        const double n = (i + 1 == count)
                             ? n_max
                             : n_min + span * static_cast<double>(i) / static_cast<double>(count - 1);
        try {
            samples.push_back({n, ideality_residual(n, ds, ctx), true});
        } catch (const Error&) {
            samples.push_back({n, std::numeric_limits<double>::quiet_NaN(), false});
        }
    }
    return samples;
}

} // namespace pvsim
