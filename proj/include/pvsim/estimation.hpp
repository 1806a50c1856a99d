#pragma once

#include <cstddef>
#include <vector>

#include "pvsim/datasheet.hpp"

namespace pvsim {

// Single-diode panel model at STC:
//   I = I_sc - I_0 (exp((V + I R_s) / (n N V_t)) - 1)
// The unknowns n, R_s and I_0 are extracted from the datasheet by imposing the
// open-circuit point, the maximum power point and dP/dV = 0 at that point. The
// last condition collapses to a scalar equation in n alone (the "ideality
// residual" below), solved by Newton's method.

/// I_0 at STC implied by the open-circuit point for a given ideality factor.
/// Throws NumericalRange when the exponential overflows (very small n).
[[nodiscard]] double saturation_current_at_stc(double n, const PanelDatasheet& ds,
                                               const StcContext& ctx);

/// d I_0 / d n of saturation_current_at_stc.
[[nodiscard]] double saturation_current_slope(double n, const PanelDatasheet& ds,
                                              const StcContext& ctx);

/// R_s at STC implied by the maximum power point for the given (n, I_0).
/// Throws InconsistentDatasheet when the result is negative.
[[nodiscard]] double series_resistance_at_stc(double n, double i0_stc, const PanelDatasheet& ds,
                                              const StcContext& ctx);

/// Residual of the dP/dV = 0 condition at the STC maximum power point, as a
/// function of n only. Its root is the ideality factor.
[[nodiscard]] double ideality_residual(double n, const PanelDatasheet& ds, const StcContext& ctx);

/// Analytic derivative of ideality_residual with respect to n.
[[nodiscard]] double ideality_residual_slope(double n, const PanelDatasheet& ds,
                                             const StcContext& ctx);

struct NewtonOptions {
    double initial_n = 1.0;
    /// Converged once |n_{i+1} - n_i| <= tolerance (and the residual gate holds).
    double tolerance = 1e-4;
    int max_iterations = 50;
    /// |f(n)| must also be <= residual_gate * |f(initial_n)|.
    double residual_gate = 1e-6;
    /// Iterates must stay inside (0, n_upper_bound).
    double n_upper_bound = 10.0;
};

struct IdealityEstimate {
    double n = 0.0;
    int iterations = 0;    ///< Newton updates applied after the initial guess
    double residual = 0.0; ///< |f(n)| at the returned n
};

/// Newton iteration on ideality_residual.
///
/// Throws NonConvergence when max_iterations is exhausted, Divergence when an
/// iterate leaves (0, n_upper_bound), SingularStep on a zero derivative and
/// NumericalRange when the residual cannot be evaluated.
[[nodiscard]] IdealityEstimate estimate_ideality_factor(const PanelDatasheet& ds,
                                                        const StcContext& ctx,
                                                        const NewtonOptions& opts = {});

struct EstimatedParams {
    double n = 0.0;
    double rs = 0.0;     ///< series resistance [Ω]
    double i0_stc = 0.0; ///< reverse saturation current at STC [A]
    int iterations = 0;
    double residual = 0.0;

    bool operator==(const EstimatedParams&) const = default;
};

/// Full extraction: n by Newton, then I_0 and R_s at the converged n.
[[nodiscard]] EstimatedParams estimate_parameters(const PanelDatasheet& ds, const StcContext& ctx,
                                                  const NewtonOptions& opts = {});

struct ResidualSample {
    double n = 0.0;
    double f = 0.0;
    bool valid = false; ///< false when f(n) could not be evaluated; f is then NaN
};

/// Uniform sweep of the ideality residual over [n_min, n_max] (both ends included).
[[nodiscard]] std::vector<ResidualSample> sample_residual(const PanelDatasheet& ds,
                                                          const StcContext& ctx, double n_min,
                                                          double n_max, std::size_t count);

} // namespace pvsim
