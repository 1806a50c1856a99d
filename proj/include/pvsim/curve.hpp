#pragma once

#include <cstddef>
#include <vector>

#include "pvsim/environment.hpp"

namespace pvsim {

inline constexpr std::size_t default_curve_points = 2000;

/// Sampled output characteristic, ordered by increasing current (so voltage
/// decreases from V_oc to 0).
struct IvCurve {
    std::vector<double> voltage; ///< [V]
    std::vector<double> current; ///< [A]
    std::vector<double> power;   ///< [W], voltage[j] * current[j]
    EnvConditions env;

    [[nodiscard]] std::size_t size() const { return voltage.size(); }
};

struct MppPoint {
    double v_mp = 0.0;
    double i_mp = 0.0;
    double p_mp = 0.0;
    std::size_t index = 0; ///< argmax sample the estimate was taken around
};

/// Samples `points` currents uniformly on [0, I_sc|G,T] and evaluates the
/// terminal voltage at each. Samples with negative voltage are dropped and the
/// V = 0 crossing, located by bisection, is appended in their place.
[[nodiscard]] IvCurve generate_iv_curve(const PanelDatasheet& ds, const EstimatedParams& params,
                                        const EnvConditions& env, const StcContext& ctx,
                                        std::size_t points = default_curve_points);

/// Overload for an already conditioned model.
[[nodiscard]] IvCurve generate_iv_curve(const ConditionedModel& model, const EnvConditions& env,
                                        std::size_t points = default_curve_points);

/// Maximum power sample (lowest index on ties). For an interior argmax the
/// reported point is the vertex of the parabola P(V) through the argmax and
/// its two neighbours.
[[nodiscard]] MppPoint track_mpp(const IvCurve& curve);

} // namespace pvsim
