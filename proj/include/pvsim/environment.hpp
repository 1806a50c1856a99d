#pragma once

#include "pvsim/datasheet.hpp"
#include "pvsim/estimation.hpp"

namespace pvsim {

/// Operating point in model units.
struct EnvConditions {
    double irradiance = 1.0; ///< [kW/m²]
    double cell_temp = 298.0; ///< [K]

    /// Converts interface units (W/m², °C) using the context's Kelvin offset.
    [[nodiscard]] static EnvConditions from_user_units(double irradiance_w_m2, double temp_c,
                                                       const StcContext& ctx);

    bool operator==(const EnvConditions&) const = default;
};

/// Throws InvalidArgument unless irradiance > 0 and cell_temp > 0 (both finite).
void validate(const EnvConditions& env);

/// Environment-adjusted quantities feeding the curve equation.
struct ConditionedModel {
    double voc_gt = 0.0; ///< [V]
    double isc_gt = 0.0; ///< [A]
    double i0_gt = 0.0;  ///< [A]
    double inv_thermal_voltage = 0.0; ///< q / (N k T) [1/V]
    double n = 0.0;
    double rs = 0.0; ///< [Ω]
};

/// V_oc|G,T = V_oc|stc + b (T - T_stc) + (n N k T / q) ln G.
/// Throws OutOfModelRange when the result is not positive.
[[nodiscard]] double open_circuit_voltage(const PanelDatasheet& ds, const EstimatedParams& params,
                                          const EnvConditions& env, const StcContext& ctx);

/// I_sc|G,T = I_sc|stc G^(1 + a (T - T_stc)).
///
/// Note that at G = 1 kW/m² temperature has no effect on the result.
[[nodiscard]] double short_circuit_current(const PanelDatasheet& ds, const EnvConditions& env,
                                           const StcContext& ctx);

/// I_0|G,T from the conditioned open-circuit point, using q / (N k T) at the
/// actual cell temperature.
[[nodiscard]] double saturation_current_env(const PanelDatasheet& ds,
                                            const EstimatedParams& params,
                                            const EnvConditions& env, const StcContext& ctx);

[[nodiscard]] ConditionedModel condition_model(const PanelDatasheet& ds,
                                               const EstimatedParams& params,
                                               const EnvConditions& env, const StcContext& ctx);

/// Terminal voltage at output current `i` for 0 <= i <= isc_gt. Negative
/// near short circuit when R_s > 0. Throws Domain outside that range.
[[nodiscard]] double voltage_at_current(double i, const ConditionedModel& model);

} // namespace pvsim
