#pragma once

#include <optional>
#include <string>

namespace pvsim {

/// The seven manufacturer values a panel simulation starts from. The first
/// four are quoted at standard test conditions (1000 W/m², 25 °C); the
/// remaining three are panel constants.
struct PanelDatasheet {
    double voc_stc = 0.0;   ///< open-circuit voltage at STC [V]
    double isc_stc = 0.0;   ///< short-circuit current at STC [A]
    double vmp_stc = 0.0;   ///< maximum-power-point voltage at STC [V]
    double imp_stc = 0.0;   ///< maximum-power-point current at STC [A]
    int cell_count = 0;     ///< series cells in the panel
    double alpha_isc = 0.0; ///< short-circuit current temperature coefficient [1/°C]
    double beta_voc = 0.0;  ///< open-circuit voltage temperature coefficient [V/°C]
    std::optional<std::string> name;

    bool operator==(const PanelDatasheet&) const = default;
};

/// Throws Error(InconsistentDatasheet) naming the first violated invariant.
void validate(const PanelDatasheet& ds);

/// Physical constants and reference temperature used by every model equation,
/// plus the per-volt scale q/(N k T_stc) derived for one panel.
struct StcContext {
    double boltzmann_k = 1.381e-23;      ///< [J/K]
    double electron_charge_q = 1.602e-19; ///< [C]
    double t_stc = 298.0;                 ///< cell temperature at STC [K]
    double kelvin_offset = 273.0;         ///< °C to K conversion offset
    double inv_thermal_voltage = 0.0;     ///< q / (N k T_stc) [1/V]

    /// q / (N k T) for an arbitrary cell temperature.
    [[nodiscard]] double inv_thermal_voltage_at(int cell_count, double cell_temp_k) const {
        return electron_charge_q / (static_cast<double>(cell_count) * boltzmann_k * cell_temp_k);
    }

    [[nodiscard]] double to_kelvin(double celsius) const { return celsius + kelvin_offset; }
};

/// Context for `ds` with default constants.
[[nodiscard]] StcContext make_stc_context(const PanelDatasheet& ds);

/// Context for `ds` built on caller-supplied constants; `base.inv_thermal_voltage` is ignored.
[[nodiscard]] StcContext make_stc_context(const PanelDatasheet& ds, StcContext base);

} // namespace pvsim
