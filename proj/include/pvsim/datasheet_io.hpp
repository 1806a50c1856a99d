#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pvsim/curve.hpp"
#include "pvsim/datasheet.hpp"
#include "pvsim/estimation.hpp"

namespace pvsim {

// Datasheet documents are flat JSON objects, one panel per file:
//
//   {"name": "BP SX 150", "voc_stc": 43.5, "isc_stc": 4.75, "vmp_stc": 34.5,
//    "imp_stc": 4.35, "cell_count": 72, "alpha_isc": 0.00065, "beta_voc": -0.16}
//
// "name" is optional; every other key is required and no others are accepted.

/// Parses and validates a datasheet document. Throws Error(InvalidDatasheet)
/// naming the offending key, or Error(InconsistentDatasheet) naming the
/// violated invariant.
[[nodiscard]] PanelDatasheet parse_datasheet(std::string_view text);

/// Inverse of parse_datasheet; numbers are written in shortest round-trip form.
[[nodiscard]] std::string serialize_datasheet(const PanelDatasheet& ds);

/// Reads and parses a datasheet file. I/O failures throw Error(InvalidDatasheet)
/// naming the path.
[[nodiscard]] PanelDatasheet load_datasheet(const std::string& path);

/// Built-in reference panels. Throws Error(UnknownPanel) listing the available names.
[[nodiscard]] PanelDatasheet bundled_panel(std::string_view name);
[[nodiscard]] std::vector<std::string> bundled_panel_names();

/// Shortest decimal string that parses back to exactly `value`.
[[nodiscard]] std::string format_number(double value);

/// "voltage_V,current_A,power_W" header then one row per sample, '\n' terminated.
[[nodiscard]] std::string export_curve_csv(const IvCurve& curve);

/// "n,f_n" header then one row per sample; unevaluable points carry "nan".
[[nodiscard]] std::string export_residual_csv(const std::vector<ResidualSample>& samples);

} // namespace pvsim
