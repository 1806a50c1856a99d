#include "pvsim/datasheet.hpp"

#include <cmath>

#include "pvsim/errors.hpp"

namespace pvsim {

namespace {

void require(bool ok, const char* invariant) {
    if (!ok) {
        throw Error(ErrorKind::InconsistentDatasheet,
                    std::string("datasheet invariant violated: ") + invariant);
    }
}

} // namespace

void validate(const PanelDatasheet& ds) {
    require(std::isfinite(ds.voc_stc) && std::isfinite(ds.isc_stc) && std::isfinite(ds.vmp_stc) &&
                std::isfinite(ds.imp_stc) && std::isfinite(ds.alpha_isc) &&
                std::isfinite(ds.beta_voc),
            "all numeric fields finite");
    require(ds.vmp_stc > 0.0 && ds.vmp_stc < ds.voc_stc, "0 < vmp_stc < voc_stc");
    require(ds.imp_stc > 0.0 && ds.imp_stc < ds.isc_stc, "0 < imp_stc < isc_stc");
    require(ds.cell_count >= 1, "cell_count >= 1");
}

StcContext make_stc_context(const PanelDatasheet& ds) {
    return make_stc_context(ds, StcContext{});
}

StcContext make_stc_context(const PanelDatasheet& ds, StcContext base) {
    if (!(base.t_stc > 0.0) || !(base.boltzmann_k > 0.0) || !(base.electron_charge_q > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "physical constants and t_stc must be positive");
    }
    if (ds.cell_count < 1) {
        throw Error(ErrorKind::InconsistentDatasheet,
                    "datasheet invariant violated: cell_count >= 1");
    }
    base.inv_thermal_voltage = base.inv_thermal_voltage_at(ds.cell_count, base.t_stc);
    return base;
}

} // namespace pvsim
