#include "pvsim/environment.hpp"

#include <cmath>
#include <string>

#include "pvsim/errors.hpp"

namespace pvsim {

EnvConditions EnvConditions::from_user_units(double irradiance_w_m2, double temp_c,
                                             const StcContext& ctx) {
    return {irradiance_w_m2 / 1000.0, ctx.to_kelvin(temp_c)};
}

void validate(const EnvConditions& env) {
    if (!(env.irradiance > 0.0) || !std::isfinite(env.irradiance)) {
        throw Error(ErrorKind::InvalidArgument, "irradiance must be positive");
    }
    if (!(env.cell_temp > 0.0) || !std::isfinite(env.cell_temp)) {
        throw Error(ErrorKind::InvalidArgument, "cell temperature must be above absolute zero");
    }
}

double open_circuit_voltage(const PanelDatasheet& ds, const EstimatedParams& params,
                            const EnvConditions& env, const StcContext& ctx) {
    validate(env);
    const double t = env.cell_temp;
    const double voc = ds.voc_stc + ds.beta_voc * (t - ctx.t_stc) +
                       (params.n * static_cast<double>(ds.cell_count) * ctx.boltzmann_k * t /
                        ctx.electron_charge_q) *
                           std::log(env.irradiance);
    if (!(voc > 0.0) || !std::isfinite(voc)) {
        throw Error(ErrorKind::OutOfModelRange,
                    "open-circuit voltage " + std::to_string(voc) +
                        " V is not positive at this irradiance/temperature");
    }
    return voc;
}

double short_circuit_current(const PanelDatasheet& ds, const EnvConditions& env,
                             const StcContext& ctx) {
    validate(env);
    const double isc =
        ds.isc_stc * std::pow(env.irradiance, 1.0 + ds.alpha_isc * (env.cell_temp - ctx.t_stc));
    if (!(isc > 0.0) || !std::isfinite(isc)) {
        throw Error(ErrorKind::OutOfModelRange,
                    "short-circuit current is not representable at this irradiance/temperature");
    }
    return isc;
}

namespace {

double conditioned_saturation_current(double isc, double voc, double n, double m_t) {
    const double denom = std::expm1(m_t * voc / n);
    const double i0 = isc / denom;
    if (!std::isfinite(denom) || !(i0 > 0.0) || !std::isfinite(i0)) {
        throw Error(ErrorKind::NumericalRange,
                    "conditioned saturation current is not representable");
    }
    return i0;
}

} // namespace

double saturation_current_env(const PanelDatasheet& ds, const EstimatedParams& params,
                              const EnvConditions& env, const StcContext& ctx) {
    const double voc = open_circuit_voltage(ds, params, env, ctx);
    const double isc = short_circuit_current(ds, env, ctx);
    return conditioned_saturation_current(
        isc, voc, params.n, ctx.inv_thermal_voltage_at(ds.cell_count, env.cell_temp));
}

ConditionedModel condition_model(const PanelDatasheet& ds, const EstimatedParams& params,
                                 const EnvConditions& env, const StcContext& ctx) {
    ConditionedModel model;
    model.voc_gt = open_circuit_voltage(ds, params, env, ctx);
    model.isc_gt = short_circuit_current(ds, env, ctx);
    model.inv_thermal_voltage = ctx.inv_thermal_voltage_at(ds.cell_count, env.cell_temp);
    model.i0_gt = conditioned_saturation_current(model.isc_gt, model.voc_gt, params.n,
                                                 model.inv_thermal_voltage);
    model.n = params.n;
    model.rs = params.rs;
    return model;
}

double voltage_at_current(double i, const ConditionedModel& model) {
    if (!(i >= 0.0 && i <= model.isc_gt)) {
        throw Error(ErrorKind::Domain, "current " + std::to_string(i) + " A outside [0, " +
                                           std::to_string(model.isc_gt) + "] A");
    }
    // At i = 0 the expression reduces to V_oc|G,T analytically; return it
    // exactly rather than through the log round trip.
    if (i == 0.0) {
        return model.voc_gt;
    }
    return model.n / model.inv_thermal_voltage * std::log1p((model.isc_gt - i) / model.i0_gt) -
           i * model.rs;
}

} // namespace pvsim
