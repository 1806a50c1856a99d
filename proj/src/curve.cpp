#include "pvsim/curve.hpp"

#include <cmath>

#include "pvsim/errors.hpp"

namespace pvsim {

namespace {

constexpr double crossing_tolerance_v = 1e-9;

// Current at which the terminal voltage reaches zero, given V(lo) > 0 > V(hi).
double zero_voltage_current(const ConditionedModel& model, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double v = voltage_at_current(mid, model);
        if (std::abs(v) <= crossing_tolerance_v) {
            return mid;
        }
        (v > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

IvCurve generate_iv_curve(const PanelDatasheet& ds, const EstimatedParams& params,
                          const EnvConditions& env, const StcContext& ctx, std::size_t points) {
    return generate_iv_curve(condition_model(ds, params, env, ctx), env, points);
}

IvCurve generate_iv_curve(const ConditionedModel& model, const EnvConditions& env,
                          std::size_t points) {
    if (points < 2) {
        throw Error(ErrorKind::InvalidArgument, "curve needs at least 2 points");
    }
    IvCurve curve;
    curve.env = env;
    curve.voltage.reserve(points + 1);
    curve.current.reserve(points + 1);
    curve.power.reserve(points + 1);

    const double last = static_cast<double>(points - 1);
    for (std::size_t j = 0; j < points; ++j) {
        const double i = model.isc_gt * (static_cast<double>(j) / last);
        const double v = voltage_at_current(i, model);
        if (v < 0.0) {
            // Voltage is strictly decreasing in current: everything after is negative too.
            const double crossing = zero_voltage_current(model, curve.current.back(), i);
            if (crossing > curve.current.back()) {
                curve.voltage.push_back(0.0);
                curve.current.push_back(crossing);
                curve.power.push_back(0.0 * crossing);
            }
            break;
        }
        curve.voltage.push_back(v);
        curve.current.push_back(i);
        curve.power.push_back(v * i);
    }
    return curve;
}

MppPoint track_mpp(const IvCurve& curve) {
    if (curve.size() == 0) {
        throw Error(ErrorKind::InvalidArgument, "cannot track the MPP of an empty curve");
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < curve.size(); ++j) {
        if (curve.power[j] > curve.power[best]) {
            best = j;
        }
    }
    MppPoint mpp{curve.voltage[best], curve.current[best], curve.power[best], best};
    if (best == 0 || best + 1 == curve.size()) {
        return mpp;
    }

    const double x0 = curve.voltage[best - 1];
    const double x1 = curve.voltage[best];
    const double x2 = curve.voltage[best + 1];
    const double y0 = curve.power[best - 1];
    const double y1 = curve.power[best];
    const double y2 = curve.power[best + 1];
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if (!(a < 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        return mpp;
    }
    const double xv = -b / (2.0 * a);
    if (!(xv > x2 && xv < x0)) {
        return mpp;
    }
    // Lagrange form evaluated at the vertex.
    const double yv = y0 * (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2)) +
                      y1 * (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2)) +
                      y2 * (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    const double iv = yv / xv;
    const double pv = xv * iv;
    if (!(pv >= y1) || !std::isfinite(pv)) {
        return mpp;
    }
    return {xv, iv, pv, best};
}

} // namespace pvsim
