#include "pvsim/service.hpp"

#include <charconv>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "pvsim/curve.hpp"
#include "pvsim/datasheet_io.hpp"
#include "pvsim/errors.hpp"

namespace pvsim::service {

using nlohmann::json;

std::shared_ptr<PanelRegistry> PanelRegistry::with_bundled_panels() {
    auto registry = std::make_shared<PanelRegistry>();
    for (const auto& name : bundled_panel_names()) {
        registry->register_panel(name, bundled_panel(name));
    }
    return registry;
}

PanelEntry PanelRegistry::estimate(std::string panel_id, const PanelDatasheet& ds) {
    const auto ctx = make_stc_context(ds);
    const auto params = estimate_parameters(ds, ctx);
    return {std::move(panel_id), ds, ctx, params};
}

PanelEntry PanelRegistry::register_panel(const PanelDatasheet& ds) {
    // Estimation runs before the lock is taken; the id is assigned on insert.
    auto entry = estimate({}, ds);
    std::unique_lock lock(mutex_);
    do {
        entry.panel_id = "panel-" + std::to_string(next_id_++);
    } while (entries_.contains(entry.panel_id));
    entries_.emplace(entry.panel_id, entry);
    return entry;
}

PanelEntry PanelRegistry::register_panel(std::string panel_id, const PanelDatasheet& ds) {
    auto entry = estimate(std::move(panel_id), ds);
    std::unique_lock lock(mutex_);
    if (entries_.contains(entry.panel_id)) {
        throw Error(ErrorKind::InvalidArgument, "panel id \"" + entry.panel_id + "\" is taken");
    }
    entries_.emplace(entry.panel_id, entry);
    return entry;
}

std::optional<PanelEntry> PanelRegistry::find(std::string_view panel_id) const {
    std::shared_lock lock(mutex_);
    if (const auto it = entries_.find(panel_id); it != entries_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::vector<PanelEntry> PanelRegistry::list() const {
    std::shared_lock lock(mutex_);
    std::vector<PanelEntry> out;
    out.reserve(entries_.size());
    for (const auto& [_, entry] : entries_) {
        out.push_back(entry);
    }
    return out;
}

std::size_t PanelRegistry::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

namespace {

Response error_response(int status, std::string_view kind, const std::string& message) {
    return {status, json{{"error", message}, {"kind", kind}}.dump()};
}

Response error_response(int status, const Error& e) {
    return error_response(status, to_string(e.kind()), e.what());
}

json panel_summary(const PanelEntry& entry) {
    json out{{"panel_id", entry.panel_id}};
    out["name"] = entry.datasheet.name ? json(*entry.datasheet.name) : json(nullptr);
    return out;
}

// Parses a query value; the whole string must be a finite number.
std::optional<double> parse_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

} // namespace

Response handle_register(PanelRegistry& registry, std::string_view body) {
    PanelDatasheet ds;
    try {
        ds = parse_datasheet(body);
    } catch (const Error& e) {
        return error_response(400, e);
    }
    try {
        const auto entry = registry.register_panel(ds);
        json out = panel_summary(entry);
        out["estimated"] = {
            {"n", entry.estimated.n},
            {"rs_ohm", entry.estimated.rs},
            {"i0_stc_a", entry.estimated.i0_stc},
            {"iterations", entry.estimated.iterations},
            {"residual", entry.estimated.residual},
        };
        return {201, out.dump()};
    } catch (const Error& e) {
        return error_response(422, e);
    }
}

Response handle_list(const PanelRegistry& registry) {
    json out = json::array();
    for (const auto& entry : registry.list()) {
        out.push_back(panel_summary(entry));
    }
    return {200, out.dump()};
}

Response handle_curve(const PanelRegistry& registry, std::string_view panel_id,
                      const std::map<std::string, std::string>& query) {
    const auto entry = registry.find(panel_id);
    if (!entry) {
        return error_response(404, "not-found", "unknown panel id \"" + std::string(panel_id) + "\"");
    }

    double irradiance_w_m2 = 1000.0;
    double temperature_c = 25.0;
    std::size_t points = default_curve_points;
    if (const auto it = query.find("irradiance_w_m2"); it != query.end()) {
        const auto value = parse_double(it->second);
        if (!value) {
            return error_response(400, "invalid-argument",
                                  "irradiance_w_m2 is not a number: \"" + it->second + "\"");
        }
        irradiance_w_m2 = *value;
    }
    if (const auto it = query.find("temperature_c"); it != query.end()) {
        const auto value = parse_double(it->second);
        if (!value) {
            return error_response(400, "invalid-argument",
                                  "temperature_c is not a number: \"" + it->second + "\"");
        }
        temperature_c = *value;
    }
    if (const auto it = query.find("points"); it != query.end()) {
        const auto value = parse_double(it->second);
        if (!value || *value != std::floor(*value) || *value < 2.0 ||
            *value > static_cast<double>(max_curve_points)) {
            return error_response(400, "invalid-argument",
                                  "points must be an integer in [2, " +
                                      std::to_string(max_curve_points) + "], got \"" +
                                      it->second + "\"");
        }
        points = static_cast<std::size_t>(*value);
    }
    if (!(irradiance_w_m2 > 0.0)) {
        return error_response(400, "invalid-argument", "irradiance must be positive");
    }

    const auto env = EnvConditions::from_user_units(irradiance_w_m2, temperature_c, entry->context);
    try {
        validate(env);
    } catch (const Error& e) {
        return error_response(400, e);
    }
    try {
        const auto curve = generate_iv_curve(entry->datasheet, entry->estimated, env, entry->context,
                                             points);
        const auto mpp = track_mpp(curve);
        json out{
            {"voltage_v", curve.voltage},
            {"current_a", curve.current},
            {"power_w", curve.power},
            {"mpp", {{"v_mp_v", mpp.v_mp}, {"i_mp_a", mpp.i_mp}, {"p_mp_w", mpp.p_mp}}},
        };
        return {200, out.dump()};
    } catch (const Error& e) {
        return error_response(422, e);
    }
}

struct Server::Impl {
    std::shared_ptr<PanelRegistry> registry;
    ServerOptions options;
    httplib::Server http;
};

namespace {

void reply(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
}

} // namespace

Server::Server(std::shared_ptr<PanelRegistry> registry, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
    impl_->registry = std::move(registry);
    impl_->options = std::move(options);
    auto& http = impl_->http;
    auto* reg = impl_->registry.get();

    http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    http.Post("/panels", [reg](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_register(*reg, req.body));
    });
    http.Get("/panels", [reg](const httplib::Request&, httplib::Response& res) {
        reply(res, handle_list(*reg));
    });
    http.Get("/panels/:id/curve", [reg](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [key, value] : req.params) {
            query[key] = value; // last occurrence wins
        }
        reply(res, handle_curve(*reg, req.path_params.at("id"), query));
    });
    if (!impl_->options.ui_dir.empty() && !http.set_mount_point("/", impl_->options.ui_dir)) {
        throw std::runtime_error("UI directory \"" + impl_->options.ui_dir + "\" does not exist");
    }
}

Server::~Server() { stop(); }

int Server::bind() {
    auto& opts = impl_->options;
    if (opts.port == 0) {
        const int port = impl_->http.bind_to_any_port(opts.bind);
        if (port < 0) {
            throw std::runtime_error("cannot bind " + opts.bind);
        }
        return opts.port = port;
    }
    if (!impl_->http.bind_to_port(opts.bind, opts.port)) {
        throw std::runtime_error("cannot bind " + opts.bind + ":" + std::to_string(opts.port));
    }
    return opts.port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
    if (impl_ && impl_->http.is_running()) {
        impl_->http.stop();
    }
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

} // namespace pvsim::service
