#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "pvsim/datasheet.hpp"
#include "pvsim/estimation.hpp"

namespace pvsim::service {

struct PanelEntry {
    std::string panel_id;
    PanelDatasheet datasheet;
    StcContext context;
    EstimatedParams estimated;
};

/// Registered panels with their estimates. Writers serialize among themselves;
/// readers share the lock and never block each other. An entry only becomes
/// visible once its estimation has succeeded.
class PanelRegistry {
public:
    /// Registry pre-populated with every bundled panel under its bundled name.
    static std::shared_ptr<PanelRegistry> with_bundled_panels();

    /// Estimates `ds` and registers it under a fresh id. Estimation errors
    /// propagate and leave the registry unchanged.
    PanelEntry register_panel(const PanelDatasheet& ds);

    /// Registers `ds` under a caller-chosen id; throws InvalidArgument if taken.
    PanelEntry register_panel(std::string panel_id, const PanelDatasheet& ds);

    [[nodiscard]] std::optional<PanelEntry> find(std::string_view panel_id) const;
    [[nodiscard]] std::vector<PanelEntry> list() const;
    [[nodiscard]] std::size_t size() const;

private:
    static PanelEntry estimate(std::string panel_id, const PanelDatasheet& ds);

    mutable std::shared_mutex mutex_;
    std::map<std::string, PanelEntry, std::less<>> entries_;
    std::uint64_t next_id_ = 1;
};

struct Response {
    int status = 200;
    std::string body; ///< JSON
};

// Transport-independent endpoint handlers. The HTTP server below is a thin
// adapter over these.

/// POST /panels
[[nodiscard]] Response handle_register(PanelRegistry& registry, std::string_view body);

/// GET /panels
[[nodiscard]] Response handle_list(const PanelRegistry& registry);

/// GET /panels/{id}/curve with query parameters irradiance_w_m2, temperature_c, points.
[[nodiscard]] Response handle_curve(const PanelRegistry& registry, std::string_view panel_id,
                                    const std::map<std::string, std::string>& query);

inline constexpr std::size_t max_curve_points = 20000;

struct ServerOptions {
    std::string bind = "127.0.0.1";
    int port = 8080; ///< 0 picks a free port
    std::string ui_dir; ///< served at "/" when non-empty
};

class Server {
public:
    Server(std::shared_ptr<PanelRegistry> registry, ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the listening socket; returns the bound port. Throws on failure.
    int bind();
    /// Serves until stop() is called. bind() must have succeeded.
    void listen();
    void stop();
    /// Blocks until the server accepts connections.
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace pvsim::service
