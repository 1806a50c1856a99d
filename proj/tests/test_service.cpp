#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "pvsim/curve.hpp"
#include "pvsim/datasheet_io.hpp"
#include "pvsim/service.hpp"

using namespace pvsim;
using nlohmann::json;

namespace {

constexpr const char* bp_sx_150_json = R"({"name": "BP SX 150", "voc_stc": 43.5, "isc_stc": 4.75,
  "vmp_stc": 34.5, "imp_stc": 4.35, "cell_count": 72, "alpha_isc": 0.00065, "beta_voc": -0.16})";

// Parses as a datasheet but implies a negative series resistance.
constexpr const char* negative_rs = R"({"voc_stc": 40.0, "isc_stc": 4.75,
  "vmp_stc": 34.5, "imp_stc": 4.35, "cell_count": 72, "alpha_isc": 0.00065, "beta_voc": -0.16})";

class Handlers : public ::testing::Test {
protected:
    std::shared_ptr<service::PanelRegistry> registry = service::PanelRegistry::with_bundled_panels();
};

IvCurve library_curve(double irradiance_w_m2, double temperature_c, std::size_t points) {
    const auto ds = bundled_panel("bp_sx_150");
    const auto ctx = make_stc_context(ds);
    const auto env = EnvConditions::from_user_units(irradiance_w_m2, temperature_c, ctx);
    return generate_iv_curve(ds, estimate_parameters(ds, ctx), env, ctx, points);
}

} // namespace

TEST_F(Handlers, RegisterBpSx150) {
    const auto r = service::handle_register(*registry, bp_sx_150_json);
    ASSERT_EQ(r.status, 201) << r.body;
    const auto body = json::parse(r.body);
    EXPECT_FALSE(body.at("panel_id").get<std::string>().empty());
    const auto& est = body.at("estimated");
    EXPECT_NEAR(est.at("n").get<double>(), 1.64, 0.01);
    EXPECT_NEAR(est.at("rs_ohm").get<double>(), 0.342, 0.005);
    EXPECT_NEAR(est.at("i0_stc_a").get<double>(), 2.83e-6, 0.05e-6);
    EXPECT_EQ(est.at("iterations").get<int>(), 2);
    EXPECT_TRUE(est.contains("residual"));
}

TEST_F(Handlers, RegisterMissingKey) {
    std::string body = bp_sx_150_json;
    body.erase(body.find(R"("isc_stc": 4.75,)"), 16);
    const auto r = service::handle_register(*registry, body);
    EXPECT_EQ(r.status, 400);
    EXPECT_NE(json::parse(r.body).at("error").get<std::string>().find("isc_stc"), std::string::npos);
}

TEST_F(Handlers, RegisterOrderingViolation) {
    std::string body = bp_sx_150_json;
    body.replace(body.find("4.35"), 4, "5.00");
    const auto r = service::handle_register(*registry, body);
    EXPECT_EQ(r.status, 400);
    EXPECT_NE(r.body.find("imp_stc < isc_stc"), std::string::npos) << r.body;
}

TEST_F(Handlers, EstimationFailureIs422AndAtomic) {
    const auto before = service::handle_list(*registry).body;
    const auto r = service::handle_register(*registry, negative_rs);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(json::parse(r.body).at("kind"), "inconsistent-datasheet");
    EXPECT_EQ(service::handle_list(*registry).body, before);
}

TEST_F(Handlers, ListPanels) {
    auto list = json::parse(service::handle_list(*registry).body);
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0].at("panel_id"), "bp_sx_150");
    EXPECT_EQ(list[0].at("name"), "BP SX 150");

    std::string renamed = bp_sx_150_json;
    renamed.replace(renamed.find("BP SX 150"), 9, "My panel");
    ASSERT_EQ(service::handle_register(*registry, renamed).status, 201);
    list = json::parse(service::handle_list(*registry).body);
    ASSERT_EQ(list.size(), 2u);
    bool echoed = false;
    for (const auto& p : list) {
        echoed = echoed || p.at("name") == "My panel";
    }
    EXPECT_TRUE(echoed);
}

TEST_F(Handlers, CurveAtStc) {
    const auto r = service::handle_curve(*registry, "bp_sx_150", {});
    ASSERT_EQ(r.status, 200) << r.body;
    const auto body = json::parse(r.body);
    EXPECT_NEAR(body.at("mpp").at("p_mp_w").get<double>(), 150.0, 1.5);
    EXPECT_EQ(body.at("voltage_v").size(), body.at("current_a").size());
    EXPECT_EQ(body.at("voltage_v").size(), body.at("power_w").size());
}

TEST_F(Handlers, CurveMatchesLibraryBitForBit) {
    const auto r = service::handle_curve(*registry, "bp_sx_150",
                                         {{"irradiance_w_m2", "1000"}, {"temperature_c", "50"}});
    ASSERT_EQ(r.status, 200) << r.body;
    const auto body = json::parse(r.body);
    const auto curve = library_curve(1000.0, 50.0, default_curve_points);
    EXPECT_EQ(body.at("voltage_v").get<std::vector<double>>(), curve.voltage);
    EXPECT_EQ(body.at("current_a").get<std::vector<double>>(), curve.current);
    EXPECT_EQ(body.at("power_w").get<std::vector<double>>(), curve.power);
    const auto mpp = track_mpp(curve);
    EXPECT_EQ(body.at("mpp").at("v_mp_v").get<double>(), mpp.v_mp);
    EXPECT_EQ(body.at("mpp").at("i_mp_a").get<double>(), mpp.i_mp);
    EXPECT_EQ(body.at("mpp").at("p_mp_w").get<double>(), mpp.p_mp);
}

TEST_F(Handlers, CurveErrors) {
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", {{"irradiance_w_m2", "0"}}).status, 400);
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", {{"irradiance_w_m2", "abc"}}).status, 400);
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", {{"temperature_c", "25x"}}).status, 400);
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", {{"points", "1"}}).status, 400);
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", {{"points", "20001"}}).status, 400);
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", {{"points", "2.5"}}).status, 400);
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", {{"temperature_c", "-300"}}).status, 400);
    EXPECT_EQ(service::handle_curve(*registry, "missing", {}).status, 404);
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", {{"points", "20000"}}).status, 200);
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", {{"irradiance_w_m2", "1e-30"}}).status, 422);
}

TEST_F(Handlers, IdenticalRequestsGiveIdenticalBodies) {
    const std::map<std::string, std::string> q = {{"irradiance_w_m2", "640"}, {"temperature_c", "41"}};
    const auto first = service::handle_curve(*registry, "bp_sx_150", q).body;
    ASSERT_EQ(service::handle_register(*registry, bp_sx_150_json).status, 201);
    (void)service::handle_curve(*registry, "bp_sx_150", {});
    EXPECT_EQ(service::handle_curve(*registry, "bp_sx_150", q).body, first);
}

class LiveServer : public ::testing::Test {
protected:
    std::shared_ptr<service::PanelRegistry> registry = service::PanelRegistry::with_bundled_panels();
    std::unique_ptr<service::Server> server;
    std::thread thread;
    int port = 0;

    void SetUp() override {
        server = std::make_unique<service::Server>(registry, service::ServerOptions{"127.0.0.1", 0, ""});
        port = server->bind();
        thread = std::thread([this] { server->listen(); });
        server->wait_until_ready();
    }
    void TearDown() override {
        server->stop();
        thread.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

TEST_F(LiveServer, EndpointsOverHttp) {
    auto cli = client();
    auto list = cli.Get("/panels");
    ASSERT_TRUE(list);
    EXPECT_EQ(list->status, 200);
    EXPECT_EQ(list->body, service::handle_list(*registry).body);

    auto post = cli.Post("/panels", bp_sx_150_json, "application/json");
    ASSERT_TRUE(post);
    EXPECT_EQ(post->status, 201);
    const auto id = json::parse(post->body).at("panel_id").get<std::string>();

    auto curve = cli.Get("/panels/" + id + "/curve?irradiance_w_m2=1000&temperature_c=50&points=300");
    ASSERT_TRUE(curve);
    EXPECT_EQ(curve->status, 200);
    EXPECT_EQ(curve->get_header_value("Content-Type"), "application/json");
    EXPECT_EQ(curve->body,
              service::handle_curve(*registry, id,
                                    {{"irradiance_w_m2", "1000"}, {"temperature_c", "50"}, {"points", "300"}})
                  .body);
    const auto body = json::parse(curve->body);
    EXPECT_EQ(body.at("voltage_v").get<std::vector<double>>(), library_curve(1000.0, 50.0, 300).voltage);

    auto missing = cli.Get("/panels/nope/curve");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    auto bad = cli.Get("/panels/bp_sx_150/curve?irradiance_w_m2=0");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
}

TEST_F(LiveServer, RegistryAtomicUnderConcurrentPostAndGet) {
    constexpr int writers = 4;
    constexpr int posts_per_writer = 10;
    std::atomic<bool> done{false};
    std::atomic<int> accepted{0};
    std::atomic<int> reader_errors{0};
    const auto reference_curve = service::handle_curve(*registry, "bp_sx_150", {{"points", "200"}}).body;

    std::vector<std::thread> threads;
    for (int w = 0; w < writers; ++w) {
        threads.emplace_back([&, w] {
            auto cli = client();
            for (int k = 0; k < posts_per_writer; ++k) {
                const bool valid = (k + w) % 2 == 0;
                auto r = cli.Post("/panels", valid ? bp_sx_150_json : negative_rs, "application/json");
                if (r && r->status == 201) {
                    ++accepted;
                } else if (!r || r->status != 422 || valid) {
                    ++reader_errors;
                }
            }
        });
    }
    for (int reader = 0; reader < 3; ++reader) {
        threads.emplace_back([&] {
            auto cli = client();
            std::size_t last_size = 0;
            while (!done) {
                auto list = cli.Get("/panels");
                auto curve = cli.Get("/panels/bp_sx_150/curve?points=200");
                if (!list || !curve || curve->body != reference_curve) {
                    ++reader_errors;
                    continue;
                }
                const auto size = json::parse(list->body).size();
                if (size < last_size || size > 1 + writers * posts_per_writer) {
                    ++reader_errors;
                }
                last_size = size;
            }
        });
    }
    for (int w = 0; w < writers; ++w) {
        threads[w].join();
    }
    done = true;
    for (std::size_t t = writers; t < threads.size(); ++t) {
        threads[t].join();
    }

    EXPECT_EQ(reader_errors.load(), 0);
    EXPECT_EQ(accepted.load(), writers * posts_per_writer / 2);
    EXPECT_EQ(registry->size(), 1u + accepted.load());
    for (const auto& entry : registry->list()) {
        EXPECT_GT(entry.estimated.n, 0.0);
        EXPECT_GE(entry.estimated.rs, 0.0);
    }
}
