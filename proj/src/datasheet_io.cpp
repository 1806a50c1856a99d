#include "pvsim/datasheet_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pvsim/errors.hpp"

namespace pvsim {

namespace {

using nlohmann::json;

constexpr std::array required_keys = {"voc_stc",  "isc_stc",   "vmp_stc", "imp_stc",
                                      "cell_count", "alpha_isc", "beta_voc"};

[[noreturn]] void fail(const std::string& message) {
    throw Error(ErrorKind::InvalidDatasheet, message);
}

double number_field(const json& doc, const char* key) {
    const auto& value = doc.at(key);
    if (!value.is_number()) {
        fail(std::string("key \"") + key + "\" must be a number, got " + value.dump());
    }
    const double x = value.get<double>();
    if (!std::isfinite(x)) {
        fail(std::string("key \"") + key + "\" must be finite, got " + value.dump());
    }
    return x;
}

int cell_count_field(const json& doc) {
    const auto& value = doc.at("cell_count");
    if (value.is_number_integer()) {
        const auto count = value.get<long long>();
        if (count < 1 || count > 1'000'000) {
            fail("key \"cell_count\" must be a positive integer, got " + value.dump());
        }
        return static_cast<int>(count);
    }
    const double x = number_field(doc, "cell_count");
    if (x != std::floor(x) || x < 1.0 || x > 1e6) {
        fail("key \"cell_count\" must be a positive integer, got " + value.dump());
    }
    return static_cast<int>(x);
}

// The panel values from the BP SX 150 manufacturer datasheet.
PanelDatasheet bp_sx_150() {
    return {43.5, 4.75, 34.5, 4.35, 72, 0.00065, -0.16, std::string("BP SX 150")};
}

const std::map<std::string, PanelDatasheet, std::less<>>& bundled() {
    static const std::map<std::string, PanelDatasheet, std::less<>> panels = {
        {"bp_sx_150", bp_sx_150()},
    };
    return panels;
}

} // namespace

PanelDatasheet parse_datasheet(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("datasheet is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        fail("datasheet must be a flat JSON object");
    }

    std::string unknown;
    for (const auto& [key, value] : doc.items()) {
        bool known = key == "name";
        for (const char* k : required_keys) {
            known = known || key == k;
        }
        if (!known) {
            unknown += (unknown.empty() ? "" : ", ") + ('"' + key + '"');
        }
    }
    if (!unknown.empty()) {
        fail("unknown datasheet keys: " + unknown);
    }
    for (const char* key : required_keys) {
        if (!doc.contains(key)) {
            fail(std::string("missing required key \"") + key + "\"");
        }
    }

    PanelDatasheet ds;
    ds.voc_stc = number_field(doc, "voc_stc");
    ds.isc_stc = number_field(doc, "isc_stc");
    ds.vmp_stc = number_field(doc, "vmp_stc");
    ds.imp_stc = number_field(doc, "imp_stc");
    ds.cell_count = cell_count_field(doc);
    ds.alpha_isc = number_field(doc, "alpha_isc");
    ds.beta_voc = number_field(doc, "beta_voc");
    if (doc.contains("name")) {
        const auto& name = doc.at("name");
        if (!name.is_string()) {
            fail("key \"name\" must be a string, got " + name.dump());
        }
        ds.name = name.get<std::string>();
    }
    validate(ds);
    return ds;
}

std::string serialize_datasheet(const PanelDatasheet& ds) {
    json doc = json::object();
    if (ds.name) {
        doc["name"] = *ds.name;
    }
    doc["voc_stc"] = ds.voc_stc;
    doc["isc_stc"] = ds.isc_stc;
    doc["vmp_stc"] = ds.vmp_stc;
    doc["imp_stc"] = ds.imp_stc;
    doc["cell_count"] = ds.cell_count;
    doc["alpha_isc"] = ds.alpha_isc;
    doc["beta_voc"] = ds.beta_voc;
    return doc.dump(2) + "\n";
}

PanelDatasheet load_datasheet(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail("cannot open datasheet file \"" + path + "\"");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_datasheet(buffer.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

PanelDatasheet bundled_panel(std::string_view name) {
    const auto& panels = bundled();
    if (const auto it = panels.find(name); it != panels.end()) {
        return it->second;
    }
    std::string available;
    for (const auto& entry : bundled_panel_names()) {
        available += (available.empty() ? "" : ", ") + entry;
    }
    throw Error(ErrorKind::UnknownPanel,
                "unknown panel \"" + std::string(name) + "\"; available: " + available);
}

std::vector<std::string> bundled_panel_names() {
    std::vector<std::string> names;
    for (const auto& [key, _] : bundled()) {
        names.push_back(key);
    }
    return names;
}

std::string format_number(double value) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), end};
}

std::string export_curve_csv(const IvCurve& curve) {
    std::string out = "voltage_V,current_A,power_W\n";
    out.reserve(out.size() + curve.size() * 64);
    for (std::size_t j = 0; j < curve.size(); ++j) {
        out += format_number(curve.voltage[j]);
        out += ',';
        out += format_number(curve.current[j]);
        out += ',';
        out += format_number(curve.power[j]);
        out += '\n';
    }
    return out;
}

std::string export_residual_csv(const std::vector<ResidualSample>& samples) {
    std::string out = "n,f_n\n";
    for (const auto& s : samples) {
        out += format_number(s.n);
        out += ',';
        out += s.valid ? format_number(s.f) : std::string("nan");
        out += '\n';
    }
    return out;
}

} // namespace pvsim
