#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "asian/core.hpp"
#include "asian/errors.hpp"
#include "asian/harness/catalog.hpp"

namespace asian::harness {

using nlohmann::json;

inline json to_json(const Scenario& sc) {
    json j;
    j["label"] = sc.label;
    j["spot"] = sc.market.spot;
    j["rate"] = sc.market.rate;
    j["yield"] = sc.market.yield;
    j["vol"] = sc.market.vol;
    j["strike"] = sc.option.strike;
    j["maturity"] = sc.option.maturity;
    j["kind"] = to_string(sc.option.kind);
    j["fixings"] = sc.monitoring.fixings;
    j["dividends"] = json::array();
    for (const auto& d : sc.dividends.payments) j["dividends"].push_back({{"time", d.time}, {"amount", d.amount}});
    return j;
}

inline OptionKind parse_kind(const std::string& s) {
    if (s == "call") return OptionKind::call;
    if (s == "put") return OptionKind::put;
    throw ConfigError("option kind must be 'call' or 'put', got '" + s + "'");
}

inline Scenario scenario_from_json(const json& j) {
    try {
        Scenario sc;
        sc.label = j.value("label", std::string("custom"));
        sc.market.spot = j.at("spot").get<double>();
        sc.market.rate = j.at("rate").get<double>();
        sc.market.yield = j.value("yield", 0.0);
        sc.market.vol = j.at("vol").get<double>();
        sc.option.strike = j.at("strike").get<double>();
        sc.option.maturity = j.at("maturity").get<double>();
        sc.option.kind = parse_kind(j.value("kind", std::string("call")));
        sc.monitoring.fixings = j.at("fixings").get<std::vector<double>>();
        if (j.contains("dividends"))
            for (const auto& d : j.at("dividends"))
                sc.dividends.payments.push_back({d.at("time").get<double>(), d.at("amount").get<double>()});
        sc.validate();
        return sc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed scenario JSON: ") + e.what());
    }
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

/// A catalog label, or else a path to a scenario JSON file.
inline Scenario resolve_scenario(const std::string& label_or_path) {
    for (const auto& l : catalog_labels())
        if (l == label_or_path) return catalog_scenario(l);
    if (label_or_path == "single-fixing") return single_fixing_scenario();
    if (std::filesystem::exists(label_or_path)) return load_scenario_file(label_or_path);
    throw ConfigError("'" + label_or_path + "' is neither a catalog label nor a scenario file");
}

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Hash over the canonical JSON form (sorted keys, round-trip doubles).
inline std::string scenario_hash(const Scenario& sc) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a64(to_json(sc).dump());
    return os.str();
}

}  // namespace asian::harness
