#pragma once

#include <array>
#include <string>
#include <vector>

#include "asian/core.hpp"
#include "asian/errors.hpp"

namespace asian::harness {

inline constexpr double day = 1.0 / 365.0;
inline constexpr std::array<double, 4> catalog_dividend_amounts{2.1, 1.9, 2.051, 1.949};

inline MarketParams catalog_market() { return {100.0, 0.05, 0.02, 0.4}; }
inline OptionSpec catalog_option() { return {100.0, 1.0, OptionKind::call}; }

namespace detail {

inline std::vector<double> days_before(double maturity, std::initializer_list<double> offsets) {
    std::vector<double> t;
    for (double d : offsets) t.push_back(maturity - d * day);
    return t;
}

inline std::vector<double> fixings_for(const std::string& window, const std::string& spacing, double maturity) {
    if (window == "tail") {
        if (spacing == "eq") return days_before(maturity, {9, 8, 7, 6, 5, 4, 3, 2, 1, 0});
        // Ten business days ending on maturity, two weekends in between.
        return days_before(maturity, {13, 12, 11, 8, 7, 6, 5, 4, 1, 0});
    }
    if (spacing == "eq") {
        std::vector<double> t;
        for (int i = 1; i <= 10; ++i) t.push_back(maturity * i / 10.0);
        return t;
    }
    // Same fixing counts between the late dividends as the equidistant layout.
    std::vector<double> t{0.08, 0.21, 0.3, 0.42, 0.5, 0.61, 0.73, 0.8, 0.9, 1.0};
    for (auto& x : t) x *= maturity;
    return t;
}

inline std::vector<double> dividend_times(const std::string& window, const std::string& timing,
                                          const std::vector<double>& fixings, double maturity) {
    if (timing == "none") return {};
    if (timing == "early") {
        if (window == "tail") return {0.125 * maturity, 0.375 * maturity, 0.625 * maturity, 0.875 * maturity};
        return {4 * day, 11 * day, 18 * day, 25 * day};
    }
    if (window == "full") return {0.25 * maturity, 0.45 * maturity, 0.65 * maturity, 0.85 * maturity};
    // Midway between fixings 1|2, 3|4, 5|6 and 7|8.
    std::vector<double> t;
    for (std::size_t k = 0; k < 4; ++k) t.push_back(0.5 * (fixings[2 * k] + fixings[2 * k + 1]));
    return t;
}

}  // namespace detail

/// Scenario for a label <tail|full>-<none|early|late>-<eq|neq>.
inline Scenario catalog_scenario(const std::string& label) {
    const auto a = label.find('-');
    const auto b = a == std::string::npos ? a : label.find('-', a + 1);
    if (b == std::string::npos) throw ConfigError("unknown catalog label '" + label + "'");
    const std::string window = label.substr(0, a), timing = label.substr(a + 1, b - a - 1),
                      spacing = label.substr(b + 1);
    if ((window != "tail" && window != "full") || (timing != "none" && timing != "early" && timing != "late") ||
        (spacing != "eq" && spacing != "neq"))
        throw ConfigError("unknown catalog label '" + label + "'");

    Scenario sc;
    sc.market = catalog_market();
    sc.option = catalog_option();
    sc.label = label;
    sc.monitoring.fixings = detail::fixings_for(window, spacing, sc.option.maturity);
    const auto times = detail::dividend_times(window, timing, sc.monitoring.fixings, sc.option.maturity);
    for (std::size_t k = 0; k < times.size(); ++k) sc.dividends.payments.push_back({times[k], catalog_dividend_amounts[k]});
    sc.validate();
    return sc;
}

inline std::vector<std::string> catalog_labels() {
    std::vector<std::string> out;
    for (const char* w : {"tail", "full"})
        for (const char* d : {"none", "early", "late"})
            for (const char* s : {"eq", "neq"}) out.push_back(std::string(w) + "-" + d + "-" + s);
    return out;
}

inline std::vector<Scenario> catalog() {
    std::vector<Scenario> out;
    for (const auto& l : catalog_labels()) out.push_back(catalog_scenario(l));
    return out;
}

/// Catalog market and contract with one fixing at maturity.
inline Scenario single_fixing_scenario(OptionKind kind = OptionKind::call) {
    Scenario sc;
    sc.market = catalog_market();
    sc.option = catalog_option();
    sc.option.kind = kind;
    sc.monitoring.fixings = {sc.option.maturity};
    sc.label = "single-fixing";
    return sc;
}

inline Scenario with_kind(Scenario sc, OptionKind kind) {
    sc.option.kind = kind;
    return sc;
}

}  // namespace asian::harness
