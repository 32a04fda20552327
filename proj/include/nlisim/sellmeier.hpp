#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nlisim/errors.hpp"

namespace nlisim {

/// Dispersion of one polarization axis, wavelength in micrometres:
///
///   n^2 = constant + sum_k B_k / (l^2 - C_k) + sum_k B_k l^2 / (l^2 - C_k) - ir_correction * l^2
///
/// "poles" holds the first family of (B, C) pairs and "resonances" the second.
/// Both the two-pole form used for KTP and the three-resonance form used for
/// lithium niobate fit this shape, as does a constant index (no terms).
struct SellmeierAxis {
    double constant = 1.0;
    std::vector<std::pair<double, double>> poles;
    std::vector<std::pair<double, double>> resonances;
    double ir_correction = 0.0;

    double index_squared(double lambda_um) const {
        const double l2 = lambda_um * lambda_um;
        double n2 = constant - ir_correction * l2;
        for (const auto& [b, c] : poles) n2 += b / (l2 - c);
        for (const auto& [b, c] : resonances) n2 += b * l2 / (l2 - c);
        return n2;
    }
};

/// Coefficient set for one material: per-axis formulas plus the wavelength
/// window in which they may be evaluated.
struct SellmeierSet {
    std::string material;
    std::string source;
    double min_wavelength = 0.0; // m
    double max_wavelength = 0.0; // m
    std::map<std::string, SellmeierAxis> axes;

    bool has_axis(const std::string& name) const { return axes.contains(name); }
};

inline double refractive_index(const SellmeierSet& set, const std::string& axis, double wavelength) {
    const auto it = set.axes.find(axis);
    if (it == set.axes.end())
        throw InvalidArgument("refractive_index: material '" + set.material + "' has no axis '" + axis + "'");
    if (!(wavelength >= set.min_wavelength && wavelength <= set.max_wavelength))
        throw RangeError("refractive_index: wavelength " + std::to_string(wavelength * 1e9) +
                         " nm outside validity range of " + set.material);
    const double n2 = it->second.index_squared(wavelength * 1e6);
    const double n = std::sqrt(n2);
    if (!(n > 1.0 && n < 4.0))
        throw NumericError("refractive_index: " + set.material + "/" + axis + " evaluates to non-physical index");
    return n;
}

using MaterialCatalog = std::map<std::string, SellmeierSet>;

namespace detail {

inline std::vector<std::pair<double, double>> parse_terms(const nlohmann::json& j, const std::string& key) {
    std::vector<std::pair<double, double>> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) throw ConfigError(key, "expected an array of [B, C] pairs");
    for (const auto& t : j.at(key)) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number())
            throw ConfigError(key, "expected an array of [B, C] pairs");
        out.emplace_back(t[0].get<double>(), t[1].get<double>());
    }
    return out;
}

inline double number_at(const nlohmann::json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(path + key, "expected a number");
    return j.at(key).get<double>();
}

} // namespace detail

/// Parses the coefficient-file schema:
///
///   {"materials": {"KTP": {"source": "...", "wavelength_range_um": [lo, hi],
///                          "axes": {"x": {"constant": a, "poles": [[B, C], ...],
///                                         "resonances": [[B, C], ...], "ir_correction": d}}}}}
inline MaterialCatalog parse_catalog(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("materials") || !doc.at("materials").is_object())
        throw ConfigError("materials", "missing materials object");
    MaterialCatalog catalog;
    for (const auto& [name, m] : doc.at("materials").items()) {
        const std::string path = "materials." + name + ".";
        SellmeierSet set;
        set.material = name;
        set.source = m.value("source", std::string{});
        if (!m.contains("wavelength_range_um") || !m.at("wavelength_range_um").is_array() ||
            m.at("wavelength_range_um").size() != 2)
            throw ConfigError(path + "wavelength_range_um", "expected [min, max]");
        set.min_wavelength = m.at("wavelength_range_um")[0].get<double>() * 1e-6;
        set.max_wavelength = m.at("wavelength_range_um")[1].get<double>() * 1e-6;
        if (!(set.min_wavelength > 0.0 && set.min_wavelength < set.max_wavelength))
            throw ConfigError(path + "wavelength_range_um", "need 0 < min < max");
        if (!m.contains("axes") || !m.at("axes").is_object() || m.at("axes").empty())
            throw ConfigError(path + "axes", "missing axes object");
        for (const auto& [axis_name, a] : m.at("axes").items()) {
            const std::string apath = path + "axes." + axis_name + ".";
            SellmeierAxis axis;
            axis.constant = detail::number_at(a, "constant", apath);
            try {
                axis.poles = detail::parse_terms(a, "poles");
                axis.resonances = detail::parse_terms(a, "resonances");
            } catch (const ConfigError& e) {
                throw ConfigError(apath + e.key(), "expected an array of [B, C] pairs");
            }
            if (a.contains("ir_correction")) axis.ir_correction = detail::number_at(a, "ir_correction", apath);
            set.axes.emplace(axis_name, std::move(axis));
        }
        catalog.emplace(name, std::move(set));
    }
    return catalog;
}

inline constexpr const char* default_coefficients_json = R"json({
  "materials": {
    "KTP": {
      "source": "K. Kato and E. Takaoka, Appl. Opt. 41, 5040 (2002)",
      "wavelength_range_um": [0.43, 3.54],
      "axes": {
        "x": {"constant": 3.29100, "poles": [[0.04140, 0.03978], [9.35522, 31.45571]]},
        "y": {"constant": 3.45018, "poles": [[0.04341, 0.04597], [16.98825, 39.43799]]},
        "z": {"constant": 4.59423, "poles": [[0.06206, 0.04763], [110.80672, 86.12171]]}
      }
    },
    "LiNbO3": {
      "source": "D. E. Zelmon, D. L. Small and D. Jundt, J. Opt. Soc. Am. B 14, 3319 (1997), congruent",
      "wavelength_range_um": [0.40, 5.00],
      "axes": {
        "o": {"constant": 1.0, "resonances": [[2.6734, 0.01764], [1.2290, 0.05914], [12.614, 474.60]]},
        "e": {"constant": 1.0, "resonances": [[2.9804, 0.02047], [0.5981, 0.0666], [8.9543, 416.08]]}
      }
    }
  }
})json";

inline const MaterialCatalog& default_catalog() {
    static const MaterialCatalog catalog = parse_catalog(nlohmann::json::parse(default_coefficients_json));
    return catalog;
}

/// Reads a coefficient file; its materials replace same-named defaults.
inline MaterialCatalog load_catalog(const std::string& path, MaterialCatalog base = default_catalog()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("sellmeier_file", "cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("sellmeier_file", std::string("parse error: ") + e.what());
    }
    for (auto& [name, set] : parse_catalog(doc)) base.insert_or_assign(name, std::move(set));
    return base;
}

} // namespace nlisim
