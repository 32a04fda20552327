#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "nlisim/engine.hpp"
#include "nlisim/errors.hpp"
#include "nlisim/sellmeier.hpp"

namespace nlisim {

inline constexpr const char* version_string = "0.1.0";

/// A fully resolved run description.
struct RunConfig {
    Setup setup;
    // Closed-form modulation the schedule is meant to realize, if any.
    std::optional<PresetKind> modulation;
    std::string preset_name; // empty for fully custom configs
};

inline std::string preset_name(PresetKind k) { return k == PresetKind::Grid ? "grid" : "hde"; }

inline PresetKind parse_preset_kind(const std::string& name, const std::string& key) {
    if (name == "grid") return PresetKind::Grid;
    if (name == "hde") return PresetKind::Hde;
    throw ConfigError(key, "unknown preset '" + name + "' (expected grid or hde)");
}

inline RunConfig preset_config(PresetKind kind, std::size_t n_points = default_grid_points) {
    return RunConfig{preset(kind, n_points), kind, preset_name(kind)};
}

namespace detail {

using nlohmann::json;

inline const json* section(const json& root, const char* name) {
    if (!root.contains(name)) return nullptr;
    if (!root.at(name).is_object()) throw ConfigError(name, "expected an object");
    return &root.at(name);
}

inline std::optional<double> opt_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    if (!obj.at(key).is_number()) throw ConfigError(path, "expected a number");
    const double v = obj.at(key).get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
}

// Value given in file units, converted by scale; falls back to current (already
// in SI units) when the key is absent and a default exists.
inline double req_number(const json& obj, const std::string& key, const std::string& path, bool have_default,
                         double current, double scale = 1.0) {
    if (auto v = opt_number(obj, key, path)) return *v * scale;
    if (have_default) return current;
    throw ConfigError(path, "missing required value");
}

inline std::optional<std::string> opt_string(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_string()) throw ConfigError(path, "expected a string");
    return obj.at(key).get<std::string>();
}

inline std::vector<double> ps_list(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.at(key).is_array()) throw ConfigError(path, "expected an array of delays in ps");
    std::vector<double> out;
    for (const auto& v : obj.at(key)) {
        if (!v.is_number()) throw ConfigError(path, "expected an array of delays in ps");
        out.push_back(v.get<double>() * 1e-12);
    }
    return out;
}

struct GridSpec {
    double center, span;
    std::size_t points;
};

inline GridSpec grid_spec(const json& obj, const std::string& path, const GridSpec& base) {
    GridSpec g = base;
    if (auto v = opt_number(obj, "center_nm", path + ".center_nm")) g.center = *v * 1e-9;
    if (auto v = opt_number(obj, "span_nm", path + ".span_nm")) g.span = *v * 1e-9;
    if (obj.contains("points")) {
        if (!obj.at("points").is_number_integer() || obj.at("points").get<long long>() < 2)
            throw ConfigError(path + ".points", "expected an integer >= 2");
        g.points = obj.at("points").get<std::size_t>();
    }
    if (!(g.center > 0.0)) throw ConfigError(path + ".center_nm", "missing or non-positive");
    if (!(g.span > 0.0)) throw ConfigError(path + ".span_nm", "missing or non-positive");
    return g;
}

inline GridSpec spec_of(const FrequencyGrid& g) {
    const double lo = omega_to_wavelength(g.omega_max());
    const double hi = omega_to_wavelength(g.omega_min());
    return {0.5 * (lo + hi), hi - lo, g.size()};
}

template <typename F>
auto as_config_error(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key, e.what());
    }
}

} // namespace detail

/// Builds a run from the structured config document.
///
/// Sections: pump, crystal, delays, loss, grid. Units are nm for wavelengths,
/// mm for lengths, ps for delays, dB for loss, degrees for theta. A top-level
/// "preset" seeds every section, which the document may then override.
/// base_dir resolves a relative "sellmeier_file".
inline RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
    using detail::json;
    if (!doc.is_object()) throw ConfigError("", "config root must be an object");

    std::optional<RunConfig> base;
    if (auto p = detail::opt_string(doc, "preset", "preset")) base = preset_config(parse_preset_kind(*p, "preset"));
    const bool have = base.has_value();

    MaterialCatalog catalog = default_catalog();
    if (auto file = detail::opt_string(doc, "sellmeier_file", "sellmeier_file")) {
        std::filesystem::path p(*file);
        if (p.is_relative()) p = base_dir / p;
        catalog = load_catalog(p.string());
    }

    // pump
    PumpConfig pump = have ? base->setup.pump : PumpConfig{0.0, 0.0};
    if (const json* s = detail::section(doc, "pump")) {
        pump.center_wavelength = detail::req_number(*s, "center_nm", "pump.center_nm", have, pump.center_wavelength, 1e-9);
        pump.sigma = detail::req_number(*s, "sigma_nm", "pump.sigma_nm", have, pump.sigma, 1e-9);
    } else if (!have) {
        throw ConfigError("pump", "missing section");
    }
    if (!(pump.center_wavelength > 0.0)) throw ConfigError("pump.center_nm", "must be positive");
    if (!(pump.sigma > 0.0)) throw ConfigError("pump.sigma_nm", "must be positive");

    // grid
    detail::GridSpec gs{}, gi{};
    if (have) {
        gs = detail::spec_of(base->setup.grid_s);
        gi = detail::spec_of(base->setup.grid_i);
    } else {
        gs = gi = {0.0, 0.0, default_grid_points};
    }
    if (const json* s = detail::section(doc, "grid")) {
        const bool split = s->contains("signal") || s->contains("idler");
        if (split) {
            if (s->contains("signal")) gs = detail::grid_spec(s->at("signal"), "grid.signal", gs);
            if (s->contains("idler")) gi = detail::grid_spec(s->at("idler"), "grid.idler", gi);
        } else {
            gs = gi = detail::grid_spec(*s, "grid", gs);
        }
    } else if (!have) {
        throw ConfigError("grid", "missing section");
    }
    const bool grid_given = doc.contains("grid");
    const FrequencyGrid grid_s = !grid_given ? base->setup.grid_s : detail::as_config_error("grid.signal", [&] {
        return make_grid(gs.center, gs.span, gs.points);
    });
    const FrequencyGrid grid_i = !grid_given ? base->setup.grid_i : detail::as_config_error("grid.idler", [&] {
        return make_grid(gi.center, gi.span, gi.points);
    });

    // crystal
    CrystalConfig crystal;
    bool crystal_from_preset = false;
    if (have) {
        crystal = base->setup.crystal;
        crystal_from_preset = true;
    }
    if (const json* s = detail::section(doc, "crystal")) {
        crystal_from_preset = false;
        if (auto m = detail::opt_string(*s, "material", "crystal.material")) {
            if (!catalog.contains(*m)) throw ConfigError("crystal.material", "unknown material '" + *m + "'");
            crystal.medium = catalog.at(*m);
        } else if (!have) {
            throw ConfigError("crystal.material", "missing required value");
        } else if (catalog.contains(crystal.medium.material)) {
            crystal.medium = catalog.at(crystal.medium.material);
        }
        if (auto pm = detail::opt_string(*s, "phase_matching", "crystal.phase_matching")) {
            if (*pm == "qpm") crystal.pm_type = PhaseMatching::TypeII_QPM;
            else if (*pm == "angle") crystal.pm_type = PhaseMatching::TypeII_AngleTuned;
            else throw ConfigError("crystal.phase_matching", "expected 'qpm' or 'angle'");
        } else if (!have) {
            throw ConfigError("crystal.phase_matching", "missing required value");
        }
        crystal.length = detail::req_number(*s, "length_mm", "crystal.length_mm", have, crystal.length, 1e-3);
        if (auto t = detail::opt_number(*s, "theta_deg", "crystal.theta_deg")) crystal.theta = *t * pi / 180.0;
        if (s->contains("axes")) {
            const json& a = s->at("axes");
            if (!a.is_object()) throw ConfigError("crystal.axes", "expected an object");
            if (auto v = detail::opt_string(a, "pump", "crystal.axes.pump")) crystal.axes.pump = *v;
            if (auto v = detail::opt_string(a, "signal", "crystal.axes.signal")) crystal.axes.signal = *v;
            if (auto v = detail::opt_string(a, "idler", "crystal.axes.idler")) crystal.axes.idler = *v;
        } else if (!have) {
            throw ConfigError("crystal.axes", "missing required value");
        }
        crystal.poling_period.reset();
        crystal.grating_sign = 1;
        if (crystal.pm_type == PhaseMatching::TypeII_QPM) {
            if (auto p = detail::opt_number(*s, "poling_period_mm", "crystal.poling_period_mm")) {
                crystal.poling_period = *p * 1e-3;
                if (s->contains("grating_sign")) {
                    const auto& g = s->at("grating_sign");
                    if (!g.is_number_integer() || (g.get<int>() != 1 && g.get<int>() != -1))
                        throw ConfigError("crystal.grating_sign", "expected +1 or -1");
                    crystal.grating_sign = g.get<int>();
                }
            }
        }
    } else if (!have) {
        throw ConfigError("crystal", "missing section");
    }
    if (crystal.pm_type == PhaseMatching::TypeII_QPM && !crystal.poling_period && !crystal_from_preset) {
        const double w = pump.center_omega() / 2.0;
        crystal = detail::as_config_error("crystal.poling_period_mm", [&] { return with_solved_poling(crystal, w, w); });
    }
    detail::as_config_error("crystal", [&] {
        crystal.validate();
        return 0;
    });

    // delays
    DelaySchedule schedule = have ? base->setup.schedule : DelaySchedule{};
    double tau = have ? base->setup.tau : 0.0;
    std::optional<PresetKind> modulation = have ? base->modulation : std::nullopt;
    if (const json* s = detail::section(doc, "delays")) {
        const auto tag = detail::opt_string(*s, "modulation", "delays.modulation");
        if (tag) modulation = parse_preset_kind(*tag, "delays.modulation");
        if (auto t = detail::opt_number(*s, "tau_ps", "delays.tau_ps")) tau = *t * 1e-12;
        const bool explicit_lists = s->contains("pump_ps") || s->contains("signal_ps") || s->contains("idler_ps");
        if (explicit_lists) {
            // An untagged table no longer describes the seeding preset's family.
            if (!tag) {
                modulation.reset();
                if (!s->contains("tau_ps")) tau = 0.0;
            }
            for (const char* k : {"pump_ps", "signal_ps", "idler_ps"})
                if (!s->contains(k)) throw ConfigError(std::string("delays.") + k, "missing required value");
            schedule = DelaySchedule{detail::ps_list(*s, "pump_ps", "delays.pump_ps"),
                                     detail::ps_list(*s, "signal_ps", "delays.signal_ps"),
                                     detail::ps_list(*s, "idler_ps", "delays.idler_ps")};
        } else if (modulation) {
            schedule = *modulation == PresetKind::Grid ? grid_schedule(tau) : hde_schedule(tau);
        }
        if (modulation && !(tau > 0.0)) throw ConfigError("delays.tau_ps", "a modulation tag needs a positive tau_ps");
    } else if (!have) {
        throw ConfigError("delays", "missing section");
    }
    detail::as_config_error("delays", [&] {
        schedule.validate();
        return 0;
    });

    // loss
    LossModel loss = have ? base->setup.loss : LossModel{};
    if (const json* s = detail::section(doc, "loss")) loss.x_db = detail::req_number(*s, "x_db", "loss.x_db", true, loss.x_db);
    if (!(loss.x_db >= 0.0)) throw ConfigError("loss.x_db", "must be >= 0");

    RunConfig rc{Setup{pump, crystal, schedule, loss, grid_s, grid_i, tau}, modulation,
                 have ? base->preset_name : std::string{}};
    return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("parse error: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

/// Echo of every physical parameter of a run, in file units.
inline nlohmann::json describe(const RunConfig& rc) {
    using nlohmann::json;
    const Setup& s = rc.setup;
    auto grid_json = [](const FrequencyGrid& g) {
        return json{{"points", g.size()},
                    {"lambda_min_nm", omega_to_wavelength(g.omega_max()) * 1e9},
                    {"lambda_max_nm", omega_to_wavelength(g.omega_min()) * 1e9},
                    {"omega_min_rad_s", g.omega_min()},
                    {"omega_max_rad_s", g.omega_max()},
                    {"spacing_rad_s", g.spacing()}};
    };
    auto ps = [](const std::vector<double>& v) {
        json a = json::array();
        for (double t : v) a.push_back(t * 1e12);
        return a;
    };
    json crystal{{"material", s.crystal.medium.material},
                 {"sellmeier_source", s.crystal.medium.source},
                 {"phase_matching", s.crystal.pm_type == PhaseMatching::TypeII_QPM ? "qpm" : "angle"},
                 {"length_mm", s.crystal.length * 1e3},
                 {"axes", {{"pump", s.crystal.axes.pump}, {"signal", s.crystal.axes.signal}, {"idler", s.crystal.axes.idler}}}};
    if (s.crystal.poling_period) {
        crystal["poling_period_um"] = *s.crystal.poling_period * 1e6;
        crystal["grating_sign"] = s.crystal.grating_sign;
    }
    if (s.crystal.theta) crystal["theta_deg"] = *s.crystal.theta * 180.0 / pi;
    json delays{{"pump_ps", ps(s.schedule.tau_p)}, {"signal_ps", ps(s.schedule.tau_s)}, {"idler_ps", ps(s.schedule.tau_i)}};
    if (s.tau > 0.0) delays["tau_ps"] = s.tau * 1e12;
    if (rc.modulation) delays["modulation"] = preset_name(*rc.modulation);
    json out{{"pump", {{"center_nm", s.pump.center_wavelength * 1e9}, {"sigma_nm", s.pump.sigma * 1e9}, {"fwhm_nm", s.pump.fwhm() * 1e9}}},
             {"crystal", crystal},
             {"delays", delays},
             {"loss", {{"x_db", s.loss.x_db}}},
             {"grid", {{"signal", grid_json(s.grid_s)}, {"idler", grid_json(s.grid_i)}}}};
    if (!rc.preset_name.empty()) out["preset"] = rc.preset_name;
    return out;
}

} // namespace nlisim
