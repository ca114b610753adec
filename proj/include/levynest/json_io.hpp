#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "levynest/config.hpp"
#include "levynest/triplet.hpp"

namespace levynest {

// Field names and their order are part of the wire contract:
// {"d", "A", "gamma", "centering", "nu"}, with each nu entry carrying
// {"xi", "radial"} and the radial object dispatching on "type".
using ojson = nlohmann::ordered_json;

// 17 significant digits: enough to reproduce any double bit-exactly.
inline std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline ojson radial_to_json(const RadialPart& part) {
    ojson j;
    if (const auto* at = std::get_if<AtomicRadial>(&part)) {
        j["type"] = "atomic";
        ojson atoms = ojson::array();
        for (const auto& a : at->atoms) atoms.push_back({{"r", a.r}, {"m", a.m}});
        j["atoms"] = std::move(atoms);
    } else if (const auto* kg = std::get_if<KGridRadial>(&part)) {
        j["type"] = "kgrid";
        j["alpha_ref"] = kg->alpha_ref;
        j["grid"] = kg->grid;
        j["k"] = kg->k_values;
    } else {
        const auto& sm = std::get<StableMixRadial>(part);
        j["type"] = "stablemix";
        ojson terms = ojson::array();
        for (const auto& t : sm.terms) terms.push_back({{"beta", t.beta}, {"c", t.c}});
        j["terms"] = std::move(terms);
    }
    return j;
}

inline RadialPart radial_from_json(const ojson& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "atomic") {
        AtomicRadial at;
        for (const auto& a : j.at("atoms"))
            at.atoms.push_back({a.at("r").get<double>(), a.at("m").get<double>()});
        return at;
    }
    if (type == "kgrid") {
        KGridRadial kg;
        kg.alpha_ref = j.at("alpha_ref").get<double>();
        kg.grid = j.at("grid").get<std::vector<double>>();
        kg.k_values = j.at("k").get<std::vector<double>>();
        return kg;
    }
    if (type == "stablemix") {
        StableMixRadial sm;
        for (const auto& t : j.at("terms"))
            sm.terms.push_back({t.at("beta").get<double>(), t.at("c").get<double>()});
        return sm;
    }
    throw std::invalid_argument("radial_from_json: unknown type '" + type + "'");
}

inline ojson triplet_to_json(const LevyTriplet& mu) {
    const std::size_t d = mu.dim();
    ojson j;
    j["d"] = d;
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < d; ++i) {
        ojson row = ojson::array();
        for (std::size_t k = 0; k < d; ++k) row.push_back(mu.A(i, k));
        rows.push_back(std::move(row));
    }
    j["A"] = std::move(rows);
    j["gamma"] = mu.gamma.c;
    j["centering"] =
        mu.centering == Centering::Compensated ? "compensated" : "mean_zero";
    ojson nu = ojson::array();
    for (const auto& comp : mu.nu.components) {
        ojson entry;
        entry["xi"] = comp.xi.c;
        entry["radial"] = radial_to_json(comp.radial);
        nu.push_back(std::move(entry));
    }
    j["nu"] = std::move(nu);
    return j;
}

inline LevyTriplet triplet_from_json(const ojson& j) {
    LevyTriplet mu;
    const auto d = j.at("d").get<std::size_t>();
    mu.gamma = Vec(j.at("gamma").get<std::vector<double>>());
    if (mu.gamma.dim() != d)
        throw std::invalid_argument("triplet_from_json: gamma length disagrees with d");
    const auto& rows = j.at("A");
    if (rows.size() != d)
        throw std::invalid_argument("triplet_from_json: A must be d x d");
    std::vector<std::vector<double>> a;
    for (const auto& row : rows) {
        a.push_back(row.get<std::vector<double>>());
        if (a.back().size() != d)
            throw std::invalid_argument("triplet_from_json: A must be d x d");
    }
    mu.A = GaussMatrix::from_rows(a);
    const std::string ctr = j.at("centering").get<std::string>();
    if (ctr == "compensated")
        mu.centering = Centering::Compensated;
    else if (ctr == "mean_zero")
        mu.centering = Centering::MeanZero;
    else
        throw std::invalid_argument("triplet_from_json: unknown centering '" + ctr + "'");
    for (const auto& entry : j.at("nu")) {
        PolarComponent comp;
        comp.xi = Vec(entry.at("xi").get<std::vector<double>>());
        comp.radial = radial_from_json(entry.at("radial"));
        mu.nu.components.push_back(std::move(comp));
    }
    return mu;
}

// Partial override: absent keys keep their defaults, unknown keys are an
// error so a typo cannot silently fall back.
inline RunConfig config_from_json(const ojson& j) {
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "tol_psd") cfg.tol_psd = value.get<double>();
        else if (key == "tol_unit") cfg.tol_unit = value.get<double>();
        else if (key == "tol_cf") cfg.tol_cf = value.get<double>();
        else if (key == "tol_norm") cfg.tol_norm = value.get<double>();
        else if (key == "tol_mono") cfg.tol_mono = value.get<double>();
        else if (key == "tol_gamma") cfg.tol_gamma = value.get<double>();
        else if (key == "quad_target") cfg.quad_target = value.get<double>();
        else if (key == "quad_max_depth") cfg.quad_max_depth = value.get<int>();
        else if (key == "zgrid_count") cfg.zgrid_count = value.get<int>();
        else if (key == "zgrid_radius") cfg.zgrid_radius = value.get<double>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

inline ojson config_to_json(const RunConfig& cfg) {
    ojson j;
    j["tol_psd"] = cfg.tol_psd;
    j["tol_unit"] = cfg.tol_unit;
    j["tol_cf"] = cfg.tol_cf;
    j["tol_norm"] = cfg.tol_norm;
    j["tol_mono"] = cfg.tol_mono;
    j["tol_gamma"] = cfg.tol_gamma;
    j["quad_target"] = cfg.quad_target;
    j["quad_max_depth"] = cfg.quad_max_depth;
    j["zgrid_count"] = cfg.zgrid_count;
    j["zgrid_radius"] = cfg.zgrid_radius;
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace levynest
