#include <catch2/catch_amalgamated.hpp>

#include "levynest/catalog.hpp"
#include "levynest/json_io.hpp"

using namespace levynest;

TEST_CASE("schema field names are stable") {
    const auto entries = catalog();
    const ojson j = triplet_to_json(catalog_lookup(entries, "mixed2"));
    REQUIRE(j.contains("d"));
    REQUIRE(j.contains("A"));
    REQUIRE(j.contains("gamma"));
    REQUIRE(j.contains("centering"));
    REQUIRE(j.contains("nu"));
    REQUIRE(j["centering"] == "compensated");
    REQUIRE(j["nu"].is_array());
    REQUIRE(j["nu"][0].contains("xi"));
    REQUIRE(j["nu"][0].contains("radial"));
    REQUIRE(j["nu"][0]["radial"]["type"] == "kgrid");
    REQUIRE(j["nu"][1]["radial"]["type"] == "stablemix");

    // declared order, not alphabetical
    auto it = j.begin();
    REQUIRE(it.key() == "d");
    ++it;
    REQUIRE(it.key() == "A");
    ++it;
    REQUIRE(it.key() == "gamma");
}

TEST_CASE("every fixture round-trips bit-exactly") {
    for (const auto& entry : catalog()) {
        INFO(entry.name);
        const ojson once = triplet_to_json(entry.triplet);
        const std::string text = once.dump();
        const LevyTriplet back = triplet_from_json(ojson::parse(text));
        const ojson twice = triplet_to_json(back);
        REQUIRE(once == twice);
        REQUIRE(twice.dump() == text);
        REQUIRE_NOTHROW(validate_triplet(back));
    }
}

TEST_CASE("round trip survives awkward doubles") {
    LevyTriplet mu;
    mu.A = GaussMatrix::scalar(1, 0.1 + 0.2);  // 0.30000000000000004
    mu.gamma = Vec{1.0 / 3.0};
    AtomicRadial at;
    at.atoms = {{std::nextafter(1.0, 2.0), 1e-300}};
    mu.nu.components.push_back({Vec{1.0}, at});
    const std::string text = triplet_to_json(mu).dump();
    const LevyTriplet back = triplet_from_json(ojson::parse(text));
    REQUIRE(back.A(0, 0) == mu.A(0, 0));
    REQUIRE(back.gamma[0] == mu.gamma[0]);
    REQUIRE(std::get<AtomicRadial>(back.nu.components[0].radial).atoms[0].r ==
            std::get<AtomicRadial>(mu.nu.components[0].radial).atoms[0].r);
    REQUIRE(std::get<AtomicRadial>(back.nu.components[0].radial).atoms[0].m == 1e-300);
}

TEST_CASE("mean-zero centering round-trips") {
    LevyTriplet mu;
    mu.A = GaussMatrix(1);
    mu.gamma = Vec{0.7};
    mu.centering = Centering::MeanZero;
    StableMixRadial sm;
    sm.terms = {{1.5, 1.0}};
    mu.nu.components.push_back({Vec{1.0}, sm});
    const ojson j = triplet_to_json(mu);
    REQUIRE(j["centering"] == "mean_zero");
    REQUIRE(triplet_from_json(j).centering == Centering::MeanZero);
}

TEST_CASE("malformed documents are rejected with reasons") {
    const ojson good = triplet_to_json(catalog_lookup(catalog(), "kgrid"));

    ojson bad = good;
    bad["centering"] = "centered";
    REQUIRE_THROWS_AS(triplet_from_json(bad), std::invalid_argument);

    bad = good;
    bad["gamma"] = {1.0, 2.0};  // disagrees with d = 1
    REQUIRE_THROWS_AS(triplet_from_json(bad), std::invalid_argument);

    bad = good;
    bad["A"] = {{1.0, 0.0}};  // ragged
    REQUIRE_THROWS_AS(triplet_from_json(bad), std::invalid_argument);

    bad = good;
    bad["nu"][0]["radial"]["type"] = "spline";
    REQUIRE_THROWS_AS(triplet_from_json(bad), std::invalid_argument);

    bad = good;
    bad.erase("gamma");
    REQUIRE_THROWS(triplet_from_json(bad));
}

TEST_CASE("config parsing overrides selectively") {
    const ojson j = {{"tol_cf", 1e-6}, {"seed", 9}};
    const RunConfig cfg = config_from_json(j);
    REQUIRE(cfg.tol_cf == 1e-6);
    REQUIRE(cfg.seed == 9);
    REQUIRE(cfg.tol_psd == default_config().tol_psd);

    REQUIRE_THROWS_AS(config_from_json(ojson{{"tol_fc", 1e-6}}), std::invalid_argument);
    REQUIRE_THROWS_AS(config_from_json(ojson{{"tol_cf", -1.0}}), std::invalid_argument);

    const RunConfig back = config_from_json(config_to_json(cfg));
    REQUIRE(back.tol_cf == cfg.tol_cf);
    REQUIRE(back.seed == cfg.seed);
}

TEST_CASE("float formatting carries 17 significant digits") {
    REQUIRE(fmt17(0.1) == "0.10000000000000001");
    REQUIRE(fmt17(1.0 / 3.0) == "0.33333333333333331");
    REQUIRE(fmt17(1.0) == "1");
    const double pi = 3.14159265358979323846;
    REQUIRE(std::stod(fmt17(pi)) == pi);
    REQUIRE(std::stod(fmt17(1e-300)) == 1e-300);
}

TEST_CASE("catalog names are unique and members validate") {
    const auto entries = catalog();
    REQUIRE(entries.size() >= 10);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        INFO(entries[i].name);
        REQUIRE_NOTHROW(validate_triplet(entries[i].triplet));
        REQUIRE_FALSE(entries[i].summary.empty());
        for (std::size_t k = i + 1; k < entries.size(); ++k)
            REQUIRE(entries[i].name != entries[k].name);
    }
    REQUIRE_THROWS_AS(catalog_lookup(entries, "missing"), std::invalid_argument);
    REQUIRE(catalog_lookup(entries, "stable15").nu.components.size() == 2);
}
