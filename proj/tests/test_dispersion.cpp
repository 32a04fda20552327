#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "nlisim/dispersion.hpp"

using namespace nlisim;

namespace {

// Reference values computed independently at 40 significant digits.
constexpr double ktp_nz_1550 = 1.815773110817311444;
constexpr double ktp_nz_775 = 1.846832352608575286;
constexpr double ktp_nx_1550 = 1.728154855521778532;
constexpr double ktp_xxz_bare_dk = 180111.33268103900683;     // rad/m at 775 -> 1550 + 1550 nm
constexpr double ktp_xxz_period = 34.88500814274992524e-6;    // m
constexpr double linbo3_eoe30_dk = -293445.14318304536603;    // rad/m at degeneracy
constexpr double angle_tuned_ref = 2.173666413670506871;      // n_o 2.2, n_e 2.1, 30 deg

const SellmeierSet& ktp() { return default_catalog().at("KTP"); }
const SellmeierSet& linbo3() { return default_catalog().at("LiNbO3"); }

double omega_nm(double nm) { return wavelength_to_omega(nm * 1e-9); }

SellmeierSet constant_medium(double n_slow, double n_fast) {
    SellmeierSet s;
    s.material = "synthetic";
    s.source = "test";
    s.min_wavelength = 100e-9;
    s.max_wavelength = 10e-6;
    s.axes["x"].constant = n_slow * n_slow;
    s.axes["z"].constant = n_fast * n_fast;
    return s;
}

CrystalConfig ktp_xxz() {
    CrystalConfig c;
    c.medium = ktp();
    c.axes = {"x", "x", "z"};
    c.length = 1e-3;
    return c;
}

CrystalConfig linbo3_eoe() {
    CrystalConfig c;
    c.medium = linbo3();
    c.pm_type = PhaseMatching::TypeII_AngleTuned;
    c.axes = {"e", "o", "e"};
    c.theta = M_PI / 6.0;
    c.length = 1e-3;
    return c;
}

} // namespace

TEST(Sellmeier, KtpReferenceValues) {
    EXPECT_NEAR(refractive_index(ktp(), "z", 1550e-9), ktp_nz_1550, 1e-12);
    EXPECT_NEAR(refractive_index(ktp(), "z", 775e-9), ktp_nz_775, 1e-12);
    EXPECT_NEAR(refractive_index(ktp(), "x", 1550e-9), ktp_nx_1550, 1e-12);
}

TEST(Sellmeier, BitIdenticalRepeats) {
    const double a = refractive_index(ktp(), "z", 1550e-9);
    const double b = refractive_index(ktp(), "z", 1550e-9);
    EXPECT_EQ(a, b);
}

TEST(Sellmeier, NormalDispersionAtPumpWavelength) {
    EXPECT_GT(refractive_index(ktp(), "z", 775e-9), refractive_index(ktp(), "z", 1550e-9));
}

TEST(Sellmeier, SmoothAndDecreasingAcrossWindow) {
    for (const auto* set : {&ktp(), &linbo3()})
        for (const auto& [axis, terms] : set->axes) {
            double prev = refractive_index(*set, axis, 450e-9);
            for (double nm = 451.0; nm <= 3000.0; nm += 1.0) {
                const double n = refractive_index(*set, axis, nm * 1e-9);
                EXPECT_LT(n, prev) << set->material << '/' << axis << " at " << nm;
                EXPECT_LT(prev - n, 1e-3) << set->material << '/' << axis << " at " << nm;
                prev = n;
            }
        }
}

TEST(Sellmeier, Errors) {
    EXPECT_THROW(refractive_index(ktp(), "q", 1550e-9), InvalidArgument);
    EXPECT_THROW(refractive_index(ktp(), "z", 300e-9), RangeError);
    EXPECT_THROW(refractive_index(ktp(), "z", 5e-6), RangeError);
}

TEST(Sellmeier, CatalogFileOverridesDefaults) {
    const auto path = std::filesystem::temp_directory_path() / "nlisim_catalog_test.json";
    {
        std::ofstream out(path);
        out << R"({"materials":{"KTP":{"source":"flat","wavelength_range_um":[0.2,5],
                 "axes":{"x":{"constant":4.0},"z":{"constant":4.41}}}}})";
    }
    const auto cat = load_catalog(path.string());
    EXPECT_DOUBLE_EQ(refractive_index(cat.at("KTP"), "x", 1550e-9), 2.0);
    EXPECT_DOUBLE_EQ(refractive_index(cat.at("KTP"), "z", 300e-9), 2.1);
    EXPECT_TRUE(cat.contains("LiNbO3"));
    std::filesystem::remove(path);
}

TEST(Sellmeier, CatalogErrorsNameTheKey) {
    const auto bad = nlohmann::json::parse(R"({"materials":{"M":{"wavelength_range_um":[0.2,5],
                                              "axes":{"x":{"poles":[[1.0]]}}}}})");
    try {
        parse_catalog(bad);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(e.key().find("materials.M"), std::string::npos) << e.key();
    }
    EXPECT_THROW(load_catalog("/nonexistent/catalog.json"), ConfigError);
}

TEST(AngleTuned, Limits) {
    EXPECT_EQ(angle_tuned_index(2.2, 2.1, 0.0), 2.2);
    EXPECT_EQ(angle_tuned_index(2.2, 2.1, M_PI / 2.0), 2.1);
    EXPECT_NEAR(angle_tuned_index(2.2, 2.1, M_PI / 6.0), angle_tuned_ref, 1e-14);
}

TEST(AngleTuned, MonotoneBetweenLimits) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> idx(1.2, 3.0), ang(0.0, M_PI / 2.0);
    for (int k = 0; k < 2000; ++k) {
        const double no = idx(rng), ne = idx(rng);
        double t1 = ang(rng), t2 = ang(rng);
        if (t1 > t2) std::swap(t1, t2);
        const double n1 = angle_tuned_index(no, ne, t1), n2 = angle_tuned_index(no, ne, t2);
        EXPECT_GE(n1, std::min(no, ne) - 1e-15);
        EXPECT_LE(n1, std::max(no, ne) + 1e-15);
        if (ne < no) EXPECT_GE(n1, n2 - 1e-15);
        else EXPECT_LE(n1, n2 + 1e-15);
    }
}

TEST(Wavevector, VacuumAndLinearity) {
    const double w = omega_nm(1550.0);
    EXPECT_NEAR(wavevector(1.0, w), 2.0 * M_PI / 1550e-9, 1e-9);
    EXPECT_NEAR(wavevector(1.8, 2.0 * w), 2.0 * wavevector(1.8, w), 1e-9);
    EXPECT_THROW(wavevector(1.5, 0.0), InvalidArgument);
    EXPECT_THROW(wavevector(1.5, -1.0), InvalidArgument);
}

TEST(DeltaK, KtpBareMismatchAndPeriod) {
    const auto c = ktp_xxz();
    const double w = omega_nm(1550.0);
    EXPECT_NEAR(bare_delta_k(c, w, w), ktp_xxz_bare_dk, 1e-9 * ktp_xxz_bare_dk);
    const auto period = solve_poling_period(c, w, w);
    ASSERT_TRUE(period);
    EXPECT_NEAR(*period, ktp_xxz_period, 1e-9 * ktp_xxz_period);
    EXPECT_NEAR(*period * 1e6, 34.8850, 5e-5);
}

TEST(DeltaK, SolvedPeriodCancelsMismatch) {
    const double w = omega_nm(1550.0);
    const auto c = with_solved_poling(ktp_xxz(), w, w);
    EXPECT_NO_THROW(c.validate());
    EXPECT_LT(std::abs(delta_k(c, w, w)), 1e-9 * std::abs(bare_delta_k(c, w, w)));
    EXPECT_LT(std::abs(delta_k(c, w, w)), 1e-6);
}

TEST(DeltaK, SolvedPeriodForNondegenerateDesign) {
    const double ws = omega_nm(1500.0), wi = omega_nm(1603.0);
    const auto c = with_solved_poling(ktp_xxz(), ws, wi);
    EXPECT_LT(std::abs(delta_k(c, ws, wi)), 1e-9 * std::abs(bare_delta_k(c, ws, wi)));
}

TEST(DeltaK, LithiumNiobateAngleTuned) {
    const auto c = linbo3_eoe();
    EXPECT_NO_THROW(c.validate());
    const double w = omega_nm(1550.0);
    EXPECT_NEAR(delta_k(c, w, w), linbo3_eoe30_dk, 1e-9 * std::abs(linbo3_eoe30_dk));
}

TEST(DeltaK, TypeTwoIsNotSymmetricUnderSwap) {
    const auto c = with_solved_poling(ktp_xxz(), omega_nm(1550.0), omega_nm(1550.0));
    const double a = omega_nm(1540.0), b = omega_nm(1560.0);
    EXPECT_GT(std::abs(delta_k(c, a, b) - delta_k(c, b, a)), 1e3);
}

TEST(DeltaK, ConstantIndexMaterial) {
    CrystalConfig c;
    c.medium = constant_medium(2.0, 2.1);
    c.axes = {"z", "x", "x"};
    const double ws = omega_nm(1500.0), wi = omega_nm(1600.0);
    const double expected = (2.0 - 2.1) * (ws + wi) / speed_of_light;
    EXPECT_NEAR(bare_delta_k(c, ws, wi), expected, 1e-12 * std::abs(expected));
    const auto period = solve_poling_period(c, ws, wi);
    ASSERT_TRUE(period);
    EXPECT_NEAR(*period, 2.0 * M_PI * speed_of_light / (0.1 * (ws + wi)), 1e-9 * *period);
    const auto solved = with_solved_poling(c, ws, wi);
    EXPECT_EQ(solved.grating_sign, -1);
    EXPECT_LT(std::abs(delta_k(solved, ws, wi)), 1e-9 * std::abs(expected));
}

TEST(DeltaK, NoGratingNeededWhenIndicesMatch) {
    CrystalConfig c;
    c.medium = constant_medium(2.0, 2.0);
    c.axes = {"z", "x", "x"};
    const double w = omega_nm(1550.0);
    EXPECT_FALSE(solve_poling_period(c, w, w));
    EXPECT_THROW(with_solved_poling(c, w, w), InvalidArgument);
}

TEST(CrystalConfig, Validation) {
    auto c = ktp_xxz();
    EXPECT_THROW(c.validate(), InvalidArgument); // no period
    c.poling_period = 30e-6;
    EXPECT_NO_THROW(c.validate());
    c.axes.idler = "o";
    EXPECT_THROW(c.validate(), InvalidArgument);
    auto l = linbo3_eoe();
    l.theta = M_PI / 2.0;
    EXPECT_THROW(l.validate(), InvalidArgument);
    l.theta.reset();
    EXPECT_THROW(l.validate(), InvalidArgument);
    l = linbo3_eoe();
    l.length = 0.0;
    EXPECT_THROW(l.validate(), InvalidArgument);
}

TEST(PhaseMatchingFunction, PerfectMatchIsExactlyOne) {
    CrystalConfig c;
    c.medium = constant_medium(2.0, 2.0);
    c.axes = {"x", "x", "x"};
    const double w = omega_nm(1550.0);
    EXPECT_EQ(delta_k(c, w, w), 0.0);
    EXPECT_EQ(phase_matching_function(c, w, w), complex(1.0, 0.0));
}

TEST(PhaseMatchingFunction, FirstZero) {
    CrystalConfig c;
    c.medium = constant_medium(2.0, 2.1);
    c.axes = {"z", "x", "x"};
    const double ws = omega_nm(1500.0), wi = omega_nm(1600.0);
    c.length = 2.0 * M_PI / std::abs(bare_delta_k(c, ws, wi));
    EXPECT_LT(std::abs(phase_matching_function(c, ws, wi)), 1e-15);
}

TEST(PhaseMatchingFunction, ValueAndBound) {
    const auto c = linbo3_eoe();
    const double w = omega_nm(1550.0);
    const double x = 0.5 * linbo3_eoe30_dk * 1e-3;
    const complex expected = std::sin(x) / x * std::exp(complex(0.0, x));
    EXPECT_LT(std::abs(phase_matching_function(c, w, w) - expected), 1e-9);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> nm(1450.0, 1650.0);
    for (int k = 0; k < 1000; ++k)
        EXPECT_LE(std::abs(phase_matching_function(c, omega_nm(nm(rng)), omega_nm(nm(rng)))), 1.0 + 1e-15);
}
