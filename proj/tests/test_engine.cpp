#include <gtest/gtest.h>

#include <array>
#include <random>

#include "nlisim/engine.hpp"
#include "nlisim/schmidt.hpp"

using namespace nlisim;

namespace {

// Per-crystal exponents (a_s, a_i) such that beta^(mu) = exp(i (a_s ws + a_i wi) tau),
// derived by hand from the delay tables.
constexpr std::array<std::array<double, 2>, 4> grid_exponents{{{1.5, 1.5}, {1.5, 2.5}, {1.0, 2.0}, {2.0, 2.0}}};
constexpr std::array<std::array<double, 2>, 4> hde_exponents{{{1.0, 2.0}, {2.0, 1.0}, {1.5, 1.5}, {1.5, 1.5}}};

complex exponent_phasor(const std::array<double, 2>& a, double ws, double wi, double tau) {
    const long double ph = (static_cast<long double>(a[0]) * ws + static_cast<long double>(a[1]) * wi) * tau;
    return unit_phasor(ph);
}

} // namespace

TEST(Pump, PeakAndHalfPower) {
    const PumpConfig p{775e-9, 2e-9};
    EXPECT_EQ(pump_envelope(p, p.center_omega()), complex(1.0, 0.0));
    const double half_width = 0.5 * 2.0 * std::sqrt(2.0 * std::log(2.0)) * p.sigma_omega();
    EXPECT_NEAR(std::norm(pump_envelope(p, p.center_omega() + half_width)), 0.5, 1e-12);
    EXPECT_NEAR(std::norm(pump_envelope(p, p.center_omega() - half_width)), 0.5, 1e-12);
    EXPECT_NEAR(p.fwhm() * 1e9, 4.71, 5e-3);
    EXPECT_THROW(pump_envelope(p, 0.0), InvalidArgument);
    EXPECT_THROW((PumpConfig{775e-9, 0.0}.validate()), InvalidArgument);
}

TEST(Pump, SigmaOmegaLinearization) {
    const PumpConfig p{775e-9, 2e-9};
    const double c = 299792458.0;
    EXPECT_NEAR(p.sigma_omega(), 2.0 * M_PI * c * 2e-9 / (775e-9 * 775e-9), 1e-3);
}

TEST(Jsa0, UnitAmplitudeAtPerfectMatchAndPumpCenter) {
    CrystalConfig c;
    c.medium.material = "flat";
    c.medium.min_wavelength = 100e-9;
    c.medium.max_wavelength = 10e-6;
    c.medium.axes["x"].constant = 4.0;
    c.axes = {"x", "x", "x"};
    c.pm_type = PhaseMatching::TypeII_QPM;
    c.poling_period = 1e9; // negligible grating
    const PumpConfig p{775e-9, 2e-9};
    const double half = p.center_omega() / 2.0;
    const FrequencyGrid g(half, half * 1.01, 2);
    const auto a = jsa0(p, c, g, g);
    EXPECT_NEAR(std::abs(a(0, 0)), 1.0, 1e-12);
}

TEST(Jsa0, IntensityConcentratedOnPumpBand) {
    const auto setup = preset(PresetKind::Grid, 128);
    const auto a = setup.unmodulated();
    const RealMatrix jsi = intensity(a);
    const double w0 = setup.pump.center_omega(), s = setup.pump.sigma_omega();
    double inside = 0.0;
    for (std::size_t r = 0; r < a.grid_s().size(); ++r)
        for (std::size_t c = 0; c < a.grid_i().size(); ++c)
            if (std::abs(a.grid_s().omega(r) + a.grid_i().omega(c) - w0) < 3.0 * s) inside += jsi(r, c);
    EXPECT_GT(inside / jsi.sum(), 0.99);
}

TEST(Jsa0, NarrowerPumpNarrowsTheBand) {
    auto setup = preset(PresetKind::Hde, 96);
    double prev = std::numeric_limits<double>::infinity();
    for (double sigma : {2e-9, 1e-9, 0.5e-9}) {
        setup.pump.sigma = sigma;
        const RealMatrix jsi = intensity(setup.unmodulated());
        double m1 = 0.0, m2 = 0.0, tot = 0.0;
        for (Eigen::Index r = 0; r < jsi.rows(); ++r)
            for (Eigen::Index c = 0; c < jsi.cols(); ++c) {
                const double w = setup.grid_s.omega(r) + setup.grid_i.omega(c);
                tot += jsi(r, c);
                m1 += w * jsi(r, c);
                m2 += w * w * jsi(r, c);
            }
        const double mean = m1 / tot;
        const double spread = std::sqrt(std::max(0.0, m2 / tot - mean * mean));
        EXPECT_LT(spread, prev);
        prev = spread;
    }
}

TEST(Beta, ZeroDelaysGiveOne) {
    const DelaySchedule z{{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
    for (std::size_t mu = 1; mu <= 4; ++mu) EXPECT_EQ(beta_mu(z, mu, 1.2e15, 1.3e15), complex(1.0, 0.0));
    EXPECT_EQ(beta_total(z, LossModel{0.0}, 1.2e15, 1.3e15), complex(4.0, 0.0));
}

TEST(Beta, CrystalIndexIsChecked) {
    const auto sched = grid_schedule(1e-12);
    EXPECT_THROW(beta_mu(sched, 0, 1e15, 1e15), InvalidArgument);
    EXPECT_THROW(beta_mu(sched, 5, 1e15, 1e15), InvalidArgument);
    const DelaySchedule ragged{{0, 0}, {0}, {0, 0}};
    EXPECT_THROW(beta_mu(ragged, 1, 1e15, 1e15), InvalidArgument);
}

TEST(Beta, PresetExamples) {
    const double tau = 2.1e-12, ws = 1.21e15, wi = 1.17e15;
    EXPECT_LT(std::abs(beta_mu(grid_schedule(tau), 1, ws, wi) - exponent_phasor({1.5, 1.5}, ws, wi, tau)), 1e-12);
    EXPECT_LT(std::abs(beta_mu(hde_schedule(tau), 2, ws, wi) - exponent_phasor({2.0, 1.0}, ws, wi, tau)), 1e-12);
}

TEST(Beta, MatchesHandDerivedExponents) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> omega(1.0e15, 1.5e15), tau(0.5e-12, 10e-12);
    for (int k = 0; k < 2000; ++k) {
        const double ws = omega(rng), wi = omega(rng), t = tau(rng);
        for (std::size_t mu = 1; mu <= 4; ++mu) {
            EXPECT_LT(std::abs(beta_mu(grid_schedule(t), mu, ws, wi) - exponent_phasor(grid_exponents[mu - 1], ws, wi, t)),
                      1e-12);
            EXPECT_LT(std::abs(beta_mu(hde_schedule(t), mu, ws, wi) - exponent_phasor(hde_exponents[mu - 1], ws, wi, t)),
                      1e-12);
        }
    }
}

TEST(Beta, UnitModulus) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> omega(1.0e15, 1.5e15), tau(-10e-12, 10e-12);
    for (int k = 0; k < 2000; ++k) {
        DelaySchedule s;
        for (int n = 0; n < 5; ++n) {
            s.tau_p.push_back(tau(rng));
            s.tau_s.push_back(tau(rng));
            s.tau_i.push_back(tau(rng));
        }
        for (std::size_t mu = 1; mu <= 5; ++mu) EXPECT_NEAR(std::abs(beta_mu(s, mu, omega(rng), omega(rng))), 1.0, 1e-15);
    }
}

TEST(Beta, ClosedFormExamples) {
    const double tau = 1e-12;
    const double w = M_PI / tau; // (ws + wi) tau / 4 = pi / 2
    EXPECT_LT(std::abs(beta_grid_closed(tau, w, w)), 1e-15);
    EXPECT_EQ(std::abs(beta_grid_closed(tau, 0.0, 0.0)), 4.0);
    EXPECT_NEAR(std::abs(beta_hde_closed(tau, 1.3e15, 1.3e15)), 4.0, 1e-15);
    EXPECT_LT(std::abs(beta_hde_closed(tau, 1.3e15 + 2.0 * M_PI / tau, 1.3e15)), 1e-12);
}

TEST(Beta, ClosedFormsMatchSums) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> omega(1.0e15, 1.5e15), tau(0.5e-12, 10e-12);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double ws = omega(rng), wi = omega(rng), t = tau(rng);
        worst = std::max(worst, std::abs(beta_total(grid_schedule(t), {}, ws, wi) - beta_grid_closed(t, ws, wi)) / 4.0);
        worst = std::max(worst, std::abs(beta_total(hde_schedule(t), {}, ws, wi) - beta_hde_closed(t, ws, wi)) / 4.0);
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Loss, Weights) {
    const LossModel l{20.0};
    const std::array<double, 4> expected{0.1, 1e-3, 1e-5, 1e-7};
    for (std::size_t mu = 1; mu <= 4; ++mu) EXPECT_NEAR(l.weight(mu), expected[mu - 1], 1e-15 * expected[mu - 1]);
    EXPECT_EQ(LossModel{0.0}.weight(3), 1.0);
    EXPECT_THROW(LossModel{-1.0}.validate(), InvalidArgument);
}

TEST(Loss, WeightsDecreaseWithCrystalIndex) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> db(0.01, 40.0);
    for (int k = 0; k < 1000; ++k) {
        const LossModel l{db(rng)};
        double prev = 1.0;
        for (std::size_t mu = 1; mu <= 6; ++mu) {
            const double w = l.weight(mu);
            EXPECT_GT(w, 0.0);
            EXPECT_LT(w, prev);
            prev = w;
        }
    }
}

TEST(Beta, LastCrystalDelayIsGlobalPhase) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> omega(1.0e15, 1.5e15), d(-5e-12, 5e-12);
    for (int k = 0; k < 500; ++k) {
        const double ws = omega(rng), wi = omega(rng), delta = d(rng);
        const auto base = grid_schedule(3e-12);
        auto shifted = base;
        shifted.tau_s.back() += delta;
        const complex factor = unit_phasor(static_cast<long double>(ws) * delta);
        for (std::size_t mu = 1; mu <= 4; ++mu)
            EXPECT_LT(std::abs(beta_mu(shifted, mu, ws, wi) - factor * beta_mu(base, mu, ws, wi)), 1e-11);
        const LossModel loss{3.0};
        EXPECT_NEAR(std::abs(beta_total(shifted, loss, ws, wi)), std::abs(beta_total(base, loss, ws, wi)), 1e-12);
    }
}

TEST(Assemble, GlobalDelayShiftsLeaveIntensityUnchanged) {
    const auto setup = preset(PresetKind::Hde, 48);
    const RealMatrix ref = intensity(setup.amplitude());
    auto shift = [&](auto&& edit) {
        nlisim::Setup s = setup;
        edit(s.schedule);
        return (intensity(s.amplitude()) - ref).cwiseAbs().maxCoeff() / ref.maxCoeff();
    };
    EXPECT_LT(shift([](DelaySchedule& d) { d.tau_s.back() += 0.37e-12; }), 1e-10);
    EXPECT_LT(shift([](DelaySchedule& d) { d.tau_i.back() += 1.9e-12; }), 1e-10);
    // The pump delay that every crystal sees is the one before the first crystal.
    EXPECT_LT(shift([](DelaySchedule& d) { d.tau_p.front() += 2.3e-12; }), 1e-10);
}

TEST(Assemble, PhaseMapsEqualBeta) {
    const auto sched = hde_schedule(1e-12);
    const auto g = make_grid(1550e-9, 60e-9, 17);
    const auto maps = crystal_phase_maps(sched, g, g);
    ASSERT_EQ(maps.size(), 4u);
    for (std::size_t mu = 1; mu <= 4; ++mu)
        for (std::size_t s = 0; s < g.size(); ++s)
            for (std::size_t i = 0; i < g.size(); ++i)
                EXPECT_LT(std::abs(maps[mu - 1](s, i) - beta_mu(sched, mu, g.omega(s), g.omega(i))), 1e-12);
    const LossModel loss{2.0};
    const auto total = combine_phase_maps(maps, loss);
    for (std::size_t s = 0; s < g.size(); s += 4)
        for (std::size_t i = 0; i < g.size(); i += 4)
            EXPECT_LT(std::abs(total(s, i) - beta_total(sched, loss, g.omega(s), g.omega(i))), 1e-12);
}

TEST(Assemble, ResultIsNormalized) {
    for (auto kind : {PresetKind::Grid, PresetKind::Hde}) {
        const auto a = preset(kind, 64).amplitude();
        EXPECT_TRUE(is_normalized(a));
    }
}

TEST(Assemble, ModulationIsPseudoNormalized) {
    const auto setup = preset(PresetKind::Grid, 64);
    const RealMatrix m = pseudo_normalized_modulation(setup.schedule, setup.loss, setup.grid_s, setup.grid_i);
    EXPECT_DOUBLE_EQ(m.maxCoeff(), 1.0);
    EXPECT_GE(m.minCoeff(), 0.0);
}

TEST(Assemble, HeavyLossRecoversSingleCrystal) {
    auto setup = preset(PresetKind::Grid, 64);
    setup.loss.x_db = 200.0;
    EXPECT_NEAR(intensity_overlap(setup.amplitude(), setup.unmodulated()), 1.0, 1e-12);
}

TEST(Presets, Fields) {
    const auto g = preset(PresetKind::Grid, 32);
    EXPECT_EQ(g.pump.center_wavelength, 775e-9);
    EXPECT_EQ(g.pump.sigma, 2e-9);
    EXPECT_EQ(g.tau, 8.3e-12);
    EXPECT_EQ(g.schedule.tau_s, (std::vector<double>{8.3e-12, 4.15e-12, 0.0, 0.0}));
    EXPECT_EQ(g.schedule.tau_i, (std::vector<double>{0.0, 4.15e-12, 8.3e-12, 0.0}));
    EXPECT_EQ(g.schedule.tau_p, (std::vector<double>{0.0, 8.3e-12, 0.0, 8.3e-12}));
    EXPECT_EQ(g.crystal.pm_type, PhaseMatching::TypeII_QPM);
    EXPECT_EQ(g.crystal.medium.material, "KTP");
    ASSERT_TRUE(g.crystal.poling_period);
    EXPECT_NEAR(*g.crystal.poling_period * 1e6, 34.885, 1e-3);
    const auto h = preset(PresetKind::Hde, 32);
    EXPECT_EQ(h.tau, 1e-12);
    EXPECT_EQ(h.schedule.tau_i, (std::vector<double>{2e-12, 0.0, 0.0, 0.0}));
    EXPECT_EQ(h.schedule.tau_p, (std::vector<double>{0.0, 1e-12, 0.5e-12, 0.0}));
    EXPECT_EQ(h.crystal.pm_type, PhaseMatching::TypeII_AngleTuned);
    EXPECT_NEAR(*h.crystal.theta, M_PI / 6.0, 1e-15);
    EXPECT_EQ(h.grid_s.size(), 32u);
}
