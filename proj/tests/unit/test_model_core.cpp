#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "oracle.hpp"

using namespace rsma_isac;

TEST(Steering, BroadsideIsAllOnes) {
    for (int n : {1, 2, 4, 7}) {
        const CVector a = steering_vector({n, 0.5}, 0.0);
        for (int g = 0; g < n; ++g) EXPECT_EQ(a(g), Complex(1.0, 0.0));
    }
}

TEST(Steering, EndfireHalfWavelength) {
    const CVector a = steering_vector({2, 0.5}, 90.0);
    EXPECT_NEAR(std::abs(a(0) - Complex(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a(1) - Complex(-1, 0)), 0.0, 1e-15);
}

TEST(Steering, FourElementsAtThirtyDegrees) {
    const CVector a = steering_vector({4, 0.5}, 30.0);
    const double q = std::numbers::pi / 2;
    for (int g = 0; g < 4; ++g) EXPECT_NEAR(std::abs(a(g) - std::polar(1.0, q * g)), 0.0, 1e-12);
}

TEST(Steering, MatchesScalarOracle) {
    for (double deg : {-71.0, -12.5, 3.0, 44.0, 88.0}) {
        const CVector a = steering_vector({5, 0.37}, deg);
        const auto ref = oracle::steering(5, 0.37, deg);
        for (int g = 0; g < 5; ++g) EXPECT_NEAR(std::abs(a(g) - ref[g]), 0.0, 1e-13);
    }
}

TEST(Geometry, RejectsInvalidArrays) {
    EXPECT_THROW(steering_vector({0, 0.5}, 0.0), ConfigError);
    EXPECT_THROW(steering_vector({2, 0.0}, 0.0), ConfigError);
}

TEST(Rng, SameSeedAndStreamReproduce) {
    Rng a(11, 3), b(11, 3), c(11, 4);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs = differs || x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, SplitIsDeterministic) {
    const Rng base(5, 9);
    Rng s1 = base.split(2), s2 = base.split(2), s3 = base.split(3);
    EXPECT_EQ(s1.next_u64(), s2.next_u64());
    EXPECT_NE(base.split(2).next_u64(), s3.next_u64());
}

TEST(Rng, ComplexNormalVariance) {
    Rng r(1, 1);
    double acc = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += std::norm(r.complex_normal(2.5));
    EXPECT_NEAR(acc / n, 2.5, 0.03);
}

TEST(Scenario, DefaultsValidate) { EXPECT_NO_THROW(ScenarioConfig{}.validate()); }

TEST(Scenario, InvalidFieldsRejected) {
    auto bad = [](auto mutate) {
        ScenarioConfig c;
        mutate(c);
        EXPECT_THROW(c.validate(), ConfigError);
    };
    bad([](ScenarioConfig& c) { c.n_subcarriers = 1; });
    bad([](ScenarioConfig& c) { c.total_power = 0; });
    bad([](ScenarioConfig& c) { c.noise_power_comms = 0; });
    bad([](ScenarioConfig& c) { c.noise_power_radar = -1; });
    bad([](ScenarioConfig& c) { c.target_delay_bins = c.n_subcarriers; });
    bad([](ScenarioConfig& c) { c.ue_gains = {1.0, 2.5}; });
    bad([](ScenarioConfig& c) { c.csit_error_var = -1e-3; });
    bad([](ScenarioConfig& c) { c.shannon_gap_db = -1; });
    bad([](ScenarioConfig& c) { c.ue_angles_deg = {-100, 0}; });
}

TEST(Scenario, PresetGeometry) {
    const auto s1 = scenario_preset("S1"), s2 = scenario_preset("S2"), s3 = scenario_preset("S3");
    auto sep = [](const ScenarioConfig& c) { return std::abs(c.ue_angles_deg[0] - c.ue_angles_deg[1]); };
    auto closest = [](const ScenarioConfig& c) {
        return std::min(std::abs(c.ue_angles_deg[0]), std::abs(c.ue_angles_deg[1]));
    };
    EXPECT_GE(sep(s1), 60.0);
    EXPECT_GE(closest(s1), 30.0);
    EXPECT_LE(sep(s2), 10.0);
    EXPECT_GE(closest(s2), 30.0);
    EXPECT_LE(sep(s3), 10.0);
    EXPECT_LE(closest(s3), 10.0);
    for (const auto& c : {s1, s2, s3}) {
        EXPECT_EQ(c.n_subcarriers, 512);
        EXPECT_EQ(c.target_angle_deg, 0.0);
    }
    EXPECT_THROW(scenario_preset("S4"), ConfigError);
}

TEST(Scenario, PresetCorrelationOrdering) {
    // Inter-UE correlation must be low in S1 and high in S2/S3.
    const ArrayGeometry geom;
    auto corr = [&](const ScenarioConfig& c) {
        const auto a = oracle::steering(2, 0.5, c.ue_angles_deg[0]);
        const auto b = oracle::steering(2, 0.5, c.ue_angles_deg[1]);
        return std::abs(oracle::inner(a, b)) / 2.0;
    };
    EXPECT_LT(corr(scenario_preset("S1")), 0.1);
    EXPECT_GT(corr(scenario_preset("S2")), 0.9);
    EXPECT_GT(corr(scenario_preset("S3")), 0.9);
}

TEST(Scenario, JsonRoundTripAndStrictness) {
    ScenarioConfig c = scenario_preset("S2");
    c.seed = 123456789012345ULL;
    const nlohmann::json j = c;
    EXPECT_EQ(j.get<ScenarioConfig>(), c);

    nlohmann::json extra = j;
    extra["bogus"] = 1;
    EXPECT_THROW(extra.get<ScenarioConfig>(), ConfigError);

    nlohmann::json missing = j;
    missing.erase("seed");
    EXPECT_THROW(missing.get<ScenarioConfig>(), ConfigError);

    nlohmann::json wrong = j;
    wrong["n_subcarriers"] = "many";
    EXPECT_THROW(wrong.get<ScenarioConfig>(), ConfigError);
}

TEST(Scenario, ResizedKeepsPerSubcarrierSnr) {
    const ScenarioConfig c;
    const ScenarioConfig r = c.resized(64);
    EXPECT_EQ(r.n_subcarriers, 64);
    const double snr_full = c.total_power / c.n_subcarriers / c.noise_power_comms;
    const double snr_small = r.total_power / r.n_subcarriers / r.noise_power_comms;
    EXPECT_NEAR(snr_small / snr_full, 1.0, 1e-12);
}

TEST(Channels, ZeroCsitErrorMeansExactEstimate) {
    const ScenarioConfig cfg = scenario_preset("S1").resized(32);
    const ChannelSet ch = generate_channels(cfg, {}, Rng(1, streams::channels));
    for (int i = 0; i < 2; ++i) EXPECT_TRUE((ch.true_channels[i].array() == ch.est_channels[i].array()).all());
}

TEST(Channels, UnitVectorsHaveUnitNorm) {
    ScenarioConfig cfg = scenario_preset("S3").resized(64);
    cfg.csit_error_var = 0.05;
    const ChannelSet ch = generate_channels(cfg, {}, Rng(4, streams::channels));
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 64; ++k) EXPECT_NEAR(ch.unit_est[i].col(k).norm(), 1.0, 1e-12);
    EXPECT_NEAR(ch.broadside_unit.norm(), 1.0, 1e-12);
}

TEST(Channels, TrueChannelModel) {
    ScenarioConfig cfg = scenario_preset("S2").resized(16);
    cfg.ue_gains = {1.5, 0.9};
    const ChannelSet ch = generate_channels(cfg, {}, Rng(2, streams::channels));
    for (int i = 0; i < 2; ++i) {
        const auto a = oracle::steering(2, 0.5, cfg.ue_angles_deg[i]);
        for (int k = 0; k < 16; ++k) {
            // h_i[k] = g_i a(theta_i) e^{j phi}: the ratio to a(theta_i) is a common scalar of modulus g_i.
            const Complex r0 = ch.true_channels[i](0, k) / a[0];
            const Complex r1 = ch.true_channels[i](1, k) / a[1];
            EXPECT_NEAR(std::abs(r0 - r1), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(r0), cfg.ue_gains[i], 1e-12);
        }
    }
}

TEST(Channels, WiderSeparationLowersCorrelation) {
    ScenarioConfig wide = scenario_preset("S1").resized(8), narrow = wide;
    wide.ue_angles_deg = {-45, 45};
    narrow.ue_angles_deg = {-5, 5};
    auto corr = [](const ScenarioConfig& c) {
        const ChannelSet ch = generate_channels(c, {}, Rng(3, streams::channels));
        return std::abs(ch.unit_est[0].col(0).dot(ch.unit_est[1].col(0)));
    };
    EXPECT_LT(corr(wide), corr(narrow));
}

TEST(Channels, SameInputsSameOutputs) {
    ScenarioConfig cfg = scenario_preset("S1").resized(32);
    cfg.csit_error_var = 0.01;
    const ChannelSet a = generate_channels(cfg, {}, Rng(9, streams::channels));
    const ChannelSet b = generate_channels(cfg, {}, Rng(9, streams::channels));
    for (int i = 0; i < 2; ++i) {
        EXPECT_TRUE((a.true_channels[i].array() == b.true_channels[i].array()).all());
        EXPECT_TRUE((a.est_channels[i].array() == b.est_channels[i].array()).all());
    }
}

TEST(Channels, SmallCsitErrorIsSmall) {
    ScenarioConfig cfg = scenario_preset("S1").resized(32);
    cfg.csit_error_var = 1e-6;
    int ok = 0;
    for (int t = 0; t < 100; ++t) {
        const ChannelSet ch = generate_channels(cfg, {}, Rng(t, streams::channels));
        const double rel = (ch.est_channels[0] - ch.true_channels[0]).norm() / ch.true_channels[0].norm();
        ok += rel < 1e-2 ? 1 : 0;
    }
    EXPECT_GE(ok, 99);
}

TEST(Channels, ZeroEstimateIsAnError) {
    std::array<CGrid, 2> h{CGrid::Ones(2, 4), CGrid::Ones(2, 4)};
    std::array<CGrid, 2> est{CGrid::Ones(2, 4), CGrid::Zero(2, 4)};
    EXPECT_THROW(make_channel_set(h, est, steering_vector({}, 0.0)), NumericError);
}
