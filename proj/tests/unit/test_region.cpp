#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracle.hpp"

using namespace rsma_isac;

namespace {

struct Fixture {
    ScenarioConfig cfg;
    ChannelSet ch;
};

Fixture scene(const char* preset, int nc = 16) {
    Fixture f{scenario_preset(preset).resized(nc), {}};
    f.ch = generate_channels(f.cfg, {}, Rng(f.cfg.seed, streams::channels));
    return f;
}

SweepSpec coarse(double step = 0.25, std::vector<Family> fams = {Family::MRT, Family::ZF}) {
    SweepSpec s;
    s.grid_step = step;
    s.families = std::move(fams);
    s.threads = 1;
    return s;
}

bool weakly_dominated_by_some(const IsacPoint& p, const std::vector<IsacPoint>& set) {
    return std::any_of(set.begin(), set.end(),
                       [&](const IsacPoint& q) { return q.t_sum_bps >= p.t_sum_bps && q.g0 >= p.g0; });
}

}  // namespace

TEST(Pareto, SmallExample) {
    const std::vector<double> x{1, 2, 3, 1}, y{3, 2, 1, 1};
    EXPECT_EQ(pareto_frontier(x, y), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Pareto, SinglePointAndEmpty) {
    EXPECT_EQ(pareto_frontier(std::vector<double>{4}, std::vector<double>{-1}), (std::vector<std::size_t>{0}));
    EXPECT_TRUE(pareto_frontier(std::vector<double>{}, std::vector<double>{}).empty());
}

TEST(Pareto, MatchesBruteForceOnRandomSets) {
    Rng rng(100, 0);
    for (int set = 0; set < 1000; ++set) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 60);
        const bool ties = set % 2 == 0;
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = ties ? std::floor(rng.uniform() * 6) : rng.uniform();
            y[i] = ties ? std::floor(rng.uniform() * 6) : rng.normal();
        }
        const auto got = pareto_frontier(x, y);
        std::set<std::pair<double, double>> got_set, ref_set;
        for (std::size_t i : got) got_set.insert({x[i], y[i]});
        for (std::size_t i : oracle::nondominated(x, y)) ref_set.insert({x[i], y[i]});
        EXPECT_EQ(got_set, ref_set);
        EXPECT_EQ(got.size(), got_set.size());  // one representative per coordinate
        for (std::size_t i = 1; i < got.size(); ++i) EXPECT_LT(x[got[i - 1]], x[got[i]]);
        // Representatives are the lowest input index among duplicates.
        for (std::size_t i : got)
            for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(x[j] == x[i] && y[j] == y[i]);
    }
}

TEST(Pareto, Idempotent) {
    const Fixture f = scene("S2");
    const RegionResult r = sweep(coarse(), f.ch, f.cfg);
    const auto once = pareto_frontier(r.points, SensingMetric::G0);
    const auto twice = pareto_frontier(once, SensingMetric::G0);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        EXPECT_EQ(once[i].t_sum_bps, twice[i].t_sum_bps);
        EXPECT_EQ(once[i].g0, twice[i].g0);
        EXPECT_FALSE(params_less(once[i].params, twice[i].params) || params_less(twice[i].params, once[i].params));
    }
}

TEST(Grid, Cardinality) {
    EXPECT_LE(sweep_grid(coarse(0.5, {Family::MRT})).size(), 81u);
    EXPECT_EQ(sweep_grid(coarse(0.1, {Family::MRT})).size(), 11111u);
    EXPECT_EQ(sweep_grid(coarse(0.1)).size(), 22222u);
}

TEST(Grid, CollapsedAxes) {
    for (const auto& p : sweep_grid(coarse(0.25))) {
        if (p.t_comms == 0.0) { EXPECT_TRUE(p.t_p == 1.0 && p.alpha_c == 0.0 && p.alpha_p == 0.0); }
        if (p.t_p == 1.0) { EXPECT_EQ(p.alpha_c, 0.0); }
        if (p.t_p == 0.0) { EXPECT_EQ(p.alpha_p, 0.0); }
    }
    EXPECT_THROW(sweep_grid(coarse(0.3)), ConfigError);
    EXPECT_THROW(sweep_grid(coarse(0.75)), ConfigError);
}

TEST(Sweep, PointInvariants) {
    const Fixture f = scene("S3");
    const RegionResult r = sweep(coarse(), f.ch, f.cfg);
    EXPECT_TRUE(r.skipped.empty());
    EXPECT_EQ(r.points.size(), sweep_grid(coarse()).size());
    for (const auto& p : r.points) {
        EXPECT_NEAR(build_precoders(p.params, f.ch, f.cfg).total_power(), f.cfg.total_power, 1e-9);
        if (p.collapsed) { EXPECT_EQ(p.t_sum_bps, 0.0); }
        EXPECT_EQ(p.special_case, classify_special_case(p.params));
        EXPECT_LE(p.g0, f.cfg.total_power * 2 * (1 + 1e-12));
    }
}

TEST(Sweep, BoundaryIsNonDominatedSubset) {
    const Fixture f = scene("S1");
    const RegionResult r = sweep(coarse(), f.ch, f.cfg);
    for (const auto& b : r.boundary) {
        EXPECT_TRUE(std::any_of(r.points.begin(), r.points.end(), [&](const IsacPoint& p) {
            return !params_less(p.params, b.params) && !params_less(b.params, p.params);
        }));
        for (const auto& p : r.points)
            EXPECT_FALSE(p.t_sum_bps >= b.t_sum_bps && p.g0 >= b.g0 && (p.t_sum_bps > b.t_sum_bps || p.g0 > b.g0));
    }
    for (const auto& [tag, front] : r.per_case_boundaries)
        for (const auto& b : front) EXPECT_EQ(b.special_case, tag);
}

TEST(Sweep, SdmaFrontierContainedInFullRegion) {
    for (const char* preset : {"S1", "S2", "S3"}) {
        const Fixture f = scene(preset);
        const RegionResult r = sweep(coarse(), f.ch, f.cfg);
        for (const auto& p : frontier_of(r, CaseFilter::sdma())) EXPECT_TRUE(weakly_dominated_by_some(p, r.boundary));
    }
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
    const Fixture f = scene("S2");
    SweepSpec one = coarse(), many = coarse();
    many.threads = 4;
    const RegionResult a = sweep(one, f.ch, f.cfg), b = sweep(many, f.ch, f.cfg);
    ASSERT_EQ(a.points.size(), b.points.size());
    std::ostringstream sa, sb;
    write_points_csv(sa, a.points);
    write_points_csv(sb, b.points);
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Sweep, RefinementWeaklyDominates) {
    const Fixture f = scene("S3");
    const RegionResult c = sweep(coarse(0.5), f.ch, f.cfg);
    const RegionResult r = sweep(coarse(0.25), f.ch, f.cfg);
    for (const auto& p : c.boundary) EXPECT_TRUE(weakly_dominated_by_some(p, r.boundary));
}

TEST(Sweep, PointMatchesStandaloneEvaluation) {
    const Fixture f = scene("S1");
    const RegionResult r = sweep(coarse(), f.ch, f.cfg);
    for (const auto& p : r.points) {
        if (p.params.t_p != 1.0 || p.params.family != Family::ZF) continue;
        const IsacPoint q = evaluate_point(p.params, f.ch, f.cfg);
        EXPECT_EQ(p.t_sum_bps, q.t_sum_bps);
        EXPECT_EQ(p.g0, q.g0);
    }
}

TEST(Sweep, RankDeficientZfPointsAreSkipped) {
    ScenarioConfig cfg = scenario_preset("S1").resized(8);
    cfg.ue_angles_deg = {20, 20};
    const ChannelSet ch = generate_channels(cfg, {}, Rng(1, streams::channels));
    const RegionResult r = sweep(coarse(0.5, {Family::ZF}), ch, cfg);
    EXPECT_FALSE(r.skipped.empty());
    // Only points carrying private power need a ZF direction.
    for (const auto& s : r.skipped) EXPECT_GT(s.params.t_p, 0.0);
    for (const auto& p : r.points) EXPECT_TRUE(p.params.t_p == 0.0 || p.params.t_comms == 0.0);
    EXPECT_EQ(r.points.size() + r.skipped.size(), sweep_grid(coarse(0.5, {Family::ZF})).size());
}

TEST(Sweep, SnrMetricNeedsTrials) {
    SweepSpec s = coarse();
    s.metric = SensingMetric::SNR_RAD;
    EXPECT_THROW(s.validate(), ConfigError);
    s.monte_carlo_trials = 2;
    s.grid_step = 0.5;
    s.families = {Family::MRT};
    const Fixture f = scene("S1", 32);
    const RegionResult r = sweep(s, f.ch, f.cfg);
    for (const auto& p : r.points) ASSERT_TRUE(p.snr_rad_db.has_value());
    EXPECT_FALSE(r.boundary.empty());
}

TEST(BoundaryParams, SdmaLowestThroughputRowHasFullBeamGain) {
    // With alpha_p = 0 every stream is steered along u0, so a point with some
    // throughput reaches the same G0 as sensing-only and the latter is dominated.
    const Fixture f = scene("S2");
    const RegionResult r = sweep(coarse(), f.ch, f.cfg);
    const auto rows = boundary_params(r, CaseFilter::sdma(Family::MRT));
    ASSERT_FALSE(rows.empty());
    const double full = f.cfg.total_power * ArrayGeometry{}.n_tx;
    EXPECT_EQ(rows.front().g0, full);
    EXPECT_GT(rows.front().t_sum_bps, 0.0);
    EXPECT_EQ(rows.front().params.alpha_p, 0.0);
    const IsacPoint sensing = evaluate_point({0, 1, 0, 0, Family::MRT}, f.ch, f.cfg);
    EXPECT_EQ(sensing.g0, full);
    EXPECT_EQ(sensing.t_sum_bps, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].index, static_cast<int>(i));
}

TEST(BoundaryParams, RsmaNoSenseRowsHaveFullCommsShare) {
    const Fixture f = scene("S3");
    const RegionResult r = sweep(coarse(), f.ch, f.cfg);
    for (const auto& row : boundary_params(r, CaseFilter::rsma_no_sense())) EXPECT_EQ(row.params.t_comms, 1.0);
}

TEST(BoundaryParams, OnePointRegion) {
    const Fixture f = scene("S1");
    RegionResult r;
    r.points.push_back(evaluate_point({0.3, 0.7, 0.2, 0.9, Family::MRT}, f.ch, f.cfg));
    const auto rows = boundary_params(r, CaseFilter::all());
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].params.t_p, 0.7);
    EXPECT_THROW(boundary_params(r, CaseFilter::sdma()), ConfigError);
}

TEST(Export, BoundaryParamsRoundTrip) {
    const Fixture f = scene("S2");
    const RegionResult r = sweep(coarse(), f.ch, f.cfg);
    const auto rows = boundary_params(r, CaseFilter::all());
    std::stringstream ss;
    write_boundary_params_csv(ss, rows);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), boundary_params_header());
    const auto back = read_boundary_params_csv(ss);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].params.t_comms, rows[i].params.t_comms);
        EXPECT_EQ(back[i].params.alpha_p, rows[i].params.alpha_p);
        EXPECT_EQ(back[i].params.family, rows[i].params.family);
        EXPECT_EQ(back[i].mcs_c, rows[i].mcs_c);
        EXPECT_EQ(back[i].mcs_2, rows[i].mcs_2);
    }
}

TEST(Export, BoundaryParamsWithoutFamilyColumn) {
    std::istringstream is("index,t_comms,t_p,alpha_c,alpha_p,mcs_c,mcs_1,mcs_2\n0,0,1,0,0,-,-,-\n1,1,0.5,0.3,0.6,2,5,5\n");
    const auto rows = read_boundary_params_csv(is);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].params.family, Family::MRT);
    EXPECT_EQ(rows[1].mcs_c, 2);
    EXPECT_FALSE(rows[0].mcs_1.has_value());
}

TEST(Export, PointRowsCarryNonFiniteValues) {
    IsacPoint p;
    p.params = {0, 1, 0, 0, Family::ZF};
    p.crb_bins2 = std::numeric_limits<double>::infinity();
    p.special_case = SpecialCase::General;
    p.t_sum_bps = 975e6;
    p.g0 = 2;
    std::ostringstream os;
    write_points_csv(os, {p});
    EXPECT_EQ(os.str(), std::string(point_csv_header()) + "\n0,1,0,0,ZF,General,975,2,,inf,0\n");
}
