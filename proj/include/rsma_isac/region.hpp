#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "rsma_isac/comms.hpp"
#include "rsma_isac/precoder.hpp"
#include "rsma_isac/radar.hpp"

namespace rsma_isac {

enum class SensingMetric { G0, SNR_RAD };

inline std::string to_string(SensingMetric m) { return m == SensingMetric::G0 ? "g0" : "snr"; }

inline SensingMetric parse_metric(std::string_view s) {
    if (s == "g0" || s == "G0") return SensingMetric::G0;
    if (s == "snr" || s == "SNR_RAD") return SensingMetric::SNR_RAD;
    throw ConfigError("unknown sensing metric '" + std::string(s) + "'");
}

struct SweepSpec {
    double grid_step = 0.1;
    std::vector<Family> families{Family::MRT, Family::ZF};
    SensingMetric metric = SensingMetric::G0;
    /// Tags whose frontiers go into per_case_boundaries; empty means every tag seen.
    std::vector<SpecialCase> include_cases;
    int monte_carlo_trials = 0;
    /// 0 = one worker per hardware thread.
    unsigned threads = 0;

    int divisions() const { return static_cast<int>(std::lround(1.0 / grid_step)); }

    void validate() const {
        if (!(grid_step > 0.0 && grid_step <= 0.5)) throw ConfigError("grid_step must lie in (0, 0.5]");
        const double n = 1.0 / grid_step;
        if (std::abs(n - std::round(n)) > 1e-9 * n) throw ConfigError("1 / grid_step must be an integer");
        if (families.empty()) throw ConfigError("at least one precoder family is required");
        if (monte_carlo_trials < 0) throw ConfigError("monte_carlo_trials must be >= 0");
        if (metric == SensingMetric::SNR_RAD && monte_carlo_trials == 0)
            throw ConfigError("the SNR metric needs monte_carlo_trials > 0");
    }
};

struct IsacPoint {
    ParameterPoint params;
    double t_sum_bps = 0.0;
    double g0 = 0.0;
    std::optional<double> snr_rad_db;
    double crb_bins2 = 0.0;
    SpecialCase special_case = SpecialCase::General;
    bool collapsed = false;
    ThroughputReport report;

    /// Second frontier coordinate under the given metric.
    double sensing(SensingMetric m) const {
        if (m == SensingMetric::SNR_RAD)
            return snr_rad_db.value_or(-std::numeric_limits<double>::infinity());
        return g0;
    }
};

struct SkippedPoint {
    ParameterPoint params;
    std::string reason;
};

struct RegionResult {
    SensingMetric metric = SensingMetric::G0;
    std::vector<IsacPoint> points;
    std::vector<SkippedPoint> skipped;
    std::vector<IsacPoint> boundary;
    std::map<SpecialCase, std::vector<IsacPoint>> per_case_boundaries;
};

/// Lexicographic parameter order used to pick representatives among ties.
inline bool params_less(const ParameterPoint& a, const ParameterPoint& b) {
    return std::tuple(a.t_comms, a.t_p, a.alpha_c, a.alpha_p, static_cast<int>(a.family)) <
           std::tuple(b.t_comms, b.t_p, b.alpha_c, b.alpha_p, static_cast<int>(b.family));
}

/**
 * @brief Indices of the non-dominated points, sorted by x ascending.
 *
 * A point is dominated when another has x and y both >= with at least one
 * strict. Among exact duplicates the lowest input index is kept.
 */
inline std::vector<std::size_t> pareto_frontier(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ConfigError("pareto_frontier: coordinate lengths differ");
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (xs[a] != xs[b]) return xs[a] > xs[b];
        if (ys[a] != ys[b]) return ys[a] > ys[b];
        return a < b;
    });
    std::vector<std::size_t> out;
    double best_y = -std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
        if (out.empty() || ys[i] > best_y) {
            out.push_back(i);
            best_y = ys[i];
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

/// Frontier of a point set under `metric`; ties resolve to the lexicographically lowest parameters.
inline std::vector<IsacPoint> pareto_frontier(std::vector<IsacPoint> points, SensingMetric metric) {
    std::stable_sort(points.begin(), points.end(),
                     [](const IsacPoint& a, const IsacPoint& b) { return params_less(a.params, b.params); });
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : points) {
        xs.push_back(p.t_sum_bps);
        ys.push_back(p.sensing(metric));
    }
    std::vector<IsacPoint> out;
    for (std::size_t i : pareto_frontier(xs, ys)) out.push_back(points[i]);
    return out;
}

/// The sweep grid with degenerate axes collapsed: t_comms = 0 is the single
/// point (0, 1, 0, 0); t_p = 1 pins alpha_c = 0; t_p = 0 pins alpha_p = 0.
inline std::vector<ParameterPoint> sweep_grid(const SweepSpec& spec) {
    spec.validate();
    const int n = spec.divisions();
    auto v = [n](int i) { return static_cast<double>(i) / n; };
    std::vector<ParameterPoint> grid;
    for (Family fam : spec.families) {
        grid.push_back({0.0, 1.0, 0.0, 0.0, fam});
        for (int ic = 1; ic <= n; ++ic)
            for (int ip = 0; ip <= n; ++ip) {
                const int ac_hi = ip == n ? 0 : n;
                const int ap_hi = ip == 0 ? 0 : n;
                for (int iac = 0; iac <= ac_hi; ++iac)
                    for (int iap = 0; iap <= ap_hi; ++iap) grid.push_back({v(ic), v(ip), v(iac), v(iap), fam});
            }
    }
    return grid;
}

/// Target steering vector a_0 (not normalised).
inline CVector target_steering(const ChannelSet& ch) {
    return ch.broadside_unit * std::sqrt(static_cast<double>(ch.n_tx()));
}

/**
 * @brief Evaluates one parameter point.
 *
 * G_0 and the CRB use the symbol-averaged broadside power, so they depend on
 * the precoders alone. G_0 is snapped to P_T N_T when within 1e-9 of it so
 * that every all-broadside point lands on the same coordinate.
 */
inline IsacPoint evaluate_point(const ParameterPoint& pp, const ChannelSet& ch, const ScenarioConfig& cfg,
                                SensingMetric metric = SensingMetric::G0, int trials = 0,
                                const std::optional<Rng>& rng = std::nullopt) {
    const PrecoderSet ps = build_precoders(pp, ch, cfg);
    IsacPoint pt;
    pt.params = pp;
    pt.special_case = classify_special_case(pp);
    pt.report = throughput(ch, ps, cfg);
    pt.t_sum_bps = pt.report.t_sum;
    pt.collapsed = pt.report.collapsed;

    const CVector a0 = target_steering(ch);
    const Eigen::ArrayXd profile = expected_broadside_profile(ps, a0);
    pt.g0 = profile.sum();
    const double full = cfg.total_power * ch.n_tx();
    if (std::abs(pt.g0 - full) <= 1e-9 * full) pt.g0 = full;
    try {
        pt.crb_bins2 = crb(profile, cfg.target_attenuation, cfg.noise_power_radar);
    } catch (const ZeroInformationError&) {
        pt.crb_bins2 = std::numeric_limits<double>::infinity();
    }

    if (metric == SensingMetric::SNR_RAD && trials > 0) {
        RadarTrialConfig rc;
        rc.n0 = cfg.target_delay_bins;
        rc.beta = cfg.target_attenuation;
        rc.sigma_r2 = cfg.noise_power_radar;
        rc.trials = trials;
        const Rng base = rng.value_or(Rng(cfg.seed, streams::sweep_points));
        if (pt.g0 > 0.0) {
            const RadarTrialStats st = run_radar_trials(ps, a0, rc, base);
            pt.snr_rad_db = 10.0 * std::log10(st.mean_snr);
        } else {
            pt.snr_rad_db = -std::numeric_limits<double>::infinity();
        }
    }
    return pt;
}

namespace detail {
inline bool case_selected(const SweepSpec& spec, SpecialCase c) {
    return spec.include_cases.empty() ||
           std::find(spec.include_cases.begin(), spec.include_cases.end(), c) != spec.include_cases.end();
}
}  // namespace detail

/**
 * @brief Evaluates the full grid and extracts the frontiers.
 *
 * Points are evaluated concurrently; each point draws from its own stream
 * (split by grid index), and results are stored by grid index, so the result
 * is independent of thread count and scheduling. Points whose precoders are
 * undefined (ZF rank loss, degenerate common direction) are listed in
 * `skipped` instead of failing the sweep.
 */
inline RegionResult sweep(const SweepSpec& spec, const ChannelSet& ch, const ScenarioConfig& cfg) {
    spec.validate();
    cfg.validate();
    const std::vector<ParameterPoint> grid = sweep_grid(spec);
    const Rng base(cfg.seed, streams::sweep_points);

    std::vector<std::optional<IsacPoint>> slots(grid.size());
    std::vector<std::string> errors(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            try {
                slots[i] = evaluate_point(grid[i], ch, cfg, spec.metric, spec.monte_carlo_trials, base.split(i));
            } catch (const NumericError& e) {
                errors[i] = e.what();
            }
        }
    };
    unsigned n_threads = spec.threads != 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, grid.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    RegionResult r;
    r.metric = spec.metric;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (slots[i]) {
            r.points.push_back(std::move(*slots[i]));
        } else {
            r.skipped.push_back({grid[i], errors[i]});
        }
    }
    if (r.points.empty()) return r;

    r.boundary = pareto_frontier(r.points, spec.metric);
    std::map<SpecialCase, std::vector<IsacPoint>> by_case;
    for (const auto& p : r.points)
        if (detail::case_selected(spec, p.special_case)) by_case[p.special_case].push_back(p);
    for (auto& [tag, pts] : by_case) r.per_case_boundaries[tag] = pareto_frontier(std::move(pts), spec.metric);
    return r;
}

/// Subset of a region whose frontier is requested.
struct CaseFilter {
    enum class Kind { All, SDMA, RSMA_NoSense, Tag };
    Kind kind = Kind::All;
    SpecialCase tag = SpecialCase::General;
    std::optional<Family> family;

    static CaseFilter all(std::optional<Family> f = std::nullopt) { return {Kind::All, SpecialCase::General, f}; }
    /// t_p = 1: no common stream.
    static CaseFilter sdma(std::optional<Family> f = std::nullopt) { return {Kind::SDMA, SpecialCase::General, f}; }
    /// t_comms = 1: no dedicated sensing stream.
    static CaseFilter rsma_no_sense(std::optional<Family> f = std::nullopt) {
        return {Kind::RSMA_NoSense, SpecialCase::General, f};
    }
    static CaseFilter special(SpecialCase c, std::optional<Family> f = std::nullopt) { return {Kind::Tag, c, f}; }

    bool matches(const IsacPoint& p) const {
        if (family && p.params.family != *family) return false;
        switch (kind) {
            case Kind::All: return true;
            case Kind::SDMA: return p.params.t_p == 1.0;
            case Kind::RSMA_NoSense: return p.params.t_comms == 1.0;
            case Kind::Tag: return p.special_case == tag;
        }
        return false;
    }
};

inline std::vector<IsacPoint> filter_points(const RegionResult& r, const CaseFilter& f) {
    std::vector<IsacPoint> out;
    for (const auto& p : r.points)
        if (f.matches(p)) out.push_back(p);
    return out;
}

inline std::vector<IsacPoint> frontier_of(const RegionResult& r, const CaseFilter& f) {
    return pareto_frontier(filter_points(r, f), r.metric);
}

/// One row of the boundary parameter table. MCS entries are empty for streams
/// that carry no power or decode at no level.
struct BoundaryRow {
    int index = 0;
    ParameterPoint params;
    std::optional<int> mcs_c;
    std::optional<int> mcs_1;
    std::optional<int> mcs_2;
    double t_sum_bps = 0.0;
    double g0 = 0.0;
};

inline std::vector<BoundaryRow> boundary_params(const RegionResult& r, const CaseFilter& f) {
    const std::vector<IsacPoint> front = frontier_of(r, f);
    if (front.empty()) throw ConfigError("no sweep points match the requested case filter");
    auto idx = [](const std::optional<McsLevel>& m) -> std::optional<int> {
        if (m) return m->index;
        return std::nullopt;
    };
    std::vector<BoundaryRow> rows;
    for (const auto& p : front) {
        BoundaryRow row;
        row.index = static_cast<int>(rows.size());
        row.params = p.params;
        if (p.report.common_active) row.mcs_c = idx(p.report.mcs_common);
        row.mcs_1 = idx(p.report.mcs_private[0]);
        row.mcs_2 = idx(p.report.mcs_private[1]);
        row.t_sum_bps = p.t_sum_bps;
        row.g0 = p.g0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace rsma_isac
