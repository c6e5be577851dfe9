#pragma once
// Command implementations behind rsma_isac_cli. Every command resolves its
// inputs into a single JSON "run" document, executes from that document only,
// and records it (with SHA-256 digests of the outputs) in run.json, so
// `reproduce` can re-execute any run and compare digests.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "rsma_isac/rsma_isac.hpp"

namespace rsma_isac::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int { Ok = 0, Mismatch = 1, ConfigFailure = 2, NumericFailure = 3 };

inline std::string sha256_hex(const std::string& data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Collects output files so their digests end up in run.json.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw ConfigError("cannot create output directory '" + dir_.string() + "'");
    }

    void write(const std::string& name, const std::string& text) {
        write_text_file((dir_ / name).string(), text);
        digests_[name] = sha256_hex(text);
    }

    const fs::path& dir() const { return dir_; }
    const std::map<std::string, std::string>& digests() const { return digests_; }

private:
    fs::path dir_;
    std::map<std::string, std::string> digests_;
};

// --- scenario resolution -------------------------------------------------------

inline const std::vector<std::string>& point_keys() {
    static const std::vector<std::string> keys{"t_comms", "t_p", "alpha_c", "alpha_p", "family"};
    return keys;
}

/// "key=value" with value parsed as JSON when possible (numbers, arrays), else as a string.
inline std::pair<std::string, json> parse_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    return {key, value};
}

struct CommonOptions {
    std::string scenario_path;
    std::string preset = "S1";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
};

/// Resolved scenario plus any parameter-point overrides that were not scenario fields.
struct ResolvedInputs {
    ScenarioConfig scenario;
    json point_overrides = json::object();
};

inline ResolvedInputs resolve_inputs(const CommonOptions& o, bool allow_point_keys) {
    json doc;
    if (!o.scenario_path.empty()) {
        doc = json::parse(read_file(o.scenario_path), nullptr, false);
        if (doc.is_discarded()) throw ConfigError("scenario file is not valid JSON: " + o.scenario_path);
    } else {
        doc = scenario_preset(o.preset);
    }
    ResolvedInputs r;
    for (const auto& kv : o.overrides) {
        auto [key, value] = parse_override(kv);
        const bool is_point_key = std::find(point_keys().begin(), point_keys().end(), key) != point_keys().end();
        if (allow_point_keys && is_point_key) {
            r.point_overrides[key] = value;
        } else if (doc.contains(key)) {
            doc[key] = value;
        } else {
            throw ConfigError("unknown override key '" + key + "'");
        }
    }
    if (o.seed) doc["seed"] = *o.seed;
    r.scenario = doc.get<ScenarioConfig>();
    r.scenario.validate();
    return r;
}

inline ChannelSet scenario_channels(const ScenarioConfig& cfg) {
    return generate_channels(cfg, ArrayGeometry{}, Rng(cfg.seed, streams::channels));
}

inline std::vector<Family> parse_families(const std::string& s) {
    if (s == "both") return {Family::MRT, Family::ZF};
    return {parse_family(s)};
}

inline std::string families_name(const std::vector<Family>& f) {
    return f.size() == 2 ? "both" : (f[0] == Family::MRT ? "mrt" : "zf");
}

inline CaseFilter parse_case_filter(const std::string& s) {
    if (s == "all") return CaseFilter::all();
    if (s == "sdma") return CaseFilter::sdma();
    if (s == "rsma-nosense") return CaseFilter::rsma_no_sense();
    return CaseFilter::special(parse_special_case(s));
}

inline ParameterPoint point_from_json(const json& j) {
    for (const auto& k : {"t_comms", "t_p", "alpha_c", "alpha_p"})
        if (!j.contains(k)) throw ConfigError(std::string("point-eval needs --set ") + k + "=<value>");
    ParameterPoint pp;
    try {
        pp.t_comms = j.at("t_comms").get<double>();
        pp.t_p = j.at("t_p").get<double>();
        pp.alpha_c = j.at("alpha_c").get<double>();
        pp.alpha_p = j.at("alpha_p").get<double>();
        if (j.contains("family")) pp.family = parse_family(j.at("family").get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed parameter point: ") + e.what());
    }
    pp.validate();
    return pp;
}

inline json point_to_json(const ParameterPoint& pp) {
    return {{"t_comms", pp.t_comms},
            {"t_p", pp.t_p},
            {"alpha_c", pp.alpha_c},
            {"alpha_p", pp.alpha_p},
            {"family", to_string(pp.family)}};
}

// --- commands ----------------------------------------------------------------
// Each executor takes the resolved run document and writes into `out`.

inline int exec_sweep(const json& run, OutputSet& out) {
    const auto cfg = run.at("scenario").get<ScenarioConfig>();
    SweepSpec spec;
    spec.grid_step = run.at("step").get<double>();
    spec.families = parse_families(run.at("family").get<std::string>());
    spec.metric = parse_metric(run.at("metric").get<std::string>());
    spec.monte_carlo_trials = run.at("trials").get<int>();
    const CaseFilter filter = parse_case_filter(run.at("case").get<std::string>());

    const ChannelSet ch = scenario_channels(cfg);
    const RegionResult r = sweep(spec, ch, cfg);
    if (r.points.empty())
        throw NumericError("no grid point could be evaluated (" + std::to_string(r.skipped.size()) +
                           " skipped; first reason: " + (r.skipped.empty() ? "-" : r.skipped.front().reason) + ")");

    std::ostringstream points;
    write_points_csv(points, r.points);
    out.write("points.csv", points.str());

    std::ostringstream boundary;
    write_points_csv(boundary, r.boundary);
    out.write("boundary.csv", boundary.str());

    std::ostringstream params;
    write_boundary_params_csv(params, boundary_params(r, filter));
    out.write("boundary_params.csv", params.str());

    if (!r.skipped.empty()) {
        std::ostringstream sk;
        sk << "t_comms,t_p,alpha_c,alpha_p,family,reason\n";
        for (const auto& s : r.skipped)
            sk << fmt::format("{},{},{},{},{},\"{}\"\n", csv::num(s.params.t_comms), csv::num(s.params.t_p),
                              csv::num(s.params.alpha_c), csv::num(s.params.alpha_p), to_string(s.params.family),
                              s.reason);
        out.write("skipped.csv", sk.str());
    }
    return Ok;
}

inline int exec_radar_heatmap(const json& run, OutputSet& out) {
    const auto cfg = run.at("scenario").get<ScenarioConfig>();
    const int trials = run.at("trials").get<int>();
    const auto n0s = run.at("n0").get<std::vector<int>>();
    const double beta_step = run.at("beta_step").get<double>();
    const bool subtract = run.at("background_subtraction").get<bool>();
    std::istringstream params_text(run.at("params_csv").get<std::string>());
    const auto rows = read_boundary_params_csv(params_text);

    std::ostringstream heat;
    std::ostringstream summary;
    heat << "index,n0,bin,snr_db,peak_correct\n";
    summary << "index,n0,beta,mean_snr_db,closed_form_db,peak_hit_rate\n";

    if (trials > 0) {
        const ChannelSet ch = scenario_channels(cfg);
        const CVector a0 = target_steering(ch);
        const Rng base(cfg.seed, streams::radar_noise);
        for (const auto& row : rows) {
            const PrecoderSet ps = build_precoders(row.params, ch, cfg);
            for (int n0 : n0s) {
                if (n0 < 0 || n0 >= cfg.n_subcarriers) throw ConfigError("target bin out of range");
                RadarTrialConfig rc;
                rc.n0 = n0;
                rc.beta = cfg.target_attenuation * std::pow(beta_step, n0 - n0s.front());
                rc.sigma_r2 = cfg.noise_power_radar;
                rc.trials = trials;
                rc.background_subtraction = subtract;
                const Rng rng = base.split(static_cast<std::uint64_t>(row.index)).split(static_cast<std::uint64_t>(n0));
                const RadarTrialStats st = run_radar_trials(ps, a0, rc, rng);
                for (int n = 0; n < cfg.n_subcarriers; ++n)
                    heat << fmt::format("{},{},{},{},{}\n", row.index, n0, n,
                                        csv::num(10.0 * std::log10(st.mean_bin_snr[n])),
                                        n == n0 ? csv::num(st.hit_rate()) : "");
                summary << fmt::format("{},{},{},{},{},{}\n", row.index, n0, csv::num(rc.beta),
                                       csv::num(10.0 * std::log10(st.mean_snr)),
                                       csv::num(10.0 * std::log10(st.mean_closed_form)), csv::num(st.hit_rate()));
            }
        }
    }
    out.write("heatmap.csv", heat.str());
    out.write("heatmap_summary.csv", summary.str());
    return Ok;
}

inline json evaluate_point_json(const ParameterPoint& pp, const ScenarioConfig& cfg) {
    const ChannelSet ch = scenario_channels(cfg);
    const PrecoderSet ps = build_precoders(pp, ch, cfg);
    const IsacPoint pt = evaluate_point(pp, ch, cfg);
    const auto& rep = pt.report;

    auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    auto mcs_json = [](const std::optional<McsLevel>& m) -> json {
        if (!m) return nullptr;
        return {{"index", m->index}, {"bits_per_symbol", m->bits_per_symbol},
                {"code_rate", fmt::format("{}/{}", m->rate_num, m->rate_den)},
                {"data_rate_bps", m->data_rate_bps(default_bandwidth())}};
    };

    json ues = json::array();
    for (int ue = 1; ue <= 2; ++ue) {
        const double sc = mean_of(sinr_common(ch, ps, ue, cfg.noise_power_comms));
        const double sp = mean_of(sinr_private(ch, ps, ue, cfg.noise_power_comms));
        ues.push_back({{"ue", ue},
                       {"mean_sinr_common", sc},
                       {"mean_sinr_private", sp},
                       {"efficiency_common", rep.eff_common[ue - 1]},
                       {"efficiency_private", rep.eff_private[ue - 1]},
                       {"mcs_private", mcs_json(rep.mcs_private[ue - 1])},
                       {"t_private_bps", rep.t_private[ue - 1]}});
    }
    json j;
    j["params"] = point_to_json(pp);
    j["case"] = to_string(pt.special_case);
    j["stream_power"] = {{"p_c", ps.p_c.squaredNorm()},
                         {"p_1", ps.p_1.squaredNorm()},
                         {"p_2", ps.p_2.squaredNorm()},
                         {"p_r", ps.p_r.squaredNorm()}};
    j["ues"] = ues;
    j["mcs_common"] = mcs_json(rep.mcs_common);
    j["t_common_bps"] = rep.t_common;
    j["t_sum_bps"] = pt.t_sum_bps;
    j["collapsed"] = pt.collapsed;
    j["g0"] = pt.g0;
    if (std::isfinite(pt.crb_bins2)) {
        j["crb_bins2"] = pt.crb_bins2;
    } else {
        j["crb_bins2"] = nullptr;
    }
    return j;
}

inline int exec_point_eval(const json& run, OutputSet& out) {
    const auto cfg = run.at("scenario").get<ScenarioConfig>();
    const ParameterPoint pp = point_from_json(run.at("point"));
    const json j = evaluate_point_json(pp, cfg);
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    out.write("point.json", text);
    return Ok;
}

inline int exec_calibrate_demo(const json& run, OutputSet& out) {
    const auto cfg = run.at("scenario").get<ScenarioConfig>();
    const double offset = run.at("offset_rad").get<double>();
    const double jitter = run.at("jitter_rad").get<double>();
    const ArrayGeometry geom;

    Eigen::VectorXd chain(2);
    chain << 0.0, offset;
    RfImpairment imp = constant_impairment(chain, cfg.n_subcarriers);
    Rng rng(cfg.seed, streams::calibration);
    for (int k = 0; k < cfg.n_subcarriers; ++k)
        for (int g = 0; g < 2; ++g)
            imp.phase_offsets(g, k) = wrap_phase(imp.phase_offsets(g, k) + jitter * rng.normal());

    const CGrid anchor = anchor_channels(imp, geom, 1.0);
    const double delta = estimate_phase_correction(anchor);
    const double correction = correction_from_delta(delta);
    const CGrid fixed = apply_phase_correction(anchor, correction);
    const double residual = estimate_phase_correction(fixed);

    json j{{"offset_rad", offset},
           {"jitter_rad", jitter},
           {"delta_phi_rad", delta},
           {"correction_rad", correction},
           {"residual_delta_phi_rad", residual}};
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    out.write("calibration.json", text);
    return Ok;
}

inline int execute(const json& run, OutputSet& out) {
    const std::string cmd = run.at("command").get<std::string>();
    if (cmd == "sweep") return exec_sweep(run, out);
    if (cmd == "radar-heatmap") return exec_radar_heatmap(run, out);
    if (cmd == "point-eval") return exec_point_eval(run, out);
    if (cmd == "calibrate-demo") return exec_calibrate_demo(run, out);
    throw ConfigError("unknown command '" + cmd + "' in run document");
}

/// Executes a resolved run and writes run.json (the run document plus output digests).
inline int run_and_record(const json& run, const fs::path& out_dir) {
    OutputSet out(out_dir);
    const int rc = execute(run, out);
    json record = run;
    record["outputs"] = out.digests();
    write_text_file((out_dir / "run.json").string(), record.dump(2) + "\n");
    return rc;
}

/// Re-executes a recorded run into `out_dir` and compares output digests.
inline int reproduce(const fs::path& run_json, const fs::path& out_dir, std::ostream& report) {
    json record = json::parse(read_file(run_json), nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("outputs"))
        throw ConfigError("'" + run_json.string() + "' is not a run record");
    const auto expected = record.at("outputs").get<std::map<std::string, std::string>>();
    json run = record;
    run.erase("outputs");

    OutputSet out(out_dir);
    execute(run, out);
    bool same = out.digests().size() == expected.size();
    for (const auto& [name, digest] : expected) {
        const auto it = out.digests().find(name);
        const bool ok = it != out.digests().end() && it->second == digest;
        same = same && ok;
        report << fmt::format("{} {} {}\n", ok ? "match" : "DIFFER", name, digest);
    }
    return same ? Ok : Mismatch;
}

inline void print_error(const char* kind, const std::string& message) {
    std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

/// Runs `body` and maps library errors onto exit codes with a JSON error on stderr.
template <class F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const NumericError& e) {
        print_error("numeric", e.what());
        return NumericFailure;
    } catch (const ConfigError& e) {
        print_error("config", e.what());
        return ConfigFailure;
    } catch (const nlohmann::json::exception& e) {
        print_error("config", e.what());
        return ConfigFailure;
    } catch (const fs::filesystem_error& e) {
        print_error("config", e.what());
        return ConfigFailure;
    }
}

}  // namespace rsma_isac::cli
