#include "lmsharq/cli.hpp"

#include "lmsharq/config.hpp"
#include "lmsharq/csv.hpp"
#include "lmsharq/errors.hpp"
#include "lmsharq/metrics.hpp"
#include "lmsharq/units.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#ifndef LMSHARQ_DEFAULT_DATA_DIR
#define LMSHARQ_DEFAULT_DATA_DIR "data"
#endif

namespace lmsharq {

namespace {

struct CommonOptions {
    std::string data_dir;
    std::string profile = "paper-sectionV";
    std::string config;
};

std::filesystem::path data_dir(const CommonOptions& o)
{
    if (!o.data_dir.empty())
        return o.data_dir;
    if (const char* env = std::getenv("LMSHARQ_DATA_DIR"); env && *env)
        return env;
    return LMSHARQ_DEFAULT_DATA_DIR;
}

Profile prepare_profile(const CommonOptions& o)
{
    auto profile = load_profile(o.profile, data_dir(o));
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in)
            throw ConfigError("cannot open config file '" + o.config + "'");
        apply_config(profile, in);
    }
    return profile;
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body)
{
    if (path.empty() || path == "-") {
        body(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file)
        throw ConfigError("cannot write output file '" + path + "'");
    body(file);
    if (!file)
        throw DataError("failed while writing '" + path + "'");
}

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--data-dir", o.data_dir,
                    "Asset directory (default: $LMSHARQ_DATA_DIR or the build-time data dir)");
    cmd->add_option("--profile", o.profile, "Profile name or path")->capture_default_str();
    cmd->add_option("--config", o.config, "Extra INI file applied on top of the profile");
}

std::vector<SchemeKind> parse_schemes(const std::string& text)
{
    std::vector<SchemeKind> out;
    for (const auto& t : csv::split(text))
        if (!t.empty())
            out.push_back(parse_scheme(t));
    if (out.empty())
        throw ConfigError("no scheme given");
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> out;
    for (const auto& t : csv::split(text))
        if (!t.empty()) {
            try {
                out.push_back(static_cast<std::uint64_t>(csv::to_integer(t, "seed")));
            } catch (const DataError&) {
                throw ConfigError("seed list must hold integers, got '" + t + "'");
            }
        }
    if (out.empty())
        throw ConfigError("no seed given");
    return out;
}

void warn_degenerate(const Environment& env, SchemeKind scheme, std::ostream& err)
{
    if (!env.model && scheme != SchemeKind::classical)
        err << "warning: clear-sky attenuation CDF is degenerate; every stage threshold uses rho = 1\n";
}

struct Figure {
    std::string environment;
    std::vector<SchemeKind> schemes;
    std::vector<std::string> probs; // more than one entry: sweep over probability tables
};

const std::map<std::string, Figure>& figures()
{
    static const std::map<std::string, Figure> f{
        {"eff-cases", {"its", {SchemeKind::adaptive}, {"case1", "case2", "case3"}}},
        {"delay-its",
         {"its", {SchemeKind::classical, SchemeKind::enhanced, SchemeKind::adaptive}, {"case3"}}},
        {"eff-its",
         {"its", {SchemeKind::classical, SchemeKind::enhanced, SchemeKind::adaptive}, {"case3"}}},
        {"delay-open",
         {"open", {SchemeKind::classical, SchemeKind::enhanced, SchemeKind::adaptive}, {"case3"}}},
        {"eff-open",
         {"open", {SchemeKind::classical, SchemeKind::enhanced, SchemeKind::adaptive}, {"case3"}}},
    };
    return f;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Link-level simulator for IR HARQ over a land mobile satellite channel", "lmsharq"};
    app.require_subcommand(1);

    // mi-table
    CommonOptions mi_common;
    MiTableSettings mi_settings;
    std::string mi_out;
    auto* mi_cmd = app.add_subcommand("mi-table", "Build the QPSK per-bit MI table as CSV");
    mi_cmd->add_option("--min-db", mi_settings.es_n0_min_db)->capture_default_str();
    mi_cmd->add_option("--max-db", mi_settings.es_n0_max_db)->capture_default_str();
    mi_cmd->add_option("--points", mi_settings.points)->capture_default_str();
    mi_cmd->add_option("--samples", mi_settings.samples)->capture_default_str();
    mi_cmd->add_option("--seed", mi_settings.seed)->capture_default_str();
    mi_cmd->add_option("-o,--out", mi_out, "Output CSV (default stdout)");

    // calibrate
    CommonOptions cal_common;
    std::string cal_curve;
    std::optional<double> cal_target;
    auto* cal_cmd = app.add_subcommand("calibrate", "Derive MI_req from a WER curve");
    add_common(cal_cmd, cal_common);
    cal_cmd->add_option("--wer-curve", cal_curve, "WER curve CSV (es_n0_db,wer)");
    cal_cmd->add_option("--target-wer", cal_target, "Target word error rate");

    // channel
    CommonOptions ch_common;
    std::string ch_env = "its";
    double ch_duration = 600.0;
    std::uint64_t ch_seed = 1;
    std::string ch_series_out, ch_cdf_out;
    int ch_cdf_points = 1001;
    auto* ch_cmd = app.add_subcommand("channel", "Generate an attenuation series and its CDF");
    add_common(ch_cmd, ch_common);
    ch_cmd->add_option("--env", ch_env, "Environment name or model file")->capture_default_str();
    ch_cmd->add_option("--duration", ch_duration, "Seconds")->capture_default_str();
    ch_cmd->add_option("--seed", ch_seed)->capture_default_str();
    ch_cmd->add_option("--series-out", ch_series_out, "Series CSV (time_s,rho_db,state)");
    ch_cmd->add_option("--cdf-out", ch_cdf_out, "CDF CSV (rho_db,cdf)");
    ch_cmd->add_option("--cdf-points", ch_cdf_points)->capture_default_str();

    // run
    CommonOptions run_common;
    std::optional<std::string> run_scheme, run_env, run_probs, run_static;
    std::optional<double> run_esn0, run_duration;
    std::optional<std::uint64_t> run_seed;
    std::string run_codewords_out, run_metrics_out;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scheme at one Es/N0");
    add_common(run_cmd, run_common);
    run_cmd->add_option("--scheme", run_scheme, "classical | enhanced | adaptive");
    run_cmd->add_option("--env", run_env, "Environment name or model file (clear = no fading)");
    run_cmd->add_option("--esn0", run_esn0, "Reference Es/N0 in dB");
    run_cmd->add_option("--probs", run_probs, "case1 | case2 | case3 | list of P_j");
    run_cmd->add_option("--static-table", run_static, "classical-equal | list of bit counts");
    run_cmd->add_option("--seed", run_seed);
    run_cmd->add_option("--duration", run_duration, "Seconds of link time");
    run_cmd->add_option("--codewords-out", run_codewords_out, "Per-codeword CSV");
    run_cmd->add_option("--metrics-out", run_metrics_out, "Metrics JSON (default stdout)");

    // sweep
    CommonOptions sw_common;
    std::string sw_schemes = "classical,enhanced,adaptive";
    std::string sw_esn0 = "7:13:1";
    std::optional<std::string> sw_env, sw_probs;
    std::string sw_seeds = "1";
    std::optional<double> sw_duration;
    std::string sw_out;
    unsigned sw_threads = 0;
    auto* sw_cmd = app.add_subcommand("sweep", "Run the scheme x Es/N0 x seed grid, tidy CSV out");
    add_common(sw_cmd, sw_common);
    sw_cmd->add_option("--schemes", sw_schemes)->capture_default_str();
    sw_cmd->add_option("--esn0", sw_esn0, "start:stop:step or comma list (dB)")->capture_default_str();
    sw_cmd->add_option("--env", sw_env);
    sw_cmd->add_option("--probs", sw_probs);
    sw_cmd->add_option("--seeds", sw_seeds)->capture_default_str();
    sw_cmd->add_option("--duration", sw_duration);
    sw_cmd->add_option("-o,--out", sw_out, "Output CSV (default stdout)");
    sw_cmd->add_option("--threads", sw_threads, "0 = hardware concurrency");

    // figures
    CommonOptions fig_common;
    std::string fig_which = "all";
    std::string fig_out_dir = ".";
    std::string fig_esn0 = "7:13:1";
    std::string fig_seeds = "1";
    unsigned fig_threads = 0;
    auto* fig_cmd = app.add_subcommand("figures", "Write the efficiency/delay comparison data sets");
    add_common(fig_cmd, fig_common);
    fig_cmd->add_option("--which", fig_which,
                        "eff-cases | delay-its | eff-its | delay-open | eff-open | all")
        ->capture_default_str();
    fig_cmd->add_option("--out-dir", fig_out_dir)->capture_default_str();
    fig_cmd->add_option("--esn0", fig_esn0)->capture_default_str();
    fig_cmd->add_option("--seeds", fig_seeds)->capture_default_str();
    fig_cmd->add_option("--threads", fig_threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (mi_cmd->parsed()) {
            const auto table = build_mi_table(mi_settings);
            emit(mi_out, out, [&](std::ostream& o) { write_mi_table_csv(table, o); });
            err << "max standard error: " << csv::format(table.max_std_error()) << '\n';
        } else if (cal_cmd->parsed()) {
            auto profile = prepare_profile(cal_common);
            if (!cal_curve.empty())
                profile.calibration.wer_curve = cal_curve;
            if (cal_target)
                profile.code.target_wer = *cal_target;
            profile.calibration.mi_req_override.reset();
            const auto table = calibrate(profile, data_dir(cal_common));
            std::ifstream curve_in(resolve_asset(profile.calibration.wer_curve, data_dir(cal_common)));
            const auto curve = read_wer_curve_csv(curve_in);
            const double es = es_n0_at_wer(curve, profile.code.target_wer);
            out << "target_wer: " << csv::format(profile.code.target_wer) << '\n'
                << "es_n0_db: " << csv::format(es) << '\n'
                << "mi_req_per_bit: " << csv::format(profile.code.mi_req_per_bit) << '\n'
                << "required_information_bits: " << csv::format(profile.code.required_information())
                << '\n';
            (void)table;
        } else if (ch_cmd->parsed()) {
            const auto profile = prepare_profile(ch_common);
            (void)profile;
            const auto env = load_environment(ch_env, data_dir(ch_common));
            const auto series = environment_series(env, ch_duration, ch_seed);
            const auto cdf = empirical_cdf(series);
            if (!ch_series_out.empty())
                emit(ch_series_out, out, [&](std::ostream& o) { write_series_csv(series, o); });
            if (!ch_cdf_out.empty())
                emit(ch_cdf_out, out, [&](std::ostream& o) { write_cdf_csv(cdf, o, ch_cdf_points); });
            std::array<std::int64_t, 3> occupancy{};
            for (const auto& s : series.samples())
                if (s.state >= 0)
                    ++occupancy[static_cast<std::size_t>(s.state)];
            const double n = static_cast<double>(series.size());
            out << "environment: " << env.name << '\n'
                << "samples: " << series.size() << '\n'
                << "distance_m: " << csv::format(series.end_time_s() * (env.model ? env.model->speed_mps : 60.0 / 3.6)) << '\n'
                << "rho_db_q01: " << csv::format(amplitude_to_db(cdf.quantile(0.01))) << '\n'
                << "rho_db_median: " << csv::format(amplitude_to_db(cdf.quantile(0.5))) << '\n'
                << "rho_db_q99: " << csv::format(amplitude_to_db(cdf.quantile(0.99))) << '\n'
                << "state_occupancy: " << csv::format(occupancy[0] / n) << ' '
                << csv::format(occupancy[1] / n) << ' ' << csv::format(occupancy[2] / n) << '\n';
        } else if (run_cmd->parsed()) {
            auto profile = prepare_profile(run_common);
            auto& sim = profile.sim;
            if (run_scheme)
                sim.scheme = parse_scheme(*run_scheme);
            if (run_env)
                sim.environment = *run_env;
            if (run_esn0)
                sim.es_n0_ref_db = *run_esn0;
            if (run_probs) {
                sim.probs = parse_probs(*run_probs);
                sim.probs_name = *run_probs;
            }
            if (run_static) {
                sim.static_table = parse_static_table(*run_static, profile.code.mother_codeword_bits,
                                                      sim.max_transmissions);
                sim.static_table_name = *run_static;
            }
            if (run_seed)
                sim.seed = *run_seed;
            if (run_duration)
                sim.duration_s = *run_duration;
            const auto dir = data_dir(run_common);
            const auto env = load_environment(sim.environment, dir);
            const auto table = calibrate(profile, dir);
            warn_degenerate(env, sim.scheme, err);
            const auto log = run(sim, env, profile.code, table);
            if (log.table_clamped)
                err << "warning: enhanced bit table capped by the mother-code budget\n";
            const auto metrics = compute_metrics(log, profile.code);
            if (!run_codewords_out.empty())
                emit(run_codewords_out, out, [&](std::ostream& o) { write_codewords_csv(log, o); });
            emit(run_metrics_out, out, [&](std::ostream& o) { write_metrics_json(log, metrics, o); });
        } else if (sw_cmd->parsed()) {
            auto profile = prepare_profile(sw_common);
            if (sw_env)
                profile.sim.environment = *sw_env;
            if (sw_probs) {
                profile.sim.probs = parse_probs(*sw_probs);
                profile.sim.probs_name = *sw_probs;
            }
            if (sw_duration)
                profile.sim.duration_s = *sw_duration;
            const auto schemes = parse_schemes(sw_schemes);
            const auto esn0 = parse_es_n0_list(sw_esn0);
            const auto seeds = parse_seeds(sw_seeds);
            const auto dir = data_dir(sw_common);
            const auto env = load_environment(profile.sim.environment, dir);
            const auto table = calibrate(profile, dir);
            for (auto s : schemes)
                warn_degenerate(env, s, err);
            const auto logs = sweep(profile.sim, esn0, schemes, seeds, env, profile.code, table, sw_threads);
            emit(sw_out, out, [&](std::ostream& o) { write_sweep_csv(logs, profile.code, o); });
        } else if (fig_cmd->parsed()) {
            auto profile = prepare_profile(fig_common);
            const auto dir = data_dir(fig_common);
            const auto table = calibrate(profile, dir);
            const auto esn0 = parse_es_n0_list(fig_esn0);
            const auto seeds = parse_seeds(fig_seeds);
            std::vector<std::string> which;
            if (fig_which == "all")
                for (const auto& [name, f] : figures())
                    which.push_back(name);
            else if (figures().count(fig_which))
                which.push_back(fig_which);
            else
                throw ConfigError("unknown figure '" + fig_which +
                                  "' (expected eff-cases, delay-its, eff-its, delay-open, eff-open or all)");
            std::filesystem::create_directories(fig_out_dir);
            std::map<std::string, std::vector<RunLog>> cache;
            for (const auto& name : which) {
                const auto& fig = figures().at(name);
                const std::string key = fig.environment + "|" + std::to_string(fig.probs.size());
                if (!cache.count(key)) {
                    const auto env = load_environment(fig.environment, dir);
                    std::vector<RunLog> logs;
                    for (const auto& probs : fig.probs) {
                        SimConfig base = profile.sim;
                        base.probs = parse_probs(probs);
                        base.probs_name = probs;
                        auto part = sweep(base, esn0, fig.schemes, seeds, env, profile.code, table,
                                          fig_threads);
                        std::move(part.begin(), part.end(), std::back_inserter(logs));
                    }
                    cache.emplace(key, std::move(logs));
                }
                const auto path = (std::filesystem::path(fig_out_dir) / (name + ".csv")).string();
                emit(path, out, [&](std::ostream& o) {
                    write_sweep_csv(cache.at(key), profile.code, o, fig.probs.size() > 1);
                });
                out << "wrote " << path << '\n';
            }
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.category() << ": " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.category() << ": " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace lmsharq
