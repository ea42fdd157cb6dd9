#include "lmsharq/config.hpp"

#include "lmsharq/csv.hpp"
#include "lmsharq/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lmsharq {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> tokens(std::string_view text)
{
    std::string s(text);
    for (auto& ch : s)
        if (ch == ',')
            ch = ' ';
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;)
        out.push_back(t);
    return out;
}

double number(const std::string& value, const std::string& key)
{
    try {
        return csv::to_double(value, key);
    } catch (const DataError&) {
        throw ConfigError("config key '" + key + "' is not a number: '" + value + "'");
    }
}

long long integer(const std::string& value, const std::string& key)
{
    try {
        return csv::to_integer(value, key);
    } catch (const DataError&) {
        throw ConfigError("config key '" + key + "' is not an integer: '" + value + "'");
    }
}

} // namespace

Profile default_profile()
{
    return Profile{};
}

DecodingProbTable parse_probs(std::string_view text)
{
    const auto t = tokens(text);
    if (t.size() == 1 && t.front().rfind("case", 0) == 0)
        return DecodingProbTable::preset(t.front());
    if (t.empty())
        throw ConfigError("empty decoding probability table");
    std::vector<double> p;
    for (const auto& v : t)
        p.push_back(number(v, "probs"));
    try {
        return DecodingProbTable(std::move(p));
    } catch (const TableError& e) {
        throw ConfigError(e.what());
    }
}

StaticBitTable parse_static_table(std::string_view text, std::int64_t mother_codeword_bits,
                                  int transmissions)
{
    const auto t = tokens(text);
    if (t.size() == 1 && t.front() == "classical-equal")
        return StaticBitTable::preset(t.front(), mother_codeword_bits, transmissions);
    if (t.empty())
        throw ConfigError("empty static bit table");
    std::vector<std::int64_t> n;
    for (const auto& v : t)
        n.push_back(integer(v, "static_table"));
    try {
        return StaticBitTable(std::move(n));
    } catch (const TableError& e) {
        throw ConfigError(e.what());
    }
}

void apply_config(Profile& profile, std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    static const std::set<std::string> known{
        "run.scheme",          "run.environment",        "run.es_n0_ref_db",    "run.probs",
        "run.static_table",    "run.seed",               "link.rtt_s",          "link.t_propag_s",
        "link.bit_rate_bps",   "link.symbol_time_s",     "link.duration_s",     "link.max_transmissions",
        "code.data_bits",      "code.mother_codeword_bits", "code.target_wer",  "code.mi_req_per_bit",
        "calibration.wer_curve", "calibration.mi_table", "calibration.mi_min_db",
        "calibration.mi_max_db", "calibration.mi_points", "calibration.mi_samples",
        "calibration.mi_seed", "calibration.cdf_seed",   "calibration.cdf_duration_s"};

    std::optional<std::string> static_table_text;
    auto& sim = profile.sim;
    auto& cal = profile.calibration;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("config key '" + section + "' must be inside a section");
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            if (!known.count(full))
                throw ConfigError("unknown config key '" + full + "'");
            const std::string v = node.data();
            if (full == "run.scheme")
                sim.scheme = parse_scheme(v);
            else if (full == "run.environment")
                sim.environment = v;
            else if (full == "run.es_n0_ref_db")
                sim.es_n0_ref_db = number(v, full);
            else if (full == "run.probs") {
                sim.probs = parse_probs(v);
                sim.probs_name = v;
            } else if (full == "run.static_table")
                static_table_text = v;
            else if (full == "run.seed")
                sim.seed = static_cast<std::uint64_t>(integer(v, full));
            else if (full == "link.rtt_s")
                sim.rtt_s = number(v, full);
            else if (full == "link.t_propag_s")
                sim.t_propag_s = number(v, full);
            else if (full == "link.bit_rate_bps")
                sim.bit_rate_bps = number(v, full);
            else if (full == "link.symbol_time_s")
                sim.symbol_time_s = number(v, full);
            else if (full == "link.duration_s")
                sim.duration_s = number(v, full);
            else if (full == "link.max_transmissions")
                sim.max_transmissions = static_cast<int>(integer(v, full));
            else if (full == "code.data_bits")
                profile.code.data_bits = integer(v, full);
            else if (full == "code.mother_codeword_bits")
                profile.code.mother_codeword_bits = integer(v, full);
            else if (full == "code.target_wer")
                profile.code.target_wer = number(v, full);
            else if (full == "code.mi_req_per_bit")
                cal.mi_req_override = number(v, full);
            else if (full == "calibration.wer_curve")
                cal.wer_curve = v;
            else if (full == "calibration.mi_table")
                cal.mi_table_cache = v;
            else if (full == "calibration.mi_min_db")
                cal.mi.es_n0_min_db = number(v, full);
            else if (full == "calibration.mi_max_db")
                cal.mi.es_n0_max_db = number(v, full);
            else if (full == "calibration.mi_points")
                cal.mi.points = static_cast<int>(integer(v, full));
            else if (full == "calibration.mi_samples")
                cal.mi.samples = static_cast<int>(integer(v, full));
            else if (full == "calibration.mi_seed")
                cal.mi.seed = static_cast<std::uint64_t>(integer(v, full));
            else if (full == "calibration.cdf_seed")
                sim.cdf_seed = static_cast<std::uint64_t>(integer(v, full));
            else if (full == "calibration.cdf_duration_s")
                sim.cdf_duration_s = number(v, full);
        }
    }
    // The equal split depends on the code length, so resolve it last.
    const std::string table_text = static_table_text.value_or(sim.static_table_name);
    sim.static_table =
        parse_static_table(table_text, profile.code.mother_codeword_bits, sim.max_transmissions);
    sim.static_table_name = table_text;
    sim.validate();
}

Profile load_profile(std::string_view name_or_path, const std::filesystem::path& data_dir)
{
    std::filesystem::path path(name_or_path);
    if (!std::filesystem::exists(path))
        path = data_dir / "profiles" / (std::string(name_or_path) + ".ini");
    std::ifstream in(path);
    if (!in)
        throw ConfigError("unknown profile '" + std::string(name_or_path) + "' (looked for " +
                          path.string() + ")");
    Profile p = default_profile();
    apply_config(p, in);
    return p;
}

Environment load_environment(std::string_view name_or_path, const std::filesystem::path& data_dir)
{
    if (name_or_path == "clear")
        return Environment::clear_sky();
    std::filesystem::path path(name_or_path);
    if (!std::filesystem::exists(path))
        path = data_dir / "environments" / (std::string(name_or_path) + ".ini");
    if (!std::filesystem::exists(path))
        throw ConfigError("unknown environment '" + std::string(name_or_path) + "' (looked for " +
                          path.string() + ")");
    auto model = load_lms_model(path.string());
    std::string name = model.name;
    return Environment{std::move(name), std::move(model)};
}

std::filesystem::path resolve_asset(std::string_view path, const std::filesystem::path& data_dir)
{
    std::filesystem::path p(path);
    return p.is_absolute() ? p : data_dir / p;
}

MiTable calibrate(Profile& profile, const std::filesystem::path& data_dir)
{
    auto& cal = profile.calibration;
    std::optional<MiTable> table;
    if (!cal.mi_table_cache.empty()) {
        const auto path = resolve_asset(cal.mi_table_cache, data_dir);
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open MI table cache '" + path.string() + "'");
        table = read_mi_table_csv(in);
    } else {
        table = build_mi_table(cal.mi);
    }
    if (cal.mi_req_override) {
        profile.code.mi_req_per_bit = *cal.mi_req_override;
    } else {
        const auto path = resolve_asset(cal.wer_curve, data_dir);
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open WER curve '" + path.string() + "'");
        const auto curve = read_wer_curve_csv(in);
        profile.code.mi_req_per_bit = calibrate_mi_req(curve, profile.code.target_wer, *table);
    }
    profile.code.validate();
    return std::move(*table);
}

std::vector<double> parse_es_n0_list(std::string_view text)
{
    const std::string s(text);
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        const auto parts = csv::split(s, ':');
        if (parts.size() != 3)
            throw ConfigError("Es/N0 range must be start:stop:step, got '" + s + "'");
        const double start = number(parts[0], "esn0 start");
        const double stop = number(parts[1], "esn0 stop");
        const double step = number(parts[2], "esn0 step");
        if (!(step > 0.0) || stop < start)
            throw ConfigError("Es/N0 range needs step > 0 and stop >= start");
        const auto n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
        for (int i = 0; i <= n; ++i)
            out.push_back(start + step * i);
        return out;
    }
    for (const auto& t : tokens(s))
        out.push_back(number(t, "esn0"));
    if (out.empty())
        throw ConfigError("empty Es/N0 list");
    return out;
}

} // namespace lmsharq
