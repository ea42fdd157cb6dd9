#include "lmsharq/lms_channel.hpp"

#include "lmsharq/csv.hpp"
#include "lmsharq/errors.hpp"
#include "lmsharq/units.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lmsharq {

namespace pt = boost::property_tree;

void LmsModel::validate() const
{
    for (std::size_t r = 0; r < 3; ++r) {
        double sum = 0.0;
        for (double p : transitions[r]) {
            if (!(p >= 0.0) || p > 1.0)
                throw ModelError("transition matrix row " + std::to_string(r + 1) +
                                 " has an entry outside [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ModelError("transition matrix row " + std::to_string(r + 1) + " sums to " +
                             std::to_string(sum) + ", expected 1");
    }
    for (std::size_t s = 0; s < 3; ++s)
        if (!(states[s].psi_db > 0.0))
            throw ModelError("state " + std::to_string(s + 1) + ": psi_db must be positive");
    if (!(state_frame_m > 0.0) || !(sample_frame_m > 0.0) || !(speed_mps > 0.0))
        throw ModelError("frame lengths and speed must be positive");
    if (sample_frame_m > state_frame_m)
        throw ModelError("sample_frame_m must not exceed state_frame_m");
    if (initial_state && (*initial_state < 0 || *initial_state > 2))
        throw ModelError("initial_state must be 1, 2 or 3");
}

namespace {

double require_double(const pt::ptree& tree, const std::string& key)
{
    const auto v = tree.get_optional<std::string>(key);
    if (!v)
        throw ConfigError("model file: missing key '" + key + "'");
    try {
        return csv::to_double(*v, key);
    } catch (const DataError&) {
        throw ConfigError("model file: key '" + key + "' is not a number: '" + *v + "'");
    }
}

} // namespace

LmsModel parse_lms_model(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }

    LmsModel m;
    m.name = tree.get<std::string>("model.name", "unnamed");
    if (tree.get_optional<std::string>("model.speed_kmh"))
        m.speed_mps = require_double(tree, "model.speed_kmh") / 3.6;
    if (tree.get_optional<std::string>("model.state_frame_m"))
        m.state_frame_m = require_double(tree, "model.state_frame_m");
    if (tree.get_optional<std::string>("model.sample_frame_m"))
        m.sample_frame_m = require_double(tree, "model.sample_frame_m");
    if (tree.get_optional<std::string>("model.initial_state"))
        m.initial_state = static_cast<int>(require_double(tree, "model.initial_state")) - 1;

    for (int s = 0; s < 3; ++s) {
        const std::string sec = "state" + std::to_string(s + 1) + ".";
        m.states[static_cast<std::size_t>(s)] = {require_double(tree, sec + "alpha_db"),
                                                 require_double(tree, sec + "psi_db"),
                                                 require_double(tree, sec + "mp_db")};
    }
    for (int r = 0; r < 3; ++r) {
        const std::string key = "transitions.row" + std::to_string(r + 1);
        const auto row = tree.get_optional<std::string>(key);
        if (!row)
            throw ConfigError("model file: missing key '" + key + "'");
        std::istringstream fields(*row);
        std::vector<double> values;
        for (double v; fields >> v;)
            values.push_back(v);
        if (values.size() != 3 || !fields.eof())
            throw ConfigError("model file: '" + key + "' must hold three probabilities");
        std::copy(values.begin(), values.end(), m.transitions[static_cast<std::size_t>(r)].begin());
    }
    m.validate();
    return m;
}

LmsModel load_lms_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open model file '" + path + "'");
    return parse_lms_model(in);
}

std::array<double, 3> stationary_distribution(const TransitionMatrix& p)
{
    // Power iteration on pi <- pi P; converges for the aperiodic chains used
    // here and leaves the uniform vector unchanged for the identity matrix.
    std::array<double, 3> pi{1.0 / 3, 1.0 / 3, 1.0 / 3};
    for (int it = 0; it < 100000; ++it) {
        std::array<double, 3> next{};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                next[j] += pi[i] * p[i][j];
        const double total = next[0] + next[1] + next[2];
        double delta = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            next[j] /= total;
            delta = std::max(delta, std::abs(next[j] - pi[j]));
        }
        pi = next;
        if (delta < 1e-15)
            break;
    }
    return pi;
}

LooSampler::LooSampler(const LooParams& params)
    : alpha_db_(params.alpha_db), psi_db_(params.psi_db),
      diffuse_sigma_(std::sqrt(db_to_linear(params.mp_db) / 2.0))
{
}

AttenuationSeries::AttenuationSeries(std::vector<AttenuationSample> samples, double period_s)
    : samples_(std::move(samples)), period_s_(period_s)
{
    if (samples_.empty())
        throw DataError("attenuation series is empty");
    if (!(period_s_ > 0.0))
        throw DataError("attenuation series period must be positive");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!(samples_[i].rho > 0.0))
            throw DataError("attenuation sample " + std::to_string(i) + " is not positive");
        if (i > 0 && !(samples_[i].time_s > samples_[i - 1].time_s))
            throw DataError("attenuation series times must be strictly increasing");
    }
}

AttenuationSeries AttenuationSeries::constant(double duration_s, double period_s, double rho)
{
    if (!(duration_s > 0.0) || !(period_s > 0.0))
        throw DomainError("constant series needs positive duration and period");
    const auto n = static_cast<std::size_t>(std::floor(duration_s / period_s)) + 1;
    std::vector<AttenuationSample> samples(n);
    for (std::size_t k = 0; k < n; ++k)
        samples[k] = {static_cast<double>(k) * period_s, rho, amplitude_to_db(rho), -1};
    return AttenuationSeries(std::move(samples), period_s);
}

double AttenuationSeries::rho_at(double time_s) const
{
    if (!(time_s >= 0.0) || time_s >= end_time_s())
        throw DataError("attenuation series does not cover t = " + std::to_string(time_s) +
                        " s (series ends at " + std::to_string(end_time_s()) + " s)");
    auto k = static_cast<std::size_t>(time_s / period_s_);
    k = std::min(k, samples_.size() - 1);
    return samples_[k].rho;
}

AttenuationSeries generate_series(const LmsModel& model, double duration_s, std::uint64_t seed)
{
    if (!(duration_s > 0.0))
        throw DomainError("series duration must be positive");
    model.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::array<LooSampler, 3> samplers{LooSampler(model.states[0]), LooSampler(model.states[1]),
                                       LooSampler(model.states[2])};

    const auto pick = [&](const std::array<double, 3>& probs) {
        const double u = unit(rng);
        double acc = 0.0;
        for (int s = 0; s < 2; ++s) {
            acc += probs[static_cast<std::size_t>(s)];
            if (u < acc)
                return s;
        }
        return 2;
    };

    int state = model.initial_state ? *model.initial_state
                                    : pick(stationary_distribution(model.transitions));

    const double period = model.sample_period_s();
    const auto n = static_cast<std::size_t>(std::floor(duration_s / period)) + 1;
    const double samples_per_epoch = model.state_frame_m / model.sample_frame_m;

    std::vector<AttenuationSample> samples;
    samples.reserve(n);
    long long epoch = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto this_epoch = static_cast<long long>(static_cast<double>(k) / samples_per_epoch + 1e-9);
        while (epoch < this_epoch) {
            state = pick(model.transitions[static_cast<std::size_t>(state)]);
            ++epoch;
        }
        const auto d = samplers[static_cast<std::size_t>(state)].draw(rng);
        samples.push_back({static_cast<double>(k) * period, d.rho,
                           amplitude_to_db(d.direct_amplitude), state});
    }
    return AttenuationSeries(std::move(samples), period);
}

void write_series_csv(const AttenuationSeries& series, std::ostream& out)
{
    out << "time_s,rho_db,state\n";
    for (const auto& s : series.samples())
        out << csv::format(s.time_s) << ',' << csv::format(amplitude_to_db(s.rho)) << ','
            << s.state + 1 << '\n';
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> rho) : sorted_(std::move(rho))
{
    if (sorted_.empty())
        throw DataError("empirical CDF needs at least one sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::eval(double rho) const
{
    const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), rho) - sorted_.begin();
    return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double q) const
{
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("quantile level must lie in [0, 1], got " + std::to_string(q));
    const auto n = sorted_.size();
    const double nd = static_cast<double>(n);
    // Smallest order statistic k (0-based) with (k + 1) / n >= q, evaluated with
    // the same arithmetic as eval() so the round trip is exact.
    auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(q * nd) - 1.0));
    k = std::min(k, n - 1);
    while (k > 0 && static_cast<double>(k) / nd >= q)
        --k;
    while (k + 1 < n && static_cast<double>(k + 1) / nd < q)
        ++k;
    return sorted_[k];
}

EmpiricalCdf empirical_cdf(const AttenuationSeries& series)
{
    std::vector<double> rho;
    rho.reserve(series.size());
    for (const auto& s : series.samples())
        rho.push_back(s.rho);
    return EmpiricalCdf(std::move(rho));
}

void write_cdf_csv(const EmpiricalCdf& cdf, std::ostream& out, int points)
{
    out << "rho_db,cdf\n";
    for (int i = 0; i < points; ++i) {
        const double q = points > 1 ? static_cast<double>(i) / (points - 1) : 1.0;
        const double rho = cdf.quantile(q);
        out << csv::format(amplitude_to_db(rho)) << ',' << csv::format(cdf.eval(rho)) << '\n';
    }
}

} // namespace lmsharq
