#include "lmsharq/sim_core.hpp"

#include "lmsharq/errors.hpp"
#include "lmsharq/units.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>

namespace lmsharq {

double SimConfig::es_n0_ref_linear() const
{
    return db_to_linear(es_n0_ref_db);
}

void SimConfig::validate() const
{
    if (!(t_propag_s >= 0.0) || !(rtt_s >= 0.0))
        throw ConfigError("propagation delay and RTT must be non-negative");
    if (std::abs(rtt_s - 2.0 * t_propag_s) > 1e-12)
        throw ConfigError("rtt_s must equal 2 * t_propag_s");
    if (!(bit_rate_bps > 0.0) || !(symbol_time_s > 0.0))
        throw ConfigError("bit rate and symbol time must be positive");
    if (std::abs(bit_rate_bps * symbol_time_s - kQpskBitsPerSymbol) > 1e-9)
        throw ConfigError("bit_rate_bps * symbol_time_s must equal 2 bits per QPSK symbol");
    if (!(duration_s > 0.0))
        throw ConfigError("duration_s must be positive");
    if (max_transmissions < 1)
        throw ConfigError("max_transmissions must be at least 1");
    if (!(cdf_duration_s > 0.0))
        throw ConfigError("cdf_duration_s must be positive");
    if (!std::isfinite(es_n0_ref_db))
        throw ConfigError("es_n0_ref_db must be finite");
}

std::string_view to_string(CodewordStatus status)
{
    switch (status) {
    case CodewordStatus::decoded:
        return "decoded";
    case CodewordStatus::failed:
        return "failed";
    case CodewordStatus::incomplete:
        return "incomplete";
    }
    return "unknown";
}

namespace {

// Clear-sky series use the default model's sample cadence.
constexpr double kClearSkyPeriod = 0.1 / (60.0 / 3.6);

struct PendingBurst {
    std::size_t codeword;
    std::int64_t bits;
    double ready_s;
};

} // namespace

AttenuationSeries environment_series(const Environment& env, double duration_s, std::uint64_t seed)
{
    if (!env.model)
        return AttenuationSeries::constant(duration_s, kClearSkyPeriod, 1.0);
    return generate_series(*env.model, duration_s, seed);
}

EmpiricalCdf calibration_cdf(const Environment& env, const SimConfig& config)
{
    return empirical_cdf(environment_series(env, config.cdf_duration_s, config.cdf_seed));
}

RunLog run_on_channel(const SimConfig& config, const AttenuationSeries& series,
                      const EmpiricalCdf& cdf, const CodeSpec& spec, const MiTable& mi_table,
                      std::string environment_name)
{
    config.validate();
    spec.validate();
    if (series.end_time_s() < config.duration_s)
        throw DataError("attenuation series covers " + std::to_string(series.end_time_s()) +
                        " s, shorter than the run duration " + std::to_string(config.duration_s) + " s");

    const double es_n0 = config.es_n0_ref_linear();
    const auto scheme = make_scheme(config.scheme, {spec, mi_table, cdf, es_n0, config.probs,
                                                    config.static_table, config.max_transmissions});

    RunLog log;
    log.config = config;
    log.environment = environment_name.empty() ? config.environment : std::move(environment_name);
    log.transmissions_allowed = scheme->max_transmissions();
    if (const auto* fixed = dynamic_cast<const StaticTableScheme*>(scheme.get())) {
        log.first_bursts.assign(fixed->table().n_sent().begin(), fixed->table().n_sent().end());
        log.table_clamped = fixed->budget_clamped();
    } else
        log.first_bursts.push_back(scheme->first_burst_bits());

    // Single forward link, never idle: a retransmission whose feedback has
    // arrived goes first, otherwise a fresh codeword starts (full buffer).
    std::deque<PendingBurst> retransmissions;
    double now = 0.0;
    while (true) {
        PendingBurst burst{};
        bool fresh = false;
        if (!retransmissions.empty() && retransmissions.front().ready_s <= now) {
            burst = retransmissions.front();
        } else {
            burst = {log.codewords.size(), scheme->first_burst_bits(), now};
            fresh = true;
        }
        const double airtime = static_cast<double>(burst.bits) / config.bit_rate_bps;
        if (now + airtime > config.duration_s)
            break;
        if (fresh) {
            CodewordRecord record;
            record.state.id = static_cast<std::int64_t>(log.codewords.size());
            log.codewords.push_back(std::move(record));
        } else {
            retransmissions.pop_front();
        }

        auto& record = log.codewords[burst.codeword];
        const double rho = series.rho_at(now);
        record.state = mi_update(std::move(record.state), burst.bits, rho, es_n0, mi_table, now);
        log.total_bits += burst.bits;

        const double received = now + airtime + config.t_propag_s;
        if (is_decodable(spec, record.state.n_total_sent, record.state.mi_acc_per_bit)) {
            record.state.decoded = true;
            record.state.decode_time_s = received;
            record.status = CodewordStatus::decoded;
        } else {
            const auto feedback = scheme->on_failure(record.state);
            if (const auto next = scheme->next_burst(record.state, feedback))
                retransmissions.push_back({burst.codeword, *next, now + airtime + config.rtt_s});
            else
                record.status = CodewordStatus::failed;
        }
        now += airtime;
    }

    log.total_symbols = (log.total_bits + kQpskBitsPerSymbol - 1) / kQpskBitsPerSymbol;
    log.generated = static_cast<std::int64_t>(log.codewords.size());
    for (const auto& c : log.codewords) {
        switch (c.status) {
        case CodewordStatus::decoded:
            ++log.decoded;
            break;
        case CodewordStatus::failed:
            ++log.failed;
            break;
        case CodewordStatus::incomplete:
            ++log.incomplete;
            break;
        }
    }
    return log;
}

RunLog run(const SimConfig& config, const Environment& env, const CodeSpec& spec,
           const MiTable& mi_table)
{
    config.validate();
    const auto series = environment_series(env, config.duration_s, config.seed);
    const auto cdf = calibration_cdf(env, config);
    return run_on_channel(config, series, cdf, spec, mi_table, env.name);
}

RunLog run(const SimConfig& config, const LmsModel& model, const CodeSpec& spec,
           const MiTable& mi_table)
{
    return run(config, Environment{model.name, model}, spec, mi_table);
}

std::vector<RunLog> sweep(const SimConfig& base, std::span<const double> es_n0_db,
                          std::span<const SchemeKind> schemes, std::span<const std::uint64_t> seeds,
                          const Environment& env, const CodeSpec& spec, const MiTable& mi_table,
                          unsigned threads)
{
    if (es_n0_db.empty() || schemes.empty() || seeds.empty())
        throw ConfigError("sweep needs at least one Es/N0 value, scheme and seed");
    base.validate();

    const auto cdf = calibration_cdf(env, base);
    std::vector<AttenuationSeries> series;
    series.reserve(seeds.size());
    for (auto seed : seeds)
        series.push_back(environment_series(env, base.duration_s, seed));

    struct Cell {
        SimConfig config;
        std::size_t series_index;
    };
    std::vector<Cell> cells;
    for (auto scheme : schemes)
        for (double db : es_n0_db)
            for (std::size_t s = 0; s < seeds.size(); ++s) {
                SimConfig c = base;
                c.scheme = scheme;
                c.es_n0_ref_db = db;
                c.seed = seeds[s];
                c.environment = env.name;
                cells.push_back({std::move(c), s});
            }

    std::vector<std::optional<RunLog>> results(cells.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                results[i] = run_on_channel(cells[i].config, series[cells[i].series_index], cdf, spec,
                                            mi_table, env.name);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t)
            pool.emplace_back(worker);
        worker();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<RunLog> logs;
    logs.reserve(results.size());
    for (auto& r : results)
        logs.push_back(std::move(*r));
    return logs;
}

} // namespace lmsharq
