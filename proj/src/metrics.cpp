#include "lmsharq/metrics.hpp"

#include "lmsharq/csv.hpp"
#include "lmsharq/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <ostream>

namespace lmsharq {

double efficiency(const RunLog& log, const CodeSpec& spec)
{
    if (log.total_symbols <= 0)
        throw DataError("efficiency: no symbols were transmitted");
    return static_cast<double>(spec.data_bits) * static_cast<double>(log.decoded) /
           static_cast<double>(log.total_symbols);
}

double delay(std::int64_t n_bits_total, int n_transmissions, const SimConfig& config)
{
    return static_cast<double>(n_bits_total) / config.bit_rate_bps +
           2.0 * (n_transmissions - 1) * config.t_propag_s + config.t_propag_s;
}

double mean_delay(const RunLog& log)
{
    double sum = 0.0;
    std::int64_t n = 0;
    for (const auto& c : log.codewords) {
        if (c.status != CodewordStatus::decoded)
            continue;
        sum += delay(c.state.n_total_sent, c.state.transmission_count(), log.config);
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

DecodeHistogram decode_histogram(const RunLog& log, int bins)
{
    if (bins <= 0)
        bins = std::max(log.config.max_transmissions, log.transmissions_allowed);
    DecodeHistogram h;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    std::int64_t failed = 0;
    for (const auto& c : log.codewords) {
        if (c.status == CodewordStatus::decoded) {
            const auto j = static_cast<std::size_t>(c.state.transmission_count() - 1);
            if (j < counts.size())
                ++counts[j];
            ++h.resolved;
        } else if (c.status == CodewordStatus::failed) {
            ++failed;
            ++h.resolved;
        }
    }
    h.per_transmission.assign(counts.size(), 0.0);
    if (h.resolved == 0)
        return h;
    const double n = static_cast<double>(h.resolved);
    for (std::size_t j = 0; j < counts.size(); ++j)
        h.per_transmission[j] = static_cast<double>(counts[j]) / n;
    h.wer = static_cast<double>(failed) / n;
    return h;
}

RunMetrics compute_metrics(const RunLog& log, const CodeSpec& spec)
{
    RunMetrics m;
    m.efficiency_bits_per_symbol = efficiency(log, spec);
    m.mean_delay_s = mean_delay(log);
    const auto h = decode_histogram(log);
    m.decode_fraction_per_transmission = h.per_transmission;
    for (double f : h.per_transmission)
        m.total_decode_fraction += f;
    m.wer = h.wer;
    return m;
}

void write_codewords_csv(const RunLog& log, std::ostream& out)
{
    out << "id,status,transmissions,total_bits,mi_acc_per_bit,first_start_s,decode_time_s,delay_s\n";
    for (const auto& c : log.codewords) {
        const auto& s = c.state;
        out << s.id << ',' << to_string(c.status) << ',' << s.transmission_count() << ','
            << s.n_total_sent << ',' << csv::format(s.mi_acc_per_bit) << ','
            << csv::format(s.transmissions.empty() ? 0.0 : s.transmissions.front().start_time_s)
            << ',';
        if (s.decode_time_s)
            out << csv::format(*s.decode_time_s) << ','
                << csv::format(delay(s.n_total_sent, s.transmission_count(), log.config));
        else
            out << ',';
        out << '\n';
    }
}

void write_metrics_json(const RunLog& log, const RunMetrics& metrics, std::ostream& out)
{
    nlohmann::ordered_json j;
    j["scheme"] = to_string(log.config.scheme);
    j["environment"] = log.environment;
    j["es_n0_db"] = log.config.es_n0_ref_db;
    j["seed"] = log.config.seed;
    j["probs"] = log.config.probs_name;
    j["transmissions_allowed"] = log.transmissions_allowed;
    j["burst_table_bits"] = log.first_bursts;
    j["burst_table_clamped"] = log.table_clamped;
    j["codewords_generated"] = log.generated;
    j["codewords_decoded"] = log.decoded;
    j["codewords_failed"] = log.failed;
    j["codewords_incomplete"] = log.incomplete;
    j["total_bits"] = log.total_bits;
    j["total_symbols"] = log.total_symbols;
    j["efficiency_bits_per_symbol"] = metrics.efficiency_bits_per_symbol;
    j["mean_delay_s"] = metrics.mean_delay_s;
    j["decode_fraction_per_transmission"] = metrics.decode_fraction_per_transmission;
    j["total_decode_fraction"] = metrics.total_decode_fraction;
    j["wer"] = metrics.wer;
    out << j.dump(2) << '\n';
}

void write_sweep_csv(std::span<const RunLog> logs, const CodeSpec& spec, std::ostream& out,
                     bool label_probs)
{
    out << "scheme,environment,es_n0_db,efficiency,mean_delay_s,p1,p2,p3,p4,wer,seed\n";
    for (const auto& log : logs) {
        const auto h = decode_histogram(log, 4);
        out << to_string(log.config.scheme);
        if (label_probs)
            out << '-' << log.config.probs_name;
        out << ',' << log.environment << ','
            << csv::format(log.config.es_n0_ref_db) << ',' << csv::format(efficiency(log, spec))
            << ',' << csv::format(mean_delay(log));
        for (double p : h.per_transmission)
            out << ',' << csv::format(p);
        out << ',' << csv::format(h.wer) << ',' << log.config.seed << '\n';
    }
}

} // namespace lmsharq
