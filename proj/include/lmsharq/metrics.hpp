#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lmsharq/fec_model.hpp"
#include "lmsharq/sim_core.hpp"

namespace lmsharq {

struct DecodeHistogram {
    // Fraction of resolved codewords first decoded at transmission j (index j-1).
    std::vector<double> per_transmission;
    double wer = 0.0;
    std::int64_t resolved = 0;
};

struct RunMetrics {
    double efficiency_bits_per_symbol = 0.0;
    double mean_delay_s = 0.0;
    std::vector<double> decode_fraction_per_transmission;
    double total_decode_fraction = 0.0;
    double wer = 0.0;
};

/// Useful data bits delivered per transmitted symbol. Symbols of codewords
/// that were never decoded count in the denominator. Throws DataError when
/// nothing was transmitted.
double efficiency(const RunLog& log, const CodeSpec& spec);

/// Delivery delay of one codeword: N / Rb + 2 (N_trans - 1) T_propag + T_propag.
double delay(std::int64_t n_bits_total, int n_transmissions, const SimConfig& config);

/// Mean delay over decoded codewords only; 0 when none decoded.
double mean_delay(const RunLog& log);

/// Histogram over codewords that reached a final outcome (decoded or out of
/// transmissions). `bins` defaults to the configured maximum transmissions.
DecodeHistogram decode_histogram(const RunLog& log, int bins = 0);

RunMetrics compute_metrics(const RunLog& log, const CodeSpec& spec);

/// One row per codeword.
void write_codewords_csv(const RunLog& log, std::ostream& out);

/// Structured summary of one run (JSON).
void write_metrics_json(const RunLog& log, const RunMetrics& metrics, std::ostream& out);

/// Tidy sweep table: scheme,environment,es_n0_db,efficiency,mean_delay_s,p1..p4,wer,seed.
/// With `label_probs` the scheme column reads e.g. "adaptive-case3".
void write_sweep_csv(std::span<const RunLog> logs, const CodeSpec& spec, std::ostream& out,
                     bool label_probs = false);

} // namespace lmsharq
