#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmsharq/fec_model.hpp"
#include "lmsharq/harq_schemes.hpp"
#include "lmsharq/lms_channel.hpp"
#include "lmsharq/mi_engine.hpp"

namespace lmsharq {

/// Link and run parameters. Defaults are the GEO S-band system: 500 ms RTT,
/// 500 kbit/s QPSK, 10 minutes of traffic, four transmissions per codeword.
struct SimConfig {
    SchemeKind scheme = SchemeKind::adaptive;
    std::string environment = "its";
    double es_n0_ref_db = 10.0;
    double rtt_s = 0.5;
    double t_propag_s = 0.25;
    double bit_rate_bps = 5e5;
    double symbol_time_s = 4e-6;
    double duration_s = 600.0;
    int max_transmissions = 4;
    std::string probs_name = "case3";
    DecodingProbTable probs = DecodingProbTable::preset("case3");
    std::string static_table_name = "classical-equal";
    StaticBitTable static_table = StaticBitTable::preset("classical-equal", 53520, 4);
    std::uint64_t seed = 1;
    // The attenuation CDF used by the receiver comes from a separate, longer
    // calibration run of the same environment.
    std::uint64_t cdf_seed = 1000003;
    double cdf_duration_s = 6000.0;

    double es_n0_ref_linear() const;

    /// Throws ConfigError when rtt != 2 t_propag, bit_rate * symbol_time !=
    /// 2 bits, or any duration/rate is non-positive.
    void validate() const;
};

/// An LMS model, or clear sky (rho = 1 throughout) when `model` is empty.
struct Environment {
    std::string name;
    std::optional<LmsModel> model;

    static Environment clear_sky() { return {"clear", std::nullopt}; }
};

AttenuationSeries environment_series(const Environment& env, double duration_s, std::uint64_t seed);
EmpiricalCdf calibration_cdf(const Environment& env, const SimConfig& config);

enum class CodewordStatus { decoded, failed, incomplete };
std::string_view to_string(CodewordStatus status);

struct CodewordRecord {
    CodewordState state;
    CodewordStatus status = CodewordStatus::incomplete;
};

/// Everything a run produced. `incomplete` codewords were still waiting for
/// a retransmission when the link time ran out.
struct RunLog {
    SimConfig config;
    std::string environment;
    int transmissions_allowed = 0;
    std::vector<std::int64_t> first_bursts; // static table in use, or adaptive first burst
    bool table_clamped = false; // enhanced table hit the mother-code budget
    std::vector<CodewordRecord> codewords;
    std::int64_t total_bits = 0;
    std::int64_t total_symbols = 0;
    std::int64_t generated = 0;
    std::int64_t decoded = 0;
    std::int64_t failed = 0;
    std::int64_t incomplete = 0;
};

/// Runs one scheme over a given channel realisation and receiver CDF.
RunLog run_on_channel(const SimConfig& config, const AttenuationSeries& series,
                      const EmpiricalCdf& cdf, const CodeSpec& spec, const MiTable& mi_table,
                      std::string environment_name = {});

/// Generates the channel from the model (seeded by config.seed) and the
/// calibration CDF, then runs.
RunLog run(const SimConfig& config, const LmsModel& model, const CodeSpec& spec,
           const MiTable& mi_table);
RunLog run(const SimConfig& config, const Environment& env, const CodeSpec& spec,
           const MiTable& mi_table);

/// Cross product scheme x Es/N0 x seed, in that nesting order. Each cell
/// depends only on its own (config, seed); `threads` = 0 uses the hardware
/// concurrency.
std::vector<RunLog> sweep(const SimConfig& base, std::span<const double> es_n0_db,
                          std::span<const SchemeKind> schemes, std::span<const std::uint64_t> seeds,
                          const Environment& env, const CodeSpec& spec, const MiTable& mi_table,
                          unsigned threads = 0);

} // namespace lmsharq
