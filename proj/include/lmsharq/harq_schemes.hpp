#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmsharq/fec_model.hpp"
#include "lmsharq/lms_channel.hpp"
#include "lmsharq/mi_engine.hpp"
#include "lmsharq/units.hpp"

namespace lmsharq {

enum class SchemeKind { classical, enhanced, adaptive };

std::string_view to_string(SchemeKind kind);
/// Throws ConfigError for an unknown name.
SchemeKind parse_scheme(std::string_view name);

/// Unconditional decoding probability targeted at each transmission
/// (P_1..P_T). Entries in (0, 1], total at most 1.
class DecodingProbTable {
public:
    /// Throws TableError when the invariants do not hold.
    explicit DecodingProbTable(std::vector<double> p);

    /// "case1", "case2" or "case3"; throws ConfigError otherwise.
    static DecodingProbTable preset(std::string_view name);

    std::span<const double> values() const { return p_; }
    int size() const { return static_cast<int>(p_.size()); }
    double total() const;
    /// True when the entries sum to 1 - target_wer.
    bool complete(double target_wer, double tolerance = 1e-12) const;

private:
    std::vector<double> p_;
};

/// Fixed number of bits per transmission.
class StaticBitTable {
public:
    /// Throws TableError for an empty table or non-positive entries.
    explicit StaticBitTable(std::vector<std::int64_t> n_sent);

    /// "classical-equal": the mother codeword split evenly over
    /// `transmissions` bursts (4 x 13380 for the default code).
    static StaticBitTable preset(std::string_view name, std::int64_t mother_codeword_bits,
                                 int transmissions = 4);

    std::span<const std::int64_t> n_sent() const { return n_sent_; }
    int size() const { return static_cast<int>(n_sent_.size()); }
    std::int64_t total() const;

private:
    std::vector<std::int64_t> n_sent_;
};

struct Transmission {
    double start_time_s;
    std::int64_t bits;
    double rho;
};

/// Receiver-side progress of one codeword.
struct CodewordState {
    std::int64_t id = 0;
    std::int64_t n_total_sent = 0;   // N^(j)
    double mi_acc_per_bit = 0.0;     // MI_acc^(j)
    std::vector<Transmission> transmissions;
    bool decoded = false;
    std::optional<double> decode_time_s;

    int transmission_count() const { return static_cast<int>(transmissions.size()); }
};

/// Accumulates one burst: MI^(j) = bits * mi_of(rho^2 Es/N0) and the
/// bit-weighted running mean of per-bit MI.
CodewordState mi_update(CodewordState state, std::int64_t bits_sent, double rho,
                        double es_n0_ref_linear, const MiTable& table, double start_time_s = 0.0);

/// p_j = P_j / (1 - sum_{k<j} P_k), j is 1-based. Throws TableError when j is
/// out of range or the prefix sum reaches 1.
double conditional_prob(const DecodingProbTable& table, int j);

struct MiNeeded {
    double rho_needed;
    double mi_needed_per_bit;
    bool degenerate_cdf; // all CDF samples equal; the caller may want to warn
};

/// rho_needed is the (1 - p_j) quantile of the attenuation CDF and MI_needed
/// the MI it yields at the reference Es/N0. Throws DomainError unless
/// 0 < p_j <= 1.
MiNeeded mi_needed(const EmpiricalCdf& cdf, double p_j, double es_n0_ref_linear,
                   const MiTable& table);

/// Ceiling to a whole number of symbols.
std::int64_t round_up_to_symbols(double bits, int bits_per_symbol = kQpskBitsPerSymbol);

/// Bits still needed so that a channel at MI_needed completes decoding:
/// (N_bits MI_req - N MI_acc) / MI_needed, rounded up to whole QPSK symbols
/// and clamped to [one symbol, remaining mother-code bits]. Returns nullopt
/// when the mother codeword has been fully sent.
std::optional<std::int64_t> adaptive_bits_needed(const CodewordState& state, const CodeSpec& spec,
                                                 double mi_needed_per_bit);

/// Entry j (1-based) of a static table, nullopt beyond its end.
std::optional<std::int64_t> next_burst_classical(const StaticBitTable& table, int j);

struct EnhancedTable {
    StaticBitTable table;
    bool budget_clamped; // the mother-code budget cut the table short or capped an entry
};

/// Offline per-transmission bit table for the enhanced static scheme; see
/// harq_schemes.cpp for the construction.
EnhancedTable build_enhanced_table(const EmpiricalCdf& cdf, const DecodingProbTable& probs,
                                   const CodeSpec& spec, double es_n0_ref_linear,
                                   const MiTable& table);

/// What the receiver sends back after a failed transmission. Static schemes
/// send a bare NACK; the adaptive scheme also carries the bits it needs.
struct Feedback {
    std::optional<std::int64_t> bits_requested;
};

class HarqScheme {
public:
    virtual ~HarqScheme() = default;

    virtual SchemeKind kind() const = 0;
    virtual int max_transmissions() const = 0;
    /// Size of the first burst of a fresh codeword.
    virtual std::int64_t first_burst_bits() const = 0;
    /// Receiver side, after transmission state.transmission_count() failed.
    virtual Feedback on_failure(const CodewordState& state) const = 0;
    /// Transmitter side: size of the next burst, nullopt when the codeword
    /// has used its last transmission or the mother-code budget.
    virtual std::optional<std::int64_t> next_burst(const CodewordState& state,
                                                   const Feedback& feedback) const = 0;
};

/// Table-driven IR: classical (fixed split) or enhanced (table from channel
/// statistics). Feedback is ACK/NACK only.
class StaticTableScheme final : public HarqScheme {
public:
    StaticTableScheme(SchemeKind kind, StaticBitTable table, CodeSpec spec, int max_transmissions,
                      bool budget_clamped = false);

    SchemeKind kind() const override { return kind_; }
    int max_transmissions() const override { return max_transmissions_; }
    std::int64_t first_burst_bits() const override;
    Feedback on_failure(const CodewordState& state) const override;
    std::optional<std::int64_t> next_burst(const CodewordState& state,
                                           const Feedback& feedback) const override;

    const StaticBitTable& table() const { return table_; }
    bool budget_clamped() const { return budget_clamped_; }

private:
    SchemeKind kind_;
    StaticBitTable table_;
    CodeSpec spec_;
    int max_transmissions_;
    bool budget_clamped_;
};

/// MI-driven IR: the receiver sizes each retransmission from its accumulated
/// MI and the MI needed at the next stage's target decoding probability.
class AdaptiveScheme final : public HarqScheme {
public:
    AdaptiveScheme(const DecodingProbTable& probs, const CodeSpec& spec, const EmpiricalCdf& cdf,
                   double es_n0_ref_linear, const MiTable& table, int max_transmissions);

    SchemeKind kind() const override { return SchemeKind::adaptive; }
    int max_transmissions() const override { return max_transmissions_; }
    std::int64_t first_burst_bits() const override { return first_burst_; }
    Feedback on_failure(const CodewordState& state) const override;
    std::optional<std::int64_t> next_burst(const CodewordState& state,
                                           const Feedback& feedback) const override;

    /// Per-stage thresholds, index 0 = first transmission.
    std::span<const MiNeeded> stages() const { return stages_; }

private:
    CodeSpec spec_;
    std::vector<MiNeeded> stages_;
    std::int64_t first_burst_;
    int max_transmissions_;
};

struct SchemeInputs {
    const CodeSpec& spec;
    const MiTable& mi_table;
    const EmpiricalCdf& cdf;
    double es_n0_ref_linear;
    const DecodingProbTable& probs;
    const StaticBitTable& classical_table;
    int max_transmissions;
};

/// The number of transmissions is the smaller of the cap and the table length.
std::unique_ptr<HarqScheme> make_scheme(SchemeKind kind, const SchemeInputs& inputs);

} // namespace lmsharq
