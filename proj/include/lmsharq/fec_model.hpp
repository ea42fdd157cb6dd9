#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lmsharq/mi_engine.hpp"

namespace lmsharq {

/// The mother code reduced to an MI threshold. Defaults describe the CCSDS
/// turbo code (8920, 1/6).
struct CodeSpec {
    std::int64_t data_bits = 8920;
    std::int64_t mother_codeword_bits = 53520;
    double mi_req_per_bit = 0.0;
    double target_wer = 1e-4;

    double rate() const
    {
        return static_cast<double>(data_bits) / static_cast<double>(mother_codeword_bits);
    }

    /// Information (in bits) the receiver must accumulate to decode.
    double required_information() const
    {
        return static_cast<double>(mother_codeword_bits) * mi_req_per_bit;
    }

    /// Throws ConfigError unless 0 < data_bits <= mother_codeword_bits and
    /// 0 < mi_req_per_bit < 1.
    void validate() const;
};

/// Decode oracle: N * MI_acc >= N_bits * MI_req (boundary inclusive).
bool is_decodable(const CodeSpec& spec, std::int64_t total_bits_sent, double mi_acc_per_bit);

struct WerPoint {
    double es_n0_db;
    double wer;
};

/// CSV with header es_n0_db,wer.
std::vector<WerPoint> read_wer_curve_csv(std::istream& in);

/// Es/N0 (dB) at which the curve reaches target_wer, interpolating linearly
/// in log10(WER). Throws CalibrationError when the curve is not strictly
/// decreasing or the target lies outside it.
double es_n0_at_wer(std::span<const WerPoint> curve, double target_wer);

/// MI_req = mi_of(Es/N0 at target_wer).
double calibrate_mi_req(std::span<const WerPoint> curve, double target_wer, const MiTable& mi_table);

} // namespace lmsharq
