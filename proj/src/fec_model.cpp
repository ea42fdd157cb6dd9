#include "lmsharq/fec_model.hpp"

#include "lmsharq/csv.hpp"
#include "lmsharq/errors.hpp"
#include "lmsharq/units.hpp"

#include <cmath>
#include <istream>
#include <string>

namespace lmsharq {

void CodeSpec::validate() const
{
    if (data_bits <= 0 || mother_codeword_bits < data_bits)
        throw ConfigError("code needs 0 < data_bits <= mother_codeword_bits");
    if (!(mi_req_per_bit > 0.0 && mi_req_per_bit < 1.0))
        throw ConfigError("MI_req must lie in (0, 1), got " + std::to_string(mi_req_per_bit));
    if (!(target_wer > 0.0 && target_wer < 1.0))
        throw ConfigError("target WER must lie in (0, 1)");
}

bool is_decodable(const CodeSpec& spec, std::int64_t total_bits_sent, double mi_acc_per_bit)
{
    return static_cast<double>(total_bits_sent) * mi_acc_per_bit >= spec.required_information();
}

std::vector<WerPoint> read_wer_curve_csv(std::istream& in)
{
    const auto t = csv::read(in);
    const auto c_db = t.column("es_n0_db");
    const auto c_wer = t.column("wer");
    std::vector<WerPoint> curve;
    for (const auto& row : t.rows)
        curve.push_back({csv::to_double(row[c_db], "es_n0_db"), csv::to_double(row[c_wer], "wer")});
    return curve;
}

double es_n0_at_wer(std::span<const WerPoint> curve, double target_wer)
{
    if (curve.size() < 1)
        throw CalibrationError("WER curve is empty");
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!(curve[i].wer > 0.0 && curve[i].wer <= 1.0))
            throw CalibrationError("WER curve values must lie in (0, 1]");
        if (i > 0 && !(curve[i].es_n0_db > curve[i - 1].es_n0_db && curve[i].wer < curve[i - 1].wer))
            throw CalibrationError("WER curve must be strictly decreasing in increasing Es/N0");
    }
    if (!(target_wer <= curve.front().wer && target_wer >= curve.back().wer))
        throw CalibrationError("target WER " + std::to_string(target_wer) +
                               " outside curve range [" + std::to_string(curve.back().wer) + ", " +
                               std::to_string(curve.front().wer) + "]");
    for (std::size_t i = 0; i < curve.size(); ++i)
        if (curve[i].wer == target_wer)
            return curve[i].es_n0_db;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto& a = curve[i - 1];
        const auto& b = curve[i];
        if (target_wer < a.wer && target_wer > b.wer) {
            const double t = (std::log10(target_wer) - std::log10(a.wer)) /
                             (std::log10(b.wer) - std::log10(a.wer));
            return a.es_n0_db + t * (b.es_n0_db - a.es_n0_db);
        }
    }
    throw CalibrationError("target WER not bracketed by the curve");
}

double calibrate_mi_req(std::span<const WerPoint> curve, double target_wer, const MiTable& mi_table)
{
    return mi_of(mi_table, db_to_linear(es_n0_at_wer(curve, target_wer)));
}

} // namespace lmsharq
