#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace lmsharq {

struct MiPoint {
    double es_n0_linear;
    double mi_per_bit;
};

/// Per-bit mutual information of QPSK over a Gaussian channel, tabulated
/// against linear Es/N0. Immutable once built.
class MiTable {
public:
    /// Validates the grid: strictly increasing abscissa, non-decreasing MI,
    /// MI within [0, 1]. Throws DataError otherwise.
    explicit MiTable(std::vector<MiPoint> grid, int modulation_bits = 2,
                     double max_std_error = 0.0);

    std::span<const MiPoint> grid() const { return grid_; }
    int modulation_bits() const { return modulation_bits_; }
    double min_mi() const { return grid_.front().mi_per_bit; }
    double max_mi() const { return grid_.back().mi_per_bit; }

    /// Largest Monte-Carlo standard error over the grid (0 when loaded from
    /// a cache file, where it is unknown).
    double max_std_error() const { return max_std_error_; }

    friend bool operator==(const MiTable&, const MiTable&);

private:
    std::vector<MiPoint> grid_;
    int modulation_bits_;
    double max_std_error_;
};

struct MiEstimate {
    double mi_per_bit;
    double std_error;
};

/// Stratified Monte-Carlo estimate of the per-bit MI at one Es/N0, with
/// equiprobable QPSK input. QPSK splits into two independent BPSK rails each
/// seeing SNR Es/N0, so the per-bit value equals the BPSK rail MI.
/// `strata` holds standard-normal noise draws, one per equiprobable stratum in
/// increasing order (see stratified_normal_draws).
MiEstimate estimate_bit_mi(double es_n0_linear, std::span<const double> strata);

/// One N(0,1) draw per stratum [i/n, (i+1)/n) of the probability axis.
std::vector<double> stratified_normal_draws(int samples, std::uint64_t seed);

/// Builds a grid of `points` values evenly spaced in dB. Throws ConfigError
/// for an empty range, fewer than 2 points, or fewer than 1e4 samples.
MiTable build_mi_table(double es_n0_min_db, double es_n0_max_db, int points,
                       int samples, std::uint64_t seed);

/// Defaults: -30 dB to +20 dB in 0.25 dB steps.
struct MiTableSettings {
    double es_n0_min_db = -30.0;
    double es_n0_max_db = 20.0;
    int points = 201;
    int samples = 100000;
    std::uint64_t seed = 1;
};
MiTable build_mi_table(const MiTableSettings& settings);

/// Piecewise-linear interpolation in linear Es/N0. Queries outside the grid
/// clamp to the end values. Throws DomainError when es_n0_linear <= 0.
double mi_of(const MiTable& table, double es_n0_linear);

/// Smallest linear Es/N0 with mi_of(x) == mi_target under the same
/// interpolation. Throws RangeError when mi_target is not strictly inside
/// (min_mi, max_mi).
double mi_inverse(const MiTable& table, double mi_target);

/// Two-column CSV: es_n0_db,mi_per_bit with a header row.
void write_mi_table_csv(const MiTable& table, std::ostream& out);
MiTable read_mi_table_csv(std::istream& in);

} // namespace lmsharq
