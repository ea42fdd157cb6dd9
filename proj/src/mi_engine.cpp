#include "lmsharq/mi_engine.hpp"

#include "lmsharq/csv.hpp"
#include "lmsharq/errors.hpp"
#include "lmsharq/units.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

namespace lmsharq {

namespace {

// log(1 + e^x) without overflow for large x or underflow for very negative x.
double softplus(double x)
{
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

} // namespace

MiTable::MiTable(std::vector<MiPoint> grid, int modulation_bits, double max_std_error)
    : grid_(std::move(grid)), modulation_bits_(modulation_bits), max_std_error_(max_std_error)
{
    if (grid_.size() < 2)
        throw DataError("MI table needs at least two grid points");
    if (modulation_bits_ <= 0)
        throw DataError("MI table modulation_bits must be positive");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const auto& p = grid_[i];
        if (!(p.es_n0_linear > 0.0))
            throw DataError("MI table abscissa must be positive");
        if (!(p.mi_per_bit >= 0.0 && p.mi_per_bit <= 1.0))
            throw DataError("MI table value outside [0, 1] at point " + std::to_string(i));
        if (i > 0) {
            if (!(p.es_n0_linear > grid_[i - 1].es_n0_linear))
                throw DataError("MI table abscissa not strictly increasing at point " +
                                std::to_string(i));
            if (p.mi_per_bit < grid_[i - 1].mi_per_bit)
                throw DataError("MI table values decrease at point " + std::to_string(i));
        }
    }
}

bool operator==(const MiTable& a, const MiTable& b)
{
    if (a.modulation_bits_ != b.modulation_bits_ || a.grid_.size() != b.grid_.size())
        return false;
    for (std::size_t i = 0; i < a.grid_.size(); ++i)
        if (a.grid_[i].es_n0_linear != b.grid_[i].es_n0_linear ||
            a.grid_[i].mi_per_bit != b.grid_[i].mi_per_bit)
            return false;
    return true;
}

std::vector<double> stratified_normal_draws(int samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const boost::math::normal standard;
    std::vector<double> draws(static_cast<std::size_t>(samples));
    const double n = samples;
    for (int i = 0; i < samples; ++i) {
        double u = (i + unit(rng)) / n;
        // uniform_real_distribution can return exactly 0; keep the quantile finite.
        u = std::clamp(u, 1e-300, std::nextafter(1.0, 0.0));
        draws[static_cast<std::size_t>(i)] = boost::math::quantile(standard, u);
    }
    return draws;
}

MiEstimate estimate_bit_mi(double es_n0_linear, std::span<const double> strata)
{
    if (!(es_n0_linear > 0.0))
        throw DomainError("Es/N0 must be positive");
    if (strata.size() < 2)
        throw ConfigError("MI estimate needs at least two noise strata");

    // Rail LLR for the transmitted symbol: L = 2g + 2 sqrt(g) z. The per-bit
    // MI is 1 - E[log2(1 + e^-L)].
    const double g = es_n0_linear;
    const double sg = std::sqrt(g);
    const auto penalty = [&](double z) { return softplus(-2.0 * g - 2.0 * sg * z); };

    const std::size_t n = strata.size();
    double sum = 0.0;
    double pair_sq = 0.0;
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        const double a = penalty(strata[i]);
        const double b = penalty(strata[i + 1]);
        sum += a + b;
        pair_sq += (a - b) * (a - b);
    }
    if (n % 2 == 1)
        sum += penalty(strata[n - 1]);

    const double inv_ln2 = 1.0 / std::numbers::ln2;
    const double mean_penalty = sum / static_cast<double>(n) * inv_ln2;
    // Collapsed-strata variance estimate: adjacent strata paired, one draw each.
    const double std_error = std::sqrt(pair_sq) / static_cast<double>(n) * inv_ln2;
    return {std::clamp(1.0 - mean_penalty, 0.0, 1.0), std_error};
}

MiTable build_mi_table(double es_n0_min_db, double es_n0_max_db, int points, int samples,
                       std::uint64_t seed)
{
    if (!(es_n0_min_db < es_n0_max_db))
        throw ConfigError("MI table range must satisfy min_db < max_db");
    if (points < 2)
        throw ConfigError("MI table needs at least 2 points");
    if (samples < 10000)
        throw ConfigError("MI table needs at least 10000 samples per point");

    // The same strata are reused at every grid point, which keeps the tabulated
    // curve smooth and monotone.
    const auto strata = stratified_normal_draws(samples, seed);
    std::vector<MiPoint> grid;
    grid.reserve(static_cast<std::size_t>(points));
    double worst_se = 0.0;
    double running_max = 0.0;
    const double step = (es_n0_max_db - es_n0_min_db) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double db = i + 1 == points ? es_n0_max_db : es_n0_min_db + step * i;
        const auto est = estimate_bit_mi(db_to_linear(db), strata);
        worst_se = std::max(worst_se, est.std_error);
        // Saturated tail values may jitter by an ulp; never let that break monotonicity.
        running_max = std::max(running_max, est.mi_per_bit);
        grid.push_back({db_to_linear(db), running_max});
    }
    return MiTable(std::move(grid), kQpskBitsPerSymbol, worst_se);
}

MiTable build_mi_table(const MiTableSettings& s)
{
    return build_mi_table(s.es_n0_min_db, s.es_n0_max_db, s.points, s.samples, s.seed);
}

double mi_of(const MiTable& table, double es_n0_linear)
{
    if (!(es_n0_linear > 0.0))
        throw DomainError("mi_of: Es/N0 must be positive, got " + std::to_string(es_n0_linear));
    const auto grid = table.grid();
    if (es_n0_linear <= grid.front().es_n0_linear)
        return grid.front().mi_per_bit;
    if (es_n0_linear >= grid.back().es_n0_linear)
        return grid.back().mi_per_bit;
    const auto hi = std::upper_bound(grid.begin(), grid.end(), es_n0_linear,
                                     [](double x, const MiPoint& p) { return x < p.es_n0_linear; });
    const auto lo = hi - 1;
    const double t = (es_n0_linear - lo->es_n0_linear) / (hi->es_n0_linear - lo->es_n0_linear);
    return lo->mi_per_bit + t * (hi->mi_per_bit - lo->mi_per_bit);
}

double mi_inverse(const MiTable& table, double mi_target)
{
    if (!(mi_target > table.min_mi() && mi_target < table.max_mi()))
        throw RangeError("mi_inverse: target " + std::to_string(mi_target) +
                         " outside achievable interval (" + std::to_string(table.min_mi()) + ", " +
                         std::to_string(table.max_mi()) + ")");
    const auto grid = table.grid();
    // First point whose MI reaches the target; its predecessor is strictly below.
    const auto hi = std::lower_bound(grid.begin(), grid.end(), mi_target,
                                     [](const MiPoint& p, double m) { return p.mi_per_bit < m; });
    const auto lo = hi - 1;
    const double t = (mi_target - lo->mi_per_bit) / (hi->mi_per_bit - lo->mi_per_bit);
    return lo->es_n0_linear + t * (hi->es_n0_linear - lo->es_n0_linear);
}

void write_mi_table_csv(const MiTable& table, std::ostream& out)
{
    out << "es_n0_db,mi_per_bit\n";
    for (const auto& p : table.grid())
        out << csv::format_exact(linear_to_db(p.es_n0_linear)) << ','
            << csv::format_exact(p.mi_per_bit) << '\n';
}

MiTable read_mi_table_csv(std::istream& in)
{
    const auto t = csv::read(in);
    const auto c_db = t.column("es_n0_db");
    const auto c_mi = t.column("mi_per_bit");
    std::vector<MiPoint> grid;
    grid.reserve(t.rows.size());
    for (const auto& row : t.rows)
        grid.push_back({db_to_linear(csv::to_double(row[c_db], "es_n0_db")),
                        csv::to_double(row[c_mi], "mi_per_bit")});
    return MiTable(std::move(grid), kQpskBitsPerSymbol);
}

} // namespace lmsharq
