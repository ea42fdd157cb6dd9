#include "lmsharq/harq_schemes.hpp"

#include "lmsharq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace lmsharq {

std::string_view to_string(SchemeKind kind)
{
    switch (kind) {
    case SchemeKind::classical:
        return "classical";
    case SchemeKind::enhanced:
        return "enhanced";
    case SchemeKind::adaptive:
        return "adaptive";
    }
    return "unknown";
}

SchemeKind parse_scheme(std::string_view name)
{
    if (name == "classical")
        return SchemeKind::classical;
    if (name == "enhanced")
        return SchemeKind::enhanced;
    if (name == "adaptive")
        return SchemeKind::adaptive;
    throw ConfigError("unknown scheme '" + std::string(name) +
                      "' (expected classical, enhanced or adaptive)");
}

DecodingProbTable::DecodingProbTable(std::vector<double> p) : p_(std::move(p))
{
    if (p_.empty())
        throw TableError("decoding probability table is empty");
    for (double v : p_)
        if (!(v > 0.0 && v <= 1.0))
            throw TableError("decoding probability " + std::to_string(v) + " outside (0, 1]");
    if (total() > 1.0 + 1e-12)
        throw TableError("decoding probabilities sum to " + std::to_string(total()) + " > 1");
}

DecodingProbTable DecodingProbTable::preset(std::string_view name)
{
    if (name == "case1")
        return DecodingProbTable({0.9999});
    if (name == "case2")
        return DecodingProbTable({0.5, 0.4999});
    if (name == "case3")
        return DecodingProbTable({0.5, 0.3, 0.1, 0.0999});
    throw ConfigError("unknown decoding probability preset '" + std::string(name) +
                      "' (expected case1, case2 or case3)");
}

double DecodingProbTable::total() const
{
    return std::accumulate(p_.begin(), p_.end(), 0.0);
}

bool DecodingProbTable::complete(double target_wer, double tolerance) const
{
    return std::abs(total() - (1.0 - target_wer)) <= tolerance;
}

StaticBitTable::StaticBitTable(std::vector<std::int64_t> n_sent) : n_sent_(std::move(n_sent))
{
    if (n_sent_.empty())
        throw TableError("static bit table is empty");
    for (auto n : n_sent_)
        if (n <= 0)
            throw TableError("static bit table entries must be positive");
}

StaticBitTable StaticBitTable::preset(std::string_view name, std::int64_t mother_codeword_bits,
                                      int transmissions)
{
    if (name != "classical-equal")
        throw ConfigError("unknown static table preset '" + std::string(name) +
                          "' (expected classical-equal)");
    if (transmissions <= 0 || mother_codeword_bits % transmissions != 0)
        throw ConfigError("classical-equal needs the mother codeword to split evenly");
    return StaticBitTable(std::vector<std::int64_t>(static_cast<std::size_t>(transmissions),
                                                    mother_codeword_bits / transmissions));
}

std::int64_t StaticBitTable::total() const
{
    return std::accumulate(n_sent_.begin(), n_sent_.end(), std::int64_t{0});
}

CodewordState mi_update(CodewordState state, std::int64_t bits_sent, double rho,
                        double es_n0_ref_linear, const MiTable& table, double start_time_s)
{
    if (bits_sent <= 0)
        throw DomainError("mi_update: bits_sent must be positive");
    if (!(rho > 0.0))
        throw DomainError("mi_update: rho must be positive");
    const double burst_mi = static_cast<double>(bits_sent) * mi_of(table, rho * rho * es_n0_ref_linear);
    const auto previous = state.n_total_sent;
    state.n_total_sent = previous + bits_sent;
    state.mi_acc_per_bit = (static_cast<double>(previous) * state.mi_acc_per_bit + burst_mi) /
                           static_cast<double>(state.n_total_sent);
    state.mi_acc_per_bit = std::clamp(state.mi_acc_per_bit, 0.0, 1.0);
    state.transmissions.push_back({start_time_s, bits_sent, rho});
    return state;
}

double conditional_prob(const DecodingProbTable& table, int j)
{
    if (j < 1 || j > table.size())
        throw TableError("transmission index " + std::to_string(j) + " outside table of size " +
                         std::to_string(table.size()));
    const auto p = table.values();
    double prefix = 0.0;
    for (int k = 0; k + 1 < j; ++k)
        prefix += p[static_cast<std::size_t>(k)];
    if (prefix >= 1.0)
        throw TableError("decoding probabilities before transmission " + std::to_string(j) +
                         " already sum to 1");
    return p[static_cast<std::size_t>(j - 1)] / (1.0 - prefix);
}

MiNeeded mi_needed(const EmpiricalCdf& cdf, double p_j, double es_n0_ref_linear,
                   const MiTable& table)
{
    if (!(p_j > 0.0 && p_j <= 1.0))
        throw DomainError("mi_needed: p_j must lie in (0, 1], got " + std::to_string(p_j));
    // 1 - p_j can land a hair below 0 for p_j = 1 after the division.
    const double rho = cdf.quantile(std::clamp(1.0 - p_j, 0.0, 1.0));
    return {rho, mi_of(table, rho * rho * es_n0_ref_linear), cdf.degenerate()};
}

std::int64_t round_up_to_symbols(double bits, int bits_per_symbol)
{
    const double symbols = std::ceil(bits / bits_per_symbol);
    return static_cast<std::int64_t>(symbols) * bits_per_symbol;
}

std::optional<std::int64_t> adaptive_bits_needed(const CodewordState& state, const CodeSpec& spec,
                                                 double mi_needed_per_bit)
{
    const std::int64_t remaining = spec.mother_codeword_bits - state.n_total_sent;
    if (remaining <= 0)
        return std::nullopt;
    const double missing = spec.required_information() -
                           static_cast<double>(state.n_total_sent) * state.mi_acc_per_bit;
    if (!(mi_needed_per_bit > 0.0))
        return remaining;
    const double raw = missing / mi_needed_per_bit;
    if (raw >= static_cast<double>(remaining))
        return remaining;
    const auto bits = std::max<std::int64_t>(round_up_to_symbols(raw), kQpskBitsPerSymbol);
    return std::min(bits, remaining);
}

std::optional<std::int64_t> next_burst_classical(const StaticBitTable& table, int j)
{
    if (j < 1 || j > table.size())
        return std::nullopt;
    return table.n_sent()[static_cast<std::size_t>(j - 1)];
}

namespace {

constexpr std::size_t kDesignPopulation = 50000;
constexpr std::uint64_t kDesignSeed = 0x5eed'e4a1ULL;

// Stage size from a raw bit count: whole symbols, at least one symbol, at most
// the remaining budget. Sets `clamped` when the budget cut the request.
std::int64_t stage_bits(double raw, std::int64_t remaining, bool& clamped)
{
    if (!(raw < static_cast<double>(remaining))) {
        clamped = clamped || raw > static_cast<double>(remaining);
        return remaining;
    }
    return std::min(std::max<std::int64_t>(round_up_to_symbols(raw), kQpskBitsPerSymbol), remaining);
}

} // namespace

// Stage 1 follows the adaptive formula with nothing accumulated. Later stages
// are sized offline on a population of virtual codewords whose bursts see
// independent attenuations drawn from the CDF: among those still undecoded,
// stage j gets the smallest size that lets a fraction p_j of them decode.
EnhancedTable build_enhanced_table(const EmpiricalCdf& cdf, const DecodingProbTable& probs,
                                   const CodeSpec& spec, double es_n0_ref_linear,
                                   const MiTable& table)
{
    spec.validate();
    const double required = spec.required_information();
    bool clamped = false;

    const auto first = mi_needed(cdf, conditional_prob(probs, 1), es_n0_ref_linear, table);
    const double raw_first = first.mi_needed_per_bit > 0.0 ? required / first.mi_needed_per_bit
                                                           : std::numeric_limits<double>::infinity();
    std::vector<std::int64_t> n_sent{stage_bits(raw_first, spec.mother_codeword_bits, clamped)};
    std::int64_t sent = n_sent.front();

    std::mt19937_64 rng(kDesignSeed);
    std::uniform_int_distribution<std::size_t> pick(0, cdf.size() - 1);
    const auto draw_mi = [&] {
        const double rho = cdf.sorted()[pick(rng)];
        return mi_of(table, rho * rho * es_n0_ref_linear);
    };

    std::vector<double> info; // accumulated information of undecoded virtual codewords
    info.reserve(kDesignPopulation);
    for (std::size_t i = 0; i < kDesignPopulation; ++i) {
        const double got = static_cast<double>(sent) * draw_mi();
        if (got < required)
            info.push_back(got);
    }

    std::vector<double> bits_to_decode;
    for (int j = 2; j <= probs.size(); ++j) {
        const std::int64_t remaining = spec.mother_codeword_bits - sent;
        if (remaining <= 0) {
            clamped = true;
            break;
        }
        std::int64_t bits = std::min<std::int64_t>(kQpskBitsPerSymbol, remaining);
        if (!info.empty()) {
            std::vector<double> stage_mi(info.size());
            bits_to_decode.resize(info.size());
            for (std::size_t i = 0; i < info.size(); ++i) {
                stage_mi[i] = draw_mi();
                bits_to_decode[i] = stage_mi[i] > 0.0 ? (required - info[i]) / stage_mi[i]
                                                      : std::numeric_limits<double>::infinity();
            }
            std::vector<double> sorted = bits_to_decode;
            std::sort(sorted.begin(), sorted.end());
            const double p = conditional_prob(probs, j);
            const double n = static_cast<double>(sorted.size());
            const auto k = static_cast<std::size_t>(
                std::clamp(std::ceil(p * n) - 1.0, 0.0, n - 1.0));
            bits = stage_bits(sorted[k], remaining, clamped);

            std::vector<double> still;
            for (std::size_t i = 0; i < info.size(); ++i) {
                const double got = info[i] + static_cast<double>(bits) * stage_mi[i];
                if (got < required)
                    still.push_back(got);
            }
            info = std::move(still);
        }
        n_sent.push_back(bits);
        sent += bits;
    }
    return {StaticBitTable(std::move(n_sent)), clamped};
}

StaticTableScheme::StaticTableScheme(SchemeKind kind, StaticBitTable table, CodeSpec spec,
                                     int max_transmissions, bool budget_clamped)
    : kind_(kind), table_(std::move(table)), spec_(spec),
      max_transmissions_(std::min(max_transmissions, table_.size())),
      budget_clamped_(budget_clamped)
{
    if (max_transmissions_ < 1)
        throw ConfigError("at least one transmission is required");
}

std::int64_t StaticTableScheme::first_burst_bits() const
{
    return std::min(table_.n_sent().front(), spec_.mother_codeword_bits);
}

Feedback StaticTableScheme::on_failure(const CodewordState&) const
{
    return {};
}

std::optional<std::int64_t> StaticTableScheme::next_burst(const CodewordState& state,
                                                          const Feedback&) const
{
    const int j = state.transmission_count() + 1;
    if (j > max_transmissions_)
        return std::nullopt;
    const auto entry = next_burst_classical(table_, j);
    const std::int64_t remaining = spec_.mother_codeword_bits - state.n_total_sent;
    if (!entry || remaining <= 0)
        return std::nullopt;
    return std::min(*entry, remaining);
}

AdaptiveScheme::AdaptiveScheme(const DecodingProbTable& probs, const CodeSpec& spec,
                               const EmpiricalCdf& cdf, double es_n0_ref_linear,
                               const MiTable& table, int max_transmissions)
    : spec_(spec), max_transmissions_(std::min(max_transmissions, probs.size()))
{
    spec_.validate();
    if (max_transmissions_ < 1)
        throw ConfigError("at least one transmission is required");
    for (int j = 1; j <= max_transmissions_; ++j)
        stages_.push_back(mi_needed(cdf, conditional_prob(probs, j), es_n0_ref_linear, table));
    first_burst_ = *adaptive_bits_needed(CodewordState{}, spec_, stages_.front().mi_needed_per_bit);
}

Feedback AdaptiveScheme::on_failure(const CodewordState& state) const
{
    const int done = state.transmission_count();
    if (done >= max_transmissions_)
        return {};
    return {adaptive_bits_needed(state, spec_,
                                 stages_[static_cast<std::size_t>(done)].mi_needed_per_bit)};
}

std::optional<std::int64_t> AdaptiveScheme::next_burst(const CodewordState& state,
                                                       const Feedback& feedback) const
{
    if (state.transmission_count() >= max_transmissions_)
        return std::nullopt;
    return feedback.bits_requested;
}

std::unique_ptr<HarqScheme> make_scheme(SchemeKind kind, const SchemeInputs& in)
{
    switch (kind) {
    case SchemeKind::classical:
        return std::make_unique<StaticTableScheme>(kind, in.classical_table, in.spec,
                                                   in.max_transmissions);
    case SchemeKind::enhanced: {
        auto built = build_enhanced_table(in.cdf, in.probs, in.spec, in.es_n0_ref_linear, in.mi_table);
        return std::make_unique<StaticTableScheme>(kind, std::move(built.table), in.spec,
                                                   in.max_transmissions, built.budget_clamped);
    }
    case SchemeKind::adaptive:
        return std::make_unique<AdaptiveScheme>(in.probs, in.spec, in.cdf, in.es_n0_ref_linear,
                                                in.mi_table, in.max_transmissions);
    }
    throw ConfigError("unknown scheme");
}

} // namespace lmsharq
