#include "doctest.h"
#include "support.hpp"

#include "lmsharq/config.hpp"
#include "lmsharq/errors.hpp"
#include "lmsharq/metrics.hpp"
#include "lmsharq/sim_core.hpp"
#include "lmsharq/units.hpp"

#include <algorithm>
#include <cmath>

using namespace lmsharq;

namespace {

Environment its()
{
    return load_environment("its", support::data_dir());
}

SimConfig config_for(SchemeKind scheme, double es_n0_db, double duration_s = 600.0)
{
    SimConfig c;
    c.scheme = scheme;
    c.es_n0_ref_db = es_n0_db;
    c.duration_s = duration_s;
    return c;
}

struct Burst {
    double start;
    double airtime;
};

void check_link_invariants(const RunLog& log, const CodeSpec& spec, const MiTable& mi)
{
    const auto& cfg = log.config;
    std::vector<Burst> bursts;
    std::int64_t bits = 0;
    for (const auto& c : log.codewords) {
        const auto& tx = c.state.transmissions;
        REQUIRE(!tx.empty());
        REQUIRE(static_cast<int>(tx.size()) <= log.transmissions_allowed);
        std::int64_t sent = 0;
        double info = 0.0;
        for (std::size_t k = 0; k < tx.size(); ++k) {
            const double airtime = static_cast<double>(tx[k].bits) / cfg.bit_rate_bps;
            bursts.push_back({tx[k].start_time_s, airtime});
            if (k > 0) {
                const double prev_air = static_cast<double>(tx[k - 1].bits) / cfg.bit_rate_bps;
                REQUIRE(tx[k].start_time_s >= tx[k - 1].start_time_s + prev_air + cfg.rtt_s - 1e-9);
                // not decodable before this burst
                REQUIRE_FALSE(is_decodable(spec, sent, sent ? info / sent : 0.0));
            }
            sent += tx[k].bits;
            info += static_cast<double>(tx[k].bits) *
                    mi_of(mi, tx[k].rho * tx[k].rho * cfg.es_n0_ref_linear());
        }
        bits += sent;
        REQUIRE(sent == c.state.n_total_sent);
        REQUIRE(sent <= spec.mother_codeword_bits);
        const bool ok = is_decodable(spec, sent, info / sent);
        REQUIRE(ok == (c.status == CodewordStatus::decoded));
        if (c.status == CodewordStatus::failed)
            REQUIRE((static_cast<int>(tx.size()) == log.transmissions_allowed ||
                     sent == spec.mother_codeword_bits));
        if (c.status == CodewordStatus::decoded) {
            const double last_air = static_cast<double>(tx.back().bits) / cfg.bit_rate_bps;
            REQUIRE(c.state.decode_time_s.has_value());
            REQUIRE(*c.state.decode_time_s == doctest::Approx(tx.back().start_time_s + last_air + cfg.t_propag_s));
        }
    }
    CHECK(bits == log.total_bits);

    std::sort(bursts.begin(), bursts.end(), [](const Burst& a, const Burst& b) { return a.start < b.start; });
    double airtime = 0.0;
    for (std::size_t i = 0; i < bursts.size(); ++i) {
        airtime += bursts[i].airtime;
        if (i + 1 < bursts.size())
            REQUIRE(bursts[i].start + bursts[i].airtime <= bursts[i + 1].start + 1e-9);
    }
    CHECK(airtime <= cfg.duration_s + 1e-9);
    CHECK(bursts.back().start + bursts.back().airtime <= cfg.duration_s + 1e-9);
    CHECK(log.decoded + log.failed + log.incomplete == log.generated);
    CHECK(log.decoded <= log.generated);
}

} // namespace

TEST_CASE("config validation")
{
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.rtt_s = 0.6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = SimConfig{};
    c.symbol_time_s = 2e-6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = SimConfig{};
    c.duration_s = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("clear sky: every codeword decodes at the first transmission")
{
    const auto& mi = support::mi_table();
    const auto spec = support::code();
    const auto log = run(config_for(SchemeKind::adaptive, 10.0, 60.0), Environment::clear_sky(), spec, mi);
    REQUIRE(log.generated > 0);
    CHECK(log.decoded == log.generated);
    for (const auto& c : log.codewords)
        REQUIRE(c.state.transmission_count() == 1);
    const auto h = decode_histogram(log);
    CHECK(h.per_transmission[0] == 1.0);
    CHECK(h.wer == 0.0);
}

TEST_CASE("link and decoding invariants on the ITS channel")
{
    const auto& mi = support::mi_table();
    const auto spec = support::code();
    const auto env = its();
    for (auto scheme : {SchemeKind::classical, SchemeKind::enhanced, SchemeKind::adaptive}) {
        for (double db : {7.0, 13.0}) {
            CAPTURE(to_string(scheme));
            CAPTURE(db);
            const auto log = run(config_for(scheme, db), env, spec, mi);
            check_link_invariants(log, spec, mi);
            // small residual error rate from 7 dB up
            CHECK(decode_histogram(log).wer <= 1e-2);
        }
    }
}

TEST_CASE("classical run keeps the link busy")
{
    const auto& mi = support::mi_table();
    const auto spec = support::code();
    const auto log = run(config_for(SchemeKind::classical, 10.0), its(), spec, mi);
    const double capacity = 600.0 * 5e5;
    CHECK(static_cast<double>(log.total_bits) <= capacity);
    CHECK(capacity - static_cast<double>(log.total_bits) < 13380.0);
}

TEST_CASE("adaptive case 3 at 7 dB follows the probability table")
{
    const auto& mi = support::mi_table();
    const auto spec = support::code();
    const auto log = run(config_for(SchemeKind::adaptive, 7.0), its(), spec, mi);
    const auto h = decode_histogram(log);
    REQUIRE(h.resolved >= 2000);
    const double target[] = {0.5, 0.3, 0.1, 0.0999};
    for (std::size_t j = 0; j < 4; ++j) {
        CAPTURE(j);
        CHECK(std::abs(h.per_transmission[j] - target[j]) <= 0.05);
    }
}

TEST_CASE("determinism, seeds and sweeps")
{
    const auto& mi = support::mi_table();
    const auto spec = support::code();
    const auto env = its();
    const auto cfg = config_for(SchemeKind::adaptive, 10.0, 120.0);
    const auto a = run(cfg, env, spec, mi);
    const auto b = run(cfg, env, spec, mi);
    REQUIRE(a.codewords.size() == b.codewords.size());
    bool same = true;
    for (std::size_t i = 0; i < a.codewords.size(); ++i)
        same = same && a.codewords[i].state.n_total_sent == b.codewords[i].state.n_total_sent &&
               a.codewords[i].state.mi_acc_per_bit == b.codewords[i].state.mi_acc_per_bit;
    CHECK(same);

    auto other = cfg;
    other.seed = 2;
    const auto c = run(other, env, spec, mi);
    CHECK(efficiency(c, spec) != efficiency(a, spec));
    for (const auto* log : {&a, &c})
        CHECK(decode_histogram(*log).wer <= 1e-2);

    const double db[] = {10.0};
    const SchemeKind schemes[] = {SchemeKind::adaptive};
    const std::uint64_t seeds[] = {1};
    const auto single = sweep(cfg, db, schemes, seeds, env, spec, mi, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].total_bits == a.total_bits);
    CHECK(single[0].decoded == a.decoded);

    const double grid[] = {7.0, 13.0};
    const SchemeKind all[] = {SchemeKind::classical, SchemeKind::adaptive};
    const std::uint64_t two[] = {1, 2};
    const auto serial = sweep(cfg, grid, all, two, env, spec, mi, 1);
    const auto parallel = sweep(cfg, grid, all, two, env, spec, mi, 3);
    REQUIRE(serial.size() == 8);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].total_bits == parallel[i].total_bits);
        CHECK(serial[i].decoded == parallel[i].decoded);
    }
    // nesting order: scheme, Es/N0, seed
    CHECK(serial[0].config.scheme == SchemeKind::classical);
    CHECK(serial[1].config.seed == 2);
    CHECK(serial[2].config.es_n0_ref_db == 13.0);
    CHECK(serial[4].config.scheme == SchemeKind::adaptive);

    CHECK_THROWS_AS(sweep(cfg, std::span<const double>{}, all, two, env, spec, mi), ConfigError);
}

TEST_CASE("series shorter than the run is rejected")
{
    const auto& mi = support::mi_table();
    const auto spec = support::code();
    const auto series = AttenuationSeries::constant(10.0, 0.01, 1.0);
    const auto cdf = empirical_cdf(series);
    CHECK_THROWS_AS(run_on_channel(config_for(SchemeKind::adaptive, 10.0, 60.0), series, cdf, spec, mi),
                    DataError);
}
