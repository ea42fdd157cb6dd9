#include "doctest.h"
#include "support.hpp"

#include "lmsharq/errors.hpp"
#include "lmsharq/lms_channel.hpp"
#include "lmsharq/units.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

using namespace lmsharq;

namespace {

LmsModel its_model()
{
    return load_lms_model((support::data_dir() / "environments" / "its.ini").string());
}

LmsModel single_state(int k)
{
    auto m = its_model();
    m.transitions = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    m.initial_state = k;
    return m;
}

// Loo envelope drawn directly from its definition with an unrelated engine.
std::vector<double> loo_reference(const LooParams& p, std::size_t n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const double sigma = std::sqrt(std::pow(10.0, p.mp_db / 10.0) / 2.0);
    std::vector<double> out(n);
    for (auto& r : out) {
        const double direct_db = p.alpha_db + p.psi_db * g(rng);
        const std::complex<double> direct = std::polar(std::pow(10.0, direct_db / 20.0), 0.0);
        r = std::abs(direct + std::complex<double>{sigma * g(rng), sigma * g(rng)});
    }
    return out;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

} // namespace

TEST_CASE("model files")
{
    const auto its = its_model();
    CHECK(its.name == "its");
    CHECK(its.speed_mps == doctest::Approx(60.0 / 3.6));
    CHECK_NOTHROW(its.validate());
    CHECK_NOTHROW(load_lms_model((support::data_dir() / "environments" / "open.ini").string()));

    CHECK_THROWS_AS(load_lms_model("/nonexistent/model.ini"), ConfigError);

    const std::string base = "[model]\nname = x\n[state1]\nalpha_db=0\npsi_db=1\nmp_db=-20\n"
                             "[state2]\nalpha_db=-5\npsi_db=1\nmp_db=-20\n"
                             "[state3]\nalpha_db=-10\npsi_db=1\nmp_db=-20\n";
    std::istringstream ok(base + "[transitions]\nrow1=1 0 0\nrow2=0 1 0\nrow3=0 0 1\n");
    const auto m = parse_lms_model(ok);
    CHECK(m.state_frame_m == 5.0);
    CHECK(m.sample_frame_m == 0.1);

    std::istringstream missing_row(base + "[transitions]\nrow1=1 0 0\nrow2=0 1 0\n");
    CHECK_THROWS_AS(parse_lms_model(missing_row), ConfigError);
    std::istringstream not_stochastic(base + "[transitions]\nrow1=0.5 0 0\nrow2=0 1 0\nrow3=0 0 1\n");
    CHECK_THROWS_AS(parse_lms_model(not_stochastic), ModelError);
    std::istringstream negative(base + "[transitions]\nrow1=1.5 -0.5 0\nrow2=0 1 0\nrow3=0 0 1\n");
    CHECK_THROWS_AS(parse_lms_model(negative), ModelError);

    auto bad = its;
    bad.states[1].psi_db = 0.0;
    CHECK_THROWS_AS(bad.validate(), ModelError);
    bad = its;
    bad.sample_frame_m = 2.0 * bad.state_frame_m;
    CHECK_THROWS_AS(bad.validate(), ModelError);
}

TEST_CASE("600 s at 60 km/h covers 10 km")
{
    const auto s = generate_series(its_model(), 600.0, 3);
    const auto m = its_model();
    CHECK(s.end_time_s() >= 600.0);
    CHECK(s.end_time_s() * m.speed_mps == doctest::Approx(10000.0).epsilon(1e-4));
    CHECK(s.period_s() == doctest::Approx(m.sample_frame_m / m.speed_mps));
    for (std::size_t i = 1; i < s.size(); ++i)
        REQUIRE(s.samples()[i].time_s > s.samples()[i - 1].time_s);
    CHECK(std::all_of(s.samples().begin(), s.samples().end(), [](const auto& x) { return x.rho > 0.0; }));
}

TEST_CASE("seeded reproducibility")
{
    const auto a = generate_series(its_model(), 50.0, 11);
    const auto b = generate_series(its_model(), 50.0, 11);
    const auto c = generate_series(its_model(), 50.0, 12);
    REQUIRE(a.size() == b.size());
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same = same && a.samples()[i].rho == b.samples()[i].rho && a.samples()[i].state == b.samples()[i].state;
        differs = differs || a.samples()[i].rho != c.samples()[i].rho;
    }
    CHECK(same);
    CHECK(differs);
    CHECK_THROWS_AS(generate_series(its_model(), 0.0, 1), DomainError);
}

TEST_CASE("absorbing state keeps its Loo parameters")
{
    for (int k = 0; k < 3; ++k) {
        CAPTURE(k);
        const auto model = single_state(k);
        const auto s = generate_series(model, 600.0, 21 + k);
        double mean_direct = 0.0;
        bool stayed = true;
        for (const auto& x : s.samples()) {
            stayed = stayed && x.state == k;
            mean_direct += x.direct_db;
        }
        mean_direct /= static_cast<double>(s.size());
        CHECK(stayed);
        CHECK(std::abs(mean_direct - model.states[static_cast<std::size_t>(k)].alpha_db) <= 0.2);
    }
}

TEST_CASE("state occupancy follows the stationary distribution")
{
    const auto model = its_model();
    const auto pi = stationary_distribution(model.transitions);
    CHECK(pi[0] + pi[1] + pi[2] == doctest::Approx(1.0));
    // pi P = pi
    for (std::size_t j = 0; j < 3; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            v += pi[i] * model.transitions[i][j];
        CHECK(v == doctest::Approx(pi[j]).epsilon(1e-12));
    }

    const double duration = 6000.0;
    REQUIRE(duration / model.state_epoch_s() >= 1e4);
    const auto s = generate_series(model, duration, 99);
    std::array<double, 3> count{};
    for (const auto& x : s.samples())
        count[static_cast<std::size_t>(x.state)] += 1.0;
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(std::abs(count[j] / static_cast<double>(s.size()) - pi[j]) <= 0.02);
}

TEST_CASE("per-state envelopes pass a two-sample KS test")
{
    const auto model = its_model();
    const auto s = generate_series(model, 3000.0, 5);
    std::array<std::vector<double>, 3> by_state;
    for (const auto& x : s.samples())
        by_state[static_cast<std::size_t>(x.state)].push_back(x.rho);
    for (std::size_t k = 0; k < 3; ++k) {
        CAPTURE(k);
        auto& got = by_state[k];
        REQUIRE(got.size() > 1000);
        const auto ref = loo_reference(model.states[k], 200000, 1234u + static_cast<unsigned>(k));
        const double n = static_cast<double>(got.size());
        const double m = static_cast<double>(ref.size());
        const double critical = 1.628 * std::sqrt((n + m) / (n * m)); // alpha = 0.01
        CHECK(ks_statistic(got, ref) < critical);
    }
}

TEST_CASE("empirical CDF and quantile")
{
    SUBCASE("constant series is a step at 1")
    {
        const auto cdf = empirical_cdf(AttenuationSeries::constant(10.0, 0.01, 1.0));
        CHECK(cdf.degenerate());
        CHECK(cdf.eval(0.999) == 0.0);
        CHECK(cdf.eval(1.0) == 1.0);
        CHECK(cdf.quantile(0.3) == 1.0);
    }
    SUBCASE("brute-force quantile oracle")
    {
        const auto cdf = empirical_cdf(generate_series(its_model(), 600.0, 8));
        const auto sorted = cdf.sorted();
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> uq(0.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            const double q = uq(rng);
            const double x = cdf.quantile(q);
            const auto count = std::count_if(sorted.begin(), sorted.end(), [&](double v) { return v <= x; });
            const double frac = static_cast<double>(count) / static_cast<double>(sorted.size());
            REQUIRE(frac >= q - 0.01);
            REQUIRE(frac <= q + 0.01);
            // round trip
            REQUIRE(cdf.eval(x) >= q);
            const auto below = std::lower_bound(sorted.begin(), sorted.end(), x);
            if (below != sorted.begin())
                REQUIRE(cdf.eval(*(below - 1)) < q);
        }
        CHECK(cdf.quantile(0.0) == cdf.min());
        CHECK(cdf.quantile(1.0) == cdf.max());
        const double median = sorted[sorted.size() / 2];
        CHECK(std::abs(cdf.eval(median) - 0.5) <= 1.0 / static_cast<double>(sorted.size()) + 1e-12);
        CHECK(amplitude_to_db(cdf.min()) < 0.0);
        CHECK_THROWS_AS(cdf.quantile(1.5), DomainError);
        CHECK_THROWS_AS(cdf.quantile(-0.1), DomainError);
    }
    SUBCASE("its fades deeper than open")
    {
        const auto open = load_lms_model((support::data_dir() / "environments" / "open.ini").string());
        const auto a = empirical_cdf(generate_series(its_model(), 600.0, 2));
        const auto b = empirical_cdf(generate_series(open, 600.0, 2));
        CHECK(a.quantile(0.1) < b.quantile(0.1));
        CHECK(a.quantile(0.5) < b.quantile(0.5));
    }
    CHECK_THROWS_AS(EmpiricalCdf(std::vector<double>{}), DataError);
}

TEST_CASE("series accessors and CSV")
{
    const auto s = AttenuationSeries::constant(1.0, 0.25, 0.5);
    CHECK(s.size() == 5);
    CHECK(s.rho_at(0.0) == 0.5);
    CHECK(s.rho_at(1.2) == 0.5);
    CHECK_THROWS_AS(s.rho_at(1.25), DataError);
    CHECK_THROWS_AS(s.rho_at(-0.1), DataError);
    CHECK_THROWS_AS(AttenuationSeries({}, 0.1), DataError);
    CHECK_THROWS_AS(AttenuationSeries({{0.0, 1.0, 0.0, -1}, {0.0, 1.0, 0.0, -1}}, 0.1), DataError);
    CHECK_THROWS_AS(AttenuationSeries({{0.0, 0.0, 0.0, -1}}, 0.1), DataError);

    std::ostringstream out;
    write_series_csv(s, out);
    CHECK(out.str().rfind("time_s,rho_db,state\n", 0) == 0);
    std::ostringstream cdf_out;
    write_cdf_csv(empirical_cdf(s), cdf_out, 3);
    CHECK(cdf_out.str() == "rho_db,cdf\n-6.0206,1\n-6.0206,1\n-6.0206,1\n");
}
