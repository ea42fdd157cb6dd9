#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace lmsharq {

/// Loo distribution: log-normal direct ray plus Rayleigh diffuse multipath,
/// all levels relative to line of sight.
struct LooParams {
    double alpha_db = 0.0;
    double psi_db = 1.0;
    double mp_db = -20.0;
};

using TransitionMatrix = std::array<std::array<double, 3>, 3>;

struct LmsModel {
    std::string name;
    std::array<LooParams, 3> states{};
    TransitionMatrix transitions{};
    double state_frame_m = 5.0;
    double sample_frame_m = 0.1;
    double speed_mps = 60.0 / 3.6;
    // When unset the chain starts from its stationary distribution.
    std::optional<int> initial_state;

    /// Throws ModelError on a non-stochastic matrix, psi <= 0, a sample frame
    /// longer than the state frame, or non-positive lengths/speed.
    void validate() const;

    double state_epoch_s() const { return state_frame_m / speed_mps; }
    double sample_period_s() const { return sample_frame_m / speed_mps; }
};

/// Parses the key/value (INI) model file. Sections: [model], [state1..3],
/// [transitions] with row1..row3 as whitespace-separated probabilities.
LmsModel parse_lms_model(std::istream& in);
LmsModel load_lms_model(const std::string& path);

/// Left eigenvector of the transition matrix for eigenvalue 1, normalised.
std::array<double, 3> stationary_distribution(const TransitionMatrix& transitions);

struct LooDraw {
    double direct_amplitude;
    double rho;
};

class LooSampler {
public:
    explicit LooSampler(const LooParams& params);

    template <class Rng>
    LooDraw draw(Rng& rng)
    {
        const double direct = std::pow(10.0, (alpha_db_ + psi_db_ * gauss_(rng)) / 20.0);
        const double re = direct + diffuse_sigma_ * gauss_(rng);
        const double im = diffuse_sigma_ * gauss_(rng);
        return {direct, std::hypot(re, im)};
    }

private:
    double alpha_db_;
    double psi_db_;
    double diffuse_sigma_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

struct AttenuationSample {
    double time_s;
    double rho;       // amplitude attenuation, 1.0 = clear sky
    double direct_db; // direct-ray level of this draw
    int state;        // 0-based Markov state, -1 when not model generated
};

class AttenuationSeries {
public:
    AttenuationSeries(std::vector<AttenuationSample> samples, double period_s);

    /// Constant attenuation over [0, duration_s] at the given cadence.
    static AttenuationSeries constant(double duration_s, double period_s, double rho);

    std::span<const AttenuationSample> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double period_s() const { return period_s_; }
    /// Time up to which the series provides coverage.
    double end_time_s() const { return samples_.back().time_s + period_s_; }

    /// Sample in effect at time t (zero-order hold). Throws DataError for t
    /// outside [0, end_time_s).
    double rho_at(double time_s) const;

private:
    std::vector<AttenuationSample> samples_;
    double period_s_;
};

/// Markov state redrawn every state epoch; each sample within an epoch is an
/// independent Loo draw of the current state. Deterministic per seed.
AttenuationSeries generate_series(const LmsModel& model, double duration_s, std::uint64_t seed);

/// CSV columns: time_s,rho_db,state
void write_series_csv(const AttenuationSeries& series, std::ostream& out);

class EmpiricalCdf {
public:
    /// Throws DataError when empty.
    explicit EmpiricalCdf(std::vector<double> rho);

    std::span<const double> sorted() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }
    double min() const { return sorted_.front(); }
    double max() const { return sorted_.back(); }
    bool degenerate() const { return sorted_.front() == sorted_.back(); }

    /// Fraction of samples <= rho.
    double eval(double rho) const;

    /// Smallest sample whose CDF value reaches q. Throws DomainError for q
    /// outside [0, 1].
    double quantile(double q) const;

private:
    std::vector<double> sorted_;
};

/// Throws DataError for an empty series.
EmpiricalCdf empirical_cdf(const AttenuationSeries& series);

inline double quantile(const EmpiricalCdf& cdf, double q) { return cdf.quantile(q); }

/// CSV columns: rho_db,cdf; `points` evenly spaced quantiles.
void write_cdf_csv(const EmpiricalCdf& cdf, std::ostream& out, int points = 1001);

} // namespace lmsharq
