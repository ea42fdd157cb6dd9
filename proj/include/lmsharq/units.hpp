#pragma once

#include <cmath>

namespace lmsharq {

inline constexpr int kQpskBitsPerSymbol = 2;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

// Amplitude (voltage) ratios, used for the attenuation coefficient rho.
inline double amplitude_to_db(double amplitude) { return 20.0 * std::log10(amplitude); }
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

} // namespace lmsharq
