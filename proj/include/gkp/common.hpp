#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace gkp {

using cplx = std::complex<double>;
using Rng = std::mt19937_64;

inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kTwoSqrtPi = 3.5449077018110320546;
// Hexagonal stabilizer exponent magnitude: lattice cell area 4*pi.
inline const double kHexStabAmplitude = 2.0 * std::sqrt(2.0 * M_PI / std::sqrt(3.0));
// Half of the above; kept for reference as an alternate convention that does
// not satisfy stabilizer commutation.
inline const double kHexStabAmplitudeAlt = kSqrtPi * std::sqrt(2.0 / std::sqrt(3.0));

// Amplitude convention: r = dB * ln(10) / 20.
inline double squeezing_db_to_r(double db) { return db * std::log(10.0) / 20.0; }
inline double kappa_from_db(double db) { return std::exp(-squeezing_db_to_r(db)); }

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct ProtocolError : Error {
  using Error::Error;
};
struct StepSizeError : Error {
  using Error::Error;
};
struct TruncationError : Error {
  TruncationError(const std::string& what, double leaked_)
      : Error(what), leaked(leaked_) {}
  double leaked = 0;
};

// Counter-based stream splitting: trajectory RNGs depend only on
// (master_seed, index), independent of thread scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline Rng make_stream_rng(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t s = splitmix64(master_seed ^ splitmix64(index + 1));
  return Rng(s);
}

}  // namespace gkp
