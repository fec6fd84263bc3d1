#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cipher/ingest.hpp"

namespace cipher {

/// Ground-truth families embedded by the generator.
enum class EventFamily : int {
  kCmeLike = 0,  // density ramp-and-decay, speed jump
  kSirLike = 1,  // speed ramp, density compression bump
};

struct SyntheticParams {
  std::size_t events_per_family = 60;
  std::size_t window_samples = 128;
  std::int64_t cadence = 60;
  UtcSeconds start = 1609459200;  // 2021-01-01T00:00:00Z
  double density_noise = 1.0;
  double speed_noise = 10.0;
  /// Fraction of samples replaced by the channel's fill sentinel.
  double fill_fraction = 0.01;
  std::uint64_t seed = 20211103;
};

inline constexpr double kSyntheticSpeedFill = 9999.9;
inline constexpr double kSyntheticDensityFill = 999.99;

/// Two channels (speed, density) holding one event per window-length slot,
/// families interleaved in seeded random order over Gaussian noise.
struct SyntheticDataset {
  std::vector<TimeSeries> channels;   // speed, density
  std::vector<EventFamily> truth;     // one per slot; slot k starts at sample k * window_samples
};

SyntheticDataset generate_synthetic(const SyntheticParams& params);

/// OMNI-style rows "YYYY DOY HH MM speed density"; missing samples are written
/// as the fill sentinel. Speed is column 4, density column 5.
void write_omni_table(std::ostream& out, const SyntheticDataset& data);

}  // namespace cipher
