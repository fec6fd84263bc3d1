#include "cipher/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "cipher/error.hpp"

namespace cipher {

namespace {

// Box-Muller over the raw engine so the stream does not depend on the
// standard library's distribution implementations.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

  double uniform() {
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

double ramp_and_decay(double t, double onset, double rise, double tau) {
  if (t < onset) return 0.0;
  if (t < onset + rise) return (t - onset) / rise;
  return std::exp(-(t - onset - rise) / tau);
}

double smoothstep_ramp(double t, double onset, double duration) {
  const double x = std::clamp((t - onset) / duration, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticParams& params) {
  if (params.window_samples < 8) throw InvalidArgument("window_samples must be >= 8");
  Gaussian g(params.seed);

  const std::size_t slots = 2 * params.events_per_family;
  std::vector<EventFamily> order(slots);
  for (std::size_t k = 0; k < slots; ++k) {
    order[k] = k < params.events_per_family ? EventFamily::kCmeLike : EventFamily::kSirLike;
  }
  // Fisher-Yates with the portable draw.
  for (std::size_t k = slots; k > 1; --k) {
    const auto j = static_cast<std::size_t>(g.uniform() * static_cast<double>(k));
    std::swap(order[k - 1], order[std::min(j, k - 1)]);
  }

  const std::size_t len = slots * params.window_samples;
  TimeSeries speed;
  speed.channel = ChannelSpec{"speed", "km/s", 4, {kSyntheticSpeedFill}};
  TimeSeries density;
  density.channel = ChannelSpec{"density", "n/cc", 5, {kSyntheticDensityFill}};
  for (TimeSeries* ts : {&speed, &density}) {
    ts->start = params.start;
    ts->cadence = params.cadence;
    ts->values.resize(len);
    ts->missing.assign(len, 0);
  }

  const double n = static_cast<double>(params.window_samples);
  for (std::size_t k = 0; k < slots; ++k) {
    const double amp = 1.0 + 0.2 * (2.0 * g.uniform() - 1.0);
    const double jitter = 0.03 * (2.0 * g.uniform() - 1.0);
    for (std::size_t i = 0; i < params.window_samples; ++i) {
      const double t = static_cast<double>(i) / n;
      double v = 400.0;
      double rho = 5.0;
      if (order[k] == EventFamily::kCmeLike) {
        const double onset = 0.2 + jitter;
        rho += 15.0 * amp * ramp_and_decay(t, onset, 0.05, 0.15);
        v += t >= onset ? 200.0 * amp * (1.0 - 0.6 * (t - onset)) : 0.0;
      } else {
        const double onset = 0.3 + jitter;
        v += 250.0 * amp * smoothstep_ramp(t, onset, 0.4) - 50.0;
        const double z = (t - onset - 0.1) / 0.05;
        rho += 10.0 * amp * std::exp(-0.5 * z * z);
      }
      const std::size_t s = k * params.window_samples + i;
      speed.values[s] = v + params.speed_noise * g.normal();
      density.values[s] = rho + params.density_noise * g.normal();
    }
  }

  for (TimeSeries* ts : {&speed, &density}) {
    for (std::size_t s = 0; s < len; ++s) {
      if (g.uniform() < params.fill_fraction) {
        ts->values[s] = ts->channel.fill_values.front();
        ts->missing[s] = 1;
      }
    }
  }

  SyntheticDataset out;
  out.channels.push_back(std::move(speed));
  out.channels.push_back(std::move(density));
  out.truth = std::move(order);
  return out;
}

void write_omni_table(std::ostream& out, const SyntheticDataset& data) {
  using namespace std::chrono;
  const auto& speed = data.channels.at(0);
  const auto& density = data.channels.at(1);
  char buf[96];
  for (std::size_t s = 0; s < speed.size(); ++s) {
    const UtcSeconds t = speed.time_at(s);
    const sys_days day{std::chrono::days{t / 86400}};
    const year_month_day ymd{day};
    const auto jan1 = sys_days{ymd.year() / January / 1};
    const int doy = static_cast<int>((day - jan1).count()) + 1;
    const int sod = static_cast<int>(t % 86400);
    std::snprintf(buf, sizeof buf, "%04d %03d %02d %02d %8.1f %7.2f\n",
                  static_cast<int>(ymd.year()), doy, sod / 3600, sod % 3600 / 60,
                  speed.values[s], density.values[s]);
    out << buf;
  }
}

}  // namespace cipher
