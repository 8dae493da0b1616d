#include <cmath>

#include "cseg/errors.hpp"
#include "cseg/harness.hpp"
#include "cseg/morphology.hpp"
#include "cseg/rng.hpp"

namespace cseg {

void validate(const SynthConfig& cfg) {
  if (cfg.disks_min < 0 || cfg.disks_max < cfg.disks_min) throw ConfigError("bad disk-count range");
  if (!(cfg.radius_min >= 0.0) || !(cfg.radius_max >= cfg.radius_min)) throw ConfigError("bad radius range");
  if (!(cfg.noise_amplitude >= 0.0) || !std::isfinite(cfg.noise_amplitude)) {
    throw ConfigError("noise_amplitude must be finite and non-negative");
  }
  if (!(cfg.correlation_length >= 0.0) || cfg.correlation_length > 1e4) {
    throw ConfigError("correlation_length must lie in [0, 1e4]");
  }
  if (!std::isfinite(cfg.link_sharpness)) throw ConfigError("link_sharpness must be finite");
}

namespace {

constexpr std::uint64_t kSynthStream = 0x53594E5448ULL;

std::vector<double> gaussian_kernel(double sigma) {
  if (sigma <= 0.0) return {1.0};
  const auto radius = static_cast<std::int64_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  for (std::int64_t i = -radius; i <= radius; ++i) {
    const auto x = static_cast<double>(i);
    k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * x * x / (sigma * sigma));
  }
  return k;
}

// Unit-variance stationary field: white noise on a padded canvas, separable
// Gaussian smoothing, crop of the fully supported region.
std::vector<double> smooth_noise(Rng& rng, const GridDims& dims, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const auto radius = static_cast<std::int64_t>(kernel.size() / 2);
  const auto h = dims.height();
  const auto w = dims.width();
  const auto ph = h + 2 * radius;
  const auto pw = w + 2 * radius;
  std::vector<double> white(static_cast<std::size_t>(ph * pw));
  for (auto& x : white) x = rng.normal();

  // Rows first: (ph x w), then columns: (h x w).
  std::vector<double> pass(static_cast<std::size_t>(ph * w), 0.0);
  for (std::int64_t r = 0; r < ph; ++r) {
    for (std::int64_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::int64_t k = 0; k < static_cast<std::int64_t>(kernel.size()); ++k) {
        acc += kernel[static_cast<std::size_t>(k)] * white[static_cast<std::size_t>(r * pw + c + k)];
      }
      pass[static_cast<std::size_t>(r * w + c)] = acc;
    }
  }
  double energy = 0.0;
  for (const double k : kernel) energy += k * k;
  // Variance of the 2D separable filter output is energy^2.
  const double scale = 1.0 / energy;
  std::vector<double> out(dims.size(), 0.0);
  for (std::int64_t r = 0; r < h; ++r) {
    for (std::int64_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::int64_t k = 0; k < static_cast<std::int64_t>(kernel.size()); ++k) {
        acc += kernel[static_cast<std::size_t>(k)] * pass[static_cast<std::size_t>((r + k) * w + c)];
      }
      out[static_cast<std::size_t>(r * w + c)] = acc * scale;
    }
  }
  return out;
}

CalibrationRecord generate_one(const SynthConfig& cfg, std::size_t index) {
  Rng rng(derive_seed(derive_seed(cfg.seed, kSynthStream), index));
  const auto& dims = cfg.dims;
  const auto h = static_cast<double>(dims.height());
  const auto w = static_cast<double>(dims.width());

  struct Disk {
    double row, col, radius;
  };
  std::vector<Disk> disks;
  const auto count = rng.uniform_int(cfg.disks_min, cfg.disks_max);
  for (std::int64_t i = 0; i < count; ++i) {
    const double row = rng.uniform(0.0, h);
    const double col = rng.uniform(0.0, w);
    const double radius = rng.uniform(cfg.radius_min, cfg.radius_max);
    disks.push_back({row, col, radius});
  }
  std::vector<std::uint8_t> bits(dims.size(), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const auto p = dims.decode(i);
    for (const auto& d : disks) {
      const double dr = static_cast<double>(p.row) - d.row;
      const double dc = static_cast<double>(p.col) - d.col;
      if (dr * dr + dc * dc <= d.radius * d.radius) {
        bits[i] = 1;
        break;
      }
    }
  }
  LabelMask truth(dims, std::move(bits));

  const auto distance = signed_distance_transform(truth, Metric::Euclidean);
  const auto noise = smooth_noise(rng, dims, cfg.correlation_length);
  std::vector<double> logits(dims.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = cfg.link_sharpness * distance[i] + cfg.noise_amplitude * noise[i];
    logits[i] = static_cast<double>(static_cast<float>(x));
  }
  return {ScoreImage(dims, std::move(logits)), std::move(truth), std::nullopt};
}

}  // namespace

std::vector<CalibrationRecord> synth_generate(const SynthConfig& cfg) {
  validate(cfg);
  std::vector<CalibrationRecord> out;
  out.reserve(cfg.n_images);
  for (std::size_t i = 0; i < cfg.n_images; ++i) out.push_back(generate_one(cfg, i));
  return out;
}

}  // namespace cseg
