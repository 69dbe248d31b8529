#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "crossdecode/errors.hpp"
#include "crossdecode/preprocess.hpp"

namespace crossdecode {
namespace {

using cplx = std::complex<double>;

cplx section_response(const Biquad& s, cplx z_inv) {
  const cplx num = s.b0 + z_inv * (s.b1 + z_inv * s.b2);
  const cplx den = 1.0 + z_inv * (s.a1 + z_inv * s.a2);
  return num / den;
}

// Direct form II transposed.
void run_section(const Biquad& s, std::span<double> x) {
  double z1 = 0.0;
  double z2 = 0.0;
  for (double& v : x) {
    const double in = v;
    const double out = s.b0 * in + z1;
    z1 = s.b1 * in - s.a1 * out + z2;
    z2 = s.b2 * in - s.a2 * out;
    v = out;
  }
}

}  // namespace

BandpassFilter BandpassFilter::design(Band band, double fs, int order) {
  if (!(fs > 0.0) || !(band.low > 0.0) || !(band.low < band.high) || !(band.high < fs / 2.0))
    throw ConfigError(fmt::format("band {}:{} Hz outside (0, fs/2 = {})", band.low, band.high, fs / 2.0));
  if (order < 1) throw ConfigError(fmt::format("filter order must be >= 1, got {}", order));

  const double k = 2.0 * fs;
  const double w_low = k * std::tan(std::numbers::pi * band.low / fs);
  const double w_high = k * std::tan(std::numbers::pi * band.high / fs);
  const double w0_sq = w_low * w_high;
  const double bw = w_high - w_low;
  const double centre = 2.0 * std::atan(std::sqrt(w0_sq) / k);
  const cplx z_inv_centre = std::polar(1.0, -centre);

  auto to_z = [k](cplx s) { return (k + s) / (k - s); };
  // Each section takes a pole pair closed under conjugation and one zero at z = 1 and z = -1.
  std::vector<Biquad> sections;
  sections.reserve(order);
  auto add_section = [&](cplx z1, cplx z2) {
    Biquad sec{1.0, 0.0, -1.0, -(z1 + z2).real(), (z1 * z2).real()};
    const double gain = std::abs(section_response(sec, z_inv_centre));
    sec.b0 /= gain;
    sec.b2 /= gain;
    sections.push_back(sec);
  };

  // Prototype poles exp(i*pi*(2j + order - 1) / (2 order)), j = 1..order; only the upper half
  // plane is visited, conjugates are implied. Each maps to the two roots of s^2 - p*bw*s + w0^2.
  for (int j = 1; j <= order; ++j) {
    const cplx p = std::polar(1.0, std::numbers::pi * (2.0 * j + order - 1.0) / (2.0 * order));
    const cplx pb = p * bw;
    const cplx disc = std::sqrt(pb * pb - 4.0 * w0_sq);
    const cplx s1 = (pb + disc) / 2.0;
    const cplx s2 = (pb - disc) / 2.0;
    if (std::abs(p.imag()) <= 1e-12) {
      add_section(to_z(s1), to_z(s2));
    } else if (p.imag() > 0.0) {
      add_section(to_z(s1), std::conj(to_z(s1)));
      add_section(to_z(s2), std::conj(to_z(s2)));
    }
  }
  return BandpassFilter(std::move(sections), band, fs);
}

double BandpassFilter::magnitude(double freq_hz) const {
  const cplx z_inv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / fs_);
  cplx h = 1.0;
  for (const auto& s : sections_) h *= section_response(s, z_inv);
  return std::abs(h);
}

void BandpassFilter::filter(std::span<const double> in, std::span<double> out) const {
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  for (const auto& s : sections_) run_section(s, out);
}

void BandpassFilter::filter_zero_phase(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = in.size();
  if (n == 0) return;
  const std::size_t pad = std::min<std::size_t>(pad_length(), n - 1);

  // Whole-sample even reflection: x[-k] = x[k], x[n-1+k] = x[n-1-k].
  std::vector<double> work(n + 2 * pad);
  for (std::size_t k = 0; k < pad; ++k) work[k] = in[pad - k];
  std::copy(in.begin(), in.end(), work.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t k = 0; k < pad; ++k) work[pad + n + k] = in[n - 2 - k];

  for (const auto& s : sections_) run_section(s, work);
  std::reverse(work.begin(), work.end());
  for (const auto& s : sections_) run_section(s, work);
  std::reverse(work.begin(), work.end());

  std::copy_n(work.begin() + static_cast<std::ptrdiff_t>(pad), n, out.begin());
}

Epoch bandpass(const Epoch& epoch, Band band) {
  return bandpass(epoch, BandpassFilter::design(band, epoch.fs()));
}

Epoch bandpass(const Epoch& epoch, const BandpassFilter& filter) {
  if (filter.fs() != epoch.fs())
    throw ConfigError(fmt::format("filter designed for {} Hz applied to {} Hz epoch", filter.fs(), epoch.fs()));
  SignalMatrix out(epoch.channels(), epoch.samples());
  for (int c = 0; c < epoch.channels(); ++c) {
    std::span<double> row(out.data() + static_cast<std::ptrdiff_t>(c) * out.cols(),
                          static_cast<std::size_t>(out.cols()));
    filter.filter_zero_phase(epoch.channel(c), row);
  }
  return Epoch(std::move(out), epoch.fs());
}

Epoch common_average_reference(const Epoch& epoch) {
  SignalMatrix out = epoch.data();
  const Eigen::RowVectorXd mean = out.colwise().mean();
  out.rowwise() -= mean;
  return Epoch(std::move(out), epoch.fs());
}

}  // namespace crossdecode
