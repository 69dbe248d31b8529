#include "crossdecode/epo1.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string_view>

#include "crossdecode/errors.hpp"

namespace crossdecode {
namespace {

constexpr std::string_view kMagic = "EPO1";

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { bytes_.reserve(reserve); }

  template <typename T>
  void put_le(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    const auto bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i)
      bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }

  void put_string(std::string_view s) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max())
      throw InputError(fmt::format("string of {} bytes exceeds the u16 length field", s.size()));
    put_le(static_cast<std::uint16_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }

  void put_raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t offset() const noexcept { return pos_; }
  std::uint64_t remaining() const noexcept { return bytes_.size() - pos_; }

  void require(std::uint64_t n, std::string_view what) const {
    if (remaining() < n)
      throw FormatError(fmt::format("truncated payload: {} needs {} bytes, {} left", what, n,
                                    remaining()),
                        pos_);
  }

  template <typename T>
  T get_le(std::string_view what) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    require(sizeof(U), what);
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(U{bytes_[pos_ + i]} << (8 * i));
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }

  std::string get_string(std::string_view what) {
    const auto len = get_le<std::uint16_t>(what);
    require(len, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    return s;
  }

  std::string_view peek(std::size_t n) const {
    const std::size_t k = std::min<std::size_t>(n, remaining());
    return {reinterpret_cast<const char*>(bytes_.data() + pos_), k};
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t pos_ = 0;
};

}  // namespace

std::uint64_t epo1_size(const LabeledDataset& dataset) {
  std::uint64_t size = kMagic.size() + 4 * 4 + 8 + 2;
  for (const auto& name : dataset.class_names()) size += 2 + name.size();
  size += 2 + dataset.paradigm().size() + 8;
  const auto n = static_cast<std::uint64_t>(dataset.size());
  size += 2 * n;
  size += 4 * n * static_cast<std::uint64_t>(dataset.channels()) *
          static_cast<std::uint64_t>(dataset.samples());
  return size;
}

std::vector<std::uint8_t> encode_epo1(const LabeledDataset& dataset) {
  if (dataset.class_count() > std::numeric_limits<std::uint16_t>::max())
    throw InputError("class count exceeds the u16 label field");
  ByteWriter w(epo1_size(dataset));
  w.put_raw(kMagic);
  w.put_le(kEpo1Version);
  w.put_le(static_cast<std::uint32_t>(dataset.size()));
  w.put_le(static_cast<std::uint32_t>(dataset.channels()));
  w.put_le(static_cast<std::uint32_t>(dataset.samples()));
  w.put_le(dataset.fs());
  w.put_le(static_cast<std::uint16_t>(dataset.class_count()));
  for (const auto& name : dataset.class_names()) w.put_string(name);
  w.put_string(dataset.paradigm());
  w.put_le(dataset.relatedness().value_or(std::numeric_limits<double>::quiet_NaN()));
  for (int label : dataset.labels()) w.put_le(static_cast<std::uint16_t>(label));
  for (int t = 0; t < dataset.size(); ++t) {
    const SignalMatrix& x = dataset.epochs()[t].data();
    for (Eigen::Index c = 0; c < x.rows(); ++c) {
      for (Eigen::Index s = 0; s < x.cols(); ++s) {
        const auto v = static_cast<float>(x(c, s));
        if (!std::isfinite(v))
          throw InputError(fmt::format("trial {} channel {} sample {} overflows f32", t, c, s));
        w.put_le(v);
      }
    }
  }
  return w.take();
}

LabeledDataset decode_epo1(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.peek(kMagic.size()) != kMagic) throw FormatError("bad magic, expected \"EPO1\"", 0);
  r.skip(kMagic.size());

  const auto version_at = r.offset();
  const auto version = r.get_le<std::uint32_t>("version");
  if (version != kEpo1Version)
    throw FormatError(fmt::format("unsupported version {}", version), version_at);

  const auto trials_at = r.offset();
  const auto n_trials = r.get_le<std::uint32_t>("trial count");
  const auto channels_at = r.offset();
  const auto n_channels = r.get_le<std::uint32_t>("channel count");
  const auto samples_at = r.offset();
  const auto n_samples = r.get_le<std::uint32_t>("sample count");
  const auto fs_at = r.offset();
  const auto fs = r.get_le<double>("sampling rate");

  if (n_trials == 0) throw FormatError("dataset declares zero trials", trials_at);
  if (n_channels < static_cast<std::uint32_t>(Epoch::kMinChannels))
    throw FormatError(fmt::format("channel count {} below minimum {}", n_channels, Epoch::kMinChannels),
                      channels_at);
  if (n_samples < static_cast<std::uint32_t>(Epoch::kMinSamples))
    throw FormatError(fmt::format("sample count {} below minimum {}", n_samples, Epoch::kMinSamples),
                      samples_at);
  if (!(fs > 0.0) || !std::isfinite(fs))
    throw FormatError(fmt::format("sampling rate {} is not positive", fs), fs_at);

  const auto k_at = r.offset();
  const auto k = r.get_le<std::uint16_t>("class count");
  if (k < 2) throw FormatError(fmt::format("class count {} below 2", k), k_at);
  std::vector<std::string> class_names;
  class_names.reserve(k);
  for (std::uint16_t i = 0; i < k; ++i) class_names.push_back(r.get_string("class name"));
  std::string paradigm = r.get_string("paradigm tag");

  const auto rel_at = r.offset();
  const auto rel = r.get_le<double>("relatedness");
  std::optional<double> relatedness;
  if (!std::isnan(rel)) {
    if (!(rel >= 0.0 && rel <= 1.0))
      throw FormatError(fmt::format("relatedness {} outside [0, 1]", rel), rel_at);
    relatedness = rel;
  }

  std::vector<int> labels(n_trials);
  std::vector<int> counts(k, 0);
  for (std::uint32_t t = 0; t < n_trials; ++t) {
    const auto at = r.offset();
    const auto label = r.get_le<std::uint16_t>("label block");
    if (label >= k) throw FormatError(fmt::format("label {} of trial {} out of range [0, {})", label, t, k), at);
    labels[t] = label;
    ++counts[label];
  }
  for (int c = 0; c < k; ++c)
    if (counts[c] == 0) throw FormatError(fmt::format("class {} has no trials", c), r.offset());

  const std::uint64_t per_trial = 4ULL * n_channels * n_samples;
  const std::uint64_t complete = r.remaining() / per_trial;
  if (complete < n_trials)
    throw FormatError(fmt::format("truncated payload: header declares {} trials but the sample block holds {}",
                                  n_trials, complete),
                      r.offset() + complete * per_trial);

  std::vector<Epoch> epochs;
  epochs.reserve(n_trials);
  for (std::uint32_t t = 0; t < n_trials; ++t) {
    SignalMatrix x(n_channels, n_samples);
    for (std::uint32_t c = 0; c < n_channels; ++c) {
      for (std::uint32_t s = 0; s < n_samples; ++s) {
        const auto at = r.offset();
        const auto v = r.get_le<float>("sample");
        if (!std::isfinite(v))
          throw FormatError(fmt::format("non-finite sample in trial {} channel {}", t, c), at);
        x(c, s) = static_cast<double>(v);
      }
    }
    epochs.emplace_back(std::move(x), fs);
  }
  if (r.remaining() != 0)
    throw FormatError(fmt::format("{} trailing bytes after sample block", r.remaining()), r.offset());

  return LabeledDataset(std::move(epochs), std::move(labels), std::move(class_names),
                        std::move(paradigm), relatedness);
}

void write_epo1(const LabeledDataset& dataset, const std::filesystem::path& path) {
  const auto bytes = encode_epo1(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("write to {} failed", path.string()));
}

LabeledDataset read_epo1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {} for reading", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("read from {} failed", path.string()));
  return decode_epo1(bytes);
}

Epoch round_to_f32(const Epoch& epoch) {
  SignalMatrix x = epoch.data().unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); });
  return Epoch(std::move(x), epoch.fs());
}

}  // namespace crossdecode
