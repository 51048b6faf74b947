#include "mdaug/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace mdaug::nifti {

namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kVoxOffset = 352;  // header + empty extension flag
constexpr std::size_t kQSFormOffset = 252;
constexpr std::size_t kQSFormSize = 76;  // qform/sform codes + quaternion + srow matrix

template <typename T>
T load(const std::uint8_t* p, bool big_endian) {
  std::array<std::uint8_t, sizeof(T)> raw;
  std::memcpy(raw.data(), p, sizeof(T));
  const bool host_big = (std::endian::native == std::endian::big);
  if (big_endian != host_big) std::reverse(raw.begin(), raw.end());
  return std::bit_cast<T>(raw);
}

template <typename T>
void store_le(std::uint8_t* p, T value) {
  auto raw = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
  if (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  std::memcpy(p, raw.data(), sizeof(T));
}

std::string hex_encode(const std::uint8_t* p, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string s(n * 2, '0');
  for (std::size_t i = 0; i < n; ++i) {
    s[2 * i] = digits[p[i] >> 4];
    s[2 * i + 1] = digits[p[i] & 0xf];
  }
  return s;
}

bool hex_decode(const std::string& s, std::uint8_t* out, std::size_t n) {
  if (s.size() != 2 * n) return false;
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const int hi = nib(s[2 * i]), lo = nib(s[2 * i + 1]);
    if (hi < 0 || lo < 0) return false;
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return true;
}

struct Header {
  Dims dims;
  int nt = 1;
  Spacing spacing;
  Datatype datatype;
  double scl_slope = 0.0;
  double scl_inter = 0.0;
  std::size_t vox_offset = kVoxOffset;
  bool big_endian = false;
  std::string qsform_hex;  // endian-corrected, little-endian serialization
};

bool supported_datatype(std::int16_t code) {
  switch (static_cast<Datatype>(code)) {
    case Datatype::Uint8:
    case Datatype::Int16:
    case Datatype::Int32:
    case Datatype::Float32:
    case Datatype::Float64:
      return true;
  }
  return false;
}

Header parse_header(const Bytes& b) {
  if (b.size() < kHeaderSize)
    throw NiftiError(ErrorCode::TruncatedPayload,
                     "stream shorter than the 348-byte header (" + std::to_string(b.size()) + " bytes)");

  Header h;
  const std::int32_t size_le = load<std::int32_t>(b.data(), false);
  const std::int32_t size_be = load<std::int32_t>(b.data(), true);
  if (size_le == 348) {
    h.big_endian = false;
  } else if (size_be == 348) {
    h.big_endian = true;
  } else if (size_le == 540 || size_be == 540) {
    throw NiftiError(ErrorCode::Nifti2Unsupported, "sizeof_hdr indicates NIfTI-2");
  } else {
    throw NiftiError(ErrorCode::BadHeaderSize,
                     "sizeof_hdr is " + std::to_string(size_le) + ", expected 348");
  }

  const char* magic = reinterpret_cast<const char*>(b.data() + 344);
  if (std::memcmp(magic, "ni1", 4) == 0)
    throw NiftiError(ErrorCode::HeaderImagePairUnsupported,
                     "detached header/image pairs are not supported");
  if (std::memcmp(magic, "n+1", 4) != 0)
    throw NiftiError(ErrorCode::BadMagic, "magic is not 'n+1'");

  std::int16_t dim[8];
  for (int i = 0; i < 8; ++i) dim[i] = load<std::int16_t>(b.data() + 40 + 2 * i, h.big_endian);
  const int ndim = dim[0];
  if (ndim < 2 || ndim > 4)
    throw NiftiError(ErrorCode::UnsupportedDimensionality,
                     "dim[0] = " + std::to_string(ndim) + ", expected 2..4");
  for (int i = 1; i <= ndim; ++i)
    if (dim[i] < 1)
      throw NiftiError(ErrorCode::UnsupportedDimensionality,
                       "dim[" + std::to_string(i) + "] = " + std::to_string(dim[i]));
  h.dims.nx = dim[1];
  h.dims.ny = dim[2];
  h.dims.nz = ndim >= 3 ? dim[3] : 1;
  h.nt = ndim >= 4 ? dim[4] : 1;

  const std::int16_t dt = load<std::int16_t>(b.data() + 70, h.big_endian);
  if (!supported_datatype(dt))
    throw NiftiError(ErrorCode::UnsupportedDatatype, "datatype code " + std::to_string(dt));
  h.datatype = static_cast<Datatype>(dt);

  float pixdim[8];
  for (int i = 0; i < 8; ++i) pixdim[i] = load<float>(b.data() + 76 + 4 * i, h.big_endian);
  const int spatial = std::min(ndim, 3);
  for (int i = 1; i <= spatial; ++i)
    if (!(pixdim[i] > 0.0f) || !std::isfinite(pixdim[i]))
      throw NiftiError(ErrorCode::NonPositivePixdim,
                       "pixdim[" + std::to_string(i) + "] = " + std::to_string(pixdim[i]));
  h.spacing.sx = pixdim[1];
  h.spacing.sy = pixdim[2];
  h.spacing.sz = spatial >= 3 ? pixdim[3] : 1.0;

  const float vox_offset = load<float>(b.data() + 108, h.big_endian);
  if (!(vox_offset >= static_cast<float>(kHeaderSize)) ||
      vox_offset != std::floor(vox_offset))
    throw NiftiError(ErrorCode::BadVoxOffset, "vox_offset = " + std::to_string(vox_offset));
  h.vox_offset = static_cast<std::size_t>(vox_offset);

  h.scl_slope = load<float>(b.data() + 112, h.big_endian);
  h.scl_inter = load<float>(b.data() + 116, h.big_endian);
  if (!std::isfinite(h.scl_slope)) h.scl_slope = 0.0;
  if (!std::isfinite(h.scl_inter)) h.scl_inter = 0.0;

  // Carry the orientation block through as opaque, endian-corrected bytes.
  std::array<std::uint8_t, kQSFormSize> qs;
  std::memcpy(qs.data(), b.data() + kQSFormOffset, kQSFormSize);
  if (h.big_endian) {
    std::reverse(qs.begin() + 0, qs.begin() + 2);
    std::reverse(qs.begin() + 2, qs.begin() + 4);
    for (std::size_t off = 4; off + 4 <= kQSFormSize; off += 4)
      std::reverse(qs.begin() + off, qs.begin() + off + 4);
  }
  h.qsform_hex = hex_encode(qs.data(), qs.size());
  return h;
}

std::vector<double> decode_payload(const Bytes& b, const Header& h, std::size_t count) {
  const std::size_t elem = static_cast<std::size_t>(bitpix(h.datatype)) / 8;
  if (h.vox_offset > b.size() || b.size() - h.vox_offset < count * elem)
    throw NiftiError(ErrorCode::TruncatedPayload,
                     "need " + std::to_string(count * elem) + " payload bytes, have " +
                         std::to_string(b.size() - std::min(b.size(), h.vox_offset)));
  std::vector<double> out(count);
  const std::uint8_t* p = b.data() + h.vox_offset;
  switch (h.datatype) {
    case Datatype::Uint8:
      for (std::size_t i = 0; i < count; ++i) out[i] = p[i];
      break;
    case Datatype::Int16:
      for (std::size_t i = 0; i < count; ++i) out[i] = load<std::int16_t>(p + 2 * i, h.big_endian);
      break;
    case Datatype::Int32:
      for (std::size_t i = 0; i < count; ++i) out[i] = load<std::int32_t>(p + 4 * i, h.big_endian);
      break;
    case Datatype::Float32:
      for (std::size_t i = 0; i < count; ++i) out[i] = load<float>(p + 4 * i, h.big_endian);
      break;
    case Datatype::Float64:
      for (std::size_t i = 0; i < count; ++i) out[i] = load<double>(p + 8 * i, h.big_endian);
      break;
  }
  if (h.scl_slope != 0.0 && !(h.scl_slope == 1.0 && h.scl_inter == 0.0))
    for (double& v : out) v = h.scl_slope * v + h.scl_inter;
  return out;
}

Bytes maybe_gunzip(const Bytes& stream) {
  if (stream.size() >= 2 && stream[0] == 0x1f && stream[1] == 0x8b) return gunzip(stream);
  return stream;
}

void encode_payload(Bytes& out, const std::vector<double>& data, Datatype dt) {
  const std::size_t base = out.size();
  out.resize(base + data.size() * static_cast<std::size_t>(bitpix(dt)) / 8);
  std::uint8_t* p = out.data() + base;

  auto check_range = [](double v, double lo, double hi) {
    if (v < lo || v > hi)
      throw NiftiError(ErrorCode::ValueOutOfRange,
                       "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "] for integer datatype");
  };

  switch (dt) {
    case Datatype::Uint8:
      for (std::size_t i = 0; i < data.size(); ++i) {
        check_range(data[i], 0.0, 255.0);
        p[i] = static_cast<std::uint8_t>(std::llround(data[i]));
      }
      break;
    case Datatype::Int16:
      for (std::size_t i = 0; i < data.size(); ++i) {
        check_range(data[i], -32768.0, 32767.0);
        store_le<std::int16_t>(p + 2 * i, static_cast<std::int16_t>(std::llround(data[i])));
      }
      break;
    case Datatype::Int32:
      for (std::size_t i = 0; i < data.size(); ++i) {
        check_range(data[i], -2147483648.0, 2147483647.0);
        store_le<std::int32_t>(p + 4 * i, static_cast<std::int32_t>(std::llround(data[i])));
      }
      break;
    case Datatype::Float32:
      for (std::size_t i = 0; i < data.size(); ++i)
        store_le<float>(p + 4 * i, static_cast<float>(data[i]));
      break;
    case Datatype::Float64:
      for (std::size_t i = 0; i < data.size(); ++i) store_le<double>(p + 8 * i, data[i]);
      break;
  }
}

Bytes build_stream(const Dims& dims, int nt, const Spacing& spacing, const Metadata& meta,
                   const std::vector<double>& data, Datatype dt) {
  Bytes out(kVoxOffset, 0);
  store_le<std::int32_t>(out.data(), 348);
  const std::int16_t ndim = nt > 1 ? 4 : 3;
  store_le<std::int16_t>(out.data() + 40, ndim);
  store_le<std::int16_t>(out.data() + 42, static_cast<std::int16_t>(dims.nx));
  store_le<std::int16_t>(out.data() + 44, static_cast<std::int16_t>(dims.ny));
  store_le<std::int16_t>(out.data() + 46, static_cast<std::int16_t>(dims.nz));
  store_le<std::int16_t>(out.data() + 48, static_cast<std::int16_t>(nt));
  for (int i = 5; i < 8; ++i) store_le<std::int16_t>(out.data() + 40 + 2 * i, 1);
  store_le<std::int16_t>(out.data() + 70, static_cast<std::int16_t>(dt));
  store_le<std::int16_t>(out.data() + 72, static_cast<std::int16_t>(bitpix(dt)));
  store_le<float>(out.data() + 76, 1.0f);  // qfac
  store_le<float>(out.data() + 80, static_cast<float>(spacing.sx));
  store_le<float>(out.data() + 84, static_cast<float>(spacing.sy));
  store_le<float>(out.data() + 88, static_cast<float>(spacing.sz));
  store_le<float>(out.data() + 92, 1.0f);  // pixdim[4] (time step, unused)
  store_le<float>(out.data() + 108, static_cast<float>(kVoxOffset));
  store_le<float>(out.data() + 112, 1.0f);  // scl_slope
  store_le<float>(out.data() + 116, 0.0f);  // scl_inter
  out[123] = 2;                             // xyzt_units: millimetres

  if (auto it = meta.find(kQSFormKey); it != meta.end()) {
    std::array<std::uint8_t, kQSFormSize> qs{};
    if (hex_decode(it->second, qs.data(), qs.size()))
      std::memcpy(out.data() + kQSFormOffset, qs.data(), qs.size());
  }

  std::memcpy(out.data() + 344, "n+1", 4);
  encode_payload(out, data, dt);
  return out;
}

}  // namespace

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadMagic: return "bad-magic";
    case ErrorCode::BadHeaderSize: return "bad-header-size";
    case ErrorCode::Nifti2Unsupported: return "nifti2-unsupported";
    case ErrorCode::HeaderImagePairUnsupported: return "header-image-pair-unsupported";
    case ErrorCode::UnsupportedDatatype: return "unsupported-datatype";
    case ErrorCode::UnsupportedDimensionality: return "unsupported-dimensionality";
    case ErrorCode::TruncatedPayload: return "truncated-payload";
    case ErrorCode::NonPositivePixdim: return "non-positive-pixdim";
    case ErrorCode::BadVoxOffset: return "bad-vox-offset";
    case ErrorCode::BadGzip: return "bad-gzip";
    case ErrorCode::ValueOutOfRange: return "value-out-of-range";
    case ErrorCode::InvalidClassCode: return "invalid-class-code";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

int bitpix(Datatype dt) {
  switch (dt) {
    case Datatype::Uint8: return 8;
    case Datatype::Int16: return 16;
    case Datatype::Int32: return 32;
    case Datatype::Float32: return 32;
    case Datatype::Float64: return 64;
  }
  throw NiftiError(ErrorCode::UnsupportedDatatype, "unknown datatype");
}

Volume read_volume(const Bytes& stream) {
  const Bytes raw = maybe_gunzip(stream);
  const Header h = parse_header(raw);
  if (h.nt != 1)
    throw NiftiError(ErrorCode::UnsupportedDimensionality,
                     "4D volume with dim[4] = " + std::to_string(h.nt) + " (expected 1)");
  auto data = decode_payload(raw, h, h.dims.voxels());
  Metadata meta;
  meta[kQSFormKey] = h.qsform_hex;
  return Volume(h.dims, h.spacing, std::move(data), std::move(meta));
}

Bytes write_volume(const Volume& v, Datatype dt) {
  return build_stream(v.dims, 1, v.spacing, v.metadata, v.data, dt);
}

SegmentationMask read_mask(const Bytes& stream) {
  const Volume v = read_volume(stream);
  std::vector<std::uint8_t> labels(v.data.size());
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    const double r = std::round(v.data[i]);
    if (std::abs(v.data[i] - r) > 1e-6 || r < 0 || r >= kNumClasses)
      throw NiftiError(ErrorCode::InvalidClassCode,
                       "voxel value " + std::to_string(v.data[i]) + " is not a class code");
    labels[i] = static_cast<std::uint8_t>(r);
  }
  return SegmentationMask(v.dims, v.spacing, std::move(labels));
}

Bytes write_mask(const SegmentationMask& m, Datatype dt) {
  std::vector<double> data(m.labels.begin(), m.labels.end());
  Metadata meta;  // masks keep no orientation block of their own
  return build_stream(m.dims, 1, m.spacing, meta, data, dt);
}

ProbabilityMap read_probability_map(const Bytes& stream) {
  const Bytes raw = maybe_gunzip(stream);
  const Header h = parse_header(raw);
  if (h.nt < 2)
    throw NiftiError(ErrorCode::UnsupportedDimensionality,
                     "probability map needs dim[4] >= 2, got " + std::to_string(h.nt));
  auto data = decode_payload(raw, h, h.dims.voxels() * static_cast<std::size_t>(h.nt));
  return ProbabilityMap(h.nt, h.dims, h.spacing, std::move(data));
}

Bytes write_probability_map(const ProbabilityMap& p, Datatype dt) {
  return build_stream(p.dims, p.num_classes, p.spacing, Metadata{}, p.probs, dt);
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NiftiError(ErrorCode::Io, "cannot open '" + path.string() + "'");
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return maybe_gunzip(bytes);
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NiftiError(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw NiftiError(ErrorCode::Io, "short write to '" + path.string() + "'");
}

Volume read_volume_file(const std::filesystem::path& path) { return read_volume(read_file(path)); }
SegmentationMask read_mask_file(const std::filesystem::path& path) { return read_mask(read_file(path)); }
ProbabilityMap read_probability_map_file(const std::filesystem::path& path) {
  return read_probability_map(read_file(path));
}
void write_volume_file(const std::filesystem::path& path, const Volume& v, Datatype dt) {
  write_file(path, write_volume(v, dt));
}
void write_mask_file(const std::filesystem::path& path, const SegmentationMask& m) {
  write_file(path, write_mask(m));
}

Bytes gunzip(const Bytes& compressed) {
  z_stream strm{};
  if (inflateInit2(&strm, 15 + 32) != Z_OK)
    throw NiftiError(ErrorCode::BadGzip, "inflateInit failed");
  Bytes out;
  out.reserve(compressed.size() * 4);
  std::array<std::uint8_t, 1 << 16> buf;
  strm.next_in = const_cast<std::uint8_t*>(compressed.data());
  strm.avail_in = static_cast<uInt>(compressed.size());
  int rc = Z_OK;
  do {
    strm.next_out = buf.data();
    strm.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&strm, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&strm);
      throw NiftiError(ErrorCode::BadGzip, "corrupt gzip stream (zlib rc " + std::to_string(rc) + ")");
    }
    out.insert(out.end(), buf.data(), buf.data() + (buf.size() - strm.avail_out));
  } while (rc != Z_STREAM_END && (strm.avail_in > 0 || strm.avail_out == 0));
  inflateEnd(&strm);
  if (rc != Z_STREAM_END) throw NiftiError(ErrorCode::BadGzip, "truncated gzip stream");
  return out;
}

Bytes gzip(const Bytes& raw) {
  z_stream strm{};
  if (deflateInit2(&strm, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw NiftiError(ErrorCode::BadGzip, "deflateInit failed");
  Bytes out;
  std::array<std::uint8_t, 1 << 16> buf;
  strm.next_in = const_cast<std::uint8_t*>(raw.data());
  strm.avail_in = static_cast<uInt>(raw.size());
  int rc = Z_OK;
  do {
    strm.next_out = buf.data();
    strm.avail_out = static_cast<uInt>(buf.size());
    rc = deflate(&strm, Z_FINISH);
    out.insert(out.end(), buf.data(), buf.data() + (buf.size() - strm.avail_out));
  } while (rc != Z_STREAM_END);
  deflateEnd(&strm);
  return out;
}

}  // namespace mdaug::nifti
