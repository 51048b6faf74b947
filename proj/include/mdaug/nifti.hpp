#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdaug/volume.hpp"

namespace mdaug::nifti {

enum class ErrorCode {
  BadMagic,
  BadHeaderSize,
  Nifti2Unsupported,
  HeaderImagePairUnsupported,
  UnsupportedDatatype,
  UnsupportedDimensionality,
  TruncatedPayload,
  NonPositivePixdim,
  BadVoxOffset,
  BadGzip,
  ValueOutOfRange,
  InvalidClassCode,
  Io,
};

const char* error_name(ErrorCode c);

class NiftiError : public std::runtime_error {
 public:
  NiftiError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Supported NIfTI-1 on-disk datatypes (codes per the format).
enum class Datatype : std::int16_t {
  Uint8 = 2,
  Int16 = 4,
  Int32 = 8,
  Float32 = 16,
  Float64 = 64,
};

int bitpix(Datatype dt);

// Volume metadata key holding the endian-corrected qform/sform header block
// (hex, 76 bytes); it is re-emitted verbatim on write.
inline constexpr const char* kQSFormKey = "nifti.qsform";

using Bytes = std::vector<std::uint8_t>;

/// Parses a single-file NIfTI-1 stream (optionally gzip-wrapped). Values are
/// scaled by scl_slope/scl_inter when scl_slope != 0; spacing comes from
/// pixdim[1..3]. dim[0] must be 2..4 and a 4th dimension, if declared, must
/// have size 1. Every malformed input raises a NiftiError with a distinct
/// code; parsing never crashes or returns garbage.
Volume read_volume(const Bytes& stream);

/// Serializes to single-file NIfTI-1, little-endian, vox_offset 352,
/// scl_slope 1 / scl_inter 0. Integer targets require every value within the
/// target range (checked before rounding to nearest).
Bytes write_volume(const Volume& v, Datatype dt);

/// read_volume plus nearest-integer validation against the class table.
/// Float-typed mask files are accepted when every voxel is integral.
SegmentationMask read_mask(const Bytes& stream);
Bytes write_mask(const SegmentationMask& m, Datatype dt = Datatype::Uint8);

/// 4D variant used for per-class probability maps: dim[0] = 4 with dim[4]
/// = class count C >= 2, classes stored as consecutive 3D frames.
ProbabilityMap read_probability_map(const Bytes& stream);
Bytes write_probability_map(const ProbabilityMap& p, Datatype dt = Datatype::Float32);

// File helpers. Reading transparently inflates gzip (.nii.gz or any stream
// starting with 0x1f 0x8b); writing emits plain .nii bytes.
Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Bytes& bytes);
Volume read_volume_file(const std::filesystem::path& path);
SegmentationMask read_mask_file(const std::filesystem::path& path);
ProbabilityMap read_probability_map_file(const std::filesystem::path& path);
void write_volume_file(const std::filesystem::path& path, const Volume& v,
                       Datatype dt = Datatype::Float64);
void write_mask_file(const std::filesystem::path& path, const SegmentationMask& m);

/// Inflate a gzip stream (zlib). Exposed for tests.
Bytes gunzip(const Bytes& compressed);
Bytes gzip(const Bytes& raw);

}  // namespace mdaug::nifti
