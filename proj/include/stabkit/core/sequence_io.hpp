#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabkit/core/frame_sequence.hpp"

namespace stabkit {

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kDefaultFramePattern = "frame_%06d.png";

struct SequenceManifest {
  int width = 0;
  int height = 0;
  int frame_count = 0;
  double fps = 30.0;
  std::string frame_pattern = kDefaultFramePattern;
  std::string checksum;  // hex SHA-256 over 8-bit RGB pixel bytes

  friend bool operator==(const SequenceManifest&,
                         const SequenceManifest&) = default;
};

void to_json(nlohmann::json& j, const SequenceManifest& m);
void from_json(const nlohmann::json& j, SequenceManifest& m);

// [0,1] <-> 8-bit with round-half-up.
std::uint8_t quantize_unit(float v);
float dequantize(std::uint8_t v);

// Interleaved RGB bytes of a frame, row-major.
std::vector<std::uint8_t> frame_bytes(const Image& frame);

std::string sequence_checksum(const FrameSequence& seq);

std::string format_frame_name(const std::string& pattern, int index);

SequenceManifest save_sequence(const FrameSequence& seq,
                               const std::filesystem::path& dir);
FrameSequence load_sequence(const std::filesystem::path& dir);

// Single-image helpers for source images and plots.
Image read_image(const std::filesystem::path& file);
void write_image(const Image& image, const std::filesystem::path& file);

}  // namespace stabkit
