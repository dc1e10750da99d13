#include "stabkit/core/sequence_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "stabkit/core/error.hpp"
#include "stabkit/core/sha256.hpp"

namespace fs = std::filesystem;

namespace stabkit {

namespace {

struct PatternParts {
  std::string prefix;
  int digits = 0;
  std::string suffix;
};

PatternParts parse_pattern(const std::string& pattern) {
  static const std::regex re(R"(^([^%]*)%0(\d+)d([^%]*)$)");
  std::smatch m;
  if (!std::regex_match(pattern, m, re)) {
    throw FormatError("unsupported frame pattern '" + pattern + "'");
  }
  return {m[1].str(), std::stoi(m[2].str()), m[3].str()};
}

std::string escape_regex(const std::string& s) {
  static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
  return std::regex_replace(s, special, R"(\$&)");
}

cv::Mat to_bgr8(const Image& frame) {
  cv::Mat rgb(frame.height(), frame.width(), CV_8UC3);
  const auto bytes = frame_bytes(frame);
  std::copy(bytes.begin(), bytes.end(), rgb.data);
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

Image from_bgr8(const cv::Mat& bgr) {
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  Image out(rgb.cols, rgb.rows, 3);
  auto dst = out.data();
  for (int y = 0; y < rgb.rows; ++y) {
    const std::uint8_t* row = rgb.ptr<std::uint8_t>(y);
    for (int i = 0; i < rgb.cols * 3; ++i) {
      dst[static_cast<std::size_t>(y) * rgb.cols * 3 + i] = dequantize(row[i]);
    }
  }
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const SequenceManifest& m) {
  j = nlohmann::json{{"width", m.width},
                     {"height", m.height},
                     {"frame_count", m.frame_count},
                     {"fps", m.fps},
                     {"frame_pattern", m.frame_pattern},
                     {"checksum", m.checksum}};
}

void from_json(const nlohmann::json& j, SequenceManifest& m) {
  j.at("width").get_to(m.width);
  j.at("height").get_to(m.height);
  j.at("frame_count").get_to(m.frame_count);
  j.at("fps").get_to(m.fps);
  j.at("frame_pattern").get_to(m.frame_pattern);
  j.at("checksum").get_to(m.checksum);
}

std::uint8_t quantize_unit(float v) {
  const double scaled = std::floor(static_cast<double>(v) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

float dequantize(std::uint8_t v) { return static_cast<float>(v) / 255.0f; }

std::vector<std::uint8_t> frame_bytes(const Image& frame) {
  std::vector<std::uint8_t> bytes(frame.size());
  auto src = frame.data();
  std::transform(src.begin(), src.end(), bytes.begin(), quantize_unit);
  return bytes;
}

std::string sequence_checksum(const FrameSequence& seq) {
  Sha256 hash;
  for (const Image& frame : seq) hash.update(frame_bytes(frame));
  return hash.hex_digest();
}

std::string format_frame_name(const std::string& pattern, int index) {
  const PatternParts parts = parse_pattern(pattern);
  std::string digits = std::to_string(index);
  if (static_cast<int>(digits.size()) < parts.digits) {
    digits.insert(0, parts.digits - digits.size(), '0');
  }
  return parts.prefix + digits + parts.suffix;
}

SequenceManifest save_sequence(const FrameSequence& seq, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string());
  }
  SequenceManifest manifest;
  manifest.width = seq.width();
  manifest.height = seq.height();
  manifest.frame_count = static_cast<int>(seq.size());
  manifest.fps = seq.fps();
  manifest.frame_pattern = kDefaultFramePattern;

  const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 3};
  Sha256 hash;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    hash.update(frame_bytes(seq[i]));
    const fs::path file = dir / format_frame_name(manifest.frame_pattern, static_cast<int>(i));
    bool ok = false;
    try {
      ok = cv::imwrite(file.string(), to_bgr8(seq[i]), params);
    } catch (const cv::Exception&) {
      ok = false;
    }
    if (!ok) throw IoError("cannot write " + file.string());
  }
  manifest.checksum = hash.hex_digest();

  std::ofstream out(dir / kManifestFile);
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << nlohmann::json(manifest).dump(2) << '\n';
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  return manifest;
}

FrameSequence load_sequence(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestFile;
  std::ifstream in(manifest_path);
  if (!in) throw FormatError("missing manifest: " + manifest_path.string());
  SequenceManifest manifest;
  try {
    manifest = nlohmann::json::parse(in).get<SequenceManifest>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }

  const PatternParts parts = parse_pattern(manifest.frame_pattern);
  const std::regex file_re("^" + escape_regex(parts.prefix) + "(\\d{" +
                           std::to_string(parts.digits) + "})" +
                           escape_regex(parts.suffix) + "$");
  std::vector<int> indices;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, file_re)) indices.push_back(std::stoi(m[1].str()));
  }
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] != static_cast<int>(i)) {
      throw IntegrityError("frame indices are not contiguous from 0 in " + dir.string());
    }
  }
  if (static_cast<int>(indices.size()) != manifest.frame_count) {
    throw IntegrityError("manifest lists " + std::to_string(manifest.frame_count) +
                         " frames but " + std::to_string(indices.size()) +
                         " files are present");
  }

  std::vector<Image> frames;
  frames.reserve(indices.size());
  Sha256 hash;
  for (int i : indices) {
    const fs::path file = dir / format_frame_name(manifest.frame_pattern, i);
    const cv::Mat raw = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
    if (raw.empty() || raw.type() != CV_8UC3) {
      throw FormatError("frame is not an 8-bit RGB image: " + file.string());
    }
    if (raw.cols != manifest.width || raw.rows != manifest.height) {
      throw IntegrityError("frame size mismatch: " + file.string());
    }
    frames.push_back(from_bgr8(raw));
    hash.update(frame_bytes(frames.back()));
  }
  if (hash.hex_digest() != manifest.checksum) {
    throw IntegrityError("checksum mismatch in " + dir.string());
  }
  return FrameSequence(std::move(frames), manifest.fps, dir.filename().string());
}

Image read_image(const fs::path& file) {
  const cv::Mat raw = cv::imread(file.string(), cv::IMREAD_COLOR);
  if (raw.empty()) throw FormatError("cannot read image " + file.string());
  return from_bgr8(raw);
}

void write_image(const Image& image, const fs::path& file) {
  if (image.channels() != 3) throw ShapeError("write_image expects RGB");
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  if (!cv::imwrite(file.string(), to_bgr8(image))) {
    throw IoError("cannot write " + file.string());
  }
}

}  // namespace stabkit
