#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace stabkit {

// Incremental SHA-256; hex digest is lowercase.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::span<const std::uint8_t> bytes);
  std::string hex_digest();

 private:
  void* ctx_;
};

}  // namespace stabkit
