#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace msynth {

/// Streaming FNV-1a 64-bit hash. Used for content hashes in manifests and
/// checkpoint compatibility checks; not cryptographic.
class Fnv1a {
 public:
  void update(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state_ ^= bytes[i];
      state_ *= 0x100000001b3ULL;
    }
  }

  void update(const std::string& s) { update(s.data(), s.size()); }

  void update(double v) { update(&v, sizeof(v)); }

  void update(std::int64_t v) { update(&v, sizeof(v)); }

  std::uint64_t digest() const { return state_; }

  /// 16-char lowercase hex digest.
  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = state_;
    for (int i = 15; i >= 0; --i) {
      out[i] = digits[v & 0xf];
      v >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string hashBytes(const void* data, std::size_t len) {
  Fnv1a h;
  h.update(data, len);
  return h.hex();
}

inline std::string hashString(const std::string& s) {
  return hashBytes(s.data(), s.size());
}

}  // namespace msynth
