#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace semiab {

// 64-bit FNV-1a.
class Fnv1a {
 public:
  Fnv1a& add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 1099511628211ull;
    }
    return *this;
  }
  Fnv1a& add(double x) {
    char buf[sizeof(double)];
    std::memcpy(buf, &x, sizeof buf);
    return add(std::string_view(buf, sizeof buf));
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 14695981039346656037ull;
};

inline std::uint64_t fnv1a(std::string_view s) { return Fnv1a().add(s).value(); }

}  // namespace semiab
