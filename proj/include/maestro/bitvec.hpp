#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace maestro {

inline constexpr unsigned kMaxBitWidth = 64;

/// Fixed-width unsigned bit vector. All arithmetic wraps modulo 2^width.
class BitVecValue {
public:
  BitVecValue() : BitVecValue(1, 0) {}

  /// Bits above `width` are discarded.
  BitVecValue(unsigned width, std::uint64_t bits) : width_(width), bits_(bits & mask(width)) {
    if (width == 0 || width > kMaxBitWidth) {
      throw std::invalid_argument("bit-vector width must be in [1, 64], got " +
                                  std::to_string(width));
    }
  }

  [[nodiscard]] unsigned width() const noexcept { return width_; }
  [[nodiscard]] std::uint64_t bits() const noexcept { return bits_; }

  [[nodiscard]] bool bit(unsigned index) const noexcept {
    return index < width_ && ((bits_ >> index) & 1U) != 0;
  }

  /// Zero-extends (or truncates) to `width`.
  [[nodiscard]] BitVecValue resized(unsigned width) const { return {width, bits_}; }

  [[nodiscard]] static constexpr std::uint64_t mask(unsigned width) noexcept {
    return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
  }

  /// Smallest width that holds `value` (at least 1).
  [[nodiscard]] static unsigned width_for(std::uint64_t value) noexcept {
    unsigned w = 1;
    while (w < 64 && (value >> w) != 0) {
      ++w;
    }
    return w;
  }

  friend bool operator==(const BitVecValue&, const BitVecValue&) = default;

private:
  unsigned width_;
  std::uint64_t bits_;
};

// Binary operators zero-extend to the wider operand before operating.
[[nodiscard]] inline BitVecValue operator+(const BitVecValue& a, const BitVecValue& b) {
  const unsigned w = std::max(a.width(), b.width());
  return {w, a.bits() + b.bits()};
}

[[nodiscard]] inline BitVecValue operator-(const BitVecValue& a, const BitVecValue& b) {
  const unsigned w = std::max(a.width(), b.width());
  return {w, a.bits() - b.bits()};
}

/// Unsigned comparison after zero-extension; widths do not take part.
[[nodiscard]] inline std::strong_ordering compare_unsigned(const BitVecValue& a,
                                                           const BitVecValue& b) noexcept {
  return a.bits() <=> b.bits();
}

}  // namespace maestro
