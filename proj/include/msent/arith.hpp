#pragma once

#include <cstdint>

#include "msent/bits.hpp"
#include "msent/errors.hpp"

namespace msent {

// Krichevsky-Trofimov estimator: both counts start at 1/2, so
// p(1) = (ones + 1/2) / (total + 1). Counts only ever grow.
struct BitModel {
  uint64_t zeros = 0;
  uint64_t ones = 0;

  // Numerator of p(0) and the common denominator, both scaled by 2.
  uint64_t zero_num() const { return 2 * zeros + 1; }
  uint64_t denom() const { return 2 * (zeros + ones) + 2; }

  void update(bool bit) { bit ? ++ones : ++zeros; }
};

namespace detail {

// 32-bit integer intervals; underflow near the midpoint is deferred via
// pending bits (the carry-handling scheme of the classic CACM coder).
constexpr uint64_t kArithFull = 1ull << 32;
constexpr uint64_t kArithHalf = kArithFull >> 1;
constexpr uint64_t kArithQuarter = kArithFull >> 2;

inline uint64_t zero_range(uint64_t low, uint64_t high, const BitModel& m) {
  const uint64_t range = high - low + 1;
  uint64_t r0 = range * m.zero_num() / m.denom();
  if (r0 == 0) r0 = 1;
  if (r0 == range) r0 = range - 1;
  return r0;
}

}  // namespace detail

// Adaptive binary arithmetic encoder over a BitModel.
class ArithEncoder {
 public:
  void encode(bool bit) {
    const uint64_t r0 = detail::zero_range(low_, high_, model_);
    if (bit)
      low_ += r0;
    else
      high_ = low_ + r0 - 1;
    model_.update(bit);
    for (;;) {
      if (high_ < detail::kArithHalf) {
        emit(false);
      } else if (low_ >= detail::kArithHalf) {
        emit(true);
        low_ -= detail::kArithHalf;
        high_ -= detail::kArithHalf;
      } else if (low_ >= detail::kArithQuarter && high_ < 3 * detail::kArithQuarter) {
        ++pending_;
        low_ -= detail::kArithQuarter;
        high_ -= detail::kArithQuarter;
      } else {
        break;
      }
      low_ <<= 1;
      high_ = (high_ << 1) | 1;
    }
  }

  // Flushes the final interval; the encoder is spent afterwards.
  BitString finish() {
    ++pending_;
    emit(low_ >= detail::kArithQuarter);
    return std::move(out_);
  }

 private:
  void emit(bool bit) {
    out_.push_back(bit);
    for (; pending_ > 0; --pending_) out_.push_back(!bit);
  }

  BitModel model_;
  uint64_t low_ = 0;
  uint64_t high_ = detail::kArithFull - 1;
  uint64_t pending_ = 0;
  BitString out_;
};

// Mirror of ArithEncoder; reads past the coded payload yield zeros, as the
// terminated stream requires.
class ArithDecoder {
 public:
  explicit ArithDecoder(const BitString& coded) : coded_(&coded) {
    for (int i = 0; i < 32; ++i) value_ = (value_ << 1) | next_bit();
  }

  bool decode() {
    const uint64_t r0 = detail::zero_range(low_, high_, model_);
    const bool bit = value_ - low_ >= r0;
    if (bit)
      low_ += r0;
    else
      high_ = low_ + r0 - 1;
    model_.update(bit);
    for (;;) {
      if (high_ < detail::kArithHalf) {
        // nothing
      } else if (low_ >= detail::kArithHalf) {
        low_ -= detail::kArithHalf;
        high_ -= detail::kArithHalf;
        value_ -= detail::kArithHalf;
      } else if (low_ >= detail::kArithQuarter && high_ < 3 * detail::kArithQuarter) {
        low_ -= detail::kArithQuarter;
        high_ -= detail::kArithQuarter;
        value_ -= detail::kArithQuarter;
      } else {
        break;
      }
      low_ <<= 1;
      high_ = (high_ << 1) | 1;
      value_ = (value_ << 1) | next_bit();
    }
    return bit;
  }

 private:
  uint64_t next_bit() { return pos_ < coded_->size() ? (*coded_)[pos_++] : 0; }

  const BitString* coded_;
  BitModel model_;
  uint64_t low_ = 0;
  uint64_t high_ = detail::kArithFull - 1;
  uint64_t value_ = 0;
  size_t pos_ = 0;
};

// Codes a bit sequence with a fresh KT model. Empty input codes to an
// empty payload.
inline BitString arith_encode(const BitString& bits) {
  if (bits.empty()) return {};
  ArithEncoder enc;
  for (size_t i = 0; i < bits.size(); ++i) enc.encode(bits[i]);
  return enc.finish();
}

// Inverse of arith_encode; the bit count is carried out of band.
inline BitString arith_decode(const BitString& coded, size_t n_bits) {
  BitString out;
  if (n_bits == 0) return out;
  ArithDecoder dec(coded);
  for (size_t i = 0; i < n_bits; ++i) out.push_back(dec.decode());
  return out;
}

}  // namespace msent
