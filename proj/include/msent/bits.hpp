#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "msent/errors.hpp"

namespace msent {

// Packed bit sequence with append-only writing and indexed reads.
class BitString {
 public:
  void push_back(bool bit) {
    const size_t word = size_ >> 6;
    if (word == words_.size()) words_.push_back(0);
    if (bit) words_[word] |= 1ull << (size_ & 63);
    ++size_;
  }

  // Appends `width` bits of `value`, most significant first.
  void append_uint(uint64_t value, int width) {
    for (int b = width - 1; b >= 0; --b) push_back((value >> b) & 1);
  }

  bool operator[](size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  std::string to_string() const {
    std::string s(size_, '0');
    for (size_t i = 0; i < size_; ++i)
      if ((*this)[i]) s[i] = '1';
    return s;
  }

  static BitString from_string(std::string_view s) {
    BitString b;
    for (char c : s) {
      if (c != '0' && c != '1') throw param_error("bit strings may only contain 0/1");
      b.push_back(c == '1');
    }
    return b;
  }

  friend bool operator==(const BitString& a, const BitString& b) {
    if (a.size_ != b.size_) return false;
    for (size_t i = 0; i < a.size_; ++i)
      if (a[i] != b[i]) return false;
    return true;
  }

 private:
  std::vector<uint64_t> words_;
  size_t size_ = 0;
};

// Sequential reader over a BitString; reads past the end are an error.
class BitReader {
 public:
  explicit BitReader(const BitString& bits) : bits_(&bits) {}

  bool read_bit() {
    if (pos_ >= bits_->size()) throw numeric_error("bit stream truncated");
    return (*bits_)[pos_++];
  }

  uint64_t read_uint(int width) {
    uint64_t v = 0;
    for (int b = 0; b < width; ++b) v = (v << 1) | (read_bit() ? 1u : 0u);
    return v;
  }

  size_t position() const { return pos_; }
  bool exhausted() const { return pos_ == bits_->size(); }

 private:
  const BitString* bits_;
  size_t pos_ = 0;
};

// ceil(log2(x+1)) == number of bits needed to write values 0..x.
inline int count_field_width(uint64_t x) { return static_cast<int>(std::bit_width(x)); }

}  // namespace msent
