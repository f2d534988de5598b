// Copyright 2026 The vvv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Unbounded non-negative integers used as configuration codes.
//
// Configuration codes nest powers of two inside exponents, so their binary
// length can itself be astronomically large. A Natural below 2^kFlatBits is
// stored as an ordinary big integer; anything larger is stored as its
// maximal runs of one bits, [start, end), whose boundaries are Naturals
// again. Every value has exactly one representation, so equality is
// structural.
//
// Text form: decimal for flat values; otherwise "[s:e,s:e,...]" listing the
// runs in ascending order, e.g. 2^70000 - 1 is "[0:70000]".

#ifndef VVV_NATURAL_HPP_
#define VVV_NATURAL_HPP_

#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace vvv {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::size_t kFlatBits = std::size_t{1} << 16;

struct BitRun;
class Natural;

namespace natural_detail {
struct Cursor;
}  // namespace natural_detail

class Natural {
 public:
  Natural() = default;

  template <std::integral T>
  Natural(T v) {  // NOLINT(google-explicit-constructor)
    if constexpr (std::is_signed_v<T>) {
      if (v < 0) throw std::domain_error("Natural: negative value");
    }
    small_ = v;
  }

  Natural(const BigInt& v);  // NOLINT(google-explicit-constructor)

  /// Builds a value from ascending, non-overlapping runs of one bits.
  static Natural from_runs(std::vector<BitRun> runs);

  bool is_zero() const { return !runs_ && flat().is_zero(); }
  bool is_flat() const { return !runs_; }

  /// The value as a big integer; only for flat values.
  const BigInt& big() const {
    if (runs_) throw std::overflow_error("Natural: value too large for a flat integer");
    return flat();
  }

  /// Maximal runs of one bits, ascending.
  std::shared_ptr<const std::vector<BitRun>> runs() const;

  bool fits_u64() const { return !runs_ && flat() <= std::numeric_limits<std::uint64_t>::max(); }

  explicit operator std::uint64_t() const {
    if (!fits_u64()) throw std::overflow_error("Natural: value exceeds 64 bits");
    return static_cast<std::uint64_t>(flat());
  }

  std::string str() const;

  friend bool operator==(const Natural& a, const Natural& b);
  friend std::strong_ordering operator<=>(const Natural& a, const Natural& b);
  friend Natural operator+(const Natural& a, const Natural& b);
  friend Natural operator-(const Natural& a, const Natural& b);

  Natural& operator+=(const Natural& o) { return *this = *this + o; }
  Natural& operator-=(const Natural& o) { return *this = *this - o; }
  Natural& operator++() { return *this += 1; }
  Natural& operator--() { return *this -= 1; }

  /// this * 2^k.
  Natural shl(const Natural& k) const;
  /// floor(this / 2^k).
  Natural shr(const Natural& k) const;

 private:
  /// Adopts runs that are already maximal and ascending.
  static Natural from_canonical(std::vector<BitRun> runs);
  /// Cursor over the runs; scratch holds them for flat values.
  natural_detail::Cursor cursor(std::vector<BitRun>& scratch) const;

  const BigInt& flat() const { return wide_ ? *wide_ : small_; }
  void set_flat(BigInt v);

  // Flat values wider than the inline limbs of a BigInt are shared, so
  // copying a Natural never allocates.
  BigInt small_;
  std::shared_ptr<const BigInt> wide_;
  std::shared_ptr<const std::vector<BitRun>> runs_;  // set iff >= 2^kFlatBits
};

struct BitRun {
  Natural start;
  Natural end;

  bool operator==(const BitRun&) const = default;
};

namespace natural_detail {

inline std::vector<BitRun> flat_runs(const BigInt& v) {
  std::vector<BitRun> out;
  if (v.is_zero()) return out;
  using Limb = std::remove_cv_t<std::remove_pointer_t<decltype(v.backend().limbs())>>;
  constexpr unsigned kLimbBits = sizeof(Limb) * 8;
  const Limb* limbs = v.backend().limbs();
  const std::size_t size = v.backend().size();
  bool open = false;
  std::uint64_t open_at = 0;
  for (std::size_t i = 0; i < size; ++i) {
    const Limb w = limbs[i];
    unsigned bit = 0;
    while (bit < kLimbBits) {
      // Bits from `bit` upward that continue (open) or start (closed) a run.
      const Limb rest = open ? static_cast<Limb>(~w) >> bit : w >> bit;
      if (rest == 0) break;
      bit += static_cast<unsigned>(__builtin_ctzll(rest));
      const std::uint64_t pos = std::uint64_t{i} * kLimbBits + bit;
      if (open) {
        out.push_back({Natural(open_at), Natural(pos)});
      } else {
        open_at = pos;
      }
      open = !open;
    }
  }
  if (open) out.push_back({Natural(open_at), Natural(std::uint64_t{size} * kLimbBits)});
  return out;
}

inline std::size_t flat_popcount(const BigInt& v) {
  std::size_t count = 0;
  for (auto limb = v.backend().limbs(), end = limb + v.backend().size(); limb != end; ++limb) {
    count += static_cast<std::size_t>(__builtin_popcountll(*limb));
  }
  return v.is_zero() ? 0 : count;
}

inline std::size_t flat_bit_length(const BigInt& v) {
  return v.is_zero() ? 0 : boost::multiprecision::msb(v) + 1;
}

/// Appends [s, e) to ascending runs, merging with a touching predecessor.
inline void append(std::vector<BitRun>& out, const Natural& s, const Natural& e) {
  if (s == e) return;
  if (!out.empty() && out.back().end == s) {
    out.back().end = e;
  } else {
    out.push_back({s, e});
  }
}

/// Position in an ascending run list: even steps are run starts, odd
/// steps run ends.
struct Cursor {
  const BitRun* runs;
  std::size_t size;
  std::size_t i = 0;

  bool done() const { return i == 2 * size; }
  bool inside() const { return i % 2 == 1; }  // between a start and its end
  const Natural& at() const { return i % 2 == 0 ? runs[i / 2].start : runs[i / 2].end; }
};

/// Appends the runs of c from position pos on.
inline void append_rest(std::vector<BitRun>& out, Cursor& c, const Natural& pos) {
  if (c.inside()) {
    append(out, pos, c.runs[c.i / 2].end);
    ++c.i;
  }
  for (; !c.done(); c.i += 2) append(out, c.runs[c.i / 2].start, c.runs[c.i / 2].end);
}

/// Walks the positions [0, inf) in intervals on which both operands are
/// constant, calling step(pos, next, bit_a, bit_b) for each finite interval.
/// When one operand is exhausted and stop(a_done, b_done) holds, the rest
/// of the other is copied. Returns the position after the last interval
/// when both run out.
template <typename Step, typename Stop>
std::optional<Natural> sweep(Cursor a, Cursor b, std::vector<BitRun>& out, Step&& step,
                             Stop&& stop) {
  Natural pos;
  while (!a.done() || !b.done()) {
    if ((a.done() || b.done()) && stop(a.done(), b.done())) {
      append_rest(out, a.done() ? b : a, pos);
      return std::nullopt;
    }
    const Natural* next = nullptr;
    if (!a.done()) next = &a.at();
    if (!b.done() && (!next || b.at() < *next)) next = &b.at();
    const Natural at = *next;
    if (pos < at) step(pos, at, a.inside(), b.inside());
    pos = at;
    while (!a.done() && a.at() == at) ++a.i;
    while (!b.done() && b.at() == at) ++b.i;
  }
  return pos;
}

}  // namespace natural_detail

inline Natural::Natural(const BigInt& v) {
  if (v.sign() < 0) throw std::domain_error("Natural: negative value");
  if (natural_detail::flat_bit_length(v) <= kFlatBits) {
    set_flat(v);
  } else {
    runs_ = std::make_shared<const std::vector<BitRun>>(natural_detail::flat_runs(v));
  }
}

inline void Natural::set_flat(BigInt v) {
  if (natural_detail::flat_bit_length(v) > 128) {
    wide_ = std::make_shared<const BigInt>(std::move(v));
  } else {
    small_ = std::move(v);
  }
}

inline Natural Natural::from_runs(std::vector<BitRun> runs) {
  std::vector<BitRun> merged;
  merged.reserve(runs.size());
  for (auto& r : runs) {
    if (!(r.start < r.end)) throw std::invalid_argument("Natural: empty or reversed run");
    if (!merged.empty() && r.start < merged.back().end) {
      throw std::invalid_argument("Natural: runs overlap or are out of order");
    }
    natural_detail::append(merged, r.start, r.end);
  }
  return from_canonical(std::move(merged));
}

inline Natural Natural::from_canonical(std::vector<BitRun> merged) {
  Natural out;
  if (merged.empty()) return out;
  if (merged.back().end <= Natural(kFlatBits)) {
    BigInt v = 0;
    for (const auto& r : merged) {
      const auto s = static_cast<std::uint64_t>(r.start);
      const auto len = static_cast<std::uint64_t>(r.end) - s;
      v |= ((BigInt(1) << len) - 1) << s;
    }
    out.set_flat(std::move(v));
    return out;
  }
  out.runs_ = std::make_shared<const std::vector<BitRun>>(std::move(merged));
  return out;
}

inline std::shared_ptr<const std::vector<BitRun>> Natural::runs() const {
  return runs_ ? runs_ : std::make_shared<const std::vector<BitRun>>(natural_detail::flat_runs(flat()));
}

inline natural_detail::Cursor Natural::cursor(std::vector<BitRun>& scratch) const {
  if (runs_) return {runs_->data(), runs_->size()};
  scratch = natural_detail::flat_runs(flat());
  return {scratch.data(), scratch.size()};
}

inline bool operator==(const Natural& a, const Natural& b) {
  if (a.runs_ && b.runs_) return a.runs_ == b.runs_ || *a.runs_ == *b.runs_;
  if (a.runs_ || b.runs_) return false;
  return a.flat() == b.flat();
}

inline std::strong_ordering operator<=>(const Natural& a, const Natural& b) {
  if (!a.runs_ && !b.runs_) {
    const int c = a.flat().compare(b.flat());
    return c < 0 ? std::strong_ordering::less
                 : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }
  if (!a.runs_) return std::strong_ordering::less;  // flat values are the small ones
  if (!b.runs_) return std::strong_ordering::greater;
  // Compare from the top: the first differing run boundary decides.
  const auto& ra = *a.runs_;
  const auto& rb = *b.runs_;
  std::size_t i = ra.size(), j = rb.size();
  while (i > 0 && j > 0) {
    --i;
    --j;
    if (auto c = ra[i].end <=> rb[j].end; c != 0) return c;
    // Same top; the run reaching lower has a one where the other has a zero.
    if (auto c = rb[j].start <=> ra[i].start; c != 0) return c;
  }
  if (i > 0) return std::strong_ordering::greater;
  if (j > 0) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

inline Natural operator+(const Natural& a, const Natural& b) {
  if (!a.runs_ && !b.runs_) return Natural(BigInt(a.flat() + b.flat()));
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::vector<BitRun> scratch_a, scratch_b, out;
  bool carry = false;
  const auto tail = natural_detail::sweep(
      a.cursor(scratch_a), b.cursor(scratch_b), out,
      [&](const Natural& pos, const Natural& next, bool x, bool y) {
        const int s = int{x} + int{y};
        if (s == 0) {
          if (carry) natural_detail::append(out, pos, pos + 1);
          carry = false;
        } else if (s == 2) {
          natural_detail::append(out, carry ? pos : pos + 1, next);
          carry = true;
        } else if (!carry) {
          natural_detail::append(out, pos, next);
        }
      },
      [&](bool, bool) { return !carry; });
  if (carry) natural_detail::append(out, *tail, *tail + 1);
  return Natural::from_canonical(std::move(out));
}

inline Natural operator-(const Natural& a, const Natural& b) {
  if (!a.runs_ && !b.runs_) {
    if (a.flat() < b.flat()) throw std::domain_error("Natural: negative difference");
    return Natural(BigInt(a.flat() - b.flat()));
  }
  if (b.is_zero()) return a;
  std::vector<BitRun> scratch_a, scratch_b, out;
  auto ca = a.cursor(scratch_a), cb = b.cursor(scratch_b);
  // Identical top runs cancel.
  while (ca.size > 0 && cb.size > 0 && ca.runs[ca.size - 1] == cb.runs[cb.size - 1]) {
    --ca.size;
    --cb.size;
  }
  bool borrow = false;
  natural_detail::sweep(
      ca, cb, out,
      [&](const Natural& pos, const Natural& next, bool x, bool y) {
        if (x == y) {
          if (borrow) natural_detail::append(out, pos, next);
        } else if (x) {
          natural_detail::append(out, borrow ? pos + 1 : pos, next);
          borrow = false;
        } else {
          if (!borrow) natural_detail::append(out, pos, pos + 1);
          borrow = true;
        }
      },
      [&](bool, bool b_done) { return b_done && !borrow; });
  if (borrow) throw std::domain_error("Natural: negative difference");
  return Natural::from_canonical(std::move(out));
}

inline Natural Natural::shl(const Natural& k) const {
  if (is_zero() || k.is_zero()) return *this;
  if (!runs_ && k.fits_u64()) {
    const auto s = static_cast<std::uint64_t>(k);
    if (s + natural_detail::flat_bit_length(flat()) <= kFlatBits) return Natural(BigInt(flat() << s));
  }
  std::vector<BitRun> out;
  const auto held = runs();
  for (const auto& r : *held) out.push_back({r.start + k, r.end + k});
  return from_runs(std::move(out));
}

inline Natural Natural::shr(const Natural& k) const {
  if (k.is_zero()) return *this;
  if (!runs_) {
    if (!k.fits_u64() || static_cast<std::uint64_t>(k) >= kFlatBits) return Natural();
    return Natural(BigInt(flat() >> static_cast<std::uint64_t>(k)));
  }
  std::vector<BitRun> out;
  for (const auto& r : *runs_) {
    if (r.end <= k) continue;
    out.push_back({r.start <= k ? Natural() : r.start - k, r.end - k});
  }
  return from_runs(std::move(out));
}

inline std::string Natural::str() const {
  if (!runs_) return flat().str();
  std::string out = "[";
  for (std::size_t i = 0; i < runs_->size(); ++i) {
    if (i) out += ',';
    out += (*runs_)[i].start.str() + ':' + (*runs_)[i].end.str();
  }
  return out + "]";
}

inline std::ostream& operator<<(std::ostream& os, const Natural& v) { return os << v.str(); }

inline std::string to_text(const Natural& v) { return v.str(); }

/// True when the text form is plain decimal digits.
inline bool is_decimal_text(std::string_view text) {
  return !text.empty() && text.find_first_not_of("0123456789") == std::string_view::npos;
}

inline Natural power_of_two(const Natural& exponent) {
  return Natural(1).shl(exponent);
}

/// Number of trailing zero bits; zero for zero.
inline Natural trailing_zeros(const Natural& v) {
  if (v.is_zero()) return 0;
  if (v.is_flat()) return boost::multiprecision::lsb(v.big());
  return v.runs()->front().start;
}

/// Position of the highest set bit plus one; zero for zero.
inline Natural bit_length(const Natural& v) {
  if (v.is_flat()) return natural_detail::flat_bit_length(v.big());
  return v.runs()->back().end;
}

inline Natural popcount(const Natural& v) {
  if (v.is_flat()) return natural_detail::flat_popcount(v.big());
  Natural n;
  const auto held = v.runs();
  for (const auto& r : *held) n += r.end - r.start;
  return n;
}

/// Positions of the set bits, ascending, if there are at most `limit` of
/// them.
inline std::optional<std::vector<Natural>> set_bits(const Natural& v, std::size_t limit) {
  if (popcount(v) > limit) return std::nullopt;
  std::vector<Natural> out;
  const auto held = v.runs();
  for (const auto& r : *held) {
    for (Natural p = r.start; p < r.end; ++p) out.push_back(p);
  }
  return out;
}

namespace natural_detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Natural parse() {
    Natural v = value(0);
    if (at_ != text_.size()) fail();
    return v;
  }

 private:
  Natural value(int depth) {
    if (depth > 64) fail();
    if (at_ < text_.size() && text_[at_] == '[') {
      ++at_;
      std::vector<BitRun> runs;
      for (;;) {
        Natural s = value(depth + 1);
        expect(':');
        Natural e = value(depth + 1);
        runs.push_back({std::move(s), std::move(e)});
        if (at_ < text_.size() && text_[at_] == ',') {
          ++at_;
          continue;
        }
        expect(']');
        break;
      }
      try {
        return Natural::from_runs(std::move(runs));
      } catch (const std::invalid_argument&) {
        fail();
      }
    }
    const std::size_t begin = at_;
    while (at_ < text_.size() && text_[at_] >= '0' && text_[at_] <= '9') ++at_;
    if (at_ == begin) fail();
    return Natural(BigInt(std::string(text_.substr(begin, at_ - begin))));
  }

  void expect(char c) {
    if (at_ >= text_.size() || text_[at_] != c) fail();
    ++at_;
  }

  [[noreturn]] void fail() const {
    throw std::invalid_argument("not a natural number: '" + std::string(text_) + "'");
  }

  std::string_view text_;
  std::size_t at_ = 0;
};

}  // namespace natural_detail

/// Parses decimal digits or the run form. Signs, whitespace and other
/// separators are rejected.
inline Natural parse_natural(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty natural number");
  return natural_detail::Parser(text).parse();
}

}  // namespace vvv

#endif  // VVV_NATURAL_HPP_
