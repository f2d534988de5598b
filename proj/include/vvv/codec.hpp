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

// Bijections between parameter configurations and single natural numbers.
//
//   pair(x, y)          = 2^x (2y + 1) - 1                 N x N -> N
//   encode_triple(m,n,q) = pair(pair(m-1, n-1), q-1)        N+^3  -> N
//   encode_seq(a1..ak)  = sum_i 2^(a1+..+ai + i-1) - 1      N^k   -> N
//
// A configuration code is the triple encoding of the three per-phase
// sequence codes, each shifted by one. A phase without parameters
// contributes the phase code 0.

#ifndef VVV_CODEC_HPP_
#define VVV_CODEC_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "vvv/natural.hpp"

namespace vvv {

/// Quantization grid for one parameter: index i maps to min + i * step.
struct ParamSchema {
  std::string name;
  double min = 0.0;
  double step = 1.0;
  std::uint64_t count = 1;

  double value(std::uint64_t index) const {
    return min + static_cast<double>(index) * step;
  }

  /// Empty when the schema is well formed, otherwise one message per
  /// violated constraint.
  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (name.empty()) out.push_back("parameter name is empty");
    if (!std::isfinite(min)) out.push_back(name + ": min is not finite");
    if (!(step > 0.0) || !std::isfinite(step)) {
      out.push_back(name + ": step must be > 0");
    }
    if (count == 0) out.push_back(name + ": count must be >= 1");
    return out;
  }

  bool operator==(const ParamSchema&) const = default;
};

enum class Phase { kVeni = 0, kVidi = 1, kVici = 2 };

inline constexpr Phase kPhases[] = {Phase::kVeni, Phase::kVidi, Phase::kVici};

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kVeni: return "veni";
    case Phase::kVidi: return "vidi";
    case Phase::kVici: return "vici";
  }
  return "?";
}

/// Number of parameters owned by each phase.
struct PhaseShares {
  std::size_t veni = 0;
  std::size_t vidi = 0;
  std::size_t vici = 0;

  std::size_t total() const { return veni + vidi + vici; }

  std::size_t of(Phase p) const {
    switch (p) {
      case Phase::kVeni: return veni;
      case Phase::kVidi: return vidi;
      case Phase::kVici: return vici;
    }
    return 0;
  }

  /// Offset of the phase's first parameter in a flat settings list.
  std::size_t offset(Phase p) const {
    switch (p) {
      case Phase::kVeni: return 0;
      case Phase::kVidi: return veni;
      case Phase::kVici: return veni + vidi;
    }
    return 0;
  }

  bool operator==(const PhaseShares&) const = default;
};

/// One grid index per parameter, Veni parameters first, then Vidi, then Vici.
struct Settings {
  std::vector<std::uint64_t> indices;

  std::span<const std::uint64_t> phase(const PhaseShares& shares,
                                       Phase p) const {
    return std::span<const std::uint64_t>(indices)
        .subspan(shares.offset(p), shares.of(p));
  }

  bool operator==(const Settings&) const = default;
};

enum class InfeasibleKind {
  kArity,           // phase sequence length differs from its share
  kOutOfGrid,       // an index is >= its schema count
  kNonzeroEmptySlot  // a phase without parameters has a nonzero code
};

inline const char* infeasible_kind_name(InfeasibleKind k) {
  switch (k) {
    case InfeasibleKind::kArity: return "arity";
    case InfeasibleKind::kOutOfGrid: return "out-of-grid";
    case InfeasibleKind::kNonzeroEmptySlot: return "nonzero-empty-slot";
  }
  return "?";
}

struct Infeasible {
  InfeasibleKind kind;
  Phase phase;
  std::string detail;

  bool operator==(const Infeasible&) const = default;
};

using Decoded = std::variant<Settings, Infeasible>;

// ---------------------------------------------------------------------------
// Pairs.

inline Natural pair(const Natural& x, const Natural& y) {
  return (y.shl(1) + 1).shl(x) - 1;
}

inline std::pair<Natural, Natural> unpair(const Natural& z) {
  const Natural w = z + 1;
  Natural x = trailing_zeros(w);
  return {x, w.shr(x).shr(1)};
}

// ---------------------------------------------------------------------------
// Triples over positive naturals.

inline Natural encode_triple(const Natural& m, const Natural& n,
                             const Natural& q) {
  if (m.is_zero() || n.is_zero() || q.is_zero()) {
    throw std::domain_error("encode_triple: arguments must be >= 1");
  }
  return pair(pair(m - 1, n - 1), q - 1);
}

inline std::tuple<Natural, Natural, Natural> decode_triple(const Natural& z) {
  auto [inner, q] = unpair(z);
  auto [m, n] = unpair(inner);
  return {m + 1, n + 1, q + 1};
}

// ---------------------------------------------------------------------------
// Finite sequences.

inline Natural encode_seq(std::span<const Natural> seq) {
  if (seq.empty()) {
    throw std::domain_error("encode_seq: sequence must be non-empty");
  }
  // One set bit per element, at the running sum of (element + 1) minus 1.
  std::vector<BitRun> bits;
  Natural position = seq[0];
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0) position += seq[i] + 1;
    if (!bits.empty() && bits.back().end == position) {
      bits.back().end = position + 1;
    } else {
      bits.push_back({position, position + 1});
    }
  }
  return Natural::from_runs(std::move(bits)) - 1;
}

inline Natural encode_seq(std::span<const std::uint64_t> seq) {
  std::vector<Natural> wide(seq.begin(), seq.end());
  return encode_seq(std::span<const Natural>(wide));
}

inline Natural encode_seq(std::initializer_list<std::uint64_t> seq) {
  return encode_seq(std::span<const std::uint64_t>(seq.begin(), seq.size()));
}

inline constexpr std::size_t kMaxSeqLength = std::size_t{1} << 24;

/// Inverse of encode_seq; the result has popcount(t + 1) elements. Throws
/// length_error past kMaxSeqLength elements.
inline std::vector<Natural> decode_seq(const Natural& t) {
  auto bits = set_bits(t + 1, kMaxSeqLength);
  if (!bits) throw std::length_error("decode_seq: sequence too long to list");
  std::vector<Natural> out;
  out.reserve(bits->size());
  for (std::size_t i = 0; i < bits->size(); ++i) {
    out.push_back(i == 0 ? (*bits)[0] : (*bits)[i] - (*bits)[i - 1] - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Whole configurations.

/// Text form for messages; huge values are summarized.
inline std::string short_text(const Natural& v) {
  std::string s = v.str();
  if (s.size() <= 40) return s;
  return "a number of " + bit_length(v).str() + " bits";
}

inline Natural encode_phase(const Settings& s, const PhaseShares& shares,
                            Phase p) {
  if (shares.of(p) == 0) return 0;
  return encode_seq(s.phase(shares, p));
}

inline Natural encode_config(const Settings& s, const PhaseShares& shares) {
  if (s.indices.size() != shares.total()) {
    throw std::invalid_argument(
        "encode_config: settings have " + std::to_string(s.indices.size()) +
        " indices but shares sum to " + std::to_string(shares.total()));
  }
  return encode_triple(encode_phase(s, shares, Phase::kVeni) + 1,
                       encode_phase(s, shares, Phase::kVidi) + 1,
                       encode_phase(s, shares, Phase::kVici) + 1);
}

/// Decodes a code against declared shares and grids. Codes that do not
/// describe a configuration of the declared shape yield Infeasible.
inline Decoded decode_config(const Natural& code, const PhaseShares& shares,
                             std::span<const ParamSchema> schemas) {
  if (schemas.size() != shares.total()) {
    throw std::invalid_argument(
        "decode_config: " + std::to_string(schemas.size()) +
        " schemas but shares sum to " + std::to_string(shares.total()));
  }
  auto [m, n, q] = decode_triple(code);
  const Natural phase_codes[3] = {m - 1, n - 1, q - 1};

  Settings out;
  out.indices.reserve(shares.total());
  for (Phase p : kPhases) {
    const Natural& phase_code = phase_codes[static_cast<int>(p)];
    const std::size_t share = shares.of(p);
    if (share == 0) {
      if (!phase_code.is_zero()) {
        return Infeasible{InfeasibleKind::kNonzeroEmptySlot, p,
                          std::string(phase_name(p)) +
                              " has no parameters but its slot is nonzero"};
      }
      continue;
    }
    const Natural arity = popcount(phase_code + 1);
    if (arity != share) {
      return Infeasible{InfeasibleKind::kArity, p,
                        std::string(phase_name(p)) + " decodes to " +
                            short_text(arity) + " parameters, expected " +
                            std::to_string(share)};
    }
    const auto seq = decode_seq(phase_code);
    const std::size_t base = shares.offset(p);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const ParamSchema& schema = schemas[base + i];
      if (seq[i] >= schema.count) {
        return Infeasible{InfeasibleKind::kOutOfGrid, p,
                          schema.name + " index " + short_text(seq[i]) +
                              " >= count " + std::to_string(schema.count)};
      }
      out.indices.push_back(static_cast<std::uint64_t>(seq[i]));
    }
  }
  return out;
}

inline bool is_feasible(const Decoded& d) {
  return std::holds_alternative<Settings>(d);
}

/// Empty when every index lies inside its grid.
inline std::vector<std::string> settings_problems(
    const Settings& s, const PhaseShares& shares,
    std::span<const ParamSchema> schemas) {
  std::vector<std::string> out;
  if (s.indices.size() != shares.total()) {
    out.push_back("settings have " + std::to_string(s.indices.size()) +
                  " indices, expected " + std::to_string(shares.total()));
    return out;
  }
  if (schemas.size() != s.indices.size()) return out;
  for (std::size_t i = 0; i < s.indices.size(); ++i) {
    if (s.indices[i] >= schemas[i].count) {
      out.push_back(schemas[i].name + ": default index " +
                    std::to_string(s.indices[i]) + " >= count " +
                    std::to_string(schemas[i].count));
    }
  }
  return out;
}

}  // namespace vvv

#endif  // VVV_CODEC_HPP_
