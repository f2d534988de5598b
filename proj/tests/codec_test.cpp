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

#include <cstdint>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "vvv/codec.hpp"

namespace vvv {
namespace {

// Reference evaluations with plain 64-bit arithmetic, valid for small inputs.
std::uint64_t OraclePair(std::uint64_t x, std::uint64_t y) {
  return (std::uint64_t{1} << x) * (2 * y + 1) - 1;
}

std::uint64_t OracleSeq(const std::vector<std::uint64_t>& a) {
  std::uint64_t sum = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += a[i];
    total += std::uint64_t{1} << (sum + i);
  }
  return total - 1;
}

Natural RandomNatural(std::mt19937_64& rng, int bits) {
  BigInt r = 0;
  for (int i = 0; i < bits; i += 64) {
    r <<= 64;
    r += rng();
  }
  return BigInt(r >> (std::uniform_int_distribution<int>(0, bits)(rng) % 64));
}

TEST(PairTest, WorkedExamples) {
  EXPECT_EQ(pair(0, 0), 0);
  EXPECT_EQ(pair(9, 101), 103935);
  EXPECT_EQ(pair(5, 3), 223);
}

TEST(PairTest, UnpairWorkedExamples) {
  EXPECT_EQ(unpair(103935), std::make_pair(Natural(9), Natural(101)));
  EXPECT_EQ(unpair(0), std::make_pair(Natural(0), Natural(0)));
  EXPECT_EQ(unpair(1), std::make_pair(Natural(1), Natural(0)));
}

TEST(PairTest, MatchesDirectFormulaOnSmallGrid) {
  for (std::uint64_t x = 0; x < 20; ++x) {
    for (std::uint64_t y = 0; y < 200; ++y) {
      ASSERT_EQ(pair(x, y), OraclePair(x, y)) << x << "," << y;
    }
  }
}

TEST(PairTest, BijectiveOnInitialSegment) {
  // Each z < 2^16 is hit by exactly one (x, y), found by brute force.
  std::vector<int> hits(1 << 16, 0);
  for (std::uint64_t x = 0; x < 17; ++x) {
    for (std::uint64_t y = 0; OraclePair(x, y) < hits.size(); ++y) {
      ++hits[OraclePair(x, y)];
    }
  }
  for (std::size_t z = 0; z < hits.size(); ++z) {
    ASSERT_EQ(hits[z], 1) << z;
    auto [x, y] = unpair(z);
    ASSERT_EQ(pair(x, y), z);
  }
}

TEST(PairTest, RoundTripsLargeOperands) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Natural x = rng() % 4096;
    Natural y = RandomNatural(rng, 512);
    ASSERT_EQ(unpair(pair(x, y)), std::make_pair(x, y));
  }
}

TEST(PairTest, TowerExponents) {
  // pair(2^70000, 0) = 2^(2^70000) - 1: one run of ones ending at 2^70000.
  const Natural e = power_of_two(70000);
  const Natural z = pair(e, 0);
  EXPECT_EQ(z.str(), "[0:[70000:70001]]");
  EXPECT_EQ(popcount(z), e);
  EXPECT_EQ(unpair(z), std::make_pair(e, Natural(0)));
  const Natural w = pair(e + 5, 12345);
  EXPECT_EQ(unpair(w), std::make_pair(e + 5, Natural(12345)));
  EXPECT_LT(z, w);
}

TEST(TripleTest, Examples) {
  EXPECT_EQ(encode_triple(1, 1, 1), 0);
  EXPECT_EQ(encode_triple(2, 1, 1), 1);
  EXPECT_EQ(decode_triple(0), std::make_tuple(Natural(1), Natural(1), Natural(1)));
  EXPECT_EQ(decode_triple(1), std::make_tuple(Natural(2), Natural(1), Natural(1)));
}

TEST(TripleTest, LargeExampleIsMersenneNumber) {
  // pair(pair(9, 101), 0) = 2^103935 - 1.
  Natural code = encode_triple(10, 102, 1);
  EXPECT_EQ(code + 1, power_of_two(103935));
  EXPECT_EQ(popcount(code), 103935u);
  EXPECT_EQ(decode_triple(code),
            std::make_tuple(Natural(10), Natural(102), Natural(1)));
}

TEST(TripleTest, RejectsZeroArguments) {
  EXPECT_THROW(encode_triple(0, 1, 1), std::domain_error);
  EXPECT_THROW(encode_triple(1, 0, 1), std::domain_error);
  EXPECT_THROW(encode_triple(1, 1, 0), std::domain_error);
}

TEST(TripleTest, RoundTripsCube) {
  for (int m = 1; m <= 16; ++m) {
    for (int n = 1; n <= 16; ++n) {
      for (int q = 1; q <= 16; ++q) {
        ASSERT_EQ(decode_triple(encode_triple(m, n, q)),
                  std::make_tuple(Natural(m), Natural(n), Natural(q)));
      }
    }
  }
}

TEST(TripleTest, DecodeThenEncodeOnInitialSegment) {
  for (int z = 0; z < 100000; ++z) {
    auto [m, n, q] = decode_triple(z);
    ASSERT_EQ(encode_triple(m, n, q), z);
  }
}

TEST(SeqTest, Examples) {
  EXPECT_EQ(encode_seq({5, 3, 2}), 4639);
  EXPECT_EQ(encode_seq({5, 3, 2}), OracleSeq({5, 3, 2}));
  EXPECT_EQ(encode_seq({0}), 0);
  EXPECT_EQ(encode_seq({0, 0}), 2);
  EXPECT_EQ(decode_seq(4639), (std::vector<Natural>{5, 3, 2}));
  EXPECT_EQ(decode_seq(0), (std::vector<Natural>{0}));
  EXPECT_EQ(decode_seq(2), (std::vector<Natural>{0, 0}));
}

TEST(SeqTest, RejectsEmptySequence) {
  EXPECT_THROW(encode_seq(std::span<const Natural>()), std::domain_error);
}

TEST(SeqTest, ExhaustiveShortSequences) {
  std::vector<std::uint64_t> seq;
  std::function<void()> visit = [&] {
    if (!seq.empty()) {
      Natural t = encode_seq(std::span<const std::uint64_t>(seq));
      ASSERT_EQ(t, OracleSeq(seq));
      auto back = decode_seq(t);
      ASSERT_EQ(back.size(), seq.size());
      for (std::size_t i = 0; i < seq.size(); ++i) ASSERT_EQ(back[i], seq[i]);
    }
    if (seq.size() == 4) return;  // length 5 and 6 are covered in acceptance
    for (std::uint64_t v = 0; v <= 8; ++v) {
      seq.push_back(v);
      visit();
      seq.pop_back();
    }
  };
  visit();
}

TEST(SeqTest, DecodeThenEncodeWithPopcount) {
  for (std::uint64_t t = 0; t < (1u << 16); ++t) {
    auto seq = decode_seq(t);
    ASSERT_EQ(seq.size(), static_cast<std::size_t>(__builtin_popcountll(t + 1)));
    ASSERT_EQ(encode_seq(std::span<const Natural>(seq)), t);
  }
}

TEST(SeqTest, RoundTripsLargeCodes) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Natural t = RandomNatural(rng, 512);
    auto seq = decode_seq(t);
    ASSERT_EQ(seq.size(), popcount(t + 1));
    ASSERT_EQ(encode_seq(std::span<const Natural>(seq)), t);
  }
}

std::vector<ParamSchema> Grids(std::vector<std::uint64_t> counts) {
  std::vector<ParamSchema> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.push_back({"p" + std::to_string(i), 0.0, 1.0, counts[i]});
  }
  return out;
}

TEST(ConfigCodecTest, AllZeroIsCodeZero) {
  PhaseShares shares{1, 1, 1};
  EXPECT_EQ(encode_config(Settings{{0, 0, 0}}, shares), 0);
  auto grids = Grids({4, 4, 4});
  EXPECT_EQ(decode_config(0, shares, grids), Decoded(Settings{{0, 0, 0}}));
}

TEST(ConfigCodecTest, ComposesPhaseCodes) {
  PhaseShares shares{2, 1, 1};
  Settings s{{1, 0, 2, 0}};
  Natural expected = encode_triple(encode_seq({1, 0}) + 1, encode_seq({2}) + 1,
                                   encode_seq({0}) + 1);
  // encode_seq(1,0) = 5, encode_seq(2) = 3, so pair(pair(5,3),0) = 2^223 - 1.
  EXPECT_EQ(expected + 1, power_of_two(223));
  EXPECT_EQ(encode_config(s, shares), expected);
  EXPECT_EQ(decode_config(expected, shares, Grids({8, 8, 8, 8})), Decoded(s));
}

TEST(ConfigCodecTest, DoublyExponentialCodes) {
  // Indices (5,3 | 2 | 0): phase codes 543, 3, 0, so the code is
  // 2^P - 1 with P = pair(543, 3) = 2^543 * 7 - 1.
  PhaseShares shares{2, 1, 1};
  Settings s{{5, 3, 2, 0}};
  const BigInt p = (BigInt(1) << 543) * 7 - 1;
  const Natural code = encode_config(s, shares);
  EXPECT_EQ(code, encode_triple(encode_seq({5, 3}) + 1, encode_seq({2}) + 1,
                                encode_seq({0}) + 1));
  EXPECT_EQ(code + 1, power_of_two(p));
  EXPECT_EQ(code.str(), "[0:" + p.str() + "]");
  EXPECT_EQ(decode_config(code, shares, Grids({8, 8, 8, 8})), Decoded(s));
}

TEST(ConfigCodecTest, ExhaustiveSmallGrids) {
  // Every share split of n <= 4 parameters, every grid with counts <= 4.
  for (std::size_t n = 0; n <= 4; ++n) {
    for (std::size_t a = 0; a <= n; ++a) {
      for (std::size_t b = 0; a + b <= n; ++b) {
        const PhaseShares shares{a, b, n - a - b};
        std::vector<std::uint64_t> counts(n, 1);
        for (;;) {
          auto grids = Grids(counts);
          std::vector<std::uint64_t> idx(n, 0);
          for (;;) {
            Settings s{idx};
            ASSERT_EQ(decode_config(encode_config(s, shares), shares, grids), Decoded(s));
            std::size_t i = 0;
            while (i < n && ++idx[i] == counts[i]) idx[i++] = 0;
            if (i == n) break;
          }
          std::size_t i = 0;
          while (i < n && ++counts[i] == 5) counts[i++] = 1;
          if (i == n) break;
        }
      }
    }
  }
}

TEST(ConfigCodecTest, ZeroSharePhaseContributesZero) {
  PhaseShares shares{1, 0, 1};
  Settings s{{2, 3}};
  Natural code = encode_config(s, shares);
  EXPECT_EQ(code, encode_triple(encode_seq({2}) + 1, 1, encode_seq({3}) + 1));
  EXPECT_EQ(decode_config(code, shares, Grids({4, 4})), Decoded(s));
}

TEST(ConfigCodecTest, ArityMismatchIsInfeasible) {
  PhaseShares shares{2, 1, 1};
  Natural veni = encode_seq({0, 0, 0});
  Natural code = encode_triple(veni + 1, 1, 1);
  auto d = decode_config(code, shares, Grids({4, 4, 4, 4}));
  ASSERT_TRUE(std::holds_alternative<Infeasible>(d));
  EXPECT_EQ(std::get<Infeasible>(d).kind, InfeasibleKind::kArity);
  EXPECT_EQ(std::get<Infeasible>(d).phase, Phase::kVeni);
}

TEST(ConfigCodecTest, OutOfGridIsInfeasible) {
  PhaseShares shares{1, 1, 1};
  Natural code = encode_config(Settings{{0, 0, 5}}, shares);
  auto d = decode_config(code, shares, Grids({4, 4, 4}));
  ASSERT_TRUE(std::holds_alternative<Infeasible>(d));
  EXPECT_EQ(std::get<Infeasible>(d).kind, InfeasibleKind::kOutOfGrid);
  EXPECT_EQ(std::get<Infeasible>(d).phase, Phase::kVici);
}

TEST(ConfigCodecTest, NonzeroEmptySlotIsInfeasible) {
  PhaseShares shares{1, 0, 1};
  Natural code = encode_triple(1, 2, 1);
  auto d = decode_config(code, shares, Grids({4, 4}));
  ASSERT_TRUE(std::holds_alternative<Infeasible>(d));
  EXPECT_EQ(std::get<Infeasible>(d).kind, InfeasibleKind::kNonzeroEmptySlot);
}

TEST(ConfigCodecTest, DecodeIsTotalOnSmallCodes) {
  PhaseShares shares{2, 1, 1};
  auto grids = Grids({3, 2, 4, 2});
  int feasible = 0;
  for (int code = 0; code <= 10000; ++code) {
    Decoded d = decode_config(code, shares, grids);
    if (auto* s = std::get_if<Settings>(&d)) {
      ++feasible;
      ASSERT_EQ(encode_config(*s, shares), code);
    }
  }
  EXPECT_GT(feasible, 0);
}

TEST(ConfigCodecTest, SizeMismatchIsAnError) {
  EXPECT_THROW(encode_config(Settings{{0, 0}}, PhaseShares{1, 1, 1}),
               std::invalid_argument);
  EXPECT_THROW(decode_config(0, PhaseShares{1, 1, 1}, Grids({2, 2})),
               std::invalid_argument);
}

TEST(CodecTextTest, ParsesDecimal) {
  EXPECT_EQ(parse_natural("103935"), 103935);
  EXPECT_EQ(to_text(parse_natural("123456789012345678901234567890")),
            "123456789012345678901234567890");
  EXPECT_THROW(parse_natural("-1"), std::invalid_argument);
  EXPECT_THROW(parse_natural(""), std::invalid_argument);
  EXPECT_THROW(parse_natural("12a"), std::invalid_argument);
}

}  // namespace
}  // namespace vvv
