#include <gtest/gtest.h>

#include "latentpara/errors.hpp"
#include "latentpara/mask.hpp"
#include "latentpara/random.hpp"
#include "mask_oracle.hpp"

namespace lp = latentpara;

using lp::testing::counting_iou;
using lp::testing::random_mask;

TEST(MaskIou, IdenticalNonEmpty) {
  lp::BinaryMask a(3, 2, {1, 0, 1, 0, 1, 1});
  EXPECT_EQ(lp::mask_iou(a, a), 1.0);
}

TEST(MaskIou, Disjoint) {
  lp::BinaryMask a(3, 2, {1, 1, 0, 0, 0, 0});
  lp::BinaryMask b(3, 2, {0, 0, 0, 1, 1, 0});
  EXPECT_EQ(lp::mask_iou(a, b), 0.0);
}

TEST(MaskIou, TwoOfSix) {
  lp::BinaryMask a(3, 2, {1, 1, 1, 1, 0, 0});
  lp::BinaryMask b(3, 2, {0, 1, 1, 0, 1, 1});
  EXPECT_NEAR(lp::mask_iou(a, b), 0.333333, 1e-6);
  EXPECT_EQ(lp::mask_iou(a, b), 2.0 / 6.0);
}

TEST(MaskIou, BothEmptyIsOne) {
  lp::BinaryMask a(4, 4), b(4, 4);
  EXPECT_EQ(lp::mask_iou(a, b), 1.0);
  lp::BinaryMask c(0, 0), d(0, 0);
  EXPECT_EQ(lp::mask_iou(c, d), 1.0);
}

TEST(MaskIou, ShapeMismatchThrows) {
  EXPECT_THROW(lp::mask_iou(lp::BinaryMask(2, 3), lp::BinaryMask(3, 2)), lp::DimensionMismatch);
}

TEST(MaskIou, MatchesCountingOracleOnRandomPairs) {
  lp::Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t w = 1 + rng.next_u64() % 24, h = 1 + rng.next_u64() % 24;
    const double da = rng.uniform(), db = rng.uniform();
    const auto a = random_mask(rng, w, h, da * da);
    const auto b = random_mask(rng, w, h, db * db);
    const double iou = lp::mask_iou(a, b);
    EXPECT_EQ(iou, counting_iou(a, b)) << trial;
    EXPECT_EQ(iou, lp::mask_iou(b, a));
    EXPECT_GE(iou, 0.0);
    EXPECT_LE(iou, 1.0);
    if (a.set_count() > 0 || b.set_count() > 0) {
      EXPECT_EQ(iou == 1.0, a == b);
    }
  }
}

TEST(Rle, EncodesZerosFirst) {
  lp::BinaryMask m(3, 2, {1, 1, 0, 0, 0, 1});
  EXPECT_EQ(lp::rle_encode(m), (std::vector<std::uint64_t>{0, 2, 3, 1}));
  lp::BinaryMask z(2, 2);
  EXPECT_EQ(lp::rle_encode(z), (std::vector<std::uint64_t>{4}));
}

TEST(Rle, RoundTripsRandomMasks) {
  lp::Rng rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t w = 1 + rng.next_u64() % 17, h = 1 + rng.next_u64() % 17;
    const auto m = random_mask(rng, w, h, rng.uniform());
    EXPECT_EQ(lp::rle_decode(w, h, lp::rle_encode(m)), m);
  }
}

TEST(Rle, RejectsWrongTotal) {
  EXPECT_THROW(lp::rle_decode(2, 2, std::vector<std::uint64_t>{1, 2}), std::invalid_argument);
  EXPECT_THROW(lp::rle_decode(2, 2, std::vector<std::uint64_t>{3, 2}), std::invalid_argument);
}

TEST(BinaryMask, RejectsWrongBitCount) {
  EXPECT_THROW(lp::BinaryMask(2, 2, {1, 0, 1}), std::invalid_argument);
}
