#include <gtest/gtest.h>

#include <tuple>

#include "support.hpp"
#include "unimech/jets.hpp"

using namespace unimech;
using testsupport::br;
using testsupport::Rng;

namespace {

constexpr double kTol = 1e-9;

JetElement random_jet(Rng& rng, bool so3, std::size_t nslots, double scale = 1.0) {
  return so3 ? rng.so3_jet(nslots, scale) : rng.sl2_jet(nslots, scale);
}

double scale_of(const JetElement& a) {
  double s = a.base.cwiseAbs().maxCoeff();
  for (const auto& m : a.slots) s = std::max(s, m.cwiseAbs().maxCoeff());
  return std::max(1.0, s);
}

G4 random_g4(Rng& rng, bool so3) {
  G4 m;
  for (auto& x : m) x = so3 ? rng.so3_alg() : rng.sl2_alg();
  return m;
}

GroupTag tag(bool so3) { return so3 ? GroupTag{GroupKind::SO, 3} : GroupTag{GroupKind::SL, 2}; }

}  // namespace

TEST(Combinatorics, Compositions) {
  const auto c3 = compositions(3);
  const std::vector<std::vector<int>> want3 = {{3}, {2, 1}, {1, 2}, {1, 1, 1}};
  EXPECT_EQ(c3, want3);
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(compositions(k).size(), std::size_t{1} << (k - 1));
  EXPECT_TRUE(compositions(0).empty());
}

TEST(Combinatorics, PartitionCoefficientTable) {
  EXPECT_EQ(partition_coefficient({5}), 1u);
  EXPECT_EQ(partition_coefficient({1, 2}), 2u);
  EXPECT_EQ(partition_coefficient({1, 1, 2}), 3u);
  // Coefficients of the fourth-order product, read off the term-by-term display.
  const std::vector<std::tuple<std::vector<int>, std::uint64_t>> k4 = {
      {{4}, 1}, {{3, 1}, 1}, {{2, 2}, 3}, {{1, 3}, 3}, {{2, 1, 1}, 1}, {{1, 2, 1}, 2}, {{1, 1, 2}, 3}, {{1, 1, 1, 1}, 1}};
  for (const auto& [c, n] : k4) EXPECT_EQ(partition_coefficient(c), n);
  const std::vector<std::tuple<std::vector<int>, std::uint64_t>> k3 = {{{3}, 1}, {{2, 1}, 1}, {{1, 2}, 2}, {{1, 1, 1}, 1}};
  for (const auto& [c, n] : k3) EXPECT_EQ(partition_coefficient(c), n);
  EXPECT_THROW(partition_coefficient({}), InvalidArgument);
  EXPECT_THROW(partition_coefficient({1, 0}), InvalidArgument);
}

TEST(Combinatorics, OrderedSetPartitions) {
  // Bell numbers.
  EXPECT_EQ(ordered_set_partitions(0b1).size(), 1u);
  EXPECT_EQ(ordered_set_partitions(0b11).size(), 2u);
  EXPECT_EQ(ordered_set_partitions(0b111).size(), 5u);
  for (const auto& p : ordered_set_partitions(0b111)) {
    unsigned all = 0;
    for (unsigned b : p) {
      EXPECT_EQ(all & b, 0u);
      all |= b;
    }
    EXPECT_EQ(all, 0b111u);
    EXPECT_TRUE(p.back() & 0b100u);
  }
  EXPECT_EQ(subset_label(0b101), "31");
  EXPECT_EQ(subset_label(0b111), "321");
}

TEST(TnG, ThirdOrderMatchesDisplay) {
  Rng rng(30);
  for (bool so3 : {true, false})
    for (int t = 0; t < 10; ++t) {
      const JetElement a = random_jet(rng, so3, 3), b = random_jet(rng, so3, 3);
      const JetElement r = tn_multiply(a, b);
      EXPECT_LE(jet_distance(r, testsupport::t3_display(a, b)), kTol * scale_of(r));
    }
}

TEST(TnG, FourthOrderMatchesDisplay) {
  Rng rng(31);
  for (bool so3 : {true, false})
    for (int t = 0; t < 10; ++t) {
      const JetElement a = random_jet(rng, so3, 4), b = random_jet(rng, so3, 4);
      const JetElement r = tn_multiply(a, b);
      EXPECT_LE(jet_distance(r, testsupport::t4_display(a, b)), kTol * scale_of(r));
    }
}

TEST(TnG, FirstOrderIsSemidirect) {
  Rng rng(32);
  const JetElement a = rng.so3_jet(1), b = rng.so3_jet(1);
  const JetElement r = tn_multiply(a, b);
  EXPECT_LE((r.slots[0] - (b.slots[0] + b.base.transpose() * a.slots[0] * b.base)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(TnG, GroupLaws) {
  Rng rng(33);
  for (bool so3 : {true, false})
    for (std::size_t n = 1; n <= 4; ++n)
      for (int t = 0; t < 5; ++t) {
        const JetElement a = random_jet(rng, so3, n), b = random_jet(rng, so3, n), c = random_jet(rng, so3, n);
        const JetElement ab_c = tn_multiply(tn_multiply(a, b), c), a_bc = tn_multiply(a, tn_multiply(b, c));
        EXPECT_LE(jet_distance(ab_c, a_bc), kTol * scale_of(ab_c)) << "n=" << n;
        const JetElement e = JetElement::unit(a.group, n);
        EXPECT_LE(jet_distance(tn_multiply(a, e), a), 1e-12 * scale_of(a));
        EXPECT_LE(jet_distance(tn_multiply(e, a), a), 1e-12 * scale_of(a));
        const JetElement ai = tn_inverse(a);
        EXPECT_LE(jet_distance(tn_multiply(a, ai), e), kTol * scale_of(a));
        EXPECT_LE(jet_distance(tn_multiply(ai, a), e), kTol * scale_of(a));
      }
}

TEST(IteratedTG, SecondOrderFormula) {
  Rng rng(34);
  const JetElement a = rng.so3_jet(3), b = rng.so3_jet(3);
  const JetElement r = iterated_multiply(a, b);
  const Matrix yi = b.base.transpose();
  auto Ad = [&](const Matrix& m) -> Matrix { return yi * m * b.base; };
  EXPECT_LE((r.slots[0] - (b.slots[0] + Ad(a.slots[0]))).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((r.slots[1] - (b.slots[1] + Ad(a.slots[1]))).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((r.slots[2] - (b.slots[2] + Ad(a.slots[2]) - br(b.slots[0], Ad(a.slots[1])))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IteratedTG, GroupLaws) {
  Rng rng(35);
  for (bool so3 : {true, false})
    for (std::size_t n = 1; n <= 3; ++n)
      for (int t = 0; t < 5; ++t) {
        const std::size_t ns = (std::size_t{1} << n) - 1;
        const JetElement a = random_jet(rng, so3, ns), b = random_jet(rng, so3, ns), c = random_jet(rng, so3, ns);
        const JetElement ab_c = iterated_multiply(iterated_multiply(a, b), c);
        const JetElement a_bc = iterated_multiply(a, iterated_multiply(b, c));
        EXPECT_LE(jet_distance(ab_c, a_bc), kTol * scale_of(ab_c)) << "n=" << n;
        const JetElement e = JetElement::unit(a.group, ns);
        const JetElement ai = iterated_inverse(a);
        EXPECT_LE(jet_distance(iterated_multiply(a, ai), e), kTol * scale_of(a));
        EXPECT_LE(jet_distance(iterated_multiply(ai, a), e), kTol * scale_of(a));
      }
}

TEST(IteratedTG, EmbeddingIsHomomorphism) {
  Rng rng(36);
  for (bool so3 : {true, false})
    for (std::size_t n = 1; n <= 3; ++n) {
      const JetElement a = random_jet(rng, so3, n), b = random_jet(rng, so3, n);
      const JetElement lhs = iterated_embed(tn_multiply(a, b));
      const JetElement rhs = iterated_multiply(iterated_embed(a), iterated_embed(b));
      EXPECT_LE(jet_distance(lhs, rhs), kTol * scale_of(lhs)) << "n=" << n;
    }
  EXPECT_THROW(iterated_embed(rng.so3_jet(4)), DimensionError);
  EXPECT_THROW(t3_embed(rng.so3_jet(2)), DimensionError);
}

TEST(IteratedTG, SlotCountErrors) {
  Rng rng(37);
  const JetElement a = rng.so3_jet(4), b = rng.so3_jet(4);
  EXPECT_THROW(iterated_multiply(a, b), DimensionError);
  EXPECT_THROW(iterated_inverse(a), DimensionError);
}

TEST(Factorization, RoundTrip) {
  Rng rng(38);
  for (bool so3 : {true, false})
    for (int t = 0; t < 10; ++t) {
      const G4 m = random_g4(rng, so3);
      const JetElement eta = random_jet(rng, so3, 3);
      const JetElement j = iterated_multiply(g4_embed(tag(so3), m), t3_embed(eta));
      const T3Factorization f = t3_factorize(j);
      for (std::size_t i = 0; i < 4; ++i) EXPECT_LE((f.g4[i] - m[i]).cwiseAbs().maxCoeff(), kTol * scale_of(j));
      EXPECT_LE(jet_distance(f.t3, eta), kTol * scale_of(j));
      EXPECT_LE(f.residual, kTol * scale_of(j));
    }
}

TEST(Factorization, GenericElement) {
  Rng rng(39);
  for (int t = 0; t < 10; ++t) {
    const JetElement j = rng.sl2_jet(7);
    const T3Factorization f = t3_factorize(j);
    EXPECT_LE(f.residual, kTol * scale_of(j));
    EXPECT_EQ(f.t3.base, j.base);
  }
  EXPECT_THROW(t3_factorize(rng.so3_jet(3)), DimensionError);
}

TEST(Factorization, ComplementProduct) {
  Rng rng(40);
  for (bool so3 : {true, false})
    for (int t = 0; t < 10; ++t) {
      const G4 m = random_g4(rng, so3), n = random_g4(rng, so3);
      const G4Product p = g4_product(tag(so3), m, n);
      EXPECT_LE((p.phi[0] - (m[0] + n[0])).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE((p.phi[1] - (m[1] + n[1])).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE((p.phi[2] - (m[2] + n[2] - br(n[0], m[1]))).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE((p.phi[3] - (m[3] + n[3])).cwiseAbs().maxCoeff(), 1e-12);
      const JetElement want{tag(so3), identity_matrix(tag(so3).d),
                            {zero_matrix(tag(so3).d), zero_matrix(tag(so3).d), Matrix(-br(n[1], m[3]))}};
      EXPECT_LE(jet_distance(p.gamma, want), 1e-12);
    }
}

TEST(Factorization, MixedProductComponents) {
  Rng rng(41);
  for (bool so3 : {true, false})
    for (int t = 0; t < 10; ++t) {
      const JetElement x = random_jet(rng, so3, 3);
      const G4 m = random_g4(rng, so3);
      const MixedProduct p = t3_g4_product(x, m);
      const Matrix xinv = checked_inverse(x.base);
      const Matrix want31 = x.base * (m[3] + br(m[1] - m[0], x.slots[0])) * xinv;
      EXPECT_LE((p.act[3] - want31).cwiseAbs().maxCoeff(), kTol * scale_of(x));
      EXPECT_LE((p.sigma.slots[1] - (x.slots[1] - br(m[1], x.slots[0]))).cwiseAbs().maxCoeff(), kTol * scale_of(x));
      EXPECT_LE((p.sigma.base - x.base).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(TangentJets, EmbeddingIsHomomorphism) {
  Rng rng(42);
  for (bool so3 : {true, false})
    for (std::size_t n = 1; n <= 3; ++n)
      for (int t = 0; t < 5; ++t) {
        const JetElement a = random_jet(rng, so3, n), b = random_jet(rng, so3, n);
        const TangentJet lhs = tangent_embed(tn_multiply(a, b));
        const TangentJet rhs = tangent_multiply(tangent_embed(a), tangent_embed(b));
        EXPECT_LE(tangent_distance(lhs, rhs), kTol * scale_of(tn_multiply(a, b))) << "n=" << n;
      }
}

TEST(TangentJets, AdOnBaseGroupIsConjugation) {
  Rng rng(43);
  const JetElement h = rng.so3_jet(0);
  const Matrix v = rng.so3_alg();
  const auto r = tangent_Ad(h, {v});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_LE((r[0] - h.base * v * h.base.transpose()).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(tangent_embed(rng.so3_jet(0)), DimensionError);
}

TEST(JetErrors, MismatchAndValidation) {
  Rng rng(44);
  JetElement a = rng.so3_jet(2);
  JetElement g = a;
  g.group = {GroupKind::GL, 3};
  EXPECT_THROW(tn_multiply(a, g), GroupMismatch);
  EXPECT_THROW(tn_multiply(a, rng.so3_jet(3)), DimensionError);
  JetElement bad = a;
  bad.base(0, 0) += 0.1;
  EXPECT_THROW(bad.validate(), InvalidGroupElement);
  JetElement bad_slot = a;
  bad_slot.slots[0](0, 0) = 1.0;
  EXPECT_THROW(bad_slot.validate(), InvalidGroupElement);
  EXPECT_NO_THROW(a.validate());
  EXPECT_NO_THROW(rng.sl2_jet(3).validate());
  EXPECT_THROW(checked_inverse(Matrix::Zero(2, 2)), SingularMatrix);
  EXPECT_EQ(GroupTag::parse("SO3"), (GroupTag{GroupKind::SO, 3}));
  EXPECT_EQ(GroupTag::parse("GL4").name(), "GL4");
}
