#include <cmath>

#include <gtest/gtest.h>

#include "ds_oracle.h"
#include "sls/errors.h"
#include "sls/evidence.h"

namespace sls {
namespace {

constexpr double kTol = 1e-9;

const Frame kFrame5080({SpeedLimit::Kmh(50), SpeedLimit::Kmh(80)});
constexpr HypothesisSet k50 = 0b01;
constexpr HypothesisSet k80 = 0b10;
constexpr HypothesisSet kBoth = 0b11;

void ExpectSameMasses(const MassFunction& a, const MassFunction& b) {
  ASSERT_EQ(a.frame(), b.frame());
  for (HypothesisSet s = 1; s <= a.frame().full(); ++s) {
    EXPECT_NEAR(a.mass(s), b.mass(s), kTol) << "subset " << s;
  }
}

void ExpectNormalized(const MassFunction& m) {
  EXPECT_NEAR(m.total(), 1.0, kTol);
  for (const auto& [subset, w] : m.focal()) EXPECT_GE(w, 0.0);
}

TEST(FrameTest, SortsAndValidates) {
  const Frame frame({SpeedLimit::Kmh(80), SpeedLimit::Kmh(50)});
  EXPECT_EQ(frame.hypotheses().front(), SpeedLimit::Kmh(50));
  EXPECT_EQ(frame.Singleton(SpeedLimit::Kmh(80)), k80);
  EXPECT_THROW(Frame({}), FrameError);
  EXPECT_THROW(Frame({SpeedLimit::Kmh(50), SpeedLimit::Kmh(50)}), FrameError);
  EXPECT_THROW(Frame({SpeedLimit::Unknown()}), FrameError);
  std::vector<SpeedLimit> many;
  for (int kmh = 5; kmh <= 85; kmh += 5) many.push_back(SpeedLimit::Kmh(kmh));
  EXPECT_THROW(Frame{many}, FrameError);
  many.pop_back();
  EXPECT_EQ(Frame(many).size(), 16u);
}

TEST(FrameTest, FromReadingsIgnoresTruthAndUnknown) {
  const std::vector<SensorEvent> events{
      {0, TruthAnnotation{SpeedLimit::Kmh(30)}},
      {0, VisionEvent{SpeedLimit::Unknown(), SubSign::kEndOfLimit}},
      {1, CartoEvent{SpeedLimit::Kmh(80)}},
      {2, VisionEvent{SpeedLimit::Kmh(50)}},
  };
  EXPECT_EQ(Frame::FromReadings(events), kFrame5080);
  EXPECT_EQ(Frame::FromReadings({}), std::nullopt);
}

TEST(MassFunctionTest, RejectsInvalidAssignments) {
  EXPECT_THROW(MassFunction(kFrame5080, {{k50, 0.5}}), ConfigError);
  EXPECT_THROW(MassFunction(kFrame5080, {{0, 1.0}}), FrameError);
  EXPECT_THROW(MassFunction(kFrame5080, {{0b100, 1.0}}), FrameError);
  EXPECT_THROW(MassFunction(kFrame5080, {{k50, 1.5}, {k80, -0.5}}), ConfigError);
}

TEST(MassFromReadingTest, SimpleSupport) {
  const MassFunction m = MassFromReading(kFrame5080, SpeedLimit::Kmh(80), 0.9);
  EXPECT_NEAR(m.mass(k80), 0.9, kTol);
  EXPECT_NEAR(m.mass(kBoth), 0.1, kTol);
  EXPECT_EQ(m.mass(k50), 0.0);
  ExpectNormalized(m);
}

TEST(MassFromReadingTest, UnknownIsVacuous) {
  const MassFunction m = MassFromReading(kFrame5080, SpeedLimit::Unknown(), 0.7);
  EXPECT_EQ(m.focal().size(), 1u);
  EXPECT_EQ(m.mass(kBoth), 1.0);
}

TEST(MassFromReadingTest, FullTrust) {
  const MassFunction m = MassFromReading(kFrame5080, SpeedLimit::Kmh(50), 1.0);
  EXPECT_EQ(m.focal().size(), 1u);
  EXPECT_EQ(m.mass(k50), 1.0);
}

TEST(MassFromReadingTest, Errors) {
  EXPECT_THROW(MassFromReading(kFrame5080, SpeedLimit::Kmh(90), 0.9), FrameError);
  EXPECT_THROW(MassFromReading(kFrame5080, SpeedLimit::Kmh(50), 0.0), ConfigError);
  EXPECT_THROW(MassFromReading(kFrame5080, SpeedLimit::Kmh(50), 1.1), ConfigError);
}

TEST(CombineTest, HandExpandedAgreement) {
  // {80}:.9,Θ:.1 with {80}:.8,Θ:.2: {80} gets .72+.18+.08, Θ gets .02, K = 0.
  const MassFunction fused =
      Combine(MassFromReading(kFrame5080, SpeedLimit::Kmh(80), 0.9),
              MassFromReading(kFrame5080, SpeedLimit::Kmh(80), 0.8));
  EXPECT_NEAR(fused.mass(k80), 0.98, kTol);
  EXPECT_NEAR(fused.mass(kBoth), 0.02, kTol);
  EXPECT_EQ(fused.mass(k50), 0.0);
  EXPECT_NEAR(Plausibility(fused, SpeedLimit::Kmh(80)), 1.0, kTol);
  EXPECT_NEAR(Plausibility(fused, SpeedLimit::Kmh(50)), 0.02, kTol);
}

TEST(CombineTest, HandExpandedConflict) {
  // {50}:.9,Θ:.1 with {80}:.8,Θ:.2: K = .72, so {50} = .18/.28, {80} = .08/.28, Θ = .02/.28.
  const MassFunction fused =
      Combine(MassFromReading(kFrame5080, SpeedLimit::Kmh(50), 0.9),
              MassFromReading(kFrame5080, SpeedLimit::Kmh(80), 0.8));
  EXPECT_NEAR(fused.mass(k50), 0.18 / 0.28, kTol);
  EXPECT_NEAR(fused.mass(k80), 0.08 / 0.28, kTol);
  EXPECT_NEAR(fused.mass(kBoth), 0.02 / 0.28, kTol);
}

TEST(CombineTest, TotalConflictThrows) {
  EXPECT_THROW(Combine(MassFromReading(kFrame5080, SpeedLimit::Kmh(50), 1.0),
                       MassFromReading(kFrame5080, SpeedLimit::Kmh(80), 1.0)),
               ConflictError);
}

TEST(CombineTest, FrameMismatchThrows) {
  const Frame other({SpeedLimit::Kmh(50), SpeedLimit::Kmh(90)});
  EXPECT_THROW(Combine(MassFunction::Vacuous(kFrame5080), MassFunction::Vacuous(other)),
               FrameError);
}

TEST(PlausibilityTest, Basics) {
  const MassFunction vacuous = MassFunction::Vacuous(kFrame5080);
  EXPECT_EQ(Plausibility(vacuous, SpeedLimit::Kmh(50)), 1.0);
  EXPECT_EQ(Plausibility(vacuous, SpeedLimit::Kmh(80)), 1.0);
  const MassFunction certain = MassFromReading(kFrame5080, SpeedLimit::Kmh(50), 1.0);
  EXPECT_EQ(Plausibility(certain, SpeedLimit::Kmh(80)), 0.0);
  EXPECT_THROW(Plausibility(certain, SpeedLimit::Kmh(90)), FrameError);
}

TEST(DsDecideTest, SpecCases) {
  const ReliabilityModel rel;
  EXPECT_EQ(DsDecide(SpeedLimit::Kmh(80), SpeedLimit::Kmh(80), kFrame5080, rel),
            SpeedLimit::Kmh(80));
  const Frame with90({SpeedLimit::Kmh(50), SpeedLimit::Kmh(90)});
  EXPECT_EQ(DsDecide(SpeedLimit::Unknown(), SpeedLimit::Kmh(90), with90, rel),
            SpeedLimit::Kmh(90));
  EXPECT_EQ(DsDecide(SpeedLimit::Unknown(), SpeedLimit::Unknown(), with90, rel),
            SpeedLimit::Unknown());
}

TEST(DsDecideTest, TieGoesToLowerLimit) {
  const ReliabilityModel equal{.vision_trust = 0.8, .carto_trust = 0.8};
  EXPECT_EQ(DsDecide(SpeedLimit::Kmh(80), SpeedLimit::Kmh(50), kFrame5080, equal),
            SpeedLimit::Kmh(50));
  EXPECT_EQ(DsDecide(SpeedLimit::Kmh(50), SpeedLimit::Kmh(80), kFrame5080, equal),
            SpeedLimit::Kmh(50));
}

TEST(DsDecideTest, VisionOutweighsCartoAtDefaultTrust) {
  EXPECT_EQ(DsDecide(SpeedLimit::Kmh(50), SpeedLimit::Kmh(80), kFrame5080, ReliabilityModel{}),
            SpeedLimit::Kmh(50));
}

TEST(DsRunTest, VisionOnlyTracksVision) {
  const std::vector<SensorEvent> events{{0, VisionEvent{SpeedLimit::Kmh(70)}},
                                        {10, LaneChangeEvent{Side::kRight}},
                                        {20, VisionEvent{SpeedLimit::Kmh(110)}},
                                        {30, VisionEvent{SpeedLimit::Kmh(90)}}};
  const Trace trace = DsRun(events, ReliabilityModel{});
  ASSERT_EQ(trace.size(), 4u);
  EXPECT_EQ(trace[0].validated, "70");
  EXPECT_EQ(trace[1].validated, "70");
  EXPECT_EQ(trace[2].validated, "110");
  EXPECT_EQ(trace[3].validated, "90");
  EXPECT_EQ(trace[3].mode_before, "ds");
}

TEST(DsRunTest, NoReadingsStaysUnknown) {
  const Trace trace = DsRun({{0, TruthAnnotation{SpeedLimit::Kmh(50)}}}, ReliabilityModel{});
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(trace[0].validated, "unknown");
}

TEST(DsRunTest, Deterministic) {
  const std::vector<SensorEvent> events{{0, CartoEvent{SpeedLimit::Kmh(80)}},
                                        {5, VisionEvent{SpeedLimit::Kmh(50)}}};
  EXPECT_EQ(WriteTrace(DsRun(events, ReliabilityModel{})),
            WriteTrace(DsRun(events, ReliabilityModel{})));
}

// Algebraic properties against the exhaustive subset-pair oracle.
class CombineAlgebraTest : public ::testing::TestWithParam<std::size_t> {};

TEST_P(CombineAlgebraTest, MatchesBruteForceAndLaws) {
  SplitMix64 rng(1000 + GetParam());
  for (int i = 0; i < 200; ++i) {
    const Frame frame = testing::RandomFrame(rng, GetParam());
    const MassFunction a = testing::RandomMass(rng, frame, 1 + rng.NextBelow(5));
    const MassFunction b = testing::RandomMass(rng, frame, 1 + rng.NextBelow(5));
    const MassFunction c = testing::RandomMass(rng, frame, 1 + rng.NextBelow(5));

    const MassFunction ab = Combine(a, b);
    const testing::DenseMass oracle =
        testing::BruteForceCombine(testing::ToDense(a), testing::ToDense(b));
    for (HypothesisSet s = 1; s <= frame.full(); ++s) {
      ASSERT_NEAR(ab.mass(s), oracle[s], kTol);
      ASSERT_NEAR(Plausibility(ab, s), testing::BruteForcePlausibility(oracle, s), kTol);
    }
    ExpectNormalized(ab);
    ExpectSameMasses(ab, Combine(b, a));
    ExpectSameMasses(Combine(ab, c), Combine(a, Combine(b, c)));
    ExpectSameMasses(Combine(a, MassFunction::Vacuous(frame)), a);
    ExpectSameMasses(Combine(MassFunction::Vacuous(frame), a), a);
  }
}

TEST_P(CombineAlgebraTest, PlausibilityMonotoneUnderInclusion) {
  SplitMix64 rng(2000 + GetParam());
  for (int i = 0; i < 50; ++i) {
    const Frame frame = testing::RandomFrame(rng, GetParam());
    const MassFunction m = testing::RandomMass(rng, frame, 4);
    for (HypothesisSet small = 1; small <= frame.full(); ++small) {
      for (HypothesisSet big = small; big <= frame.full(); ++big) {
        if ((small & big) != small) continue;
        EXPECT_LE(Plausibility(m, small), Plausibility(m, big) + kTol);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(FrameSizes, CombineAlgebraTest, ::testing::Values(1, 2, 3, 4));

}  // namespace
}  // namespace sls
