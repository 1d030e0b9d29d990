#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "spr/sensogram.hpp"
#include "support/generators.hpp"

namespace sg = spr::sensogram;
using sg::SensogramSeries;
using sg::TimeWindow;

namespace {

SensogramSeries regular(std::string channel, double t0, double t1, double dt, auto&& response) {
  SensogramSeries s{std::move(channel), {}};
  const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    s.samples.push_back({t, response(t)});
  }
  return s;
}

spr::ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const spr::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected spr::Error";
  return spr::ErrorKind::io;
}

}  // namespace

TEST(ParseSensogram, SplitsChannelsInFirstAppearanceOrder) {
  std::istringstream in(
      "time_s,channel,response_ru\n"
      "0,sig,10\n0,ref,1\n1,sig,12\n1,ref,2\n# pause\n\n2,sig,15\n2,ref,3\n");
  const auto series = sg::parse_sensogram(in);
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series[0].channel, "sig");
  EXPECT_EQ(series[1].channel, "ref");
  ASSERT_EQ(series[0].samples.size(), 3u);
  EXPECT_EQ(series[0].samples[2].response_ru, 15.0);
  EXPECT_EQ(series[1].samples[1].time_s, 1.0);
}

TEST(ParseSensogram, EmptyInputYieldsNoChannels) {
  std::istringstream in("");
  EXPECT_TRUE(sg::parse_sensogram(in).empty());
  std::istringstream header_only("time_s,channel,response_ru\n");
  EXPECT_TRUE(sg::parse_sensogram(header_only).empty());
}

TEST(ParseSensogram, SortsShuffledRows) {
  std::istringstream in("time_s,channel,response_ru\n2,a,3\n0,a,1\n1,a,2\n");
  const auto series = sg::parse_sensogram(in);
  ASSERT_EQ(series.size(), 1u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(series[0].samples[i].time_s, static_cast<double>(i));
    EXPECT_EQ(series[0].samples[i].response_ru, static_cast<double>(i + 1));
  }
}

TEST(ParseSensogram, RejectsDuplicateTimesAndBadRows) {
  std::istringstream dup("time_s,channel,response_ru\n0,a,1\n1,a,2\n1,a,3\n");
  EXPECT_EQ(kind_of([&] { sg::parse_sensogram(dup); }), spr::ErrorKind::validation);

  std::istringstream bad("time_s,channel,response_ru\n0,a,1\n1,a,oops\n");
  try {
    sg::parse_sensogram(bad);
    FAIL();
  } catch (const spr::Error& e) {
    EXPECT_EQ(e.kind(), spr::ErrorKind::parse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }

  std::istringstream wrong_header("t,channel,response\n0,a,1\n");
  EXPECT_EQ(kind_of([&] { sg::parse_sensogram(wrong_header); }), spr::ErrorKind::parse);

  std::istringstream short_row("time_s,channel,response_ru\n0,a\n");
  EXPECT_EQ(kind_of([&] { sg::parse_sensogram(short_row); }), spr::ErrorKind::parse);
}

TEST(ParseEvents, OptionalConcentration) {
  std::istringstream in("label,t_start_s,t_end_s,conc_mg_ml\nbuffer,100,200,\nprotein,300,600,0.5\n");
  const auto events = sg::parse_events(in);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_FALSE(events[0].conc_mg_ml.has_value());
  EXPECT_EQ(events[1].label, "protein");
  EXPECT_EQ(*events[1].conc_mg_ml, 0.5);
  EXPECT_EQ(events[1].t_end_s, 600.0);
}

TEST(Interpolate, LinearBetweenSamples) {
  const SensogramSeries s{"a", {{0.0, 0.0}, {2.0, 10.0}, {3.0, 4.0}}};
  EXPECT_EQ(sg::interpolate(s, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(sg::interpolate(s, 0.5), 2.5);
  EXPECT_EQ(sg::interpolate(s, 2.0), 10.0);
  EXPECT_DOUBLE_EQ(sg::interpolate(s, 2.5), 7.0);
  EXPECT_EQ(sg::interpolate(s, 3.0), 4.0);
}

TEST(SubtractReference, SelfSubtractionIsZero) {
  gen::Rng rng(11);
  const auto s = gen::random_series(rng, "a", 200, 0.0, 100.0);
  const auto diff = sg::subtract_reference(s, s, 0.0);
  ASSERT_EQ(diff.samples.size(), s.samples.size());
  for (const auto& p : diff.samples) EXPECT_EQ(p.response_ru, 0.0);
}

TEST(SubtractReference, ConstantReferenceOffsetsSignal) {
  const auto sig = regular("sig", 0, 10, 0.5, [](double t) { return 100.0 + 3.0 * t; });
  const auto ref = regular("ref", 0, 10, 1.0, [](double) { return 40.0; });
  const auto diff = sg::subtract_reference(sig, ref, 0.0);
  EXPECT_EQ(diff.channel, "sig-ref");
  ASSERT_EQ(diff.samples.size(), sig.samples.size());
  for (std::size_t i = 0; i < diff.samples.size(); ++i) {
    EXPECT_DOUBLE_EQ(diff.samples[i].response_ru, sig.samples[i].response_ru - 40.0);
  }
}

TEST(SubtractReference, DelayedSawtoothByHand) {
  // Reference 0,10,0,10,... at 1 s spacing; delay 0.5 s samples it at midpoints.
  SensogramSeries ref{"ref", {}};
  for (int i = 0; i <= 4; ++i) ref.samples.push_back({static_cast<double>(i), i % 2 == 0 ? 0.0 : 10.0});
  const SensogramSeries sig{"sig", {{0.0, 1.0}, {0.5, 1.0}, {1.0, 20.0}, {1.5, 20.0}, {2.25, 8.0}, {4.5, 9.0}, {5.0, 9.0}}};
  const auto diff = sg::subtract_reference(sig, ref, 0.5);
  // t=0 maps before the reference, t=5 maps past it; both are dropped.
  ASSERT_EQ(diff.samples.size(), 5u);
  EXPECT_EQ(diff.samples[0].time_s, 0.5);
  EXPECT_DOUBLE_EQ(diff.samples[0].response_ru, 1.0);    // ref(0) = 0
  EXPECT_DOUBLE_EQ(diff.samples[1].response_ru, 15.0);   // ref(0.5) = 5
  EXPECT_DOUBLE_EQ(diff.samples[2].response_ru, 10.0);   // ref(1) = 10
  EXPECT_DOUBLE_EQ(diff.samples[3].response_ru, 5.5);    // ref(1.75) = 2.5
  EXPECT_DOUBLE_EQ(diff.samples[4].response_ru, 9.0);    // ref(4) = 0
}

TEST(SubtractReference, NoOverlapIsAlignmentError) {
  const auto sig = regular("sig", 100, 110, 1, [](double) { return 1.0; });
  const auto ref = regular("ref", 0, 10, 1, [](double) { return 1.0; });
  EXPECT_EQ(kind_of([&] { sg::subtract_reference(sig, ref, 0.0); }), spr::ErrorKind::alignment);
  EXPECT_NO_THROW(sg::subtract_reference(sig, ref, 100.0));
}

TEST(BaselineLevel, ConstantAndSymmetricNoise) {
  const auto flat = regular("a", 0, 60, 1, [](double) { return 250.0; });
  const auto level = sg::baseline_level(flat, {10, 20});
  EXPECT_EQ(level.mean_ru, 250.0);
  EXPECT_EQ(level.stddev_ru, 0.0);
  EXPECT_EQ(level.count, 11u);

  const auto noisy = regular("a", 0, 60, 1, [](double t) { return 250.0 + (std::llround(t) % 2 == 0 ? 3.0 : -3.0); });
  const auto ln = sg::baseline_level(noisy, {0.5, 20.5});
  EXPECT_DOUBLE_EQ(ln.mean_ru, 250.0);
  EXPECT_NEAR(ln.stddev_ru, 3.0 * std::sqrt(20.0 / 19.0), 1e-12);
}

TEST(BaselineLevel, ExclusionsAndErrors) {
  const auto s = regular("a", 0, 60, 1, [](double t) { return t < 30 ? 0.0 : 1000.0; });
  const auto masked = sg::baseline_level(s, {20, 40}, {{30, 40}});
  EXPECT_EQ(masked.mean_ru, 0.0);
  EXPECT_EQ(masked.count, 10u);
  EXPECT_EQ(kind_of([&] { sg::baseline_level(s, {100, 200}); }), spr::ErrorKind::window);
  EXPECT_EQ(kind_of([&] { sg::baseline_level(s, {10.5, 11.5}); }), spr::ErrorKind::window);
  EXPECT_EQ(kind_of([&] { sg::baseline_level(s, {20, 10}); }), spr::ErrorKind::window);
}

TEST(StepResponse, IdealStep) {
  const auto s = regular("a", 0, 600, 1, [](double t) { return t < 300 ? 0.0 : 4000.0; });
  const sg::InjectionEvent ev{"protein", 300, 600, 0.5};
  const auto step = sg::step_response(s, ev, {200, 290}, {500, 590});
  EXPECT_EQ(step.baseline_ru, 0.0);
  EXPECT_EQ(step.plateau_ru, 4000.0);
  EXPECT_EQ(step.delta_ru, 4000.0);
}

TEST(StepResponse, FlatTraceHasZeroStep) {
  const auto s = regular("a", 0, 600, 1, [](double) { return 812.5; });
  const auto step = sg::step_response(s, {"x", 300, 600, std::nullopt}, {200, 290}, {500, 590});
  EXPECT_EQ(step.delta_ru, 0.0);
}

TEST(StepResponse, PlateauOutsideEventIsWindowError) {
  const auto s = regular("a", 0, 600, 1, [](double) { return 1.0; });
  EXPECT_EQ(kind_of([&] { sg::step_response(s, {"x", 300, 400, std::nullopt}, {200, 290}, {350, 450}); }),
            spr::ErrorKind::window);
}

TEST(StepResponse, InvariantUnderConstantOffset) {
  gen::Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = gen::random_series(rng, "a", 400, 0.0, 600.0);
    const double offset = gen::uniform(rng, -1e4, 1e4);
    auto shifted = s;
    for (auto& p : shifted.samples) p.response_ru += offset;
    const sg::InjectionEvent ev{"e", 300, 600, std::nullopt};
    const auto a = sg::step_response(s, ev, {100, 290}, {400, 590});
    const auto b = sg::step_response(shifted, ev, {100, 290}, {400, 590});
    EXPECT_NEAR(a.delta_ru, b.delta_ru, 1e-9);
  }
}

TEST(StepResponse, ScalesWithResponse) {
  gen::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = gen::random_series(rng, "a", 400, 0.0, 600.0);
    const double k = gen::uniform(rng, 0.1, 10.0);
    auto scaled = s;
    for (auto& p : scaled.samples) p.response_ru *= k;
    const sg::InjectionEvent ev{"e", 300, 600, std::nullopt};
    const auto a = sg::step_response(s, ev, {100, 290}, {400, 590});
    const auto b = sg::step_response(scaled, ev, {100, 290}, {400, 590});
    EXPECT_NEAR(b.delta_ru, k * a.delta_ru, 1e-9 * (1.0 + std::abs(k * a.delta_ru)));
  }
}

TEST(SubtractReference, LinearInSignal) {
  gen::Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sig = gen::random_series(rng, "sig", 100, 0.0, 100.0);
    const auto ref = gen::random_series(rng, "ref", 80, 0.0, 100.0);
    const double delay = gen::uniform(rng, -5.0, 5.0);
    const double c = gen::uniform(rng, -100.0, 100.0);
    auto lifted = sig;
    for (auto& p : lifted.samples) p.response_ru += c;
    const auto a = sg::subtract_reference(sig, ref, delay);
    const auto b = sg::subtract_reference(lifted, ref, delay);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      EXPECT_NEAR(b.samples[i].response_ru - a.samples[i].response_ru, c, 1e-9);
    }
  }
}

TEST(Coverage, MassAndMoleculeCount) {
  EXPECT_DOUBLE_EQ(sg::mass_from_response(4000.0, 1.2), 4.8);
  EXPECT_NEAR(sg::molecule_count(4.8, 110.0), 2.6278e10, 1e6);
  EXPECT_EQ(sg::mass_from_response(0.0, 1.2), 0.0);
  EXPECT_THROW(sg::mass_from_response(10.0, 0.0), spr::Error);
  EXPECT_THROW(sg::molecule_count(1.0, -5.0), spr::Error);
}

TEST(Coverage, FootprintFromDimensions) {
  const auto f = sg::footprint_range({46.0, 65.0, 80.0});
  EXPECT_NEAR(f.min_nm2, 29.9, 1e-12);
  EXPECT_NEAR(f.max_nm2, 52.0, 1e-12);
  EXPECT_NEAR(f.mean_nm2, 40.95, 1e-12);

  const auto cube = sg::footprint_range({50.0, 50.0, 50.0});
  EXPECT_EQ(cube.min_nm2, 25.0);
  EXPECT_EQ(cube.max_nm2, 25.0);

  const auto permuted = sg::footprint_range({80.0, 46.0, 65.0});
  EXPECT_EQ(permuted.min_nm2, f.min_nm2);
  EXPECT_EQ(permuted.max_nm2, f.max_nm2);
  EXPECT_THROW(sg::footprint_range({0.0, 1.0, 1.0}), spr::Error);
}

TEST(Coverage, MonolayerFraction) {
  const double capacity = sg::monolayer_capacity(1.2, 41.0);
  EXPECT_NEAR(capacity, 2.9268e10, 1e6);
  const auto report = sg::coverage_report(4000.0, 1.2, 110.0, 41.0);
  EXPECT_DOUBLE_EQ(report.mass_ng, 4.8);
  EXPECT_GT(report.coverage_fraction, 0.85);
  EXPECT_LT(report.coverage_fraction, 0.92);
  EXPECT_NEAR(report.coverage_fraction, report.molecule_count / report.monolayer_capacity, 1e-15);
  EXPECT_EQ(sg::coverage_report(0.0, 1.2, 110.0, 41.0).coverage_fraction, 0.0);
  EXPECT_THROW(sg::coverage_report(-1.0, 1.2, 110.0, 41.0), spr::Error);
}

TEST(Coverage, LinearInResponse) {
  gen::Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const double r = gen::uniform(rng, 0.0, 1e4);
    const double a = sg::coverage_report(r, 1.2, 110.0, 41.0).coverage_fraction;
    const double b = sg::coverage_report(2.0 * r, 1.2, 110.0, 41.0).coverage_fraction;
    EXPECT_NEAR(b, 2.0 * a, 1e-14 * (1.0 + b));
  }
}
