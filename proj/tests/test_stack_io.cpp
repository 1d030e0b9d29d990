#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "spr/stack_io.hpp"
#include "support/generators.hpp"

namespace io = spr::stack_io;

TEST(StackFile, FixtureParses) {
  const auto stack = io::load_stack(std::string(SPR_FIXTURE_DIR) + "/sarcomere_633.stack");
  ASSERT_EQ(stack.size(), 5u);
  EXPECT_EQ(stack.prism_permittivity(), 2.30);
  EXPECT_EQ(stack[1].permittivity, spr::Complex(-13.2, 1.25));
  EXPECT_EQ(*stack[1].thickness_nm, 47.0);
  EXPECT_EQ(*stack[2].thickness_nm, 140.0);
  EXPECT_EQ(stack[3].permittivity.real(), 1.96);
  EXPECT_EQ(*stack[3].thickness_nm, 110.0);
  EXPECT_TRUE(stack[4].semi_infinite());
}

TEST(StackFile, InteriorInfinityNamesLine) {
  const auto result = io::parse_stack(
      "# comment\n"
      "prism,2.3,0,inf\n"
      "gold,-13.2,1.25,inf\n"
      "water,1.7689,0,inf\n");
  ASSERT_FALSE(result.ok());
  ASSERT_EQ(result.diagnostics.size(), 1u);
  EXPECT_EQ(result.diagnostics[0].line, 3u);
  EXPECT_NE(result.diagnostics[0].message.find("gold"), std::string::npos);
  EXPECT_EQ(io::format(result.diagnostics[0]).rfind("line 3: ", 0), 0u);
}

TEST(StackFile, ReportsEveryViolation) {
  const auto result = io::parse_stack(
      "prism,2.3,0,inf\n"
      "gold,abc,1.25,47\n"
      "spacer,1.78,0,-5\n"
      "\n"
      "sample,1.96,0\n"
      "water,1.7689,0,inf\n");
  ASSERT_EQ(result.diagnostics.size(), 3u);
  EXPECT_EQ(result.diagnostics[0].line, 2u);
  EXPECT_EQ(result.diagnostics[1].line, 3u);
  EXPECT_EQ(result.diagnostics[2].line, 5u);
}

TEST(StackFile, BoundsAndPrism) {
  const auto finite_ends = io::parse_stack("prism,2.3,0,10\nwater,1.77,0,20\n");
  EXPECT_EQ(finite_ends.diagnostics.size(), 2u);
  const auto lossy_prism = io::parse_stack("prism,2.3,0.1,inf\nwater,1.77,0,inf\n");
  ASSERT_EQ(lossy_prism.diagnostics.size(), 1u);
  EXPECT_EQ(lossy_prism.diagnostics[0].line, 1u);
  const auto single = io::parse_stack("prism,2.3,0,inf\n");
  ASSERT_FALSE(single.ok());
  EXPECT_EQ(single.diagnostics.back().line, 0u);
}

TEST(StackFile, MissingFileIsIoError) {
  try {
    io::load_stack("/nonexistent/stack.file");
    FAIL();
  } catch (const spr::Error& e) {
    EXPECT_EQ(e.kind(), spr::ErrorKind::io);
  }
}

TEST(StackFile, LoadListsDiagnostics) {
  const auto path = std::filesystem::temp_directory_path() / "spr_bad_stack_test.stack";
  std::ofstream(path) << "prism,2.3,0,inf\ngold,x,1,47\nwater,1.77,0,5\n";
  try {
    io::load_stack(path.string());
    FAIL();
  } catch (const spr::Error& e) {
    EXPECT_EQ(e.kind(), spr::ErrorKind::parse);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
  std::filesystem::remove(path);
}

TEST(StackFile, WriteRoundTrips) {
  gen::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto stack = gen::passive_stack(rng);
    const auto parsed = io::parse_stack(io::write_stack(stack));
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(*parsed.stack, stack);
  }
}
