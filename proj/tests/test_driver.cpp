//===- tests/test_driver.cpp - Pipeline and CLI surface ----------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "support.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

using namespace goslp;
using goslp::test::loadFunction;

TEST(Pipeline, Fig1aTotalsPerStrategy) {
  Function F = loadFunction("fig1a.ir");
  auto TotalOf = [&](Strategy S) {
    PipelineOptions O;
    O.Strat = S;
    return runPipeline(F, O).Counts.total();
  };
  EXPECT_EQ(TotalOf(Strategy::None), 13);
  EXPECT_EQ(TotalOf(Strategy::Larsen), 15);
  EXPECT_EQ(TotalOf(Strategy::Liu), 12);
  EXPECT_EQ(TotalOf(Strategy::GoSlp), 10);
}

TEST(Pipeline, StatsReportShape) {
  Function F = loadFunction("fig1a.ir");
  PipelineOptions O;
  PipelineResult R = runPipeline(F, O);
  std::string S = statsReport(R, Strategy::GoSlp);
  EXPECT_NE(S.find("strategy: goslp\n"), std::string::npos);
  EXPECT_NE(S.find("scalar: 3\n"), std::string::npos);
  EXPECT_NE(S.find("vector: 5\n"), std::string::npos);
  EXPECT_NE(S.find("packing: 0\n"), std::string::npos);
  EXPECT_NE(S.find("unpacking: 2\n"), std::string::npos);
  EXPECT_NE(S.find("total: 10\n"), std::string::npos);
  EXPECT_NE(S.find("objective: -3\n"), std::string::npos);
  EXPECT_NE(S.find("iter1.status: optimal\n"), std::string::npos);
}

TEST(Pipeline, DeterministicOutputs) {
  Function F = loadFunction("fig1a.ir");
  PipelineOptions O;
  PipelineResult A = runPipeline(F, O);
  PipelineResult B = runPipeline(F, O);
  EXPECT_EQ(printVectorFunction(A.VF), printVectorFunction(B.VF));
  EXPECT_EQ(statsReport(A, Strategy::GoSlp), statsReport(B, Strategy::GoSlp));
}

TEST(Pipeline, EmptyFunctionAllZeros) {
  Function F = parseFunction("func empty { }");
  for (Strategy S :
       {Strategy::GoSlp, Strategy::Larsen, Strategy::Liu, Strategy::None}) {
    PipelineOptions O;
    O.Strat = S;
    PipelineResult R = runPipeline(F, O);
    EXPECT_EQ(R.Counts.total(), 0);
  }
}

TEST(Pipeline, TimeoutStillLegal) {
  Function F = loadFunction("fig1a.ir");
  PipelineOptions O;
  O.Timeout = std::chrono::milliseconds(0);
  PipelineResult R = runPipeline(F, O);
  EXPECT_EQ(fuzzEquivalence(F, R.VF, 5), "");
}

//===----------------------------------------------------------------------===//
// Process-level CLI checks
//===----------------------------------------------------------------------===//

namespace {

std::string cliBinary() { return GOSLP_CLI_BIN; }

struct CliResult {
  int Status;
  std::string Out;
};

CliResult runCli(const std::string &Args) {
  std::string Cmd = cliBinary() + " " + Args + " 2>/dev/null";
  FILE *P = popen(Cmd.c_str(), "r");
  if (!P)
    return {-1, ""};
  std::string Out;
  char Buf[4096];
  size_t N;
  while ((N = fread(Buf, 1, sizeof(Buf), P)) > 0)
    Out.append(Buf, N);
  int Status = pclose(P);
  return {WEXITSTATUS(Status), Out};
}

} // namespace

TEST(Cli, VectorizeFig1aStatsTotalTen) {
  CliResult R = runCli("vectorize " + goslp::test::dataPath("fig1a.ir") +
                       " --strategy goslp --cost unit --out /dev/null");
  EXPECT_EQ(R.Status, 0);
  EXPECT_NE(R.Out.find("total: 10"), std::string::npos);
}

TEST(Cli, VectorizeStrategyNoneTotalThirteen) {
  CliResult R = runCli("vectorize " + goslp::test::dataPath("fig1a.ir") +
                       " --strategy none --out /dev/null");
  EXPECT_EQ(R.Status, 0);
  EXPECT_NE(R.Out.find("total: 13"), std::string::npos);
}

TEST(Cli, DumpCandidatesMatchesGoldenListing) {
  CliResult R = runCli("vectorize " + goslp::test::dataPath("fig3.ir") +
                       " --dump-candidates --out /dev/null --stats /dev/null");
  EXPECT_EQ(R.Status, 0);
  EXPECT_NE(R.Out.find("f[S5] = {S6,S7}"), std::string::npos);
  EXPECT_NE(R.Out.find("D = {{S3,S4},{S5,S6},{S5,S7},{S6,S7}}"),
            std::string::npos);
  EXPECT_NE(R.Out.find("vecvec[{S3,S4}] = {{S5,S6},{S6,S7}}"),
            std::string::npos);
}

TEST(Cli, CompareFig1aRows) {
  CliResult R = runCli("compare " + goslp::test::dataPath("fig1a.ir"));
  EXPECT_EQ(R.Status, 0);
  EXPECT_NE(R.Out.find("none\t13\t0\t0\t0\t0\t13"), std::string::npos);
  EXPECT_NE(R.Out.find("larsen\t3\t5\t2\t5\t0\t15"), std::string::npos);
  EXPECT_NE(R.Out.find("liu\t5\t4\t1\t2\t0\t12"), std::string::npos);
  EXPECT_NE(R.Out.find("goslp\t3\t5\t0\t2\t0\t10"), std::string::npos);
}

TEST(Cli, VerifyFlagPasses) {
  CliResult R = runCli("vectorize " + goslp::test::dataPath("fig6_2.ir") +
                       " --verify=12 --out /dev/null");
  EXPECT_EQ(R.Status, 0);
  EXPECT_NE(R.Out.find("verify: pass"), std::string::npos);
}

TEST(Cli, ParseFailureGivesNonzeroExit) {
  CliResult R = runCli("vectorize /dev/null");
  EXPECT_NE(R.Status, 0);
}

TEST(Cli, CompareAggregatesAcrossFiles) {
  CliResult R = runCli("compare " + goslp::test::dataPath("fig3.ir") + " " +
                       goslp::test::dataPath("fig6_2.ir"));
  EXPECT_EQ(R.Status, 0);
  EXPECT_NE(R.Out.find("TOTAL\tgoslp"), std::string::npos);
  EXPECT_NE(R.Out.find("TOTAL\tnone\t15"), std::string::npos); // 7 + 8
}

TEST(Cli, DumpIlpShowsObjectiveAndConstraints) {
  CliResult R = runCli("vectorize " + goslp::test::dataPath("fig3.ir") +
                       " --dump-ilp --out /dev/null --stats /dev/null");
  EXPECT_EQ(R.Status, 0);
  EXPECT_NE(R.Out.find("min"), std::string::npos);
  EXPECT_NE(R.Out.find("V{S3,S4}"), std::string::npos);
  EXPECT_NE(R.Out.find("oc(S5)"), std::string::npos);
}

TEST(Cli, ByteIdenticalAcrossInvocations) {
  std::string Args = "vectorize " + goslp::test::dataPath("fig1a.ir") +
                     " --strategy goslp";
  CliResult A = runCli(Args);
  CliResult B = runCli(Args);
  EXPECT_EQ(A.Out, B.Out);
}
