//===- tests/test_packing.cpp - Iterative widening ---------------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "support.hpp"

#include <gtest/gtest.h>

using namespace goslp;
using goslp::test::loadFunction;
using goslp::test::randomProgram;

TEST(PackStatements, Fig3SingleIterationEquivalence) {
  Function F = loadFunction("fig3.ir");
  DepGraph G = DepGraph::build(F);
  UnitCostModel CM;
  PackSet PS = packStatements(F, G, CM, 2);
  ASSERT_EQ(PS.Log.size(), 1u);
  Universe U = makeScalarUniverse(F, G);
  PackUniverse PU = buildPackUniverse(U);
  SelectionResult S = selectPacks(U, PU, CM);
  ASSERT_EQ(PS.Packs.size(), S.Selected.size());
  std::set<std::pair<int, int>> Got, Want;
  for (const Pack &P : PS.Packs)
    Got.insert({P.Stmts[0], P.Stmts[1]});
  for (int DI : S.Selected)
    Want.insert(PU.D[DI]);
  EXPECT_EQ(Got, Want);
}

TEST(PackStatements, MaxLanesTwoMeansOneIteration) {
  for (uint64_t Seed = 900; Seed < 905; ++Seed) {
    Function F = randomProgram(Seed);
    DepGraph G = DepGraph::build(F);
    UnitCostModel CM;
    PackSet PS = packStatements(F, G, CM, 2);
    EXPECT_EQ(PS.Log.size(), 1u);
    for (const Pack &P : PS.Packs)
      EXPECT_EQ(P.width(), 2);
  }
}

TEST(PackStatements, Widen4ProgramTwoIterations) {
  Function F = loadFunction("widen4.ir");
  DepGraph G = DepGraph::build(F);
  UnitCostModel CM;
  PackSet PS = packStatements(F, G, CM, 4);
  ASSERT_EQ(PS.Log.size(), 2u);
  EXPECT_EQ(PS.Log[0].Width, 2);
  EXPECT_EQ(PS.Log[1].Width, 4);
  ASSERT_EQ(PS.Packs.size(), 3u); // one pack per group
  for (const Pack &P : PS.Packs)
    EXPECT_EQ(P.width(), 4);
  // Lane order of memory packs is address-ascending.
  for (const Pack &P : PS.Packs)
    if (P.isMemory())
      for (int I = 1; I < P.width(); ++I)
        EXPECT_EQ(F.Statements[P.Stmts[I]].Mem->Index,
                  F.Statements[P.Stmts[I - 1]].Mem->Index + 1);
}

TEST(PackStatements, SecondIterationIsOptimalByBruteForce) {
  // Oracle: the derived-universe ILP of iteration 2 must match brute force
  // over the derived candidates.
  Function F = loadFunction("widen4.ir");
  DepGraph G = DepGraph::build(F);
  UnitCostModel CM;
  // Reproduce iteration 1, then brute-force iteration 2's universe.
  Universe U1 = makeScalarUniverse(F, G);
  PackUniverse PU1 = buildPackUniverse(U1);
  SelectionResult S1 = selectPacks(U1, PU1, CM);
  std::vector<Pack> Width2;
  for (int DI : S1.Selected) {
    Pack P;
    P.Stmts = {PU1.D[DI].first, PU1.D[DI].second};
    P.Op = U1.Units[PU1.D[DI].first].Op;
    P.Ty = U1.Units[PU1.D[DI].first].Ty;
    P.Block = U1.Units[PU1.D[DI].first].Block;
    std::sort(P.Stmts.begin(), P.Stmts.end());
    Width2.push_back(P);
  }
  Universe U2 = makeDerivedUniverse(F, G, Width2);
  PackUniverse PU2 = buildPackUniverse(U2);
  SelectionResult S2 = selectPacks(U2, PU2, CM);
  BruteForceResult BF = bruteForcePacking(U2, PU2, CM);
  EXPECT_EQ(S2.Objective, BF.Objective);
  EXPECT_EQ(S2.Selected.size(), 3u);
}

TEST(Fuse, DerivedLoadsInheritAdjacency) {
  Function F = parseFunction("func f { array A : f64 x 8\n block b:\n"
                             " %a = load A[0] : f64\n %b = load A[1] : f64\n"
                             " %c = load A[2] : f64\n %d = load A[3] : f64\n"
                             " %e = load A[5] : f64\n %g = load A[6] : f64 }");
  DepGraph G = DepGraph::build(F);
  auto MkPack = [&](const char *X, const char *Y) {
    Pack P;
    P.Stmts = {F.ValueDef.at(X), F.ValueDef.at(Y)};
    P.Op = Opcode::Load;
    P.Ty = Type::F64;
    P.Block = 0;
    return P;
  };
  std::vector<Pack> Packs = {MkPack("a", "b"), MkPack("c", "d"),
                             MkPack("e", "g")};
  Universe U = makeDerivedUniverse(F, G, Packs);
  // {a,b} covers A[0..1], {c,d} covers A[2..3]: adjacent, lower first.
  ASSERT_TRUE(U.Units[0].Mem.has_value());
  EXPECT_TRUE(U.Units[0].Mem->adjacentBelow(*U.Units[1].Mem));
  // {c,d} and {e,g} leave a gap at A[4]: not adjacent.
  EXPECT_FALSE(U.Units[1].Mem->adjacentBelow(*U.Units[2].Mem));
  EXPECT_FALSE(U.Units[2].Mem->adjacentBelow(*U.Units[1].Mem));
  PackUniverse PU = buildPackUniverse(U);
  ASSERT_EQ(PU.D.size(), 1u);
  EXPECT_EQ(PU.D[0], std::make_pair(0, 1));
}

TEST(Fuse, DerivedOperandsAreTuples) {
  Function F = loadFunction("widen4.ir");
  DepGraph G = DepGraph::build(F);
  auto MkPack = [&](const char *X, const char *Y, Opcode Op) {
    Pack P;
    P.Stmts = {F.ValueDef.at(X), F.ValueDef.at(Y)};
    P.Op = Op;
    P.Ty = Type::F32;
    P.Block = 0;
    return P;
  };
  std::vector<Pack> Packs = {MkPack("l0", "l1", Opcode::Load),
                             MkPack("m0", "m1", Opcode::FMul)};
  Universe U = makeDerivedUniverse(F, G, Packs);
  const Unit &Mul = U.Units[1];
  ASSERT_EQ(Mul.Operands.size(), 2u);
  ASSERT_EQ(Mul.Operands[0].size(), 2u);
  EXPECT_EQ(Mul.Operands[0][0].Id, "l0");
  EXPECT_EQ(Mul.Operands[0][1].Id, "l1");
  EXPECT_TRUE(Mul.Operands[1][0].IsLiteral);
  // The load unit is the producer of the mul's first operand tuple.
  EXPECT_EQ(U.producerOf(Mul.Operands[0]), 0);
  EXPECT_EQ(U.Units[0].Users, std::vector<int>({1}));
  // m0/m1 feed stores outside this universe.
  EXPECT_TRUE(Mul.OutsideUse);
  EXPECT_FALSE(U.Units[0].OutsideUse);
}

TEST(PackStatements, WidthMonotonicityAndDisjointness) {
  for (uint64_t Seed = 910; Seed < 930; ++Seed) {
    Function F = randomProgram(Seed);
    DepGraph G = DepGraph::build(F);
    UnitCostModel CM;
    PackSet PS = packStatements(F, G, CM, 8);
    EXPECT_LE(PS.Log.size(), 3u); // log2(8)
    std::set<int> Seen;
    for (const Pack &P : PS.Packs) {
      EXPECT_TRUE(P.width() == 2 || P.width() == 4 || P.width() == 8);
      for (int SI : P.Stmts)
        EXPECT_TRUE(Seen.insert(SI).second); // disjoint
    }
  }
}

TEST(PackStatements, IterationLogIsOptimalPerIteration) {
  Function F = loadFunction("fig1a.ir");
  DepGraph G = DepGraph::build(F);
  UnitCostModel CM;
  PackSet PS = packStatements(F, G, CM, 2);
  ASSERT_EQ(PS.Log.size(), 1u);
  EXPECT_EQ(PS.Log[0].St, Assignment::Status::Optimal);
  EXPECT_EQ(PS.Log[0].Objective, -3);
  EXPECT_EQ(PS.Log[0].Candidates, 12);
  EXPECT_EQ(PS.Log[0].SelectedCount, 5);
}

TEST(PackStatements, RejectsBadLaneCounts) {
  Function F = loadFunction("fig3.ir");
  DepGraph G = DepGraph::build(F);
  UnitCostModel CM;
  EXPECT_THROW(packStatements(F, G, CM, 3), PackingError);
  EXPECT_THROW(packStatements(F, G, CM, 32), PackingError);
}
