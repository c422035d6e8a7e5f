//===- goslp/baselines.hpp - Larsen and Liu packing strategies --*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The two comparison strategies, reconstructed from their published
// descriptions rather than ported from existing code:
//
//  - Larsen's algorithm seeds packs from adjacent memory pairs, extends them
//    along def-use and use-def chains (a statement may appear once as a left
//    and once as a right element during formation), then schedules top-down,
//    replacing each scalar with the first formed pack whose members are all
//    still unscheduled. Mergeable packs combine into wider ones afterwards.
//
//  - Liu's holistic algorithm enumerates all feasible pairs, repeatedly
//    commits the pack with the most potential vectorized uses together with
//    those uses, and finally sweeps the remaining candidates, committing any
//    whose objective delta is negative under the active cost model.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/packing.hpp"

namespace goslp {

namespace detail {

inline bool packCompatible(const Universe &U, const PackUniverse &PU,
                           const std::vector<int> &Committed, int DI,
                           const std::set<int> &UsedStmts) {
  auto [A, B] = PU.D[DI];
  if (UsedStmts.count(A) || UsedStmts.count(B))
    return false;
  std::vector<int> Trial = Committed;
  Trial.push_back(DI);
  return schedulablePackSet(U, PU.D, Trial);
}

} // namespace detail

//===----------------------------------------------------------------------===//
// Larsen
//===----------------------------------------------------------------------===//

inline PackSet larsenPack(const Function &F, const DepGraph &G,
                          int MaxLanes = 2) {
  Universe U = makeScalarUniverse(F, G);
  PackSet Result;

  // Formation. Pairs are ordered; a statement may be the left element of at
  // most one formed pack and the right element of at most one.
  std::vector<std::pair<int, int>> Formed;
  std::set<std::pair<int, int>> FormedSet;
  std::vector<bool> LeftUsed(F.Statements.size(), false);
  std::vector<bool> RightUsed(F.Statements.size(), false);

  auto TryForm = [&](int X, int Y) {
    if (X == Y || LeftUsed[X] || RightUsed[Y])
      return false;
    if (FormedSet.count({X, Y}) || FormedSet.count({Y, X}))
      return false;
    if (!feasiblePair(U, X, Y))
      return false;
    Formed.push_back({X, Y});
    FormedSet.insert({X, Y});
    LeftUsed[X] = true;
    RightUsed[Y] = true;
    return true;
  };

  // Seeds: every adjacent pair of memory accesses, lower address on the left.
  size_t WorkNext = 0;
  for (int SI = 0; SI < (int)F.Statements.size(); ++SI) {
    const Statement &S = F.Statements[SI];
    if (!S.Mem)
      continue;
    for (int SJ = 0; SJ < (int)F.Statements.size(); ++SJ) {
      if (SI == SJ)
        continue;
      const Statement &T = F.Statements[SJ];
      if (!T.Mem || S.Op != T.Op)
        continue;
      auto Lower = adjacentMemory(S, T);
      if (Lower && *Lower == &S)
        TryForm(SI, SJ);
    }
  }

  // Chain extension along def-use and use-def edges at matching operand
  // positions.
  while (WorkNext < Formed.size()) {
    auto [X, Y] = Formed[WorkNext++];
    const Statement &SX = F.Statements[X];
    const Statement &SY = F.Statements[Y];
    // def-use: consumers of the two lanes at the same operand position.
    if (SX.definesValue() && SY.definesValue()) {
      for (int UI = 0; UI < (int)F.Statements.size(); ++UI) {
        const Statement &SU = F.Statements[UI];
        for (size_t K = 0; K < SU.Operands.size(); ++K) {
          if (SU.Operands[K].IsLiteral || SU.Operands[K].Id != SX.Id)
            continue;
          for (int WI = 0; WI < (int)F.Statements.size(); ++WI) {
            if (WI == UI)
              continue;
            const Statement &SW = F.Statements[WI];
            if (K >= SW.Operands.size() || SW.Operands[K].IsLiteral ||
                SW.Operands[K].Id != SY.Id)
              continue;
            TryForm(UI, WI);
          }
        }
      }
    }
    // use-def: producers of the two lanes at the same operand position.
    for (size_t K = 0; K < SX.Operands.size() && K < SY.Operands.size(); ++K) {
      if (SX.Operands[K].IsLiteral || SY.Operands[K].IsLiteral)
        continue;
      int P = F.ValueDef.at(SX.Operands[K].Id);
      int Q = F.ValueDef.at(SY.Operands[K].Id);
      if (P != Q)
        TryForm(P, Q);
    }
  }

  // Scheduling: walk scalar statements top-down and replace each with the
  // first formed pack containing it whose members are all unscheduled and
  // which stays schedulable against what is already committed.
  std::vector<Pack> Committed;
  std::vector<std::vector<int>> CommittedStmts;
  std::set<int> Covered;
  auto CommittedOk = [&](int X, int Y) {
    std::vector<std::vector<int>> Groups = CommittedStmts;
    Groups.push_back({X, Y});
    return schedulableGroups(U.NumStmts, U.StmtEdges, Groups);
  };
  for (int SI = 0; SI < (int)F.Statements.size(); ++SI) {
    if (Covered.count(SI))
      continue;
    for (auto [X, Y] : Formed) {
      if (X != SI && Y != SI)
        continue;
      if (Covered.count(X) || Covered.count(Y))
        continue;
      if (!CommittedOk(X, Y))
        continue;
      Pack P;
      P.Stmts = {X, Y};
      P.Op = F.Statements[X].Op;
      P.Ty = F.Statements[X].Ty;
      P.Block = F.Statements[X].Block;
      detail::canonicalizeLanes(F, P);
      Committed.push_back(P);
      CommittedStmts.push_back({X, Y});
      Covered.insert(X);
      Covered.insert(Y);
      break;
    }
  }

  // Merge mergeable packs to wider widths, greedily in commit order.
  bool Merged = true;
  while (Merged) {
    Merged = false;
    for (size_t I = 0; I < Committed.size() && !Merged; ++I)
      for (size_t J = I + 1; J < Committed.size() && !Merged; ++J) {
        Pack &A = Committed[I];
        Pack &B = Committed[J];
        if (A.Op != B.Op || A.Ty != B.Ty || A.Block != B.Block)
          continue;
        if (A.width() != B.width() || A.width() * 2 > MaxLanes)
          continue;
        // Memory packs must stay contiguous; all cross members independent.
        if (A.isMemory()) {
          int64_t ALo = F.Statements[A.Stmts.front()].Mem->Index;
          int64_t BLo = F.Statements[B.Stmts.front()].Mem->Index;
          if (F.Statements[A.Stmts.front()].Mem->Array !=
              F.Statements[B.Stmts.front()].Mem->Array)
            continue;
          if (ALo + A.width() != BLo && BLo + B.width() != ALo)
            continue;
        }
        bool Indep = true;
        for (int SA : A.Stmts)
          for (int SB : B.Stmts)
            if (U.stmtReaches(SA, SB) || U.stmtReaches(SB, SA))
              Indep = false;
        if (!Indep)
          continue;
        Pack MergedPack;
        MergedPack.Stmts = A.Stmts;
        MergedPack.Stmts.insert(MergedPack.Stmts.end(), B.Stmts.begin(),
                                B.Stmts.end());
        MergedPack.Op = A.Op;
        MergedPack.Ty = A.Ty;
        MergedPack.Block = A.Block;
        detail::canonicalizeLanes(F, MergedPack);
        std::vector<std::vector<int>> Groups;
        for (size_t K = 0; K < Committed.size(); ++K)
          if (K != I && K != J)
            Groups.push_back(Committed[K].Stmts);
        Groups.push_back(MergedPack.Stmts);
        if (!schedulableGroups(U.NumStmts, U.StmtEdges, Groups))
          continue;
        A = MergedPack;
        Committed.erase(Committed.begin() + J);
        Merged = true;
      }
  }

  std::sort(Committed.begin(), Committed.end(),
            [&](const Pack &A, const Pack &B) {
              return F.Statements[A.Stmts.front()].Pos <
                     F.Statements[B.Stmts.front()].Pos;
            });
  Result.Packs = std::move(Committed);
  return Result;
}

//===----------------------------------------------------------------------===//
// Liu
//===----------------------------------------------------------------------===//

inline PackSet liuPack(const Function &F, const DepGraph &G,
                       const CostModel &CM) {
  Universe U = makeScalarUniverse(F, G);
  PackUniverse PU = buildPackUniverse(U);

  std::vector<bool> Alive(PU.D.size(), true);
  std::vector<int> Committed;
  std::set<int> UsedStmts;

  auto Commit = [&](int DI) {
    Committed.push_back(DI);
    Alive[DI] = false;
    UsedStmts.insert(PU.D[DI].first);
    UsedStmts.insert(PU.D[DI].second);
    for (int Other = 0; Other < (int)PU.D.size(); ++Other)
      if (Alive[Other] && (UsedStmts.count(PU.D[Other].first) ||
                           UsedStmts.count(PU.D[Other].second)))
        Alive[Other] = false;
  };

  auto UseCount = [&](int DI) {
    auto It = PU.VecVecUses.find(DI);
    if (It == PU.VecVecUses.end())
      return 0;
    int N = 0;
    for (int Q : It->second)
      if (Alive[Q] ||
          std::find(Committed.begin(), Committed.end(), Q) != Committed.end())
        ++N;
    return N;
  };

  // Phase 1: repeatedly take the candidate with the most potential
  // vectorized uses and pull its uses in behind it.
  for (;;) {
    int Best = -1, BestCount = 0;
    for (int DI = 0; DI < (int)PU.D.size(); ++DI) {
      if (!Alive[DI])
        continue;
      int C = UseCount(DI);
      if (C > BestCount) {
        Best = DI;
        BestCount = C;
      }
    }
    if (Best < 0 || BestCount < 1)
      break;
    if (!detail::packCompatible(U, PU, Committed, Best, UsedStmts)) {
      Alive[Best] = false;
      continue;
    }
    std::vector<int> Queue = {Best};
    Commit(Best);
    while (!Queue.empty()) {
      int P = Queue.front();
      Queue.erase(Queue.begin());
      auto It = PU.VecVecUses.find(P);
      if (It == PU.VecVecUses.end())
        continue;
      for (int Q : It->second)
        if (Alive[Q] &&
            detail::packCompatible(U, PU, Committed, Q, UsedStmts)) {
          Commit(Q);
          Queue.push_back(Q);
        }
    }
  }

  // Phase 2: sweep the leftovers in canonical order, committing any pack
  // whose objective delta is negative, until a pass changes nothing.
  Cost Current = evaluateObjective(U, PU, CM, Committed);
  bool Changed = true;
  while (Changed) {
    Changed = false;
    for (int DI = 0; DI < (int)PU.D.size(); ++DI) {
      if (!Alive[DI])
        continue;
      if (!detail::packCompatible(U, PU, Committed, DI, UsedStmts)) {
        Alive[DI] = false;
        continue;
      }
      std::vector<int> Trial = Committed;
      Trial.push_back(DI);
      Cost TrialObj = evaluateObjective(U, PU, CM, Trial);
      if (TrialObj < Current) {
        Commit(DI);
        Current = TrialObj;
        Changed = true;
      }
    }
  }

  PackSet Result;
  for (int DI : Committed) {
    Pack P;
    P.Stmts = {PU.D[DI].first, PU.D[DI].second};
    P.Op = U.Units[PU.D[DI].first].Op;
    P.Ty = U.Units[PU.D[DI].first].Ty;
    P.Block = U.Units[PU.D[DI].first].Block;
    detail::canonicalizeLanes(F, P);
    Result.Packs.push_back(P);
  }
  std::sort(Result.Packs.begin(), Result.Packs.end(),
            [&](const Pack &A, const Pack &B) {
              return F.Statements[A.Stmts.front()].Pos <
                     F.Statements[B.Stmts.front()].Pos;
            });
  return Result;
}

} // namespace goslp
