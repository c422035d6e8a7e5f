//===- goslp/packing.hpp - Iterative pairwise packing -----------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Runs the packing ILP iteratively: iteration 1 pairs scalar statements;
// iteration k treats the packs formed at iteration k-1 as individual vector
// statements and pairs them into double-width packs, using width-aware pack,
// unpack and savings costs. Iterating stops when nothing new is selected or
// the configured lane limit is reached. Each iteration is optimal for its own
// ILP; the composition across iterations carries no optimality claim.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/ilp.hpp"
#include "goslp/solver.hpp"

namespace goslp {

/// A formed pack: an ordered tuple of statement indices executing as one
/// vector instruction. Canonical lane order is address-ascending for memory
/// packs and program order otherwise; permutation selection later decides the
/// physical lane order.
struct Pack {
  std::vector<int> Stmts;
  Opcode Op = Opcode::Const;
  Type Ty = Type::F64;
  int Block = 0;

  int width() const { return (int)Stmts.size(); }
  bool isMemory() const { return Op == Opcode::Load || Op == Opcode::Store; }
};

struct PackSet {
  std::vector<Pack> Packs;

  struct IterationRecord {
    int Width = 2;            // width produced by this iteration
    int Candidates = 0;       // |D|
    Assignment::Status St = Assignment::Status::Optimal;
    Cost Objective = 0;
    int SelectedCount = 0;
  };
  std::vector<IterationRecord> Log;

  std::string packId(const Function &F, const Pack &P) const {
    std::string S = "{";
    for (size_t I = 0; I < P.Stmts.size(); ++I)
      S += (I ? "," : "") + F.Statements[P.Stmts[I]].Id;
    return S + "}";
  }
};

namespace detail {

/// Canonical lane order for a statement tuple: address order for memory
/// packs, program order otherwise.
inline void canonicalizeLanes(const Function &F, Pack &P) {
  if (P.isMemory())
    std::sort(P.Stmts.begin(), P.Stmts.end(), [&](int A, int B) {
      return F.Statements[A].Mem->Index < F.Statements[B].Mem->Index;
    });
  else
    std::sort(P.Stmts.begin(), P.Stmts.end());
}

} // namespace detail

//===----------------------------------------------------------------------===//
// Fusing: packs as derived vector statements
//===----------------------------------------------------------------------===//

/// Builds the universe for the next widening iteration: one unit per pack,
/// operands fused into lane tuples, memory ranges merged, adjacency between
/// derived memory statements holding exactly when their ranges are
/// contiguous. Values consumed by anything other than a whole aligned unit
/// operand are flagged as outside uses.
inline Universe makeDerivedUniverse(const Function &F, const DepGraph &G,
                                    const std::vector<Pack> &Packs) {
  Universe U;
  U.NumStmts = (int)F.Statements.size();
  for (const DepEdge &E : G.Edges)
    U.StmtEdges.push_back({E.From, E.To});

  for (const Pack &P : Packs) {
    Unit N;
    N.Id = "{";
    for (size_t I = 0; I < P.Stmts.size(); ++I)
      N.Id += (I ? "," : "") + F.Statements[P.Stmts[I]].Id;
    N.Id += "}";
    N.Block = P.Block;
    N.Pos = F.Statements[P.Stmts.front()].Pos;
    for (int SI : P.Stmts)
      N.Pos = std::min(N.Pos, F.Statements[SI].Pos);
    N.Op = P.Op;
    N.Ty = P.Ty;
    N.Width = P.width();
    N.Packable = true;
    size_t OperandCount = F.Statements[P.Stmts[0]].Operands.size();
    N.Operands.assign(OperandCount, {});
    for (size_t K = 0; K < OperandCount; ++K)
      for (int SI : P.Stmts)
        N.Operands[K].push_back(F.Statements[SI].Operands[K]);
    for (int SI : P.Stmts)
      if (F.Statements[SI].definesValue())
        N.Results.push_back(F.Statements[SI].Id);
    if (P.isMemory()) {
      int64_t Lo = F.Statements[P.Stmts[0]].Mem->Index;
      N.Mem = MemRange{F.Statements[P.Stmts[0]].Mem->Array, Lo,
                       (int64_t)P.Stmts.size()};
    }
    N.OutsideUse = false;
    for (const std::string &R : N.Results)
      if (F.isExported(R))
        N.OutsideUse = true;
    U.Members.push_back(P.Stmts);
    U.Units.push_back(std::move(N));
  }

  for (int UI = 0; UI < (int)U.Units.size(); ++UI) {
    for (const std::string &R : U.Units[UI].Results)
      U.ProducerOfValue[R] = UI;
    if (!U.Units[UI].Results.empty()) {
      std::vector<std::string> Key = U.Units[UI].Results;
      std::sort(Key.begin(), Key.end());
      U.ProducerOfTuple[Key] = UI;
    }
  }

  // Consumers and outside uses. A unit consumes another when one of its
  // operand tuples is exactly the producer's result tuple; any other
  // consumption of a produced value (a leftover scalar, an export, a
  // misaligned tuple) forces the producer to stay extractable.
  std::set<int> Covered;
  for (const auto &M : U.Members)
    for (int SI : M)
      Covered.insert(SI);

  for (int UI = 0; UI < (int)U.Units.size(); ++UI) {
    std::set<int> UserSet;
    for (int Other = 0; Other < (int)U.Units.size(); ++Other) {
      if (Other == UI)
        continue;
      for (const auto &Tuple : U.Units[Other].Operands)
        if (U.producerOf(Tuple) == UI)
          UserSet.insert(Other);
    }
    U.Units[UI].Users.assign(UserSet.begin(), UserSet.end());
  }
  // Misaligned or partial consumption.
  for (const Unit &Consumer : U.Units)
    for (const auto &Tuple : Consumer.Operands) {
      if (U.producerOf(Tuple) >= 0)
        continue;
      for (const Operand &O : Tuple)
        if (!O.IsLiteral) {
          auto It = U.ProducerOfValue.find(O.Id);
          if (It != U.ProducerOfValue.end())
            U.Units[It->second].OutsideUse = true;
        }
    }
  // Consumption by statements outside the universe.
  for (int SI = 0; SI < (int)F.Statements.size(); ++SI) {
    if (Covered.count(SI))
      continue;
    for (const Operand &O : F.Statements[SI].Operands)
      if (!O.IsLiteral) {
        auto It = U.ProducerOfValue.find(O.Id);
        if (It != U.ProducerOfValue.end())
          U.Units[It->second].OutsideUse = true;
      }
  }

  U.finalize();
  return U;
}

//===----------------------------------------------------------------------===//
// One ILP round with lazy schedulability cuts
//===----------------------------------------------------------------------===//

struct SelectionResult {
  std::vector<int> Selected; // D indices
  Assignment::Status St = Assignment::Status::Optimal;
  Cost Objective = 0;
};

/// Solves one iteration's packing ILP. Pairwise CC rows are part of the
/// encoding; circular patterns spanning three or more packs are excluded by
/// re-solving with a no-good cut whenever the chosen set fails the full
/// schedulability check, so the returned selection is always one the emitter
/// can schedule.
inline SelectionResult
selectPacks(const Universe &U, const PackUniverse &P, const CostModel &CM,
            std::optional<std::chrono::milliseconds> Timeout = std::nullopt,
            const std::vector<std::vector<int>> *FrozenGroups = nullptr) {
  using Clock = std::chrono::steady_clock;
  auto Start = Clock::now();
  auto Remaining = [&]() -> std::optional<std::chrono::milliseconds> {
    if (!Timeout)
      return std::nullopt;
    auto Used = std::chrono::duration_cast<std::chrono::milliseconds>(
        Clock::now() - Start);
    auto Left = *Timeout - Used;
    return Left.count() < 1 ? std::chrono::milliseconds(1) : Left;
  };

  PackingProblem Base = buildPackingProblem(U, P, CM);
  std::vector<PackingProblem::Row> Cuts;

  SelectionResult Res;
  for (;;) {
    PackingProblem Prob = Base;
    for (const auto &R : Cuts)
      Prob.Constraints.push_back(R);
    IlpProblem Lin = linearize(Prob);
    Assignment Asg = solveIlp(Lin, Remaining());

    std::vector<int> Cycle;
    bool Ok =
        schedulablePackSet(U, P.D, Asg.Selected, &Cycle, FrozenGroups);
    if (Ok) {
      Res.Selected = Asg.Selected;
      Res.St = Asg.St;
      Res.Objective = Asg.Objective;
      return Res;
    }
    if (Asg.St == Assignment::Status::Feasible) {
      // Out of time with an unschedulable incumbent: repair greedily by
      // dropping packs from the offending cycle until legal.
      std::vector<int> Sel = Asg.Selected;
      while (!schedulablePackSet(U, P.D, Sel, &Cycle, FrozenGroups)) {
        int Drop = Cycle.back();
        Sel.erase(std::remove(Sel.begin(), Sel.end(), Drop), Sel.end());
        Cycle.clear();
      }
      Res.Selected = Sel;
      Res.St = Assignment::Status::Feasible;
      Res.Objective = evaluateObjective(U, P, CM, Sel);
      return Res;
    }
    // No-good cut over the packs of the detected cycle.
    std::sort(Cycle.begin(), Cycle.end());
    Cycle.erase(std::unique(Cycle.begin(), Cycle.end()), Cycle.end());
    PackingProblem::Row R;
    for (int DI : Cycle)
      R.LHS.push_back({1, DI});
    R.Bound = (Cost)Cycle.size() - 1;
    R.Note = "cycle-cut";
    Cuts.push_back(std::move(R));
  }
}

//===----------------------------------------------------------------------===//
// Iterative widening driver
//===----------------------------------------------------------------------===//

/// Full statement packing: pairwise ILP per iteration, fusing selected packs
/// into derived statements until maxLanes is reached or an iteration selects
/// nothing. Leftover packs keep their width.
inline PackSet
packStatements(const Function &F, const DepGraph &G, const CostModel &CM,
               int MaxLanes,
               std::optional<std::chrono::milliseconds> Timeout = std::nullopt) {
  if (MaxLanes != 2 && MaxLanes != 4 && MaxLanes != 8 && MaxLanes != 16)
    throw PackingError("max lanes must be one of 2, 4, 8, 16");

  PackSet Result;
  std::vector<Pack> Frontier; // packs of the current width, still widenable
  std::vector<Pack> Frozen;   // packs left behind at a smaller width

  for (int Width = 2; Width <= MaxLanes; Width *= 2) {
    Universe U = Width == 2 ? makeScalarUniverse(F, G)
                            : makeDerivedUniverse(F, G, Frontier);
    PackUniverse PU = buildPackUniverse(U);

    std::vector<std::vector<int>> FrozenGroups;
    for (const Pack &P : Frozen)
      FrozenGroups.push_back(P.Stmts);

    SelectionResult Sel = selectPacks(U, PU, CM, Timeout, &FrozenGroups);

    PackSet::IterationRecord Rec;
    Rec.Width = Width;
    Rec.Candidates = (int)PU.D.size();
    Rec.St = Sel.St;
    Rec.Objective = Sel.Objective;
    Rec.SelectedCount = (int)Sel.Selected.size();
    Result.Log.push_back(Rec);

    if (Sel.Selected.empty()) {
      for (const Pack &P : Frontier)
        Frozen.push_back(P);
      Frontier.clear();
      break;
    }

    std::set<int> Merged;
    std::vector<Pack> Next;
    for (int DI : Sel.Selected) {
      auto [A, B] = PU.D[DI];
      Merged.insert(A);
      Merged.insert(B);
      Pack P;
      P.Stmts = U.Members[A];
      P.Stmts.insert(P.Stmts.end(), U.Members[B].begin(), U.Members[B].end());
      P.Op = U.Units[A].Op;
      P.Ty = U.Units[A].Ty;
      P.Block = U.Units[A].Block;
      detail::canonicalizeLanes(F, P);
      Next.push_back(std::move(P));
    }
    if (Width > 2) {
      // Units not merged this round stay at their width.
      for (int UI = 0; UI < (int)U.Units.size(); ++UI)
        if (!Merged.count(UI))
          Frozen.push_back(Frontier[UI]);
    }
    Frontier = std::move(Next);
  }
  for (const Pack &P : Frontier)
    Frozen.push_back(P);

  // Deterministic order: by block, then earliest statement position.
  std::sort(Frozen.begin(), Frozen.end(), [&](const Pack &A, const Pack &B) {
    int PA = F.Statements[A.Stmts.front()].Pos;
    int PB = F.Statements[B.Stmts.front()].Pos;
    for (int SI : A.Stmts)
      PA = std::min(PA, F.Statements[SI].Pos);
    for (int SI : B.Stmts)
      PB = std::min(PB, F.Statements[SI].Pos);
    return PA < PB;
  });
  Result.Packs = std::move(Frozen);
  return Result;
}

} // namespace goslp
