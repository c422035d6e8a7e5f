//===- goslp/solver.hpp - 0-1 branch and bound ------------------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Depth-first branch and bound over the pack decision variables. Gate
// auxiliaries are not branched on; their values are forced by the decisions,
// so each leaf is evaluated by deriving them. The all-zero assignment is
// always feasible, which seeds the incumbent and makes the anytime contract
// trivial to honor.
//
// Bounding: the incumbent can only be beaten by the fixed contribution plus
// the negative coefficients of variables that are still selectable. Setting a
// variable excludes its partners in every at-most-one row, which shrinks that
// optimistic tail as the search descends.
//
// Determinism: with an infinite deadline the search runs twice. The first
// pass proves the optimal value; the second walks decisions in canonical
// pack order, trying "selected" before "not selected", and returns the first
// optimum it reaches. Ties between optima therefore resolve toward selecting
// the earliest packs in canonical order.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/ilp.hpp"

#include <chrono>
#include <limits>

namespace goslp {

struct Assignment {
  enum class Status { Optimal, Feasible, Infeasible };
  Status St = Status::Infeasible;
  std::vector<uint8_t> Values; // full variable vector, decisions first
  Cost Objective = 0;
  std::vector<int> Selected; // decision indices set to 1
  long long NodesVisited = 0;
};

namespace detail {

class BranchAndBound {
public:
  explicit BranchAndBound(const IlpProblem &P) : P(P), N(P.NumDecisions) {
    NetCoef.assign(N, 0);
    for (auto &[C, V] : P.Objective)
      if (V < N)
        NetCoef[V] += C;
    // At-most-one rows (unit coefficients, bound 1) drive exclusion
    // propagation; anything else is checked as a plain row.
    PartnersOf.assign(N, {});
    for (const auto &R : P.Rows) {
      if (!R.DecisionOnly)
        continue;
      bool UnitOne = R.Bound == 1;
      for (auto &[C, V] : R.LHS)
        UnitOne &= C == 1;
      if (UnitOne) {
        for (auto &[CA, VA] : R.LHS)
          for (auto &[CB, VB] : R.LHS) {
            (void)CA;
            (void)CB;
            if (VA != VB)
              PartnersOf[VA].push_back(VB);
          }
      } else {
        GeneralRows.push_back(&R);
      }
    }
    for (auto &Ps : PartnersOf) {
      std::sort(Ps.begin(), Ps.end());
      Ps.erase(std::unique(Ps.begin(), Ps.end()), Ps.end());
    }
  }

  /// Minimizes; fills Best*, TimedOut, Nodes.
  void run(std::optional<std::chrono::milliseconds> Timeout) {
    if (Timeout)
      Deadline = Clock::now() + *Timeout;
    X.assign(N, 0);
    State.assign(N, Free);

    BestDecisions.assign(N, 0);
    BestObj = leafObjective(BestDecisions);

    // Pass 1: prove the optimal value under a coefficient-magnitude order.
    Order.resize(N);
    for (int I = 0; I < N; ++I)
      Order[I] = I;
    std::sort(Order.begin(), Order.end(), [&](int A, int B) {
      Cost CA = NetCoef[A] < 0 ? -NetCoef[A] : NetCoef[A];
      Cost CB = NetCoef[B] < 0 ? -NetCoef[B] : NetCoef[B];
      if (CA != CB)
        return CA > CB;
      return A < B;
    });
    Fixed = 0;
    NegAvail = 0;
    for (int V = 0; V < N; ++V)
      NegAvail += std::min<Cost>(0, NetCoef[V]);
    TieBreakPass = false;
    search(0);
    if (TimedOut)
      return;

    // Pass 2: canonical order, selected-first, stop at the first optimum.
    for (int I = 0; I < N; ++I)
      Order[I] = I;
    std::fill(X.begin(), X.end(), 0);
    std::fill(State.begin(), State.end(), Free);
    Fixed = 0;
    NegAvail = 0;
    for (int V = 0; V < N; ++V)
      NegAvail += std::min<Cost>(0, NetCoef[V]);
    TieBreakPass = true;
    Found = false;
    search(0);
  }

  std::vector<uint8_t> BestDecisions;
  Cost BestObj = 0;
  bool TimedOut = false;
  long long Nodes = 0;

private:
  using Clock = std::chrono::steady_clock;
  enum : uint8_t { Free = 0, Assigned = 1, Excluded = 2 };

  const IlpProblem &P;
  int N;
  std::vector<Cost> NetCoef;
  std::vector<std::vector<int>> PartnersOf;
  std::vector<const IlpProblem::Row *> GeneralRows;

  std::vector<int> Order;
  std::vector<uint8_t> X;
  std::vector<uint8_t> State;
  Cost Fixed = 0;
  Cost NegAvail = 0;
  bool TieBreakPass = false;
  bool Found = false;
  std::optional<Clock::time_point> Deadline;
  std::vector<uint8_t> Scratch;

  Cost leafObjective(const std::vector<uint8_t> &Decisions) {
    P.deriveInto(Decisions, Scratch);
    return P.objectiveAt(Scratch);
  }

  bool hitDeadline() {
    if (!Deadline || TimedOut)
      return TimedOut;
    if ((Nodes & 0x3FF) == 0 && Clock::now() > *Deadline)
      TimedOut = true;
    return TimedOut;
  }

  bool generalRowsAllowSelect(int Var) const {
    for (const auto *R : GeneralRows) {
      bool Contains = false;
      Cost Sum = 0;
      for (auto &[C, V] : R->LHS) {
        if (V == Var) {
          Contains = true;
          Sum += C;
        } else {
          Sum += C * X[V];
        }
      }
      if (Contains && Sum > R->Bound)
        return false;
    }
    return true;
  }

  // Prune test: can the subtree still beat (pass 1) or reach (pass 2) the
  // target objective?
  bool prunable() const {
    Cost Bound = Fixed + NegAvail;
    return TieBreakPass ? Bound > BestObj : Bound >= BestObj + 1;
  }

  void search(int Depth) {
    if (TimedOut || (TieBreakPass && Found))
      return;
    if (hitDeadline())
      return;
    // Skip past variables forced to zero by exclusions.
    while (Depth < N && State[Order[Depth]] == Excluded)
      ++Depth;
    if (Depth == N) {
      ++Nodes;
      std::vector<uint8_t> Decisions(X.begin(), X.end());
      Cost Obj = leafObjective(Decisions);
      if (TieBreakPass) {
        if (Obj == BestObj) {
          Found = true;
          BestDecisions = Decisions;
        }
      } else if (Obj < BestObj) {
        BestObj = Obj;
        BestDecisions = Decisions;
      }
      return;
    }

    int Var = Order[Depth];
    uint8_t Pref = TieBreakPass ? 1 : (NetCoef[Var] < 0 ? 1 : 0);
    for (int Phase = 0; Phase < 2; ++Phase) {
      uint8_t Val = Phase == 0 ? Pref : (uint8_t)(1 - Pref);
      ++Nodes;
      if (Val == 1 && !generalRowsAllowSelect(Var))
        continue;

      // Apply.
      std::vector<int> Trail;
      State[Var] = Assigned;
      X[Var] = Val;
      Cost SavedFixed = Fixed;
      Cost SavedNeg = NegAvail;
      NegAvail -= std::min<Cost>(0, NetCoef[Var]);
      if (Val) {
        Fixed += NetCoef[Var];
        for (int Partner : PartnersOf[Var])
          if (State[Partner] == Free) {
            State[Partner] = Excluded;
            NegAvail -= std::min<Cost>(0, NetCoef[Partner]);
            Trail.push_back(Partner);
          }
      }

      if (!prunable())
        search(Depth + 1);

      // Undo.
      for (int Partner : Trail)
        State[Partner] = Free;
      State[Var] = Free;
      X[Var] = 0;
      Fixed = SavedFixed;
      NegAvail = SavedNeg;

      if (TimedOut || (TieBreakPass && Found))
        return;
    }
  }
};

} // namespace detail

/// Minimizes the linearized packing problem. With no deadline the result is
/// status Optimal and deterministic; with a deadline the best incumbent found
/// so far is returned as Feasible.
inline Assignment
solveIlp(const IlpProblem &P,
         std::optional<std::chrono::milliseconds> Timeout = std::nullopt) {
  detail::BranchAndBound BB(P);
  BB.run(Timeout);

  Assignment Res;
  Res.NodesVisited = BB.Nodes;
  Res.St = BB.TimedOut ? Assignment::Status::Feasible
                       : Assignment::Status::Optimal;
  Res.Values = P.deriveAuxiliaries(BB.BestDecisions);
  Res.Objective = P.objectiveAt(Res.Values);
  for (int I = 0; I < P.NumDecisions; ++I)
    if (BB.BestDecisions[I])
      Res.Selected.push_back(I);
  return Res;
}

//===----------------------------------------------------------------------===//
// Brute-force optimality oracle
//===----------------------------------------------------------------------===//

struct BruteForceResult {
  std::vector<int> Packing;
  Cost Objective = 0;
};

/// Enumerates every overlap-free, schedulable subset of D and returns the one
/// minimizing evaluateObjective. Intentionally independent of the encoder,
/// the linearizer, and the branch-and-bound search.
inline BruteForceResult bruteForcePacking(const Universe &U,
                                          const PackUniverse &P,
                                          const CostModel &CM,
                                          int SizeLimit = 20) {
  if ((int)P.D.size() > SizeLimit)
    throw PackingError("brute force limit exceeded: |D| = " +
                       std::to_string(P.D.size()) + " > " +
                       std::to_string(SizeLimit));
  BruteForceResult Best;
  Best.Objective = evaluateObjective(U, P, CM, {});

  int N = (int)P.D.size();
  std::vector<int> Chosen;
  std::set<int> Used;
  auto Rec = [&](auto &&Self, int I) -> void {
    if (I == N) {
      std::vector<int> Sel = Chosen;
      if (!schedulablePackSet(U, P.D, Sel))
        return;
      Cost Obj = evaluateObjective(U, P, CM, Sel);
      if (Obj < Best.Objective) {
        Best.Objective = Obj;
        Best.Packing = Sel;
      }
      return;
    }
    auto [A, B] = P.D[I];
    if (!Used.count(A) && !Used.count(B)) {
      Used.insert(A);
      Used.insert(B);
      Chosen.push_back(I);
      Self(Self, I + 1);
      Chosen.pop_back();
      Used.erase(A);
      Used.erase(B);
    }
    Self(Self, I + 1);
  };
  Rec(Rec, 0);
  return Best;
}

} // namespace goslp
