//===- goslp/ilp.hpp - Statement-packing ILP encoding ----------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Encodes statement packing as
//
//   min  VS + PC_vec + PC_nonvec + UC   subject to  OC, CC
//
// over one boolean decision variable per candidate pack. The cost terms are
// naturally products of literals (NOT/AND/OR and a threshold indicator); the
// linearizer introduces one auxiliary 0-1 variable per gate with both-sided
// constraints, so the linear objective agrees with the direct nonlinear
// evaluation at every feasible assignment, not just at optima.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/candidates.hpp"

#include <functional>
#include <set>

namespace goslp {

//===----------------------------------------------------------------------===//
// Nonlinear cost terms
//===----------------------------------------------------------------------===//

/// One objective term. Variables are candidate-pack indices into
/// PackUniverse::D.
struct NonlinearTerm {
  enum class Kind {
    Linear,       ///< Coef * V[Var]
    GatedOr,      ///< Coef * OR(V[o] for o in OrVars)
    NotAndOr,     ///< Coef * NOT(V[Var]) * OR(V[o] for o in OrVars)
    AndThreshold, ///< Coef * V[Var] * [sum of per-use ORs < Uses]
  };
  Kind K = Kind::Linear;
  Cost Coef = 0;
  int Var = -1;
  std::vector<int> OrVars;
  std::vector<std::vector<int>> UseOrs;
  int Uses = 0;
  std::string Note;
};

/// The statement-packing problem in nonlinear form plus the pure-linear
/// scheduling constraints.
struct PackingProblem {
  const Universe *U = nullptr;
  const PackUniverse *P = nullptr;
  std::vector<NonlinearTerm> Terms;

  /// sum(Coef_i * V[Var_i]) <= Bound, over decision variables only.
  struct Row {
    std::vector<std::pair<Cost, int>> LHS;
    Cost Bound = 0;
    std::string Note;
  };
  std::vector<Row> Constraints;
};

//===----------------------------------------------------------------------===//
// Encoders
//===----------------------------------------------------------------------===//

/// VS = sum over P in D of vec_savings(P) * V_P.
inline std::vector<NonlinearTerm> encodeVecSavings(const Universe &U,
                                                   const PackUniverse &P,
                                                   const CostModel &CM) {
  std::vector<NonlinearTerm> Terms;
  for (int DI = 0; DI < (int)P.D.size(); ++DI) {
    auto [A, B] = P.D[DI];
    NonlinearTerm T;
    T.K = NonlinearTerm::Kind::Linear;
    T.Coef = vecSavings(CM, U, A, B);
    T.Var = DI;
    T.Note = "vs" + packName(U, P.D[DI]);
    Terms.push_back(std::move(T));
  }
  return Terms;
}

/// PC_vec: a candidate pack pays its packing cost when it is not vectorized
/// itself but at least one of its vectorizable uses is. PC_nonvec: a
/// non-vector operand tuple pays once when any of its vectorizable uses is
/// vectorized. Packing happens once; later uses reuse the same register.
inline std::vector<NonlinearTerm> encodePackCosts(const Universe &U,
                                                  const PackUniverse &P,
                                                  const CostModel &CM) {
  std::vector<NonlinearTerm> Terms;
  for (const auto &[DI, Users] : P.VecVecUses) {
    auto [A, B] = P.D[DI];
    NonlinearTerm T;
    T.K = NonlinearTerm::Kind::NotAndOr;
    T.Coef = packPairCost(CM, U, A, B);
    T.Var = DI;
    T.OrVars = Users;
    T.Note = "pcvec" + packName(U, P.D[DI]);
    if (T.Coef != 0 && !T.OrVars.empty())
      Terms.push_back(std::move(T));
  }
  for (const auto &[Key, Users] : P.NonVecVecUses) {
    NonlinearTerm T;
    T.K = NonlinearTerm::Kind::GatedOr;
    T.Coef = nonVecPackCost(CM, Key);
    T.OrVars = Users;
    T.Note = "pcnonvec" + Key.display();
    if (T.Coef != 0 && !T.OrVars.empty())
      Terms.push_back(std::move(T));
  }
  return Terms;
}

/// Per-use coverage sets for statement side `Si` of pack {Si,Sj}: for each
/// consumer U of Si, the candidate packs {U,W} with W a consumer of Sj. When
/// such a pack is vectorized, that use of Si consumes the vector directly.
inline std::vector<std::vector<int>> vecUsesFor(const Universe &U,
                                                const PackUniverse &P, int Si,
                                                int Sj) {
  std::vector<std::vector<int>> Result;
  for (int Use : U.Units[Si].Users) {
    std::vector<int> Covers;
    for (int Other : U.Units[Sj].Users) {
      int DI = P.dIndexOf(Use, Other);
      if (DI >= 0)
        Covers.push_back(DI);
    }
    std::sort(Covers.begin(), Covers.end());
    Covers.erase(std::unique(Covers.begin(), Covers.end()), Covers.end());
    Result.push_back(std::move(Covers));
  }
  return Result;
}

/// UC: lane Si of a selected pack {Si,Sj} is extracted when it has uses
/// outside the function, when it has more uses than Sj, or when not all of
/// its uses land in vectorized packs that pair them with uses of Sj. The
/// per-lane cost is the conservative `up` of the pack.
inline std::vector<NonlinearTerm> encodeUnpackCosts(const Universe &U,
                                                    const PackUniverse &P,
                                                    const CostModel &CM) {
  std::vector<NonlinearTerm> Terms;
  for (int DI = 0; DI < (int)P.D.size(); ++DI) {
    auto [A, B] = P.D[DI];
    Cost Up = unpackPairCost(CM, U, A, B);
    if (Up == 0)
      continue;
    auto EncodeSide = [&](int Si, int Sj) {
      const Unit &X = U.Units[Si];
      NonlinearTerm T;
      T.Coef = Up;
      T.Var = DI;
      T.Note = "uc(" + packName(U, P.D[DI]) + "," + X.Id + ")";
      if (X.OutsideUse ||
          X.Users.size() > U.Units[Sj].Users.size()) {
        T.K = NonlinearTerm::Kind::Linear;
        Terms.push_back(std::move(T));
        return;
      }
      if (X.Users.empty())
        return; // nothing ever extracts a dead lane
      auto Covers = vecUsesFor(U, P, Si, Sj);
      // A use with no coverable pack can never be vectorized together with a
      // use of Sj, so extraction is unconditional once the pack forms.
      for (const auto &C : Covers)
        if (C.empty()) {
          T.K = NonlinearTerm::Kind::Linear;
          Terms.push_back(std::move(T));
          return;
        }
      T.K = NonlinearTerm::Kind::AndThreshold;
      T.UseOrs = std::move(Covers);
      T.Uses = (int)T.UseOrs.size();
      Terms.push_back(std::move(T));
    };
    EncodeSide(A, B);
    EncodeSide(B, A);
  }
  return Terms;
}

/// OC: each unit joins at most one pack. CC: two packs whose statements
/// depend on each other in both directions can never be scheduled together.
inline std::vector<PackingProblem::Row>
encodeConstraints(const Universe &U, const PackUniverse &P) {
  std::vector<PackingProblem::Row> Rows;
  std::vector<std::vector<int>> PacksOf(U.Units.size());
  for (int DI = 0; DI < (int)P.D.size(); ++DI) {
    PacksOf[P.D[DI].first].push_back(DI);
    PacksOf[P.D[DI].second].push_back(DI);
  }
  for (int I = 0; I < (int)U.Units.size(); ++I)
    if (PacksOf[I].size() >= 2) {
      PackingProblem::Row R;
      for (int DI : PacksOf[I])
        R.LHS.push_back({1, DI});
      R.Bound = 1;
      R.Note = "oc(" + U.Units[I].Id + ")";
      Rows.push_back(std::move(R));
    }

  auto PackReaches = [&](int DI, int DJ) {
    int Members1[2] = {P.D[DI].first, P.D[DI].second};
    int Members2[2] = {P.D[DJ].first, P.D[DJ].second};
    for (int A : Members1)
      for (int B : Members2)
        if (U.reaches(A, B))
          return true;
    return false;
  };
  for (int I = 0; I < (int)P.D.size(); ++I)
    for (int J = I + 1; J < (int)P.D.size(); ++J) {
      // Overlapping packs are already mutually exclusive through OC.
      std::set<int> Members = {P.D[I].first, P.D[I].second, P.D[J].first,
                               P.D[J].second};
      if (Members.size() < 4)
        continue;
      if (PackReaches(I, J) && PackReaches(J, I)) {
        PackingProblem::Row R;
        R.LHS = {{1, I}, {1, J}};
        R.Bound = 1;
        R.Note = "cc(" + packName(U, P.D[I]) + "," + packName(U, P.D[J]) + ")";
        Rows.push_back(std::move(R));
      }
    }
  return Rows;
}

inline PackingProblem buildPackingProblem(const Universe &U,
                                          const PackUniverse &P,
                                          const CostModel &CM) {
  PackingProblem Prob;
  Prob.U = &U;
  Prob.P = &P;
  auto Append = [&](std::vector<NonlinearTerm> &&Ts) {
    for (auto &T : Ts)
      Prob.Terms.push_back(std::move(T));
  };
  Append(encodeVecSavings(U, P, CM));
  Append(encodePackCosts(U, P, CM));
  Append(encodeUnpackCosts(U, P, CM));
  Prob.Constraints = encodeConstraints(U, P);
  return Prob;
}

//===----------------------------------------------------------------------===//
// Schedulability of a selected pack set
//===----------------------------------------------------------------------===//

namespace detail {

/// Contracts the given statement groups and topologically sorts what
/// remains. Returns true when acyclic; otherwise, when Stuck is provided,
/// fills it with the representative of every group left on a cycle.
inline bool contractAcyclic(int NumStmts,
                            const std::vector<std::pair<int, int>> &Edges,
                            const std::vector<std::vector<int>> &Groups,
                            std::vector<int> *Parents = nullptr,
                            std::set<int> *Stuck = nullptr) {
  std::vector<int> Parent(NumStmts);
  for (int I = 0; I < NumStmts; ++I)
    Parent[I] = I;
  std::function<int(int)> Find = [&](int X) {
    while (Parent[X] != X)
      X = Parent[X] = Parent[Parent[X]];
    return X;
  };
  for (const auto &Group : Groups)
    for (size_t K = 1; K < Group.size(); ++K)
      Parent[Find(Group[K])] = Find(Group[0]);

  std::vector<std::set<int>> Adj(NumStmts);
  std::vector<int> InDeg(NumStmts, 0);
  for (auto &[From, To] : Edges) {
    int GF = Find(From), GT = Find(To);
    if (GF != GT && Adj[GF].insert(GT).second)
      ++InDeg[GT];
  }
  std::vector<int> Work;
  int NumGroups = 0;
  for (int I = 0; I < NumStmts; ++I)
    if (Find(I) == I) {
      ++NumGroups;
      if (InDeg[I] == 0)
        Work.push_back(I);
    }
  int Done = 0;
  while (!Work.empty()) {
    int G = Work.back();
    Work.pop_back();
    ++Done;
    for (int T : Adj[G])
      if (--InDeg[T] == 0)
        Work.push_back(T);
  }
  if (Parents) {
    Parents->resize(NumStmts);
    for (int I = 0; I < NumStmts; ++I)
      (*Parents)[I] = Find(I);
  }
  if (Done == NumGroups)
    return true;
  if (Stuck)
    for (int I = 0; I < NumStmts; ++I)
      if (Find(I) == I && InDeg[I] > 0)
        Stuck->insert(I);
  return false;
}

} // namespace detail

/// Checks that a set of statement groups (packs executing atomically) admits
/// a legal schedule against the given dependence edges.
inline bool schedulableGroups(int NumStmts,
                              const std::vector<std::pair<int, int>> &Edges,
                              const std::vector<std::vector<int>> &Groups) {
  return detail::contractAcyclic(NumStmts, Edges, Groups);
}

/// Checks that a selected pack set admits a legal schedule: every unit (packs
/// execute atomically) and every selected merge is contracted to one node at
/// the statement level, and the dependence graph must stay acyclic. Pairwise
/// CC catches two-pack cycles; this is the full condition the emitter's
/// scheduler needs, covering circular patterns threading through three or
/// more packs or through leftover scalar statements.
inline bool schedulablePackSet(
    const Universe &U, const std::vector<std::pair<int, int>> &D,
    const std::vector<int> &Selected, std::vector<int> *CycleOut = nullptr,
    const std::vector<std::vector<int>> *FrozenGroups = nullptr) {
  std::vector<std::vector<int>> Groups = U.Members;
  if (FrozenGroups)
    for (const auto &G : *FrozenGroups)
      Groups.push_back(G);
  for (int DI : Selected) {
    std::vector<int> Merge = U.Members[D[DI].first];
    Merge.insert(Merge.end(), U.Members[D[DI].second].begin(),
                 U.Members[D[DI].second].end());
    Groups.push_back(std::move(Merge));
  }
  std::vector<int> Parents;
  std::set<int> Stuck;
  if (detail::contractAcyclic(U.NumStmts, U.StmtEdges, Groups, &Parents,
                              &Stuck))
    return true;
  if (CycleOut)
    for (int DI : Selected)
      if (Stuck.count(Parents[U.Members[D[DI].first][0]]))
        CycleOut->push_back(DI);
  return false;
}

//===----------------------------------------------------------------------===//
// Direct nonlinear evaluation (oracle)
//===----------------------------------------------------------------------===//

class PackingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Evaluates VS + PC_vec + PC_nonvec + UC by direct interpretation on a
/// selected pack set, with no auxiliaries. Rejects selections violating the
/// overlap or scheduling constraints.
inline Cost evaluateObjective(const Universe &U, const PackUniverse &P,
                              const CostModel &CM,
                              const std::vector<int> &Packing) {
  std::set<int> Sel(Packing.begin(), Packing.end());
  std::set<int> Used;
  for (int DI : Sel) {
    if (DI < 0 || DI >= (int)P.D.size())
      throw PackingError("packing refers to a pack outside D");
    if (!Used.insert(P.D[DI].first).second ||
        !Used.insert(P.D[DI].second).second)
      throw PackingError("packing violates the overlap constraint");
  }
  std::vector<int> SelVec(Sel.begin(), Sel.end());
  if (!schedulablePackSet(U, P.D, SelVec))
    throw PackingError("packing violates scheduling constraints");

  Cost Total = 0;
  for (int DI : Sel)
    Total += vecSavings(CM, U, P.D[DI].first, P.D[DI].second);

  auto AnySelected = [&](const std::vector<int> &Users) {
    for (int Q : Users)
      if (Sel.count(Q))
        return true;
    return false;
  };
  for (const auto &[DI, Users] : P.VecVecUses)
    if (!Sel.count(DI) && AnySelected(Users))
      Total += packPairCost(CM, U, P.D[DI].first, P.D[DI].second);
  for (const auto &[Key, Users] : P.NonVecVecUses)
    if (AnySelected(Users))
      Total += nonVecPackCost(CM, Key);

  for (int DI : Sel) {
    auto [A, B] = P.D[DI];
    Cost Up = unpackPairCost(CM, U, A, B);
    auto Side = [&](int Si, int Sj) {
      const Unit &X = U.Units[Si];
      if (X.OutsideUse || X.Users.size() > U.Units[Sj].Users.size()) {
        Total += Up;
        return;
      }
      if (X.Users.empty())
        return;
      auto Covers = vecUsesFor(U, P, Si, Sj);
      int Covered = 0;
      for (const auto &C : Covers)
        if (AnySelected(C))
          ++Covered;
      if (Covered < (int)Covers.size())
        Total += Up;
    };
    Side(A, B);
    Side(B, A);
  }
  return Total;
}

//===----------------------------------------------------------------------===//
// Linearization
//===----------------------------------------------------------------------===//

/// Pure 0-1 linear program. The first NumDecisions variables are the pack
/// decision variables in canonical D order; the rest are gate auxiliaries
/// whose values are forced by the decisions through both-sided constraints.
struct IlpProblem {
  int NumDecisions = 0;
  std::vector<std::string> VarNames;

  Cost ObjConst = 0;
  std::vector<std::pair<Cost, int>> Objective; // coef * var

  /// sum(coef * var) <= Bound.
  struct Row {
    std::vector<std::pair<Cost, int>> LHS;
    Cost Bound = 0;
    bool DecisionOnly = false;
    std::string Note;
  };
  std::vector<Row> Rows;

  /// Gate metadata, topologically ordered, for deriving auxiliary values
  /// from a decision assignment.
  struct Gate {
    enum class Kind { Or, AndNotFirst, AndPair, Threshold };
    Kind K = Kind::Or;
    int Out = -1;
    std::vector<int> Ins; // inputs (variables)
    int Thresh = 0;       // Threshold: out = [sum(Ins) < Thresh]
  };
  std::vector<Gate> Gates;

  int numVars() const { return (int)VarNames.size(); }

  /// Forces auxiliary values from the given decision prefix into X (resized
  /// to the full variable count).
  void deriveInto(const std::vector<uint8_t> &Decisions,
                  std::vector<uint8_t> &X) const {
    X.assign(VarNames.size(), 0);
    for (int I = 0; I < NumDecisions; ++I)
      X[I] = Decisions[I];
    for (const Gate &G : Gates) {
      switch (G.K) {
      case Gate::Kind::Or: {
        uint8_t V = 0;
        for (int In : G.Ins)
          V |= X[In];
        X[G.Out] = V;
        break;
      }
      case Gate::Kind::AndNotFirst: {
        uint8_t V = (uint8_t)(1 - X[G.Ins[0]]);
        for (size_t I = 1; I < G.Ins.size(); ++I)
          V &= X[G.Ins[I]];
        X[G.Out] = V;
        break;
      }
      case Gate::Kind::AndPair: {
        X[G.Out] = (uint8_t)(X[G.Ins[0]] & X[G.Ins[1]]);
        break;
      }
      case Gate::Kind::Threshold: {
        Cost Sum = 0;
        for (int In : G.Ins)
          Sum += X[In];
        X[G.Out] = Sum < G.Thresh;
        break;
      }
      }
    }
  }

  std::vector<uint8_t>
  deriveAuxiliaries(const std::vector<uint8_t> &Decisions) const {
    std::vector<uint8_t> X;
    deriveInto(Decisions, X);
    return X;
  }

  Cost objectiveAt(const std::vector<uint8_t> &X) const {
    Cost V = ObjConst;
    for (auto &[C, Var] : Objective)
      V += C * X[Var];
    return V;
  }

  bool decisionRowsHold(const std::vector<uint8_t> &X) const {
    for (const Row &R : Rows) {
      if (!R.DecisionOnly)
        continue;
      Cost S = 0;
      for (auto &[C, Var] : R.LHS)
        S += C * X[Var];
      if (S > R.Bound)
        return false;
    }
    return true;
  }
};

/// Introduces one auxiliary variable per gate with standard bounding
/// inequalities. Minimizing the resulting linear objective is exactly
/// minimizing the nonlinear objective, and because both sides of every gate
/// are constrained, the linear objective agrees with evaluateObjective at
/// every feasible assignment.
inline IlpProblem linearize(const PackingProblem &Prob) {
  IlpProblem P;
  const PackUniverse &PU = *Prob.P;
  const Universe &U = *Prob.U;
  P.NumDecisions = (int)PU.D.size();
  for (const auto &Pair : PU.D)
    P.VarNames.push_back("V" + packName(U, Pair));

  auto NewAux = [&](const std::string &Name) {
    P.VarNames.push_back(Name);
    return (int)P.VarNames.size() - 1;
  };

  int GateId = 0;
  auto MakeOr = [&](const std::vector<int> &Ins, const std::string &Note) {
    int Y = NewAux("or" + std::to_string(GateId++) + ":" + Note);
    IlpProblem::Gate G;
    G.K = IlpProblem::Gate::Kind::Or;
    G.Out = Y;
    G.Ins = Ins;
    P.Gates.push_back(G);
    // y >= x_i  and  y <= sum(x_i)
    for (int In : Ins)
      P.Rows.push_back({{{1, In}, {-1, Y}}, 0, false, Note + ":or.ge"});
    IlpProblem::Row RUp;
    RUp.LHS.push_back({1, Y});
    for (int In : Ins)
      RUp.LHS.push_back({-1, In});
    RUp.Bound = 0;
    RUp.Note = Note + ":or.le";
    P.Rows.push_back(std::move(RUp));
    return Y;
  };

  for (const NonlinearTerm &T : Prob.Terms) {
    if (T.Coef == 0)
      continue;
    switch (T.K) {
    case NonlinearTerm::Kind::Linear:
      P.Objective.push_back({T.Coef, T.Var});
      break;
    case NonlinearTerm::Kind::GatedOr: {
      if (T.OrVars.empty())
        break;
      int Y = MakeOr(T.OrVars, T.Note);
      P.Objective.push_back({T.Coef, Y});
      break;
    }
    case NonlinearTerm::Kind::NotAndOr: {
      if (T.OrVars.empty())
        break;
      int O = MakeOr(T.OrVars, T.Note);
      int G = NewAux("and" + std::to_string(GateId++) + ":" + T.Note);
      IlpProblem::Gate Gate;
      Gate.K = IlpProblem::Gate::Kind::AndNotFirst;
      Gate.Out = G;
      Gate.Ins = {T.Var, O};
      P.Gates.push_back(Gate);
      // g = (1 - v) AND o:  g + v <= 1;  g <= o;  g >= o - v.
      P.Rows.push_back({{{1, G}, {1, T.Var}}, 1, false, T.Note + ":and.a"});
      P.Rows.push_back({{{1, G}, {-1, O}}, 0, false, T.Note + ":and.b"});
      P.Rows.push_back(
          {{{1, O}, {-1, T.Var}, {-1, G}}, 0, false, T.Note + ":and.c"});
      P.Objective.push_back({T.Coef, G});
      break;
    }
    case NonlinearTerm::Kind::AndThreshold: {
      std::vector<int> OrOuts;
      for (size_t UI = 0; UI < T.UseOrs.size(); ++UI)
        OrOuts.push_back(
            MakeOr(T.UseOrs[UI], T.Note + ".u" + std::to_string(UI)));
      int N = (int)OrOuts.size();
      int K = T.Uses;
      int Th = NewAux("thr" + std::to_string(GateId++) + ":" + T.Note);
      IlpProblem::Gate GT;
      GT.K = IlpProblem::Gate::Kind::Threshold;
      GT.Out = Th;
      GT.Ins = OrOuts;
      GT.Thresh = K;
      P.Gates.push_back(GT);
      // t = [sum < K] with big-M bound M = #uses:
      //   sum + (N - K + 1) t <= N      (t forced 0 when sum >= K)
      //   sum + K t >= K                (t forced 1 when sum <= K-1)
      IlpProblem::Row RA;
      for (int O : OrOuts)
        RA.LHS.push_back({1, O});
      RA.LHS.push_back({(Cost)(N - K + 1), Th});
      RA.Bound = N;
      RA.Note = T.Note + ":thr.a";
      P.Rows.push_back(std::move(RA));
      IlpProblem::Row RB;
      for (int O : OrOuts)
        RB.LHS.push_back({-1, O});
      RB.LHS.push_back({(Cost)-K, Th});
      RB.Bound = -K;
      RB.Note = T.Note + ":thr.b";
      P.Rows.push_back(std::move(RB));
      int G = NewAux("and" + std::to_string(GateId++) + ":" + T.Note);
      IlpProblem::Gate GA;
      GA.K = IlpProblem::Gate::Kind::AndPair;
      GA.Out = G;
      GA.Ins = {T.Var, Th};
      P.Gates.push_back(GA);
      // g = v AND t: g <= v; g <= t; g >= v + t - 1.
      P.Rows.push_back({{{1, G}, {-1, T.Var}}, 0, false, T.Note + ":and.a"});
      P.Rows.push_back({{{1, G}, {-1, Th}}, 0, false, T.Note + ":and.b"});
      P.Rows.push_back(
          {{{1, T.Var}, {1, Th}, {-1, G}}, 1, false, T.Note + ":and.c"});
      P.Objective.push_back({T.Coef, G});
      break;
    }
    }
  }

  for (const PackingProblem::Row &R : Prob.Constraints) {
    IlpProblem::Row Row;
    Row.LHS = R.LHS;
    Row.Bound = R.Bound;
    Row.DecisionOnly = true;
    Row.Note = R.Note;
    P.Rows.push_back(std::move(Row));
  }
  return P;
}

/// LP-style text dump of the linearized problem, canonically ordered.
inline std::string dumpIlp(const IlpProblem &P) {
  std::ostringstream OS;
  OS << "min";
  bool First = true;
  std::vector<std::pair<int, Cost>> Sorted;
  for (auto &[C, V] : P.Objective)
    Sorted.push_back({V, C});
  std::sort(Sorted.begin(), Sorted.end());
  for (auto &[V, C] : Sorted) {
    OS << (First ? " " : " + ");
    First = false;
    OS << C << " " << P.VarNames[V];
  }
  if (P.ObjConst != 0)
    OS << " + " << P.ObjConst;
  OS << "\n";
  std::vector<std::string> Lines;
  for (const IlpProblem::Row &R : P.Rows) {
    std::ostringstream LS;
    for (size_t I = 0; I < R.LHS.size(); ++I) {
      if (I)
        LS << " + ";
      LS << R.LHS[I].first << " " << P.VarNames[R.LHS[I].second];
    }
    LS << " <= " << R.Bound << "  [" << R.Note << "]";
    Lines.push_back(LS.str());
  }
  std::sort(Lines.begin(), Lines.end());
  for (const std::string &L : Lines)
    OS << L << "\n";
  return OS.str();
}

/// Evaluates the nonlinear terms directly at a decision assignment given as a
/// selected-pack set; used to cross-check the linearization.
inline Cost evaluateTerms(const std::vector<NonlinearTerm> &Terms,
                          const std::set<int> &Sel) {
  Cost Total = 0;
  auto Any = [&](const std::vector<int> &Vs) {
    for (int V : Vs)
      if (Sel.count(V))
        return true;
    return false;
  };
  for (const NonlinearTerm &T : Terms) {
    switch (T.K) {
    case NonlinearTerm::Kind::Linear:
      Total += T.Coef * (Sel.count(T.Var) ? 1 : 0);
      break;
    case NonlinearTerm::Kind::GatedOr:
      Total += T.Coef * (Any(T.OrVars) ? 1 : 0);
      break;
    case NonlinearTerm::Kind::NotAndOr:
      Total += T.Coef * ((!Sel.count(T.Var) && Any(T.OrVars)) ? 1 : 0);
      break;
    case NonlinearTerm::Kind::AndThreshold: {
      if (!Sel.count(T.Var))
        break;
      int Covered = 0;
      for (const auto &C : T.UseOrs)
        Covered += Any(C) ? 1 : 0;
      if (Covered < T.Uses)
        Total += T.Coef;
      break;
    }
    }
  }
  return Total;
}

} // namespace goslp
