//===- goslp/candidates.hpp - Feasible pairs and use maps ------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Computes, for each packable statement S, the feasible partner set f_S, the
// candidate pack universe D of unordered feasible pairs, and the
// VecVecUses / NonVecVecUses maps that drive the ILP encoding.
//
// Everything here works on "units" rather than raw statements: at the first
// packing iteration a unit is one scalar statement, and at later iterations a
// unit is an already-formed vector pack treated as an individual vector
// statement. This keeps a single code path for candidate collection and ILP
// encoding across widening iterations.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/cost_model.hpp"
#include "goslp/ir.hpp"

#include <map>
#include <set>
#include <sstream>

namespace goslp {

/// A memory range covered by a unit: `Count` consecutive elements of `Array`
/// starting at `Lo`.
struct MemRange {
  std::string Array;
  int64_t Lo = 0;
  int64_t Count = 1;

  bool adjacentBelow(const MemRange &Above) const {
    return Array == Above.Array && Lo + Count == Above.Lo;
  }
};

/// One packing unit: a scalar statement (width 1) or a formed pack treated as
/// a single vector statement (width 2^k).
struct Unit {
  std::string Id;
  int Block = 0;
  int Pos = 0;   // program position of the earliest constituent
  Opcode Op = Opcode::Const;
  Type Ty = Type::F64;
  int Width = 1;
  bool Packable = true; // const statements are never packing candidates

  /// Per operand position, one value/literal per lane.
  std::vector<std::vector<Operand>> Operands;
  /// Values produced, one per lane; empty for stores.
  std::vector<std::string> Results;
  std::optional<MemRange> Mem;

  /// Distinct consumer units inside the universe.
  std::vector<int> Users;
  /// True when some produced value is exported or consumed outside the
  /// universe (by a scalar leftover, a different-width pack, or a partial
  /// tuple); such values must be kept extractable.
  bool OutsideUse = false;
};

/// The set of units for one packing iteration plus unit-level reachability.
/// Every unit covers one or more underlying statements; dependence questions
/// are answered at the statement level so that paths threading through
/// leftover scalars are never missed.
struct Universe {
  std::vector<Unit> Units;
  std::vector<std::vector<int>> Members; // per unit: statement indices
  int NumStmts = 0;
  std::vector<std::pair<int, int>> StmtEdges; // direct dependence edges

  std::map<std::string, int> ProducerOfValue;          // value id -> unit
  std::map<std::vector<std::string>, int> ProducerOfTuple; // sorted ids -> unit

  /// Unit A reaches unit B when some member of A reaches a member of B.
  bool reaches(int A, int B) const {
    return UnitClosure[(size_t)B * Units.size() + (size_t)A] != 0;
  }
  bool independent(int A, int B) const {
    return A != B && !reaches(A, B) && !reaches(B, A);
  }
  bool stmtReaches(int A, int B) const {
    if (A == B)
      return false;
    return StmtClosure[B][(size_t)A / 64] >> ((size_t)A % 64) & 1;
  }

  /// Computes statement-level transitive closure and lifts it to units. Call
  /// after Units/Members/StmtEdges are filled.
  void finalize();

  /// Producer unit of an operand lane tuple, or -1 when the lanes are not
  /// produced by exactly one unit. Lane order within the tuple is ignored;
  /// permutation selection restores order later.
  int producerOf(const std::vector<Operand> &Tuple) const {
    std::vector<std::string> Ids;
    Ids.reserve(Tuple.size());
    for (const Operand &O : Tuple) {
      if (O.IsLiteral)
        return -1;
      Ids.push_back(O.Id);
    }
    std::sort(Ids.begin(), Ids.end());
    if (Tuple.size() == 1) {
      auto It = ProducerOfValue.find(Ids[0]);
      return It == ProducerOfValue.end() ? -1 : It->second;
    }
    auto It = ProducerOfTuple.find(Ids);
    return It == ProducerOfTuple.end() ? -1 : It->second;
  }

private:
  std::vector<std::vector<uint64_t>> StmtClosure;
  std::vector<uint8_t> UnitClosure;
};

inline void Universe::finalize() {
  size_t Words = ((size_t)NumStmts + 63) / 64;
  StmtClosure.assign(NumStmts, std::vector<uint64_t>(Words, 0));
  std::vector<std::vector<int>> Preds(NumStmts);
  for (auto &[From, To] : StmtEdges)
    Preds[To].push_back(From);
  // Statement order is topological: edges go from lower to higher position.
  for (int V = 0; V < NumStmts; ++V)
    for (int P : Preds[V]) {
      StmtClosure[V][(size_t)P / 64] |= uint64_t(1) << ((size_t)P % 64);
      for (size_t W = 0; W < Words; ++W)
        StmtClosure[V][W] |= StmtClosure[P][W];
    }
  size_t N = Units.size();
  UnitClosure.assign(N * N, 0);
  for (size_t A = 0; A < N; ++A)
    for (size_t B = 0; B < N; ++B) {
      if (A == B)
        continue;
      bool R = false;
      for (int SA : Members[A]) {
        for (int SB : Members[B])
          if (stmtReaches(SA, SB)) {
            R = true;
            break;
          }
        if (R)
          break;
      }
      UnitClosure[B * N + A] = R;
    }
}

/// Universe of scalar statements (iteration 1). Units mirror statements
/// one-to-one, in program order, so unit indices equal statement indices.
inline Universe makeScalarUniverse(const Function &F, const DepGraph &G) {
  Universe U;
  U.NumStmts = (int)F.Statements.size();
  U.Units.reserve(F.Statements.size());
  for (const Statement &S : F.Statements) {
    Unit N;
    N.Id = S.Id;
    N.Block = S.Block;
    N.Pos = S.Pos;
    N.Op = S.Op;
    N.Ty = S.Ty;
    N.Width = 1;
    N.Packable = S.Op != Opcode::Const;
    for (const Operand &O : S.Operands)
      N.Operands.push_back({O});
    if (S.definesValue()) {
      N.Results.push_back(S.Id);
      U.ProducerOfValue[S.Id] = (int)U.Units.size();
    }
    if (S.Mem)
      N.Mem = MemRange{S.Mem->Array, S.Mem->Index, 1};
    N.OutsideUse = S.definesValue() && F.isExported(S.Id);
    U.Members.push_back({(int)U.Units.size()});
    U.Units.push_back(std::move(N));
  }
  // Distinct consumers per unit. Memory ordering edges do not make the later
  // access a consumer of the value.
  for (int I = 0; I < (int)F.Statements.size(); ++I) {
    std::set<int> Seen;
    for (int Succ : G.Succs[I])
      if (Seen.insert(Succ).second) {
        bool DataUse = false;
        for (const Operand &O : F.Statements[Succ].Operands)
          if (!O.IsLiteral && O.Id == F.Statements[I].Id)
            DataUse = true;
        if (DataUse)
          U.Units[I].Users.push_back(Succ);
      }
  }
  for (const DepEdge &E : G.Edges)
    U.StmtEdges.push_back({E.From, E.To});
  U.finalize();
  return U;
}

//===----------------------------------------------------------------------===//
// Feasible sets, candidate universe D, use maps
//===----------------------------------------------------------------------===//

/// Key of a non-vector operand pack: the combined operand tuple of a
/// candidate pair at one operand position, in canonical pack order. Tuples of
/// constants are free to materialize.
struct NonVecKey {
  std::vector<Operand> Tuple;
  Type Ty = Type::F64;
  bool ConstLike = false;

  bool operator<(const NonVecKey &RHS) const { return Tuple < RHS.Tuple; }
  std::string display() const {
    std::string S = "(";
    for (size_t I = 0; I < Tuple.size(); ++I) {
      if (I)
        S += ",";
      S += Tuple[I].text();
    }
    return S + ")";
  }
};

struct PackUniverse {
  /// f_S: for each unit, the sorted set of feasible partners.
  std::vector<std::vector<int>> Feasible;
  /// D: canonical unordered candidate pairs, (lower pos, higher pos), sorted.
  std::vector<std::pair<int, int>> D;
  std::map<std::pair<int, int>, int> DIndex;

  /// Candidate pack -> candidate packs that would consume it as a vector
  /// operand (indices into D on both sides).
  std::map<int, std::vector<int>> VecVecUses;
  /// Non-vector operand tuple -> candidate packs that would consume it.
  std::map<NonVecKey, std::vector<int>> NonVecVecUses;

  int dIndexOf(int A, int B) const {
    auto Key = A < B ? std::make_pair(A, B) : std::make_pair(B, A);
    auto It = DIndex.find(Key);
    return It == DIndex.end() ? -1 : It->second;
  }
  bool inD(int A, int B) const { return dIndexOf(A, B) >= 0; }
};

/// The four pairing conditions: same block, isomorphic, independent, and
/// adjacent for memory accesses. Schedulability of the pair reduces to
/// independence under this memory model: a pair can be co-scheduled exactly
/// when merging the two statements keeps the dependence graph acyclic, and
/// any intervening aliasing access that would force an impossible placement
/// shows up as a dependence path between the two statements.
inline bool feasiblePair(const Universe &U, int A, int B) {
  const Unit &X = U.Units[A];
  const Unit &Y = U.Units[B];
  if (A == B || !X.Packable || !Y.Packable)
    return false;
  if (X.Block != Y.Block || X.Width != Y.Width)
    return false;
  if (X.Op != Y.Op || X.Ty != Y.Ty)
    return false;
  if (!U.independent(A, B))
    return false;
  if (X.Mem || Y.Mem) {
    if (!X.Mem || !Y.Mem)
      return false;
    if (!X.Mem->adjacentBelow(*Y.Mem) && !Y.Mem->adjacentBelow(*X.Mem))
      return false;
  }
  return true;
}

inline std::vector<std::vector<int>> collectFeasibleSets(const Universe &U) {
  int N = (int)U.Units.size();
  std::vector<std::vector<int>> F(N);
  // Group by block to keep the scan quadratic per block only.
  std::map<int, std::vector<int>> ByBlock;
  for (int I = 0; I < N; ++I)
    ByBlock[U.Units[I].Block].push_back(I);
  for (auto &[Block, Members] : ByBlock) {
    (void)Block;
    for (size_t I = 0; I < Members.size(); ++I)
      for (size_t J = I + 1; J < Members.size(); ++J)
        if (feasiblePair(U, Members[I], Members[J])) {
          F[Members[I]].push_back(Members[J]);
          F[Members[J]].push_back(Members[I]);
        }
  }
  for (auto &Set : F)
    std::sort(Set.begin(), Set.end());
  return F;
}

inline std::vector<std::pair<int, int>>
buildPackUniverseD(const std::vector<std::vector<int>> &Feasible) {
  std::vector<std::pair<int, int>> D;
  for (int A = 0; A < (int)Feasible.size(); ++A)
    for (int B : Feasible[A])
      if (A < B)
        D.push_back({A, B});
  std::sort(D.begin(), D.end());
  return D;
}

/// Populates VecVecUses and NonVecVecUses: walk the operand tuples of every
/// candidate pair in order. If the combined tuple is produced by a feasible
/// candidate pair it is a vectorizable use; otherwise it must be packed
/// explicitly if the consumer is vectorized. All-literal tuples materialize
/// as constant vectors and carry no cost, so they get no entry at all.
inline void buildUseMaps(const Universe &U, PackUniverse &P) {
  P.VecVecUses.clear();
  P.NonVecVecUses.clear();
  for (int DI = 0; DI < (int)P.D.size(); ++DI) {
    auto [A, B] = P.D[DI];
    const Unit &X = U.Units[A];
    const Unit &Y = U.Units[B];
    for (size_t K = 0; K < X.Operands.size(); ++K) {
      const std::vector<Operand> &TA = X.Operands[K];
      const std::vector<Operand> &TB = Y.Operands[K];
      int PA = U.producerOf(TA);
      int PB = U.producerOf(TB);
      int OpDI = (PA >= 0 && PB >= 0) ? P.dIndexOf(PA, PB) : -1;
      if (OpDI >= 0) {
        P.VecVecUses[OpDI].push_back(DI);
        continue;
      }
      NonVecKey Key;
      Key.Tuple = TA;
      Key.Tuple.insert(Key.Tuple.end(), TB.begin(), TB.end());
      Key.Ty = X.Ty;
      Key.ConstLike = true;
      for (const Operand &O : Key.Tuple) {
        if (O.IsLiteral)
          continue;
        auto It = U.ProducerOfValue.find(O.Id);
        if (It == U.ProducerOfValue.end() ||
            U.Units[It->second].Op != Opcode::Const)
          Key.ConstLike = false;
      }
      bool AllLit = true;
      for (const Operand &O : Key.Tuple)
        AllLit &= O.IsLiteral;
      if (AllLit)
        continue;
      P.NonVecVecUses[Key].push_back(DI);
    }
  }
  for (auto &[K, V] : P.VecVecUses) {
    (void)K;
    std::sort(V.begin(), V.end());
    V.erase(std::unique(V.begin(), V.end()), V.end());
  }
  for (auto &[K, V] : P.NonVecVecUses) {
    (void)K;
    std::sort(V.begin(), V.end());
    V.erase(std::unique(V.begin(), V.end()), V.end());
  }
}

inline PackUniverse buildPackUniverse(const Universe &U) {
  PackUniverse P;
  P.Feasible = collectFeasibleSets(U);
  P.D = buildPackUniverseD(P.Feasible);
  for (int I = 0; I < (int)P.D.size(); ++I)
    P.DIndex[P.D[I]] = I;
  buildUseMaps(U, P);
  return P;
}

//===----------------------------------------------------------------------===//
// Debug dump (golden-tested against the paper's listings)
//===----------------------------------------------------------------------===//

inline std::string packName(const Universe &U,
                            const std::pair<int, int> &Pair) {
  return "{" + U.Units[Pair.first].Id + "," + U.Units[Pair.second].Id + "}";
}

/// One line per f_S entry and one per map entry, lexicographically sorted
/// within each section.
inline std::string dumpCandidates(const Universe &U, const PackUniverse &P) {
  std::vector<std::string> Lines;
  for (int I = 0; I < (int)U.Units.size(); ++I) {
    if (!U.Units[I].Packable)
      continue;
    std::string L = "f[" + U.Units[I].Id + "] = {";
    std::vector<std::string> Ids;
    for (int J : P.Feasible[I])
      Ids.push_back(U.Units[J].Id);
    std::sort(Ids.begin(), Ids.end());
    for (size_t K = 0; K < Ids.size(); ++K)
      L += (K ? "," : "") + Ids[K];
    Lines.push_back(L + "}");
  }
  std::sort(Lines.begin(), Lines.end());

  std::ostringstream OS;
  for (const std::string &L : Lines)
    OS << L << "\n";

  std::vector<std::string> DNames;
  for (const auto &Pair : P.D)
    DNames.push_back(packName(U, Pair));
  std::sort(DNames.begin(), DNames.end());
  OS << "D = {";
  for (size_t I = 0; I < DNames.size(); ++I)
    OS << (I ? "," : "") << DNames[I];
  OS << "}\n";

  auto UserList = [&](const std::vector<int> &Users) {
    std::vector<std::string> Names;
    for (int DI : Users)
      Names.push_back(packName(U, P.D[DI]));
    std::sort(Names.begin(), Names.end());
    std::string S = "{";
    for (size_t I = 0; I < Names.size(); ++I)
      S += (I ? "," : "") + Names[I];
    return S + "}";
  };

  Lines.clear();
  for (const auto &[DI, Users] : P.VecVecUses)
    Lines.push_back("vecvec[" + packName(U, P.D[DI]) +
                    "] = " + UserList(Users));
  std::sort(Lines.begin(), Lines.end());
  for (const std::string &L : Lines)
    OS << L << "\n";

  Lines.clear();
  for (const auto &[Key, Users] : P.NonVecVecUses)
    Lines.push_back("nonvec[" + Key.display() + "] = " + UserList(Users));
  std::sort(Lines.begin(), Lines.end());
  for (const std::string &L : Lines)
    OS << L << "\n";
  return OS.str();
}

//===----------------------------------------------------------------------===//
// Pack-level cost helpers
//===----------------------------------------------------------------------===//

/// vec_savings of merging units A and B (same width) into one pack: the
/// merged vector cost minus what the two halves cost individually. Negative
/// when vectorizing pays.
inline Cost vecSavings(const CostModel &CM, const Universe &U, int A, int B) {
  const Unit &X = U.Units[A];
  const Unit &Y = U.Units[B];
  Cost Merged = CM.vectorCost(X.Op, X.Ty, X.Width * 2);
  Cost Halves;
  if (X.Width == 1)
    Halves = CM.scalarCost(X.Op, X.Ty) + CM.scalarCost(Y.Op, Y.Ty);
  else
    Halves = CM.vectorCost(X.Op, X.Ty, X.Width) +
             CM.vectorCost(Y.Op, Y.Ty, Y.Width);
  return Merged - Halves;
}

/// pack_cost of explicitly materializing candidate pair {A,B} when it is not
/// vectorized: scalar pairs use insertion instructions, wider pairs join two
/// existing vectors with a subvector-insert shuffle.
inline Cost packPairCost(const CostModel &CM, const Universe &U, int A,
                         int B) {
  const Unit &X = U.Units[A];
  (void)B;
  if (X.Width == 1)
    return CM.packCost(X.Ty, 2);
  return CM.shuffleCost(ShuffleKind::InsertSubvector, X.Width * 2);
}

/// Conservative per-lane extraction cost `up` for pair {A,B}: the worst lane
/// for scalar pairs, a generic shuffle for wider ones.
inline Cost unpackPairCost(const CostModel &CM, const Universe &U, int A,
                           int B) {
  const Unit &X = U.Units[A];
  (void)B;
  if (X.Width == 1)
    return std::max(CM.unpackCost(X.Ty, 2, 0), CM.unpackCost(X.Ty, 2, 1));
  return CM.shuffleCost(ShuffleKind::Generic, X.Width * 2);
}

/// pack_cost of a non-vector operand tuple. Constant tuples materialize for
/// free as vector immediates.
inline Cost nonVecPackCost(const CostModel &CM, const NonVecKey &Key) {
  if (Key.ConstLike)
    return 0;
  return CM.packCost(Key.Ty, (int)Key.Tuple.size());
}

} // namespace goslp
