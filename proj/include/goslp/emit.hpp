//===- goslp/emit.hpp - Vector code emission --------------------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Schedules packs and residual scalars into a legal order and emits
// vectorized IR with explicit pack/extract/perm pseudo-instructions.
//
// Reuse rules: a lane is extracted at most once per value, a non-vector
// operand tuple is materialized at most once and reused by every consumer,
// and a permuted view of a pack is built at most once per distinct mask.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/permute.hpp"

namespace goslp {

class EmitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand of a vector statement: a vector register, an immediate lane tuple,
/// or (for scalar-built packs and scalar statements) plain scalar operands.
struct VecOperand {
  enum class Kind { Register, Immediate };
  Kind K = Kind::Register;
  std::string Reg;               // vector value id
  std::vector<Operand> Lanes;    // immediate tuple
};

struct VectorStatement {
  enum class Kind {
    Scalar,   ///< original scalar statement, operands possibly renamed
    VLoad,    ///< %id = vload A[lo], w
    VStore,   ///< vstore A[lo], <vec>, w
    VOp,      ///< %id = v<op> <vec>, <vec>, w
    PackBuild,///< %id = pack s0, ..., s(w-1)
    Concat,   ///< %id = concat <vecA>, <vecB>
    Extract,  ///< %sid = extract <vec>, lane
    Perm,     ///< %id = perm <vec>, (m0,...,m(w-1))
  };
  Kind K = Kind::Scalar;
  std::string Id; // defined value (scalar for Extract/Scalar, vector else)
  Opcode Op = Opcode::Const;
  Type Ty = Type::F64;
  int Lanes = 1;
  std::vector<VecOperand> VOps;    // vector-shaped operands
  std::vector<Operand> ScalarOps;  // scalar operands (Scalar, PackBuild)
  std::optional<MemRange> Mem;     // VLoad/VStore
  PermMask Mask;                   // Perm
  int Lane = 0;                    // Extract
  int OrigStmt = -1;               // Scalar: index into Function::Statements
  std::vector<int> Covered;        // original statements this one executes
};

struct CategoryCounts {
  long long Scalar = 0;
  long long Vector = 0;
  long long Packing = 0;
  long long Unpacking = 0;
  long long Permute = 0;
  long long total() const {
    return Scalar + Vector + Packing + Unpacking + Permute;
  }
  bool operator==(const CategoryCounts &) const = default;
};

struct VectorFunction {
  std::string Name;
  std::vector<ArrayDecl> Arrays;
  std::vector<std::string> BlockNames;
  std::vector<std::vector<VectorStatement>> Blocks;
  /// Original scalar value -> (vector register, physical lane).
  std::map<std::string, std::pair<std::string, int>> LaneBinding;
  std::vector<std::string> Exports;
};

inline CategoryCounts countInstructions(const VectorFunction &VF) {
  CategoryCounts C;
  for (const auto &B : VF.Blocks)
    for (const auto &S : B)
      switch (S.K) {
      case VectorStatement::Kind::Scalar:
        ++C.Scalar;
        break;
      case VectorStatement::Kind::VLoad:
      case VectorStatement::Kind::VStore:
      case VectorStatement::Kind::VOp:
        ++C.Vector;
        break;
      case VectorStatement::Kind::PackBuild:
      case VectorStatement::Kind::Concat:
        ++C.Packing;
        break;
      case VectorStatement::Kind::Extract:
        ++C.Unpacking;
        break;
      case VectorStatement::Kind::Perm:
        ++C.Permute;
        break;
      }
  return C;
}

//===----------------------------------------------------------------------===//
// Emission
//===----------------------------------------------------------------------===//

namespace detail {

struct Emitter {
  const Function &F;
  const DepGraph &G;
  const PackSet &PS;
  const VecGraph &VG;

  VectorFunction VF;
  std::vector<int> PackOfStmt;         // stmt -> pack index or -1
  std::vector<PermMask> Phys;          // pack -> physical lane permutation
  std::vector<std::vector<int>> PhysStmts; // pack -> stmts in physical order
  std::vector<std::string> PackReg;    // pack -> vector register id
  std::map<std::vector<int>, int> PackOfSorted;

  std::set<std::string> ScalarAvail;   // values materialized as scalars
  std::map<std::pair<int, std::string>, std::string> PermCache;
  std::map<std::string, std::string> TupleCache; // tuple key -> register
  int NameCounter = 0;
  std::vector<VectorStatement> *Out = nullptr;

  Emitter(const Function &F, const DepGraph &G, const PackSet &PS,
          const VecGraph &VG)
      : F(F), G(G), PS(PS), VG(VG) {}

  std::string freshReg() {
    for (;;) {
      std::string Name = "vp" + std::to_string(NameCounter++);
      if (!F.ValueDef.count(Name))
        return Name;
    }
  }

  /// Physical lane order sigma of a node: lane i holds canonical lane
  /// sigma[i]. Constrained packs stay canonical.
  void computePhysical() {
    Phys.assign(PS.Packs.size(), {});
    PhysStmts.assign(PS.Packs.size(), {});
    for (const auto &Node : VG.Nodes) {
      PermMask Mu = Node.Selected.empty()
                        ? identityMask(Node.Width)
                        : Node.Selected;
      Phys[Node.PackIndex] = compose(Node.Gamma, invert(Mu));
    }
    for (int PI = 0; PI < (int)PS.Packs.size(); ++PI) {
      if (Phys[PI].empty())
        Phys[PI] = identityMask(PS.Packs[PI].width());
      for (int I = 0; I < PS.Packs[PI].width(); ++I)
        PhysStmts[PI].push_back(PS.Packs[PI].Stmts[Phys[PI][I]]);
    }
  }

  void push(VectorStatement S) { Out->push_back(std::move(S)); }

  /// Scalar value of `Id`, extracting a lane once if it lives in a vector.
  Operand scalarValue(const std::string &Id) {
    if (ScalarAvail.count(Id))
      return Operand::value(Id);
    auto It = VF.LaneBinding.find(Id);
    if (It == VF.LaneBinding.end())
      throw EmitError("value '" + Id + "' is not materialized");
    VectorStatement E;
    E.K = VectorStatement::Kind::Extract;
    E.Id = Id;
    E.Ty = F.Statements[F.ValueDef.at(Id)].Ty;
    E.Lanes = 1;
    E.VOps.push_back({VecOperand::Kind::Register, It->second.first, {}});
    E.Lane = It->second.second;
    push(std::move(E));
    ScalarAvail.insert(Id);
    return Operand::value(Id);
  }

  Operand scalarOperand(const Operand &O) {
    return O.IsLiteral ? O : scalarValue(O.Id);
  }

  std::string tupleKey(const std::vector<Operand> &T) {
    std::string K;
    for (const Operand &O : T)
      K += O.text() + "|";
    return K;
  }

  /// Register holding pack PI permuted so that lane i carries the value of
  /// statement Want[i]; emits one perm instruction per distinct mask.
  std::string permutedPack(int PI, const std::vector<int> &Want) {
    PermMask Rho(Want.size());
    for (size_t I = 0; I < Want.size(); ++I) {
      auto It = std::find(PhysStmts[PI].begin(), PhysStmts[PI].end(),
                          (int)Want[I]);
      Rho[I] = (int)(It - PhysStmts[PI].begin());
    }
    if (Rho == identityMask((int)Rho.size()))
      return PackReg[PI];
    auto Key = std::make_pair(PI, maskText(Rho));
    auto It = PermCache.find(Key);
    if (It != PermCache.end())
      return It->second;
    VectorStatement P;
    P.K = VectorStatement::Kind::Perm;
    P.Id = freshReg();
    P.Ty = PS.Packs[PI].Ty;
    P.Lanes = (int)Rho.size();
    P.VOps.push_back({VecOperand::Kind::Register, PackReg[PI], {}});
    P.Mask = Rho;
    push(P);
    PermCache[Key] = P.Id;
    return P.Id;
  }

  /// Vector-shaped operand carrying the values of tuple T, in that lane
  /// order. Prefers a direct or permuted pack register, then a concat of two
  /// pack registers, then a cached explicit pack build.
  VecOperand vectorOperand(const std::vector<Operand> &T, Type Ty) {
    bool AllLit = true;
    for (const Operand &O : T)
      AllLit &= O.IsLiteral;
    if (AllLit)
      return {VecOperand::Kind::Immediate, "", T};

    // One producing pack covering every lane exactly once?
    std::vector<int> Producers;
    bool AllValues = true;
    for (const Operand &O : T) {
      if (O.IsLiteral) {
        AllValues = false;
        break;
      }
      Producers.push_back(F.ValueDef.at(O.Id));
    }
    if (AllValues) {
      std::vector<int> Key = Producers;
      std::sort(Key.begin(), Key.end());
      if (std::unique(Key.begin(), Key.end()) == Key.end()) {
        auto It = PackOfSorted.find(Key);
        if (It != PackOfSorted.end() && !PackReg[It->second].empty())
          return {VecOperand::Kind::Register,
                  permutedPack(It->second, Producers), {}};
      }
      // Two half-width pack registers joined by one shuffle?
      if (T.size() >= 4 && T.size() % 2 == 0) {
        auto HalfReg = [&](size_t Begin) -> std::string {
          std::vector<int> Half(Producers.begin() + Begin,
                                Producers.begin() + Begin + T.size() / 2);
          std::vector<int> HKey = Half;
          std::sort(HKey.begin(), HKey.end());
          auto HIt = PackOfSorted.find(HKey);
          if (HIt == PackOfSorted.end() || PackReg[HIt->second].empty())
            return "";
          if (PhysStmts[HIt->second] != Half)
            return "";
          return PackReg[HIt->second];
        };
        std::string A = HalfReg(0);
        std::string B = HalfReg(T.size() / 2);
        if (!A.empty() && !B.empty()) {
          std::string CK = tupleKey(T);
          auto CIt = TupleCache.find(CK);
          if (CIt != TupleCache.end())
            return {VecOperand::Kind::Register, CIt->second, {}};
          VectorStatement C;
          C.K = VectorStatement::Kind::Concat;
          C.Id = freshReg();
          C.Ty = Ty;
          C.Lanes = (int)T.size();
          C.VOps.push_back({VecOperand::Kind::Register, A, {}});
          C.VOps.push_back({VecOperand::Kind::Register, B, {}});
          push(C);
          TupleCache[CK] = C.Id;
          return {VecOperand::Kind::Register, C.Id, {}};
        }
      }
    }

    // Explicit non-vector pack, materialized once per distinct tuple.
    std::string CK = tupleKey(T);
    auto CIt = TupleCache.find(CK);
    if (CIt != TupleCache.end())
      return {VecOperand::Kind::Register, CIt->second, {}};
    VectorStatement P;
    P.K = VectorStatement::Kind::PackBuild;
    P.Ty = Ty;
    P.Lanes = (int)T.size();
    for (const Operand &O : T)
      P.ScalarOps.push_back(scalarOperand(O));
    P.Id = freshReg();
    push(P);
    TupleCache[CK] = P.Id;
    return {VecOperand::Kind::Register, P.Id, {}};
  }

  void emitScalar(int SI) {
    const Statement &S = F.Statements[SI];
    VectorStatement V;
    V.K = VectorStatement::Kind::Scalar;
    V.Id = S.definesValue() ? S.Id : "";
    V.Op = S.Op;
    V.Ty = S.Ty;
    V.Lanes = 1;
    V.OrigStmt = SI;
    V.Covered = {SI};
    if (S.Mem)
      V.Mem = MemRange{S.Mem->Array, S.Mem->Index, 1};
    for (const Operand &O : S.Operands)
      V.ScalarOps.push_back(scalarOperand(O));
    push(std::move(V));
    if (S.definesValue())
      ScalarAvail.insert(S.Id);
  }

  void emitPack(int PI) {
    const Pack &P = PS.Packs[PI];
    const std::vector<int> &PStmts = PhysStmts[PI];
    int W = P.width();
    switch (P.Op) {
    case Opcode::Load: {
      VectorStatement V;
      V.K = VectorStatement::Kind::VLoad;
      V.Id = freshReg();
      V.Op = P.Op;
      V.Ty = P.Ty;
      V.Lanes = W;
      V.Mem = MemRange{F.Statements[P.Stmts[0]].Mem->Array,
                       F.Statements[P.Stmts[0]].Mem->Index, W};
      V.Covered = P.Stmts;
      PackReg[PI] = V.Id;
      push(std::move(V));
      break;
    }
    case Opcode::Store: {
      std::vector<Operand> T;
      for (int SI : PStmts)
        T.push_back(F.Statements[SI].Operands[0]);
      VecOperand Val = vectorOperand(T, P.Ty);
      VectorStatement V;
      V.K = VectorStatement::Kind::VStore;
      V.Op = P.Op;
      V.Ty = P.Ty;
      V.Lanes = W;
      V.Mem = MemRange{F.Statements[P.Stmts[0]].Mem->Array,
                       F.Statements[P.Stmts[0]].Mem->Index, W};
      V.Covered = P.Stmts;
      V.VOps.push_back(std::move(Val));
      push(std::move(V));
      break;
    }
    default: {
      VectorStatement V;
      V.K = VectorStatement::Kind::VOp;
      V.Id = freshReg();
      V.Op = P.Op;
      V.Ty = P.Ty;
      V.Lanes = W;
      size_t OperandCount = F.Statements[P.Stmts[0]].Operands.size();
      for (size_t K = 0; K < OperandCount; ++K) {
        std::vector<Operand> T;
        for (int SI : PStmts)
          T.push_back(F.Statements[SI].Operands[K]);
        V.VOps.push_back(vectorOperand(T, P.Ty));
      }
      V.Covered = P.Stmts;
      PackReg[PI] = V.Id;
      push(std::move(V));
      break;
    }
    }
    for (int L = 0; L < W; ++L) {
      const Statement &S = F.Statements[PStmts[L]];
      if (S.definesValue())
        VF.LaneBinding[S.Id] = {PackReg[PI], L};
    }
  }

  VectorFunction run() {
    VF.Name = F.Name;
    VF.Arrays = F.Arrays;
    VF.Exports = F.Exports;
    computePhysical();
    PackReg.assign(PS.Packs.size(), "");
    PackOfStmt.assign(F.Statements.size(), -1);
    for (int PI = 0; PI < (int)PS.Packs.size(); ++PI) {
      std::vector<int> Key = PS.Packs[PI].Stmts;
      std::sort(Key.begin(), Key.end());
      PackOfSorted[Key] = PI;
      for (int SI : PS.Packs[PI].Stmts)
        PackOfStmt[SI] = PI;
    }

    for (int BI = 0; BI < (int)F.Blocks.size(); ++BI) {
      VF.BlockNames.push_back(F.Blocks[BI].Name);
      VF.Blocks.emplace_back();
      Out = &VF.Blocks.back();

      // Items: packs of this block and residual scalars, list-scheduled in
      // dependence order; ready items are taken by earliest original
      // position.
      struct Item {
        bool IsPack;
        int Index; // pack index or stmt index
        int MinPos;
        std::vector<int> Stmts;
      };
      std::vector<Item> Items;
      std::set<int> SeenPacks;
      for (int SI : F.Blocks[BI].Stmts) {
        int PI = PackOfStmt[SI];
        if (PI < 0) {
          Items.push_back({false, SI, F.Statements[SI].Pos, {SI}});
        } else if (SeenPacks.insert(PI).second) {
          int MinPos = F.Statements[SI].Pos;
          for (int M : PS.Packs[PI].Stmts)
            MinPos = std::min(MinPos, F.Statements[M].Pos);
          Items.push_back({true, PI, MinPos, PS.Packs[PI].Stmts});
        }
      }
      std::vector<int> ItemOf(F.Statements.size(), -1);
      for (int II = 0; II < (int)Items.size(); ++II)
        for (int SI : Items[II].Stmts)
          ItemOf[SI] = II;

      std::vector<bool> Emitted(Items.size(), false);
      int Remaining = (int)Items.size();
      std::vector<bool> StmtDone(F.Statements.size(), false);
      // Statements of earlier blocks are done.
      for (int BJ = 0; BJ < BI; ++BJ)
        for (int SI : F.Blocks[BJ].Stmts)
          StmtDone[SI] = true;

      auto Ready = [&](const Item &It) {
        for (int SI : It.Stmts)
          for (int PredS : G.Preds[SI]) {
            if (ItemOf[PredS] >= 0 && ItemOf[PredS] == ItemOf[SI])
              continue; // intra-item
            if (!StmtDone[PredS])
              return false;
          }
        return true;
      };

      while (Remaining > 0) {
        int Pick = -1;
        for (int II = 0; II < (int)Items.size(); ++II) {
          if (Emitted[II] || !Ready(Items[II]))
            continue;
          if (Pick < 0 || Items[II].MinPos < Items[Pick].MinPos)
            Pick = II;
        }
        if (Pick < 0)
          throw EmitError("internal: scheduling deadlock; the pack set "
                          "violates its scheduling constraints");
        Emitted[Pick] = true;
        --Remaining;
        if (Items[Pick].IsPack)
          emitPack(Items[Pick].Index);
        else
          emitScalar(Items[Pick].Index);
        for (int SI : Items[Pick].Stmts)
          StmtDone[SI] = true;
      }
    }

    // Exported values still living in lanes are extracted once, at the end
    // of the block that defines them.
    for (const std::string &E : F.Exports) {
      if (ScalarAvail.count(E))
        continue;
      auto It = VF.LaneBinding.find(E);
      if (It == VF.LaneBinding.end())
        throw EmitError("export '" + E + "' is not materialized");
      int DefBlock = F.Statements[F.ValueDef.at(E)].Block;
      Out = &VF.Blocks[DefBlock];
      scalarValue(E);
    }
    return VF;
  }
};

} // namespace detail

/// Emits vectorized IR for a function under a final pack set with selected
/// lane orders. The pack set must satisfy the overlap and scheduling
/// constraints; a scheduling failure here indicates a constraint bug and
/// throws.
inline VectorFunction emitVectorFunction(const Function &F, const DepGraph &G,
                                         const PackSet &PS,
                                         const VecGraph &VG) {
  detail::Emitter E(F, G, PS, VG);
  return E.run();
}

//===----------------------------------------------------------------------===//
// Printing
//===----------------------------------------------------------------------===//

inline std::string printVecOperand(const VecOperand &O) {
  if (O.K == VecOperand::Kind::Register)
    return "%" + O.Reg;
  std::string S = "(";
  for (size_t I = 0; I < O.Lanes.size(); ++I)
    S += (I ? "," : "") + O.Lanes[I].LitText;
  return S + ")";
}

inline std::string printVectorStatement(const VectorStatement &S) {
  std::ostringstream OS;
  switch (S.K) {
  case VectorStatement::Kind::Scalar: {
    Statement Plain;
    Plain.Id = S.Id;
    Plain.Op = S.Op;
    Plain.Ty = S.Ty;
    Plain.Operands = S.ScalarOps;
    if (S.Mem)
      Plain.Mem = MemRef{S.Mem->Array, S.Mem->Lo};
    OS << printStatement(Plain);
    break;
  }
  case VectorStatement::Kind::VLoad:
    OS << "%" << S.Id << " = vload " << S.Mem->Array << "[" << S.Mem->Lo
       << "], " << S.Lanes << " : " << typeName(S.Ty);
    break;
  case VectorStatement::Kind::VStore:
    OS << "vstore " << S.Mem->Array << "[" << S.Mem->Lo << "], "
       << printVecOperand(S.VOps[0]) << ", " << S.Lanes << " : "
       << typeName(S.Ty);
    break;
  case VectorStatement::Kind::VOp:
    OS << "%" << S.Id << " = v" << opcodeName(S.Op) << " "
       << printVecOperand(S.VOps[0]) << ", " << printVecOperand(S.VOps[1])
       << ", " << S.Lanes << " : " << typeName(S.Ty);
    break;
  case VectorStatement::Kind::PackBuild:
    OS << "%" << S.Id << " = pack ";
    for (size_t I = 0; I < S.ScalarOps.size(); ++I)
      OS << (I ? ", " : "") << printOperand(S.ScalarOps[I]);
    OS << " : " << typeName(S.Ty);
    break;
  case VectorStatement::Kind::Concat:
    OS << "%" << S.Id << " = concat " << printVecOperand(S.VOps[0]) << ", "
       << printVecOperand(S.VOps[1]) << " : " << typeName(S.Ty);
    break;
  case VectorStatement::Kind::Extract:
    OS << "%" << S.Id << " = extract " << printVecOperand(S.VOps[0]) << ", "
       << S.Lane << " : " << typeName(S.Ty);
    break;
  case VectorStatement::Kind::Perm:
    OS << "%" << S.Id << " = perm " << printVecOperand(S.VOps[0]) << ", (";
    for (size_t I = 0; I < S.Mask.size(); ++I)
      OS << (I ? "," : "") << S.Mask[I];
    OS << ") : " << typeName(S.Ty);
    break;
  }
  return OS.str();
}

inline std::string printVectorFunction(const VectorFunction &VF) {
  std::ostringstream OS;
  OS << "func " << VF.Name << " {\n";
  for (const ArrayDecl &A : VF.Arrays)
    OS << "  array " << A.Name << " : " << typeName(A.Elem) << " x "
       << A.Length << "\n";
  for (const std::string &E : VF.Exports)
    OS << "  export %" << E << "\n";
  for (size_t BI = 0; BI < VF.Blocks.size(); ++BI) {
    OS << "  block " << VF.BlockNames[BI] << ":\n";
    for (const auto &S : VF.Blocks[BI])
      OS << "    " << printVectorStatement(S) << "\n";
    if (BI + 1 < VF.Blocks.size())
      OS << "    br " << VF.BlockNames[BI + 1] << "\n";
  }
  OS << "}\n";
  return OS.str();
}

} // namespace goslp
