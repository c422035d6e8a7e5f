//===- goslp/verify.hpp - Interpreter-based equivalence ---------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Twin interpreters for the scalar IR and the emitted vector IR. Equivalence
// is bit-exact, including floating point: packing never reassociates
// arithmetic, every lane performs the identical operation on identical
// operands, so even NaN payloads and signed zeros must match.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/emit.hpp"

#include <cmath>
#include <cstring>

namespace goslp {

class TrapError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One runtime scalar. Only the member matching Ty is meaningful.
struct Value {
  Type Ty = Type::F64;
  int32_t I32 = 0;
  int64_t I64 = 0;
  float F32 = 0.0f;
  double F64 = 0.0;

  uint64_t bits() const {
    switch (Ty) {
    case Type::I32:
      return (uint64_t)(uint32_t)I32;
    case Type::I64:
      return (uint64_t)I64;
    case Type::F32: {
      uint32_t B;
      std::memcpy(&B, &F32, sizeof(B));
      return B;
    }
    case Type::F64: {
      uint64_t B;
      std::memcpy(&B, &F64, sizeof(B));
      return B;
    }
    }
    return 0;
  }
  bool bitEquals(const Value &O) const {
    return Ty == O.Ty && bits() == O.bits();
  }

  static Value ofLiteral(const Operand &O, Type Ty) {
    Value V;
    V.Ty = Ty;
    switch (Ty) {
    case Type::I32:
      V.I32 = (int32_t)O.LitInt;
      break;
    case Type::I64:
      V.I64 = O.LitInt;
      break;
    case Type::F32:
      V.F32 = (float)O.LitFP;
      break;
    case Type::F64:
      V.F64 = O.LitFP;
      break;
    }
    return V;
  }

  std::string text() const {
    std::ostringstream OS;
    switch (Ty) {
    case Type::I32:
      OS << I32;
      break;
    case Type::I64:
      OS << I64;
      break;
    case Type::F32:
      OS.precision(9);
      OS << F32;
      break;
    case Type::F64:
      OS.precision(17);
      OS << F64;
      break;
    }
    return OS.str();
  }
};

struct RunOptions {
  bool TrapFpDivZero = false; // integer division by zero always traps
};

struct MachineState {
  struct ArrayState {
    Type Elem = Type::F64;
    std::vector<Value> Cells;
    std::vector<bool> Init;
  };
  std::map<std::string, ArrayState> Arrays;
  std::map<std::string, Value> Scalars;

  static MachineState forFunction(const Function &F) {
    MachineState S;
    for (const ArrayDecl &A : F.Arrays) {
      ArrayState AS;
      AS.Elem = A.Elem;
      AS.Cells.assign((size_t)A.Length, Value{});
      for (auto &C : AS.Cells)
        C.Ty = A.Elem;
      AS.Init.assign((size_t)A.Length, false);
      S.Arrays[A.Name] = std::move(AS);
    }
    return S;
  }

  void setArray(const std::string &Name, const std::vector<Value> &Vals) {
    ArrayState &AS = Arrays.at(Name);
    if (Vals.size() != AS.Cells.size())
      throw VerifyError("array '" + Name + "' expects " +
                        std::to_string(AS.Cells.size()) + " values");
    AS.Cells = Vals;
    AS.Init.assign(AS.Cells.size(), true);
  }
};

namespace detail {

inline Value applyArith(Opcode Op, Type Ty, const Value &A, const Value &B,
                        const RunOptions &Opts) {
  Value R;
  R.Ty = Ty;
  auto TrapZero = [&](bool Zero, bool FP) {
    if (Zero && (!FP || Opts.TrapFpDivZero))
      throw TrapError("division by zero");
  };
  switch (Op) {
  case Opcode::Add:
    if (Ty == Type::I32)
      R.I32 = (int32_t)((uint32_t)A.I32 + (uint32_t)B.I32);
    else
      R.I64 = (int64_t)((uint64_t)A.I64 + (uint64_t)B.I64);
    break;
  case Opcode::Sub:
    if (Ty == Type::I32)
      R.I32 = (int32_t)((uint32_t)A.I32 - (uint32_t)B.I32);
    else
      R.I64 = (int64_t)((uint64_t)A.I64 - (uint64_t)B.I64);
    break;
  case Opcode::Mul:
    if (Ty == Type::I32)
      R.I32 = (int32_t)((uint32_t)A.I32 * (uint32_t)B.I32);
    else
      R.I64 = (int64_t)((uint64_t)A.I64 * (uint64_t)B.I64);
    break;
  case Opcode::Div:
    if (Ty == Type::I32) {
      TrapZero(B.I32 == 0, false);
      if (A.I32 == INT32_MIN && B.I32 == -1)
        R.I32 = INT32_MIN; // wraps instead of faulting
      else
        R.I32 = A.I32 / B.I32;
    } else {
      TrapZero(B.I64 == 0, false);
      if (A.I64 == INT64_MIN && B.I64 == -1)
        R.I64 = INT64_MIN;
      else
        R.I64 = A.I64 / B.I64;
    }
    break;
  case Opcode::FAdd:
    if (Ty == Type::F32)
      R.F32 = A.F32 + B.F32;
    else
      R.F64 = A.F64 + B.F64;
    break;
  case Opcode::FSub:
    if (Ty == Type::F32)
      R.F32 = A.F32 - B.F32;
    else
      R.F64 = A.F64 - B.F64;
    break;
  case Opcode::FMul:
    if (Ty == Type::F32)
      R.F32 = A.F32 * B.F32;
    else
      R.F64 = A.F64 * B.F64;
    break;
  case Opcode::FDiv:
    if (Ty == Type::F32) {
      TrapZero(B.F32 == 0.0f, true);
      R.F32 = A.F32 / B.F32;
    } else {
      TrapZero(B.F64 == 0.0, true);
      R.F64 = A.F64 / B.F64;
    }
    break;
  default:
    throw VerifyError("not an arithmetic opcode");
  }
  return R;
}

} // namespace detail

//===----------------------------------------------------------------------===//
// Scalar interpreter
//===----------------------------------------------------------------------===//

inline MachineState runScalar(const Function &F, const MachineState &Init,
                              const RunOptions &Opts = {}) {
  MachineState S = Init;
  auto OperandValue = [&](const Operand &O, Type Ty) -> Value {
    if (O.IsLiteral)
      return Value::ofLiteral(O, Ty);
    auto It = S.Scalars.find(O.Id);
    if (It == S.Scalars.end())
      throw VerifyError("use of unevaluated value '" + O.Id + "'");
    return It->second;
  };
  for (const Statement &St : F.Statements) {
    switch (St.Op) {
    case Opcode::Load: {
      auto &AS = S.Arrays.at(St.Mem->Array);
      if (!AS.Init[(size_t)St.Mem->Index])
        throw TrapError("uninitialized read from " + St.Mem->Array + "[" +
                        std::to_string(St.Mem->Index) + "]");
      S.Scalars[St.Id] = AS.Cells[(size_t)St.Mem->Index];
      break;
    }
    case Opcode::Store: {
      auto &AS = S.Arrays.at(St.Mem->Array);
      AS.Cells[(size_t)St.Mem->Index] = OperandValue(St.Operands[0], St.Ty);
      AS.Init[(size_t)St.Mem->Index] = true;
      break;
    }
    case Opcode::Const:
      S.Scalars[St.Id] = Value::ofLiteral(St.Operands[0], St.Ty);
      break;
    default:
      S.Scalars[St.Id] =
          detail::applyArith(St.Op, St.Ty, OperandValue(St.Operands[0], St.Ty),
                             OperandValue(St.Operands[1], St.Ty), Opts);
      break;
    }
  }
  return S;
}

//===----------------------------------------------------------------------===//
// Vector interpreter
//===----------------------------------------------------------------------===//

inline MachineState runVector(const VectorFunction &VF,
                              const MachineState &Init,
                              const RunOptions &Opts = {}) {
  MachineState S = Init;
  std::map<std::string, std::vector<Value>> Regs;

  auto ScalarOperand = [&](const Operand &O, Type Ty) -> Value {
    if (O.IsLiteral)
      return Value::ofLiteral(O, Ty);
    auto It = S.Scalars.find(O.Id);
    if (It == S.Scalars.end())
      throw VerifyError("use of unevaluated value '" + O.Id + "'");
    return It->second;
  };
  auto VectorOperand = [&](const VecOperand &O, Type Ty,
                           int Lanes) -> std::vector<Value> {
    if (O.K == VecOperand::Kind::Immediate) {
      std::vector<Value> V;
      for (const Operand &L : O.Lanes)
        V.push_back(Value::ofLiteral(L, Ty));
      return V;
    }
    auto It = Regs.find(O.Reg);
    if (It == Regs.end())
      throw VerifyError("use of unevaluated register '" + O.Reg + "'");
    if ((int)It->second.size() != Lanes)
      throw VerifyError("lane-width mismatch on register '" + O.Reg + "'");
    return It->second;
  };

  for (const auto &Block : VF.Blocks)
    for (const VectorStatement &St : Block) {
      switch (St.K) {
      case VectorStatement::Kind::Scalar: {
        switch (St.Op) {
        case Opcode::Load: {
          auto &AS = S.Arrays.at(St.Mem->Array);
          if (!AS.Init[(size_t)St.Mem->Lo])
            throw TrapError("uninitialized read from " + St.Mem->Array);
          S.Scalars[St.Id] = AS.Cells[(size_t)St.Mem->Lo];
          break;
        }
        case Opcode::Store: {
          auto &AS = S.Arrays.at(St.Mem->Array);
          AS.Cells[(size_t)St.Mem->Lo] = ScalarOperand(St.ScalarOps[0], St.Ty);
          AS.Init[(size_t)St.Mem->Lo] = true;
          break;
        }
        case Opcode::Const:
          S.Scalars[St.Id] = Value::ofLiteral(St.ScalarOps[0], St.Ty);
          break;
        default:
          S.Scalars[St.Id] = detail::applyArith(
              St.Op, St.Ty, ScalarOperand(St.ScalarOps[0], St.Ty),
              ScalarOperand(St.ScalarOps[1], St.Ty), Opts);
          break;
        }
        break;
      }
      case VectorStatement::Kind::VLoad: {
        auto &AS = S.Arrays.at(St.Mem->Array);
        std::vector<Value> V;
        for (int L = 0; L < St.Lanes; ++L) {
          size_t Idx = (size_t)(St.Mem->Lo + L);
          if (!AS.Init[Idx])
            throw TrapError("uninitialized read from " + St.Mem->Array);
          V.push_back(AS.Cells[Idx]);
        }
        Regs[St.Id] = std::move(V);
        break;
      }
      case VectorStatement::Kind::VStore: {
        auto &AS = S.Arrays.at(St.Mem->Array);
        std::vector<Value> V = VectorOperand(St.VOps[0], St.Ty, St.Lanes);
        for (int L = 0; L < St.Lanes; ++L) {
          AS.Cells[(size_t)(St.Mem->Lo + L)] = V[L];
          AS.Init[(size_t)(St.Mem->Lo + L)] = true;
        }
        break;
      }
      case VectorStatement::Kind::VOp: {
        std::vector<Value> A = VectorOperand(St.VOps[0], St.Ty, St.Lanes);
        std::vector<Value> B = VectorOperand(St.VOps[1], St.Ty, St.Lanes);
        std::vector<Value> R;
        for (int L = 0; L < St.Lanes; ++L)
          R.push_back(detail::applyArith(St.Op, St.Ty, A[L], B[L], Opts));
        Regs[St.Id] = std::move(R);
        break;
      }
      case VectorStatement::Kind::PackBuild: {
        std::vector<Value> V;
        for (const Operand &O : St.ScalarOps)
          V.push_back(ScalarOperand(O, St.Ty));
        Regs[St.Id] = std::move(V);
        break;
      }
      case VectorStatement::Kind::Concat: {
        std::vector<Value> A =
            VectorOperand(St.VOps[0], St.Ty, St.Lanes / 2);
        std::vector<Value> B =
            VectorOperand(St.VOps[1], St.Ty, St.Lanes / 2);
        A.insert(A.end(), B.begin(), B.end());
        Regs[St.Id] = std::move(A);
        break;
      }
      case VectorStatement::Kind::Extract: {
        auto It = Regs.find(St.VOps[0].Reg);
        if (It == Regs.end())
          throw VerifyError("use of unevaluated register");
        S.Scalars[St.Id] = It->second[(size_t)St.Lane];
        break;
      }
      case VectorStatement::Kind::Perm: {
        auto It = Regs.find(St.VOps[0].Reg);
        if (It == Regs.end())
          throw VerifyError("use of unevaluated register");
        std::vector<Value> R;
        for (int M : St.Mask)
          R.push_back(It->second[(size_t)M]);
        Regs[St.Id] = std::move(R);
        break;
      }
      }
    }
  return S;
}

//===----------------------------------------------------------------------===//
// Equivalence
//===----------------------------------------------------------------------===//

/// Bit-exact comparison of array states plus exported scalar values. Returns
/// a description of the first mismatch, or empty on equality.
inline std::string compareStates(const Function &F, const MachineState &A,
                                 const MachineState &B) {
  for (const ArrayDecl &Decl : F.Arrays) {
    const auto &AA = A.Arrays.at(Decl.Name);
    const auto &AB = B.Arrays.at(Decl.Name);
    for (size_t I = 0; I < AA.Cells.size(); ++I) {
      if (AA.Init[I] != AB.Init[I])
        return "array " + Decl.Name + "[" + std::to_string(I) +
               "]: initialization differs";
      if (AA.Init[I] && !AA.Cells[I].bitEquals(AB.Cells[I]))
        return "array " + Decl.Name + "[" + std::to_string(I) + "]: " +
               AA.Cells[I].text() + " vs " + AB.Cells[I].text();
    }
  }
  for (const std::string &E : F.Exports) {
    auto IA = A.Scalars.find(E);
    auto IB = B.Scalars.find(E);
    if (IA == A.Scalars.end() || IB == B.Scalars.end())
      return "export '" + E + "' missing";
    if (!IA->second.bitEquals(IB->second))
      return "export '" + E + "': " + IA->second.text() + " vs " +
             IB->second.text();
  }
  return "";
}

//===----------------------------------------------------------------------===//
// Input-state files
//===----------------------------------------------------------------------===//

/// Parses `array <name> = v1,v2,...` lines into a machine state for F.
/// Arrays not mentioned stay uninitialized.
inline MachineState parseInputState(const Function &F,
                                    const std::string &Text) {
  MachineState S = MachineState::forFunction(F);
  std::istringstream In(Text);
  std::string Line;
  int LineNo = 0;
  while (std::getline(In, Line)) {
    ++LineNo;
    auto Hash = Line.find('#');
    if (Hash != std::string::npos)
      Line.resize(Hash);
    std::istringstream LS(Line);
    std::string Kw;
    if (!(LS >> Kw))
      continue;
    if (Kw != "array")
      throw ParseError(LineNo, "expected 'array'");
    std::string Name, Eq;
    if (!(LS >> Name >> Eq) || Eq != "=")
      throw ParseError(LineNo, "expected 'array <name> = v1,v2,...'");
    if (!S.Arrays.count(Name))
      throw ParseError(LineNo, "unknown array '" + Name + "'");
    Type Ty = S.Arrays[Name].Elem;
    std::string Rest;
    std::getline(LS, Rest);
    std::vector<Value> Vals;
    std::string Tok;
    std::istringstream RS(Rest);
    while (std::getline(RS, Tok, ',')) {
      // trim
      size_t B = Tok.find_first_not_of(" \t");
      size_t E = Tok.find_last_not_of(" \t");
      if (B == std::string::npos)
        throw ParseError(LineNo, "empty element");
      Tok = Tok.substr(B, E - B + 1);
      Vals.push_back(
          Value::ofLiteral(detail::makeLiteral(Tok, Ty, LineNo), Ty));
    }
    S.setArray(Name, Vals);
  }
  return S;
}

} // namespace goslp
