//===- tests/support.hpp - Shared test helpers ------------------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/driver.hpp"
#include "goslp/solver.hpp"

#include <fstream>
#include <random>
#include <sstream>

namespace goslp::test {

inline std::string dataPath(const std::string &Name) {
  return std::string(GOSLP_DATA_DIR) + "/" + Name;
}

inline std::string slurp(const std::string &Path) {
  std::ifstream In(Path);
  if (!In)
    throw std::runtime_error("cannot open '" + Path + "'");
  std::ostringstream SS;
  SS << In.rdbuf();
  return SS.str();
}

inline Function loadFunction(const std::string &Name) {
  return parseFunction(slurp(dataPath(Name)));
}

//===----------------------------------------------------------------------===//
// Random loop-free program generator
//===----------------------------------------------------------------------===//

struct GenOptions {
  int MinStatements = 6;
  int MaxStatements = 22;
  int MaxBlocks = 2;
  int MaxArrays = 3;
  bool WithStores = true;
  bool WithExports = true;
  // Bias toward runs of consecutive loads/stores and reuse of neighboring
  // values, so candidate pairs actually arise.
  int RunBias = 3;
  // Occasionally emit a whole load -> op -> store group whose operand wiring
  // is a random permutation of the loaded lanes, the pattern that forces
  // permutation instructions.
  bool PermStress = false;
};

/// Generates a valid loop-free function. Same seed, same program. Designed so
/// that integer division never appears with a possibly-zero divisor.
inline Function randomProgram(uint64_t Seed, const GenOptions &Opt = {}) {
  std::mt19937_64 Rng(Seed);
  auto Pick = [&](int Lo, int Hi) {
    return Lo + (int)(Rng() % (uint64_t)(Hi - Lo + 1));
  };

  std::ostringstream OS;
  OS << "func fuzz" << (Seed & 0xffff) << " {\n";

  int NumArrays = Pick(1, Opt.MaxArrays);
  struct Arr {
    std::string Name;
    Type Ty;
    int Len;
  };
  std::vector<Arr> Arrays;
  const Type Types[] = {Type::I32, Type::I64, Type::F32, Type::F64};
  for (int A = 0; A < NumArrays; ++A) {
    Arr R;
    R.Name = std::string(1, (char)('A' + A));
    R.Ty = Types[Pick(0, 3)];
    R.Len = Pick(4, 12);
    Arrays.push_back(R);
    OS << "  array " << R.Name << " : " << typeName(R.Ty) << " x " << R.Len
       << "\n";
  }

  int NumStmts = Pick(Opt.MinStatements, Opt.MaxStatements);
  int NumBlocks = Pick(1, Opt.MaxBlocks);
  struct Val {
    std::string Id;
    Type Ty;
    int Block;
  };
  std::vector<Val> Vals;
  int Serial = 0;
  std::vector<std::string> Exported;

  for (int B = 0; B < NumBlocks; ++B) {
    OS << "  block b" << B << ":\n";
    int BlockStmts = NumStmts / NumBlocks + (B == 0 ? NumStmts % NumBlocks : 0);
    int S = 0;
    while (S < BlockStmts) {
      int Kind = Pick(0, 9);
      if (Opt.PermStress && Kind == 9) {
        // A shuffled stencil: W consecutive loads, W isomorphic float ops
        // consuming a random permutation of the loaded values, W consecutive
        // stores, when a float array is wide enough.
        int AI = -1;
        for (int Try = 0; Try < NumArrays; ++Try) {
          int C = Pick(0, NumArrays - 1);
          if (isFloatType(Arrays[C].Ty) && Arrays[C].Len >= 4) {
            AI = C;
            break;
          }
        }
        if (AI >= 0) {
          const Arr &A = Arrays[AI];
          int W = std::min(2 + 2 * Pick(0, 1), A.Len / 2); // 2 or 4 lanes
          int LBase = Pick(0, A.Len / 2 - W);
          int SBase = A.Len / 2 + Pick(0, A.Len - A.Len / 2 - W);
          std::vector<int> Ld, PermA, PermB;
          for (int I = 0; I < W; ++I) {
            std::string Id = "t" + std::to_string(Serial++);
            OS << "    %" << Id << " = load " << A.Name << "[" << LBase + I
               << "] : " << typeName(A.Ty) << "\n";
            Ld.push_back((int)Vals.size());
            Vals.push_back({Id, A.Ty, B});
            PermA.push_back(I);
            PermB.push_back(I);
          }
          std::shuffle(PermA.begin(), PermA.end(), Rng);
          std::shuffle(PermB.begin(), PermB.end(), Rng);
          const char *Op = Pick(0, 1) ? "fdiv" : "fsub";
          std::vector<std::string> Ops;
          for (int I = 0; I < W; ++I) {
            std::string Id = "t" + std::to_string(Serial++);
            OS << "    %" << Id << " = " << Op << " %"
               << Vals[Ld[PermA[I]]].Id << ", %" << Vals[Ld[PermB[I]]].Id
               << " : " << typeName(A.Ty) << "\n";
            Ops.push_back(Id);
            Vals.push_back({Id, A.Ty, B});
          }
          for (int I = 0; I < W; ++I)
            OS << "    store " << A.Name << "[" << SBase + I << "], %"
               << Ops[I] << " : " << typeName(A.Ty) << "\n";
          S += 3 * W;
          continue;
        }
      }
      if (Kind < 4) {
        // A run of consecutive loads.
        const Arr &A = Arrays[Pick(0, NumArrays - 1)];
        int Run = std::min(Pick(1, Opt.RunBias + 1), BlockStmts - S);
        Run = std::min(Run, A.Len);
        int Base = Pick(0, A.Len - Run);
        for (int I = 0; I < Run; ++I) {
          std::string Id = "t" + std::to_string(Serial++);
          OS << "    %" << Id << " = load " << A.Name << "[" << Base + I
             << "] : " << typeName(A.Ty) << "\n";
          Vals.push_back({Id, A.Ty, B});
          ++S;
        }
      } else if (Kind < 8 || !Opt.WithStores) {
        // Arithmetic over existing values of one type, or a literal.
        std::vector<int> OfType;
        Type Ty = Types[Pick(0, 3)];
        for (int VI = 0; VI < (int)Vals.size(); ++VI)
          if (Vals[VI].Ty == Ty)
            OfType.push_back(VI);
        if (OfType.empty()) {
          std::string Id = "t" + std::to_string(Serial++);
          OS << "    %" << Id << " = const "
             << (isIntType(Ty) ? std::to_string(Pick(1, 9))
                               : std::to_string(Pick(1, 9)) + ".5")
             << " : " << typeName(Ty) << "\n";
          Vals.push_back({Id, Ty, B});
          ++S;
          continue;
        }
        const char *IntOps[] = {"add", "sub", "mul"};
        const char *FpOps[] = {"fadd", "fsub", "fmul", "fdiv"};
        std::string Op = isIntType(Ty) ? IntOps[Pick(0, 2)] : FpOps[Pick(0, 3)];
        auto Operand = [&]() -> std::string {
          if (Pick(0, 4) == 0)
            return isIntType(Ty) ? std::to_string(Pick(1, 9))
                                 : std::to_string(Pick(1, 9)) + ".25";
          // Prefer recent values: keeps chains short and local.
          int VI = OfType[std::max(0, (int)OfType.size() - 1 - Pick(0, 5))];
          return "%" + Vals[VI].Id;
        };
        std::string Id = "t" + std::to_string(Serial++);
        OS << "    %" << Id << " = " << Op << " " << Operand() << ", "
           << Operand() << " : " << typeName(Ty) << "\n";
        Vals.push_back({Id, Ty, B});
        ++S;
      } else {
        // A run of consecutive stores of same-typed values.
        const Arr &A = Arrays[Pick(0, NumArrays - 1)];
        std::vector<int> OfType;
        for (int VI = 0; VI < (int)Vals.size(); ++VI)
          if (Vals[VI].Ty == A.Ty)
            OfType.push_back(VI);
        if (OfType.empty()) {
          ++S; // skip; loop tries something else next round
          continue;
        }
        int Run = std::min(Pick(1, Opt.RunBias), BlockStmts - S);
        Run = std::min(Run, A.Len);
        int Base = Pick(0, A.Len - Run);
        for (int I = 0; I < Run; ++I) {
          int VI = OfType[Pick(0, (int)OfType.size() - 1)];
          OS << "    store " << A.Name << "[" << Base + I << "], %"
             << Vals[VI].Id << " : " << typeName(A.Ty) << "\n";
          ++S;
        }
      }
    }
    if (B + 1 < NumBlocks)
      OS << "    br b" << B + 1 << "\n";
  }
  if (Opt.WithExports && !Vals.empty()) {
    int NumExports = Pick(0, std::min(3, (int)Vals.size()));
    std::set<int> Chosen;
    for (int E = 0; E < NumExports; ++E)
      Chosen.insert(Pick(0, (int)Vals.size() - 1));
    for (int VI : Chosen)
      OS << "  export %" << Vals[VI].Id << "\n";
  }
  OS << "}\n";
  return parseFunction(OS.str());
}

} // namespace goslp::test
