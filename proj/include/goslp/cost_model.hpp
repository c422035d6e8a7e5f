//===- goslp/cost_model.hpp - Pluggable cost oracle --------------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Every cost the packing ILP and the permutation DP query comes through this
// interface: scalar and vector statement costs, the cost of building a
// non-vector pack with insertion instructions, the cost of extracting one
// lane, shuffle costs for operating on whole subvectors, and the cost of a
// vector permutation instruction. All costs are integers.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/ir.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

namespace goslp {

enum class ShuffleKind { InsertSubvector, Broadcast, Generic };

inline const char *shuffleKindName(ShuffleKind K) {
  switch (K) {
  case ShuffleKind::InsertSubvector:
    return "insert-subvector";
  case ShuffleKind::Broadcast:
    return "broadcast";
  case ShuffleKind::Generic:
    return "generic";
  }
  return "?";
}

class MissingCostError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Cost = long long;
using PermMask = std::vector<int>;

class CostModel {
public:
  virtual ~CostModel() = default;

  virtual Cost scalarCost(Opcode Op, Type Ty) const = 0;
  virtual Cost vectorCost(Opcode Op, Type Ty, int Lanes) const = 0;
  /// Building a non-vector pack of `Lanes` scalars with insertion
  /// instructions.
  virtual Cost packCost(Type Ty, int Lanes) const = 0;
  /// Extracting lane `Lane` from a `Lanes`-wide vector.
  virtual Cost unpackCost(Type Ty, int Lanes, int Lane) const = 0;
  virtual Cost shuffleCost(ShuffleKind K, int Lanes) const = 0;
  /// Cost of one permutation instruction on a `Lanes`-wide vector. Equal
  /// masks are free; see permCost().
  virtual Cost permInstrCost(int Lanes) const = 0;

  /// Optional surcharge per shuffle-class instruction; the execution-port
  /// penalty has no published formula, so it defaults to zero.
  virtual Cost shuffleSurcharge() const { return 0; }

  Cost permCost(const PermMask &A, const PermMask &B) const {
    if (A == B)
      return 0;
    return permInstrCost((int)A.size()) + shuffleSurcharge();
  }
};

/// Unit model: every scalar op, vector op, pack insert, lane extract, shuffle
/// and permute costs 1. Under it, minimizing total cost is minimizing the
/// emitted instruction count.
class UnitCostModel final : public CostModel {
public:
  Cost scalarCost(Opcode, Type) const override { return 1; }
  Cost vectorCost(Opcode, Type, int) const override { return 1; }
  Cost packCost(Type, int) const override { return 1; }
  Cost unpackCost(Type, int, int) const override { return 1; }
  Cost shuffleCost(ShuffleKind, int) const override { return 1; }
  Cost permInstrCost(int) const override { return 1; }
};

/// Table-backed model. Missing entries fail at query time, not load time.
class TableCostModel final : public CostModel {
public:
  std::map<std::pair<Opcode, Type>, Cost> Scalar;
  std::map<std::tuple<Opcode, Type, int>, Cost> Vector;
  std::map<std::pair<Type, int>, Cost> Pack;
  std::map<std::pair<Type, int>, Cost> Unpack;
  std::map<std::pair<ShuffleKind, int>, Cost> Shuffle;
  std::map<int, Cost> Perm;
  Cost Surcharge = 0;

  Cost scalarCost(Opcode Op, Type Ty) const override {
    auto It = Scalar.find({Op, Ty});
    if (It == Scalar.end())
      throw MissingCostError(std::string("no scalar cost for ") +
                             opcodeName(Op) + " " + typeName(Ty));
    return It->second;
  }
  Cost vectorCost(Opcode Op, Type Ty, int Lanes) const override {
    auto It = Vector.find({Op, Ty, Lanes});
    if (It == Vector.end())
      throw MissingCostError(std::string("no vector cost for ") +
                             opcodeName(Op) + " " + typeName(Ty) + " x" +
                             std::to_string(Lanes));
    return It->second;
  }
  Cost packCost(Type Ty, int Lanes) const override {
    auto It = Pack.find({Ty, Lanes});
    if (It == Pack.end())
      throw MissingCostError(std::string("no pack cost for ") + typeName(Ty) +
                             " x" + std::to_string(Lanes));
    return It->second;
  }
  Cost unpackCost(Type Ty, int Lanes, int) const override {
    auto It = Unpack.find({Ty, Lanes});
    if (It == Unpack.end())
      throw MissingCostError(std::string("no unpack cost for ") +
                             typeName(Ty) + " x" + std::to_string(Lanes));
    return It->second;
  }
  Cost shuffleCost(ShuffleKind K, int Lanes) const override {
    auto It = Shuffle.find({K, Lanes});
    if (It == Shuffle.end())
      throw MissingCostError(std::string("no shuffle cost for ") +
                             shuffleKindName(K) + " x" +
                             std::to_string(Lanes));
    return It->second;
  }
  Cost permInstrCost(int Lanes) const override {
    auto It = Perm.find(Lanes);
    if (It == Perm.end())
      throw MissingCostError("no perm cost for x" + std::to_string(Lanes));
    return It->second;
  }
  Cost shuffleSurcharge() const override { return Surcharge; }
};

class CostTableError : public std::runtime_error {
public:
  CostTableError(int Line, const std::string &Msg)
      : std::runtime_error("cost table line " + std::to_string(Line) + ": " +
                           Msg) {}
  explicit CostTableError(const std::string &Msg) : std::runtime_error(Msg) {}
};

/// Parses the line-oriented cost-table format:
///
///   scalar <op> <ty> <cost>
///   vector <op> <ty> <lanes> <cost>
///   pack <ty> <lanes> <cost>
///   unpack <ty> <lanes> <cost>
///   shuffle <kind> <lanes> <cost>
///   perm <lanes> <cost>
///
/// with `#` comments. An optional `surcharge <cost>` line sets the per-shuffle
/// penalty. A table with no entries is rejected.
inline std::shared_ptr<CostModel> parseCostTable(const std::string &Text) {
  auto M = std::make_shared<TableCostModel>();
  std::istringstream In(Text);
  std::string LineText;
  int LineNo = 0;
  int Entries = 0;

  auto ParseOpcode = [](const std::string &W, int Line) -> Opcode {
    if (W == "load")
      return Opcode::Load;
    if (W == "store")
      return Opcode::Store;
    if (auto Op = parseArithOpcode(W))
      return *Op;
    throw CostTableError(Line, "unknown opcode '" + W + "'");
  };
  auto ParseType = [](const std::string &W, int Line) -> Type {
    auto Ty = parseTypeName(W);
    if (!Ty)
      throw CostTableError(Line, "unknown type '" + W + "'");
    return *Ty;
  };
  auto ParseKind = [](const std::string &W, int Line) -> ShuffleKind {
    if (W == "insert-subvector")
      return ShuffleKind::InsertSubvector;
    if (W == "broadcast")
      return ShuffleKind::Broadcast;
    if (W == "generic")
      return ShuffleKind::Generic;
    throw CostTableError(Line, "unknown shuffle kind '" + W + "'");
  };

  while (std::getline(In, LineText)) {
    ++LineNo;
    auto Hash = LineText.find('#');
    if (Hash != std::string::npos)
      LineText.resize(Hash);
    std::istringstream LS(LineText);
    std::string Kw;
    if (!(LS >> Kw))
      continue;
    auto Word = [&](const char *What) {
      std::string W;
      if (!(LS >> W))
        throw CostTableError(LineNo, std::string("expected ") + What);
      return W;
    };
    auto Num = [&](const char *What) {
      std::string W = Word(What);
      try {
        return (Cost)std::stoll(W);
      } catch (const std::exception &) {
        throw CostTableError(LineNo, std::string("malformed ") + What + " '" +
                                         W + "'");
      }
    };
    if (Kw == "scalar") {
      Opcode Op = ParseOpcode(Word("opcode"), LineNo);
      Type Ty = ParseType(Word("type"), LineNo);
      M->Scalar[{Op, Ty}] = Num("cost");
    } else if (Kw == "vector") {
      Opcode Op = ParseOpcode(Word("opcode"), LineNo);
      Type Ty = ParseType(Word("type"), LineNo);
      int Lanes = (int)Num("lane count");
      M->Vector[{Op, Ty, Lanes}] = Num("cost");
    } else if (Kw == "pack") {
      Type Ty = ParseType(Word("type"), LineNo);
      int Lanes = (int)Num("lane count");
      M->Pack[{Ty, Lanes}] = Num("cost");
    } else if (Kw == "unpack") {
      Type Ty = ParseType(Word("type"), LineNo);
      int Lanes = (int)Num("lane count");
      M->Unpack[{Ty, Lanes}] = Num("cost");
    } else if (Kw == "shuffle") {
      ShuffleKind K = ParseKind(Word("kind"), LineNo);
      int Lanes = (int)Num("lane count");
      M->Shuffle[{K, Lanes}] = Num("cost");
    } else if (Kw == "perm") {
      int Lanes = (int)Num("lane count");
      M->Perm[Lanes] = Num("cost");
    } else if (Kw == "surcharge") {
      M->Surcharge = Num("cost");
    } else {
      throw CostTableError(LineNo, "unknown entry kind '" + Kw + "'");
    }
    ++Entries;
  }
  if (Entries == 0)
    throw CostTableError("cost table has no entries");
  return M;
}

inline std::shared_ptr<CostModel> loadCostTable(const std::string &Path) {
  std::ifstream In(Path);
  if (!In)
    throw CostTableError("cannot open cost table '" + Path + "'");
  std::ostringstream SS;
  SS << In.rdbuf();
  return parseCostTable(SS.str());
}

} // namespace goslp
