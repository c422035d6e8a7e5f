//===- goslp/ir.hpp - Loop-free IR, parser, dependence analysis -*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// A small loop-free SSA-style IR. Functions are a linear chain of basic
// blocks; every statement defines at most one value; memory references are
// (array, constant index) pairs, so distinct arrays never alias and equal
// indices on the same array always alias. Loops must be unrolled before this
// representation is produced.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <algorithm>
#include <cstdint>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace goslp {

enum class Opcode {
  Load,
  Store,
  Add,
  Sub,
  Mul,
  Div,
  FAdd,
  FSub,
  FMul,
  FDiv,
  Const,
};

enum class Type { I32, I64, F32, F64 };

inline bool isFloatType(Type T) { return T == Type::F32 || T == Type::F64; }
inline bool isIntType(Type T) { return !isFloatType(T); }

inline const char *typeName(Type T) {
  switch (T) {
  case Type::I32:
    return "i32";
  case Type::I64:
    return "i64";
  case Type::F32:
    return "f32";
  case Type::F64:
    return "f64";
  }
  return "?";
}

inline std::optional<Type> parseTypeName(const std::string &S) {
  if (S == "i32")
    return Type::I32;
  if (S == "i64")
    return Type::I64;
  if (S == "f32")
    return Type::F32;
  if (S == "f64")
    return Type::F64;
  return std::nullopt;
}

inline const char *opcodeName(Opcode Op) {
  switch (Op) {
  case Opcode::Load:
    return "load";
  case Opcode::Store:
    return "store";
  case Opcode::Add:
    return "add";
  case Opcode::Sub:
    return "sub";
  case Opcode::Mul:
    return "mul";
  case Opcode::Div:
    return "div";
  case Opcode::FAdd:
    return "fadd";
  case Opcode::FSub:
    return "fsub";
  case Opcode::FMul:
    return "fmul";
  case Opcode::FDiv:
    return "fdiv";
  case Opcode::Const:
    return "const";
  }
  return "?";
}

inline std::optional<Opcode> parseArithOpcode(const std::string &S) {
  static const std::map<std::string, Opcode> Names = {
      {"add", Opcode::Add},   {"sub", Opcode::Sub},   {"mul", Opcode::Mul},
      {"div", Opcode::Div},   {"fadd", Opcode::FAdd}, {"fsub", Opcode::FSub},
      {"fmul", Opcode::FMul}, {"fdiv", Opcode::FDiv}};
  auto It = Names.find(S);
  if (It == Names.end())
    return std::nullopt;
  return It->second;
}

inline bool isArith(Opcode Op) {
  switch (Op) {
  case Opcode::Add:
  case Opcode::Sub:
  case Opcode::Mul:
  case Opcode::Div:
  case Opcode::FAdd:
  case Opcode::FSub:
  case Opcode::FMul:
  case Opcode::FDiv:
    return true;
  default:
    return false;
  }
}

inline bool isMemAccess(Opcode Op) {
  return Op == Opcode::Load || Op == Opcode::Store;
}

/// Operand of a statement: either a reference to a value defined by another
/// statement, or an inline literal. Literal text is kept verbatim so printing
/// round-trips exactly.
struct Operand {
  bool IsLiteral = false;
  std::string Id;       // value id, without the leading '%'
  std::string LitText;  // literal spelling as written
  double LitFP = 0.0;   // parsed literal, float flavor
  int64_t LitInt = 0;   // parsed literal, integer flavor

  static Operand value(std::string Id) {
    Operand O;
    O.Id = std::move(Id);
    return O;
  }

  bool operator==(const Operand &RHS) const {
    if (IsLiteral != RHS.IsLiteral)
      return false;
    return IsLiteral ? LitText == RHS.LitText : Id == RHS.Id;
  }
  bool operator<(const Operand &RHS) const {
    if (IsLiteral != RHS.IsLiteral)
      return IsLiteral < RHS.IsLiteral;
    return IsLiteral ? LitText < RHS.LitText : Id < RHS.Id;
  }
  std::string text() const { return IsLiteral ? LitText : Id; }
};

struct MemRef {
  std::string Array;
  int64_t Index = 0;

  bool operator==(const MemRef &RHS) const {
    return Array == RHS.Array && Index == RHS.Index;
  }
};

/// One IR statement. Stores carry no result id; a synthetic unique id is
/// assigned so that packs of stores can still be named.
struct Statement {
  std::string Id;
  Opcode Op = Opcode::Const;
  Type Ty = Type::I32;
  std::vector<Operand> Operands;
  std::optional<MemRef> Mem;
  int Block = 0; // index into Function::Blocks
  int Pos = 0;   // global program position

  bool definesValue() const { return Op != Opcode::Store; }
};

struct ArrayDecl {
  std::string Name;
  Type Elem = Type::F64;
  int64_t Length = 0;
};

struct BasicBlock {
  std::string Name;
  std::vector<int> Stmts; // indices into Function::Statements, program order
};

class ParseError : public std::runtime_error {
public:
  ParseError(int Line, const std::string &Msg)
      : std::runtime_error("line " + std::to_string(Line) + ": " + Msg),
        Line(Line) {}
  int Line;
};

class VerifyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A function: declared arrays, an ordered chain of blocks, and a flat
/// statement list in program order. Immutable after construction; all
/// analyses are pure queries.
struct Function {
  std::string Name;
  std::vector<ArrayDecl> Arrays;
  std::vector<BasicBlock> Blocks;
  std::vector<Statement> Statements;
  std::vector<std::string> Exports; // value ids with uses outside the function

  std::unordered_map<std::string, int> ValueDef; // value id -> statement index
  std::unordered_map<std::string, int> ArrayIndex;

  const ArrayDecl &arrayOf(const std::string &Name) const {
    return Arrays[ArrayIndex.at(Name)];
  }
  const Statement *def(const std::string &Id) const {
    auto It = ValueDef.find(Id);
    return It == ValueDef.end() ? nullptr : &Statements[It->second];
  }
  bool isExported(const std::string &Id) const {
    return std::find(Exports.begin(), Exports.end(), Id) != Exports.end();
  }
};

//===----------------------------------------------------------------------===//
// Statement predicates
//===----------------------------------------------------------------------===//

/// Two statements are isomorphic when they perform the same operation on the
/// same types. Operand and result types are determined by (opcode, type), so
/// the pairwise comparison reduces to those two fields.
inline bool isomorphic(const Statement &A, const Statement &B) {
  return A.Op == B.Op && A.Ty == B.Ty;
}

/// If A and B are both loads or both stores on the same array with the same
/// element type and indices differing by exactly one, returns the statement
/// that accesses the lower address. Otherwise nullopt.
inline std::optional<const Statement *> adjacentMemory(const Statement &A,
                                                       const Statement &B) {
  if (!A.Mem || !B.Mem || A.Op != B.Op)
    return std::nullopt;
  if (A.Ty != B.Ty || A.Mem->Array != B.Mem->Array)
    return std::nullopt;
  if (A.Mem->Index + 1 == B.Mem->Index)
    return &A;
  if (B.Mem->Index + 1 == A.Mem->Index)
    return &B;
  return std::nullopt;
}

//===----------------------------------------------------------------------===//
// Dependence graph
//===----------------------------------------------------------------------===//

enum class DepKind { Data, Memory };

struct DepEdge {
  int From = 0;
  int To = 0;
  DepKind Kind = DepKind::Data;
};

/// Dependence graph over the statements of one function. Data edges run from
/// a definition to each of its uses. Memory edges connect two accesses of the
/// same array at the same index when at least one is a store, oriented in
/// program order. The graph is acyclic by construction and carries a
/// transitive-closure bitset for reachability queries.
class DepGraph {
public:
  std::vector<DepEdge> Edges;
  std::vector<std::vector<int>> Succs; // statement -> successor statements
  std::vector<std::vector<int>> Preds;

  int size() const { return (int)Succs.size(); }

  /// True when a path of dependence edges leads from A to B (A strictly
  /// before B). reaches(x, x) is false.
  bool reaches(int A, int B) const {
    if (A == B)
      return false;
    return Closure[B][(size_t)A / 64] >> ((size_t)A % 64) & 1;
  }

  bool independent(int A, int B) const {
    return !reaches(A, B) && !reaches(B, A);
  }

  static DepGraph build(const Function &F);

private:
  // Closure[v] = bitset of statements that reach v.
  std::vector<std::vector<uint64_t>> Closure;
};

inline DepGraph DepGraph::build(const Function &F) {
  DepGraph G;
  int N = (int)F.Statements.size();
  G.Succs.resize(N);
  G.Preds.resize(N);

  auto AddEdge = [&](int From, int To, DepKind K) {
    G.Edges.push_back({From, To, K});
    G.Succs[From].push_back(To);
    G.Preds[To].push_back(From);
  };

  for (int I = 0; I < N; ++I) {
    const Statement &S = F.Statements[I];
    for (const Operand &O : S.Operands)
      if (!O.IsLiteral)
        AddEdge(F.ValueDef.at(O.Id), I, DepKind::Data);
  }

  // Memory edges: same array, equal index, at least one store. Distinct
  // arrays never alias, and unequal constant indices never alias.
  std::map<std::pair<std::string, int64_t>, std::vector<int>> ByCell;
  for (int I = 0; I < N; ++I)
    if (F.Statements[I].Mem)
      ByCell[{F.Statements[I].Mem->Array, F.Statements[I].Mem->Index}]
          .push_back(I);
  for (auto &[Cell, Accs] : ByCell) {
    (void)Cell;
    for (size_t I = 0; I < Accs.size(); ++I)
      for (size_t J = I + 1; J < Accs.size(); ++J) {
        Opcode OA = F.Statements[Accs[I]].Op;
        Opcode OB = F.Statements[Accs[J]].Op;
        if (OA == Opcode::Store || OB == Opcode::Store)
          AddEdge(Accs[I], Accs[J], DepKind::Memory);
      }
  }

  // Transitive closure. Statement order is already topological: every edge
  // runs from a lower position to a higher one.
  size_t Words = ((size_t)N + 63) / 64;
  G.Closure.assign(N, std::vector<uint64_t>(Words, 0));
  for (int V = 0; V < N; ++V)
    for (int P : G.Preds[V]) {
      G.Closure[V][(size_t)P / 64] |= uint64_t(1) << ((size_t)P % 64);
      for (size_t W = 0; W < Words; ++W)
        G.Closure[V][W] |= G.Closure[P][W];
    }
  return G;
}

//===----------------------------------------------------------------------===//
// Parser
//===----------------------------------------------------------------------===//

namespace detail {

struct Tokenizer {
  std::string Text;
  size_t I = 0;
  int Line = 1;

  explicit Tokenizer(std::string T) : Text(std::move(T)) {}

  void skipSpace() {
    while (I < Text.size()) {
      char C = Text[I];
      if (C == '\n') {
        ++Line;
        ++I;
      } else if (std::isspace((unsigned char)C)) {
        ++I;
      } else if (C == '#') {
        while (I < Text.size() && Text[I] != '\n')
          ++I;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skipSpace();
    return I >= Text.size();
  }

  char peek() {
    skipSpace();
    return I < Text.size() ? Text[I] : '\0';
  }

  [[noreturn]] void fail(const std::string &Msg) { throw ParseError(Line, Msg); }

  // Punctuation and words. A word is an identifier, keyword, or literal.
  bool tryPunct(char C) {
    skipSpace();
    if (I < Text.size() && Text[I] == C) {
      ++I;
      return true;
    }
    return false;
  }

  void expectPunct(char C) {
    if (!tryPunct(C))
      fail(std::string("expected '") + C + "'");
  }

  static bool isWordChar(char C) {
    return std::isalnum((unsigned char)C) || C == '_' || C == '.' || C == '+' ||
           C == '-';
  }

  std::string word(const char *What) {
    skipSpace();
    size_t Start = I;
    while (I < Text.size() && isWordChar(Text[I]))
      ++I;
    if (I == Start)
      fail(std::string("expected ") + What);
    return Text.substr(Start, I - Start);
  }

  std::string ident(const char *What) {
    std::string W = word(What);
    if (!std::isalpha((unsigned char)W[0]) && W[0] != '_')
      fail(std::string("expected ") + What);
    return W;
  }
};

inline int64_t parseIndex(Tokenizer &T) {
  std::string W = T.word("index");
  try {
    size_t Used = 0;
    int64_t V = std::stoll(W, &Used);
    if (Used != W.size())
      T.fail("malformed index '" + W + "'");
    return V;
  } catch (const std::exception &) {
    T.fail("malformed index '" + W + "'");
  }
}

inline Operand makeLiteral(const std::string &W, Type Ty, int Line) {
  Operand O;
  O.IsLiteral = true;
  O.LitText = W;
  try {
    size_t Used = 0;
    if (isIntType(Ty)) {
      O.LitInt = std::stoll(W, &Used);
      if (Used != W.size())
        throw ParseError(Line, "malformed integer literal '" + W + "'");
      O.LitFP = (double)O.LitInt;
    } else {
      O.LitFP = std::stod(W, &Used);
      if (Used != W.size())
        throw ParseError(Line, "malformed float literal '" + W + "'");
      O.LitInt = (int64_t)O.LitFP;
    }
  } catch (const ParseError &) {
    throw;
  } catch (const std::exception &) {
    throw ParseError(Line, "malformed literal '" + W + "'");
  }
  return O;
}

} // namespace detail

/// Parses the textual IR grammar:
///
///   func <name> {
///     array <A> : <type> x <len>
///     export %v
///     block <b>:
///       %id = load <A>[<k>] : <ty>
///       store <A>[<k>], %v : <ty>
///       %id = <op> %a, %b : <ty>
///       %id = const <lit> : <ty>
///       br <b2>
///   }
///
/// Blocks form a linear chain: an explicit `br` must target the next declared
/// block, and the last block has none. Rejects use-before-def, unknown
/// arrays, out-of-bounds indices, and type mismatches.
inline Function parseFunction(const std::string &Text) {
  using detail::Tokenizer;
  Tokenizer T(Text);
  Function F;

  if (T.ident("'func'") != "func")
    T.fail("expected 'func'");
  F.Name = T.ident("function name");
  T.expectPunct('{');

  auto DefineValue = [&](const std::string &Id, int Line) {
    if (F.ValueDef.count(Id))
      throw ParseError(Line, "duplicate definition of '%" + Id + "'");
    F.ValueDef[Id] = (int)F.Statements.size();
  };

  auto ParseTypeSuffix = [&]() -> Type {
    T.expectPunct(':');
    std::string W = T.word("type");
    auto Ty = parseTypeName(W);
    if (!Ty)
      T.fail("unknown type '" + W + "'");
    return *Ty;
  };

  bool SawBlock = false;
  // Set once a `br` is parsed; the next declared block must match, keeping
  // the chain linear.
  std::optional<std::string> PendingBr;
  auto CheckNoBr = [&](int Line) {
    if (PendingBr)
      throw ParseError(Line, "statement after 'br'");
  };

  while (!T.eof() && T.peek() != '}') {
    int Line = T.Line;
    if (T.peek() == '%') {
      if (!SawBlock)
        T.fail("statement outside of a block");
      CheckNoBr(Line);
      T.expectPunct('%');
      std::string Id = T.word("value id");
      T.expectPunct('=');
      std::string Kw = T.ident("opcode");
      Statement S;
      S.Id = Id;
      S.Block = (int)F.Blocks.size() - 1;
      S.Pos = (int)F.Statements.size();
      if (Kw == "load") {
        S.Op = Opcode::Load;
        std::string Arr = T.ident("array name");
        if (!F.ArrayIndex.count(Arr))
          T.fail("unknown array '" + Arr + "'");
        T.expectPunct('[');
        int64_t Idx = detail::parseIndex(T);
        T.expectPunct(']');
        S.Ty = ParseTypeSuffix();
        const ArrayDecl &Decl = F.Arrays[F.ArrayIndex.at(Arr)];
        if (Idx < 0 || Idx >= Decl.Length)
          throw ParseError(Line, "index " + std::to_string(Idx) +
                                     " out of bounds for array '" + Arr + "'");
        if (Decl.Elem != S.Ty)
          throw ParseError(Line, "array '" + Arr + "' has element type " +
                                     std::string(typeName(Decl.Elem)));
        S.Mem = MemRef{Arr, Idx};
      } else if (Kw == "const") {
        S.Op = Opcode::Const;
        // Literal type is only known after the ':' suffix.
        std::string Lit = T.word("literal");
        S.Ty = ParseTypeSuffix();
        S.Operands.push_back(detail::makeLiteral(Lit, S.Ty, Line));
      } else if (auto Op = parseArithOpcode(Kw)) {
        S.Op = *Op;
        // Peek type by scanning ahead is not worth it; operands carry the
        // statement type, so parse them after the suffix would be cleaner,
        // but the grammar puts them first. Parse them as raw tokens, then
        // validate once the type is known.
        struct Raw {
          bool IsValue;
          std::string Text;
        };
        std::vector<Raw> RawOps;
        for (int K = 0; K < 2; ++K) {
          if (K == 1)
            T.expectPunct(',');
          if (T.tryPunct('%'))
            RawOps.push_back({true, T.word("value id")});
          else
            RawOps.push_back({false, T.word("operand")});
        }
        S.Ty = ParseTypeSuffix();
        if (isFloatType(S.Ty) &&
            (S.Op == Opcode::Add || S.Op == Opcode::Sub ||
             S.Op == Opcode::Mul || S.Op == Opcode::Div))
          throw ParseError(Line, "integer opcode on float type");
        if (isIntType(S.Ty) &&
            (S.Op == Opcode::FAdd || S.Op == Opcode::FSub ||
             S.Op == Opcode::FMul || S.Op == Opcode::FDiv))
          throw ParseError(Line, "float opcode on integer type");
        for (const Raw &R : RawOps) {
          if (R.IsValue) {
            auto It = F.ValueDef.find(R.Text);
            if (It == F.ValueDef.end())
              throw ParseError(Line, "use of undefined value '%" + R.Text + "'");
            if (F.Statements[It->second].Ty != S.Ty)
              throw ParseError(Line, "operand '%" + R.Text + "' type mismatch");
            S.Operands.push_back(Operand::value(R.Text));
          } else {
            S.Operands.push_back(detail::makeLiteral(R.Text, S.Ty, Line));
          }
        }
      } else {
        T.fail("unknown opcode '" + Kw + "'");
      }
      DefineValue(Id, Line);
      F.Statements.push_back(S);
      F.Blocks.back().Stmts.push_back((int)F.Statements.size() - 1);
      continue;
    }

    std::string Kw = T.ident("declaration");
    if (Kw == "array") {
      if (SawBlock)
        T.fail("array declarations must precede blocks");
      ArrayDecl D;
      D.Name = T.ident("array name");
      if (F.ArrayIndex.count(D.Name))
        T.fail("duplicate array '" + D.Name + "'");
      T.expectPunct(':');
      std::string TyW = T.word("type");
      auto Ty = parseTypeName(TyW);
      if (!Ty)
        T.fail("unknown type '" + TyW + "'");
      D.Elem = *Ty;
      std::string X = T.ident("'x'");
      if (X != "x")
        T.fail("expected 'x'");
      D.Length = detail::parseIndex(T);
      if (D.Length <= 0)
        T.fail("array length must be positive");
      F.ArrayIndex[D.Name] = (int)F.Arrays.size();
      F.Arrays.push_back(D);
    } else if (Kw == "export") {
      // Exports may name values defined later; validated after parsing.
      T.expectPunct('%');
      std::string Id = T.word("value id");
      if (!F.isExported(Id))
        F.Exports.push_back(Id);
    } else if (Kw == "block") {
      BasicBlock B;
      B.Name = T.ident("block name");
      for (const BasicBlock &Prev : F.Blocks)
        if (Prev.Name == B.Name)
          T.fail("duplicate block '" + B.Name + "'");
      if (PendingBr && *PendingBr != B.Name)
        throw ParseError(Line, "'br' must target the next block; got '" +
                                   *PendingBr + "' before block '" + B.Name +
                                   "'");
      PendingBr.reset();
      T.expectPunct(':');
      F.Blocks.push_back(B);
      SawBlock = true;
    } else if (Kw == "br") {
      if (!SawBlock)
        T.fail("'br' outside of a block");
      CheckNoBr(Line);
      PendingBr = T.ident("block name");
    } else if (Kw == "store") {
      if (!SawBlock)
        T.fail("statement outside of a block");
      CheckNoBr(Line);
      Statement S;
      S.Op = Opcode::Store;
      S.Block = (int)F.Blocks.size() - 1;
      S.Pos = (int)F.Statements.size();
      std::string Arr = T.ident("array name");
      if (!F.ArrayIndex.count(Arr))
        T.fail("unknown array '" + Arr + "'");
      T.expectPunct('[');
      int64_t Idx = detail::parseIndex(T);
      T.expectPunct(']');
      T.expectPunct(',');
      struct Raw {
        bool IsValue;
        std::string Text;
      } R{false, ""};
      if (T.tryPunct('%'))
        R = {true, T.word("value id")};
      else
        R = {false, T.word("operand")};
      S.Ty = ParseTypeSuffix();
      const ArrayDecl &Decl = F.Arrays[F.ArrayIndex.at(Arr)];
      if (Idx < 0 || Idx >= Decl.Length)
        throw ParseError(Line, "index " + std::to_string(Idx) +
                                   " out of bounds for array '" + Arr + "'");
      if (Decl.Elem != S.Ty)
        throw ParseError(Line, "array '" + Arr + "' element type mismatch");
      S.Mem = MemRef{Arr, Idx};
      if (R.IsValue) {
        auto It = F.ValueDef.find(R.Text);
        if (It == F.ValueDef.end())
          throw ParseError(Line, "use of undefined value '%" + R.Text + "'");
        if (F.Statements[It->second].Ty != S.Ty)
          throw ParseError(Line, "operand '%" + R.Text + "' type mismatch");
        S.Operands.push_back(Operand::value(R.Text));
      } else {
        S.Operands.push_back(detail::makeLiteral(R.Text, S.Ty, Line));
      }
      S.Id = "st" + std::to_string(S.Pos);
      F.Statements.push_back(S);
      F.Blocks.back().Stmts.push_back((int)F.Statements.size() - 1);
    } else {
      T.fail("unexpected token '" + Kw + "'");
    }
  }
  T.expectPunct('}');
  if (PendingBr)
    throw ParseError(T.Line, "'br' to '" + *PendingBr +
                                 "' has no following block");
  if (!T.eof())
    T.fail("trailing input after function");

  // Store ids are synthetic. Reject collisions with declared value ids so
  // that every statement id is unique within the function.
  for (const Statement &S : F.Statements)
    if (S.Op == Opcode::Store && F.ValueDef.count(S.Id))
      throw ParseError(1, "value id '%" + S.Id +
                              "' collides with a synthetic store id");
  for (const std::string &E : F.Exports)
    if (!F.ValueDef.count(E))
      throw ParseError(1, "export of undefined value '%" + E + "'");
  return F;
}

//===----------------------------------------------------------------------===//
// Printer
//===----------------------------------------------------------------------===//

inline std::string printOperand(const Operand &O) {
  return O.IsLiteral ? O.LitText : "%" + O.Id;
}

inline std::string printStatement(const Statement &S) {
  std::ostringstream OS;
  switch (S.Op) {
  case Opcode::Load:
    OS << "%" << S.Id << " = load " << S.Mem->Array << "[" << S.Mem->Index
       << "] : " << typeName(S.Ty);
    break;
  case Opcode::Store:
    OS << "store " << S.Mem->Array << "[" << S.Mem->Index << "], "
       << printOperand(S.Operands[0]) << " : " << typeName(S.Ty);
    break;
  case Opcode::Const:
    OS << "%" << S.Id << " = const " << S.Operands[0].LitText << " : "
       << typeName(S.Ty);
    break;
  default:
    OS << "%" << S.Id << " = " << opcodeName(S.Op) << " "
       << printOperand(S.Operands[0]) << ", " << printOperand(S.Operands[1])
       << " : " << typeName(S.Ty);
    break;
  }
  return OS.str();
}

/// Canonical textual form. parse(print(F)) == F and printing is idempotent.
inline std::string printFunction(const Function &F) {
  std::ostringstream OS;
  OS << "func " << F.Name << " {\n";
  for (const ArrayDecl &A : F.Arrays)
    OS << "  array " << A.Name << " : " << typeName(A.Elem) << " x "
       << A.Length << "\n";
  for (const std::string &E : F.Exports)
    OS << "  export %" << E << "\n";
  for (size_t BI = 0; BI < F.Blocks.size(); ++BI) {
    const BasicBlock &B = F.Blocks[BI];
    OS << "  block " << B.Name << ":\n";
    for (int SI : B.Stmts)
      OS << "    " << printStatement(F.Statements[SI]) << "\n";
    if (BI + 1 < F.Blocks.size())
      OS << "    br " << F.Blocks[BI + 1].Name << "\n";
  }
  OS << "}\n";
  return OS.str();
}

} // namespace goslp
