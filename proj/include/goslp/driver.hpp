//===- goslp/driver.hpp - End-to-end vectorization pipeline -----*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// candidates -> packing (ILP or a baseline strategy) -> permutation
// selection -> emission, plus optional interpreter-based equivalence
// checking on random inputs. This is the programmatic face of the CLI.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/baselines.hpp"
#include "goslp/emit.hpp"
#include "goslp/verify.hpp"

#include <random>

namespace goslp {

enum class Strategy { GoSlp, Larsen, Liu, None };

inline const char *strategyName(Strategy S) {
  switch (S) {
  case Strategy::GoSlp:
    return "goslp";
  case Strategy::Larsen:
    return "larsen";
  case Strategy::Liu:
    return "liu";
  case Strategy::None:
    return "none";
  }
  return "?";
}

inline std::optional<Strategy> parseStrategy(const std::string &S) {
  if (S == "goslp")
    return Strategy::GoSlp;
  if (S == "larsen")
    return Strategy::Larsen;
  if (S == "liu")
    return Strategy::Liu;
  if (S == "none")
    return Strategy::None;
  return std::nullopt;
}

struct PipelineOptions {
  Strategy Strat = Strategy::GoSlp;
  std::shared_ptr<CostModel> CM = std::make_shared<UnitCostModel>();
  int MaxLanes = 2;
  std::optional<std::chrono::milliseconds> Timeout;
  int NodeLimit = 5;
  int PermLimit = 4;
};

struct PipelineResult {
  PackSet PS;
  VecGraph VG;
  VectorFunction VF;
  CategoryCounts Counts;
  Cost PermTotal = 0;
  bool PermFallback = false;
  /// evaluate_objective of the final packing under the scalar universe;
  /// absent when the pack set contains widened packs.
  std::optional<Cost> Objective;
};

/// Objective of an arbitrary width-2 pack set under the scalar universe's
/// candidate encoding, when every pack is a candidate pair.
inline std::optional<Cost> objectiveOfPackSet(const Function &F,
                                              const DepGraph &G,
                                              const CostModel &CM,
                                              const PackSet &PS) {
  Universe U = makeScalarUniverse(F, G);
  PackUniverse PU = buildPackUniverse(U);
  std::vector<int> Sel;
  for (const Pack &P : PS.Packs) {
    if (P.width() != 2)
      return std::nullopt;
    int DI = PU.dIndexOf(P.Stmts[0], P.Stmts[1]);
    if (DI < 0)
      return std::nullopt;
    Sel.push_back(DI);
  }
  return evaluateObjective(U, PU, CM, Sel);
}

inline PipelineResult runPipeline(const Function &F,
                                  const PipelineOptions &Opts) {
  DepGraph G = DepGraph::build(F);
  PipelineResult R;
  switch (Opts.Strat) {
  case Strategy::GoSlp:
    R.PS = packStatements(F, G, *Opts.CM, Opts.MaxLanes, Opts.Timeout);
    break;
  case Strategy::Larsen:
    R.PS = larsenPack(F, G, Opts.MaxLanes);
    break;
  case Strategy::Liu:
    R.PS = liuPack(F, G, *Opts.CM);
    break;
  case Strategy::None:
    break;
  }

  R.VG = buildVecGraph(F, R.PS);
  try {
    R.PermTotal = selectPermutations(R.VG, *Opts.CM, Opts.NodeLimit,
                                     Opts.PermLimit);
  } catch (const PermuteError &) {
    // Past the practical multi-node limits the permutation choice falls back
    // to the first candidate per node: still correct, only not cost-minimal.
    R.PermFallback = true;
    propagateMasks(R.VG);
    R.PermTotal = 0;
    for (auto &Node : R.VG.Nodes)
      Node.Selected = Node.FP.front();
    for (int EI = 0; EI < (int)R.VG.Edges.size(); ++EI)
      R.PermTotal += R.VG.edgeCost(
          *Opts.CM, EI, R.VG.Nodes[R.VG.Edges[EI].Consumer].Selected,
          R.VG.Nodes[R.VG.Edges[EI].Producer].Selected);
  }

  R.VF = emitVectorFunction(F, G, R.PS, R.VG);
  R.Counts = countInstructions(R.VF);
  R.Objective = objectiveOfPackSet(F, G, *Opts.CM, R.PS);
  return R;
}

//===----------------------------------------------------------------------===//
// Randomized equivalence checking
//===----------------------------------------------------------------------===//

/// Deterministic random machine state: every array fully initialized.
inline MachineState randomState(const Function &F, uint64_t Seed) {
  std::mt19937_64 Rng(Seed);
  MachineState S = MachineState::forFunction(F);
  std::uniform_real_distribution<double> FD(-8.0, 8.0);
  std::uniform_int_distribution<int64_t> ID(-64, 64);
  for (const ArrayDecl &A : F.Arrays) {
    std::vector<Value> Vals;
    for (int64_t I = 0; I < A.Length; ++I) {
      Value V;
      V.Ty = A.Elem;
      switch (A.Elem) {
      case Type::I32:
        V.I32 = (int32_t)ID(Rng);
        break;
      case Type::I64:
        V.I64 = ID(Rng);
        break;
      case Type::F32:
        V.F32 = (float)FD(Rng);
        break;
      case Type::F64:
        V.F64 = FD(Rng);
        break;
      }
      Vals.push_back(V);
    }
    S.setArray(A.Name, Vals);
  }
  return S;
}

/// Runs both interpreters on one input and compares states bit-exactly.
/// A trap counts as equivalent only when both sides trap.
inline std::string checkEquivalence(const Function &F,
                                    const VectorFunction &VF,
                                    const MachineState &Init) {
  bool ScalarTrapped = false;
  MachineState A, B;
  try {
    A = runScalar(F, Init);
  } catch (const TrapError &) {
    ScalarTrapped = true;
  }
  bool VectorTrapped = false;
  try {
    B = runVector(VF, Init);
  } catch (const TrapError &) {
    VectorTrapped = true;
  }
  if (ScalarTrapped != VectorTrapped)
    return ScalarTrapped ? "scalar trapped but vector did not"
                         : "vector trapped but scalar did not";
  if (ScalarTrapped)
    return "";
  return compareStates(F, A, B);
}

/// Fuzzes Runs random inputs; returns the first mismatch description or
/// empty when all pass.
inline std::string fuzzEquivalence(const Function &F,
                                   const VectorFunction &VF, int Runs,
                                   uint64_t Seed = 0x5eed) {
  for (int I = 0; I < Runs; ++I) {
    MachineState Init = randomState(F, Seed + (uint64_t)I * 0x9e3779b97f4a7c15ULL);
    std::string Err = checkEquivalence(F, VF, Init);
    if (!Err.empty())
      return "input " + std::to_string(I) + ": " + Err;
  }
  return "";
}

//===----------------------------------------------------------------------===//
// Stats report
//===----------------------------------------------------------------------===//

/// Flat key:value document with the five category fields, the iteration log,
/// and the permutation summary.
inline std::string statsReport(const PipelineResult &R, Strategy Strat) {
  std::ostringstream OS;
  OS << "strategy: " << strategyName(Strat) << "\n";
  OS << "scalar: " << R.Counts.Scalar << "\n";
  OS << "vector: " << R.Counts.Vector << "\n";
  OS << "packing: " << R.Counts.Packing << "\n";
  OS << "unpacking: " << R.Counts.Unpacking << "\n";
  OS << "permute: " << R.Counts.Permute << "\n";
  OS << "total: " << R.Counts.total() << "\n";
  OS << "packs: " << R.PS.Packs.size() << "\n";
  if (R.Objective)
    OS << "objective: " << *R.Objective << "\n";
  OS << "perm_cost: " << R.PermTotal << "\n";
  OS << "perm_fallback: " << (R.PermFallback ? 1 : 0) << "\n";
  OS << "iterations: " << R.PS.Log.size() << "\n";
  for (size_t I = 0; I < R.PS.Log.size(); ++I) {
    const auto &Rec = R.PS.Log[I];
    std::string Prefix = "iter" + std::to_string(I + 1) + ".";
    OS << Prefix << "width: " << Rec.Width << "\n";
    OS << Prefix << "candidates: " << Rec.Candidates << "\n";
    OS << Prefix << "status: "
       << (Rec.St == Assignment::Status::Optimal ? "optimal" : "feasible")
       << "\n";
    OS << Prefix << "objective: " << Rec.Objective << "\n";
    OS << Prefix << "selected: " << Rec.SelectedCount << "\n";
  }
  return OS.str();
}

} // namespace goslp
