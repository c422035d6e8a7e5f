//===- tools/goslp.cpp - SLP vectorizer command line ------------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "goslp/driver.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace goslp;

namespace {

std::string readFile(const std::string &Path) {
  std::ifstream In(Path);
  if (!In)
    throw std::runtime_error("cannot open '" + Path + "'");
  std::ostringstream SS;
  SS << In.rdbuf();
  return SS.str();
}

void writeFile(const std::string &Path, const std::string &Text) {
  std::ofstream Out(Path);
  if (!Out)
    throw std::runtime_error("cannot write '" + Path + "'");
  Out << Text;
}

std::shared_ptr<CostModel> makeCostModel(const std::string &Spec) {
  if (Spec == "unit")
    return std::make_shared<UnitCostModel>();
  if (Spec.rfind("table:", 0) == 0)
    return loadCostTable(Spec.substr(6));
  throw std::runtime_error("unknown cost model '" + Spec +
                           "' (expected unit or table:<path>)");
}

struct CommonArgs {
  std::string CostSpec = "unit";
  int MaxLanes = 2;
  long long TimeoutMs = 0; // 0 means no limit
  PipelineOptions options(Strategy S) const {
    PipelineOptions O;
    O.Strat = S;
    O.CM = makeCostModel(CostSpec);
    O.MaxLanes = MaxLanes;
    if (TimeoutMs > 0)
      O.Timeout = std::chrono::milliseconds(TimeoutMs);
    return O;
  }
};

void addCommonArgs(CLI::App *Cmd, CommonArgs &Args) {
  Cmd->add_option("--cost", Args.CostSpec,
                  "cost model: unit or table:<path>");
  Cmd->add_option("--max-lanes", Args.MaxLanes,
                  "maximum vector width in lanes (2, 4, 8, 16)")
      ->check(CLI::IsMember({2, 4, 8, 16}));
  Cmd->add_option("--timeout-ms", Args.TimeoutMs,
                  "ILP time budget in milliseconds (0 = unlimited)");
}

int cmdVectorize(const std::string &Input, const std::string &StrategyStr,
                 const CommonArgs &Common, const std::string &VerifySpec,
                 bool DumpCandidates, bool DumpIlp, bool DumpGraph,
                 const std::string &OutPath, const std::string &StatsPath) {
  auto Strat = parseStrategy(StrategyStr);
  if (!Strat) {
    std::cerr << "error: unknown strategy '" << StrategyStr << "'\n";
    return 1;
  }
  Function F = parseFunction(readFile(Input));
  DepGraph G = DepGraph::build(F);

  if (DumpCandidates) {
    Universe U = makeScalarUniverse(F, G);
    PackUniverse PU = buildPackUniverse(U);
    std::cout << dumpCandidates(U, PU);
  }
  if (DumpIlp) {
    Universe U = makeScalarUniverse(F, G);
    PackUniverse PU = buildPackUniverse(U);
    PipelineOptions O = Common.options(*Strat);
    std::cout << dumpIlp(linearize(buildPackingProblem(U, PU, *O.CM)));
  }

  PipelineResult R = runPipeline(F, Common.options(*Strat));

  if (DumpGraph)
    std::cout << dumpVecGraph(F, R.PS, R.VG);

  std::string VecText = printVectorFunction(R.VF);
  if (OutPath.empty())
    std::cout << VecText;
  else
    writeFile(OutPath, VecText);

  std::string Stats = statsReport(R, *Strat);
  bool VerifyFailed = false;
  if (!VerifySpec.empty()) {
    int Runs = 20;
    if (VerifySpec != "on")
      Runs = std::stoi(VerifySpec);
    std::string Err = fuzzEquivalence(F, R.VF, Runs);
    Stats += "verify_runs: " + std::to_string(Runs) + "\n";
    Stats += "verify: " + (Err.empty() ? std::string("pass")
                                       : "fail (" + Err + ")") +
             "\n";
    VerifyFailed = !Err.empty();
  }
  if (StatsPath.empty())
    std::cout << Stats;
  else
    writeFile(StatsPath, Stats);

  if (VerifyFailed) {
    std::cerr << "error: equivalence verification failed\n";
    return 1;
  }
  return 0;
}

int cmdCompare(const std::vector<std::string> &Inputs,
               const CommonArgs &Common) {
  const Strategy All[] = {Strategy::None, Strategy::Larsen, Strategy::Liu,
                          Strategy::GoSlp};
  CategoryCounts Sums[4];
  std::cout << "file\tstrategy\tscalar\tvector\tpacking\tunpacking\tpermute"
               "\ttotal\tobjective\n";
  for (const std::string &Input : Inputs) {
    Function F = parseFunction(readFile(Input));
    for (int SI = 0; SI < 4; ++SI) {
      PipelineResult R = runPipeline(F, Common.options(All[SI]));
      const CategoryCounts &C = R.Counts;
      Sums[SI].Scalar += C.Scalar;
      Sums[SI].Vector += C.Vector;
      Sums[SI].Packing += C.Packing;
      Sums[SI].Unpacking += C.Unpacking;
      Sums[SI].Permute += C.Permute;
      std::cout << Input << "\t" << strategyName(All[SI]) << "\t" << C.Scalar
                << "\t" << C.Vector << "\t" << C.Packing << "\t"
                << C.Unpacking << "\t" << C.Permute << "\t" << C.total()
                << "\t";
      if (R.Objective)
        std::cout << *R.Objective;
      else
        std::cout << "-";
      std::cout << "\n";
    }
  }
  if (Inputs.size() > 1)
    for (int SI = 0; SI < 4; ++SI)
      std::cout << "TOTAL\t" << strategyName(All[SI]) << "\t"
                << Sums[SI].Scalar << "\t" << Sums[SI].Vector << "\t"
                << Sums[SI].Packing << "\t" << Sums[SI].Unpacking << "\t"
                << Sums[SI].Permute << "\t" << Sums[SI].total() << "\t-\n";
  return 0;
}

} // namespace

int main(int Argc, char **Argv) {
  CLI::App App{"goslp: ILP-based SLP auto-vectorizer for a loop-free IR"};
  App.require_subcommand(1);

  // vectorize
  auto *Vec = App.add_subcommand("vectorize",
                                 "vectorize one function end to end");
  std::string Input, StrategyStr = "goslp", OutPath, StatsPath, VerifySpec;
  bool DumpCandidatesFlag = false, DumpIlpFlag = false, DumpGraphFlag = false;
  CommonArgs VecCommon;
  Vec->add_option("input", Input, "input .ir file")->required();
  Vec->add_option("--strategy", StrategyStr, "goslp, larsen, liu, or none");
  addCommonArgs(Vec, VecCommon);
  Vec->add_option("--verify", VerifySpec,
                  "verify equivalence on N random inputs (default 20)")
      ->expected(0, 1)
      ->default_str("")
      ->type_name("[N]");
  Vec->add_flag("--dump-candidates", DumpCandidatesFlag,
                "print feasible sets, D, and use maps");
  Vec->add_flag("--dump-ilp", DumpIlpFlag, "print the linearized ILP");
  Vec->add_flag("--dump-graph", DumpGraphFlag,
                "print the vectorization graph with masks");
  Vec->add_option("--out", OutPath, "write vectorized IR here");
  Vec->add_option("--stats", StatsPath, "write the stats report here");

  // compare
  auto *Cmp = App.add_subcommand("compare",
                                 "run every strategy and tabulate counts");
  std::vector<std::string> CmpInputs;
  CommonArgs CmpCommon;
  Cmp->add_option("inputs", CmpInputs, "input .ir files")->required();
  addCommonArgs(Cmp, CmpCommon);

  CLI11_PARSE(App, Argc, Argv);

  try {
    if (Vec->parsed()) {
      // --verify with no value means "on".
      if (Vec->count("--verify") && VerifySpec.empty())
        VerifySpec = "on";
      return cmdVectorize(Input, StrategyStr, VecCommon, VerifySpec,
                          DumpCandidatesFlag, DumpIlpFlag, DumpGraphFlag,
                          OutPath, StatsPath);
    }
    if (Cmp->parsed())
      return cmdCompare(CmpInputs, CmpCommon);
  } catch (const std::exception &E) {
    std::cerr << "error: " << E.what() << "\n";
    return 1;
  }
  return 0;
}
