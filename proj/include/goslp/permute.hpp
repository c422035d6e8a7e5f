//===- goslp/permute.hpp - Vector permutation selection ---------*- C++ -*-===//
//
// Part of the goslp project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Decides the lane order of every formed pack. The vectorization graph
// connects packs along use-def chains; memory packs are constrained to
// address order, free packs pick among candidate permutation masks collected
// by a forward and a backward traversal, and a dynamic program selects the
// assignment minimizing the number of permutation instructions inserted
// between packs. DAGs are reduced to trees by coalescing nodes with common
// successors into multi-nodes.
//
// Mask convention (after the dependency-graph drawing the paper uses): each
// node carries a "graph frame" Gamma, anchored at the roots and pushed
// through edge operand wirings. A node's mask is the permutation applied to
// its materialized lanes to reach its graph frame. Equal masks across an edge
// (after the edge's frame adjustment) mean values flow unchanged; unequal
// masks cost one permutation instruction.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "goslp/packing.hpp"

#include <functional>

namespace goslp {

//===----------------------------------------------------------------------===//
// Permutation mask helpers
//===----------------------------------------------------------------------===//

inline PermMask identityMask(int W) {
  PermMask M(W);
  for (int I = 0; I < W; ++I)
    M[I] = I;
  return M;
}

inline bool isPermutation(const PermMask &M) {
  std::vector<bool> Seen(M.size(), false);
  for (int X : M) {
    if (X < 0 || X >= (int)M.size() || Seen[X])
      return false;
    Seen[X] = true;
  }
  return true;
}

/// compose(F, G)[i] = F[G[i]].
inline PermMask compose(const PermMask &F, const PermMask &G) {
  PermMask R(G.size());
  for (size_t I = 0; I < G.size(); ++I)
    R[I] = F[G[I]];
  return R;
}

inline PermMask invert(const PermMask &M) {
  PermMask R(M.size());
  for (size_t I = 0; I < M.size(); ++I)
    R[M[I]] = (int)I;
  return R;
}

inline std::string maskText(const PermMask &M) {
  std::string S = "{";
  for (size_t I = 0; I < M.size(); ++I)
    S += (I ? "," : "") + std::to_string(M[I]);
  return S + "}";
}

//===----------------------------------------------------------------------===//
// Vectorization graph
//===----------------------------------------------------------------------===//

class PermuteError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct VecGraph {
  /// Edge from a pack to one of its vector operand producers. In Algorithm 1
  /// terms, the producer is the consumer's successor.
  struct Edge {
    int Consumer = -1;
    int Producer = -1;
    int OperandPos = 0;
    /// Wiring: canonical lane i of the consumer takes its operand from
    /// canonical lane Wiring[i] of the producer.
    PermMask Wiring;
    /// Frame adjustment between the two nodes' graph frames; the producer
    /// mask continuing the consumer's mask unchanged is compose(mu_C, Alpha).
    PermMask Alpha;
  };

  struct Node {
    int PackIndex = -1;
    int Width = 2;
    bool Constrained = false;
    PermMask Gamma;             // graph frame of this node
    std::vector<PermMask> Pf;   // forward-propagated candidates
    std::vector<PermMask> Pb;   // backward-propagated candidates
    std::vector<PermMask> FP;   // final candidate set
    std::vector<int> OutEdges;  // toward producers (successors)
    std::vector<int> InEdges;   // toward consumers (predecessors)
    PermMask Selected;
  };

  std::vector<Node> Nodes;
  std::vector<Edge> Edges;
  std::vector<int> Roots; // nodes with no vectorized uses

  const PermMask &fixedMask(int N) const { return Nodes[N].Gamma; }

  /// Permutation cost across an edge given the two endpoint masks.
  Cost edgeCost(const CostModel &CM, int EI, const PermMask &MuConsumer,
                const PermMask &MuProducer) const {
    return CM.permCost(compose(MuConsumer, Edges[EI].Alpha), MuProducer);
  }
};

/// Nodes in topological order, consumers before producers.
inline std::vector<int> forwardOrder(const VecGraph &G) {
  std::vector<int> InDeg(G.Nodes.size(), 0);
  for (const auto &E : G.Edges)
    ++InDeg[E.Producer];
  std::vector<int> Work = G.Roots;
  std::sort(Work.begin(), Work.end());
  std::vector<int> Order;
  size_t Next = 0;
  while (Next < Work.size()) {
    int N = Work[Next++];
    Order.push_back(N);
    std::vector<int> Released;
    for (int EI : G.Nodes[N].OutEdges)
      if (--InDeg[G.Edges[EI].Producer] == 0)
        Released.push_back(G.Edges[EI].Producer);
    std::sort(Released.begin(), Released.end());
    for (int R : Released)
      Work.push_back(R);
  }
  return Order;
}

/// Builds the vectorization graph for a final pack set: nodes are packs,
/// edges follow use-def chains where a pack's operand tuple is produced lane
/// for lane by another pack. Packs with no vectorized uses are the roots.
inline VecGraph buildVecGraph(const Function &F, const PackSet &PS) {
  VecGraph G;
  G.Nodes.resize(PS.Packs.size());

  std::map<std::vector<int>, int> PackOfStmts;
  std::map<int, std::pair<int, int>> LaneOf; // stmt -> (node, canonical lane)
  for (int NI = 0; NI < (int)PS.Packs.size(); ++NI) {
    G.Nodes[NI].PackIndex = NI;
    G.Nodes[NI].Width = PS.Packs[NI].width();
    G.Nodes[NI].Constrained = PS.Packs[NI].isMemory();
    std::vector<int> Key = PS.Packs[NI].Stmts;
    std::sort(Key.begin(), Key.end());
    PackOfStmts[Key] = NI;
    for (int L = 0; L < PS.Packs[NI].width(); ++L)
      LaneOf[PS.Packs[NI].Stmts[L]] = {NI, L};
  }

  for (int NI = 0; NI < (int)PS.Packs.size(); ++NI) {
    const Pack &P = PS.Packs[NI];
    size_t OperandCount = F.Statements[P.Stmts[0]].Operands.size();
    for (size_t K = 0; K < OperandCount; ++K) {
      std::vector<int> Producers;
      bool Vector = true;
      for (int SI : P.Stmts) {
        const Operand &O = F.Statements[SI].Operands[K];
        if (O.IsLiteral) {
          Vector = false;
          break;
        }
        Producers.push_back(F.ValueDef.at(O.Id));
      }
      if (!Vector)
        continue;
      std::vector<int> Key = Producers;
      std::sort(Key.begin(), Key.end());
      if (std::unique(Key.begin(), Key.end()) != Key.end())
        continue; // duplicate lanes never form a whole pack
      auto It = PackOfStmts.find(Key);
      if (It == PackOfStmts.end())
        continue;
      VecGraph::Edge E;
      E.Consumer = NI;
      E.Producer = It->second;
      E.OperandPos = (int)K;
      E.Wiring.resize(P.width());
      for (int L = 0; L < P.width(); ++L)
        E.Wiring[L] = LaneOf.at(Producers[L]).second;
      int EI = (int)G.Edges.size();
      G.Nodes[NI].OutEdges.push_back(EI);
      G.Nodes[It->second].InEdges.push_back(EI);
      G.Edges.push_back(std::move(E));
    }
  }

  for (int NI = 0; NI < (int)G.Nodes.size(); ++NI)
    if (G.Nodes[NI].InEdges.empty())
      G.Roots.push_back(NI);

  // Anchor graph frames at the roots and push them through edge wirings in
  // breadth-first order; later arrivals at a shared node keep the first frame
  // and record the discrepancy on their edge's Alpha.
  for (int R : G.Roots)
    G.Nodes[R].Gamma = identityMask(G.Nodes[R].Width);
  std::vector<int> Order = forwardOrder(G);
  for (int N : Order) {
    std::vector<int> Out = G.Nodes[N].OutEdges;
    std::sort(Out.begin(), Out.end());
    for (int EI : Out) {
      VecGraph::Edge &E = G.Edges[EI];
      if (G.Nodes[E.Producer].Gamma.empty())
        G.Nodes[E.Producer].Gamma =
            compose(E.Wiring, G.Nodes[E.Consumer].Gamma);
    }
  }
  for (auto &E : G.Edges) {
    const PermMask &GC = G.Nodes[E.Consumer].Gamma;
    const PermMask &GP = G.Nodes[E.Producer].Gamma;
    E.Alpha = compose(invert(GC), compose(invert(E.Wiring), GP));
  }
  return G;
}

//===----------------------------------------------------------------------===//
// Mask propagation
//===----------------------------------------------------------------------===//

namespace detail {

inline void insertMask(std::vector<PermMask> &Set, const PermMask &M) {
  if (std::find(Set.begin(), Set.end(), M) == Set.end())
    Set.push_back(M);
}

} // namespace detail

/// Forward pass (roots to leaves) and backward pass (leaves to roots), each
/// unioning the candidate sets arriving over all edges. Constrained nodes
/// always propagate their single fixed mask; a free node's final candidate
/// set is the union of both directions.
inline void propagateMasks(VecGraph &G) {
  std::vector<int> Order = forwardOrder(G);
  for (int N : Order) {
    VecGraph::Node &Node = G.Nodes[N];
    if (Node.Constrained) {
      Node.Pf = {Node.Gamma};
    } else {
      Node.Pf.clear();
      for (int EI : Node.InEdges) {
        const auto &E = G.Edges[EI];
        const auto &Src =
            G.Nodes[E.Consumer].Constrained
                ? std::vector<PermMask>{G.Nodes[E.Consumer].Gamma}
                : G.Nodes[E.Consumer].Pf;
        for (const PermMask &Mu : Src)
          detail::insertMask(Node.Pf, compose(Mu, E.Alpha));
      }
      std::sort(Node.Pf.begin(), Node.Pf.end());
    }
  }
  for (auto It = Order.rbegin(); It != Order.rend(); ++It) {
    VecGraph::Node &Node = G.Nodes[*It];
    if (Node.Constrained) {
      Node.Pb = {Node.Gamma};
    } else {
      Node.Pb.clear();
      for (int EI : Node.OutEdges) {
        const auto &E = G.Edges[EI];
        const auto &Src =
            G.Nodes[E.Producer].Constrained
                ? std::vector<PermMask>{G.Nodes[E.Producer].Gamma}
                : G.Nodes[E.Producer].Pb;
        PermMask AlphaInv = invert(E.Alpha);
        for (const PermMask &Mu : Src)
          detail::insertMask(Node.Pb, compose(Mu, AlphaInv));
      }
      std::sort(Node.Pb.begin(), Node.Pb.end());
    }
  }
  for (auto &Node : G.Nodes) {
    if (Node.Constrained) {
      Node.FP = {Node.Gamma};
      continue;
    }
    Node.FP = Node.Pf;
    for (const PermMask &M : Node.Pb)
      detail::insertMask(Node.FP, M);
    if (Node.FP.empty())
      Node.FP = {identityMask(Node.Width)};
    std::sort(Node.FP.begin(), Node.FP.end());
  }
}

//===----------------------------------------------------------------------===//
// Multi-node coalescing
//===----------------------------------------------------------------------===//

/// The DAG reduced to a forest of multi-nodes for the DP. Each multi-node
/// groups original nodes that share successors; its candidate set is the
/// cartesian product of the constituents' FP sets.
struct PermForest {
  struct MultiNode {
    std::vector<int> Nodes;          // original node ids, canonical order
    std::vector<int> InternalEdges;  // both endpoints inside this multi-node
    std::vector<int> ChildEdges;     // consumer inside, producer in a child
    int Parent = -1;
    std::vector<int> Children;
    size_t CandidateCount = 1;
  };
  std::vector<MultiNode> Multis;
  std::vector<int> NodeToMulti;
  std::vector<int> Roots;
};

/// Coalesces groups of nodes with common successors until every multi-node
/// has at most one predecessor, absorbing any intermediate nodes that a merge
/// would otherwise trap in a cycle. Errors out when a multi-node would exceed
/// NodeLimit constituents or its candidate set would exceed
/// PermLimit^NodeLimit combinations.
inline PermForest coalesceMultiNodes(const VecGraph &G, int NodeLimit = 5,
                                     int PermLimit = 4) {
  int N = (int)G.Nodes.size();
  std::vector<int> Group(N);
  for (int I = 0; I < N; ++I)
    Group[I] = I;
  auto Find = [&](int X) {
    while (Group[X] != X)
      X = Group[X] = Group[Group[X]];
    return X;
  };
  auto Union = [&](int A, int B) {
    A = Find(A);
    B = Find(B);
    if (A != B)
      Group[std::max(A, B)] = std::min(A, B);
  };

  auto PredsOf = [&](int SuperNode) {
    std::set<int> Preds;
    for (int I = 0; I < N; ++I)
      if (Find(I) == SuperNode)
        for (int EI : G.Nodes[I].InEdges) {
          int C = Find(G.Edges[EI].Consumer);
          if (C != SuperNode)
            Preds.insert(C);
        }
    return Preds;
  };

  for (;;) {
    // Merge the predecessors of any supernode with more than one.
    bool Changed = false;
    for (int S = 0; S < N && !Changed; ++S) {
      if (Find(S) != S)
        continue;
      auto Preds = PredsOf(S);
      if (Preds.size() < 2)
        continue;
      int First = *Preds.begin();
      for (int P : Preds)
        Union(First, P);
      Changed = true;
    }
    if (!Changed)
      break;
    // A merge may trap intermediate nodes on paths between constituents;
    // absorb them so the contracted graph stays acyclic.
    for (;;) {
      // Detect supernode-level cycles by Kahn's algorithm.
      std::map<int, std::set<int>> Adj;
      std::map<int, int> InDeg;
      for (int I = 0; I < N; ++I)
        InDeg[Find(I)] = 0;
      for (const auto &E : G.Edges) {
        int A = Find(E.Consumer), B = Find(E.Producer);
        if (A != B && Adj[A].insert(B).second)
          ++InDeg[B];
      }
      std::vector<int> Work;
      for (auto &[S, D] : InDeg)
        if (D == 0)
          Work.push_back(S);
      size_t Done = 0;
      while (!Work.empty()) {
        int S = Work.back();
        Work.pop_back();
        ++Done;
        for (int T : Adj[S])
          if (--InDeg[T] == 0)
            Work.push_back(T);
      }
      if (Done == InDeg.size())
        break;
      // Union everything left on a cycle.
      int First = -1;
      for (auto &[S, D] : InDeg)
        if (D > 0) {
          if (First < 0)
            First = S;
          else
            Union(First, S);
        }
    }
  }

  PermForest F;
  F.NodeToMulti.assign(N, -1);
  std::map<int, int> MultiOf;
  for (int I = 0; I < N; ++I) {
    int S = Find(I);
    if (!MultiOf.count(S)) {
      MultiOf[S] = (int)F.Multis.size();
      F.Multis.emplace_back();
    }
    int MI = MultiOf[S];
    F.Multis[MI].Nodes.push_back(I);
    F.NodeToMulti[I] = MI;
  }
  for (auto &M : F.Multis) {
    std::sort(M.Nodes.begin(), M.Nodes.end());
    if ((int)M.Nodes.size() > NodeLimit)
      throw PermuteError("multi-node exceeds the node limit of " +
                         std::to_string(NodeLimit) + " (got " +
                         std::to_string(M.Nodes.size()) + ")");
    size_t Cands = 1;
    size_t Bound = 1;
    for (int I = 0; I < NodeLimit; ++I)
      Bound *= (size_t)PermLimit;
    for (int NI : M.Nodes) {
      Cands *= G.Nodes[NI].FP.size();
      if (Cands > Bound)
        throw PermuteError(
            "multi-node candidate set exceeds the limit of " +
            std::to_string(Bound) + " combinations");
    }
    M.CandidateCount = Cands;
  }
  for (int EI = 0; EI < (int)G.Edges.size(); ++EI) {
    int MC = F.NodeToMulti[G.Edges[EI].Consumer];
    int MP = F.NodeToMulti[G.Edges[EI].Producer];
    if (MC == MP) {
      F.Multis[MC].InternalEdges.push_back(EI);
    } else {
      F.Multis[MC].ChildEdges.push_back(EI);
      if (std::find(F.Multis[MC].Children.begin(),
                    F.Multis[MC].Children.end(),
                    MP) == F.Multis[MC].Children.end())
        F.Multis[MC].Children.push_back(MP);
      F.Multis[MP].Parent = MC;
    }
  }
  for (int MI = 0; MI < (int)F.Multis.size(); ++MI) {
    std::sort(F.Multis[MI].Children.begin(), F.Multis[MI].Children.end());
    if (F.Multis[MI].Parent < 0)
      F.Roots.push_back(MI);
  }
  return F;
}

//===----------------------------------------------------------------------===//
// Dynamic-programming selection
//===----------------------------------------------------------------------===//

/// Bottom-up cost_min/arg fill over the multi-node forest, then a top-down
/// argmin walk writing Selected into every node. Ties break toward the
/// lexicographically smallest mask tuple. Returns the total permutation cost
/// at the roots. Candidate FP sets must already be filled.
inline Cost selectPermutationsPreset(VecGraph &G, const CostModel &CM,
                                     int NodeLimit = 5, int PermLimit = 4) {
  PermForest F = coalesceMultiNodes(G, NodeLimit, PermLimit);

  int NM = (int)F.Multis.size();
  // Candidate tuples per multi-node, in lexicographic mask order.
  std::vector<std::vector<std::vector<int>>> Cands(NM);
  for (int MI = 0; MI < NM; ++MI) {
    const auto &M = F.Multis[MI];
    std::vector<int> Tuple(M.Nodes.size(), 0);
    for (;;) {
      Cands[MI].push_back(Tuple);
      int K = (int)Tuple.size() - 1;
      while (K >= 0) {
        if (++Tuple[K] < (int)G.Nodes[M.Nodes[K]].FP.size())
          break;
        Tuple[K] = 0;
        --K;
      }
      if (K < 0)
        break;
    }
  }
  auto MaskOf = [&](int MI, const std::vector<int> &Tuple, int Node) {
    const auto &M = F.Multis[MI];
    for (size_t I = 0; I < M.Nodes.size(); ++I)
      if (M.Nodes[I] == Node)
        return G.Nodes[Node].FP[Tuple[I]];
    throw PermuteError("node not in multi-node");
  };

  // Bottom-up order: children before parents.
  std::vector<int> Topo;
  {
    std::vector<int> State(NM, 0);
    std::function<void(int)> Visit = [&](int MI) {
      if (State[MI])
        return;
      State[MI] = 1;
      for (int C : F.Multis[MI].Children)
        Visit(C);
      Topo.push_back(MI);
    };
    for (int R : F.Roots)
      Visit(R);
  }

  std::vector<std::vector<Cost>> CostMin(NM);
  std::vector<std::vector<std::vector<int>>> Arg(NM); // [multi][cand][child]
  for (int MI : Topo) {
    const auto &M = F.Multis[MI];
    CostMin[MI].assign(Cands[MI].size(), 0);
    Arg[MI].assign(Cands[MI].size(),
                   std::vector<int>(M.Children.size(), 0));
    for (size_t CI = 0; CI < Cands[MI].size(); ++CI) {
      const auto &Tuple = Cands[MI][CI];
      Cost Total = 0;
      for (int EI : M.InternalEdges)
        Total += G.edgeCost(CM, EI, MaskOf(MI, Tuple, G.Edges[EI].Consumer),
                            MaskOf(MI, Tuple, G.Edges[EI].Producer));
      for (size_t ChI = 0; ChI < M.Children.size(); ++ChI) {
        int Child = M.Children[ChI];
        Cost BestC = 0;
        int BestIdx = -1;
        for (size_t SI = 0; SI < Cands[Child].size(); ++SI) {
          Cost C = CostMin[Child][SI];
          for (int EI : M.ChildEdges) {
            if (F.NodeToMulti[G.Edges[EI].Producer] != Child)
              continue;
            C += G.edgeCost(CM, EI, MaskOf(MI, Tuple, G.Edges[EI].Consumer),
                            MaskOf(Child, Cands[Child][SI],
                                   G.Edges[EI].Producer));
          }
          if (BestIdx < 0 || C < BestC) {
            BestC = C;
            BestIdx = (int)SI;
          }
        }
        Total += BestC;
        Arg[MI][CI][ChI] = BestIdx;
      }
      CostMin[MI][CI] = Total;
    }
  }

  // Top-down selection from the roots.
  Cost TotalCost = 0;
  std::vector<int> SelectedCand(NM, -1);
  std::vector<int> Work;
  for (int R : F.Roots) {
    size_t Best = 0;
    for (size_t CI = 1; CI < Cands[R].size(); ++CI)
      if (CostMin[R][CI] < CostMin[R][Best])
        Best = CI;
    SelectedCand[R] = (int)Best;
    TotalCost += CostMin[R][Best];
    Work.push_back(R);
  }
  while (!Work.empty()) {
    int MI = Work.back();
    Work.pop_back();
    const auto &M = F.Multis[MI];
    int CI = SelectedCand[MI];
    for (size_t I = 0; I < M.Nodes.size(); ++I)
      G.Nodes[M.Nodes[I]].Selected = G.Nodes[M.Nodes[I]].FP[Cands[MI][CI][I]];
    for (size_t ChI = 0; ChI < M.Children.size(); ++ChI) {
      SelectedCand[M.Children[ChI]] = Arg[MI][CI][ChI];
      Work.push_back(M.Children[ChI]);
    }
  }
  return TotalCost;
}

/// Full permutation selection: propagate candidate masks, then run the DP.
inline Cost selectPermutations(VecGraph &G, const CostModel &CM,
                               int NodeLimit = 5, int PermLimit = 4) {
  propagateMasks(G);
  return selectPermutationsPreset(G, CM, NodeLimit, PermLimit);
}

/// Exhaustive minimum over all FP-respecting mask assignments; the oracle for
/// the DP. Limited to small graphs.
inline Cost bruteForcePermutations(const VecGraph &G, const CostModel &CM,
                                   int MaxNodes = 6, int MaxCandidates = 4) {
  if ((int)G.Nodes.size() > MaxNodes)
    throw PermuteError("brute-force permutation limit: more than " +
                       std::to_string(MaxNodes) + " nodes");
  for (const auto &Node : G.Nodes)
    if ((int)Node.FP.size() > MaxCandidates)
      throw PermuteError("brute-force permutation limit: more than " +
                         std::to_string(MaxCandidates) + " candidates");
  int N = (int)G.Nodes.size();
  std::vector<int> Pick(N, 0);
  Cost Best = -1;
  for (;;) {
    Cost Total = 0;
    for (int EI = 0; EI < (int)G.Edges.size(); ++EI)
      Total += G.edgeCost(CM, EI, G.Nodes[G.Edges[EI].Consumer].FP[Pick[
                              G.Edges[EI].Consumer]],
                          G.Nodes[G.Edges[EI].Producer].FP[Pick[
                              G.Edges[EI].Producer]]);
    if (Best < 0 || Total < Best)
      Best = Total;
    int K = N - 1;
    while (K >= 0) {
      if (++Pick[K] < (int)G.Nodes[K].FP.size())
        break;
      Pick[K] = 0;
      --K;
    }
    if (K < 0)
      break;
  }
  return Best < 0 ? 0 : Best;
}

/// Per-node FP sets and selected masks in canonical order.
inline std::string dumpVecGraph(const Function &F, const PackSet &PS,
                                const VecGraph &G) {
  std::vector<std::string> Lines;
  for (const auto &Node : G.Nodes) {
    std::ostringstream OS;
    OS << "node " << PS.packId(F, PS.Packs[Node.PackIndex])
       << (Node.Constrained ? " constrained" : " free") << " FP = {";
    for (size_t I = 0; I < Node.FP.size(); ++I)
      OS << (I ? "," : "") << maskText(Node.FP[I]);
    OS << "}";
    if (!Node.Selected.empty())
      OS << " selected = " << maskText(Node.Selected);
    Lines.push_back(OS.str());
  }
  std::sort(Lines.begin(), Lines.end());
  std::ostringstream OS;
  for (const auto &L : Lines)
    OS << L << "\n";
  return OS.str();
}

} // namespace goslp
