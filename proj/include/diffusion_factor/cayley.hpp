#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "diffusion_factor/numtheory.hpp"

namespace diffusion_factor {

using VertexId = std::uint32_t;

/// a^{2^t} and a^{-2^t} mod N for t = 0..M, M = floor(log2 N) + 1.
struct PowerTable {
  Residue base;
  unsigned M;
  std::vector<Residue> plus_powers;
  std::vector<Residue> minus_powers;

  u64 modulus() const noexcept { return base.modulus(); }
  /// The 2(M+1) residues in S order: plus powers then minus powers.
  std::vector<u64> s_values() const;
};

enum class RepetitionSign { Plus = 1, Minus = -1 };

/// a^{2^l} = a^{sign * 2^{l'}} with l > l', hence a^{2^{l'} q} = 1 for the odd
/// q = 2^{l-l'} - sign.
struct RepetitionWitness {
  unsigned l;
  unsigned l_prime;
  RepetitionSign sign;
  u64 q;

  friend bool operator==(const RepetitionWitness&, const RepetitionWitness&) = default;
};

struct WeightedGenerator {
  u64 label;  // residue (multiplicative) or element of C_r (additive)
  int weight;
};

struct Edge {
  VertexId target;
  int weight;
};

enum class GroupNotation { Multiplicative, Additive };

/// Weighted Cayley graph of a cyclic group, regular of degree 2(M+1).
/// Adjacency is stored CSR-style; `neighbors(x)` lists every y with w(x,y) > 0.
class CayleyGraph {
 public:
  CayleyGraph(GroupNotation notation, u64 modulus, unsigned M, std::vector<u64> labels,
              std::vector<WeightedGenerator> generators, std::vector<std::size_t> offsets,
              std::vector<Edge> edges);

  GroupNotation notation() const noexcept { return notation_; }
  /// N for multiplicative graphs, r for the additive model.
  u64 modulus() const noexcept { return modulus_; }
  unsigned M() const noexcept { return M_; }
  int degree() const noexcept { return static_cast<int>(2 * (M_ + 1)); }
  std::size_t vertex_count() const noexcept { return labels_.size(); }

  const std::vector<u64>& labels() const noexcept { return labels_; }
  u64 label(VertexId v) const { return labels_.at(v); }
  std::optional<VertexId> find(u64 label) const;

  const std::vector<WeightedGenerator>& generators() const noexcept { return generators_; }

  struct EdgeRange {
    const Edge* first;
    const Edge* last;
    const Edge* begin() const noexcept { return first; }
    const Edge* end() const noexcept { return last; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(last - first); }
  };
  EdgeRange neighbors(VertexId v) const noexcept {
    return {edges_.data() + offsets_[v], edges_.data() + offsets_[v + 1]};
  }
  /// w(x, y); zero when not adjacent.
  int weight(VertexId x, VertexId y) const noexcept;

 private:
  GroupNotation notation_;
  u64 modulus_;
  unsigned M_;
  std::vector<u64> labels_;
  std::unordered_map<u64, VertexId> index_;
  std::vector<WeightedGenerator> generators_;
  std::vector<std::size_t> offsets_;
  std::vector<Edge> edges_;
};

/// Throws NotAUnit; requires N >= 3.
PowerTable build_power_table(const Residue& a);

/// Plus-hits (a^{2^l} = a^{2^{l'}}) take precedence over minus-hits; within a
/// kind the pair minimizing l + l' wins, then the smaller l.
std::optional<RepetitionWitness> find_repetition(const PowerTable& table);

/// Multiplicity of each distinct residue among the 2(M+1) entries of S, in
/// order of first appearance.
std::vector<WeightedGenerator> weight_alpha(const PowerTable& table);

/// X_{N,b}: vertices discovered by breadth-first closure from 1, vertex 0 is
/// the residue 1.
CayleyGraph build_cayley_graph(const Residue& b);
CayleyGraph build_cayley_graph(const PowerTable& table);

/// X_{r,S} = Cay(C_r, {+-2^j : j = 0..M}, alpha). Vertex k is the element k.
CayleyGraph additive_model(u64 r, unsigned M);

}  // namespace diffusion_factor
