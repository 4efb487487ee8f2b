#include "diffusion_factor/cayley.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace diffusion_factor {

std::vector<u64> PowerTable::s_values() const {
  std::vector<u64> out;
  out.reserve(plus_powers.size() + minus_powers.size());
  for (const auto& r : plus_powers) out.push_back(r.value());
  for (const auto& r : minus_powers) out.push_back(r.value());
  return out;
}

CayleyGraph::CayleyGraph(GroupNotation notation, u64 modulus, unsigned M, std::vector<u64> labels,
                         std::vector<WeightedGenerator> generators,
                         std::vector<std::size_t> offsets, std::vector<Edge> edges)
    : notation_(notation),
      modulus_(modulus),
      M_(M),
      labels_(std::move(labels)),
      generators_(std::move(generators)),
      offsets_(std::move(offsets)),
      edges_(std::move(edges)) {
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    index_.emplace(labels_[i], static_cast<VertexId>(i));
  }
}

std::optional<VertexId> CayleyGraph::find(u64 label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int CayleyGraph::weight(VertexId x, VertexId y) const noexcept {
  for (const Edge& e : neighbors(x)) {
    if (e.target == y) return e.weight;
  }
  return 0;
}

PowerTable build_power_table(const Residue& a) {
  if (a.modulus() < 3) throw Error(Errc::PreconditionViolated, "power table needs N >= 3");
  const Residue a_inv = inverse(a);
  const unsigned M = exponent_bound(a.modulus());
  PowerTable table{a, M, {}, {}};
  table.plus_powers.reserve(M + 1);
  table.minus_powers.reserve(M + 1);
  table.plus_powers.push_back(a);
  table.minus_powers.push_back(a_inv);
  for (unsigned t = 1; t <= M; ++t) {
    table.plus_powers.push_back(table.plus_powers.back().squared());
    table.minus_powers.push_back(table.minus_powers.back().squared());
  }
  return table;
}

std::optional<RepetitionWitness> find_repetition(const PowerTable& table) {
  const unsigned n = table.M + 1;
  auto best_of = [&](RepetitionSign sign) -> std::optional<RepetitionWitness> {
    const auto& other = sign == RepetitionSign::Plus ? table.plus_powers : table.minus_powers;
    std::optional<RepetitionWitness> best;
    for (unsigned l = 1; l < n; ++l) {
      for (unsigned lp = 0; lp < l; ++lp) {
        if (!(table.plus_powers[l] == other[lp])) continue;
        const bool better = !best || l + lp < best->l + best->l_prime ||
                            (l + lp == best->l + best->l_prime && l < best->l);
        if (better) {
          const u64 pow2 = u64{1} << (l - lp);
          const u64 q = sign == RepetitionSign::Plus ? pow2 - 1 : pow2 + 1;
          best = RepetitionWitness{l, lp, sign, q};
        }
      }
    }
    return best;
  };
  // a^{-2^l} = a^{-2^{l'}} mirrors a plus-hit and a^{-2^l} = a^{2^{l'}}
  // mirrors a minus-hit, so scanning plus_powers[l] covers every coincidence.
  if (auto plus = best_of(RepetitionSign::Plus)) return plus;
  return best_of(RepetitionSign::Minus);
}

std::vector<WeightedGenerator> weight_alpha(const PowerTable& table) {
  std::vector<WeightedGenerator> out;
  for (u64 s : table.s_values()) {
    auto it = std::find_if(out.begin(), out.end(), [s](const auto& g) { return g.label == s; });
    if (it == out.end()) {
      out.push_back({s, 1});
    } else {
      ++it->weight;
    }
  }
  return out;
}

namespace {

template <typename Combine>
CayleyGraph close_under(GroupNotation notation, u64 modulus, unsigned M,
                        std::vector<u64> labels, std::vector<WeightedGenerator> generators,
                        Combine combine) {
  std::unordered_map<u64, VertexId> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], static_cast<VertexId>(i));
  std::vector<std::size_t> offsets{0};
  std::vector<Edge> edges;
  bool self_loop = false;
  // Distinct generators of a cyclic group send x to distinct neighbours, so
  // each generator contributes exactly one edge per vertex.
  for (std::size_t head = 0; head < labels.size(); ++head) {
    const u64 x = labels[head];
    for (const auto& g : generators) {
      const u64 y = combine(x, g.label);
      auto [it, inserted] = index.try_emplace(y, static_cast<VertexId>(labels.size()));
      if (inserted) {
        if (labels.size() == std::numeric_limits<VertexId>::max()) {
          throw Error(Errc::TooLarge, "group exceeds the vertex id range");
        }
        labels.push_back(y);
      }
      self_loop = self_loop || y == x;
      edges.push_back({it->second, g.weight});
    }
    offsets.push_back(edges.size());
  }
  if (self_loop && labels.size() % 2 == 1 && labels.size() > 1) {
    throw Error(Errc::EngineError, "self-loop in a group of odd order");
  }
  return CayleyGraph(notation, modulus, M, std::move(labels), std::move(generators),
                     std::move(offsets), std::move(edges));
}

}  // namespace

CayleyGraph build_cayley_graph(const PowerTable& table) {
  const u64 n = table.modulus();
  return close_under(GroupNotation::Multiplicative, n, table.M, {1}, weight_alpha(table),
                     [n](u64 x, u64 s) { return mul_mod(x, s, n); });
}

CayleyGraph build_cayley_graph(const Residue& b) { return build_cayley_graph(build_power_table(b)); }

CayleyGraph additive_model(u64 r, unsigned M) {
  if (r == 0 || r % 2 == 0) throw Error(Errc::PreconditionViolated, "additive model needs odd r");
  if (M == 0) throw Error(Errc::PreconditionViolated, "additive model needs M >= 1");
  std::vector<WeightedGenerator> generators;
  auto add = [&](u64 s) {
    auto it = std::find_if(generators.begin(), generators.end(),
                           [s](const auto& g) { return g.label == s; });
    if (it == generators.end()) {
      generators.push_back({s, 1});
    } else {
      ++it->weight;
    }
  };
  std::vector<u64> plus;
  u64 p = 1 % r;
  for (unsigned j = 0; j <= M; ++j) {
    plus.push_back(p);
    p = (p * 2) % r;
  }
  for (u64 s : plus) add(s);
  for (u64 s : plus) add((r - s) % r);
  std::vector<u64> elements(r);
  std::iota(elements.begin(), elements.end(), u64{0});
  return close_under(GroupNotation::Additive, r, M, std::move(elements), std::move(generators),
                     [r](u64 x, u64 s) { return (x + s) % r; });
}

}  // namespace diffusion_factor
