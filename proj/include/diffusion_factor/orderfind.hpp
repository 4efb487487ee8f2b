#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "diffusion_factor/diffusion.hpp"

namespace diffusion_factor {

enum class OrderMode { FullBound, EarlyStop };

/// Which vertices an early-stop check inspects.
///  - StartOnly:   the identity e.
///  - SPowers:     e plus every distinct residue of S = {b^{+-2^t}}.
///  - SquareChain: the distinct residues b^{2^t}, t = 1..M, i.e. the values
///                 produced by the M squarings (p is inversion-symmetric, so
///                 the b^{-2^t} add nothing).
///  - All:         every vertex.
enum class MeasureSet { StartOnly, SPowers, SquareChain, All };

struct OrderFindConfig {
  OrderMode mode = OrderMode::FullBound;
  u64 check_every = 25;
  u64 max_candidates = 8;
  MeasureSet measure_set = MeasureSet::SquareChain;
  /// Try the power-table repetition of b before walking.
  bool repetition_shortcut = true;
  /// Replaces required_steps(N) as the walk length when set.
  std::optional<u64> steps_override;
};

/// Integers h with lower <= 1/h <= upper, clamped to [1, N]. Stored as the
/// closed range [first, last]; empty when first > last.
struct CandidateInterval {
  double lower = 0.0;
  double upper = 1.0;
  double error_bound = 0.0;  // A_m; zero for a raw measurement bracket
  u64 first = 1;
  u64 last = 0;

  u64 size() const noexcept { return last >= first ? last - first + 1 : 0; }
  bool empty() const noexcept { return size() == 0; }
  std::vector<u64> candidates() const;
};

enum class DecodePath { FullBoundDecode, EarlyStopDecode, RepetitionShortcut };
std::string_view decode_path_name(DecodePath path) noexcept;
std::string_view measure_set_name(MeasureSet set) noexcept;

struct EarlyStopCheck {
  u64 iteration;
  std::vector<double> measurements;
  CandidateInterval bound_interval;  // from A_m = (1 - 1/(2(M+1)))^m
  CandidateInterval bracket;         // from the spread of the measurements
};

struct OrderResult {
  u64 order = 0;
  StepLedger ledger;
  DecodePath decode_path = DecodePath::FullBoundDecode;
  std::vector<u64> candidates_tried;
  u64 iterations = 0;
  std::optional<double> probability_at_start;  // p_n(e) when decoded from it
  std::optional<EarlyStopCheck> last_check;
  std::optional<WalkState> final_state;
};

/// floor(4 (M+1) ln N) + 1, M = floor(log2 N) + 1.
u64 required_steps(u64 n);

/// Nearest integer to 1/p clamped to [1, N]; both neighbours on an exact tie.
std::vector<u64> decode_order(double p_at_start, u64 n);

/// L = max(1/N, max_v (p_v - A)), U = min(1, min_v (p_v + A)).
CandidateInterval candidate_interval(std::span<const double> measurements, double error_bound,
                                     u64 n);

/// The integers whose reciprocals enclose [min p_v, max p_v]:
/// floor(1/max p) .. ceil(1/min p), clamped to [1, N].
CandidateInterval measurement_bracket(std::span<const double> measurements, u64 n);

/// Smallest h in `candidates` with b^h = 1 and b^{h/p} != 1 for every prime
/// p | h. Modular multiplications are booked on `ledger` when given.
std::optional<u64> verify_candidates(const Residue& b, std::span<const u64> candidates,
                                     StepLedger* ledger = nullptr);

/// Order of b (assumed odd) from the half-lazy walk on X_{N,b}. Throws
/// NotAUnit, OrderNotOdd, DecodeFailure.
OrderResult find_order(const Residue& b, const OrderFindConfig& config = {});

/// Vertices the early-stop check reads for the given set.
std::vector<VertexId> measured_vertices(const CayleyGraph& graph, const PowerTable& table,
                                        MeasureSet set);

}  // namespace diffusion_factor
