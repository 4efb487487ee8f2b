#include "diffusion_factor/orderfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace diffusion_factor {

std::string_view decode_path_name(DecodePath path) noexcept {
  switch (path) {
    case DecodePath::FullBoundDecode: return "full_bound";
    case DecodePath::EarlyStopDecode: return "early_stop";
    case DecodePath::RepetitionShortcut: return "repetition_shortcut";
  }
  return "unknown";
}

std::string_view measure_set_name(MeasureSet set) noexcept {
  switch (set) {
    case MeasureSet::StartOnly: return "start";
    case MeasureSet::SPowers: return "s-powers";
    case MeasureSet::SquareChain: return "square-chain";
    case MeasureSet::All: return "all";
  }
  return "unknown";
}

std::vector<u64> CandidateInterval::candidates() const {
  std::vector<u64> out;
  if (empty()) return out;
  out.reserve(size());
  for (u64 h = first; h <= last; ++h) out.push_back(h);
  return out;
}

u64 required_steps(u64 n) {
  if (n < 2) throw Error(Errc::PreconditionViolated, "required_steps needs N >= 2");
  const double m_plus_1 = exponent_bound(n) + 1.0;
  return static_cast<u64>(std::floor(4.0 * m_plus_1 * std::log(static_cast<double>(n)))) + 1;
}

std::vector<u64> decode_order(double p_at_start, u64 n) {
  if (!(p_at_start > 0.0)) {
    throw Error(Errc::NonpositiveProbability, "cannot decode p = " + std::to_string(p_at_start));
  }
  if (p_at_start > 1.0 + 1e-12) {
    throw Error(Errc::PreconditionViolated, "probability above 1");
  }
  auto clamp = [n](double h) {
    if (h < 1.0) return u64{1};
    if (h >= static_cast<double>(n)) return n;
    return static_cast<u64>(h);
  };
  const double x = 1.0 / p_at_start;
  const double whole = std::floor(x);
  if (x - whole == 0.5) {
    std::vector<u64> out{clamp(whole), clamp(whole + 1.0)};
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  return {clamp(std::round(x))};
}

namespace {

// Smallest h >= 1 with 1/h <= upper, i.e. h * upper >= 1.
u64 first_at_or_below(double upper, u64 n) {
  if (upper >= 1.0) return 1;
  if (!(upper > 0.0)) return n + 1;
  const double guess = std::ceil(1.0 / upper);
  if (guess > static_cast<double>(n) + 1.0) return n + 1;
  auto h = static_cast<u64>(guess);
  while (h > 1 && static_cast<double>(h - 1) * upper >= 1.0) --h;
  while (static_cast<double>(h) * upper < 1.0) ++h;
  return h;
}

// Largest h <= n with 1/h >= lower, i.e. h * lower <= 1.
u64 last_at_or_above(double lower, u64 n) {
  if (!(lower > 0.0)) return n;
  if (lower > 1.0) return 0;
  const double guess = std::floor(1.0 / lower);
  if (guess >= static_cast<double>(n)) return n;
  auto h = static_cast<u64>(guess);
  while (h < n && static_cast<double>(h + 1) * lower <= 1.0) ++h;
  while (h > 0 && static_cast<double>(h) * lower > 1.0) --h;
  return h;
}

std::pair<double, double> extremes(std::span<const double> values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi};
}

}  // namespace

CandidateInterval candidate_interval(std::span<const double> measurements, double error_bound,
                                     u64 n) {
  if (measurements.empty()) throw Error(Errc::EmptyMeasurements, "no measurements");
  if (!(error_bound > 0.0)) throw Error(Errc::PreconditionViolated, "A_m must be positive");
  const auto [lo, hi] = extremes(measurements);
  CandidateInterval out;
  out.error_bound = error_bound;
  out.lower = std::max(1.0 / static_cast<double>(n), hi - error_bound);
  out.upper = std::min(1.0, lo + error_bound);
  out.first = first_at_or_below(out.upper, n);
  out.last = last_at_or_above(out.lower, n);
  return out;
}

CandidateInterval measurement_bracket(std::span<const double> measurements, u64 n) {
  if (measurements.empty()) throw Error(Errc::EmptyMeasurements, "no measurements");
  const auto [lo, hi] = extremes(measurements);
  CandidateInterval out;
  out.lower = lo;
  out.upper = hi;
  // floor(1/hi): largest h with 1/h >= hi; ceil(1/lo): smallest h with 1/h <= lo
  out.first = std::max<u64>(1, last_at_or_above(hi, n));
  out.last = std::min(n, first_at_or_below(lo, n));
  return out;
}

std::optional<u64> verify_candidates(const Residue& b, std::span<const u64> candidates,
                                     StepLedger* ledger) {
  auto book = [ledger](u64 exponent) {
    if (ledger) ledger->digital_ops += mod_pow_cost(Exponent(exponent));
  };
  for (u64 h : candidates) {
    if (h == 0) continue;
    book(h);
    if (!mod_pow(b, h).is_one()) continue;
    bool minimal = true;
    for (const auto& pp : factorize(h)) {
      book(h / pp.prime);
      if (mod_pow(b, h / pp.prime).is_one()) {
        minimal = false;
        break;
      }
    }
    if (minimal) return h;
  }
  return std::nullopt;
}

std::vector<VertexId> measured_vertices(const CayleyGraph& graph, const PowerTable& table,
                                        MeasureSet set) {
  std::vector<VertexId> out;
  auto add = [&](u64 residue) {
    const auto v = graph.find(residue);
    if (!v) throw Error(Errc::UnknownVertex, "residue " + std::to_string(residue));
    if (std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
  };
  switch (set) {
    case MeasureSet::StartOnly:
      out.push_back(0);
      break;
    case MeasureSet::SPowers:
      out.push_back(0);
      for (u64 s : table.s_values()) add(s);
      break;
    case MeasureSet::SquareChain:
      for (unsigned t = 1; t <= table.M; ++t) add(table.plus_powers[t].value());
      break;
    case MeasureSet::All:
      for (std::size_t v = 0; v < graph.vertex_count(); ++v) out.push_back(static_cast<VertexId>(v));
      break;
  }
  return out;
}

namespace {

void require_odd(u64 order) {
  if (order % 2 == 0) {
    throw Error(Errc::OrderNotOdd, "decoded order " + std::to_string(order) + " is even");
  }
}

bool try_candidates(const Residue& b, const CandidateInterval& interval, u64 max_candidates,
                    OrderResult& result) {
  if (interval.empty() || interval.size() > max_candidates) return false;
  const auto candidates = interval.candidates();
  result.candidates_tried.insert(result.candidates_tried.end(), candidates.begin(),
                                 candidates.end());
  if (auto r = verify_candidates(b, candidates, &result.ledger)) {
    result.order = *r;
    return true;
  }
  return false;
}

}  // namespace

OrderResult find_order(const Residue& b, const OrderFindConfig& config) {
  if (config.check_every == 0 || config.max_candidates == 0) {
    throw Error(Errc::PreconditionViolated, "check_every and max_candidates must be >= 1");
  }
  const u64 n = b.modulus();
  if (gcd(b.value(), n) != 1) {
    throw Error(Errc::NotAUnit, std::to_string(b.value()) + " is not a unit mod " + std::to_string(n));
  }
  OrderResult result;
  const PowerTable table = build_power_table(b);
  result.ledger.digital_ops += 2 * table.M + euclid_iterations(n, b.value());

  if (config.repetition_shortcut) {
    if (const auto witness = find_repetition(table)) {
      // b^{2^{l'} q} = 1 with q odd; an odd order must already divide q.
      result.ledger.digital_ops += mod_pow_cost(Exponent(witness->q));
      if (!mod_pow(b, witness->q).is_one()) {
        throw Error(Errc::OrderNotOdd, "b^q != 1, so ord(b) is even");
      }
      result.order = order_from_multiple(b, witness->q);
      result.ledger.digital_ops += mod_pow_cost(Exponent(witness->q)) * factorize(witness->q).size();
      result.decode_path = DecodePath::RepetitionShortcut;
      result.candidates_tried.push_back(result.order);
      return result;
    }
  }

  auto graph = std::make_shared<const CayleyGraph>(build_cayley_graph(table));
  const u64 total = config.steps_override.value_or(required_steps(n));
  WalkState state = start_walk(graph);
  std::vector<double> scratch;

  auto finish = [&](DecodePath path) {
    result.decode_path = path;
    result.iterations = state.iteration;
    result.ledger.matrix_applications += state.ledger.matrix_applications;
    result.ledger.measurements += state.ledger.measurements;
    result.final_state = std::move(state);
    require_odd(result.order);
    return std::move(result);
  };

  if (config.mode == OrderMode::EarlyStop) {
    const auto vertices = measured_vertices(*graph, table, config.measure_set);
    const double contraction = 1.0 - 1.0 / (2.0 * (table.M + 1));
    for (u64 m = 1; m < total; ++m) {
      advance(state, scratch);
      if (m % config.check_every != 0) continue;
      EarlyStopCheck check{m, {}, {}, {}};
      check.measurements.reserve(vertices.size());
      for (VertexId v : vertices) check.measurements.push_back(measure(state, v));
      check.bound_interval =
          candidate_interval(check.measurements, std::pow(contraction, static_cast<double>(m)), n);
      check.bracket = measurement_bracket(check.measurements, n);
      result.last_check = check;
      if (try_candidates(b, check.bound_interval, config.max_candidates, result) ||
          try_candidates(b, check.bracket, config.max_candidates, result)) {
        return finish(DecodePath::EarlyStopDecode);
      }
    }
    if (total > 0) advance(state, scratch);
  } else {
    for (u64 m = 0; m < total; ++m) advance(state, scratch);
  }

  const double p = measure(state, 0);
  result.probability_at_start = p;
  const auto candidates = decode_order(p, n);
  result.candidates_tried.insert(result.candidates_tried.end(), candidates.begin(),
                                 candidates.end());
  const auto r = verify_candidates(b, candidates, &result.ledger);
  if (!r) {
    throw Error(Errc::DecodeFailure,
                "no candidate near 1/p = " + std::to_string(1.0 / p) + " is the order");
  }
  result.order = *r;
  return finish(DecodePath::FullBoundDecode);
}

}  // namespace diffusion_factor
