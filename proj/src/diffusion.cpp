#include "diffusion_factor/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <ostream>

namespace diffusion_factor {

namespace {

constexpr double kNegativeSlack = 1e-15;
constexpr double kMassTolerance = 1e-12;
constexpr double kImagTolerance = 1e-10;
constexpr double kGroupingTolerance = 1e-10;

double angle(u64 numerator, u64 r) {
  return 2.0 * std::numbers::pi * static_cast<double>(numerator) / static_cast<double>(r);
}

}  // namespace

WalkState start_walk(GraphPtr graph) {
  if (!graph || graph->vertex_count() == 0) {
    throw Error(Errc::PreconditionViolated, "walk needs a nonempty graph");
  }
  WalkState state;
  state.probabilities.assign(graph->vertex_count(), 0.0);
  state.probabilities[0] = 1.0;
  state.graph = std::move(graph);
  return state;
}

void advance(WalkState& state, std::vector<double>& scratch) {
  const CayleyGraph& g = *state.graph;
  const std::vector<double>& p = state.probabilities;
  const double move = 0.5 / static_cast<double>(g.degree());
  const std::size_t n = p.size();
  scratch.resize(n);
  // w(x,y) = w(y,x), so the pull over x's own neighbour list is W p.
  double mass = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double inflow = 0.0;
    for (const Edge& e : g.neighbors(static_cast<VertexId>(x))) {
      inflow += e.weight * p[e.target];
    }
    double v = 0.5 * p[x] + move * inflow;
    if (v < 0.0) {
      if (v < -kNegativeSlack) throw Error(Errc::EngineError, "negative probability");
      v = 0.0;
    }
    scratch[x] = v;
    mass += v;
  }
  if (std::abs(mass - 1.0) > kMassTolerance) {
    throw Error(Errc::EngineError, "probability mass drifted to " + std::to_string(mass));
  }
  state.probabilities.swap(scratch);
  ++state.iteration;
  ++state.ledger.matrix_applications;
}

WalkState half_lazy_step(const WalkState& state) {
  WalkState next = state;
  std::vector<double> scratch;
  advance(next, scratch);
  return next;
}

WalkState run_walk(GraphPtr graph, u64 steps) {
  WalkState state = start_walk(std::move(graph));
  std::vector<double> scratch;
  for (u64 i = 0; i < steps; ++i) advance(state, scratch);
  return state;
}

double measure(WalkState& state, VertexId vertex) {
  if (vertex >= state.probabilities.size()) {
    throw Error(Errc::UnknownVertex, "vertex " + std::to_string(vertex));
  }
  ++state.ledger.measurements;
  return state.probabilities[vertex];
}

void write_probability_csv(std::ostream& out, const WalkState& state) {
  out << "vertex,residue,probability,reciprocal\n";
  char buf[64];
  for (std::size_t v = 0; v < state.probabilities.size(); ++v) {
    const double p = state.probabilities[v];
    out << v << ',' << state.graph->label(static_cast<VertexId>(v)) << ',';
    std::snprintf(buf, sizeof buf, "%.17g", p);
    out << buf << ',';
    if (p > 0.0) {
      std::snprintf(buf, sizeof buf, "%.17g", 1.0 / p);
      out << buf;
    } else {
      out << "inf";
    }
    out << '\n';
  }
}

SpectralData spectral_data(u64 r, unsigned M) {
  if (r == 0 || r % 2 == 0) throw Error(Errc::PreconditionViolated, "spectral data needs odd r");
  if (M == 0) throw Error(Errc::PreconditionViolated, "spectral data needs M >= 1");
  SpectralData out{r, M, std::vector<double>(r), std::vector<double>(r), 0.0};
  std::vector<u64> powers;  // 2^j mod r
  u64 p = 1 % r;
  for (unsigned j = 0; j <= M; ++j) {
    powers.push_back(p);
    p = (p * 2) % r;
  }
  const double degree = 2.0 * (M + 1);
  for (u64 k = 0; k < r; ++k) {
    std::complex<double> sum = 0.0;
    for (u64 pw : powers) {
      const u64 e = mul_mod(k, pw, r);
      sum += std::polar(1.0, angle(e, r));
      sum += std::polar(1.0, -angle(e, r));
    }
    if (std::abs(sum.imag()) > kImagTolerance) {
      throw Error(Errc::EngineError, "eta_k has a nonzero imaginary part");
    }
    out.eta[k] = sum.real();
    out.lambda[k] = 0.5 * (1.0 + sum.real() / degree);
  }
  out.eta[0] = degree;
  out.lambda[0] = 1.0;
  if (r > 1) out.lambda_star = *std::max_element(out.lambda.begin() + 1, out.lambda.end());
  return out;
}

double spectral_walk_oracle(const SpectralData& spectrum, u64 steps, u64 vertex) {
  const u64 r = spectrum.r;
  const u64 x = vertex % r;
  double total = 0.0;
  for (u64 k = 0; k < r; ++k) {
    const double weight = std::pow(spectrum.lambda[k], static_cast<double>(steps));
    total += weight * std::cos(angle(mul_mod(k, x, r), r));
  }
  return total / static_cast<double>(r);
}

double spectral_walk_oracle(u64 r, unsigned M, u64 steps, u64 vertex) {
  return spectral_walk_oracle(spectral_data(r, M), steps, vertex);
}

KorobovCheck verify_korobov_bound(u64 r, unsigned M) {
  if (r < 3 || r % 2 == 0) throw Error(Errc::PreconditionViolated, "needs odd r >= 3");
  if (M < exponent_bound(r)) {
    throw Error(Errc::PreconditionViolated, "needs M >= floor(log2 r) + 1");
  }
  const SpectralData s = spectral_data(r, M);
  double worst = 0.0;
  for (u64 k = 1; k < r; ++k) worst = std::max(worst, std::abs(s.eta[k]));
  const double ratio = worst / (2.0 * (M + 1));
  const double threshold = 1.0 - 1.0 / (M + 1.0);
  return {ratio, threshold, ratio < threshold};
}

std::vector<EigenProjection> fourier_coefficients(std::span<const double> f, u64 r, unsigned M) {
  if (f.size() != r) throw Error(Errc::PreconditionViolated, "f must have length r");
  const SpectralData s = spectral_data(r, M);

  std::vector<std::complex<double>> coeff(r);
  for (u64 k = 0; k < r; ++k) {
    std::complex<double> c = 0.0;
    for (u64 x = 0; x < r; ++x) c += f[x] * std::polar(1.0, -angle(mul_mod(k, x, r), r));
    coeff[k] = c / static_cast<double>(r);
  }

  std::vector<u64> order(r);
  std::iota(order.begin(), order.end(), u64{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](u64 a, u64 b) { return s.lambda[a] > s.lambda[b]; });

  std::vector<EigenProjection> out;
  std::size_t i = 0;
  while (i < r) {
    const double lead = s.lambda[order[i]];
    std::size_t j = i;
    std::vector<std::complex<double>> h(r, 0.0);
    while (j < r && std::abs(s.lambda[order[j]] - lead) <= kGroupingTolerance) {
      const u64 k = order[j];
      for (u64 x = 0; x < r; ++x) h[x] += coeff[k] * std::polar(1.0, angle(mul_mod(k, x, r), r));
      ++j;
    }
    EigenProjection proj{lead, std::vector<double>(r)};
    for (u64 x = 0; x < r; ++x) proj.projection[x] = h[x].real();
    out.push_back(std::move(proj));
    i = j;
  }
  return out;
}

}  // namespace diffusion_factor
