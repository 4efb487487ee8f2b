#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "diffusion_factor/cayley.hpp"

namespace diffusion_factor {

/// Diffusion steps are W applications plus measurements; digital_ops counts
/// modular multiplications and gcd iterations.
struct StepLedger {
  u64 matrix_applications = 0;
  u64 measurements = 0;
  u64 digital_ops = 0;

  u64 diffusion_steps() const noexcept { return matrix_applications + measurements; }

  StepLedger& operator+=(const StepLedger& other) noexcept {
    matrix_applications += other.matrix_applications;
    measurements += other.measurements;
    digital_ops += other.digital_ops;
    return *this;
  }
  friend bool operator==(const StepLedger&, const StepLedger&) = default;
};

using GraphPtr = std::shared_ptr<const CayleyGraph>;

/// p_n over the vertices of a graph, plus the ledger of the walk so far.
struct WalkState {
  GraphPtr graph;
  std::vector<double> probabilities;
  u64 iteration = 0;
  StepLedger ledger;
};

/// Point mass at vertex 0 (the identity).
WalkState start_walk(GraphPtr graph);

/// In-place p <- W p with W = (I + A/d) / 2. `scratch` is resized as needed.
void advance(WalkState& state, std::vector<double>& scratch);

WalkState half_lazy_step(const WalkState& state);
WalkState run_walk(GraphPtr graph, u64 steps);

/// Reads p_n(vertex) and books one measurement. Throws UnknownVertex.
double measure(WalkState& state, VertexId vertex);

/// CSV `vertex,residue,probability,reciprocal`, 17 significant digits.
void write_probability_csv(std::ostream& out, const WalkState& state);

/// Eigen-data of the half-lazy walk on X_{r,S}.
struct SpectralData {
  u64 r = 1;
  unsigned M = 1;
  std::vector<double> eta;     // adjacency eigenvalues, index k
  std::vector<double> lambda;  // (1 + eta/(2(M+1))) / 2
  double lambda_star = 0.0;    // max_{k>=1} lambda_k, 0 when r = 1
};

SpectralData spectral_data(u64 r, unsigned M);

/// p_n(x) = (1/r) sum_k lambda_k^n e^{2 pi i k x / r}, point-mass start at 0.
double spectral_walk_oracle(const SpectralData& spectrum, u64 steps, u64 vertex);
double spectral_walk_oracle(u64 r, unsigned M, u64 steps, u64 vertex);

struct KorobovCheck {
  double max_ratio;  // max_{k>=1} |eta_k| / (2(M+1))
  double threshold;  // 1 - 1/(M+1)
  bool holds;
};

/// Requires odd r >= 3 and M >= floor(log2 r) + 1 (PreconditionViolated).
KorobovCheck verify_korobov_bound(u64 r, unsigned M);

struct EigenProjection {
  double lambda;
  std::vector<double> projection;
};

/// Splits f into its projections onto the eigenspaces of W_{r,S}, grouping
/// characters whose eigenvalues agree within 1e-10. Sorted by descending
/// lambda; the projections sum back to f.
std::vector<EigenProjection> fourier_coefficients(std::span<const double> f, u64 r, unsigned M);

}  // namespace diffusion_factor
