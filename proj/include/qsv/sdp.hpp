#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "qsv/linalg.hpp"
#include "qsv/types.hpp"

namespace qsv {

/// One affine measurement constraint Tr(rho A) = value.
struct Constraint {
  HermitianOperator observable;
  double value = 0.0;
};

/// Intersection of measurement-compatible state sets: the density matrices
/// reproducing every listed expectation value.
struct CompatibleSetSpec {
  int dim = 0;
  std::vector<Constraint> constraints;

  explicit CompatibleSetSpec(int dim_) : dim(dim_) {}

  void add(const HermitianOperator& observable, double value);
  /// Append the constraint the observable would produce on `state`.
  void add_from_state(const HermitianOperator& observable, const DensityMatrix& state);
};

enum class SdpStatus { Optimal, Infeasible, NumericalFailure };
enum class Sense { Min, Max };

struct SdpDiagnostics {
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  double value = 0.0;                      // Tr(optimizer * objective) when Optimal
  std::optional<DensityMatrix> optimizer;  // one point of the optimal face
  SdpDiagnostics residuals;
};

/// Extremize Tr(rho * objective) over {rho PSD, Tr rho = 1} intersected with
/// the constraints of `spec`.
///
/// Linearly dependent constraint rows are deduplicated by orthogonal
/// projection (residual norm below 1e-9); a dependent row whose value is
/// inconsistent beyond 1e-7 certifies Infeasible without a solve. The solve
/// itself is a homogeneous self-dual primal-dual interior-point method on the
/// Hermitian PSD cone, duality-gap termination at 1e-8 (typically 1e-9) and a
/// Farkas dual ray for infeasibility. After convergence the optimizer is
/// polished onto the optimal face identified by the dual slack spectrum, so
/// reported values at pinned optima are accurate to ~1e-12 rather than
/// gap-limited.
SdpSolution extremize_linear(const HermitianOperator& objective,
                             const CompatibleSetSpec& spec, Sense sense);

/// Min and max Bures distance to the pure target over the compatible set:
/// min via the Max-fidelity solve, max via the Min-fidelity solve.
/// Throws InfeasibleError / SolverError.
std::pair<double, double> distance_extrema(const DensityMatrix& rho0,
                                           const CompatibleSetSpec& spec);

/// State estimate given partial data: the argmin of d_B(., rho0) over the
/// compatible set (a Max-fidelity optimizer).
DensityMatrix estimate_state(const DensityMatrix& rho0, const CompatibleSetSpec& spec);

/// Extrema plus the Max-fidelity optimizer, so callers needing both the
/// bracket and the estimate pay for two solves, not three.
struct DistanceExtrema {
  double min_dist = 0.0;
  double max_dist = 0.0;
  DensityMatrix closest;  // Max-fidelity optimizer (the estimate)
};
DistanceExtrema distance_extrema_full(const DensityMatrix& rho0,
                                      const CompatibleSetSpec& spec);

/// Snap a solver-reported fidelity to the exact endpoint when within 1e-9 of
/// it. The Bures map has infinite slope at both endpoints, so endpoint noise
/// would otherwise blow up into 1e-5-scale distance jitter.
double snap_fidelity(double f);

/// Stream for per-iterate diagnostics of every solve (nullptr disables).
void set_sdp_debug_stream(std::ostream* os);

}  // namespace qsv
