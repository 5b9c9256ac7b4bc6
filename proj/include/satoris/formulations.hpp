#ifndef SATORIS_FORMULATIONS_HPP
#define SATORIS_FORMULATIONS_HPP

#include <optional>
#include <string>
#include <string_view>

#include "satoris/masking_metrics.hpp"
#include "satoris/sdp_engine.hpp"
#include "satoris/subspace.hpp"

namespace satoris {

/// The explicit subspace-injection programs.
enum class ExplicitVariant {
  hresi,        ///< hard reconstruction, exact priors: X_ij = Y_ij on observed entries
  sresi,        ///< soft reconstruction, exact priors
  srrsi_delta,  ///< soft reconstruction, priors relaxed to Frobenius balls
  srrsi_reg,    ///< soft reconstruction, prior deviation penalized in the objective
  srwsi,        ///< soft reconstruction, prior singular values re-weighted (d >= 0)
};

inline std::string_view to_string(ExplicitVariant v) {
  switch (v) {
    case ExplicitVariant::hresi:
      return "hresi";
    case ExplicitVariant::sresi:
      return "sresi";
    case ExplicitVariant::srrsi_delta:
      return "srrsi_delta";
    case ExplicitVariant::srrsi_reg:
      return "srrsi_reg";
    case ExplicitVariant::srwsi:
      return "srwsi";
  }
  return "unknown";
}

inline std::optional<ExplicitVariant> parse_explicit_variant(std::string_view name) {
  for (auto v : {ExplicitVariant::hresi, ExplicitVariant::sresi, ExplicitVariant::srrsi_delta,
                 ExplicitVariant::srrsi_reg, ExplicitVariant::srwsi}) {
    if (name == to_string(v)) return v;
  }
  return std::nullopt;
}

/// Variant plus the hyperparameters that apply to it. Use the named
/// constructors; validate() rejects parameters attached to the wrong variant.
struct ExplicitMethod {
  ExplicitVariant variant = ExplicitVariant::sresi;
  Index k = 10;
  std::optional<double> alpha;   // srrsi_reg
  std::optional<double> beta;    // srrsi_reg
  std::optional<double> delta1;  // srrsi_delta; default 0.1 ||U S U^T||_F
  std::optional<double> delta2;  // srrsi_delta; default 0.1 ||V S V^T||_F

  static ExplicitMethod hresi(Index k = 10) { return {ExplicitVariant::hresi, k, {}, {}, {}, {}}; }
  static ExplicitMethod sresi(Index k = 10) { return {ExplicitVariant::sresi, k, {}, {}, {}, {}}; }
  static ExplicitMethod srwsi(Index k = 10) { return {ExplicitVariant::srwsi, k, {}, {}, {}, {}}; }
  static ExplicitMethod srrsi_reg(Index k = 10, double alpha = 1.0, double beta = 1.0) {
    return {ExplicitVariant::srrsi_reg, k, alpha, beta, {}, {}};
  }
  static ExplicitMethod srrsi_delta(Index k = 10, std::optional<double> delta1 = {},
                                    std::optional<double> delta2 = {}) {
    return {ExplicitVariant::srrsi_delta, k, {}, {}, delta1, delta2};
  }

  void validate() const {
    if (k < 1) throw ArgumentError("ExplicitMethod: k must be >= 1");
    const bool reg = variant == ExplicitVariant::srrsi_reg;
    const bool ball = variant == ExplicitVariant::srrsi_delta;
    if (!reg && (alpha || beta)) throw ArgumentError("ExplicitMethod: alpha/beta only apply to srrsi_reg");
    if (!ball && (delta1 || delta2)) {
      throw ArgumentError("ExplicitMethod: delta1/delta2 only apply to srrsi_delta");
    }
    for (auto v : {alpha, beta, delta1, delta2}) {
      if (v && !(*v >= 0.0)) throw ArgumentError("ExplicitMethod: weights and radii must be >= 0");
    }
  }
};

struct ImputeOptions {
  SolverOptions solver;
  /// Clip imputed values at zero (traffic densities are nonnegative).
  bool clip_negative = false;
  /// Re-solve an infeasible HRESI instance as SRESI.
  bool hresi_fallback = true;
};

struct ExplicitResult {
  Matrix imputed;
  SdpSolution solution;
  ExplicitVariant solved_as = ExplicitVariant::sresi;
  bool fell_back = false;
};

/// SdpProblem for one variant: X is the target-sized decision variable,
/// Y the zero-filled observations, priors from `prior`.
inline SdpProblem build_explicit_problem(const Matrix& y, const ObservationMask& mask,
                                         const SubspacePrior& prior, const ExplicitMethod& method) {
  method.validate();
  require_mask_shape(y, mask, "impute_explicit");
  require_finite(y, "impute_explicit");
  if (prior.A.rows() != y.rows() || prior.B.rows() != y.cols()) {
    throw DimensionError("impute_explicit: prior Gram blocks " + shape_string(prior.A) + " / " +
                         shape_string(prior.B) + " do not match target " + shape_string(y));
  }
  if (prior.rank() != method.k) {
    throw ArgumentError("impute_explicit: prior rank " + std::to_string(prior.rank()) +
                        " differs from method k " + std::to_string(method.k));
  }

  SdpProblem p;
  p.rows = y.rows();
  p.cols = y.cols();
  p.data.target = apply_mask(y, mask);
  p.data.mask = mask.bits();
  p.data.kind = method.variant == ExplicitVariant::hresi ? DataFit::observed_equality
                                                         : DataFit::masked_residual;
  p.data.weight = 1.0;

  p.a.reference = prior.A;
  p.b.reference = prior.B;
  switch (method.variant) {
    case ExplicitVariant::hresi:
    case ExplicitVariant::sresi:
      p.a.kind = p.b.kind = GramFit::fixed;
      break;
    case ExplicitVariant::srrsi_delta:
      p.a.kind = p.b.kind = GramFit::ball;
      p.a.radius = method.delta1.value_or(0.1 * prior.A.norm());
      p.b.radius = method.delta2.value_or(0.1 * prior.B.norm());
      break;
    case ExplicitVariant::srrsi_reg:
      p.a.kind = p.b.kind = GramFit::regularized;
      p.a.weight = method.alpha.value_or(1.0);
      p.b.weight = method.beta.value_or(1.0);
      break;
    case ExplicitVariant::srwsi:
      p.weighted = WeightedSubspace{prior.svd.U, prior.svd.V, prior.svd.sigma};
      break;
  }
  return p;
}

/// Completes `y` from the solution of the chosen explicit program: observed
/// entries are copied from `y`, missing ones from the optimizer X*.
inline ExplicitResult impute_explicit_detailed(const Matrix& y, const ObservationMask& mask,
                                               const SubspacePrior& prior, const ExplicitMethod& method,
                                               const ImputeOptions& options = {}) {
  ExplicitResult out;
  out.solved_as = method.variant;
  out.solution = solve(build_explicit_problem(y, mask, prior, method), options.solver);
  if (out.solution.status == SolveStatus::infeasible) {
    if (method.variant != ExplicitVariant::hresi || !options.hresi_fallback) {
      throw SolverError(std::string(to_string(method.variant)) + ": solver reported infeasible after " +
                        std::to_string(out.solution.iterations) + " iterations (primal residual " +
                        std::to_string(out.solution.primal_residual) + ")");
    }
    out.fell_back = true;
    out.solved_as = ExplicitVariant::sresi;
    out.solution = solve(build_explicit_problem(y, mask, prior, ExplicitMethod::sresi(method.k)),
                         options.solver);
  }
  out.imputed = merge_observed(y, out.solution.X, mask);
  if (options.clip_negative) out.imputed = out.imputed.cwiseMax(0.0);
  if (!out.imputed.allFinite()) throw SolverError("impute_explicit: non-finite output");
  return out;
}

inline Matrix impute_explicit(const Matrix& y, const ObservationMask& mask, const SubspacePrior& prior,
                              const ExplicitMethod& method, const ImputeOptions& options = {}) {
  return impute_explicit_detailed(y, mask, prior, method, options).imputed;
}

/// Nuclear-norm instance: X pinned to x0, A and B free, objective
/// (tr A + tr B) / 2.
inline SdpProblem nuclear_norm_problem(const Matrix& x0) {
  SdpProblem p;
  p.rows = x0.rows();
  p.cols = x0.cols();
  p.data.kind = DataFit::pinned;
  p.data.target = x0;
  p.a.trace_weight = 0.5;
  p.b.trace_weight = 0.5;
  return p;
}

/// ||x0||_* through its semidefinite characterization.
inline double nuclear_norm_sdp(const Matrix& x0, const SolverOptions& options = {}) {
  require_nonempty(x0, "nuclear_norm_sdp");
  require_finite(x0, "nuclear_norm_sdp");
  const SdpSolution s = solve(nuclear_norm_problem(x0), options);
  if (s.status == SolveStatus::infeasible) throw SolverError("nuclear_norm_sdp: solver reported infeasible");
  return s.objective;
}

/// Closed-form value of the factored characterization
/// min (||L||_F^2 + ||R||_F^2) / 2 s.t. X = L R^T at L = U sqrt(S), R = V sqrt(S).
inline double factorization_norm_oracle(const Matrix& x0, Index k) {
  require_nonempty(x0, "factorization_norm_oracle");
  const Index full = std::min(x0.rows(), x0.cols());
  if (k < 1 || k > full) throw ArgumentError("factorization_norm_oracle: k outside [1, min(rows, cols)]");
  const SvdResult svd = truncated_svd(x0, full);
  if (k < numerical_rank(svd.sigma)) {
    throw ArgumentError("factorization_norm_oracle: k below the numerical rank of X");
  }
  const Vector root = svd.sigma.head(k).cwiseSqrt();
  const Matrix left = svd.U.leftCols(k) * root.asDiagonal();
  const Matrix right = svd.V.leftCols(k) * root.asDiagonal();
  return 0.5 * (left.squaredNorm() + right.squaredNorm());
}

}  // namespace satoris

#endif  // SATORIS_FORMULATIONS_HPP
