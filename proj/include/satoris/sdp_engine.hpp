#ifndef SATORIS_SDP_ENGINE_HPP
#define SATORIS_SDP_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "satoris/matrix_core.hpp"
#include "satoris/psd_projection.hpp"
#include "satoris/subspace.hpp"

namespace satoris {

// Problems handled here share one shape:
//
//   minimize   f_X(X) + f_A(A) + f_B(B)
//   subject to [[A, X], [X^T, B]] PSD, plus per-block constraints,
//
// where each per-block term is "simple" (closed-form prox). The solver is
// ADMM on the splitting W = Z with W carrying the block terms and Z the PSD
// cone.

/// How the X block enters the problem.
enum class DataFit {
  free,               ///< no term, no constraint
  pinned,             ///< X == target everywhere
  observed_equality,  ///< X_ij == target_ij where mask_ij == 1
  masked_residual,    ///< weight * ||mask o (X - target)||_F (not squared)
};

struct DataTerm {
  DataFit kind = DataFit::free;
  Matrix target;
  Matrix mask;  ///< 0/1, used by observed_equality and masked_residual
  double weight = 1.0;
};

/// How a Gram block (A or B) enters the problem.
enum class GramFit {
  free,         ///< unconstrained apart from the block-PSD constraint
  fixed,        ///< == reference
  ball,         ///< ||G - reference||_F <= radius
  regularized,  ///< weight * ||G - reference||_F (not squared)
};

struct GramTerm {
  GramFit kind = GramFit::free;
  Matrix reference;
  double radius = 0.0;
  double weight = 0.0;
  /// Linear term trace_weight * tr(G); 1/2 on both blocks gives ||X||_*.
  double trace_weight = 0.0;
};

/// A = U diag(d) U^T, B = V diag(d) V^T with d >= 0 as the only Gram
/// unknowns. When present, the GramTerms are ignored.
struct WeightedSubspace {
  Matrix U;
  Matrix V;
  Vector initial_weights;
};

struct SdpProblem {
  Index rows = 0;
  Index cols = 0;
  DataTerm data;
  GramTerm a;
  GramTerm b;
  std::optional<WeightedSubspace> weighted;

  Index block_dim() const { return rows + cols; }

  void validate() const {
    if (rows < 1 || cols < 1) throw DimensionError("SdpProblem: X shape must be positive");
    if (data.kind != DataFit::free) {
      if (data.target.rows() != rows || data.target.cols() != cols) {
        throw DimensionError("SdpProblem: data target is " + shape_string(data.target));
      }
      require_finite(data.target, "SdpProblem data target");
    }
    if (data.kind == DataFit::observed_equality || data.kind == DataFit::masked_residual) {
      require_same_shape(data.target, data.mask, "SdpProblem data mask");
    }
    if (data.weight < 0.0) throw ArgumentError("SdpProblem: data weight must be >= 0");
    if (weighted) {
      const auto& w = *weighted;
      if (w.U.rows() != rows || w.V.rows() != cols || w.U.cols() != w.V.cols() ||
          w.initial_weights.size() != w.U.cols()) {
        throw DimensionError("SdpProblem: weighted subspace factors are not conformable");
      }
      return;
    }
    check_gram(a, rows, "A");
    check_gram(b, cols, "B");
  }

 private:
  static void check_gram(const GramTerm& g, Index n, std::string_view name) {
    if (g.kind != GramFit::free && (g.reference.rows() != n || g.reference.cols() != n)) {
      throw DimensionError("SdpProblem: reference for " + std::string(name) + " must be " +
                           std::to_string(n) + "x" + std::to_string(n));
    }
    if (g.radius < 0.0 || g.weight < 0.0 || g.trace_weight < 0.0) {
      throw ArgumentError("SdpProblem: radius and weights of " + std::string(name) + " must be >= 0");
    }
  }
};

/// Per-iteration snapshot passed to SolverOptions::monitor.
struct IterationInfo {
  int iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double primal_tolerance = 0.0;
  double dual_tolerance = 0.0;
  double rho = 0.0;
};

struct SolverOptions {
  double tolerance = 1e-6;  ///< relative, scaled by 1 + iterate/dual norms
  int max_iter = 5000;
  double rho = 1.0;
  bool adaptive_rho = true;
  double adapt_ratio = 10.0;
  int adapt_interval = 10;
  double relaxation = 1.6;
  int infeasible_window = 500;
  double stagnation_level = 1e-2;
  std::function<void(const IterationInfo&)> monitor;
};

enum class SolveStatus { converged, max_iter, infeasible };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iter:
      return "max_iter";
    case SolveStatus::infeasible:
      return "infeasible";
  }
  return "unknown";
}

struct SdpSolution {
  Matrix X;
  Matrix A;
  Matrix B;
  std::optional<Vector> d;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double primal_tolerance = 0.0;
  double dual_tolerance = 0.0;
  int iterations = 0;
  double rho = 1.0;
  SolveStatus status = SolveStatus::max_iter;
};

inline Matrix assemble_block(const Matrix& a, const Matrix& x, const Matrix& b) {
  const Index m = a.rows();
  const Index n = b.rows();
  Matrix w(m + n, m + n);
  w.topLeftCorner(m, m) = a;
  w.topRightCorner(m, n) = x;
  w.bottomLeftCorner(n, m) = x.transpose();
  w.bottomRightCorner(n, n) = b;
  return w;
}

/// Objective of `problem` at (X, A, B); constraint terms contribute nothing.
inline double objective_value(const SdpProblem& problem, const Matrix& x, const Matrix& a,
                              const Matrix& b) {
  double f = 0.0;
  if (problem.data.kind == DataFit::masked_residual) {
    f += problem.data.weight * problem.data.mask.cwiseProduct(x - problem.data.target).norm();
  }
  if (!problem.weighted) {
    auto gram = [](const GramTerm& g, const Matrix& m) {
      double v = g.trace_weight * m.trace();
      if (g.kind == GramFit::regularized) v += g.weight * (m - g.reference).norm();
      return v;
    };
    f += gram(problem.a, a) + gram(problem.b, b);
  }
  return f;
}

namespace detail {

inline Matrix shrink_toward(const Matrix& point, const Matrix& center, double threshold) {
  const Matrix diff = point - center;
  const double len = diff.norm();
  if (len <= threshold) return center;
  return center + (1.0 - threshold / len) * diff;
}

/// argmin_X g(X) + rho ||X - v||^2 (the X block appears twice in W).
inline Matrix prox_data(const DataTerm& t, const Matrix& v, double rho) {
  switch (t.kind) {
    case DataFit::free:
      return v;
    case DataFit::pinned:
      return t.target;
    case DataFit::observed_equality:
      return t.mask.select(t.target, v);
    case DataFit::masked_residual: {
      const Matrix residual = t.mask.cwiseProduct(v - t.target);
      const double len = residual.norm();
      const double threshold = t.weight / (2.0 * rho);
      const double keep = len <= threshold ? 0.0 : 1.0 - threshold / len;
      return t.mask.select(t.target + keep * residual, v);
    }
  }
  return v;
}

/// argmin_G h(G) + rho/2 ||G - v||^2.
inline Matrix prox_gram(const GramTerm& t, const Matrix& v, double rho) {
  Matrix shifted = v;
  if (t.trace_weight != 0.0) shifted.diagonal().array() -= t.trace_weight / rho;
  switch (t.kind) {
    case GramFit::free:
      return shifted;
    case GramFit::fixed:
      return t.reference;
    case GramFit::ball: {
      const Matrix diff = shifted - t.reference;
      const double len = diff.norm();
      if (len <= t.radius) return shifted;
      return t.reference + (t.radius / len) * diff;
    }
    case GramFit::regularized:
      return shrink_toward(shifted, t.reference, t.weight / rho);
  }
  return shifted;
}

inline Matrix initial_gram(const GramTerm& t, Index n, double scale) {
  if (t.kind != GramFit::free) return t.reference;
  return Matrix::Identity(n, n) * (scale / static_cast<double>(n));
}

/// Block-separable prox of the non-cone part; returns W and fills d.
struct BlockProx {
  const SdpProblem& problem;

  Matrix operator()(const Matrix& v, double rho, Vector* d) const {
    const Index m = problem.rows;
    const Index n = problem.cols;
    const Matrix vx = 0.5 * (v.topRightCorner(m, n) + v.bottomLeftCorner(n, m).transpose());
    const Matrix va = symmetrize(v.topLeftCorner(m, m));
    const Matrix vb = symmetrize(v.bottomRightCorner(n, n));
    const Matrix x = prox_data(problem.data, vx, rho);
    if (problem.weighted) {
      const auto& ws = *problem.weighted;
      const Vector from_a = (ws.U.transpose() * va * ws.U).diagonal();
      const Vector from_b = (ws.V.transpose() * vb * ws.V).diagonal();
      *d = (0.5 * (from_a + from_b)).cwiseMax(0.0);
      return assemble_block(ws.U * d->asDiagonal() * ws.U.transpose(), x,
                            ws.V * d->asDiagonal() * ws.V.transpose());
    }
    return assemble_block(prox_gram(problem.a, va, rho), x, prox_gram(problem.b, vb, rho));
  }
};

/// Orthonormal basis of the column space of a symmetric matrix.
inline Matrix symmetric_range(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym));
  if (es.info() != Eigen::Success) throw NumericError("symmetric_range: no convergence");
  const Vector& values = es.eigenvalues();
  const double cut = 1e-10 * std::max(values.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Index> keep;
  for (Index i = values.size() - 1; i >= 0; --i)
    if (std::abs(values(i)) > cut) keep.push_back(i);
  Matrix basis(sym.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) basis.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]);
  return basis;
}

inline Matrix column_range(const Matrix& m) {
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  const Index r = qr.rank();
  return (qr.householderQ() * Matrix::Identity(m.rows(), m.cols())).leftCols(r);
}

/// Facial reduction. A pinned Gram block G forces every feasible block
/// matrix into blkdiag(range G, *), and the weighted form forces it into
/// blkdiag(range U, range V). Returns the face basis, or nothing when the
/// face is the whole cone.
inline std::optional<Matrix> face_basis(const SdpProblem& p) {
  Matrix left;
  Matrix right;
  if (p.weighted) {
    left = column_range(p.weighted->U);
    right = column_range(p.weighted->V);
  } else {
    left = p.a.kind == GramFit::fixed ? symmetric_range(p.a.reference) : Matrix::Identity(p.rows, p.rows);
    right = p.b.kind == GramFit::fixed ? symmetric_range(p.b.reference) : Matrix::Identity(p.cols, p.cols);
  }
  if (left.cols() == p.rows && right.cols() == p.cols) return std::nullopt;
  Matrix q = Matrix::Zero(p.block_dim(), left.cols() + right.cols());
  q.topLeftCorner(p.rows, left.cols()) = left;
  q.bottomRightCorner(p.cols, right.cols()) = right;
  return q;
}

/// Projection onto the PSD cone, or onto the face {Q S Q^T : S PSD}.
class ConeProjector {
 public:
  ConeProjector(Index dim, std::optional<Matrix> face)
      : face_(std::move(face)), inner_(face_ ? face_->cols() : dim) {}

  Matrix project(const Matrix& m) {
    if (!face_) return inner_.project(m);
    const Matrix& q = *face_;
    const Matrix reduced = q.transpose() * m * q;
    return q * inner_.project(symmetrize(reduced)) * q.transpose();
  }

  bool reduced() const { return face_.has_value(); }

 private:
  std::optional<Matrix> face_;
  PsdProjector inner_;
};

/// Largest data norm in the problem (targets, references, initial weights).
inline double data_scale(const SdpProblem& p) {
  double s = 0.0;
  if (p.data.kind != DataFit::free) s = std::max(s, p.data.target.norm());
  if (p.weighted) {
    s = std::max(s, p.weighted->initial_weights.norm());
  } else {
    for (const GramTerm* g : {&p.a, &p.b}) {
      if (g->kind != GramFit::free) s = std::max(s, g->reference.norm());
    }
  }
  return s;
}

/// Every objective term is positively homogeneous of degree one and the
/// constraint set is a cone, so dividing all data by `scale` divides the
/// minimizer by `scale` too. Zero-radius balls become pinned blocks.
inline SdpProblem normalized(SdpProblem p, double scale) {
  p.data.target /= scale;
  for (GramTerm* g : {&p.a, &p.b}) {
    if (g->kind == GramFit::ball && g->radius == 0.0) g->kind = GramFit::fixed;
    g->reference /= scale;
    g->radius /= scale;
  }
  if (p.weighted) p.weighted->initial_weights /= scale;
  return p;
}


/// Cone iterate, scaled dual and penalty of an ADMM run.
struct AdmmState {
  Matrix z;
  Matrix dual;
  double rho = 1.0;
};

/// ADMM iterations. Per iteration: prox of the block terms at Z - L,
/// over-relaxation, PSD projection, scaled dual update L += W - Z.
/// Termination on ||W - Z||_F <= tol (1 + max(||W||, ||Z||)) and
/// rho ||Z - Z_prev||_F <= tol (1 + rho ||L||). The returned point is the W
/// iterate, which satisfies every block constraint exactly and the PSD
/// constraint up to the primal residual.
inline SdpSolution run_admm(const SdpProblem& problem, const SolverOptions& options, std::optional<Matrix> face,
                            const AdmmState* warm, AdmmState* final_state) {
  const Index m = problem.rows;
  const Index n = problem.cols;
  const Index dim = problem.block_dim();

  // Warm start: observed data with zeros elsewhere; Gram blocks from priors
  // or scaled identities with trace ||Y||_F.
  Matrix x0 = Matrix::Zero(m, n);
  double scale = 1.0;
  if (problem.data.kind == DataFit::pinned) {
    x0 = problem.data.target;
  } else if (problem.data.kind != DataFit::free) {
    x0 = problem.data.mask.cwiseProduct(problem.data.target);
  }
  scale = std::max(x0.norm(), 1e-12);
  std::optional<Vector> d;
  Matrix w;
  if (problem.weighted) {
    const auto& ws = *problem.weighted;
    d = ws.initial_weights.cwiseMax(0.0);
    w = assemble_block(ws.U * d->asDiagonal() * ws.U.transpose(), x0,
                       ws.V * d->asDiagonal() * ws.V.transpose());
  } else {
    w = assemble_block(initial_gram(problem.a, m, scale), x0, initial_gram(problem.b, n, scale));
  }

  const BlockProx prox{problem};
  ConeProjector projector(dim, std::move(face));
  Matrix z = warm ? warm->z : projector.project(w);
  Matrix dual = warm ? warm->dual : Matrix::Zero(dim, dim);
  double rho = warm ? warm->rho : options.rho;
  const double alpha = options.relaxation;

  SdpSolution best;
  double best_merit = std::numeric_limits<double>::infinity();
  Vector current_d = d.value_or(Vector());

  int stagnant = 0;
  double dual_norm_at_stagnation_start = 0.0;
  double w_norm_at_stagnation_start = 0.0;

  auto record = [&](const Matrix& wi, int iter, double rp, double rd, double ep, double ed,
                    SolveStatus status) {
    best.X = wi.topRightCorner(m, n);
    best.A = wi.topLeftCorner(m, m);
    best.B = wi.bottomRightCorner(n, n);
    if (problem.weighted) best.d = current_d;
    best.primal_residual = rp;
    best.dual_residual = rd;
    best.primal_tolerance = ep;
    best.dual_tolerance = ed;
    best.iterations = iter;
    best.rho = rho;
    best.status = status;
  };

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    w = prox(z - dual, rho, &current_d);
    const Matrix relaxed = alpha * w + (1.0 - alpha) * z;
    const Matrix z_prev = z;
    z = projector.project(relaxed + dual);
    dual += relaxed - z;

    const double r_pri = (w - z).norm();
    const double r_dual = rho * (z - z_prev).norm();
    const double w_norm = w.norm();
    const double eps_pri = options.tolerance * (1.0 + std::max(w_norm, z.norm()));
    const double dual_norm = rho * dual.norm();
    const double eps_dual = options.tolerance * (1.0 + dual_norm);

    if (options.monitor) options.monitor({iter, r_pri, r_dual, eps_pri, eps_dual, rho});
    const double merit = std::max(r_pri / eps_pri, r_dual / eps_dual);
    if (merit <= 1.0) {
      record(w, iter, r_pri, r_dual, eps_pri, eps_dual, SolveStatus::converged);
      best.objective = objective_value(problem, best.X, best.A, best.B);
      if (final_state) *final_state = {z, dual, rho};
      return best;
    }
    if (merit < best_merit) {
      best_merit = merit;
      record(w, iter, r_pri, r_dual, eps_pri, eps_dual, SolveStatus::max_iter);
    }

    // Infeasibility: relative primal residual stuck above the stagnation
    // level for a full window while the unscaled dual keeps growing.
    const double rel_pri = r_pri / (1.0 + std::max(w_norm, z.norm()));
    if (rel_pri > options.stagnation_level) {
      if (stagnant == 0) {
        dual_norm_at_stagnation_start = dual_norm;
        w_norm_at_stagnation_start = w_norm;
      }
      ++stagnant;
      if (stagnant >= options.infeasible_window &&
          (dual_norm > 2.0 * dual_norm_at_stagnation_start + 1e-12 ||
           w_norm > 2.0 * w_norm_at_stagnation_start + 1e-12)) {
        record(w, iter, r_pri, r_dual, eps_pri, eps_dual, SolveStatus::infeasible);
        best.objective = objective_value(problem, best.X, best.A, best.B);
        return best;
      }
    } else {
      stagnant = 0;
    }

    if (options.adaptive_rho && iter % options.adapt_interval == 0) {
      const double p = r_pri / eps_pri;
      const double q = r_dual / eps_dual;
      double factor = 1.0;
      if (p > options.adapt_ratio * q) {
        factor = 2.0;
      } else if (q > options.adapt_ratio * p) {
        factor = 0.5;
      }
      const double next = std::clamp(rho * factor, 1e-6, 1e6);
      if (next != rho) {
        dual *= rho / next;
        rho = next;
      }
    }
  }
  best.objective = objective_value(problem, best.X, best.A, best.B);
  if (final_state) *final_state = {z, dual, rho};
  return best;
}

/// Copy of `p` with every ball or regularized Gram block pinned to its
/// reference, or nothing when no block is relaxed.
inline std::optional<SdpProblem> pinned_relaxation(const SdpProblem& p) {
  if (p.weighted) return std::nullopt;
  SdpProblem out = p;
  bool changed = false;
  for (GramTerm* g : {&out.a, &out.b}) {
    if (g->kind == GramFit::ball || g->kind == GramFit::regularized) {
      g->kind = GramFit::fixed;
      changed = true;
    }
  }
  if (!changed) return std::nullopt;
  return out;
}

/// Objective at the blocks of a PSD matrix `z`, or nothing when `z` breaks
/// one of the hard data or ball constraints.
inline std::optional<double> cone_point_objective(const SdpProblem& p, const Matrix& z) {
  const Index m = p.rows;
  const Index n = p.cols;
  if (p.data.kind == DataFit::pinned || p.data.kind == DataFit::observed_equality) return std::nullopt;
  const Matrix a = z.topLeftCorner(m, m);
  const Matrix b = z.bottomRightCorner(n, n);
  for (auto [g, value] : {std::pair{&p.a, &a}, std::pair{&p.b, &b}}) {
    if (g->kind == GramFit::fixed) return std::nullopt;
    if (g->kind == GramFit::ball && (*value - g->reference).norm() > g->radius) return std::nullopt;
  }
  return objective_value(p, z.topRightCorner(m, n), a, b);
}

/// Relaxed Gram blocks leave the full cone without a strictly feasible
/// point whenever the optimum sits at (or within O(1/weight) of) the
/// references, and plain ADMM then creeps. The pinned problem is solved on
/// its face first and the full run starts from that iterate. If the full run
/// does not converge, the pinned solution is kept unless the final PSD
/// iterate is feasible with a lower objective.
inline SdpSolution solve_normalized(const SdpProblem& problem, const SolverOptions& options) {
  if (const auto pinned = pinned_relaxation(problem)) {
    AdmmState state;
    SdpSolution first = run_admm(*pinned, options, face_basis(*pinned), nullptr, &state);
    if (first.status == SolveStatus::converged) {
      AdmmState end;
      SdpSolution s = run_admm(problem, options, face_basis(problem), &state, &end);
      s.iterations += first.iterations;
      if (s.status != SolveStatus::max_iter) return s;
      const std::optional<double> full = cone_point_objective(problem, end.z);
      const double kept = objective_value(problem, first.X, first.A, first.B);
      if (full && *full < kept) return s;
      first.objective = kept;
      first.iterations = s.iterations;
      first.status = SolveStatus::max_iter;
      return first;
    }
  }
  return run_admm(problem, options, face_basis(problem), nullptr, nullptr);
}

}  // namespace detail

inline SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {}) {
  problem.validate();
  if (options.tolerance <= 0.0 || options.max_iter < 1 || options.rho <= 0.0) {
    throw ArgumentError("solve: tolerance, max_iter and rho must be positive");
  }
  const double raw = detail::data_scale(problem);
  const double scale = raw > 0.0 ? raw : 1.0;
  SdpSolution s = detail::solve_normalized(detail::normalized(problem, scale), options);
  s.X *= scale;
  s.A *= scale;
  s.B *= scale;
  if (s.d) *s.d *= scale;
  s.objective = objective_value(problem, s.X, s.A, s.B);
  return s;
}

/// Feasibility report recomputed from the returned point only. Every entry
/// is a relative violation (scaled by 1 + the natural data norm).
struct KktDiagnostics {
  double min_eigenvalue = 0.0;
  double psd_violation = 0.0;
  double equality_violation = 0.0;
  double ball_violation = 0.0;
  double nonnegativity_violation = 0.0;
  double structure_violation = 0.0;
  double max_violation = 0.0;
};

inline KktDiagnostics verify_kkt(const SdpProblem& problem, const SdpSolution& solution) {
  KktDiagnostics k;
  const Matrix block = assemble_block(symmetrize(solution.A), solution.X, symmetrize(solution.B));
  k.min_eigenvalue = min_eigenvalue(block);
  k.psd_violation = std::max(0.0, -k.min_eigenvalue) / (1.0 + block.norm());

  const auto& data = problem.data;
  if (data.kind == DataFit::pinned) {
    k.equality_violation = (solution.X - data.target).cwiseAbs().maxCoeff() / (1.0 + data.target.norm());
  } else if (data.kind == DataFit::observed_equality) {
    k.equality_violation = data.mask.cwiseProduct(solution.X - data.target).cwiseAbs().maxCoeff() /
                           (1.0 + data.target.norm());
  }

  if (problem.weighted) {
    const auto& ws = *problem.weighted;
    const Vector d = solution.d.value_or(Vector::Zero(ws.U.cols()));
    k.nonnegativity_violation = std::max(0.0, -d.minCoeff()) / (1.0 + d.norm());
    const double sa = (solution.A - ws.U * d.asDiagonal() * ws.U.transpose()).norm();
    const double sb = (solution.B - ws.V * d.asDiagonal() * ws.V.transpose()).norm();
    k.structure_violation = std::max(sa, sb) / (1.0 + d.norm());
  } else {
    auto check = [&k](const GramTerm& g, const Matrix& value) {
      if (g.kind == GramFit::fixed) {
        k.equality_violation =
            std::max(k.equality_violation, (value - g.reference).norm() / (1.0 + g.reference.norm()));
      } else if (g.kind == GramFit::ball) {
        const double excess = (value - g.reference).norm() - g.radius;
        k.ball_violation = std::max(k.ball_violation, std::max(0.0, excess) / (1.0 + g.reference.norm()));
      }
    };
    check(problem.a, solution.A);
    check(problem.b, solution.B);
  }
  k.max_violation = std::max({k.psd_violation, k.equality_violation, k.ball_violation,
                              k.nonnegativity_violation, k.structure_violation});
  return k;
}

}  // namespace satoris

#endif  // SATORIS_SDP_ENGINE_HPP
