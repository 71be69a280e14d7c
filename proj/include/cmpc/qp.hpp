#pragma once

// Convex QP solver for
//
//   min  1/2 z^T H z + f^T z
//   s.t. A_eq z = b_eq,  A_in z <= b_in,  lb <= z <= ub
//
// Operator splitting (ADMM) on the stacked form l <= A z <= u with Ruiz
// equilibration, over-relaxation, adaptive penalty and a direct LDL^T
// factorization of the reduced KKT matrix H + sigma I + A^T diag(rho) A.
// Once the iterates settle, an active-set polish solves the equality-
// constrained KKT system to reach tight tolerances.
//
// The public problem type is dense; the factorizations run on sparse copies
// since CMPC matrices are mostly structural zeros.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cmpc/types.hpp"

namespace cmpc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class QpStatus { Optimal, MaxIterations, PrimalInfeasible };

inline const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::Optimal:
      return "optimal";
    case QpStatus::MaxIterations:
      return "max_iterations";
    case QpStatus::PrimalInfeasible:
      return "primal_infeasible";
  }
  return "unknown";
}

struct QpProblem {
  Mat H;
  Vec f;
  Mat A_eq;
  Vec b_eq;
  Mat A_in;
  Vec b_in;
  Vec lb;
  Vec ub;

  /// Unconstrained problem of dimension f.size(); add rows as needed.
  static QpProblem make(Mat H, Vec f) {
    QpProblem p;
    const Index d = f.size();
    p.H = std::move(H);
    p.f = std::move(f);
    p.A_eq = Mat(0, d);
    p.b_eq = Vec(0);
    p.A_in = Mat(0, d);
    p.b_in = Vec(0);
    p.lb = Vec::Constant(d, -kInf);
    p.ub = Vec::Constant(d, kInf);
    return p;
  }

  [[nodiscard]] Index dim() const noexcept { return f.size(); }

  [[nodiscard]] double objective(const Vec& z) const { return 0.5 * z.dot(H * z) + f.dot(z); }

  void validate() const {
    const Index d = dim();
    detail::require_shape(H, d, d, "QpProblem.H");
    if (A_eq.rows() > 0 || A_eq.cols() > 0) detail::require_shape(A_eq, b_eq.size(), d, "QpProblem.A_eq");
    if (A_in.rows() > 0 || A_in.cols() > 0) detail::require_shape(A_in, b_in.size(), d, "QpProblem.A_in");
    if (A_eq.rows() != b_eq.size()) throw DimensionError("QpProblem: A_eq/b_eq row mismatch");
    if (A_in.rows() != b_in.size()) throw DimensionError("QpProblem: A_in/b_in row mismatch");
    detail::require_size(lb, d, "QpProblem.lb");
    detail::require_size(ub, d, "QpProblem.ub");
    if (!H.allFinite() || !f.allFinite() || !A_eq.allFinite() || !A_in.allFinite() || !b_eq.allFinite() ||
        !b_in.allFinite()) {
      throw ValidationError("QpProblem: non-finite data");
    }
    for (Index i = 0; i < d; ++i) {
      if (std::isnan(lb(i)) || std::isnan(ub(i)) || lb(i) > ub(i)) {
        throw ValidationError("QpProblem: lb > ub at index " + std::to_string(i));
      }
    }
  }
};

/// Multipliers with the convention H z + f + A_eq^T eq + A_in^T in + bound = 0,
/// in >= 0, bound > 0 on an active upper bound and < 0 on an active lower one.
struct QpDuals {
  Vec eq;
  Vec in;
  Vec bound;
};

struct QpSolution {
  Vec z;
  QpDuals duals;
  QpStatus status = QpStatus::MaxIterations;
  int iterations = 0;
  double r_pri = kInf;
  double r_dual = kInf;
  double objective = 0.0;
  bool polished = false;
};

struct QpWarmStart {
  Vec z;
  std::optional<QpDuals> duals;
};

struct QpSettings {
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  double eps_pri = 1e-8;
  double eps_dual = 1e-8;
  int max_iter = 20000;
  int check_interval = 10;
  bool adaptive_rho = true;
  double adaptive_rho_ratio = 10.0;  // residual imbalance that triggers a refactorization
  int scaling_iter = 10;
  bool polish = true;
  double polish_trigger = 1e-3;
  double eps_pinf = 1e-7;
  int infeasibility_window = 1000;
};

struct KktResiduals {
  double r_pri = 0.0;            // max constraint violation
  double r_dual = 0.0;           // stationarity, plus any multiplier sign violation
  double complementarity = 0.0;  // max |multiplier * slack|
};

namespace detail {

template <typename HMat, typename AMat>
KktResiduals kkt_residuals_impl(const HMat& H, const Vec& f, const AMat& A_eq, const Vec& b_eq, const AMat& A_in,
                                const Vec& b_in, const Vec& lb, const Vec& ub, const Vec& z,
                                const QpDuals& duals) {
  KktResiduals r;
  Vec grad = H * z + f;
  if (A_eq.rows() > 0) {
    const Vec res = A_eq * z - b_eq;
    r.r_pri = std::max(r.r_pri, res.cwiseAbs().maxCoeff());
    grad += A_eq.transpose() * duals.eq;
  }
  if (A_in.rows() > 0) {
    const Vec slack = b_in - A_in * z;  // >= 0 when feasible
    r.r_pri = std::max(r.r_pri, (-slack).maxCoeff());
    grad += A_in.transpose() * duals.in;
    for (Index i = 0; i < slack.size(); ++i) {
      r.complementarity = std::max(r.complementarity, std::abs(duals.in(i) * slack(i)));
      r.r_dual = std::max(r.r_dual, -duals.in(i));
    }
  }
  grad += duals.bound;
  for (Index i = 0; i < z.size(); ++i) {
    r.r_pri = std::max({r.r_pri, lb(i) - z(i), z(i) - ub(i)});
    const double nu = duals.bound(i);
    if (nu > 0.0) {
      if (std::isfinite(ub(i))) {
        r.complementarity = std::max(r.complementarity, std::abs(nu * (ub(i) - z(i))));
      } else {
        r.r_dual = std::max(r.r_dual, nu);
      }
    } else if (nu < 0.0) {
      if (std::isfinite(lb(i))) {
        r.complementarity = std::max(r.complementarity, std::abs(nu * (z(i) - lb(i))));
      } else {
        r.r_dual = std::max(r.r_dual, -nu);
      }
    }
  }
  r.r_dual = std::max(r.r_dual, grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0);
  return r;
}

}  // namespace detail

inline KktResiduals kkt_residuals(const QpProblem& problem, const Vec& z, const QpDuals& duals) {
  detail::require_size(z, problem.dim(), "kkt_residuals: z");
  detail::require_size(duals.eq, problem.b_eq.size(), "kkt_residuals: eq duals");
  detail::require_size(duals.in, problem.b_in.size(), "kkt_residuals: in duals");
  detail::require_size(duals.bound, problem.dim(), "kkt_residuals: bound duals");
  const Mat Hs = 0.5 * (problem.H + problem.H.transpose());
  return detail::kkt_residuals_impl(Hs, problem.f, problem.A_eq, problem.b_eq, problem.A_in, problem.b_in,
                                    problem.lb, problem.ub, z, duals);
}

inline KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& solution) {
  return kkt_residuals(problem, solution.z, solution.duals);
}

class QpSolver {
 public:
  using SpMat = Eigen::SparseMatrix<double>;

  QpSolver() = default;
  explicit QpSolver(QpSettings settings) : settings_(settings) {}

  [[nodiscard]] const QpSettings& settings() const noexcept { return settings_; }
  QpSettings& settings() noexcept { return settings_; }

  QpSolution solve(const QpProblem& problem, const std::optional<QpWarmStart>& warm = std::nullopt) {
    problem.validate();
    setup(problem);
    initialize(warm);

    QpSolution best;
    best.z = Vec::Zero(d_);
    int iter = 0;

    // A warm start carrying duals usually has the right active set already.
    if (settings_.polish && warm && warm->duals) {
      if (auto polished = polish(); polished) {
        polished->iterations = 0;
        return *polished;
      }
    }

    std::vector<char> last_active;
    Vec y_prev = y_;
    int pinf_hits = 0;
    for (iter = 1; iter <= settings_.max_iter; ++iter) {
      y_prev = y_;
      admm_step();

      if (iter % settings_.check_interval != 0 && iter != settings_.max_iter) continue;

      const Residuals res = scaled_residuals();
      QpSolution candidate = unscaled_solution(x_, y_);
      candidate.iterations = iter;
      if (candidate.r_pri <= settings_.eps_pri && candidate.r_dual <= settings_.eps_dual) {
        candidate.status = QpStatus::Optimal;
        return candidate;
      }
      best = std::move(candidate);

      if (settings_.polish && res.prim <= settings_.polish_trigger && res.dual <= settings_.polish_trigger) {
        auto active = active_set();
        if (active != last_active) {
          last_active = std::move(active);
          if (auto polished = polish(); polished) {
            polished->iterations = iter;
            return *polished;
          }
        }
      }

      if (primal_infeasible(y_ - y_prev)) {
        // The dual iterates must keep diverging along the certificate.
        pinf_hits += settings_.check_interval;
        if (pinf_hits >= settings_.infeasibility_window) {
          best.status = QpStatus::PrimalInfeasible;
          best.iterations = iter;
          return best;
        }
      } else {
        pinf_hits = 0;
      }

      if (settings_.adaptive_rho) adapt_rho(res);
    }
    best.status = QpStatus::MaxIterations;
    best.iterations = settings_.max_iter;
    return best;
  }

 private:
  struct Residuals {
    double prim = 0.0;
    double dual = 0.0;
    double prim_norm = 1.0;
    double dual_norm = 1.0;
  };

  void setup(const QpProblem& p) {
    d_ = p.dim();
    m_eq_ = p.b_eq.size();
    m_in_ = p.b_in.size();
    bounded_.clear();
    for (Index i = 0; i < d_; ++i) {
      if (std::isfinite(p.lb(i)) || std::isfinite(p.ub(i))) bounded_.push_back(i);
    }
    m_ = m_eq_ + m_in_ + static_cast<Index>(bounded_.size());

    const SpMat H_raw = p.H.sparseView();
    H_ = 0.5 * (H_raw + SpMat(H_raw.transpose()));
    f_ = p.f;
    A_eq_ = p.A_eq.sparseView();
    A_in_ = p.A_in.sparseView();
    b_eq_ = p.b_eq;
    b_in_ = p.b_in;
    lb_ = p.lb;
    ub_ = p.ub;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(A_eq_.nonZeros() + A_in_.nonZeros()) + bounded_.size());
    for (Index c = 0; c < A_eq_.outerSize(); ++c) {
      for (SpMat::InnerIterator it(A_eq_, c); it; ++it) trip.emplace_back(it.row(), c, it.value());
    }
    for (Index c = 0; c < A_in_.outerSize(); ++c) {
      for (SpMat::InnerIterator it(A_in_, c); it; ++it) trip.emplace_back(m_eq_ + it.row(), c, it.value());
    }
    for (std::size_t k = 0; k < bounded_.size(); ++k) {
      trip.emplace_back(m_eq_ + m_in_ + static_cast<Index>(k), bounded_[k], 1.0);
    }
    A_.resize(m_, d_);
    A_.setFromTriplets(trip.begin(), trip.end());
    l_.resize(m_);
    u_.resize(m_);
    l_.head(m_eq_) = b_eq_;
    u_.head(m_eq_) = b_eq_;
    l_.segment(m_eq_, m_in_).setConstant(-kInf);
    u_.segment(m_eq_, m_in_) = b_in_;
    for (std::size_t k = 0; k < bounded_.size(); ++k) {
      l_(m_eq_ + m_in_ + static_cast<Index>(k)) = lb_(bounded_[k]);
      u_(m_eq_ + m_in_ + static_cast<Index>(k)) = ub_(bounded_[k]);
    }

    P_ = H_;
    q_ = f_;
    scale();

    rho_ = settings_.rho;
    rho_vec_.resize(m_);
    set_rho_vec();
    factor_pattern_ready_ = false;
    factorize();
  }

  // Ruiz equilibration of [P A^T; A 0] plus cost scaling.
  void scale() {
    D_ = Vec::Ones(d_);
    E_ = Vec::Ones(m_);
    c_ = 1.0;
    l_hat_ = l_;
    u_hat_ = u_;
    if (settings_.scaling_iter <= 0) return;
    auto clamp_norm = [](double v) { return (v < 1e-4) ? 1.0 : std::min(v, 1e4); };
    for (int it = 0; it < settings_.scaling_iter; ++it) {
      Vec col_norm = Vec::Zero(d_);
      Vec row_norm = Vec::Zero(m_);
      for (Index c = 0; c < P_.outerSize(); ++c) {
        for (SpMat::InnerIterator e(P_, c); e; ++e) col_norm(c) = std::max(col_norm(c), std::abs(e.value()));
      }
      for (Index c = 0; c < A_.outerSize(); ++c) {
        for (SpMat::InnerIterator e(A_, c); e; ++e) {
          col_norm(c) = std::max(col_norm(c), std::abs(e.value()));
          row_norm(e.row()) = std::max(row_norm(e.row()), std::abs(e.value()));
        }
      }
      Vec dcol(d_);
      Vec erow(m_);
      for (Index i = 0; i < d_; ++i) dcol(i) = 1.0 / std::sqrt(clamp_norm(col_norm(i)));
      for (Index i = 0; i < m_; ++i) erow(i) = 1.0 / std::sqrt(clamp_norm(row_norm(i)));
      P_ = dcol.asDiagonal() * P_ * dcol.asDiagonal();
      A_ = erow.asDiagonal() * A_ * dcol.asDiagonal();
      q_ = dcol.cwiseProduct(q_);
      D_ = D_.cwiseProduct(dcol);
      E_ = E_.cwiseProduct(erow);

      // Cost scaling.
      Vec pcol = Vec::Zero(d_);
      for (Index c = 0; c < P_.outerSize(); ++c) {
        for (SpMat::InnerIterator e(P_, c); e; ++e) pcol(c) = std::max(pcol(c), std::abs(e.value()));
      }
      const double mean_p = d_ > 0 ? pcol.mean() : 0.0;
      const double qmax = q_.size() > 0 ? q_.cwiseAbs().maxCoeff() : 0.0;
      const double gamma = 1.0 / clamp_norm(std::max(mean_p, qmax));
      P_ *= gamma;
      q_ *= gamma;
      c_ *= gamma;
    }
    for (Index i = 0; i < m_; ++i) {
      l_hat_(i) = std::isfinite(l_(i)) ? E_(i) * l_(i) : l_(i);
      u_hat_(i) = std::isfinite(u_(i)) ? E_(i) * u_(i) : u_(i);
    }
  }

  void set_rho_vec() {
    for (Index i = 0; i < m_; ++i) {
      rho_vec_(i) = (i < m_eq_) ? 1e3 * rho_ : rho_;
    }
  }

  void factorize() {
    SpMat K = P_ + SpMat(A_.transpose() * rho_vec_.asDiagonal() * A_);
    SpMat I(d_, d_);
    I.setIdentity();
    K += settings_.sigma * I;
    if (!factor_pattern_ready_) {
      ldlt_.analyzePattern(K);
      factor_pattern_ready_ = true;
    }
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success) throw Error("QP: KKT factorization failed");
  }

  void initialize(const std::optional<QpWarmStart>& warm) {
    x_ = Vec::Zero(d_);
    y_ = Vec::Zero(m_);
    if (warm && warm->z.size() == d_) {
      x_ = warm->z.cwiseQuotient(D_);
      if (warm->duals) {
        const QpDuals& w = *warm->duals;
        if (w.eq.size() == m_eq_ && w.in.size() == m_in_ && w.bound.size() == d_) {
          Vec y(m_);
          y.head(m_eq_) = w.eq;
          y.segment(m_eq_, m_in_) = w.in;
          for (std::size_t k = 0; k < bounded_.size(); ++k) y(m_eq_ + m_in_ + static_cast<Index>(k)) = w.bound(bounded_[k]);
          y_ = c_ * y.cwiseQuotient(E_);
        }
      }
    }
    z_ = project(A_ * x_);
  }

  [[nodiscard]] Vec project(const Vec& v) const { return v.cwiseMax(l_hat_).cwiseMin(u_hat_); }

  void admm_step() {
    const Vec rhs = settings_.sigma * x_ - q_ + A_.transpose() * (rho_vec_.cwiseProduct(z_) - y_);
    const Vec x_tilde = ldlt_.solve(rhs);
    const Vec z_tilde = A_ * x_tilde;
    const double a = settings_.alpha;
    x_ = a * x_tilde + (1.0 - a) * x_;
    const Vec z_relax = a * z_tilde + (1.0 - a) * z_;
    const Vec z_new = project(z_relax + y_.cwiseQuotient(rho_vec_));
    y_ += rho_vec_.cwiseProduct(z_relax - z_new);
    z_ = z_new;
  }

  Residuals scaled_residuals() const {
    Residuals r;
    const Vec Ax = A_ * x_;
    const Vec Px = P_ * x_;
    const Vec Aty = A_.transpose() * y_;
    r.prim = m_ > 0 ? (Ax - z_).cwiseAbs().maxCoeff() : 0.0;
    r.dual = d_ > 0 ? (Px + q_ + Aty).cwiseAbs().maxCoeff() : 0.0;
    auto inf_norm = [](const Vec& v) { return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0; };
    r.prim_norm = std::max({inf_norm(Ax), inf_norm(z_), 1e-12});
    r.dual_norm = std::max({inf_norm(Px), inf_norm(Aty), inf_norm(q_), 1e-12});
    return r;
  }

  void adapt_rho(const Residuals& r) {
    const double prim = r.prim / r.prim_norm;
    const double dual = r.dual / r.dual_norm;
    if (dual <= 0.0 || prim <= 0.0) return;
    const double ratio = prim / dual;
    const double bound = settings_.adaptive_rho_ratio;
    if (ratio > bound || ratio < 1.0 / bound) {
      rho_ = std::clamp(rho_ * std::sqrt(ratio), 1e-6, 1e6);
      set_rho_vec();
      factorize();
    }
  }

  // Farkas-type certificate: delta_y with A^T dy ~ 0 and u^T dy+ + l^T dy- < 0.
  [[nodiscard]] bool primal_infeasible(const Vec& dy_scaled) const {
    if (m_ == 0) return false;
    const Vec dy = E_.cwiseProduct(dy_scaled) / c_;
    const double norm = dy.cwiseAbs().maxCoeff();
    if (norm < 1e-14) return false;
    const double tol = settings_.eps_pinf * norm;
    Vec atdy = Vec::Zero(d_);
    if (m_eq_ > 0) atdy += A_eq_.transpose() * dy.head(m_eq_);
    if (m_in_ > 0) atdy += A_in_.transpose() * dy.segment(m_eq_, m_in_);
    for (std::size_t k = 0; k < bounded_.size(); ++k) atdy(bounded_[k]) += dy(m_eq_ + m_in_ + static_cast<Index>(k));
    if (atdy.cwiseAbs().maxCoeff() > tol) return false;
    double support = 0.0;
    for (Index i = 0; i < m_; ++i) {
      if (dy(i) > 0.0) {
        if (!std::isfinite(u_(i))) {
          if (dy(i) > tol) return false;
        } else {
          support += u_(i) * dy(i);
        }
      } else if (dy(i) < 0.0) {
        if (!std::isfinite(l_(i))) {
          if (-dy(i) > tol) return false;
        } else {
          support += l_(i) * dy(i);
        }
      }
    }
    return support < -tol;
  }

  // Maps scaled (x, y) to the original problem and fills residuals.
  QpSolution unscaled_solution(const Vec& x_scaled, const Vec& y_scaled) const {
    QpSolution s;
    s.z = D_.cwiseProduct(x_scaled);
    for (Index i : bounded_) s.z(i) = std::clamp(s.z(i), lb_(i), ub_(i));
    const Vec y = E_.cwiseProduct(y_scaled) / c_;
    s.duals.eq = y.head(m_eq_);
    s.duals.in = y.segment(m_eq_, m_in_);
    s.duals.bound = Vec::Zero(d_);
    for (std::size_t k = 0; k < bounded_.size(); ++k) s.duals.bound(bounded_[k]) = y(m_eq_ + m_in_ + static_cast<Index>(k));
    const KktResiduals r =
        detail::kkt_residuals_impl(H_, f_, A_eq_, b_eq_, A_in_, b_in_, lb_, ub_, s.z, s.duals);
    s.r_pri = r.r_pri;
    s.r_dual = std::max(r.r_dual, r.complementarity);
    s.objective = 0.5 * s.z.dot(H_ * s.z) + f_.dot(s.z);
    return s;
  }

  // 0 inactive, 1 lower, 2 upper, 3 equality.
  [[nodiscard]] std::vector<char> active_set() const {
    std::vector<char> act(static_cast<std::size_t>(m_), 0);
    for (Index i = 0; i < m_; ++i) {
      if (l_hat_(i) == u_hat_(i)) {
        act[static_cast<std::size_t>(i)] = 3;
      } else if (z_(i) - l_hat_(i) < -y_(i)) {
        act[static_cast<std::size_t>(i)] = 1;
      } else if (u_hat_(i) - z_(i) < y_(i)) {
        act[static_cast<std::size_t>(i)] = 2;
      }
    }
    return act;
  }

  std::optional<QpSolution> polish() {
    const auto act = active_set();
    std::vector<Index> rows;
    for (Index i = 0; i < m_; ++i) {
      if (act[static_cast<std::size_t>(i)] != 0) rows.push_back(i);
    }
    const Index na = static_cast<Index>(rows.size());
    const double delta = 1e-7;

    SpMat At = A_.transpose();  // column i of At is row i of A
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<Eigen::Triplet<double>> trip0;
    for (Index c = 0; c < P_.outerSize(); ++c) {
      for (SpMat::InnerIterator e(P_, c); e; ++e) {
        trip.emplace_back(e.row(), c, e.value());
        trip0.emplace_back(e.row(), c, e.value());
      }
    }
    for (Index i = 0; i < d_; ++i) trip.emplace_back(i, i, delta);
    Vec rhs = Vec::Zero(d_ + na);
    rhs.head(d_) = -q_;
    for (Index k = 0; k < na; ++k) {
      const Index r = rows[static_cast<std::size_t>(k)];
      for (SpMat::InnerIterator e(At, r); e; ++e) {
        trip.emplace_back(d_ + k, e.row(), e.value());
        trip.emplace_back(e.row(), d_ + k, e.value());
        trip0.emplace_back(d_ + k, e.row(), e.value());
        trip0.emplace_back(e.row(), d_ + k, e.value());
      }
      trip.emplace_back(d_ + k, d_ + k, -delta);
      const char a = act[static_cast<std::size_t>(r)];
      rhs(d_ + k) = (a == 2) ? u_hat_(r) : l_hat_(r);
    }
    SpMat K(d_ + na, d_ + na);
    K.setFromTriplets(trip.begin(), trip.end());
    SpMat K0(d_ + na, d_ + na);
    K0.setFromTriplets(trip0.begin(), trip0.end());

    Eigen::SimplicialLDLT<SpMat> kkt;
    kkt.compute(K);
    if (kkt.info() != Eigen::Success) return std::nullopt;
    Vec sol = kkt.solve(rhs);
    for (int refine = 0; refine < 5; ++refine) {
      const Vec resid = rhs - K0 * sol;
      sol += kkt.solve(resid);
    }
    if (!sol.allFinite()) return std::nullopt;

    Vec y = Vec::Zero(m_);
    for (Index k = 0; k < na; ++k) y(rows[static_cast<std::size_t>(k)]) = sol(d_ + k);
    QpSolution s = unscaled_solution(sol.head(d_), y);
    if (s.r_pri <= settings_.eps_pri && s.r_dual <= settings_.eps_dual) {
      s.status = QpStatus::Optimal;
      s.polished = true;
      return s;
    }
    return std::nullopt;
  }

  QpSettings settings_;

  Index d_ = 0;
  Index m_eq_ = 0;
  Index m_in_ = 0;
  Index m_ = 0;
  std::vector<Index> bounded_;

  // Original data (sparse copies).
  SpMat H_;
  Vec f_;
  SpMat A_eq_;
  SpMat A_in_;
  Vec b_eq_;
  Vec b_in_;
  Vec lb_;
  Vec ub_;
  Vec l_;
  Vec u_;

  // Scaled data.
  SpMat P_;
  SpMat A_;
  Vec q_;
  Vec l_hat_;
  Vec u_hat_;
  Vec D_;
  Vec E_;
  double c_ = 1.0;

  double rho_ = 0.1;
  Vec rho_vec_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  bool factor_pattern_ready_ = false;

  Vec x_;
  Vec z_;
  Vec y_;
};

/// One-shot convenience wrapper.
inline QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings = {},
                           const std::optional<QpWarmStart>& warm = std::nullopt) {
  QpSolver solver(settings);
  return solver.solve(problem, warm);
}

}  // namespace cmpc
