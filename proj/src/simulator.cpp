#include "mispar/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "mispar/errors.hpp"
#include "mispar/parallel.hpp"

namespace mispar::sim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* to_string(Penalty p) { return p == Penalty::l2 ? "l2" : "l1"; }

FitResult fit_ridge(const DesignRef& x, const VectorXd& y, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("fit_ridge: lambda must be >= 0");
  if (x.rows() != y.size()) throw DimensionError("fit_ridge: design/response size mismatch");
  const Eigen::Index m = x.rows(), p = x.cols();
  FitResult out;
  if (lambda == 0.0) {
    Eigen::BDCSVD<MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericalRankFailure("fit_ridge: SVD failed");
    const VectorXd& s = svd.singularValues();
    const double cut = s.size() > 0 ? s(0) * 1e-10 : 0.0;
    VectorXd uty = svd.matrixU().transpose() * y;
    for (Eigen::Index i = 0; i < s.size(); ++i) uty(i) = s(i) > cut ? uty(i) / s(i) : 0.0;
    out.beta_hat = svd.matrixV() * uty;
  } else if (p <= m) {
    MatrixXd g = x.transpose() * x;
    g.diagonal().array() += lambda;
    Eigen::LLT<MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw NumericalRankFailure("fit_ridge: Cholesky failed");
    out.beta_hat = llt.solve(x.transpose() * y);
  } else {
    MatrixXd k = x * x.transpose();
    k.diagonal().array() += lambda;
    Eigen::LLT<MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) throw NumericalRankFailure("fit_ridge: Cholesky failed");
    out.beta_hat = x.transpose() * llt.solve(y);
  }
  out.iterations = 1;
  out.objective = 0.5 * (y - x * out.beta_hat).squaredNorm() + 0.5 * lambda * out.beta_hat.squaredNorm();
  out.converged = out.beta_hat.allFinite();
  return out;
}

FitResult fit_ridge(const Instance& inst, double lambda) {
  return fit_ridge(inst.inference_design(), inst.y, lambda);
}

double lasso_kkt_violation(const DesignRef& x, const VectorXd& y, const VectorXd& b,
                           double lambda) {
  const VectorXd g = x.transpose() * (y - x * b);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double v = b(j) == 0.0 ? std::max(0.0, std::fabs(g(j)) - lambda)
                                 : std::fabs(g(j) - lambda * (b(j) > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

namespace {

std::string worst_kkt_column(const DesignRef& x, const VectorXd& y, const VectorXd& b, double lambda) {
  const VectorXd g = x.transpose() * (y - x * b);
  Eigen::Index worst = 0;
  double w = -1.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double v = b(j) == 0.0 ? std::fabs(g(j)) - lambda : std::fabs(g(j) - lambda * (b(j) > 0 ? 1.0 : -1.0));
    if (v > w) w = v, worst = j;
  }
  std::ostringstream os;
  os << " at column " << worst << (b(worst) == 0.0 ? " (inactive, " : " (active, ") << "gradient "
     << g(worst) << ", lambda " << lambda << ", " << (b.array() != 0.0).count() << " active)";
  return os.str();
}

double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

class CoordinateDescent {
 public:
  CoordinateDescent(const DesignRef& x, const VectorXd& y)
      : x_(x), y_(y), col_sq_(x.colwise().squaredNorm().transpose()), b_(VectorXd::Zero(x.cols())),
        r_(y) {}

  // Runs one stage to convergence. Returns sweeps used, or -1 if max_sweeps ran out.
  int solve(double lambda, const LassoOptions& opts) {
    int sweeps = 0;
    while (sweeps < opts.max_sweeps) {
      ++sweeps;
      if (sweep_all(lambda) < opts.tol) return sweeps;
      collect_active();
      int inner = 0;
      while (sweeps < opts.max_sweeps) {
        ++sweeps;
        ++inner;
        if (sweep_active(lambda) < opts.tol) break;
        if (inner % 25 == 0 && polish(lambda)) return sweeps;
      }
      if (polish(lambda)) return sweeps;
    }
    return -1;
  }

  const VectorXd& beta() const { return b_; }
  const VectorXd& residual() const { return r_; }

  // Restarts from b and runs the active-set refinement at lambda. On failure the
  // iterate is left at b.
  bool refine_from(const VectorXd& b, double lambda) {
    reset(b);
    if (polish(lambda)) return true;
    reset(b);
    return false;
  }

  void reset(const VectorXd& b) {
    b_ = b;
    r_ = y_ - x_ * b_;
  }

 private:
  double update(Eigen::Index j, double lambda) {
    if (col_sq_(j) == 0.0) return 0.0;
    const double old = b_(j);
    const double z = x_.col(j).dot(r_) + col_sq_(j) * old;
    const double nb = soft(z, lambda) / col_sq_(j);
    const double d = nb - old;
    if (d != 0.0) {
      r_.noalias() -= d * x_.col(j);
      b_(j) = nb;
    }
    return std::fabs(d);
  }

  double sweep_all(double lambda) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < b_.size(); ++j) worst = std::max(worst, update(j, lambda));
    return worst;
  }

  double sweep_active(double lambda) {
    double worst = 0.0;
    for (auto j : active_) worst = std::max(worst, update(j, lambda));
    return worst;
  }

  void collect_active() {
    active_.clear();
    for (Eigen::Index j = 0; j < b_.size(); ++j)
      if (b_(j) != 0.0) active_.push_back(j);
  }

  // Active-set refinement: solve the KKT system on the current support and sign
  // pattern. If a coordinate would change sign, move only up to the first zero
  // crossing, drop it, and retry. If an inactive coordinate violates its bound, the
  // worst one joins with the sign of its gradient. Succeeds when the result is
  // sign-consistent and no inactive coordinate violates its KKT bound.
  bool polish(double lambda) {
    collect_active();
    const double slack = lambda * 1e-9 + 1e-12;
    Eigen::Index joined = -1;
    double joined_sign = 0.0;
    for (int round = 0; round < 64; ++round) {
      const auto k = static_cast<Eigen::Index>(active_.size());
      if (k == 0 || k > x_.rows()) return false;
      MatrixXd xa(x_.rows(), k);
      VectorXd sgn(k), cur(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        xa.col(i) = x_.col(active_[i]);
        cur(i) = b_(active_[i]);
        sgn(i) = active_[i] == joined ? joined_sign : (cur(i) > 0 ? 1.0 : -1.0);
      }
      Eigen::LLT<MatrixXd> llt(xa.transpose() * xa);
      if (llt.info() != Eigen::Success) return false;
      const VectorXd ba = llt.solve(xa.transpose() * y_ - lambda * sgn);
      if (!ba.allFinite()) return false;

      double step = 1.0;
      Eigen::Index blocker = -1;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (ba(i) * sgn(i) > 0.0) continue;
        if (cur(i) == 0.0) return false;  // a joining coordinate that wants the other sign
        const double t = cur(i) / (cur(i) - ba(i));
        if (t < step) {
          step = t;
          blocker = i;
        }
      }
      const VectorXd next = cur + step * (ba - cur);
      for (Eigen::Index i = 0; i < k; ++i) b_(active_[i]) = next(i);
      joined = -1;
      if (blocker >= 0) {
        b_(active_[blocker]) = 0.0;
        r_ = y_ - x_ * b_;
        collect_active();
        continue;
      }
      r_ = y_ - xa * next;
      const VectorXd g = x_.transpose() * r_;
      double worst = lambda + slack;
      for (Eigen::Index j = 0; j < b_.size(); ++j)
        if (b_(j) == 0.0 && std::fabs(g(j)) > worst) {
          worst = std::fabs(g(j));
          joined = j;
        }
      if (joined < 0) return true;
      joined_sign = g(joined) > 0 ? 1.0 : -1.0;
      active_.push_back(joined);
    }
    return false;
  }

  DesignRef x_;
  const VectorXd& y_;
  VectorXd col_sq_;
  VectorXd b_;
  VectorXd r_;
  std::vector<Eigen::Index> active_;
};

// Upper-triangular R with R^T R = X_A^T X_A, grown and shrunk one column at a time.
class GramFactor {
 public:
  explicit GramFactor(const DesignRef& x) : x_(x) {}

  bool add(Eigen::Index j, const std::vector<Eigen::Index>& active) {
    const auto k = static_cast<Eigen::Index>(active.size());
    VectorXd g(k);
    for (Eigen::Index i = 0; i < k; ++i) g(i) = x_.col(active[i]).dot(x_.col(j));
    VectorXd w = r_.topLeftCorner(k, k).transpose().triangularView<Eigen::Lower>().solve(g);
    const double d = x_.col(j).squaredNorm() - w.squaredNorm();
    if (!(d > 1e-12 * x_.col(j).squaredNorm())) return false;
    MatrixXd next = MatrixXd::Zero(k + 1, k + 1);
    next.topLeftCorner(k, k) = r_.topLeftCorner(k, k);
    next.col(k).head(k) = w;
    next(k, k) = std::sqrt(d);
    r_ = std::move(next);
    return true;
  }

  void remove(Eigen::Index i) {
    const Eigen::Index k = r_.cols();
    MatrixXd h(k, k - 1);
    h.leftCols(i) = r_.leftCols(i);
    h.rightCols(k - 1 - i) = r_.rightCols(k - 1 - i);
    for (Eigen::Index c = i; c < k - 1; ++c) {
      Eigen::JacobiRotation<double> rot;
      rot.makeGivens(h(c, c), h(c + 1, c));
      h.applyOnTheLeft(c, c + 1, rot.adjoint());
      h(c + 1, c) = 0.0;
    }
    r_ = h.topRows(k - 1);
  }

  bool rebuild(const std::vector<Eigen::Index>& active) {
    const auto k = static_cast<Eigen::Index>(active.size());
    MatrixXd xa(x_.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) xa.col(i) = x_.col(active[i]);
    Eigen::LLT<MatrixXd> llt(xa.transpose() * xa);
    if (llt.info() != Eigen::Success) return false;
    r_ = llt.matrixU();
    return true;
  }

  VectorXd solve(const VectorXd& rhs) const {
    const auto tri = r_.triangularView<Eigen::Upper>();
    return tri.solve(tri.transpose().solve(rhs));
  }

 private:
  DesignRef x_;
  MatrixXd r_ = MatrixXd::Zero(0, 0);
};

// Follows the exact piecewise-linear lasso path from an exact solution b at lam_from
// down to lam_to. Returns the number of path events, or -1 on numerical breakdown.
int follow_path(const DesignRef& x, const VectorXd& y, VectorXd& b, double lam_from,
                double lam_to) {
  const Eigen::Index p = x.cols();
  std::vector<Eigen::Index> active;
  VectorXd sgn_full = VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j)
    if (b(j) != 0.0) {
      active.push_back(j);
      sgn_full(j) = b(j) > 0 ? 1.0 : -1.0;
    }
  GramFactor gram(x);
  if (!gram.rebuild(active)) return -1;
  VectorXd c;
  double lam = lam_from;

  // Puts the active coefficients back on the path at the current lambda,
  // b_A = (X_A^T X_A)^{-1} (X_A^T y - lam s_A), unless that would flip a sign.
  auto resync = [&] {
    const auto k = static_cast<Eigen::Index>(active.size());
    if (k > 0) {
      VectorXd rhs(k), s(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        s(i) = sgn_full(active[i]);
        rhs(i) = x.col(active[i]).dot(y) - lam * s(i);
      }
      const VectorXd ba = gram.solve(rhs);
      bool same = ba.allFinite();
      for (Eigen::Index i = 0; same && i < k; ++i) same = ba(i) * s(i) > 0.0;
      if (same)
        for (Eigen::Index i = 0; i < k; ++i) b(active[i]) = ba(i);
    }
    c = x.transpose() * (y - x * b);
  };
  resync();
  Eigen::Index just_dropped = -1;

  for (int event = 0; event < 50 * static_cast<int>(p) + 100; ++event) {
    const auto k = static_cast<Eigen::Index>(active.size());
    VectorXd s(k);
    for (Eigen::Index i = 0; i < k; ++i) s(i) = sgn_full(active[i]);
    const VectorXd v = k > 0 ? gram.solve(s) : VectorXd();
    VectorXd u = VectorXd::Zero(x.rows());
    for (Eigen::Index i = 0; i < k; ++i) u.noalias() += v(i) * x.col(active[i]);
    const VectorXd a = x.transpose() * u;

    double step = lam - lam_to;
    Eigen::Index join = -1, drop = -1;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double t = -b(active[i]) / v(i);
      if (t > 0.0 && t < step) {
        step = t;
        drop = i;
        join = -1;
      }
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      if (sgn_full(j) != 0.0 || j == just_dropped) continue;
      if (1.0 - a(j) > 0.0) {
        const double t = std::max(0.0, (lam - c(j)) / (1.0 - a(j)));
        if (t < step) {
          step = t;
          join = j;
          drop = -1;
        }
      }
      if (1.0 + a(j) > 0.0) {
        const double t = std::max(0.0, (lam + c(j)) / (1.0 + a(j)));
        if (t < step) {
          step = t;
          join = j;
          drop = -1;
        }
      }
    }

    for (Eigen::Index i = 0; i < k; ++i) b(active[i]) += step * v(i);
    c.noalias() -= step * a;
    lam -= step;
    just_dropped = -1;

    if (drop >= 0) {
      const Eigen::Index j = active[drop];
      b(j) = 0.0;
      sgn_full(j) = 0.0;
      gram.remove(drop);
      active.erase(active.begin() + drop);
      just_dropped = j;
    } else if (join >= 0) {
      if (k >= x.rows() || !gram.add(join, active)) return -1;
      active.push_back(join);
      sgn_full(join) = c(join) > 0 ? 1.0 : -1.0;
    } else {
      if (!gram.rebuild(active)) return -1;
      resync();
      return event + 1;
    }
    if (event % 64 == 63) {
      if (!gram.rebuild(active)) return -1;
      resync();
    }
  }
  return -1;
}

}  // namespace

FitResult fit_lasso(const DesignRef& x, const VectorXd& y, double lambda,
                    const LassoOptions& opts) {
  if (!(lambda > 0.0)) throw DomainError("fit_lasso: target lambda must be > 0");
  if (x.rows() != y.size()) throw DimensionError("fit_lasso: design/response size mismatch");
  FitResult out;
  const double lmax = (x.transpose() * y).cwiseAbs().maxCoeff();
  if (lambda >= lmax) {
    out.beta_hat = VectorXd::Zero(x.cols());
    out.objective = 0.5 * y.squaredNorm();
    out.converged = true;
    return out;
  }

  std::vector<double> path;
  const double start = 0.5 * lmax;
  if (lambda >= start || opts.stages <= 1) {
    path.push_back(lambda);
  } else {
    const double ratio = lambda / start;
    for (int k = 0; k < opts.stages; ++k)
      path.push_back(start * std::pow(ratio, static_cast<double>(k) / (opts.stages - 1)));
    path.back() = lambda;
  }

  // Coordinate descent along the schedule. A stage that exhausts its sweep budget
  // (typical near interpolation with p > m, where the support approaches m columns
  // and the active Gram matrix is nearly singular) hands over to exact path following
  // from the last solved stage.
  CoordinateDescent cd(x, y);
  double solved_lambda = lmax;
  VectorXd solved_beta = VectorXd::Zero(x.cols());
  for (double lam : path) {
    const int used = cd.solve(lam, opts);
    if (used < 0) {
      out.iterations += opts.max_sweeps;
      const int events = follow_path(x, y, solved_beta, solved_lambda, lambda);
      double kkt = lasso_kkt_violation(x, y, solved_beta, lambda);
      if (events >= 0 && kkt > opts.kkt_tol && cd.refine_from(solved_beta, lambda)) {
        solved_beta = cd.beta();
        kkt = lasso_kkt_violation(x, y, solved_beta, lambda);
      }
      if (events < 0 || kkt > opts.kkt_tol) {
        std::ostringstream os;
        os << "fit_lasso: stage lambda = " << lam << " exceeded " << opts.max_sweeps
           << " sweeps and path following " << (events < 0 ? "broke down" : "ended")
           << "; KKT violation " << kkt << worst_kkt_column(x, y, solved_beta, lambda);
        throw MaxIterExceeded(os.str());
      }
      out.iterations += events;
      out.beta_hat = solved_beta;
      out.objective = 0.5 * (y - x * solved_beta).squaredNorm() + lambda * solved_beta.lpNorm<1>();
      out.kkt_violation = kkt;
      out.converged = true;
      return out;
    }
    out.iterations += used;
    solved_lambda = lam;
    solved_beta = cd.beta();
  }
  out.kkt_violation = lasso_kkt_violation(x, y, cd.beta(), lambda);
  if (out.kkt_violation > opts.kkt_tol) {
    const VectorXd b = cd.beta();
    cd.refine_from(b, lambda);
    out.kkt_violation = lasso_kkt_violation(x, y, cd.beta(), lambda);
  }
  out.beta_hat = cd.beta();
  out.objective = 0.5 * cd.residual().squaredNorm() + lambda * out.beta_hat.lpNorm<1>();
  out.converged = out.kkt_violation <= opts.kkt_tol;
  return out;
}

FitResult fit_lasso(const Instance& inst, double lambda, const LassoOptions& opts) {
  if (!(lambda >= 0.0)) throw DomainError("fit_lasso: lambda must be >= 0");
  const double target =
      lambda > 0.0 ? lambda : 1e-6 * inst.cfg.signal_power() * std::sqrt(static_cast<double>(inst.m));
  return fit_lasso(inst.inference_design(), inst.y, target, opts);
}

RiskPoint empirical_risk(const Instance& inst, const FitResult& fit) {
  const double norm = risk_norm(inst.cfg);
  const auto& b = fit.beta_hat;
  const double te = (inst.y - inst.inference_design() * b).squaredNorm() / (inst.m * norm);
  const Eigen::Index shared = std::min<Eigen::Index>(inst.n, b.size());
  double err = (inst.beta.head(shared) - b.head(shared)).squaredNorm();
  if (inst.n > shared) err += inst.beta.tail(inst.n - shared).squaredNorm();
  if (b.size() > shared) err += b.tail(b.size() - shared).squaredNorm();
  const double s2 = inst.cfg.sigma * inst.cfg.sigma;
  return {te, (s2 + err / inst.n) / norm};
}

TrialSummary run_trials(const ModelConfig& cfg, int n, int trials, Penalty penalty,
                        std::uint64_t seed, int workers) {
  if (trials < 1) throw DomainError("run_trials: trials must be >= 1");
  cfg.validate();
  risk_norm(cfg);
  std::vector<std::optional<RiskPoint>> slots(trials);
  std::vector<std::string> errors(trials);

  parallel_for(
      trials,
      [&](int t) {
        try {
          const auto inst = sample_instance(cfg, n, trial_key(seed, static_cast<std::uint64_t>(t)));
          const auto fit =
              penalty == Penalty::l2 ? fit_ridge(inst, cfg.lambda) : fit_lasso(inst, cfg.lambda);
          if (!fit.converged) {
            std::ostringstream os;
            os << "trial " << t << ": fit not converged (KKT violation " << fit.kkt_violation << ")";
            errors[t] = os.str();
            return;
          }
          slots[t] = empirical_risk(inst, fit);
        } catch (const DimensionError&) {
          throw;
        } catch (const Error& e) {
          errors[t] = e.what();
        }
      },
      worker_count(workers));

  TrialSummary out;
  out.cfg = cfg;
  out.n = n;
  out.trials = trials;
  out.penalty = penalty;

  std::vector<RiskPoint> ok;
  for (const auto& s : slots)
    if (s) ok.push_back(*s);
  out.failed = trials - static_cast<int>(ok.size());
  if (out.failed * 20 > trials) {
    std::ostringstream os;
    os << "run_trials: " << out.failed << " of " << trials << " trials failed";
    for (const auto& e : errors)
      if (!e.empty()) {
        os << "; first error: " << e;
        break;
      }
    throw NoConvergence(os.str());
  }

  const auto k = static_cast<double>(ok.size());
  double te = 0.0, ge = 0.0;
  for (const auto& r : ok) {
    te += r.te;
    ge += r.ge;
  }
  out.te_mean = te / k;
  out.ge_mean = ge / k;
  if (ok.size() < 2) {
    out.te_stderr = out.ge_stderr = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double vte = 0.0, vge = 0.0;
  for (const auto& r : ok) {
    vte += (r.te - out.te_mean) * (r.te - out.te_mean);
    vge += (r.ge - out.ge_mean) * (r.ge - out.ge_mean);
  }
  out.te_stderr = std::sqrt(vte / (k - 1.0) / k);
  out.ge_stderr = std::sqrt(vge / (k - 1.0) / k);
  return out;
}

}  // namespace mispar::sim
