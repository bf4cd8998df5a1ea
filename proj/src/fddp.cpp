// Copyright 2026 The Borinot Control Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "borinot/fddp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace borinot {
namespace {

// sigmoid(30) is 1 - 9.4e-14: the bounds are never reached exactly.
constexpr double kMaxSquashArg = 30.0;
// Line search step lengths 1, 1/2, ..., 2^-10.
constexpr int kLineSearchSteps = 11;
constexpr double kAcceptRatio = 0.1;
constexpr double kAcceptNegativeRatio = 2.0;

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void CalcNode(const ShootingProblem& p, int t, const std::vector<Eigen::VectorXd>& xs,
              const std::vector<Eigen::VectorXd>& us, ActionData& d) {
  if (t < p.T()) {
    p.running[t]->CalcDiff(xs[t], us[t], d);
  } else {
    p.terminal->CalcDiff(xs[t], Eigen::VectorXd(), d);
  }
}

}  // namespace

void ShootingProblem::Validate() const {
  if (running.empty()) throw std::invalid_argument("problem needs at least one running node");
  if (!terminal) throw std::invalid_argument("problem needs a terminal model");
  const int nu = running.front()->nu();
  if (lower.size() != nu || upper.size() != nu) {
    throw std::invalid_argument("control bounds do not match the control dimension");
  }
  for (int i = 0; i < nu; ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i])) {
      throw std::invalid_argument("control bounds must be finite with lower < upper");
    }
  }
  for (const auto& m : running) {
    if (!m || m->nu() != nu) throw std::invalid_argument("running nodes must share nu");
  }
  if (x0.size() != running.front()->state().nx()) {
    throw std::invalid_argument("initial state has the wrong size");
  }
  if (u_default.size() != 0 && u_default.size() != nu) {
    throw std::invalid_argument("default control has the wrong size");
  }
}

// ---------------------------------------------------------------------------
// Squash

Squash::Squash(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
               const Eigen::VectorXd& sharpness)
    : lb_(lower), range_(upper - lower) {
  s_ = sharpness.size() ? sharpness : Eigen::VectorXd(10.0 * range_.cwiseInverse());
}

Eigen::VectorXd Squash::Clamp(const Eigen::VectorXd& w) const {
  Eigen::VectorXd out(w.size());
  for (int i = 0; i < w.size(); ++i) {
    const double lim = kMaxSquashArg / s_[i];
    out[i] = std::clamp(w[i], -lim, lim);
  }
  return out;
}

Eigen::VectorXd Squash::Apply(const Eigen::VectorXd& w) const {
  Eigen::VectorXd u(w.size());
  for (int i = 0; i < w.size(); ++i) {
    const double z = std::clamp(s_[i] * w[i], -kMaxSquashArg, kMaxSquashArg);
    u[i] = lb_[i] + range_[i] * Sigmoid(z);
  }
  return u;
}

Eigen::VectorXd Squash::Derivative(const Eigen::VectorXd& w) const {
  Eigen::VectorXd d(w.size());
  for (int i = 0; i < w.size(); ++i) {
    const double z = std::clamp(s_[i] * w[i], -kMaxSquashArg, kMaxSquashArg);
    const double sg = Sigmoid(z);
    d[i] = range_[i] * s_[i] * sg * (1.0 - sg);
  }
  return d;
}

Eigen::VectorXd Squash::Invert(const Eigen::VectorXd& u) const {
  Eigen::VectorXd w(u.size());
  const double pmin = Sigmoid(-kMaxSquashArg);
  for (int i = 0; i < u.size(); ++i) {
    const double p = std::clamp((u[i] - lb_[i]) / range_[i], pmin, 1.0 - pmin);
    w[i] = std::log(p / (1.0 - p)) / s_[i];
  }
  return w;
}

// ---------------------------------------------------------------------------
// Linearization kernels

void LinearizeSerial(const ShootingProblem& problem, const std::vector<Eigen::VectorXd>& xs,
                     const std::vector<Eigen::VectorXd>& us, std::vector<ActionData>& data) {
  const int T = problem.T();
  data.resize(T + 1);
  for (int t = 0; t <= T; ++t) CalcNode(problem, t, xs, us, data[t]);
}

void LinearizeParallel(const ShootingProblem& problem, const std::vector<Eigen::VectorXd>& xs,
                       const std::vector<Eigen::VectorXd>& us, std::vector<ActionData>& data) {
  const int T = problem.T();
  data.resize(T + 1);
  // Nodes are independent and each writes only its own slot.
#pragma omp parallel for schedule(static)
  for (int t = 0; t <= T; ++t) CalcNode(problem, t, xs, us, data[t]);
}

std::vector<Eigen::VectorXd> RolloutProblem(const ShootingProblem& problem,
                                            const std::vector<Eigen::VectorXd>& us) {
  std::vector<Eigen::VectorXd> xs{problem.x0};
  ActionData d;
  for (int t = 0; t < problem.T(); ++t) {
    problem.running[t]->Calc(xs.back(), us[t], d);
    xs.push_back(d.xnext);
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Solver

FddpSolver::FddpSolver(const ShootingProblem& problem, const SolverOptions& options)
    : problem_(problem), options_(options) {
  problem_.Validate();
  T_ = problem_.T();
  squash_ = Squash(problem_.lower, problem_.upper);
}

void FddpSolver::Linearize() {
  if (options_.parallel) {
    LinearizeParallel(problem_, xs_, us_, data_);
  } else {
    LinearizeSerial(problem_, xs_, us_, data_);
  }
  const StateManifold& sm = problem_.running.front()->state();
  cost_ = 0.0;
  fs_.resize(T_ + 1);
  fs_[0] = sm.Diff(xs_[0], problem_.x0);
  for (int t = 0; t <= T_; ++t) {
    ActionData& d = data_[t];
    cost_ += d.cost;
    if (t == T_) break;
    fs_[t + 1] = sm.Diff(xs_[t + 1], d.xnext);
    // Chain rule through the squash.
    const Eigen::VectorXd ds = squash_.Derivative(ws_[t]);
    d.fu = d.fu * ds.asDiagonal();
    d.lu = ds.cwiseProduct(d.lu);
    d.luu = ds.asDiagonal() * d.luu * ds.asDiagonal();
    d.lxu = d.lxu * ds.asDiagonal();
  }
}

bool FddpSolver::BackwardPass() {
  const ActionData& dT = data_[T_];
  vxx_[T_] = dT.lxx;
  vxx_[T_].diagonal().array() += reg_;
  vx_[T_] = dT.lx;
  if (!feasible_) vx_[T_].noalias() += vxx_[T_] * fs_[T_];

  for (int t = T_ - 1; t >= 0; --t) {
    const ActionData& d = data_[t];
    const Eigen::MatrixXd vxx_fx = vxx_[t + 1] * d.fx;
    const Eigen::MatrixXd vxx_fu = vxx_[t + 1] * d.fu;
    const Eigen::VectorXd qx = d.lx + d.fx.transpose() * vx_[t + 1];
    qu_[t] = d.lu + d.fu.transpose() * vx_[t + 1];
    const Eigen::MatrixXd qxx = d.lxx + d.fx.transpose() * vxx_fx;
    const Eigen::MatrixXd qxu = d.lxu + d.fx.transpose() * vxx_fu;
    Eigen::MatrixXd quu = d.luu + d.fu.transpose() * vxx_fu;
    quu.diagonal().array() += reg_;

    const Eigen::LLT<Eigen::MatrixXd> llt(quu);
    if (llt.info() != Eigen::Success) return false;
    k_[t] = llt.solve(qu_[t]);
    kk_[t] = llt.solve(qxu.transpose());
    if (!k_[t].allFinite() || !kk_[t].allFinite()) return false;
    quuk_[t] = quu * k_[t];

    vx_[t] = qx - kk_[t].transpose() * qu_[t];
    vxx_[t] = qxx - qxu * kk_[t];
    vxx_[t] = 0.5 * (vxx_[t] + vxx_[t].transpose()).eval();
    vxx_[t].diagonal().array() += reg_;
    if (!feasible_) vx_[t].noalias() += vxx_[t] * fs_[t];
    if (!vx_[t].allFinite() || !vxx_[t].allFinite()) return false;
  }
  return true;
}

void FddpSolver::UpdateExpectedImprovement() {
  dg_ = 0.0;
  dq_ = 0.0;
  if (!feasible_) {
    dg_ -= vx_[T_].dot(fs_[T_]);
    dq_ += fs_[T_].dot(vxx_[T_] * fs_[T_]);
  }
  for (int t = 0; t < T_; ++t) {
    dg_ += qu_[t].dot(k_[t]);
    dq_ -= k_[t].dot(quuk_[t]);
    if (!feasible_) {
      dg_ -= vx_[t].dot(fs_[t]);
      dq_ += fs_[t].dot(vxx_[t] * fs_[t]);
    }
  }
}

Eigen::Vector2d FddpSolver::ExpectedImprovement() const {
  double dv = 0.0;
  if (!feasible_) {
    const StateManifold& sm = problem_.running.front()->state();
    for (int t = 0; t <= T_; ++t) {
      const Eigen::VectorXd dx = sm.Diff(xs_try_[t], xs_[t]);
      dv -= fs_[t].dot(vxx_[t] * dx);
    }
  }
  return {dg_ + dv, dq_ - 2.0 * dv};
}

double FddpSolver::TryStep(double alpha) {
  const StateManifold& sm = problem_.running.front()->state();
  xs_try_[0] = sm.Integrate(xs_[0], alpha * fs_[0]);
  double cost = 0.0;
  ActionData d;
  for (int t = 0; t < T_; ++t) {
    const Eigen::VectorXd dx = sm.Diff(xs_[t], xs_try_[t]);
    ws_try_[t] = squash_.Clamp(ws_[t] - alpha * k_[t] - kk_[t] * dx);
    us_try_[t] = squash_.Apply(ws_try_[t]);
    problem_.running[t]->Calc(xs_try_[t], us_try_[t], d);
    cost += d.cost;
    if (!d.xnext.allFinite() || !std::isfinite(cost)) {
      return std::numeric_limits<double>::infinity();
    }
    xs_try_[t + 1] = sm.Integrate(d.xnext, (alpha - 1.0) * fs_[t + 1]);
  }
  problem_.terminal->Calc(xs_try_[T_], Eigen::VectorXd(), d);
  cost += d.cost;
  return std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
}

SolverResult FddpSolver::Solve(const std::vector<Eigen::VectorXd>& xs_init,
                               const std::vector<Eigen::VectorXd>& us_init) {
  const int nu = problem_.running.front()->nu();
  if (!us_init.empty() && static_cast<int>(us_init.size()) != T_) {
    throw std::invalid_argument("warm-start controls must have one entry per node");
  }
  if (!xs_init.empty() && static_cast<int>(xs_init.size()) != T_ + 1) {
    throw std::invalid_argument("warm-start states must have T + 1 entries");
  }
  const Eigen::VectorXd u_cold = problem_.u_default.size()
                                     ? problem_.u_default
                                     : Eigen::VectorXd(0.5 * (problem_.lower + problem_.upper));
  ws_.assign(T_, Eigen::VectorXd());
  us_.assign(T_, Eigen::VectorXd());
  for (int t = 0; t < T_; ++t) {
    ws_[t] = squash_.Invert(us_init.empty() ? u_cold : us_init[t]);
    us_[t] = squash_.Apply(ws_[t]);
  }
  if (xs_init.empty()) {
    xs_ = RolloutProblem(problem_, us_);
    feasible_ = true;
  } else {
    xs_ = xs_init;
    feasible_ = false;
  }

  xs_try_ = xs_;
  ws_try_ = ws_;
  us_try_ = us_;
  vx_.assign(T_ + 1, Eigen::VectorXd());
  vxx_.assign(T_ + 1, Eigen::MatrixXd());
  k_.assign(T_, Eigen::VectorXd::Zero(nu));
  kk_.assign(T_, Eigen::MatrixXd());
  qu_.assign(T_, Eigen::VectorXd::Zero(nu));
  quuk_.assign(T_, Eigen::VectorXd::Zero(nu));
  reg_ = options_.reg_init;

  SolverResult result;
  Linearize();
  result.cost_trace.push_back(cost_);

  int iter = 0;
  while (true) {
    // Search direction, raising the regularization until Quu is positive.
    bool ok = BackwardPass();
    while (!ok) {
      reg_ *= 10.0;
      if (reg_ > options_.reg_max) break;
      ok = BackwardPass();
    }
    if (!ok) break;
    UpdateExpectedImprovement();

    if (feasible_ && dg_ < options_.tol) {
      result.converged = true;
      break;
    }
    if (iter >= options_.max_iters) break;
    ++iter;

    bool accepted = false;
    double alpha = 1.0;
    for (int i = 0; i < kLineSearchSteps; ++i, alpha *= 0.5) {
      const double cost_try = TryStep(alpha);
      if (!std::isfinite(cost_try)) continue;
      const double dv = cost_ - cost_try;
      const Eigen::Vector2d d = ExpectedImprovement();
      const double dv_exp = alpha * (d[0] + 0.5 * alpha * d[1]);
      if (dv_exp >= 0.0) {
        accepted = dv >= kAcceptRatio * dv_exp;
      } else {
        accepted = dv > kAcceptNegativeRatio * dv_exp;
      }
      // A feasible iterate must not lose cost.
      if (feasible_ && dv < 0.0) accepted = false;
      if (accepted) break;
    }

    if (accepted) {
      xs_.swap(xs_try_);
      ws_.swap(ws_try_);
      us_.swap(us_try_);
      feasible_ = feasible_ || alpha == 1.0;
      reg_ = std::max(reg_ / 2.0, options_.reg_min);
      Linearize();
      result.cost_trace.push_back(cost_);
    } else {
      reg_ *= 10.0;
      if (reg_ > options_.reg_max) break;
    }
  }

  result.xs = xs_;
  result.us = us_;
  result.iterations = iter;
  result.cost = cost_;
  double gap = 0.0;
  for (const Eigen::VectorXd& f : fs_) gap += f.squaredNorm();
  result.gap_norm = std::sqrt(gap);
  return result;
}

}  // namespace borinot
