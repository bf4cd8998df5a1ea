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

// Feasibility-driven DDP over multiple-shooting problems with box-bounded
// controls. Bounds are enforced by optimizing an unconstrained variable w
// with u = lb + (ub - lb) * sigmoid(s * w).
//
// Node linearization is the expensive step and runs in parallel over nodes
// (OpenMP). A serial version is kept; both produce bit-identical data.

#ifndef BORINOT_FDDP_HPP_
#define BORINOT_FDDP_HPP_

#include <memory>
#include <vector>

#include <Eigen/Core>

namespace borinot {

class StateManifold {
 public:
  virtual ~StateManifold() = default;
  virtual int nx() const = 0;
  virtual int ndx() const = 0;
  /// x ⊕ dx.
  virtual Eigen::VectorXd Integrate(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const = 0;
  /// x1 ⊖ x0.
  virtual Eigen::VectorXd Diff(const Eigen::VectorXd& x0, const Eigen::VectorXd& x1) const = 0;
};

class EuclideanManifold final : public StateManifold {
 public:
  explicit EuclideanManifold(int n) : n_(n) {}
  int nx() const override { return n_; }
  int ndx() const override { return n_; }
  Eigen::VectorXd Integrate(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const override {
    return x + dx;
  }
  Eigen::VectorXd Diff(const Eigen::VectorXd& x0, const Eigen::VectorXd& x1) const override {
    return x1 - x0;
  }

 private:
  int n_;
};

/// Per-node evaluation. Jacobians are over the manifold tangent:
/// f(x ⊕ dx, u + du) ≈ f(x, u) ⊕ (Fx dx + Fu du).
struct ActionData {
  Eigen::VectorXd xnext;
  double cost = 0.0;
  Eigen::MatrixXd fx, fu;
  Eigen::VectorXd lx, lu;
  Eigen::MatrixXd lxx, lxu, luu;
};

/// One shooting node: discrete dynamics plus running cost. A terminal model
/// has nu() == 0 and leaves xnext empty.
class ActionModel {
 public:
  virtual ~ActionModel() = default;
  virtual const StateManifold& state() const = 0;
  virtual int nu() const = 0;
  /// Fills xnext and cost. Must be safe to call concurrently.
  virtual void Calc(const Eigen::VectorXd& x, const Eigen::VectorXd& u, ActionData& d) const = 0;
  /// Fills xnext, cost and all derivatives. Must be safe to call concurrently.
  virtual void CalcDiff(const Eigen::VectorXd& x, const Eigen::VectorXd& u, ActionData& d) const = 0;
};

struct ShootingProblem {
  Eigen::VectorXd x0;
  std::vector<std::shared_ptr<const ActionModel>> running;
  std::shared_ptr<const ActionModel> terminal;
  Eigen::VectorXd lower;   // control bounds shared by every node
  Eigen::VectorXd upper;
  /// Control used for cold starts; the midpoint of the bounds if empty.
  Eigen::VectorXd u_default;

  int T() const { return static_cast<int>(running.size()); }
  /// Throws std::invalid_argument if malformed.
  void Validate() const;
};

/// Elementwise u = lb + (ub - lb) * sigmoid(s * w).
class Squash {
 public:
  Squash() = default;
  /// Sharpness defaults to 10 / (ub - lb).
  Squash(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
         const Eigen::VectorXd& sharpness = {});

  Eigen::VectorXd Apply(const Eigen::VectorXd& w) const;
  /// du/dw, diagonal.
  Eigen::VectorXd Derivative(const Eigen::VectorXd& w) const;
  /// Inverse map; u is pulled strictly inside the bounds first.
  Eigen::VectorXd Invert(const Eigen::VectorXd& u) const;
  /// Clamps s * w to the range where the sigmoid stays representable.
  Eigen::VectorXd Clamp(const Eigen::VectorXd& w) const;

  const Eigen::VectorXd& sharpness() const { return s_; }

 private:
  Eigen::VectorXd lb_, range_, s_;
};

struct SolverOptions {
  int max_iters = 100;
  double tol = 1e-6;          // on the expected improvement of a feasible iterate
  double reg_init = 1e-9;
  double reg_min = 1e-9;
  double reg_max = 1e9;
  bool parallel = true;       // node linearization with OpenMP
};

struct SolverResult {
  std::vector<Eigen::VectorXd> xs;   // T + 1
  std::vector<Eigen::VectorXd> us;   // T, within bounds
  std::vector<double> cost_trace;    // initial cost, then one entry per accepted step
  bool converged = false;
  int iterations = 0;
  double gap_norm = 0.0;
  double cost = 0.0;
};

/// Evaluates every node at (xs, us): dynamics, cost and derivatives.
/// `data` is resized to T + 1.
void LinearizeSerial(const ShootingProblem& problem, const std::vector<Eigen::VectorXd>& xs,
                     const std::vector<Eigen::VectorXd>& us, std::vector<ActionData>& data);
void LinearizeParallel(const ShootingProblem& problem, const std::vector<Eigen::VectorXd>& xs,
                       const std::vector<Eigen::VectorXd>& us, std::vector<ActionData>& data);

/// Rolls the problem forward from x0 under `us`.
std::vector<Eigen::VectorXd> RolloutProblem(const ShootingProblem& problem,
                                            const std::vector<Eigen::VectorXd>& us);

class FddpSolver {
 public:
  FddpSolver(const ShootingProblem& problem, const SolverOptions& options = {});

  /// Empty xs_init: rollout of us_init from x0 (a feasible start).
  /// Empty us_init: constant u_default. Controls outside the bounds are
  /// pulled inside.
  SolverResult Solve(const std::vector<Eigen::VectorXd>& xs_init = {},
                     const std::vector<Eigen::VectorXd>& us_init = {});

  const Squash& squash() const { return squash_; }

 private:
  void Linearize();
  bool BackwardPass();
  void UpdateExpectedImprovement();
  Eigen::Vector2d ExpectedImprovement() const;
  double TryStep(double alpha);

  ShootingProblem problem_;
  SolverOptions options_;
  Squash squash_;
  int T_ = 0;

  std::vector<Eigen::VectorXd> xs_, ws_, us_;
  std::vector<Eigen::VectorXd> xs_try_, ws_try_, us_try_;
  std::vector<ActionData> data_;
  std::vector<Eigen::VectorXd> fs_;
  std::vector<Eigen::VectorXd> vx_, k_, qu_, quuk_;
  std::vector<Eigen::MatrixXd> vxx_, kk_;
  double cost_ = 0.0;
  double reg_ = 1e-9;
  bool feasible_ = false;
  double dg_ = 0.0, dq_ = 0.0;
};

}  // namespace borinot

#endif  // BORINOT_FDDP_HPP_
