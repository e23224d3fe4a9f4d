#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mamd::lp {

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

/// maximize c.x subject to rows (sense) rhs, x >= 0.
struct LinearProgram {
  int variables = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Sense> senses;
  std::vector<double> rhs;

  explicit LinearProgram(int n = 0) : variables(n), objective(n, 0.0) {}

  int add_constraint(std::vector<double> coeffs, Sense sense, double bound) {
    if (static_cast<int>(coeffs.size()) != variables) {
      throw std::invalid_argument("constraint width does not match variable count");
    }
    rows.push_back(std::move(coeffs));
    senses.push_back(sense);
    rhs.push_back(bound);
    return static_cast<int>(rows.size()) - 1;
  }

  int constraints() const { return static_cast<int>(rows.size()); }
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration limit";
  }
  return "unknown";
}

struct Solution {
  Status status = Status::kIterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  // One multiplier per constraint: >= 0 for <=, <= 0 for >=, free for =.
  std::vector<double> duals;
  long iterations = 0;
};

struct Options {
  double pivot_tolerance = 1e-9;
  double cost_tolerance = 1e-10;
  double feasibility_tolerance = 1e-9;
  int refactor_every = 50;
  // 0 selects 10 * (rows + cols)^2.
  long iteration_limit = 0;
};

namespace detail {

// Gauss-Jordan inverse with partial pivoting; false if singular.
inline bool invert(std::vector<double>& m, int n) {
  std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[r * n + col]) > std::abs(m[piv * n + col])) piv = r;
    }
    if (std::abs(m[piv * n + col]) < 1e-14) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(m[piv * n + c], m[col * n + c]);
        std::swap(inv[piv * n + c], inv[col * n + c]);
      }
    }
    const double d = m[col * n + col];
    for (int c = 0; c < n; ++c) {
      m[col * n + c] /= d;
      inv[col * n + c] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r * n + col];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        m[r * n + c] -= f * m[col * n + c];
        inv[r * n + c] -= f * inv[col * n + c];
      }
    }
  }
  m.swap(inv);
  return true;
}

/// Revised simplex over equality form A z = b, z >= 0, b >= 0, with an
/// explicit basis inverse and Bland's smallest-index rule.
class RevisedSimplex {
 public:
  RevisedSimplex(int m, int n, std::vector<double> A, std::vector<double> b, const Options& opt)
      : m_(m), n_(n), A_(std::move(A)), b_(std::move(b)), opt_(opt),
        binv_(static_cast<std::size_t>(m) * m, 0.0), xb_(m, 0.0), basis_(m, -1),
        barred_(n, false) {
    limit_ = opt.iteration_limit > 0 ? opt.iteration_limit
                                     : 10L * static_cast<long>(m + n) * (m + n);
  }

  double a(int i, int j) const { return A_[static_cast<std::size_t>(i) * n_ + j]; }

  void set_basis(std::vector<int> basis) {
    basis_ = std::move(basis);
    refactor();
  }

  void bar(int j) { barred_[j] = true; }

  // Runs to optimality for costs c; returns kOptimal, kUnbounded or kIterationLimit.
  Status optimize(std::span<const double> c) {
    std::vector<double> y(m_), u(m_);
    long since_refactor = 0;
    while (true) {
      compute_duals(c, y);
      int entering = -1;
      for (int j = 0; j < n_; ++j) {
        if (barred_[j] || in_basis(j)) continue;
        double d = c[j];
        for (int i = 0; i < m_; ++i) d -= y[i] * a(i, j);
        if (d > opt_.cost_tolerance) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return Status::kOptimal;
      if (iterations_ >= limit_) return Status::kIterationLimit;

      for (int i = 0; i < m_; ++i) {
        double s = 0.0;
        for (int k = 0; k < m_; ++k) s += binv_[i * m_ + k] * a(k, entering);
        u[i] = s;
      }
      int leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (u[i] <= opt_.pivot_tolerance) continue;
        const double ratio = std::max(xb_[i], 0.0) / u[i];
        if (leaving < 0 || ratio < best - 1e-12) {
          best = ratio;
          leaving = i;
        } else if (ratio <= best + 1e-12 && basis_[i] < basis_[leaving]) {
          leaving = i;
        }
      }
      if (leaving < 0) return Status::kUnbounded;
      pivot(leaving, entering, u);
      ++iterations_;
      if (++since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  // Pivots zero-level artificial columns out of the basis where a structural
  // or slack replacement exists. Rows with no replacement are redundant.
  void drive_out(int first_artificial) {
    std::vector<double> u(m_);
    for (int row = 0; row < m_; ++row) {
      if (basis_[row] < first_artificial) continue;
      for (int j = 0; j < first_artificial; ++j) {
        if (barred_[j] || in_basis(j)) continue;
        double v = 0.0;
        for (int k = 0; k < m_; ++k) v += binv_[row * m_ + k] * a(k, j);
        if (std::abs(v) > 1e-7) {
          for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += binv_[i * m_ + k] * a(k, j);
            u[i] = s;
          }
          pivot(row, j, u);
          break;
        }
      }
    }
    refactor();
  }

  void compute_duals(std::span<const double> c, std::vector<double>& y) const {
    for (int k = 0; k < m_; ++k) {
      double s = 0.0;
      for (int i = 0; i < m_; ++i) s += c[basis_[i]] * binv_[i * m_ + k];
      y[k] = s;
    }
  }

  void refactor() {
    std::vector<double> B(static_cast<std::size_t>(m_) * m_);
    for (int i = 0; i < m_; ++i) {
      for (int k = 0; k < m_; ++k) B[i * m_ + k] = a(i, basis_[k]);
    }
    if (!invert(B, m_)) throw std::runtime_error("simplex basis became singular");
    binv_.swap(B);
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      for (int k = 0; k < m_; ++k) s += binv_[i * m_ + k] * b_[k];
      xb_[i] = s;
    }
  }

  std::vector<double> primal() const {
    std::vector<double> z(n_, 0.0);
    for (int i = 0; i < m_; ++i) z[basis_[i]] = xb_[i];
    return z;
  }

  const std::vector<int>& basis() const { return basis_; }
  long iterations() const { return iterations_; }

 private:
  bool in_basis(int j) const { return std::find(basis_.begin(), basis_.end(), j) != basis_.end(); }

  void pivot(int row, int col, const std::vector<double>& u) {
    const double p = u[row];
    for (int k = 0; k < m_; ++k) binv_[row * m_ + k] /= p;
    xb_[row] /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == row || u[i] == 0.0) continue;
      const double f = u[i];
      for (int k = 0; k < m_; ++k) binv_[i * m_ + k] -= f * binv_[row * m_ + k];
      xb_[i] -= f * xb_[row];
    }
    basis_[row] = col;
  }

  int m_;
  int n_;
  std::vector<double> A_;
  std::vector<double> b_;
  Options opt_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  std::vector<int> basis_;
  std::vector<bool> barred_;
  long iterations_ = 0;
  long limit_ = 0;
};

}  // namespace detail

/// Two-phase revised simplex. Phase one minimises the artificial columns of
/// >= and = rows; phase two optimises the true objective with artificials
/// barred from re-entering.
inline Solution solve(const LinearProgram& lp, const Options& opt = {}) {
  const int m = lp.constraints();
  const int nx = lp.variables;

  // Column layout: structural | slack/surplus per inequality | artificial.
  std::vector<int> slack_col(m, -1), art_col(m, -1);
  std::vector<double> sign(m, 1.0);
  int cols = nx;
  for (int i = 0; i < m; ++i) {
    if (lp.senses[i] != Sense::kEqual) slack_col[i] = cols++;
  }
  const int first_art = cols;
  std::vector<Sense> sense(lp.senses);
  for (int i = 0; i < m; ++i) {
    if (lp.rhs[i] < 0.0) {
      sign[i] = -1.0;
      if (sense[i] == Sense::kLessEqual) {
        sense[i] = Sense::kGreaterEqual;
      } else if (sense[i] == Sense::kGreaterEqual) {
        sense[i] = Sense::kLessEqual;
      }
    }
    if (sense[i] != Sense::kLessEqual) art_col[i] = cols++;
  }

  std::vector<double> A(static_cast<std::size_t>(m) * cols, 0.0);
  std::vector<double> b(m);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < nx; ++j) A[i * cols + j] = sign[i] * lp.rows[i][j];
    b[i] = sign[i] * lp.rhs[i];
    if (slack_col[i] >= 0) A[i * cols + slack_col[i]] = sense[i] == Sense::kLessEqual ? 1.0 : -1.0;
    if (art_col[i] >= 0) A[i * cols + art_col[i]] = 1.0;
    basis[i] = sense[i] == Sense::kLessEqual ? slack_col[i] : art_col[i];
  }

  Solution out;
  detail::RevisedSimplex simplex(m, cols, std::move(A), b, opt);
  simplex.set_basis(basis);

  if (first_art < cols) {
    std::vector<double> phase1(cols, 0.0);
    for (int j = first_art; j < cols; ++j) phase1[j] = -1.0;
    const Status s = simplex.optimize(phase1);
    if (s == Status::kIterationLimit) {
      out.status = s;
      out.iterations = simplex.iterations();
      return out;
    }
    const auto z = simplex.primal();
    double infeasibility = 0.0;
    for (int j = first_art; j < cols; ++j) infeasibility += z[j];
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    if (infeasibility > opt.feasibility_tolerance * scale) {
      out.status = Status::kInfeasible;
      out.iterations = simplex.iterations();
      return out;
    }
    for (int j = first_art; j < cols; ++j) simplex.bar(j);
    simplex.drive_out(first_art);
  }

  std::vector<double> c(cols, 0.0);
  for (int j = 0; j < nx; ++j) c[j] = lp.objective[j];
  out.status = simplex.optimize(c);
  out.iterations = simplex.iterations();
  if (out.status != Status::kOptimal) return out;

  simplex.refactor();
  const auto z = simplex.primal();
  out.x.assign(z.begin(), z.begin() + nx);
  for (double& v : out.x) v = std::max(v, 0.0);
  std::vector<double> y(m);
  simplex.compute_duals(c, y);
  out.duals.resize(m);
  for (int i = 0; i < m; ++i) out.duals[i] = sign[i] * y[i];
  out.objective = 0.0;
  for (int j = 0; j < nx; ++j) out.objective += lp.objective[j] * out.x[j];
  return out;
}

}  // namespace mamd::lp
