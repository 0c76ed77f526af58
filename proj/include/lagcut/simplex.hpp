#pragma once

// Dense bounded-variable primal simplex.
//
// Solves   min c^T x   s.t.  a_r x (>=|<=|=) b_r,   l <= x <= u
// with l and u possibly infinite. Every row gets a slack s_r = a_r x whose
// bounds encode the row sense, so the problem becomes "box constraints on
// (x, s)". The method keeps a condensed tableau expressing the m basic
// variables in terms of the n nonbasic ones (an m x n array), which is cheap
// for the master problems here: many cuts, few multipliers.
//
// Phase 1 minimises the sum of bound violations of basic variables (short
// steps: an infeasible variable leaves as soon as it reaches its violated
// bound). Pricing is Dantzig's rule until a run of degenerate pivots exceeds
// a threshold; from then on Bland's rule is used for the rest of the solve,
// which rules out cycling. The tableau is rebuilt from the original rows
// periodically and before optimality is declared.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lagcut/model.hpp"

namespace lagcut {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { greater_equal, less_equal, equal };

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

inline std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration-limit";
    case LpStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> matrix;  // row-major, num_rows() x num_vars
  std::vector<RowSense> senses;
  std::vector<double> rhs;
  std::vector<std::uint8_t> start_at_upper;  // optional per-variable hint

  LinearProgram() = default;
  explicit LinearProgram(std::size_t n)
      : num_vars(n), objective(n, 0.0), lower(n, 0.0), upper(n, kInf) {}

  std::size_t num_rows() const noexcept { return rhs.size(); }

  void add_row(std::span<const double> coeffs, RowSense sense, double b) {
    if (coeffs.size() != num_vars) throw InputError("row length does not match variable count");
    matrix.insert(matrix.end(), coeffs.begin(), coeffs.end());
    senses.push_back(sense);
    rhs.push_back(b);
  }

  double coefficient(std::size_t row, std::size_t col) const {
    return matrix[row * num_vars + col];
  }
};

struct SimplexOptions {
  std::size_t max_iterations = 200000;
  std::size_t degenerate_threshold = 50;
  std::size_t reinvert_every = 100;
  double pivot_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
};

struct LpSolution {
  LpStatus status = LpStatus::numerical_failure;
  std::vector<double> x;
  std::vector<double> row_duals;  // d objective / d rhs_r at the optimum
  double objective = 0.0;
  std::size_t iterations = 0;
  bool bland_engaged = false;
  std::string diagnostics;
};

namespace detail {

class DenseSimplex {
 public:
  DenseSimplex(const LinearProgram& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), n_(lp.num_vars), m_(lp.num_rows()) {
    validate();
    const std::size_t total = n_ + m_;
    lo_.resize(total);
    up_.resize(total);
    cost_.assign(total, 0.0);
    value_.assign(total, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lp.lower[j];
      up_[j] = lp.upper[j];
      cost_[j] = lp.objective[j];
    }
    for (std::size_t r = 0; r < m_; ++r) {
      const double b = lp.rhs[r];
      switch (lp.senses[r]) {
        case RowSense::greater_equal: lo_[n_ + r] = b; up_[n_ + r] = kInf; break;
        case RowSense::less_equal: lo_[n_ + r] = -kInf; up_[n_ + r] = b; break;
        case RowSense::equal: lo_[n_ + r] = b; up_[n_ + r] = b; break;
      }
    }
    nonbasic_.resize(n_);
    basic_.resize(m_);
    is_basic_.assign(total, 0);
    slot_.assign(total, 0);
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      slot_[j] = j;
      const bool hint_upper = j < lp.start_at_upper.size() && lp.start_at_upper[j];
      if (hint_upper && std::isfinite(up_[j])) value_[j] = up_[j];
      else if (std::isfinite(lo_[j])) value_[j] = lo_[j];
      else if (std::isfinite(up_[j])) value_[j] = up_[j];
      else value_[j] = 0.0;
    }
    for (std::size_t r = 0; r < m_; ++r) {
      basic_[r] = n_ + r;
      is_basic_[n_ + r] = 1;
      slot_[n_ + r] = r;
    }
    tableau_ = lp.matrix;
    recompute_basic_values();
  }

  LpSolution solve() {
    LpSolution out;
    std::size_t degenerate_run = 0;
    std::size_t since_reinvert = 0;
    bool verified = false;
    while (true) {
      if (iterations_ >= opt_.max_iterations) {
        out.status = LpStatus::iteration_limit;
        break;
      }
      const bool phase1 = any_infeasible();
      compute_reduced_costs(phase1);
      const std::ptrdiff_t k = choose_entering();
      if (k < 0) {
        if (since_reinvert > 0 && !verified) {
          if (!reinvert()) return failure("singular basis during reinversion");
          since_reinvert = 0;
          verified = true;
          continue;
        }
        out.status = phase1 ? LpStatus::infeasible : LpStatus::optimal;
        break;
      }
      verified = false;
      const int step = step_and_pivot(static_cast<std::size_t>(k), phase1);
      if (step < 0) {
        out.status = LpStatus::unbounded;
        break;
      }
      ++iterations_;
      degenerate_run = (step == 0) ? degenerate_run + 1 : 0;
      if (degenerate_run > opt_.degenerate_threshold) bland_ = true;
      if (++since_reinvert >= opt_.reinvert_every) {
        if (!reinvert()) return failure("singular basis during reinversion");
        since_reinvert = 0;
      }
    }
    out.iterations = iterations_;
    out.bland_engaged = bland_;
    out.x.assign(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(n_));
    out.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) out.objective += cost_[j] * out.x[j];
    out.row_duals.assign(m_, 0.0);
    if (out.status == LpStatus::optimal) {
      compute_reduced_costs(false);
      for (std::size_t r = 0; r < m_; ++r)
        if (!is_basic_[n_ + r]) out.row_duals[r] = reduced_[slot_[n_ + r]];
    }
    return out;
  }

 private:
  void validate() const {
    if (lp_.objective.size() != n_ || lp_.lower.size() != n_ || lp_.upper.size() != n_)
      throw InputError("LP vectors must have one entry per variable");
    if (lp_.matrix.size() != n_ * m_ || lp_.senses.size() != m_)
      throw InputError("LP matrix dimensions are inconsistent");
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isnan(lp_.lower[j]) || std::isnan(lp_.upper[j]) || lp_.lower[j] > lp_.upper[j])
        throw InputError("LP variable bounds are invalid");
      if (!std::isfinite(lp_.objective[j])) throw InputError("LP objective must be finite");
    }
    for (double v : lp_.matrix)
      if (!std::isfinite(v)) throw InputError("LP matrix entries must be finite");
    for (double v : lp_.rhs)
      if (!std::isfinite(v)) throw InputError("LP rhs must be finite");
  }

  LpSolution failure(std::string why) const {
    LpSolution out;
    out.status = LpStatus::numerical_failure;
    out.iterations = iterations_;
    out.bland_engaged = bland_;
    out.diagnostics = std::move(why);
    out.x.assign(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(n_));
    return out;
  }

  double tol_for(double bound) const {
    return opt_.feasibility_tolerance * (1.0 + (std::isfinite(bound) ? std::abs(bound) : 0.0));
  }
  bool below(std::size_t v) const { return value_[v] < lo_[v] - tol_for(lo_[v]); }
  bool above(std::size_t v) const { return value_[v] > up_[v] + tol_for(up_[v]); }

  bool any_infeasible() const {
    for (std::size_t r = 0; r < m_; ++r)
      if (below(basic_[r]) || above(basic_[r])) return true;
    return false;
  }

  void recompute_basic_values() {
    for (std::size_t r = 0; r < m_; ++r) {
      const double* row = &tableau_[r * n_];
      double v = 0.0;
      for (std::size_t k = 0; k < n_; ++k) v += row[k] * value_[nonbasic_[k]];
      value_[basic_[r]] = v;
    }
  }

  void compute_reduced_costs(bool phase1) {
    reduced_.assign(n_, 0.0);
    if (!phase1)
      for (std::size_t k = 0; k < n_; ++k) reduced_[k] = cost_[nonbasic_[k]];
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t v = basic_[r];
      double w;
      if (phase1) w = below(v) ? -1.0 : (above(v) ? 1.0 : 0.0);
      else w = cost_[v];
      if (w == 0.0) continue;
      const double* row = &tableau_[r * n_];
      for (std::size_t k = 0; k < n_; ++k) reduced_[k] += w * row[k];
    }
  }

  std::ptrdiff_t choose_entering() const {
    double scale = 1.0;
    for (double d : reduced_) scale = std::max(scale, std::abs(d) * 1e-3);
    const double tol = opt_.optimality_tolerance * scale;
    std::ptrdiff_t best = -1;
    double best_mag = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t v = nonbasic_[k];
      const double d = reduced_[k];
      const bool can_up = value_[v] < up_[v];
      const bool can_down = value_[v] > lo_[v];
      const bool eligible = (d < -tol && can_up) || (d > tol && can_down);
      if (!eligible) continue;
      if (bland_) {
        if (best < 0 || v < nonbasic_[static_cast<std::size_t>(best)]) best = static_cast<std::ptrdiff_t>(k);
      } else if (std::abs(d) > best_mag) {
        best_mag = std::abs(d);
        best = static_cast<std::ptrdiff_t>(k);
      }
    }
    return best;
  }

  // Returns -1 when unbounded, 0 for a degenerate step, 1 otherwise.
  int step_and_pivot(std::size_t k, bool phase1) {
    const std::size_t q = nonbasic_[k];
    const double sigma = reduced_[k] < 0.0 ? 1.0 : -1.0;
    double theta = kInf;
    std::ptrdiff_t leave = -1;
    double leave_target = 0.0;
    double leave_alpha = 0.0;
    if (std::isfinite(up_[q]) && std::isfinite(lo_[q])) theta = up_[q] - lo_[q];
    for (std::size_t r = 0; r < m_; ++r) {
      const double alpha = sigma * tableau_[r * n_ + k];
      if (std::abs(alpha) < opt_.pivot_tolerance) continue;
      const std::size_t v = basic_[r];
      const double x = value_[v];
      double t = kInf, target = 0.0;
      if (phase1 && below(v)) {
        if (alpha > 0.0) { t = (lo_[v] - x) / alpha; target = lo_[v]; }
      } else if (phase1 && above(v)) {
        if (alpha < 0.0) { t = (up_[v] - x) / alpha; target = up_[v]; }
      } else if (alpha > 0.0 && std::isfinite(up_[v])) {
        t = (up_[v] - x) / alpha; target = up_[v];
      } else if (alpha < 0.0 && std::isfinite(lo_[v])) {
        t = (lo_[v] - x) / alpha; target = lo_[v];
      }
      if (!std::isfinite(t)) continue;
      t = std::max(t, 0.0);
      const double tie = 1e-12 * (1.0 + std::abs(t));
      bool take = false;
      if (t < theta - tie) {
        take = true;
      } else if (t <= theta + tie && leave >= 0) {
        take = bland_ ? v < basic_[static_cast<std::size_t>(leave)]
                      : std::abs(alpha) > std::abs(leave_alpha);
      }
      if (take) {
        theta = t;
        leave = static_cast<std::ptrdiff_t>(r);
        leave_target = target;
        leave_alpha = alpha;
      }
    }
    if (!std::isfinite(theta)) return -1;

    value_[q] += sigma * theta;
    for (std::size_t r = 0; r < m_; ++r)
      value_[basic_[r]] += sigma * theta * tableau_[r * n_ + k];

    if (leave < 0) {
      // bound flip of the entering variable
      value_[q] = sigma > 0.0 ? up_[q] : lo_[q];
      return theta > 0.0 ? 1 : 0;
    }
    const std::size_t p = static_cast<std::size_t>(leave);
    value_[basic_[p]] = leave_target;
    pivot(p, k);
    return theta > 1e-12 ? 1 : 0;
  }

  void pivot(std::size_t p, std::size_t k) {
    double* prow = &tableau_[p * n_];
    const double piv = prow[k];
    for (std::size_t j = 0; j < n_; ++j) prow[j] = -prow[j] / piv;
    prow[k] = 1.0 / piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == p) continue;
      double* row = &tableau_[i * n_];
      const double f = row[k];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) row[j] += f * prow[j];
      row[k] = f * prow[k];
    }
    const std::size_t entering = nonbasic_[k];
    const std::size_t leaving = basic_[p];
    basic_[p] = entering;
    nonbasic_[k] = leaving;
    is_basic_[entering] = 1;
    is_basic_[leaving] = 0;
    slot_[entering] = p;
    slot_[leaving] = k;
  }

  // Rebuilds the tableau from the original rows for the current basis.
  bool reinvert() {
    std::vector<std::size_t> rows_nb;   // rows whose slack is nonbasic
    std::vector<std::size_t> cols_b;    // basic structural columns
    for (std::size_t k = 0; k < n_; ++k)
      if (nonbasic_[k] >= n_) rows_nb.push_back(nonbasic_[k] - n_);
    for (std::size_t r = 0; r < m_; ++r)
      if (basic_[r] < n_) cols_b.push_back(basic_[r]);
    const std::size_t b = rows_nb.size();
    if (cols_b.size() != b) return false;

    // inverse of B = A[rows_nb, cols_b] by Gauss-Jordan with partial pivoting
    std::vector<double> work(b * b), inv(b * b, 0.0);
    for (std::size_t a = 0; a < b; ++a) {
      for (std::size_t c = 0; c < b; ++c) work[a * b + c] = lp_.coefficient(rows_nb[a], cols_b[c]);
      inv[a * b + a] = 1.0;
    }
    for (std::size_t col = 0; col < b; ++col) {
      std::size_t piv = col;
      double best = std::abs(work[col * b + col]);
      for (std::size_t r = col + 1; r < b; ++r)
        if (std::abs(work[r * b + col]) > best) { best = std::abs(work[r * b + col]); piv = r; }
      if (best < 1e-13) return false;
      if (piv != col)
        for (std::size_t c = 0; c < b; ++c) {
          std::swap(work[piv * b + c], work[col * b + c]);
          std::swap(inv[piv * b + c], inv[col * b + c]);
        }
      const double d = work[col * b + col];
      for (std::size_t c = 0; c < b; ++c) { work[col * b + c] /= d; inv[col * b + c] /= d; }
      for (std::size_t r = 0; r < b; ++r) {
        if (r == col) continue;
        const double f = work[r * b + col];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < b; ++c) {
          work[r * b + c] -= f * work[col * b + c];
          inv[r * b + c] -= f * inv[col * b + c];
        }
      }
    }
    // position of each nonbasic slack row inside rows_nb
    std::vector<std::size_t> nb_pos(m_, 0);
    for (std::size_t a = 0; a < b; ++a) nb_pos[rows_nb[a]] = a;

    // H: basic structurals in terms of nonbasic slots (b x n)
    std::vector<double> h(b * n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t v = nonbasic_[k];
      if (v >= n_) {
        const std::size_t a = nb_pos[v - n_];
        for (std::size_t c = 0; c < b; ++c) h[c * n_ + k] = inv[c * b + a];
      } else {
        for (std::size_t c = 0; c < b; ++c) {
          double s = 0.0;
          for (std::size_t a = 0; a < b; ++a) s += inv[c * b + a] * lp_.coefficient(rows_nb[a], v);
          h[c * n_ + k] = -s;
        }
      }
    }
    std::vector<std::size_t> col_pos(n_, 0);
    for (std::size_t c = 0; c < b; ++c) col_pos[cols_b[c]] = c;
    for (std::size_t r = 0; r < m_; ++r) {
      double* row = &tableau_[r * n_];
      const std::size_t v = basic_[r];
      if (v < n_) {
        const std::size_t c = col_pos[v];
        for (std::size_t k = 0; k < n_; ++k) row[k] = h[c * n_ + k];
      } else {
        const std::size_t orig = v - n_;
        for (std::size_t k = 0; k < n_; ++k) {
          const std::size_t nv = nonbasic_[k];
          row[k] = nv < n_ ? lp_.coefficient(orig, nv) : 0.0;
        }
        for (std::size_t c = 0; c < b; ++c) {
          const double a = lp_.coefficient(orig, cols_b[c]);
          if (a == 0.0) continue;
          for (std::size_t k = 0; k < n_; ++k) row[k] += a * h[c * n_ + k];
        }
      }
    }
    recompute_basic_values();
    return true;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  std::size_t n_, m_;
  std::vector<double> lo_, up_, cost_, value_, reduced_;
  std::vector<std::size_t> nonbasic_, basic_, slot_;
  std::vector<std::uint8_t> is_basic_;
  std::vector<double> tableau_;
  std::size_t iterations_ = 0;
  bool bland_ = false;
};

}  // namespace detail

inline LpSolution simplex_solve(const LinearProgram& lp, const SimplexOptions& options = {}) {
  return detail::DenseSimplex(lp, options).solve();
}

}  // namespace lagcut
