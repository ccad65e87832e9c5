#pragma once

// Reference computations used to check the library. None of these call into
// the code they verify.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace navseg::support {

using Labels = std::vector<int>;  // block label of element i

/// Adjusted Rand index from raw pair agreement counts:
/// a = together in both, b = together only in x, c = together only in y,
/// d = apart in both.
inline double ari_by_pairs(const Labels& x, const Labels& y) {
  double a = 0, b = 0, c = 0, d = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      bool sx = x[i] == x[j], sy = y[i] == y[j];
      if (sx && sy) ++a;
      else if (sx) ++b;
      else if (sy) ++c;
      else ++d;
    }
  double den = (a + b) * (b + d) + (a + c) * (c + d);
  if (den == 0) return 1.0;
  return 2.0 * (a * d - b * c) / den;
}

inline std::map<int, std::size_t> sizes_of(const Labels& x) {
  std::map<int, std::size_t> m;
  for (int l : x) ++m[l];
  return m;
}

inline long double entropy_of(const Labels& x) {
  long double h = 0, n = static_cast<long double>(x.size());
  for (auto [_, s] : sizes_of(x)) h -= (s / n) * std::log(s / n);
  return h;
}

inline long double mutual_info_of(const Labels& x, const Labels& y) {
  std::map<std::pair<int, int>, std::size_t> joint;
  for (std::size_t i = 0; i < x.size(); ++i) ++joint[{x[i], y[i]}];
  auto sx = sizes_of(x), sy = sizes_of(y);
  long double n = static_cast<long double>(x.size()), mi = 0;
  for (auto [k, c] : joint) mi += (c / n) * std::log(n * c / (static_cast<long double>(sx[k.first]) * sy[k.second]));
  return mi;
}

inline long double binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  long double r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return r;
}

/// E[MI] with hypergeometric cell probabilities written as ratios of
/// binomial coefficients.
inline long double emi_hypergeometric(const Labels& x, const Labels& y) {
  const std::uint64_t n = x.size();
  long double emi = 0, nd = static_cast<long double>(n);
  for (auto [_, a] : sizes_of(x))
    for (auto [__, b] : sizes_of(y))
      for (std::uint64_t k = 1; k <= std::min(a, b); ++k) {
        if (a + b > n + k) continue;
        long double p = binomial(a, k) * binomial(n - a, b - k) / binomial(n, b);
        emi += p * (k / nd) * std::log(nd * k / (static_cast<long double>(a) * b));
      }
  return emi;
}

/// E[MI] by averaging MI over every relabelling permutation of y.
inline long double emi_by_permutation(const Labels& x, const Labels& y) {
  std::vector<std::size_t> perm(y.size());
  std::iota(perm.begin(), perm.end(), 0);
  long double total = 0;
  std::size_t count = 0;
  do {
    Labels py(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) py[i] = y[perm[i]];
    total += mutual_info_of(x, py);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total / static_cast<long double>(count);
}

inline double ami_reference(const Labels& x, const Labels& y, bool by_permutation = false) {
  if (x == y) return 1.0;
  auto sx = sizes_of(x), sy = sizes_of(y);
  if (sx.size() == 1 && sy.size() == 1) return 1.0;
  long double emi = by_permutation ? emi_by_permutation(x, y) : emi_hypergeometric(x, y);
  long double mi = mutual_info_of(x, y);
  long double norm = (entropy_of(x) + entropy_of(y)) / 2;
  long double den = norm - emi;
  constexpr long double kTiny = 2.220446049250313e-16L;
  if (den < 0) den = std::min(den, -kTiny);
  else den = std::max(den, kTiny);
  return static_cast<double>((mi - emi) / den);
}

/// Every set partition of {0..n-1} as restricted growth strings.
inline void for_each_partition(std::size_t n, const std::function<void(const Labels&)>& fn) {
  Labels cur(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
    if (i == n) {
      fn(cur);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      cur[i] = l;
      rec(i + 1, std::max(max_label, l));
    }
  };
  if (n == 0) fn(cur);
  else rec(0, -1);
}

/// Gap threshold by exhaustive scoring with exact integer arithmetic.
/// beta = beta_num / 4.
inline std::uint32_t gap_threshold_by_enumeration(std::vector<std::uint32_t> link_indices, std::int64_t beta_num) {
  std::sort(link_indices.begin(), link_indices.end());
  std::vector<std::uint32_t> dl;
  for (std::size_t i = 1; i < link_indices.size(); ++i) dl.push_back(link_indices[i] - link_indices[i - 1]);
  dl.push_back(0);
  std::sort(dl.rbegin(), dl.rend());
  if (dl[0] == 0) return 0;
  // score_i * 4 * n * dl[0] = 4 * n * dl[i] + beta_num * i * dl[0], i 1-based.
  const __int128 n = static_cast<__int128>(dl.size());
  std::size_t best = 0;
  __int128 best_score = 0;
  for (std::size_t i = 0; i < dl.size(); ++i) {
    __int128 s = 4 * n * dl[i] + static_cast<__int128>(beta_num) * static_cast<__int128>(i + 1) * dl[0];
    if (i == 0 || s < best_score) {
      best = i;
      best_score = s;
    }
  }
  return dl[best];
}

/// Soft-margin SVM dual
///   max 1'a - 1/2 a'Qa  s.t.  y'a = 0, 0 <= a <= C,  Q_ij = y_i y_j K(x_i, x_j)
/// solved by a primal-dual interior-point method on dense matrices.
struct QpSolution {
  std::vector<double> alpha;
  double objective = 0.0;
  double duality_gap = 0.0;
};

inline QpSolution svm_dual_by_interior_point(const std::vector<std::array<double, 3>>& x,
                                             const std::vector<int>& y, double c, double gamma) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd q(n, n);
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    yv(i) = y[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      double d2 = 0;
      for (int k = 0; k < 3; ++k) {
        double d = x[static_cast<std::size_t>(i)][k] - x[static_cast<std::size_t>(j)][k];
        d2 += d * d;
      }
      q(i, j) = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] * std::exp(-gamma * d2);
    }
  }
  // Minimize 1/2 a'Qa - 1'a with multipliers z (a >= 0), w (C - a >= 0), b.
  Eigen::VectorXd a = Eigen::VectorXd::Constant(n, c / 2), z = Eigen::VectorXd::Ones(n),
                  w = Eigen::VectorXd::Ones(n);
  double b = 0;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  double gap = 0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd s = Eigen::VectorXd::Constant(n, c) - a;
    gap = a.dot(z) + s.dot(w);
    Eigen::VectorXd rd = q * a - ones + b * yv - z + w;
    double rp = yv.dot(a);
    if (gap < 1e-12 * n && rd.lpNorm<Eigen::Infinity>() < 1e-10 && std::abs(rp) < 1e-10) break;
    double mu = 0.1 * gap / (2.0 * static_cast<double>(n));
    Eigen::VectorXd dz_over = z.cwiseQuotient(a), dw_over = w.cwiseQuotient(s);
    Eigen::MatrixXd m = q;
    m.diagonal() += dz_over + dw_over;
    Eigen::VectorXd r = -rd + (Eigen::VectorXd::Constant(n, mu) - a.cwiseProduct(z)).cwiseQuotient(a) -
                        (Eigen::VectorXd::Constant(n, mu) - s.cwiseProduct(w)).cwiseQuotient(s);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    Eigen::VectorXd mr = llt.solve(r), my = llt.solve(yv);
    double db = (yv.dot(mr) + rp) / yv.dot(my);
    Eigen::VectorXd da = mr - db * my;
    Eigen::VectorXd dz = (Eigen::VectorXd::Constant(n, mu) - a.cwiseProduct(z) - z.cwiseProduct(da)).cwiseQuotient(a);
    Eigen::VectorXd dw = (Eigen::VectorXd::Constant(n, mu) - s.cwiseProduct(w) + w.cwiseProduct(da)).cwiseQuotient(s);
    double step = 1.0;
    auto limit = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      for (Eigen::Index i = 0; i < n; ++i)
        if (dv(i) < 0) step = std::min(step, -0.99 * v(i) / dv(i));
    };
    limit(a, da);
    limit(s, -da);
    limit(z, dz);
    limit(w, dw);
    a += step * da;
    z += step * dz;
    w += step * dw;
    b += step * db;
  }
  QpSolution out;
  out.alpha.assign(a.data(), a.data() + n);
  out.objective = a.sum() - 0.5 * a.dot(q * a);
  out.duality_gap = gap;
  return out;
}

}  // namespace navseg::support
