#include "riskpat/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "riskpat/error.hpp"

namespace riskpat::stats {
namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Ranking {
  std::vector<double> midranks;
  double tie_term = 0.0;
  bool all_tied = false;
};

Ranking rank_pooled(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Ranking r;
  r.midranks.assign(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) r.midranks[order[k]] = mid;
    const double t = static_cast<double>(j - i);
    r.tie_term += t * t * t - t;
    if (i == 0 && j == n) r.all_tied = true;
    i = j;
  }
  return r;
}

// Exact permutation distribution of the inside rank sum over all
// C(n_in + n_out, n_in) label assignments. Ranks are doubled so midranks stay
// integral and comparisons are exact.
double exact_p(const std::vector<double>& midranks, std::span<const std::size_t> inside,
               Alternative alt) {
  const std::size_t total = midranks.size();
  const std::size_t n_in = inside.size();
  std::vector<std::int64_t> doubled(total);
  for (std::size_t i = 0; i < total; ++i) doubled[i] = std::llround(2.0 * midranks[i]);
  std::int64_t observed = 0;
  for (const auto pos : inside) observed += doubled[pos];

  std::uint64_t hits = 0;
  std::uint64_t count = 0;
  const std::uint32_t limit = std::uint32_t{1} << total;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != n_in) continue;
    std::int64_t sum = 0;
    for (std::uint32_t bits = mask; bits; bits &= bits - 1) sum += doubled[std::countr_zero(bits)];
    ++count;
    if (alt == Alternative::greater ? sum >= observed : sum <= observed) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(count);
}

MannWhitneyResult finish(double rank_sum, std::size_t n_in, std::size_t n_out, bool all_tied) {
  MannWhitneyResult r;
  r.n_inside = n_in;
  r.n_outside = n_out;
  const double n = static_cast<double>(n_in);
  const double m = static_cast<double>(n_out);
  r.u_inside = rank_sum - n * (n + 1.0) / 2.0;
  r.u_outside = n * m - r.u_inside;
  if (all_tied) {
    r.degenerate = true;
    r.z = 0.0;
    r.p_one_sided = 0.5;
    r.log_p = -kLn2;
  }
  return r;
}

MannWhitneyResult normal_approximation(double rank_sum, std::size_t n_in, std::size_t n_out,
                                       double tie_term, bool all_tied, Alternative alt) {
  MannWhitneyResult r = finish(rank_sum, n_in, n_out, all_tied);
  if (r.degenerate) return r;
  const double n = static_cast<double>(n_in);
  const double m = static_cast<double>(n_out);
  const double total = n + m;
  const double mean = n * m / 2.0;
  const double var = n * m / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
  const double sd = std::sqrt(var);
  r.z = (r.u_inside - mean) / sd;
  // Continuity correction of 1/2 toward the null mean.
  const double z_upper = alt == Alternative::greater ? (r.u_inside - mean - 0.5) / sd
                                                     : (mean - r.u_inside - 0.5) / sd;
  r.p_one_sided = normal_sf(z_upper);
  r.log_p = normal_log_sf(z_upper);
  return r;
}

}  // namespace

MannWhitneyResult mann_whitney(std::span<const double> inside, std::span<const double> outside,
                               Alternative alt) {
  if (inside.empty() || outside.empty()) {
    throw Error("mann_whitney: both samples must be non-empty");
  }
  std::vector<double> pooled(inside.begin(), inside.end());
  pooled.insert(pooled.end(), outside.begin(), outside.end());
  std::vector<std::size_t> positions(inside.size());
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  return RankedSample(std::move(pooled)).test(positions, alt);
}

MannWhitneyResult mann_whitney_normal(std::span<const double> inside,
                                      std::span<const double> outside, Alternative alt) {
  if (inside.empty() || outside.empty()) {
    throw Error("mann_whitney: both samples must be non-empty");
  }
  std::vector<double> pooled(inside.begin(), inside.end());
  pooled.insert(pooled.end(), outside.begin(), outside.end());
  const auto ranking = rank_pooled(pooled);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < inside.size(); ++i) rank_sum += ranking.midranks[i];
  return normal_approximation(rank_sum, inside.size(), outside.size(), ranking.tie_term,
                              ranking.all_tied, alt);
}

RankedSample::RankedSample(std::vector<double> values) : values_(std::move(values)) {
  auto ranking = rank_pooled(values_);
  midranks_ = std::move(ranking.midranks);
  tie_term_ = ranking.tie_term;
  all_tied_ = ranking.all_tied;
}

MannWhitneyResult RankedSample::test(std::span<const std::size_t> inside, Alternative alt) const {
  const std::size_t n_in = inside.size();
  if (n_in == 0 || n_in >= values_.size()) {
    throw Error("mann_whitney: both samples must be non-empty");
  }
  const std::size_t n_out = values_.size() - n_in;
  double rank_sum = 0.0;
  for (const auto pos : inside) rank_sum += midranks_[pos];

  if (n_in <= kExactLimit && n_out <= kExactLimit) {
    MannWhitneyResult r = finish(rank_sum, n_in, n_out, all_tied_);
    if (r.degenerate) return r;
    const double n = static_cast<double>(n_in);
    const double m = static_cast<double>(n_out);
    const double var =
        n * m / 12.0 * ((n + m + 1.0) - tie_term_ / ((n + m) * (n + m - 1.0)));
    r.z = (r.u_inside - n * m / 2.0) / std::sqrt(var);
    r.exact = true;
    r.p_one_sided = exact_p(midranks_, inside, alt);
    r.log_p = std::log(r.p_one_sided);
    return r;
  }
  return normal_approximation(rank_sum, n_in, n_out, tie_term_, all_tied_, alt);
}

MannWhitneyResult RankedSample::test_rank_sum(double rank_sum, std::size_t n_in,
                                                Alternative alt) const {
  if (n_in == 0 || n_in >= values_.size()) {
    throw Error("mann_whitney: both samples must be non-empty");
  }
  const std::size_t n_out = values_.size() - n_in;
  if (n_in <= kExactLimit && n_out <= kExactLimit) {
    throw Error("mann_whitney: rank-sum shortcut used in the exact regime");
  }
  return normal_approximation(rank_sum, n_in, n_out, tie_term_, all_tied_, alt);
}

ChiSquareResult chi_square_independence(const CountTable& table) {
  const std::size_t rows = table.size();
  if (rows < 2 || table.front().size() < 2) {
    throw Error("chi_square: table must be at least 2x2");
  }
  const std::size_t cols = table.front().size();
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (table[i].size() != cols) throw Error("chi_square: ragged table");
    for (std::size_t j = 0; j < cols; ++j) {
      if (table[i][j] < 0) throw Error("chi_square: negative count");
      const auto c = static_cast<double>(table[i][j]);
      row_sum[i] += c;
      col_sum[j] += c;
      total += c;
    }
  }
  const auto zero = [](double v) { return v == 0.0; };
  if (std::any_of(row_sum.begin(), row_sum.end(), zero) ||
      std::any_of(col_sum.begin(), col_sum.end(), zero)) {
    throw Error("degenerate contingency table");
  }

  ChiSquareResult r;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_sum[i] * col_sum[j] / total;
      const double diff = static_cast<double>(table[i][j]) - expected;
      r.statistic += diff * diff / expected;
    }
  }
  r.df = static_cast<int>((rows - 1) * (cols - 1));
  r.p = chi_square_sf(r.statistic, r.df);
  r.log_p = chi_square_log_sf(r.statistic, r.df);
  return r;
}

// Series expansion of the lower regularized gamma P(a, x); valid for x < a + 1.
static double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// ln Q(a, x) by Lentz's continued fraction; valid for x >= a + 1.
static double log_gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

double log_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw Error("gamma_q: requires a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::log1p(-gamma_p_series(a, x));
  return log_gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) { return std::exp(log_gamma_q(a, x)); }

double chi_square_sf(double x, int df) { return std::exp(chi_square_log_sf(x, df)); }

double chi_square_log_sf(double x, int df) {
  if (df <= 0) throw Error("chi_square_sf: df must be positive");
  if (x < 0.0) throw Error("chi_square_sf: x must be non-negative");
  return log_gamma_q(0.5 * df, 0.5 * x);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_log_sf(double z) {
  if (z < 30.0) return std::log(normal_sf(z));
  // Asymptotic tail: phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6).
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(z) - 0.5 * std::log(2.0 * M_PI) + std::log(series);
}

std::vector<double> bh_adjust(std::span<const double> p_values) {
  const std::size_t n = p_values.size();
  std::vector<double> adjusted(n);
  if (n == 0) return adjusted;
  for (const double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("bh_adjust: p-values must lie in [0, 1]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  double running = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    const double scaled = p_values[order[k]] * static_cast<double>(n) / static_cast<double>(k + 1);
    running = std::min(running, scaled);
    adjusted[order[k]] = std::max(running, p_values[order[k]]);
  }
  return adjusted;
}

}  // namespace riskpat::stats
