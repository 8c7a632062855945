#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace riskpat::stats {

// Direction of the one-sided rank test. `greater` asks whether the inside
// sample is stochastically greater than the outside sample.
enum class Alternative { greater, less };

struct MannWhitneyResult {
  // Pairs (inside, outside) with inside > outside; ties count 1/2.
  double u_inside = 0.0;
  double u_outside = 0.0;
  // Tie-corrected normal deviate (U - nm/2) / sigma, without continuity
  // correction. Zero for degenerate samples.
  double z = 0.0;
  double p_one_sided = 0.5;
  // ln(p_one_sided), finite even where p underflows to 0.
  double log_p = -0.6931471805599453;
  std::size_t n_inside = 0;
  std::size_t n_outside = 0;
  bool exact = false;
  // All pooled values identical; p is fixed at 0.5.
  bool degenerate = false;
};

// Exact permutation p-value (midranks, so ties are handled) when both
// samples have at most this many values; normal approximation otherwise.
inline constexpr std::size_t kExactLimit = 8;

// Throws riskpat::Error if either sample is empty.
MannWhitneyResult mann_whitney(std::span<const double> inside, std::span<const double> outside,
                               Alternative alt = Alternative::greater);

// The normal approximation regardless of sample size; used to measure how
// far it strays from the exact p-value on small samples.
MannWhitneyResult mann_whitney_normal(std::span<const double> inside,
                                      std::span<const double> outside,
                                      Alternative alt = Alternative::greater);

// A pooled sample ranked once, then tested against many inside/outside
// splits. Results are identical to mann_whitney() on the same split.
class RankedSample {
 public:
  explicit RankedSample(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double value(std::size_t i) const { return values_[i]; }
  double midrank(std::size_t i) const { return midranks_[i]; }

  // `inside` lists positions into the pooled sample; every other position is
  // outside. Positions must be distinct.
  MannWhitneyResult test(std::span<const std::size_t> inside,
                         Alternative alt = Alternative::greater) const;
  // Same test from the inside rank sum alone. Only valid outside the exact
  // regime (n_in or n_out above kExactLimit); throws otherwise.
  MannWhitneyResult test_rank_sum(double rank_sum, std::size_t n_in,
                                  Alternative alt = Alternative::greater) const;

 private:
  std::vector<double> values_;
  std::vector<double> midranks_;
  double tie_term_ = 0.0;  // sum over tie groups of t^3 - t
  bool all_tied_ = false;
};

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 1;
  double p = 1.0;
  double log_p = 0.0;
};

using CountTable = std::vector<std::vector<long long>>;

// Pearson chi-square test of independence. Throws on a table smaller than
// 2x2, ragged rows, negative counts, or a zero row/column marginal.
ChiSquareResult chi_square_independence(const CountTable& table);

// Upper tail of the chi-square distribution via the regularized incomplete
// gamma function Q(df/2, x/2).
double chi_square_sf(double x, int df);
double chi_square_log_sf(double x, int df);

double normal_sf(double z);
double normal_log_sf(double z);

// Regularized upper incomplete gamma Q(a, x) and its logarithm.
double gamma_q(double a, double x);
double log_gamma_q(double a, double x);

// Benjamini-Hochberg step-up adjustment; output is aligned with the input.
std::vector<double> bh_adjust(std::span<const double> p_values);

}  // namespace riskpat::stats
