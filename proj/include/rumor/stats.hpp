#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace rumor {

struct HistogramBin {
  double lower_edge;
  std::uint64_t count;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

class SummaryStats {
public:
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator), 0 for a single sample.
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;
  double bin_width = 1.0;
  std::vector<HistogramBin> histogram;

  std::size_t count() const noexcept { return sorted_.size(); }
  std::span<const double> sorted_samples() const noexcept { return sorted_; }

  /// Nearest-rank percentile, q in [0,1].
  double percentile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile needs q in [0,1]");
    const auto n = sorted_.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted_[rank - 1];
  }

private:
  friend SummaryStats summarize(std::span<const double>, double);
  std::vector<double> sorted_;
};

/// Histogram bins are [k*w, (k+1)*w), anchored at 0.
inline SummaryStats summarize(std::span<const double> samples, double bin_width = 1.0) {
  if (samples.empty()) throw std::invalid_argument("cannot summarize an empty sample");
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  SummaryStats s;
  s.bin_width = bin_width;
  s.sorted_.assign(samples.begin(), samples.end());
  std::sort(s.sorted_.begin(), s.sorted_.end());
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  s.mean = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(ss / (n - 1.0));
  }
  s.min = s.sorted_.front();
  s.max = s.sorted_.back();

  std::map<std::int64_t, std::uint64_t> bins;
  for (double x : s.sorted_) ++bins[static_cast<std::int64_t>(std::floor(x / bin_width))];
  for (const auto& [k, c] : bins) s.histogram.push_back({static_cast<double>(k) * bin_width, c});
  return s;
}

class UndefinedCorrelation : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

struct Correlation {
  double r;
  double r_squared;
};

/// Pearson product-moment correlation.
inline Correlation pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: series lengths differ");
  if (xs.size() < 2) throw UndefinedCorrelation("pearson: need at least two points");
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pearson: constant series");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return {r, r * r};
}

struct TailReport {
  /// Fraction of runs strictly slower than mean + 13.
  double above_mean_plus_13;
  /// Fraction of runs strictly faster than mean + 6.
  double within_mean_plus_6;
  double max_minus_mean;
};

inline TailReport tail_report(const SummaryStats& stats) {
  const auto sorted = stats.sorted_samples();
  const auto n = static_cast<double>(sorted.size());
  const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), stats.mean + 13.0);
  const auto below = std::lower_bound(sorted.begin(), sorted.end(), stats.mean + 6.0) - sorted.begin();
  return {static_cast<double>(above) / n, static_cast<double>(below) / n, stats.max - stats.mean};
}

/// Expected number of vertices of degree < threshold in G(n,p):
/// n * sum_{k<threshold} C(n-1,k) p^k (1-p)^(n-1-k), summed in log domain.
inline double expected_low_degree_count(std::uint64_t n, double p, std::uint64_t threshold) {
  if (n < 2) throw std::invalid_argument("expected_low_degree_count needs n >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("expected_low_degree_count needs p in [0,1]");
  const double trials = static_cast<double>(n - 1);
  double total = 0.0;
  const std::uint64_t upper = std::min<std::uint64_t>(threshold, n);
  for (std::uint64_t k = 0; k < upper; ++k) {
    const double kk = static_cast<double>(k);
    double term;
    if (p == 0.0) {
      term = k == 0 ? 1.0 : 0.0;
    } else if (p == 1.0) {
      term = k == n - 1 ? 1.0 : 0.0;
    } else {
      const double log_choose = std::lgamma(trials + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(trials - kk + 1.0);
      term = std::exp(log_choose + kk * std::log(p) + (trials - kk) * std::log1p(-p));
    }
    total += term;
  }
  return total * static_cast<double>(n);
}

}  // namespace rumor
