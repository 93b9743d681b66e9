#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace iotscan {

/** \brief Inter-arrival statistics of one device (population form). */
struct TrafficStats
{
  double mu_s = 0.0;
  double sigma_s = 0.0;
  std::size_t sample_count = 0;
};

/// Throws ParameterError for fewer than two samples.
TrafficStats traffic_stats (std::span<const double> interarrivals);

/// K+1 sorted timestamps to K inter-arrival times.
std::vector<double> interarrival_times (std::span<const double> timestamps);

/**
 * \brief Per-step outcome probabilities of the discretized traffic model.
 *
 * p[i] is the probability that device i is heard during one step of
 * delta_t_s seconds; p0 = 1 - sum(p) is the null coupon. channel_divisors[i]
 * is the factor by which device i's single-channel probability was divided
 * to account for the scanner being elsewhere.
 */
struct ProbabilityVector
{
  double p0 = 1.0;
  std::vector<double> p;
  double delta_t_s = 0.1;
  std::vector<double> channel_divisors;
};

constexpr double kDefaultDeltaT = 0.1;
constexpr double kDefaultMultiArrivalThreshold = 0.01;
constexpr std::size_t kDefaultEnumerationCap = 24;

/// Pr(Z >= 2) for a Poisson count with mean sum(rates) * delta_t.
double multi_arrival_probability (std::span<const double> rates, double delta_t_s);

/**
 * \brief p_i = (rate_i dt) exp(-rate_i dt) / C, p0 = 1 - sum p_i.
 *
 * Throws ParameterError for non-positive rates, dt or C < 1, and
 * ModelError{DeltaTooCoarse} when Pr(Z >= 2) exceeds `maxMultiArrival`.
 */
ProbabilityVector discretize (std::span<const double> rates, double delta_t_s, double channelCount = 1.0,
                              double maxMultiArrival = kDefaultMultiArrivalThreshold);

/// Per-device divisors, for scans where devices are observable for different fractions of the time.
ProbabilityVector discretize (std::span<const double> rates, double delta_t_s, std::span<const double> channelDivisors,
                              double maxMultiArrival = kDefaultMultiArrivalThreshold);

/// Checks entries in [0,1], N >= 1 and p0 + sum p == 1 within 1e-9.
void validate (const ProbabilityVector& pv);

/**
 * \brief Exact expectation of the n-th order statistic of the non-uniform
 * coupon collector with a null coupon, in seconds.
 *
 * Inclusion-exclusion over all subsets J of the devices:
 *   E[X_{n:N}] = sum_{h<n} (-1)^{n-1-h} C(N-h-1, N-n) sum_{|J|=h} 1/(1 - p0 - P_J)
 * in draws, times delta_t_s. Throws ModelError{Capacity} above `cap` devices
 * and ModelError{Degenerate} when a denominator is not positive.
 */
double expected_order_statistic (const ProbabilityVector& pv, std::size_t n, std::size_t cap = kDefaultEnumerationCap);

/// All n = 1..N in a single subset enumeration.
std::vector<double> expected_order_statistics (const ProbabilityVector& pv, std::size_t cap = kDefaultEnumerationCap);

/**
 * \brief Monte Carlo estimate of E[X_{n:N}] in seconds.
 *
 * Each episode draws i.i.d. outcomes from (p0, p1..pN) until n distinct
 * devices are held. Runs of draws that bring nothing new are sampled in one
 * step from their geometric length. Episodes run in fixed batches seeded by
 * (seed, batch index) and are summed in batch order.
 */
double mc_order_statistic (const ProbabilityVector& pv, std::size_t n, std::size_t episodes, std::uint64_t seed);
std::vector<double> mc_order_statistics (const ProbabilityVector& pv, std::size_t episodes, std::uint64_t seed);

/// 1 / sum(rates): expected first arrival on a continuously monitored channel.
double continuous_min_check (std::span<const double> rates);

/// Two-sided critical value t_{alpha/2, dof}.
double t_quantile (double alpha, std::size_t dof);

/** \brief Cross-trial statistics of one order statistic. */
struct OrderStatRow
{
  std::size_t n = 0;
  double mean_s = 0.0;
  double std_s = 0.0;
  double ci_halfwidth_s = 0.0;
  std::size_t trial_count = 0;
  /// Trials in which fewer than n devices were found. Statistics use the rest.
  std::size_t censored_count = 0;

  bool censored () const { return censored_count > 0; }
  double ci_lo () const { return mean_s - ci_halfwidth_s; }
  double ci_hi () const { return mean_s + ci_halfwidth_s; }
};

struct OrderStatSummary
{
  std::vector<OrderStatRow> rows;
  double alpha = 0.05;
};

/// Per-device first-seen times of one trial; nullopt for undiscovered devices.
using TrialTimes = std::vector<std::optional<double>>;

/**
 * \brief Sample mean, sample standard deviation (1/(M-1)) and t confidence
 * half-width of each order statistic across trials.
 *
 * Throws ParameterError without trials or if trials disagree on N.
 * Rows with fewer than 2 uncensored values carry NaN statistics.
 */
OrderStatSummary summarize (std::span<const TrialTimes> trials, double alpha = 0.05);

} // namespace iotscan
