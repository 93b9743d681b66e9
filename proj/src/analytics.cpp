#include "iotscan/analytics.hpp"

#include "iotscan/errors.hpp"
#include "iotscan/random.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>

namespace iotscan {

TrafficStats
traffic_stats (std::span<const double> interarrivals)
{
  if (interarrivals.size () < 2)
    throw ParameterError ("traffic_stats needs at least two inter-arrival samples");
  const double k = static_cast<double> (interarrivals.size ());
  const double mu = std::accumulate (interarrivals.begin (), interarrivals.end (), 0.0) / k;
  double ss = 0.0;
  for (double tau : interarrivals)
    ss += (tau - mu) * (tau - mu);
  return TrafficStats{mu, std::sqrt (ss / k), interarrivals.size ()};
}

std::vector<double>
interarrival_times (std::span<const double> timestamps)
{
  std::vector<double> out;
  for (std::size_t k = 1; k < timestamps.size (); ++k)
    out.push_back (timestamps[k] - timestamps[k - 1]);
  return out;
}

double
multi_arrival_probability (std::span<const double> rates, double delta_t_s)
{
  const double m = std::accumulate (rates.begin (), rates.end (), 0.0) * delta_t_s;
  // 1 - e^-m - m e^-m, written to stay accurate for small m
  return -std::expm1 (-m) - m * std::exp (-m);
}

ProbabilityVector
discretize (std::span<const double> rates, double delta_t_s, double channelCount, double maxMultiArrival)
{
  std::vector<double> divisors (rates.size (), channelCount);
  return discretize (rates, delta_t_s, divisors, maxMultiArrival);
}

ProbabilityVector
discretize (std::span<const double> rates, double delta_t_s, std::span<const double> channelDivisors,
            double maxMultiArrival)
{
  if (!(delta_t_s > 0.0) || !std::isfinite (delta_t_s))
    throw ParameterError ("discretize: delta_t must be positive");
  if (channelDivisors.size () != rates.size ())
    throw ParameterError ("discretize: one channel divisor per device required");
  for (std::size_t i = 0; i < rates.size (); ++i)
    {
      if (!(rates[i] > 0.0) || !std::isfinite (rates[i]))
        throw ParameterError ("discretize: rate of device " + std::to_string (i + 1) + " must be positive");
      if (!(channelDivisors[i] >= 1.0))
        throw ParameterError ("discretize: channel divisor of device " + std::to_string (i + 1) + " must be >= 1");
    }
  const double multi = multi_arrival_probability (rates, delta_t_s);
  if (multi > maxMultiArrival)
    {
      throw ModelError (ModelError::Kind::DeltaTooCoarse,
                        "delta_t " + std::to_string (delta_t_s) + " s too coarse: Pr(Z>=2) = " + std::to_string (multi)
                          + " exceeds " + std::to_string (maxMultiArrival));
    }

  ProbabilityVector pv;
  pv.delta_t_s = delta_t_s;
  pv.channel_divisors.assign (channelDivisors.begin (), channelDivisors.end ());
  double sum = 0.0;
  for (std::size_t i = 0; i < rates.size (); ++i)
    {
      const double x = rates[i] * delta_t_s;
      pv.p.push_back (x * std::exp (-x) / channelDivisors[i]);
      sum += pv.p.back ();
    }
  pv.p0 = 1.0 - sum;
  return pv;
}

void
validate (const ProbabilityVector& pv)
{
  if (pv.p.empty ())
    throw ParameterError ("probability vector needs at least one device");
  if (!(pv.delta_t_s > 0.0))
    throw ParameterError ("probability vector needs a positive delta_t");
  double sum = pv.p0;
  if (!(pv.p0 >= 0.0 && pv.p0 <= 1.0))
    throw ParameterError ("p0 outside [0, 1]");
  for (double p : pv.p)
    {
      if (!(p >= 0.0 && p <= 1.0))
        throw ParameterError ("device probability outside [0, 1]");
      sum += p;
    }
  if (std::abs (sum - 1.0) > 1e-9)
    throw ParameterError ("probability vector does not sum to 1 (sum = " + std::to_string (sum) + ")");
}

namespace {

std::uint64_t
binomial (std::uint64_t n, std::uint64_t k)
{
  if (k > n)
    return 0;
  k = std::min (k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

// sums[h] = sum over |J| = h, h <= maxH, of 1 / (sum_{i not in J} p_i)
class SubsetSums
{
public:
  SubsetSums (const std::vector<double>& p, std::size_t maxH)
    : m_p (p.begin (), p.end ()),
      m_maxH (maxH),
      m_total (std::accumulate (m_p.begin (), m_p.end (), 0.0L)),
      m_sums (maxH + 1, 0.0L)
  {
    visit (0, 0, 0.0L);
  }

  const std::vector<long double>& sums () const { return m_sums; }

private:
  void visit (std::size_t index, std::size_t h, long double pj)
  {
    if (index == m_p.size ())
      {
        const long double denom = m_total - pj;
        if (!(denom > 0.0L))
          throw ModelError (ModelError::Kind::Degenerate,
                            "order-statistic denominator 1 - p0 - P_J is not positive for a subset of size "
                              + std::to_string (h));
        m_sums[h] += 1.0L / denom;
        return;
      }
    visit (index + 1, h, pj);
    if (h < m_maxH)
      visit (index + 1, h + 1, pj + m_p[index]);
  }

  std::vector<long double> m_p;
  std::size_t m_maxH;
  long double m_total;
  std::vector<long double> m_sums;
};

void
check_capacity (const ProbabilityVector& pv, std::size_t cap)
{
  validate (pv);
  if (pv.p.size () > cap)
    throw ModelError (ModelError::Kind::Capacity, "exhaustive enumeration capped at " + std::to_string (cap)
                                                    + " devices, got " + std::to_string (pv.p.size ()));
}

double
combine (const std::vector<long double>& sums, std::size_t N, std::size_t n, double delta_t)
{
  long double draws = 0.0L;
  for (std::size_t h = 0; h < n; ++h)
    {
      const long double r = static_cast<long double> (binomial (N - h - 1, N - n));
      draws += ((n - 1 - h) % 2 == 0 ? r : -r) * sums[h];
    }
  return static_cast<double> (draws * delta_t);
}

} // namespace

double
expected_order_statistic (const ProbabilityVector& pv, std::size_t n, std::size_t cap)
{
  check_capacity (pv, cap);
  const std::size_t N = pv.p.size ();
  if (n < 1 || n > N)
    throw ParameterError ("order statistic index " + std::to_string (n) + " outside [1, " + std::to_string (N) + "]");
  SubsetSums sums (pv.p, n - 1);
  return combine (sums.sums (), N, n, pv.delta_t_s);
}

std::vector<double>
expected_order_statistics (const ProbabilityVector& pv, std::size_t cap)
{
  check_capacity (pv, cap);
  const std::size_t N = pv.p.size ();
  SubsetSums sums (pv.p, N - 1);
  std::vector<double> out;
  for (std::size_t n = 1; n <= N; ++n)
    out.push_back (combine (sums.sums (), N, n, pv.delta_t_s));
  return out;
}

std::vector<double>
mc_order_statistics (const ProbabilityVector& pv, std::size_t episodes, std::uint64_t seed)
{
  validate (pv);
  if (episodes < 1)
    throw ParameterError ("mc_order_statistics needs at least one episode");
  const std::size_t N = pv.p.size ();
  for (double p : pv.p)
    {
      if (!(p > 0.0))
        throw ModelError (ModelError::Kind::Degenerate, "a device with p_i = 0 is never collected");
    }

  constexpr std::size_t kBatches = 64;
  const std::size_t batches = std::min (kBatches, episodes);
  std::vector<std::vector<double>> partial (batches, std::vector<double> (N, 0.0));

  auto run_batch = [&] (std::size_t b) {
    const std::size_t count = episodes / batches + (b < episodes % batches ? 1 : 0);
    std::mt19937_64 rng (derive_seed (seed, b));
    std::uniform_real_distribution<double> unit (0.0, 1.0);
    std::vector<char> held (N);
    auto& acc = partial[b];
    for (std::size_t e = 0; e < count; ++e)
      {
        std::fill (held.begin (), held.end (), 0);
        double remaining = std::accumulate (pv.p.begin (), pv.p.end (), 0.0);
        double steps = 0.0;
        for (std::size_t k = 0; k < N; ++k)
          {
            // Draws until one lands on a device not yet held.
            if (remaining < 1.0)
              steps += static_cast<double> (std::geometric_distribution<long long> (remaining) (rng)) + 1.0;
            else
              steps += 1.0;
            double u = unit (rng) * remaining;
            std::size_t pick = N;
            for (std::size_t i = 0; i < N; ++i)
              {
                if (held[i])
                  continue;
                pick = i;
                if (u < pv.p[i])
                  break;
                u -= pv.p[i];
              }
            held[pick] = 1;
            remaining -= pv.p[pick];
            if (remaining < 0.0)
              remaining = 0.0;
            acc[k] += steps;
          }
      }
  };

  const std::size_t workers = std::max<std::size_t> (1, std::min<std::size_t> (std::thread::hardware_concurrency (), batches));
  if (workers == 1)
    {
      for (std::size_t b = 0; b < batches; ++b)
        run_batch (b);
    }
  else
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        {
          pool.emplace_back ([&, w] {
            for (std::size_t b = w; b < batches; b += workers)
              run_batch (b);
          });
        }
    }

  std::vector<double> out (N, 0.0);
  for (const auto& acc : partial)
    for (std::size_t k = 0; k < N; ++k)
      out[k] += acc[k];
  for (double& v : out)
    v = v / static_cast<double> (episodes) * pv.delta_t_s;
  return out;
}

double
mc_order_statistic (const ProbabilityVector& pv, std::size_t n, std::size_t episodes, std::uint64_t seed)
{
  if (n < 1 || n > pv.p.size ())
    throw ParameterError ("order statistic index " + std::to_string (n) + " out of range");
  return mc_order_statistics (pv, episodes, seed)[n - 1];
}

double
continuous_min_check (std::span<const double> rates)
{
  if (rates.empty ())
    throw ParameterError ("continuous_min_check needs at least one rate");
  const double total = std::accumulate (rates.begin (), rates.end (), 0.0);
  if (!(total > 0.0))
    throw ParameterError ("continuous_min_check needs a positive total rate");
  return 1.0 / total;
}

double
t_quantile (double alpha, std::size_t dof)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError ("alpha must lie in (0, 1)");
  if (dof < 1)
    throw ParameterError ("t quantile needs at least one degree of freedom");
  const boost::math::students_t dist (static_cast<double> (dof));
  return boost::math::quantile (boost::math::complement (dist, alpha / 2.0));
}

OrderStatSummary
summarize (std::span<const TrialTimes> trials, double alpha)
{
  if (trials.empty ())
    throw ParameterError ("summarize needs at least one trial");
  const std::size_t N = trials.front ().size ();
  for (const auto& t : trials)
    {
      if (t.size () != N)
        throw ParameterError ("all trials must cover the same device set");
    }

  std::vector<std::vector<double>> sorted;
  for (const auto& t : trials)
    {
      std::vector<double> found;
      for (const auto& v : t)
        if (v)
          found.push_back (*v);
      std::sort (found.begin (), found.end ());
      sorted.push_back (std::move (found));
    }

  constexpr double nan = std::numeric_limits<double>::quiet_NaN ();
  OrderStatSummary summary;
  summary.alpha = alpha;
  for (std::size_t n = 1; n <= N; ++n)
    {
      std::vector<double> x;
      for (const auto& s : sorted)
        if (s.size () >= n)
          x.push_back (s[n - 1]);

      OrderStatRow row;
      row.n = n;
      row.trial_count = trials.size ();
      row.censored_count = trials.size () - x.size ();
      row.mean_s = row.std_s = row.ci_halfwidth_s = nan;
      if (!x.empty ())
        {
          const double m = static_cast<double> (x.size ());
          row.mean_s = std::accumulate (x.begin (), x.end (), 0.0) / m;
        }
      if (x.size () >= 2)
        {
          const double m = static_cast<double> (x.size ());
          double ss = 0.0;
          for (double v : x)
            ss += (v - row.mean_s) * (v - row.mean_s);
          row.std_s = std::sqrt (ss / (m - 1.0));
          row.ci_halfwidth_s = t_quantile (alpha, x.size () - 1) * row.std_s / std::sqrt (m);
        }
      summary.rows.push_back (row);
    }
  return summary;
}

} // namespace iotscan
