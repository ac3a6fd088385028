#include "sensestop/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace sensestop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long long kPacketSlotCap = 10'000'000;
constexpr int kMaxBatches = 64;  // >= 30 so batch-means errors are usable

double sample_gain(const FadingLaw& law, SplitMix64& rng) {
  switch (law.kind) {
    case FadingKind::Exponential:
      return -law.mean_gain * std::log1p(-rng.next_uniform());
  }
  return 0.0;  // unreachable
}

struct BatchAccum {
  long long slots = 0;
  double rate_sum = 0.0;
  double power_sum = 0.0;
  long long successes = 0;
  long long packets = 0;
  long long delay_slots = 0;  // summed over completed packets
};

BatchAccum run_batch(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                     const SlotTiming& timing, long long slots, SplitMix64 rng) {
  BatchAccum acc;
  acc.slots = slots;
  long long current_wait = 0;
  for (long long s = 0; s < slots; ++s) {
    const SlotOutcome out = run_slot(policy, ens, timing, rng);
    acc.rate_sum += out.rate;
    acc.power_sum += out.power_used;
    ++current_wait;
    if (!out.blocked()) {
      ++acc.successes;
      ++acc.packets;
      acc.delay_slots += current_wait;
      current_wait = 0;
    }
  }
  // a packet still in flight at the batch end is dropped
  return acc;
}

// sigma^2 estimated from batch means, weighted by batch size.
double batch_means_se(const std::vector<double>& means, const std::vector<double>& weights,
                      double grand_mean, double total_weight) {
  const std::size_t b = means.size();
  if (b < 2 || total_weight <= 0.0) return 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const double d = means[i] - grand_mean;
    ss += weights[i] * d * d;
  }
  const double variance = ss / static_cast<double>(b - 1);
  return std::sqrt(std::max(variance, 0.0) / total_weight);
}

}  // namespace

SlotOutcome run_slot(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                     const SlotTiming& timing, SplitMix64& rng) {
  const std::size_t m = ens.count();
  // Channel states first, then all gains: the stream layout per slot is fixed,
  // and gains are drawn for every channel whether or not it is reached.
  std::uint64_t mask = 0;
  std::vector<char> mask_wide;
  if (m > 64) mask_wide.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool free = rng.next_bernoulli(ens.free_prob[i]);
    if (m > 64)
      mask_wide[i] = free;
    else if (free)
      mask |= std::uint64_t{1} << i;
  }
  std::size_t stop = 0;  // 1-based; 0 = blocked
  double stop_gain = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double g = sample_gain(ens.fading, rng);
    if (stop != 0) continue;
    const bool free = m > 64 ? mask_wide[i] != 0 : ((mask >> i) & 1) != 0;
    if (free && g > policy.thresholds[i]) {
      stop = i + 1;
      stop_gain = g;
    }
  }
  if (stop == 0) return SlotOutcome{};
  const double c = timing.remaining_fraction(stop);
  const double p = policy.power_rule.power(stop_gain);
  return SlotOutcome{static_cast<int>(stop), c * std::log1p(p * stop_gain), c * p};
}

SimEstimates simulate(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                      const SlotTiming& timing, long long slots, std::uint64_t seed,
                      int workers) {
  policy.validate_against(ens);
  timing.validate(ens.count());
  detail::require(slots >= 1, "simulate: slots must be >= 1");

  const int batches = static_cast<int>(std::min<long long>(kMaxBatches, slots));
  const long long base = slots / batches;
  const long long extra = slots % batches;

  std::vector<BatchAccum> acc(batches);
  const auto batch_slots = [&](int b) { return base + (b < extra ? 1 : 0); };
  const auto work = [&](int first, int stride) {
    for (int b = first; b < batches; b += stride)
      acc[b] = run_batch(policy, ens, timing, batch_slots(b),
                         SplitMix64::for_batch(seed, static_cast<std::uint64_t>(b)));
  };

  int n_workers = workers > 0 ? workers
                              : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::clamp(n_workers, 1, batches);
  if (n_workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work, w, n_workers);
    for (auto& t : pool) t.join();
  }

  // merge in batch order so totals do not depend on scheduling
  SimEstimates est;
  est.slots = slots;
  double rate_total = 0.0, power_total = 0.0;
  long long success_total = 0, packet_total = 0, delay_total = 0;
  for (const BatchAccum& a : acc) {
    rate_total += a.rate_sum;
    power_total += a.power_sum;
    success_total += a.successes;
    packet_total += a.packets;
    delay_total += a.delay_slots;
  }
  const double n = static_cast<double>(slots);
  est.throughput_mean = rate_total / n;
  est.power_mean = power_total / n;
  est.success_rate = static_cast<double>(success_total) / n;
  est.packets = packet_total;

  std::vector<double> means(batches), weights(batches);
  const auto fill_se = [&](auto value_of, double grand_mean, double total_weight,
                           auto weight_of) {
    std::size_t used = 0;
    for (int b = 0; b < batches; ++b) {
      const double w = weight_of(acc[b]);
      if (w <= 0.0) continue;
      weights[used] = w;
      means[used] = value_of(acc[b]) / w;
      ++used;
    }
    std::vector<double> m2(means.begin(), means.begin() + used);
    std::vector<double> w2(weights.begin(), weights.begin() + used);
    return batch_means_se(m2, w2, grand_mean, total_weight);
  };

  const auto slots_of = [](const BatchAccum& a) { return static_cast<double>(a.slots); };
  est.throughput_se = fill_se([](const BatchAccum& a) { return a.rate_sum; },
                              est.throughput_mean, n, slots_of);
  est.power_se = fill_se([](const BatchAccum& a) { return a.power_sum; }, est.power_mean,
                         n, slots_of);
  est.success_se = fill_se([](const BatchAccum& a) { return double(a.successes); },
                           est.success_rate, n, slots_of);

  if (packet_total > 0) {
    est.delay_mean = static_cast<double>(delay_total) / static_cast<double>(packet_total);
    est.delay_se = fill_se([](const BatchAccum& a) { return double(a.delay_slots); },
                           est.delay_mean, static_cast<double>(packet_total),
                           [](const BatchAccum& a) { return double(a.packets); });
    est.wasted_slots_mean = est.delay_mean - 1.0;
  } else {
    est.delay_mean = kInf;
    est.delay_se = 0.0;
    est.wasted_slots_mean = kInf;
  }
  return est;
}

std::vector<long long> packet_delay_trace(const StoppingPolicy& policy,
                                          const ChannelEnsemble& ens,
                                          const SlotTiming& timing, long long packets,
                                          std::uint64_t seed) {
  policy.validate_against(ens);
  timing.validate(ens.count());
  detail::require(packets >= 1, "packet_delay_trace: packets must be >= 1");

  std::vector<long long> delays;
  delays.reserve(static_cast<std::size_t>(packets));
  SplitMix64 rng(seed);
  for (long long k = 0; k < packets; ++k) {
    long long waited = 0;
    for (;;) {
      ++waited;
      if (waited > kPacketSlotCap)
        throw InfiniteDelayError(
            "packet_delay_trace: packet exceeded the 1e7-slot cap; success "
            "probability is zero or vanishing");
      if (!run_slot(policy, ens, timing, rng).blocked()) break;
    }
    delays.push_back(waited);
  }
  return delays;
}

}  // namespace sensestop
