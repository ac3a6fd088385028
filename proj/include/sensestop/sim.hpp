#ifndef SENSESTOP_SIM_HPP
#define SENSESTOP_SIM_HPP

#include <cstdint>
#include <vector>

#include "sensestop/model.hpp"
#include "sensestop/rng.hpp"

namespace sensestop {

/// Result of one slot: the channel transmitted on (0 = blocked slot) and the
/// realized rate and energy, both discounted by the remaining slot fraction.
struct SlotOutcome {
  int stop_index = 0;  // 1-based k*; 0 when every channel was skipped
  double rate = 0.0;
  double power_used = 0.0;

  bool blocked() const { return stop_index == 0; }
};

/// Monte Carlo estimates with batch-means standard errors.
struct SimEstimates {
  long long slots = 0;
  long long packets = 0;  // completed packets observed in the slot stream
  double throughput_mean = 0.0;
  double throughput_se = 0.0;
  double power_mean = 0.0;
  double power_se = 0.0;
  double success_rate = 0.0;
  double success_se = 0.0;
  double delay_mean = 0.0;  // slots per packet through first success; +inf if none
  double delay_se = 0.0;
  double wasted_slots_mean = 0.0;  // delay_mean - 1
};

/// Plays out one slot: senses channels in order, stops at the first free
/// channel whose drawn gain clears its threshold. All M (state, gain) pairs
/// are drawn up front so the stream position per slot is fixed.
SlotOutcome run_slot(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                     const SlotTiming& timing, SplitMix64& rng);

/// Slot-level Monte Carlo over `slots` slots.
///
/// Slots are split into min(64, slots) fixed batches; batch b runs on the
/// stream SplitMix64::for_batch(seed, b). Batches may execute on several
/// threads (workers = 0 picks the hardware count), but the batch structure
/// and the merge order are fixed, so identical (seed, inputs) give bit-equal
/// estimates for any worker count. Standard errors come from batch means;
/// packets straddling a batch boundary are dropped from the delay estimate.
SimEstimates simulate(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                      const SlotTiming& timing, long long slots, std::uint64_t seed,
                      int workers = 0);

/// Per-packet delays (slots through first success) for `packets` consecutive
/// packets on a single stream seeded with `seed`. A packet exceeding 1e7
/// slots raises InfiniteDelayError.
std::vector<long long> packet_delay_trace(const StoppingPolicy& policy,
                                          const ChannelEnsemble& ens,
                                          const SlotTiming& timing, long long packets,
                                          std::uint64_t seed);

}  // namespace sensestop

#endif  // SENSESTOP_SIM_HPP
