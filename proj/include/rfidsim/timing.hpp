#pragma once

#include <cstdint>

#include "rfidsim/frame.hpp"

namespace rfidsim {

enum class LinkDir {
    ReaderToTag,
    TagToReader,
};

/// Link and tag-compute timing. Defaults are documented inventions sized
/// so that the AES latency (10 ms) exceeds the reply deadline, which
/// forces the split AR/RR path in the default demo.
struct TimingModel {
    uint64_t reader_bits_per_sec = 26'700;
    uint64_t tag_bits_per_sec = 26'700;
    uint64_t frame_overhead_us = 300;
    uint64_t tag_clock_hz = 100'000;
    uint64_t aes_cycles = 1'000;
    uint64_t reply_deadline_us = 2'000;

    /// ceil(aes_cycles / tag_clock_hz * 1e6) microseconds.
    uint64_t aes_latency_us() const {
        return (aes_cycles * 1'000'000 + tag_clock_hz - 1) / tag_clock_hz;
    }

    bool valid() const {
        return reader_bits_per_sec > 0 && tag_bits_per_sec > 0 &&
               tag_clock_hz > 0 && reply_deadline_us > 0;
    }
};

/// Piecewise-constant current per tag phase, in microamps. The 10 uA
/// budget is the ceiling for added hardware on a passive tag.
struct PowerModel {
    uint32_t idle_current_uA = 1;
    uint32_t rx_current_uA = 4;
    uint32_t tx_current_uA = 6;
    uint32_t compute_current_uA = 8;
    uint32_t budget_uA = 10;
};

/// overhead + ceil(8 * encoded_len * 1e6 / bits_per_sec) microseconds.
uint64_t frame_airtime(const Frame& f, LinkDir dir, const TimingModel& timing);

}  // namespace rfidsim
