#include "rfidsim/timing.hpp"

namespace rfidsim {

uint64_t frame_airtime(const Frame& f, LinkDir dir, const TimingModel& timing) {
    uint64_t rate = dir == LinkDir::ReaderToTag ? timing.reader_bits_per_sec
                                                : timing.tag_bits_per_sec;
    uint64_t bits = 8 * encode_frame(f).size();
    return timing.frame_overhead_us + (bits * 1'000'000 + rate - 1) / rate;
}

}  // namespace rfidsim
