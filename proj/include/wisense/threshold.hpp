#pragma once

#include "wisense/phy.hpp"

namespace wisense::threshold {

using channel::Cir;
using CirStream = std::vector<std::pair<double, Cir>>;

struct Report
{
    std::size_t packet_index = 0;
    double timestamp = 0.0;
    Cir cir;
};

struct FeedbackLog
{
    std::vector<Report> reported;
    std::size_t n_total = 0;
    std::vector<double> variations; // one per packet, against the reference at that time
    double threshold = 0.0;

    double reduction() const;
};

// Time-reversal resonating strength: max over all lags of the normalised
// cross-correlation magnitude, in [0, 1].
double trrs(const Cir &a, const Cir &b);

// 1 - trrs(a, b).
double csi_variation(const Cir &a, const Cir &b);

// Packet 0 is always reported; packet k is reported when its variation
// against the last reported CIR exceeds the threshold.
FeedbackLog apply_policy(const CirStream &stream, double threshold);

// Per-tap linear interpolation of the reports onto the schedule, holding the
// nearest report outside the reported span.
CirStream reconstruct(const FeedbackLog &log, const phy::PacketSchedule &schedule);

} // namespace wisense::threshold
