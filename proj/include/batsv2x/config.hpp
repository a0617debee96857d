#pragma once
#include <string>

#include "batsv2x/channel.hpp"
#include "batsv2x/scenario.hpp"

namespace batsv2x::harness {

struct SimConfig {
    // file and code
    long f = 12000;       // packets in the file
    int ell = 1500;       // packet length, bytes
    double rate_bps = 6e6;
    int m = 16;           // batch size
    double dt_max_us = 50.0;

    channel::ChannelParams chan;
    scenario::Geometry geo;
    scenario::GroupConfig group;

    uint64_t seed = 1;
    int trials = 1;
    std::string experiment = "single";
    bool trace = false;

    double t_packet_s() const { return ell * 8.0 / rate_bps; }
    // sharing-phase packet carries the batch id and coefficient vector
    double t_packet_v2v_s() const { return (ell + m + 4) * 8.0 / rate_bps; }
    double slot_s() const { return dt_max_us * 1e-6 + t_packet_v2v_s(); }

    void validate() const;
};

// Flat key = value text; '#' starts a comment; unknown keys are rejected.
// An empty file yields the defaults above.
SimConfig load_config(const std::string& path);
SimConfig parse_config(const std::string& text);

} // namespace batsv2x::harness
