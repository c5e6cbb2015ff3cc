#pragma once

// Attacker-side capture of raw datagrams. Binary format in docs/wire-format.md.

#include <cstdint>
#include <string>
#include <vector>

#include "vrkey/wire.hpp"

namespace vrkey {

struct TraceRecord {
    uint64_t recv_us = 0;
    uint16_t source_id = 0;
    wire::Bytes raw;
};

struct TraceFile {
    std::string config_echo;  // normalized config text of the producing session
    uint64_t start_time_us = 0;
    std::vector<TraceRecord> records;

    void save(const std::string& path) const;
    static TraceFile load(const std::string& path);

    wire::Bytes serialize() const;
    static TraceFile deserialize(const wire::Bytes& raw);  // throws on corruption

    std::string text_dump() const;  // lossless hex dump for debugging
    uint64_t hash() const;
};

}  // namespace vrkey
