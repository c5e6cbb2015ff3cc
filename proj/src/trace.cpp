#include "vrkey/trace.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vrkey/rng.hpp"

namespace vrkey {

namespace {

constexpr char kTraceMagic[4] = {'V', 'K', 'T', 'R'};
constexpr uint16_t kTraceVersion = 1;

void put_u16(wire::Bytes& out, uint16_t v) {
    out.push_back(uint8_t(v & 0xff));
    out.push_back(uint8_t(v >> 8));
}
void put_u32(wire::Bytes& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xff));
}
void put_u64(wire::Bytes& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xff));
}

struct Cursor {
    const uint8_t* p;
    size_t len;
    size_t pos = 0;

    void need(size_t n) {
        if (pos + n > len) throw std::runtime_error("trace file truncated");
    }
    uint16_t u16() {
        need(2);
        uint16_t v = uint16_t(p[pos]) | (uint16_t(p[pos + 1]) << 8);
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(p[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(p[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
};

}  // namespace

wire::Bytes TraceFile::serialize() const {
    wire::Bytes out;
    out.insert(out.end(), kTraceMagic, kTraceMagic + 4);
    put_u16(out, kTraceVersion);
    put_u32(out, uint32_t(config_echo.size()));
    out.insert(out.end(), config_echo.begin(), config_echo.end());
    put_u64(out, start_time_us);
    put_u32(out, uint32_t(records.size()));
    for (const auto& r : records) {
        put_u64(out, r.recv_us);
        put_u16(out, r.source_id);
        put_u16(out, uint16_t(r.raw.size()));
        out.insert(out.end(), r.raw.begin(), r.raw.end());
    }
    return out;
}

TraceFile TraceFile::deserialize(const wire::Bytes& raw) {
    Cursor c{raw.data(), raw.size()};
    c.need(4);
    if (std::memcmp(raw.data(), kTraceMagic, 4) != 0)
        throw std::runtime_error("not a trace file");
    c.pos = 4;
    if (c.u16() != kTraceVersion) throw std::runtime_error("unsupported trace version");
    TraceFile t;
    uint32_t cfg_len = c.u32();
    c.need(cfg_len);
    t.config_echo.assign(reinterpret_cast<const char*>(raw.data() + c.pos), cfg_len);
    c.pos += cfg_len;
    t.start_time_us = c.u64();
    uint32_t n = c.u32();
    t.records.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        TraceRecord r;
        r.recv_us = c.u64();
        r.source_id = c.u16();
        uint16_t len = c.u16();
        c.need(len);
        r.raw.assign(raw.data() + c.pos, raw.data() + c.pos + len);
        c.pos += len;
        t.records.push_back(std::move(r));
    }
    if (c.pos != raw.size()) throw std::runtime_error("trailing bytes in trace file");
    return t;
}

void TraceFile::save(const std::string& path) const {
    auto bytes = serialize();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write trace: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

TraceFile TraceFile::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read trace: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    std::string s = ss.str();
    wire::Bytes raw(s.begin(), s.end());
    return deserialize(raw);
}

std::string TraceFile::text_dump() const {
    std::ostringstream os;
    os << "# trace dump, " << records.size() << " records, start " << start_time_us << "us\n";
    for (const auto& line : {config_echo}) {
        std::istringstream is(line);
        std::string l;
        while (std::getline(is, l)) os << "# cfg: " << l << "\n";
    }
    char buf[16];
    for (size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        os << i << " t=" << r.recv_us << " src=" << r.source_id << " len=" << r.raw.size()
           << " ";
        for (uint8_t b : r.raw) {
            std::snprintf(buf, sizeof buf, "%02x", b);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

uint64_t TraceFile::hash() const {
    auto bytes = serialize();
    return fnv1a(bytes.data(), bytes.size());
}

}  // namespace vrkey
