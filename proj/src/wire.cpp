#include "vrkey/wire.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vrkey::wire {

namespace {

void put_u8(Bytes& out, uint8_t v) { out.push_back(v); }
void put_u16(Bytes& out, uint16_t v) {
    out.push_back(uint8_t(v & 0xff));
    out.push_back(uint8_t(v >> 8));
}
void put_u32(Bytes& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xff));
}
void put_f32(Bytes& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

// Bounds-checked reader; every take_* returns false on exhaustion.
struct Reader {
    const uint8_t* data;
    size_t len;
    size_t pos = 0;

    bool take_u8(uint8_t& v) {
        if (pos + 1 > len) return false;
        v = data[pos++];
        return true;
    }
    bool take_u16(uint16_t& v) {
        if (pos + 2 > len) return false;
        v = uint16_t(data[pos]) | (uint16_t(data[pos + 1]) << 8);
        pos += 2;
        return true;
    }
    bool take_u32(uint32_t& v) {
        if (pos + 4 > len) return false;
        v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(data[pos + i]) << (8 * i);
        pos += 4;
        return true;
    }
    bool take_f32(float& v) {
        uint32_t bits;
        if (!take_u32(bits)) return false;
        std::memcpy(&v, &bits, 4);
        return true;
    }
    bool take_bytes(Bytes& out, size_t n) {
        if (pos + n > len) return false;
        out.assign(data + pos, data + pos + n);
        pos += n;
        return true;
    }
    bool done() const { return pos == len; }
};

// LSB-first bit packing inside custom-object payloads.
struct BitWriter {
    Bytes out;
    int bit = 0;

    void write(uint64_t v, int nbits) {
        for (int i = 0; i < nbits; ++i) {
            if (bit == 0) out.push_back(0);
            if ((v >> i) & 1) out.back() |= uint8_t(1 << bit);
            bit = (bit + 1) % 8;
        }
    }
};

struct BitReader {
    const uint8_t* data;
    size_t len;
    size_t bitpos = 0;

    bool read(uint64_t& v, int nbits) {
        if (bitpos + size_t(nbits) > len * 8) return false;
        v = 0;
        for (int i = 0; i < nbits; ++i, ++bitpos) {
            if ((data[bitpos / 8] >> (bitpos % 8)) & 1) v |= uint64_t(1) << i;
        }
        return true;
    }
};

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

const Field* Packet::find_field(uint8_t id) const {
    for (const auto& f : fields)
        if (f.id == id) return &f;
    return nullptr;
}

const ParsedField* ParsedPacket::find_field(uint8_t id) const {
    for (const auto& f : fields)
        if (f.id == id) return &f;
    return nullptr;
}

// ---- quantization -----------------------------------------------------------

uint64_t quantize(double v, double min, double max, int bits) {
    const uint64_t levels = (uint64_t(1) << bits) - 1;
    double t = (v - min) / (max - min);
    t = std::clamp(t, 0.0, 1.0);
    return uint64_t(std::llround(t * double(levels)));
}

double dequantize(uint64_t q, double min, double max, int bits) {
    const uint64_t levels = (uint64_t(1) << bits) - 1;
    return min + (max - min) * (double(q) / double(levels));
}

double subfield_value(const SubFieldSpec& f, uint64_t raw) {
    switch (f.kind) {
        case SubFieldKind::Uint:
            return double(raw);
        case SubFieldKind::Quant:
            return dequantize(raw, f.min, f.max, f.bits);
        case SubFieldKind::F32: {
            uint32_t bits = uint32_t(raw);
            float v;
            std::memcpy(&v, &bits, 4);
            return double(v);
        }
    }
    return 0.0;
}

uint64_t subfield_raw(const SubFieldSpec& f, double value) {
    switch (f.kind) {
        case SubFieldKind::Uint:
            return uint64_t(value);
        case SubFieldKind::Quant:
            return quantize(value, f.min, f.max, f.bits);
        case SubFieldKind::F32: {
            float v = float(value);
            uint32_t bits;
            std::memcpy(&bits, &v, 4);
            return bits;
        }
    }
    return 0;
}

int CustomObjectSpec::total_bits() const {
    int n = 0;
    for (const auto& f : fields) n += f.bits;
    return n;
}

Bytes pack_custom_payload(const CustomObjectSpec& spec, const std::vector<uint64_t>& raws) {
    BitWriter w;
    for (size_t i = 0; i < spec.fields.size(); ++i) w.write(raws[i], spec.fields[i].bits);
    w.out.resize(size_t(spec.payload_bytes()), 0);
    return w.out;
}

std::optional<std::vector<uint64_t>> unpack_custom_payload(const CustomObjectSpec& spec,
                                                           const uint8_t* payload, size_t len) {
    if (len != size_t(spec.payload_bytes())) return std::nullopt;
    BitReader r{payload, len};
    std::vector<uint64_t> raws(spec.fields.size());
    for (size_t i = 0; i < spec.fields.size(); ++i) {
        if (!r.read(raws[i], spec.fields[i].bits)) return std::nullopt;
    }
    // Padding bits must be zero.
    uint64_t pad = 0;
    int pad_bits = int(len * 8) - spec.total_bits();
    if (pad_bits > 0 && (!r.read(pad, pad_bits) || pad != 0)) return std::nullopt;
    return raws;
}

// ---- registry ---------------------------------------------------------------

void Registry::add(CustomObjectSpec spec) { types_[spec.type_code] = std::move(spec); }

const CustomObjectSpec* Registry::find(uint8_t type_code) const {
    auto it = types_.find(type_code);
    return it == types_.end() ? nullptr : &it->second;
}

std::string Registry::to_text() const {
    std::ostringstream os;
    os << "# vrkeylab custom-object registry v1\n";
    char buf[64];
    for (const auto& [code, spec] : types_) {
        os << "type " << int(code) << " " << spec.name << "\n";
        for (const auto& f : spec.fields) {
            os << "field " << f.name << " ";
            switch (f.kind) {
                case SubFieldKind::Uint:
                    os << "uint " << f.bits;
                    break;
                case SubFieldKind::Quant:
                    os << "quant " << f.bits;
                    std::snprintf(buf, sizeof buf, " %.17g %.17g", f.min, f.max);
                    os << buf;
                    break;
                case SubFieldKind::F32:
                    os << "f32";
                    break;
            }
            os << "\n";
        }
    }
    return os.str();
}

Registry Registry::from_text(const std::string& text) {
    Registry reg;
    std::istringstream is(text);
    std::string line;
    CustomObjectSpec cur;
    bool open = false;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("registry line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        if (tok == "type") {
            if (open) reg.add(cur);
            cur = CustomObjectSpec{};
            int code;
            if (!(ls >> code >> cur.name) || code < 0 || code > 255) fail("bad type header");
            cur.type_code = uint8_t(code);
            open = true;
        } else if (tok == "field") {
            if (!open) fail("field outside type");
            SubFieldSpec f;
            std::string kind;
            if (!(ls >> f.name >> kind)) fail("bad field");
            if (kind == "uint") {
                f.kind = SubFieldKind::Uint;
                if (!(ls >> f.bits) || f.bits < 1 || f.bits > 64) fail("bad uint bits");
            } else if (kind == "quant") {
                f.kind = SubFieldKind::Quant;
                if (!(ls >> f.bits >> f.min >> f.max) || f.bits < 1 || f.bits > 32 ||
                    !(f.min < f.max))
                    fail("bad quant spec");
            } else if (kind == "f32") {
                f.kind = SubFieldKind::F32;
                f.bits = 32;
            } else {
                fail("unknown field kind '" + kind + "'");
            }
            cur.fields.push_back(std::move(f));
        } else {
            fail("unknown directive '" + tok + "'");
        }
    }
    if (open) reg.add(cur);
    return reg;
}

void Registry::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write registry: " + path);
    f << to_text();
}

Registry Registry::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read registry: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_text(ss.str());
}

// ---- smallest-three ----------------------------------------------------------

std::array<uint64_t, 4> quat_s3_raws(const UnitQuat& q, int bits) {
    double c[4] = {q.w, q.x, q.y, q.z};
    int largest = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(c[i]) > std::abs(c[largest])) largest = i;
    if (c[largest] < 0.0)
        for (auto& v : c) v = -v;

    std::array<uint64_t, 4> raws;
    raws[0] = uint64_t(largest);
    int slot = 1;
    for (int i = 0; i < 4; ++i) {
        if (i == largest) continue;
        raws[slot++] = quantize(c[i], -kInvSqrt2, kInvSqrt2, bits);
    }
    return raws;
}

UnitQuat quat_from_s3_raws(const std::array<uint64_t, 4>& raws, int bits) {
    int largest = int(raws[0] & 3);
    double c[4] = {0, 0, 0, 0};
    double sumsq = 0.0;
    int slot = 1;
    for (int i = 0; i < 4; ++i) {
        if (i == largest) continue;
        c[i] = dequantize(raws[slot++], -kInvSqrt2, kInvSqrt2, bits);
        sumsq += c[i] * c[i];
    }
    c[largest] = std::sqrt(std::max(0.0, 1.0 - sumsq));
    return UnitQuat::from_components(c[0], c[1], c[2], c[3]);
}

BitString encode_quat_smallest_three(const UnitQuat& q, int bits) {
    auto raws = quat_s3_raws(q, bits);
    BitString bs;
    bs.bits = raws[0] | (raws[1] << 2) | (raws[2] << (2 + bits)) | (raws[3] << (2 + 2 * bits));
    bs.nbits = 2 + 3 * bits;
    return bs;
}

UnitQuat decode_quat_smallest_three(const BitString& bs, int bits) {
    uint64_t mask = (uint64_t(1) << bits) - 1;
    std::array<uint64_t, 4> raws = {bs.bits & 3, (bs.bits >> 2) & mask,
                                    (bs.bits >> (2 + bits)) & mask,
                                    (bs.bits >> (2 + 2 * bits)) & mask};
    return quat_from_s3_raws(raws, bits);
}

// ---- transform codec ----------------------------------------------------------

CustomObjectSpec TransformCodec::transform_spec() const {
    CustomObjectSpec s;
    if (lossless) {
        s.type_code = lossless_type_code;
        s.name = "xform_f";
        s.fields = {{"pos_x", SubFieldKind::F32, 32}, {"pos_y", SubFieldKind::F32, 32},
                    {"pos_z", SubFieldKind::F32, 32}, {"rot_w", SubFieldKind::F32, 32},
                    {"rot_x", SubFieldKind::F32, 32}, {"rot_y", SubFieldKind::F32, 32},
                    {"rot_z", SubFieldKind::F32, 32}};
    } else {
        s.type_code = quant_type_code;
        s.name = "xform_q";
        s.fields = {{"pos_x", SubFieldKind::Quant, pos_bits, pos_min, pos_max},
                    {"pos_y", SubFieldKind::Quant, pos_bits, pos_min, pos_max},
                    {"pos_z", SubFieldKind::Quant, pos_bits, pos_min, pos_max},
                    {"rot_idx", SubFieldKind::Uint, 2},
                    {"rot_c0", SubFieldKind::Quant, rot_bits, -kInvSqrt2, kInvSqrt2},
                    {"rot_c1", SubFieldKind::Quant, rot_bits, -kInvSqrt2, kInvSqrt2},
                    {"rot_c2", SubFieldKind::Quant, rot_bits, -kInvSqrt2, kInvSqrt2}};
    }
    return s;
}

Registry TransformCodec::registry() const {
    Registry reg;
    reg.add(transform_spec());
    return reg;
}

ByteString TransformCodec::encode_transform(const Transform& t) const {
    auto spec = transform_spec();
    std::vector<uint64_t> raws;
    raws.reserve(spec.fields.size());
    if (lossless) {
        raws.push_back(subfield_raw(spec.fields[0], t.position.x));
        raws.push_back(subfield_raw(spec.fields[1], t.position.y));
        raws.push_back(subfield_raw(spec.fields[2], t.position.z));
        raws.push_back(subfield_raw(spec.fields[3], t.rotation.w));
        raws.push_back(subfield_raw(spec.fields[4], t.rotation.x));
        raws.push_back(subfield_raw(spec.fields[5], t.rotation.y));
        raws.push_back(subfield_raw(spec.fields[6], t.rotation.z));
    } else {
        const double comps[3] = {t.position.x, t.position.y, t.position.z};
        for (int i = 0; i < 3; ++i) {
            if (comps[i] < pos_min || comps[i] > pos_max)
                throw OutOfBoundsError("position component " + std::to_string(comps[i]) +
                                       " outside codec bounds [" + std::to_string(pos_min) +
                                       ", " + std::to_string(pos_max) + "]");
            raws.push_back(quantize(comps[i], pos_min, pos_max, pos_bits));
        }
        auto rq = quat_s3_raws(t.rotation, rot_bits);
        raws.insert(raws.end(), rq.begin(), rq.end());
    }
    ByteString b;
    b.data.push_back(spec.type_code);
    Bytes payload = pack_custom_payload(spec, raws);
    b.data.insert(b.data.end(), payload.begin(), payload.end());
    return b;
}

Transform TransformCodec::decode_transform(const std::vector<uint64_t>& raws) const {
    auto spec = transform_spec();
    Transform t;
    if (lossless) {
        t.position = {subfield_value(spec.fields[0], raws[0]),
                      subfield_value(spec.fields[1], raws[1]),
                      subfield_value(spec.fields[2], raws[2])};
        t.rotation = UnitQuat::from_components(
            subfield_value(spec.fields[3], raws[3]), subfield_value(spec.fields[4], raws[4]),
            subfield_value(spec.fields[5], raws[5]), subfield_value(spec.fields[6], raws[6]));
    } else {
        t.position = {subfield_value(spec.fields[0], raws[0]),
                      subfield_value(spec.fields[1], raws[1]),
                      subfield_value(spec.fields[2], raws[2])};
        t.rotation = quat_from_s3_raws({raws[3], raws[4], raws[5], raws[6]}, rot_bits);
    }
    return t;
}

Transform TransformCodec::decode_transform_blob(const ByteString& blob) const {
    auto spec = transform_spec();
    if (blob.data.empty() || blob.data[0] != spec.type_code)
        throw std::runtime_error("blob type-code mismatch");
    auto raws = unpack_custom_payload(spec, blob.data.data() + 1, blob.data.size() - 1);
    if (!raws) throw std::runtime_error("blob payload size mismatch");
    return decode_transform(*raws);
}

double TransformCodec::decode_trigger(const FieldValue& v) const {
    if (lossless) return double(std::get<float>(v));
    uint64_t levels = (uint64_t(1) << trig_bits) - 1;
    return double(std::get<uint8_t>(v)) / double(levels);
}

FieldValue TransformCodec::encode_trigger(double v) const {
    if (lossless) return float(v);
    return uint8_t(quantize(v, 0.0, 1.0, trig_bits));
}

// ---- motion updates -----------------------------------------------------------

Packet encode_motion_update(const MotionUpdate& u, const TransformCodec& codec,
                            const MotionFieldLayout& layout) {
    Packet p;
    p.header.channel = layout.channel;
    p.fields.push_back({layout.user_id, UserId{u.user_id}});
    p.fields.push_back({layout.tick, TickStamp{u.tick}});
    p.fields.push_back({layout.head, codec.encode_transform(u.head)});
    p.fields.push_back({layout.left_hand, codec.encode_transform(u.left_hand)});
    p.fields.push_back({layout.right_hand, codec.encode_transform(u.right_hand)});
    p.fields.push_back({layout.trigger_left, codec.encode_trigger(u.trigger_left)});
    p.fields.push_back({layout.trigger_right, codec.encode_trigger(u.trigger_right)});
    if (u.keyboard_open) p.fields.push_back({layout.event, EventCode{kEventKeyboardOpen}});
    return p;
}

MotionUpdate decode_motion_update(const Packet& p, const TransformCodec& codec,
                                  const MotionFieldLayout& layout) {
    MotionUpdate u;
    auto need = [&](uint8_t id) -> const Field& {
        const Field* f = p.find_field(id);
        if (!f) throw std::runtime_error("missing field id " + std::to_string(id));
        return *f;
    };
    u.user_id = std::get<UserId>(need(layout.user_id).value).value;
    u.tick = std::get<TickStamp>(need(layout.tick).value).value;
    u.head = codec.decode_transform_blob(std::get<ByteString>(need(layout.head).value));
    u.left_hand = codec.decode_transform_blob(std::get<ByteString>(need(layout.left_hand).value));
    u.right_hand = codec.decode_transform_blob(std::get<ByteString>(need(layout.right_hand).value));
    u.trigger_left = codec.decode_trigger(need(layout.trigger_left).value);
    u.trigger_right = codec.decode_trigger(need(layout.trigger_right).value);
    const Field* ev = p.find_field(layout.event);
    u.keyboard_open = ev && std::get<EventCode>(ev->value).value == kEventKeyboardOpen;
    return u;
}

// ---- serialize / parse ---------------------------------------------------------

Bytes serialize_packet(const Packet& p) {
    Bytes out;
    put_u16(out, p.header.magic);
    put_u8(out, p.header.version);
    put_u8(out, p.header.channel);
    put_u32(out, p.header.sequence);
    if (p.fields.size() > 255) throw PacketTooLargeError("more than 255 fields");
    put_u8(out, uint8_t(p.fields.size()));
    for (const auto& f : p.fields) {
        put_u8(out, f.id);
        put_u8(out, uint8_t(f.value.index()));
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, uint8_t>) {
                    put_u8(out, v);
                } else if constexpr (std::is_same_v<T, int32_t>) {
                    put_u32(out, uint32_t(v));
                } else if constexpr (std::is_same_v<T, float>) {
                    put_f32(out, v);
                } else if constexpr (std::is_same_v<T, bool>) {
                    put_u8(out, v ? 1 : 0);
                } else if constexpr (std::is_same_v<T, ByteString>) {
                    if (v.data.size() > kMaxByteStringLen)
                        throw PacketTooLargeError("ByteString over 512 bytes");
                    put_u16(out, uint16_t(v.data.size()));
                    out.insert(out.end(), v.data.begin(), v.data.end());
                } else if constexpr (std::is_same_v<T, UserId>) {
                    put_u32(out, v.value);
                } else if constexpr (std::is_same_v<T, TickStamp>) {
                    put_u32(out, v.value);
                } else if constexpr (std::is_same_v<T, EventCode>) {
                    put_u8(out, v.value);
                }
            },
            f.value);
    }
    if (out.size() > kMaxPacketBytes)
        throw PacketTooLargeError("packet " + std::to_string(out.size()) + " bytes > 1200");
    return out;
}

const char* parse_error_name(ParseError e) {
    switch (e) {
        case ParseError::None: return "none";
        case ParseError::Truncated: return "truncated";
        case ParseError::BadMagic: return "bad-magic";
        case ParseError::BadVersion: return "bad-version";
        case ParseError::UnknownFieldKind: return "unknown-field-kind";
        case ParseError::BadValue: return "bad-value";
        case ParseError::TrailingBytes: return "trailing-bytes";
    }
    return "?";
}

ParseOutcome parse_packet(const uint8_t* data, size_t len, const Registry* registry) {
    ParseOutcome out;
    Reader r{data, len};
    ParsedPacket p;
    uint8_t field_count = 0;
    if (!r.take_u16(p.header.magic) || !r.take_u8(p.header.version) ||
        !r.take_u8(p.header.channel) || !r.take_u32(p.header.sequence) ||
        !r.take_u8(field_count)) {
        out.error = ParseError::Truncated;
        return out;
    }
    if (p.header.magic != kMagic) {
        out.error = ParseError::BadMagic;
        return out;
    }
    if (p.header.version != kVersion) {
        out.error = ParseError::BadVersion;
        return out;
    }
    for (int i = 0; i < field_count; ++i) {
        ParsedField f;
        uint8_t tag = 0;
        if (!r.take_u8(f.id) || !r.take_u8(tag)) {
            out.error = ParseError::Truncated;
            return out;
        }
        bool ok = true;
        switch (tag) {
            case 0: {
                uint8_t v;
                ok = r.take_u8(v);
                f.value = v;
                break;
            }
            case 1: {
                uint32_t v;
                ok = r.take_u32(v);
                f.value = int32_t(v);
                break;
            }
            case 2: {
                float v;
                ok = r.take_f32(v);
                f.value = v;
                break;
            }
            case 3: {
                uint8_t v = 0;
                ok = r.take_u8(v);
                if (ok && v > 1) {
                    out.error = ParseError::BadValue;
                    return out;
                }
                f.value = (v == 1);
                break;
            }
            case 4: {
                uint16_t n = 0;
                ok = r.take_u16(n);
                if (ok && n > kMaxByteStringLen) {
                    out.error = ParseError::BadValue;
                    return out;
                }
                ByteString b;
                if (ok) ok = r.take_bytes(b.data, n);
                if (ok && registry && !b.data.empty()) {
                    ExpandedBlob e;
                    e.type_code = b.data[0];
                    if (const CustomObjectSpec* spec = registry->find(e.type_code)) {
                        auto raws =
                            unpack_custom_payload(*spec, b.data.data() + 1, b.data.size() - 1);
                        if (!raws) {
                            out.error = ParseError::BadValue;
                            return out;
                        }
                        e.known = true;
                        e.raws = std::move(*raws);
                        for (size_t k = 0; k < spec->fields.size(); ++k)
                            e.values.push_back(subfield_value(spec->fields[k], e.raws[k]));
                    }
                    f.blob = std::move(e);
                }
                f.value = std::move(b);
                break;
            }
            case 5: {
                uint32_t v;
                ok = r.take_u32(v);
                f.value = UserId{v};
                break;
            }
            case 6: {
                uint32_t v;
                ok = r.take_u32(v);
                f.value = TickStamp{v};
                break;
            }
            case 7: {
                uint8_t v;
                ok = r.take_u8(v);
                f.value = EventCode{v};
                break;
            }
            default:
                out.error = ParseError::UnknownFieldKind;
                return out;
        }
        if (!ok) {
            out.error = ParseError::Truncated;
            return out;
        }
        p.fields.push_back(std::move(f));
    }
    if (!r.done()) {
        out.error = ParseError::TrailingBytes;
        return out;
    }
    out.packet = std::move(p);
    return out;
}

ParseOutcome parse_packet(const Bytes& raw, const Registry* registry) {
    return parse_packet(raw.data(), raw.size(), registry);
}

}  // namespace vrkey::wire
