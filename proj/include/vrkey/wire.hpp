#pragma once

// Photon-style wire format: typed fields, custom-object blobs with
// quantization codecs, packet framing and parsing. Layout is ours; see
// docs/wire-format.md for the byte-level contract.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vrkey/geometry.hpp"

namespace vrkey::wire {

using Bytes = std::vector<uint8_t>;

constexpr uint16_t kMagic = 0x4B56;  // "VK" on the wire
constexpr uint8_t kVersion = 1;
constexpr size_t kMaxPacketBytes = 1200;
constexpr size_t kMaxByteStringLen = 512;

struct ByteString {
    Bytes data;  // custom-object blob: [type-code][packed payload]
    bool operator==(const ByteString&) const = default;
};
struct UserId {
    uint32_t value = 0;
    bool operator==(const UserId&) const = default;
};
struct TickStamp {
    uint32_t value = 0;
    bool operator==(const TickStamp&) const = default;
};
struct EventCode {
    uint8_t value = 0;
    bool operator==(const EventCode&) const = default;
};

// variant index doubles as the wire type tag
using FieldValue =
    std::variant<uint8_t, int32_t, float, bool, ByteString, UserId, TickStamp, EventCode>;

constexpr uint8_t kEventKeyboardOpen = 1;

struct Field {
    uint8_t id = 0;
    FieldValue value;
};

struct PacketHeader {
    uint16_t magic = kMagic;
    uint8_t version = kVersion;
    uint8_t channel = 0;
    uint32_t sequence = 0;
};

struct Packet {
    PacketHeader header;
    std::vector<Field> fields;

    const Field* find_field(uint8_t id) const;
};

struct PacketTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutOfBoundsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Bytes serialize_packet(const Packet& p);

// ---- custom-object registry ------------------------------------------------

enum class SubFieldKind { Uint, Quant, F32 };

struct SubFieldSpec {
    std::string name;
    SubFieldKind kind = SubFieldKind::Uint;
    int bits = 0;        // payload bits (32 for F32)
    double min = 0.0;    // Quant only
    double max = 0.0;
};

struct CustomObjectSpec {
    uint8_t type_code = 0;
    std::string name;
    std::vector<SubFieldSpec> fields;

    int total_bits() const;
    int payload_bytes() const { return (total_bits() + 7) / 8; }
};

class Registry {
public:
    void add(CustomObjectSpec spec);
    const CustomObjectSpec* find(uint8_t type_code) const;
    const std::map<uint8_t, CustomObjectSpec>& types() const { return types_; }

    std::string to_text() const;
    static Registry from_text(const std::string& text);  // throws std::runtime_error
    void save(const std::string& path) const;
    static Registry load(const std::string& path);

private:
    std::map<uint8_t, CustomObjectSpec> types_;
};

// ---- quantization ------------------------------------------------------------

uint64_t quantize(double v, double min, double max, int bits);
double dequantize(uint64_t q, double min, double max, int bits);

// Raw sub-field integers <-> engineering values.
double subfield_value(const SubFieldSpec& f, uint64_t raw);
uint64_t subfield_raw(const SubFieldSpec& f, double value);

Bytes pack_custom_payload(const CustomObjectSpec& spec, const std::vector<uint64_t>& raws);
std::optional<std::vector<uint64_t>> unpack_custom_payload(const CustomObjectSpec& spec,
                                                           const uint8_t* payload, size_t len);

// ---- smallest-three quaternion codec ----------------------------------------

struct BitString {
    uint64_t bits = 0;
    int nbits = 0;
    bool operator==(const BitString&) const = default;
};

// 2-bit index of the dropped (largest) component + 3 quantized components in
// [-1/sqrt2, 1/sqrt2]. 2 <= bits_per_component <= 16.
BitString encode_quat_smallest_three(const UnitQuat& q, int bits_per_component);
UnitQuat decode_quat_smallest_three(const BitString& bs, int bits_per_component);

// Sub-field form used inside transform blobs: {idx, c0, c1, c2}.
std::array<uint64_t, 4> quat_s3_raws(const UnitQuat& q, int bits_per_component);
UnitQuat quat_from_s3_raws(const std::array<uint64_t, 4>& raws, int bits_per_component);

// ---- motion updates ----------------------------------------------------------

struct MotionUpdate {
    uint32_t user_id = 0;
    uint32_t tick = 0;
    Transform head;
    Transform left_hand;
    Transform right_hand;
    double trigger_left = 0.0;
    double trigger_right = 0.0;
    bool keyboard_open = false;
};

// Which field ids carry which channel. Configurable so tests can permute it;
// the semantics extraction step never assumes these defaults.
struct MotionFieldLayout {
    uint8_t user_id = 1;
    uint8_t tick = 2;
    uint8_t head = 3;
    uint8_t left_hand = 4;
    uint8_t right_hand = 5;
    uint8_t trigger_left = 6;
    uint8_t trigger_right = 7;
    uint8_t event = 8;
    uint8_t channel = 1;
};

struct TransformCodec {
    bool lossless = false;
    int pos_bits = 16;
    double pos_min = -8.0;
    double pos_max = 8.0;
    int rot_bits = 9;
    int trig_bits = 8;
    uint8_t quant_type_code = 1;
    uint8_t lossless_type_code = 2;

    CustomObjectSpec transform_spec() const;  // active spec for this codec
    Registry registry() const;

    ByteString encode_transform(const Transform& t) const;  // throws OutOfBoundsError
    Transform decode_transform(const std::vector<uint64_t>& raws) const;
    Transform decode_transform_blob(const ByteString& blob) const;

    double decode_trigger(const FieldValue& v) const;
    FieldValue encode_trigger(double v) const;
};

Packet encode_motion_update(const MotionUpdate& u, const TransformCodec& codec,
                            const MotionFieldLayout& layout = {});

// Ground-truth-side decode (tests and oracles); the attack path goes through
// the recovered FieldSemanticsMap instead.
MotionUpdate decode_motion_update(const Packet& p, const TransformCodec& codec,
                                  const MotionFieldLayout& layout = {});

// ---- parsing ----------------------------------------------------------------

enum class ParseError {
    None = 0,
    Truncated,
    BadMagic,
    BadVersion,
    UnknownFieldKind,
    BadValue,
    TrailingBytes,
};

const char* parse_error_name(ParseError e);

struct ExpandedBlob {
    uint8_t type_code = 0;
    bool known = false;               // false: registry missing the type-code
    std::vector<uint64_t> raws;       // known only
    std::vector<double> values;       // known only, engineering units
};

struct ParsedField {
    uint8_t id = 0;
    FieldValue value;
    std::optional<ExpandedBlob> blob;  // set for ByteString fields when a registry was given
};

struct ParsedPacket {
    PacketHeader header;
    std::vector<ParsedField> fields;

    const ParsedField* find_field(uint8_t id) const;
};

// Never throws, never reads past the buffer. Without a registry custom
// objects stay opaque ByteStrings (the partial mode the ML attack consumes).
struct ParseOutcome {
    std::optional<ParsedPacket> packet;
    ParseError error = ParseError::None;
    bool ok() const { return error == ParseError::None; }
};

ParseOutcome parse_packet(const uint8_t* data, size_t len, const Registry* registry = nullptr);
ParseOutcome parse_packet(const Bytes& raw, const Registry* registry = nullptr);

}  // namespace vrkey::wire
