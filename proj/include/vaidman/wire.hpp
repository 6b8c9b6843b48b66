#pragma once

// wire-v1 framing: a 4-byte big-endian payload length followed by one compact
// UTF-8 JSON object. Field names and payloads are documented in
// schema/wire-v1/README.md.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vaidman/errors.hpp"
#include "vaidman/protocols.hpp"

namespace vaidman {

using Json = nlohmann::json;

inline constexpr int kWireVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = 64 * 1024;
inline constexpr std::size_t kFrameHeaderBytes = 4;

enum class MsgType {
    SessionStart,
    SessionEnd,
    BasisAnnounce,
    BasisInstruct,
    MeasurementResult,
    AnnounceRequest,
    OutcomeAnnounce,
    ModeReveal,
    FlipRule,
    TranscriptUpload,
};

inline constexpr std::array<MsgType, 10> kAllMsgTypes{
    MsgType::SessionStart,    MsgType::SessionEnd,      MsgType::BasisAnnounce, MsgType::BasisInstruct,
    MsgType::MeasurementResult, MsgType::AnnounceRequest, MsgType::OutcomeAnnounce, MsgType::ModeReveal,
    MsgType::FlipRule,        MsgType::TranscriptUpload,
};

inline std::string_view to_string(MsgType t) {
    switch (t) {
        case MsgType::SessionStart:
            return "SessionStart";
        case MsgType::SessionEnd:
            return "SessionEnd";
        case MsgType::BasisAnnounce:
            return "BasisAnnounce";
        case MsgType::BasisInstruct:
            return "BasisInstruct";
        case MsgType::MeasurementResult:
            return "MeasurementResult";
        case MsgType::AnnounceRequest:
            return "AnnounceRequest";
        case MsgType::OutcomeAnnounce:
            return "OutcomeAnnounce";
        case MsgType::ModeReveal:
            return "ModeReveal";
        case MsgType::FlipRule:
            return "FlipRule";
        case MsgType::TranscriptUpload:
            return "TranscriptUpload";
    }
    return "?";
}

inline MsgType parse_msg_type(std::string_view s) {
    for (auto t : kAllMsgTypes) {
        if (s == to_string(t)) return t;
    }
    throw UnsupportedMessageError("unsupported msg_type '" + std::string(s) + "'");
}

struct WireMessage {
    int version = kWireVersion;
    std::string session_id;
    MsgType type = MsgType::SessionStart;
    std::uint64_t round_id = 0;
    Party sender = Party::Charlie;
    Json payload = Json::object();

    bool operator==(const WireMessage& o) const {
        return version == o.version && session_id == o.session_id && type == o.type && round_id == o.round_id &&
               sender == o.sender && payload == o.payload;
    }
};

/// The JSON body of a frame. Keys come out sorted, so equal messages always
/// serialize to the same bytes.
inline std::string encode_body(const WireMessage& m) {
    if (!m.payload.is_object()) {
        throw FrameError("payload must be a JSON object");
    }
    Json j;
    j["version"] = m.version;
    j["session_id"] = m.session_id;
    j["msg_type"] = to_string(m.type);
    j["round_id"] = m.round_id;
    j["sender"] = to_string(m.sender);
    j["payload"] = m.payload;
    return j.dump();
}

inline std::string encode(const WireMessage& m) {
    std::string body = encode_body(m);
    if (body.size() > kMaxFrameBytes) {
        throw FrameError("frame of " + std::to_string(body.size()) + " bytes exceeds the 64 KiB limit");
    }
    const auto n = static_cast<std::uint32_t>(body.size());
    std::string frame;
    frame.reserve(kFrameHeaderBytes + body.size());
    frame.push_back(static_cast<char>((n >> 24) & 0xFF));
    frame.push_back(static_cast<char>((n >> 16) & 0xFF));
    frame.push_back(static_cast<char>((n >> 8) & 0xFF));
    frame.push_back(static_cast<char>(n & 0xFF));
    frame += body;
    return frame;
}

/// Payload length announced by a frame header; throws on oversize frames.
inline std::size_t frame_length(std::string_view header) {
    if (header.size() < kFrameHeaderBytes) {
        throw FrameError("truncated frame header");
    }
    std::size_t n = 0;
    for (std::size_t i = 0; i < kFrameHeaderBytes; ++i) {
        n = (n << 8) | static_cast<unsigned char>(header[i]);
    }
    if (n > kMaxFrameBytes) {
        throw FrameError("frame of " + std::to_string(n) + " bytes exceeds the 64 KiB limit");
    }
    return n;
}

inline WireMessage decode_body(std::string_view body) {
    Json j = Json::parse(body.begin(), body.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw FrameError("frame body is not a JSON object");
    }
    auto field = [&](const char* key) -> const Json& {
        auto it = j.find(key);
        if (it == j.end()) {
            throw FrameError(std::string("frame is missing '") + key + "'");
        }
        return *it;
    };
    const Json& type = field("msg_type");
    if (!type.is_string()) {
        throw FrameError("msg_type must be a string");
    }
    WireMessage m;
    m.type = parse_msg_type(type.get<std::string>());
    const Json& version = field("version");
    const Json& sid = field("session_id");
    const Json& round = field("round_id");
    const Json& sender = field("sender");
    const Json& payload = field("payload");
    if (!version.is_number_integer() || !sid.is_string() || !round.is_number_unsigned() || !sender.is_string() ||
        !payload.is_object()) {
        throw FrameError("frame field has the wrong JSON type");
    }
    if (j.size() != 6) {
        throw FrameError("frame has unknown top-level fields");
    }
    m.version = version.get<int>();
    m.session_id = sid.get<std::string>();
    m.round_id = round.get<std::uint64_t>();
    try {
        m.sender = parse_party(sender.get<std::string>());
    } catch (const ParameterError& e) {
        throw FrameError(e.what());
    }
    m.payload = payload;
    return m;
}

/// Decodes exactly one frame; trailing or missing bytes are errors.
inline WireMessage decode(std::string_view frame) {
    std::size_t n = frame_length(frame);
    if (frame.size() < kFrameHeaderBytes + n) {
        throw FrameError("truncated frame: header announces " + std::to_string(n) + " bytes, " +
                         std::to_string(frame.size() - kFrameHeaderBytes) + " present");
    }
    if (frame.size() > kFrameHeaderBytes + n) {
        throw FrameError("trailing bytes after frame");
    }
    return decode_body(frame.substr(kFrameHeaderBytes));
}

// Typed payload access. Missing or mistyped fields are protocol errors.
namespace wire {

inline const Json& get(const WireMessage& m, const char* key) {
    auto it = m.payload.find(key);
    if (it == m.payload.end()) {
        throw ProtocolError(std::string(to_string(m.type)) + " payload is missing '" + key + "'");
    }
    return *it;
}

inline std::string get_string(const WireMessage& m, const char* key) {
    const Json& v = get(m, key);
    if (!v.is_string()) throw ProtocolError(std::string("payload field '") + key + "' must be a string");
    return v.get<std::string>();
}

inline std::uint64_t get_uint(const WireMessage& m, const char* key) {
    const Json& v = get(m, key);
    if (!v.is_number_unsigned()) throw ProtocolError(std::string("payload field '") + key + "' must be unsigned");
    return v.get<std::uint64_t>();
}

inline double get_double(const WireMessage& m, const char* key) {
    const Json& v = get(m, key);
    if (!v.is_number()) throw ProtocolError(std::string("payload field '") + key + "' must be a number");
    return v.get<double>();
}

inline int get_outcome(const WireMessage& m, const char* key = "outcome") {
    const Json& v = get(m, key);
    if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1)) {
        throw ProtocolError(std::string("payload field '") + key + "' must be +1 or -1");
    }
    return v.get<int>();
}

inline BasisKind get_player_basis(const WireMessage& m, const char* key = "basis") {
    std::string s = get_string(m, key);
    if (s == "X") return BasisKind::X;
    if (s == "Z") return BasisKind::Z;
    throw ProtocolError("player basis must be X or Z, got '" + s + "'");
}

}  // namespace wire

}  // namespace vaidman
