#pragma once

// Transcript files: one JSON object per line, the round records in order and
// then a single summary object. Keys are sorted, so equal transcripts give
// byte-identical files.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vaidman/errors.hpp"
#include "vaidman/protocols.hpp"

namespace vaidman {

inline nlohmann::json round_to_json(const RoundRecord& r) {
    return {{"type", "round"},
            {"round_id", r.round_id},
            {"mode", to_string(r.mode)},
            {"charlie_basis", to_string(r.charlie_basis)},
            {"charlie_outcome", r.charlie_label()},
            {"alice_basis", to_string(r.alice_basis)},
            {"bob_basis", to_string(r.bob_basis)},
            {"alice_outcome", r.alice_outcome},
            {"bob_outcome", r.bob_outcome},
            {"accepted", r.accepted}};
}

inline nlohmann::json summary_to_json(const SessionTranscript& t) {
    const auto& p = t.params;
    return {{"type", "summary"},
            {"protocol", to_string(p.protocol)},
            {"m", p.m},
            {"lambda", p.lambda},
            {"policy", to_string(p.policy)},
            {"cheat", p.cheat.id()},
            {"seed", p.seed},
            {"rounds", t.rounds.size()},
            {"complete", t.complete},
            {"error", t.error}};
}

inline void write_transcript(std::ostream& out, const SessionTranscript& t) {
    for (const auto& r : t.rounds) {
        out << round_to_json(r).dump() << '\n';
    }
    out << summary_to_json(t).dump() << '\n';
}

inline std::string transcript_to_string(const SessionTranscript& t) {
    std::ostringstream os;
    write_transcript(os, t);
    return os.str();
}

namespace detail {

template <class T>
T field(const nlohmann::json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParameterError("transcript line " + std::to_string(line) + ": missing '" + key + "'");
    }
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParameterError("transcript line " + std::to_string(line) + ": bad '" + key + "'");
    }
}

inline int outcome_field(const nlohmann::json& j, const char* key, std::size_t line) {
    int v = field<int>(j, key, line);
    if (v != 1 && v != -1) {
        throw ParameterError("transcript line " + std::to_string(line) + ": '" + key + "' must be +1 or -1");
    }
    return v;
}

}  // namespace detail

/// Inverse of write_transcript. Throws ParameterError on malformed input.
inline SessionTranscript read_transcript(std::istream& in) {
    SessionTranscript t;
    bool summary = false;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        if (summary) {
            throw ParameterError("transcript line " + std::to_string(n) + ": content after the summary");
        }
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParameterError("transcript line " + std::to_string(n) + ": not a JSON object");
        }
        const auto type = detail::field<std::string>(j, "type", n);
        if (type == "round") {
            RoundRecord r;
            r.round_id = detail::field<std::uint64_t>(j, "round_id", n);
            r.mode = parse_round_mode(detail::field<std::string>(j, "mode", n));
            r.charlie_basis = parse_basis_kind(detail::field<std::string>(j, "charlie_basis", n));
            const auto label = detail::field<std::string>(j, "charlie_outcome", n);
            if (label == "b0" || label == "+1") {
                r.charlie_outcome = 1;
            } else if (label == "b1" || label == "-1") {
                r.charlie_outcome = -1;
            } else {
                throw ParameterError("transcript line " + std::to_string(n) + ": bad charlie_outcome");
            }
            if (r.charlie_label() != label) {
                throw ParameterError("transcript line " + std::to_string(n) + ": outcome label does not fit the basis");
            }
            r.alice_basis = parse_basis_kind(detail::field<std::string>(j, "alice_basis", n));
            r.bob_basis = parse_basis_kind(detail::field<std::string>(j, "bob_basis", n));
            r.alice_outcome = detail::outcome_field(j, "alice_outcome", n);
            r.bob_outcome = detail::outcome_field(j, "bob_outcome", n);
            r.accepted = detail::field<bool>(j, "accepted", n);
            t.rounds.push_back(r);
        } else if (type == "summary") {
            auto& p = t.params;
            p.protocol = parse_protocol(detail::field<std::string>(j, "protocol", n));
            p.m = detail::field<std::uint64_t>(j, "m", n);
            p.lambda = detail::field<double>(j, "lambda", n);
            p.policy = parse_basis_policy(detail::field<std::string>(j, "policy", n));
            p.cheat = parse_cheat_model(detail::field<std::string>(j, "cheat", n));
            p.seed = detail::field<std::uint64_t>(j, "seed", n);
            t.complete = detail::field<bool>(j, "complete", n);
            t.error = detail::field<std::string>(j, "error", n);
            if (detail::field<std::uint64_t>(j, "rounds", n) != t.rounds.size()) {
                throw ParameterError("transcript summary round count does not match the file");
            }
            summary = true;
        } else {
            throw ParameterError("transcript line " + std::to_string(n) + ": unknown type '" + type + "'");
        }
    }
    if (!summary) {
        throw ParameterError("transcript has no summary line");
    }
    return t;
}

inline SessionTranscript transcript_from_string(const std::string& s) {
    std::istringstream is(s);
    return read_transcript(is);
}

}  // namespace vaidman
