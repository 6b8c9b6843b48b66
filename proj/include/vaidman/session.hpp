#pragma once

// The three protocol roles as sequential actors exchanging wire-v1 messages
// over a star centered on Charlie, plus the harness that runs them in one
// process (in-process queues or loopback TCP).

#include <algorithm>
#include <cstdio>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vaidman/channel.hpp"
#include "vaidman/protocols.hpp"
#include "vaidman/wire.hpp"

namespace vaidman {

enum class TransportKind { InProcess, Socket };

inline std::string_view to_string(TransportKind k) { return k == TransportKind::InProcess ? "inprocess" : "socket"; }

inline TransportKind parse_transport_kind(std::string_view s) {
    if (s == "inprocess") return TransportKind::InProcess;
    if (s == "socket") return TransportKind::Socket;
    throw ParameterError("unknown transport '" + std::string(s) + "' (expected inprocess or socket)");
}

struct SessionOptions {
    /// Per-message receive timeout.
    Millis timeout = kDefaultTimeout;
    /// Extra timeout periods to wait before giving up on a message.
    unsigned retries = 0;
    double threshold = kComplianceThreshold;
    double slack = kDefaultSlack;

    // Fault injection for tests.
    /// Wire version Alice puts on her frames.
    int alice_version = kWireVersion;
    /// Bob hangs up after completing this many rounds.
    std::optional<std::uint64_t> bob_drop_after;
};

inline constexpr std::size_t kModesPerFrame = 4096;
inline constexpr std::size_t kRecordsPerFrame = 500;

/// One endpoint as seen by a role: stamps outgoing messages and validates
/// incoming ones (peer identity, version, session id, round order).
class Link {
  public:
    Link(Endpoint& ep, Party self, const SessionOptions& opt, int version = kWireVersion)
        : ep_(&ep), self_(self), opt_(opt), version_(version) {}

    Party self() const { return self_; }
    std::optional<Party> peer() const { return peer_; }
    void set_peer(Party p) { peer_ = p; }
    void set_session(std::string id) { session_ = std::move(id); }
    const std::string& session() const { return session_; }

    void send(MsgType type, std::uint64_t round_id, Json payload = Json::object()) {
        if (last_sent_ && round_id < *last_sent_) {
            throw ProtocolError(std::string(to_string(self_)) + " would send round " + std::to_string(round_id) +
                                " after round " + std::to_string(*last_sent_));
        }
        WireMessage m;
        m.version = version_;
        m.session_id = session_;
        m.type = type;
        m.round_id = round_id;
        m.sender = self_;
        m.payload = std::move(payload);
        ep_->send(m);
        last_sent_ = round_id;
    }

    /// Next message, without version or session checks (handshake use).
    WireMessage receive_raw() {
        for (unsigned attempt = 0;; ++attempt) {
            try {
                WireMessage m = ep_->receive(opt_.timeout);
                if (peer_ && m.sender != *peer_) {
                    throw ProtocolError("expected a message from " + std::string(to_string(*peer_)) + ", got one from " +
                                        std::string(to_string(m.sender)));
                }
                if (last_received_ && m.round_id < *last_received_) {
                    throw ProtocolError(std::string(to_string(m.sender)) + " sent round " + std::to_string(m.round_id) +
                                        " after round " + std::to_string(*last_received_));
                }
                last_received_ = m.round_id;
                return m;
            } catch (const TimeoutError&) {
                if (attempt >= opt_.retries) throw;
            }
        }
    }

    WireMessage receive() {
        WireMessage m = receive_raw();
        if (m.version != version_) {
            throw VersionMismatchError("peer speaks wire version " + std::to_string(m.version) + ", expected " +
                                       std::to_string(version_));
        }
        if (m.session_id != session_) {
            throw ProtocolError("message for session '" + m.session_id + "' in session '" + session_ + "'");
        }
        return m;
    }

    WireMessage expect(MsgType type, std::uint64_t round_id) {
        WireMessage m = receive();
        check(m, type, round_id);
        return m;
    }

    static void check(const WireMessage& m, MsgType type, std::uint64_t round_id) {
        if (m.type != type || m.round_id != round_id) {
            throw ProtocolError("expected " + std::string(to_string(type)) + " for round " + std::to_string(round_id) +
                                ", got " + std::string(to_string(m.type)) + " for round " +
                                std::to_string(m.round_id));
        }
    }

    void close() { ep_->close(); }

  private:
    Endpoint* ep_;
    Party self_;
    SessionOptions opt_;
    int version_;
    std::string session_;
    std::optional<Party> peer_;
    std::optional<std::uint64_t> last_sent_;
    std::optional<std::uint64_t> last_received_;
};

/// 16 hex digits derived from the seed.
inline std::string session_id_for(std::uint64_t seed) {
    Rng rng(seed, Stream::SessionId);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng.bits()));
    return buf;
}

/// A spoke's view of one round: its basis and the outcome it recorded.
struct SpokeRound {
    BasisKind basis = BasisKind::Z;
    int outcome = 1;
    bool operator==(const SpokeRound&) const = default;
};

/// Charlie's view of one round.
struct CharlieRound {
    BasisKind alice_basis = BasisKind::Z;
    BasisKind bob_basis = BasisKind::Z;
    BasisKind charlie_basis = BasisKind::Lambda;
    int charlie_outcome = 1;
};

namespace detail {

inline BasisKind player_basis(Protocol p, const std::string& s) {
    if (p == Protocol::Facilitated && (s == "X" || s == "Z")) return parse_basis_kind(s);
    if (p == Protocol::HilleryQss && (s == "X" || s == "Y")) return parse_basis_kind(s);
    throw ProtocolError("basis '" + s + "' is not allowed in " + std::string(to_string(p)));
}

inline Json params_payload(const SessionParams& p) {
    return Json{{"protocol", to_string(p.protocol)},
                {"m", p.m},
                {"lambda", p.lambda},
                {"policy", to_string(p.policy)},
                {"seed", p.seed}};
}

}  // namespace detail

/// Builds transcript rows from the three role views; uses the first
/// min(sizes) rounds.
inline std::vector<RoundRecord> assemble_rounds(const SessionParams& p, const std::vector<CharlieRound>& charlie,
                                                const std::vector<SpokeRound>& alice,
                                                const std::vector<SpokeRound>& bob) {
    const std::size_t n = std::min({charlie.size(), alice.size(), bob.size()});
    std::vector<RoundRecord> out;
    out.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& c = charlie[r];
        if (p.protocol == Protocol::Facilitated) {
            out.push_back(facilitated_record(r, alice[r].basis, bob[r].basis, c.charlie_outcome > 0 ? 0 : 1,
                                             alice[r].outcome, bob[r].outcome));
        } else {
            out.push_back(qss_record(r, alice[r].basis, bob[r].basis, c.charlie_basis,
                                     {alice[r].outcome, bob[r].outcome, c.charlie_outcome}));
        }
    }
    return out;
}

class CharlieRole {
  public:
    CharlieRole(SessionParams params, SessionOptions opt) : params_(std::move(params)), opt_(opt) {
        params_.validate();
    }

    bool handshake_complete() const { return handshake_done_; }
    const std::vector<CharlieRound>& log() const { return log_; }
    const std::string& session_id() const { return session_id_; }

    /// Runs the whole session over two spoke connections, in either order.
    /// Returns the assembled, cross-checked transcript.
    SessionTranscript run(Endpoint& first, Endpoint& second) {
        Link l0(first, Party::Charlie, opt_);
        Link l1(second, Party::Charlie, opt_);
        handshake(l0, l1);
        Link& alice = l0.peer() == Party::Alice ? l0 : l1;
        Link& bob = l0.peer() == Party::Alice ? l1 : l0;

        if (params_.protocol == Protocol::Facilitated) {
            facilitated_rounds(alice, bob);
        } else {
            qss_rounds(alice, bob);
        }
        finish(alice, bob);

        auto a = collect_upload(alice);
        auto b = collect_upload(bob);
        for (const auto& [r, outcomes] : announced_) {
            if (a.rounds[r].outcome != outcomes.first || b.rounds[r].outcome != outcomes.second) {
                throw ProtocolError("uploaded outcome for round " + std::to_string(r) +
                                    " differs from the announced one");
            }
        }
        SessionTranscript t;
        t.params = params_;
        t.params.cheat = merge_cheat(a.cheat, b.cheat);
        t.rounds = assemble_rounds(params_, log_, a.rounds, b.rounds);
        return t;
    }

  private:
    struct Upload {
        std::vector<SpokeRound> rounds;
        CheatModel cheat;
    };

    void handshake(Link& l0, Link& l1) {
        WireMessage m0 = l0.receive_raw();
        WireMessage m1 = l1.receive_raw();
        for (const auto* m : {&m0, &m1}) {
            if (m->version != kWireVersion) {
                const std::string reason = "wire version " + std::to_string(m->version) + " from " +
                                           std::string(to_string(m->sender)) + ", expected " +
                                           std::to_string(kWireVersion);
                for (Link* l : {&l0, &l1}) {
                    try {
                        l->send(MsgType::SessionEnd, 0, Json{{"status", "error"}, {"reason", reason}});
                    } catch (const TransportError&) {
                    }
                }
                throw VersionMismatchError(reason);
            }
            if (m->type != MsgType::SessionStart) {
                throw HandshakeError("expected SessionStart, got " + std::string(to_string(m->type)));
            }
            if (m->sender == Party::Charlie) {
                throw HandshakeError("a spoke claimed to be charlie");
            }
        }
        if (m0.sender == m1.sender) {
            throw HandshakeError("two spokes both claimed to be " + std::string(to_string(m0.sender)));
        }
        session_id_ = session_id_for(params_.seed);
        l0.set_peer(m0.sender);
        l1.set_peer(m1.sender);
        for (Link* l : {&l0, &l1}) {
            l->set_session(session_id_);
            l->send(MsgType::SessionStart, 0, detail::params_payload(params_));
        }
        handshake_done_ = true;
    }

    BasisKind announced_basis(Link& l, std::uint64_t r) {
        return detail::player_basis(params_.protocol, wire::get_string(l.expect(MsgType::BasisAnnounce, r), "basis"));
    }

    void facilitated_rounds(Link& alice, Link& bob) {
        CharlieAgent agent(params_);
        for (std::uint64_t r = 0; r < params_.m; ++r) {
            BasisKind a;
            BasisKind b;
            if (params_.policy == BasisPolicy::SiftDiscard) {
                a = announced_basis(alice, r);
                b = announced_basis(bob, r);
            } else {
                a = b = agent.choose_basis();
                for (Link* l : {&alice, &bob}) {
                    l->send(MsgType::BasisInstruct, r, Json{{"basis", to_string(a)}});
                }
            }
            auto s = agent.measure(a, b);
            const bool requested = facilitated_accepts(a, b) && mode_for_branch(s.charlie_branch) == RoundMode::Control;
            if (requested) {
                alice.send(MsgType::AnnounceRequest, r);
                bob.send(MsgType::AnnounceRequest, r);
            }
            alice.send(MsgType::MeasurementResult, r, Json{{"outcome", s.alice}});
            bob.send(MsgType::MeasurementResult, r, Json{{"outcome", s.bob}});
            if (requested) {
                int ao = wire::get_outcome(alice.expect(MsgType::OutcomeAnnounce, r));
                int bo = wire::get_outcome(bob.expect(MsgType::OutcomeAnnounce, r));
                announced_.push_back({r, {ao, bo}});
            }
            log_.push_back({a, b, BasisKind::Lambda, detail::sign_of(s.charlie_branch)});
        }
    }

    void qss_rounds(Link& alice, Link& bob) {
        const QssSource source;
        Rng basis_rng(params_.seed, Stream::CharlieBasis);
        Rng nature(params_.seed, Stream::Nature);
        for (std::uint64_t r = 0; r < params_.m; ++r) {
            BasisKind a = announced_basis(alice, r);
            BasisKind b = announced_basis(bob, r);
            BasisKind c = qss_choose_basis(basis_rng);
            auto s = source.measure(a, b, c, nature);
            alice.send(MsgType::MeasurementResult, r, Json{{"outcome", s.alice}});
            bob.send(MsgType::MeasurementResult, r, Json{{"outcome", s.bob}});
            log_.push_back({a, b, c, s.charlie});
        }
    }

    /// Verdict from the announced outcomes, then the reveal (withheld when
    /// cheating is suspected) and SessionEnd.
    void finish(Link& alice, Link& bob) {
        const std::uint64_t end = params_.m;
        Json status{{"status", "ok"}};
        if (params_.protocol == Protocol::Facilitated) {
            SessionTranscript announced;
            announced.params = params_;
            for (const auto& [r, o] : announced_) {
                announced.rounds.push_back(facilitated_record(r, log_[r].alice_basis, log_[r].bob_basis, 1, o.first,
                                                              o.second));
            }
            const auto rep = detect_cheating(announced, opt_.threshold, opt_.slack);
            status["verdict"] = to_string(rep.verdict);
            if (rep.verdict != Verdict::CheatingSuspected) {
                std::string modes;
                modes.reserve(log_.size());
                for (const auto& c : log_) {
                    if (!facilitated_accepts(c.alice_basis, c.bob_basis)) {
                        modes += '-';
                    } else {
                        modes += c.charlie_outcome > 0 ? 'M' : 'C';
                    }
                }
                for (std::size_t i = 0; i < modes.size(); i += kModesPerFrame) {
                    Json chunk{{"first_round", i}, {"modes", modes.substr(i, kModesPerFrame)}};
                    alice.send(MsgType::ModeReveal, end, chunk);
                    bob.send(MsgType::ModeReveal, end, chunk);
                }
                Json rule{{"flipper", "bob"}, {"basis", "Z"}};
                alice.send(MsgType::FlipRule, end, rule);
                bob.send(MsgType::FlipRule, end, rule);
            }
        }
        alice.send(MsgType::SessionEnd, end, status);
        bob.send(MsgType::SessionEnd, end, status);
    }

    Upload collect_upload(Link& l) {
        Upload up;
        up.rounds.reserve(params_.m);
        while (true) {
            WireMessage m = l.receive();
            if (m.round_id != params_.m) {
                throw ProtocolError("debrief message carries round " + std::to_string(m.round_id));
            }
            if (m.type == MsgType::SessionEnd) {
                if (wire::get_string(m, "status") != "ok") {
                    throw ProtocolError("spoke ended the session: " + m.payload.value("reason", std::string()));
                }
                try {
                    up.cheat = parse_cheat_model(wire::get_string(m, "cheat"));
                } catch (const ParameterError& e) {
                    throw ProtocolError(e.what());
                }
                if (!up.cheat.affects(*l.peer()) && !(up.cheat == CheatModel::honest())) {
                    throw ProtocolError("spoke reported a cheat model for another party");
                }
                break;
            }
            Link::check(m, MsgType::TranscriptUpload, params_.m);
            if (wire::get_uint(m, "first_round") != up.rounds.size()) {
                throw ProtocolError("transcript upload chunk out of order");
            }
            const Json& recs = wire::get(m, "records");
            if (!recs.is_array()) throw ProtocolError("records must be an array");
            for (const auto& rec : recs) {
                if (!rec.is_object() || !rec.contains("round_id") || !rec.contains("basis") ||
                    !rec.contains("outcome") || !rec["round_id"].is_number_unsigned() || !rec["basis"].is_string() ||
                    !rec["outcome"].is_number_integer()) {
                    throw ProtocolError("malformed transcript record");
                }
                const std::uint64_t r = rec["round_id"].get<std::uint64_t>();
                const int o = rec["outcome"].get<int>();
                if (r != up.rounds.size() || r >= params_.m || (o != 1 && o != -1)) {
                    throw ProtocolError("bad transcript record for round " + std::to_string(r));
                }
                BasisKind b = detail::player_basis(params_.protocol, rec["basis"].get<std::string>());
                const auto& c = log_[r];
                if (b != (l.peer() == Party::Alice ? c.alice_basis : c.bob_basis)) {
                    throw ProtocolError("uploaded basis for round " + std::to_string(r) + " differs from the session");
                }
                up.rounds.push_back({b, o});
            }
        }
        if (up.rounds.size() != params_.m) {
            throw ProtocolError("spoke uploaded " + std::to_string(up.rounds.size()) + " of " +
                                std::to_string(params_.m) + " rounds");
        }
        return up;
    }

    static CheatModel merge_cheat(const CheatModel& a, const CheatModel& b) {
        const bool ha = a == CheatModel::honest();
        const bool hb = b == CheatModel::honest();
        if (!ha && !hb) {
            throw ProtocolError("both spokes report cheating; transcripts describe at most one cheater");
        }
        return ha ? b : a;
    }

    SessionParams params_;
    SessionOptions opt_;
    std::string session_id_;
    bool handshake_done_ = false;
    std::vector<CharlieRound> log_;
    std::vector<std::pair<std::uint64_t, std::pair<int, int>>> announced_;
};

/// What a spoke learned by the end of a session.
struct SpokeResult {
    SessionParams params;
    std::string session_id;
    std::vector<SpokeRound> rounds;
    /// Per round: 'M' message, 'C' control, '-' discarded. Empty if withheld.
    std::string modes;
    /// This spoke's key string (after the flip rule); empty if modes were withheld.
    std::string key;
    std::string verdict;
};

class SpokeRole {
  public:
    /// `cheat` is this process's cheat configuration; it only has an effect
    /// if it names this party.
    SpokeRole(Party self, CheatModel cheat, SessionOptions opt) : self_(self), cheat_(cheat), opt_(opt) {
        if (self == Party::Charlie) {
            throw ParameterError("spokes are alice or bob");
        }
        if (!cheat_.affects(self_)) {
            cheat_ = CheatModel::honest();
        }
    }

    bool handshake_complete() const { return handshake_done_; }
    const std::vector<SpokeRound>& log() const { return result_.rounds; }

    SpokeResult run(Endpoint& ep) {
        const int version = self_ == Party::Alice ? opt_.alice_version : kWireVersion;
        Link charlie(ep, self_, opt_, version);
        charlie.set_peer(Party::Charlie);
        handshake(charlie, version);
        auto& p = result_.params;

        std::optional<PlayerAgent> agent;
        std::optional<Rng> qss_rng;
        if (p.protocol == Protocol::Facilitated) {
            agent.emplace(self_, p);
        } else {
            qss_rng.emplace(p.seed, self_ == Party::Alice ? Stream::AliceBasis : Stream::BobBasis);
        }
        for (std::uint64_t r = 0; r < p.m; ++r) {
            if (self_ == Party::Bob && opt_.bob_drop_after && r == *opt_.bob_drop_after) {
                charlie.close();
                throw ConnectionClosed("bob hung up after " + std::to_string(r) + " rounds");
            }
            BasisKind basis;
            if (p.protocol == Protocol::HilleryQss) {
                basis = qss_choose_basis(*qss_rng);
                charlie.send(MsgType::BasisAnnounce, r, Json{{"basis", to_string(basis)}});
            } else if (p.policy == BasisPolicy::SiftDiscard) {
                basis = agent->choose_basis();
                charlie.send(MsgType::BasisAnnounce, r, Json{{"basis", to_string(basis)}});
            } else {
                basis = detail::player_basis(
                    p.protocol, wire::get_string(charlie.expect(MsgType::BasisInstruct, r), "basis"));
            }
            WireMessage m = charlie.receive();
            bool requested = false;
            if (m.type == MsgType::AnnounceRequest && p.protocol == Protocol::Facilitated) {
                Link::check(m, MsgType::AnnounceRequest, r);
                requested = true;
                m = charlie.receive();
            }
            Link::check(m, MsgType::MeasurementResult, r);
            int sampled = wire::get_outcome(m);
            int outcome = agent ? agent->record(sampled) : sampled;
            if (requested) {
                charlie.send(MsgType::OutcomeAnnounce, r, Json{{"outcome", outcome}});
            }
            result_.rounds.push_back({basis, outcome});
        }
        debrief(charlie);
        return result_;
    }

  private:
    void handshake(Link& charlie, int version) {
        charlie.send(MsgType::SessionStart, 0);
        WireMessage m = charlie.receive_raw();
        if (m.type == MsgType::SessionEnd) {
            throw HandshakeError("charlie refused the session: " + m.payload.value("reason", std::string("no reason")));
        }
        if (m.version != version) {
            throw VersionMismatchError("charlie speaks wire version " + std::to_string(m.version) + ", expected " +
                                       std::to_string(version));
        }
        if (m.type != MsgType::SessionStart || m.session_id.empty()) {
            throw HandshakeError("expected SessionStart with a session id, got " + std::string(to_string(m.type)));
        }
        SessionParams p;
        try {
            p.protocol = parse_protocol(wire::get_string(m, "protocol"));
            p.m = wire::get_uint(m, "m");
            p.lambda = wire::get_double(m, "lambda");
            p.policy = parse_basis_policy(wire::get_string(m, "policy"));
            p.seed = wire::get_uint(m, "seed");
            if (p.protocol == Protocol::Facilitated) {
                p.cheat = cheat_;
            }
            p.validate();
        } catch (const Error& e) {
            throw HandshakeError(std::string("bad session parameters: ") + e.what());
        }
        charlie.set_session(m.session_id);
        result_.params = p;
        result_.session_id = m.session_id;
        handshake_done_ = true;
    }

    void debrief(Link& charlie) {
        const auto& p = result_.params;
        std::string modes;
        std::optional<std::string> flip_basis;
        while (true) {
            WireMessage m = charlie.receive();
            if (m.round_id != p.m) {
                throw ProtocolError("end-of-session message carries round " + std::to_string(m.round_id));
            }
            if (m.type == MsgType::ModeReveal) {
                if (wire::get_uint(m, "first_round") != modes.size()) {
                    throw ProtocolError("mode reveal chunk out of order");
                }
                modes += wire::get_string(m, "modes");
            } else if (m.type == MsgType::FlipRule) {
                if (wire::get_string(m, "flipper") == to_string(self_)) {
                    flip_basis = wire::get_string(m, "basis");
                }
            } else if (m.type == MsgType::SessionEnd) {
                if (wire::get_string(m, "status") != "ok") {
                    throw ProtocolError("charlie ended the session: " + m.payload.value("reason", std::string()));
                }
                result_.verdict = m.payload.value("verdict", std::string());
                break;
            } else {
                throw ProtocolError("unexpected " + std::string(to_string(m.type)) + " at session end");
            }
        }
        if (!modes.empty()) {
            if (modes.size() != p.m || modes.find_first_not_of("MC-") != std::string::npos) {
                throw ProtocolError("mode reveal does not cover the session");
            }
            result_.modes = modes;
            for (std::size_t r = 0; r < p.m; ++r) {
                if (modes[r] != 'M') continue;
                const auto& rec = result_.rounds[r];
                int o = rec.outcome;
                if (flip_basis && *flip_basis == to_string(rec.basis)) o = -o;
                result_.key += key_bit(o);
            }
        }

        const auto& rounds = result_.rounds;
        for (std::size_t i = 0; i < rounds.size(); i += kRecordsPerFrame) {
            Json recs = Json::array();
            for (std::size_t r = i; r < std::min(rounds.size(), i + kRecordsPerFrame); ++r) {
                recs.push_back({{"round_id", r}, {"basis", to_string(rounds[r].basis)}, {"outcome", rounds[r].outcome}});
            }
            charlie.send(MsgType::TranscriptUpload, p.m, Json{{"first_round", i}, {"records", std::move(recs)}});
        }
        charlie.send(MsgType::SessionEnd, p.m, Json{{"status", "ok"}, {"cheat", cheat_.id()}});
    }

    Party self_;
    CheatModel cheat_;
    SessionOptions opt_;
    bool handshake_done_ = false;
    SpokeResult result_;
};

namespace detail {

inline std::string what_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& x) {
        return x.what();
    } catch (...) {
        return "unknown error";
    }
}

}  // namespace detail

/// Runs Charlie in the calling thread and Alice and Bob in their own threads.
///
/// Handshake failures (including a version mismatch) are thrown. A failure
/// after the handshake yields the rounds every role completed, with
/// complete = false and the error text.
inline SessionTranscript run_roles(const SessionParams& params, TransportKind kind,
                                   const SessionOptions& opt = {}) {
    params.validate();
    std::array<std::unique_ptr<Endpoint>, 2> hub;
    std::array<std::unique_ptr<Endpoint>, 2> spoke;
    std::unique_ptr<TcpListener> listener;
    if (kind == TransportKind::InProcess) {
        std::tie(hub[0], spoke[0]) = make_in_process_pair();
        std::tie(hub[1], spoke[1]) = make_in_process_pair();
    } else {
        listener = std::make_unique<TcpListener>(HostPort{"127.0.0.1", 0});
    }
    const std::uint16_t port = listener ? listener->port() : 0;

    std::array<SpokeRole, 2> roles{SpokeRole(Party::Alice, params.cheat, opt),
                                   SpokeRole(Party::Bob, params.cheat, opt)};
    std::array<std::exception_ptr, 2> spoke_err;
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < 2; ++i) {
        threads.emplace_back([&, i] {
            try {
                if (!spoke[i]) spoke[i] = tcp_connect({"127.0.0.1", port}, opt.timeout);
                roles[i].run(*spoke[i]);
            } catch (...) {
                spoke_err[i] = std::current_exception();
            }
            if (spoke[i]) spoke[i]->close();
        });
    }

    CharlieRole charlie(params, opt);
    SessionTranscript result;
    std::exception_ptr charlie_err;
    try {
        if (listener) {
            hub[0] = listener->accept(opt.timeout);
            hub[1] = listener->accept(opt.timeout);
        }
        result = charlie.run(*hub[0], *hub[1]);
    } catch (...) {
        charlie_err = std::current_exception();
    }
    for (auto& h : hub) {
        if (h) h->close();
    }
    for (auto& t : threads) t.join();

    if (!charlie_err) return result;
    if (!charlie.handshake_complete()) std::rethrow_exception(charlie_err);

    SessionTranscript t;
    t.params = params;
    t.rounds = assemble_rounds(params, charlie.log(), roles[0].log(), roles[1].log());
    t.complete = false;
    t.error = "charlie: " + detail::what_of(charlie_err);
    for (std::size_t i = 0; i < 2; ++i) {
        if (spoke_err[i]) {
            t.error += "; " + std::string(to_string(i == 0 ? Party::Alice : Party::Bob)) + ": " +
                       detail::what_of(spoke_err[i]);
        }
    }
    return t;
}

/// Charlie as a standalone process: listens, serves one session, and returns
/// its transcript. After the handshake, failures give an incomplete
/// transcript without rounds, since the spokes' outcomes never arrived.
inline SessionTranscript serve_charlie(const SessionParams& params, const HostPort& listen,
                                       const SessionOptions& opt = {}) {
    TcpListener listener(listen);
    auto a = listener.accept(opt.timeout);
    auto b = listener.accept(opt.timeout);
    CharlieRole charlie(params, opt);
    try {
        return charlie.run(*a, *b);
    } catch (const Error& e) {
        a->close();
        b->close();
        if (!charlie.handshake_complete()) throw;
        SessionTranscript t;
        t.params = params;
        t.complete = false;
        t.error = std::string("charlie: ") + e.what();
        return t;
    }
}

/// Alice or Bob as a standalone process.
inline SpokeResult join_as_spoke(Party self, const CheatModel& cheat, const HostPort& charlie,
                                 const SessionOptions& opt = {}) {
    auto ep = tcp_connect(charlie, opt.timeout);
    SpokeRole role(self, cheat, opt);
    return role.run(*ep);
}

}  // namespace vaidman
