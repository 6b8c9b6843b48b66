#include <gtest/gtest.h>

#include <chrono>
#include <numbers>
#include <thread>

#include "vaidman/channel.hpp"
#include "vaidman/session.hpp"
#include "vaidman/transcript_io.hpp"
#include "vaidman/wire.hpp"

using namespace vaidman;
using namespace std::chrono_literals;

namespace {

WireMessage msg(MsgType type, std::uint64_t round, Party sender, Json payload = Json::object()) {
    WireMessage m;
    m.session_id = "0123456789abcdef";
    m.type = type;
    m.round_id = round;
    m.sender = sender;
    m.payload = std::move(payload);
    return m;
}

std::vector<WireMessage> corpus() {
    return {
        msg(MsgType::SessionStart, 0, Party::Alice),
        msg(MsgType::SessionStart, 0, Party::Charlie,
            Json{{"protocol", "facilitated"}, {"m", 100}, {"lambda", std::numbers::pi / 2}, {"policy", "sift-discard"},
                 {"seed", 18446744073709551615ULL}}),
        msg(MsgType::BasisAnnounce, 7, Party::Bob, Json{{"basis", "Z"}}),
        msg(MsgType::BasisInstruct, 8, Party::Charlie, Json{{"basis", "X"}}),
        msg(MsgType::AnnounceRequest, 9, Party::Charlie),
        msg(MsgType::MeasurementResult, 9, Party::Charlie, Json{{"outcome", -1}}),
        msg(MsgType::OutcomeAnnounce, 9, Party::Alice, Json{{"outcome", 1}}),
        msg(MsgType::ModeReveal, 100, Party::Charlie, Json{{"first_round", 0}, {"modes", "MC-M"}}),
        msg(MsgType::FlipRule, 100, Party::Charlie, Json{{"flipper", "bob"}, {"basis", "Z"}}),
        msg(MsgType::TranscriptUpload, 100, Party::Bob,
            Json{{"first_round", 0}, {"records", Json::array({Json{{"round_id", 0}, {"basis", "X"}, {"outcome", 1}}})}}),
        msg(MsgType::SessionEnd, 100, Party::Charlie, Json{{"status", "ok"}, {"verdict", "honest"}}),
        msg(MsgType::SessionEnd, 0, Party::Charlie, Json{{"status", "error"}, {"reason", "caf\xc3\xa9"}}),
    };
}

std::string frame_of(const std::string& body) {
    std::string f(4, '\0');
    const auto n = static_cast<std::uint32_t>(body.size());
    f[0] = static_cast<char>(n >> 24);
    f[1] = static_cast<char>(n >> 16);
    f[2] = static_cast<char>(n >> 8);
    f[3] = static_cast<char>(n);
    return f + body;
}

SessionParams params(std::uint64_t m, BasisPolicy policy, CheatModel cheat = CheatModel::honest(),
                     std::uint64_t seed = 42) {
    SessionParams p;
    p.protocol = Protocol::Facilitated;
    p.m = m;
    p.policy = policy;
    p.cheat = cheat;
    p.seed = seed;
    return p;
}

struct ManualRun {
    SessionTranscript transcript;
    SpokeResult alice;
    SpokeResult bob;
};

/// Runs the three roles over in-process channels and keeps the spoke results.
ManualRun run_in_process(const SessionParams& p, const SessionOptions& opt = {}) {
    auto [ca, sa] = make_in_process_pair();
    auto [cb, sb] = make_in_process_pair();
    ManualRun out;
    std::thread ta([&, ep = sa.get()] { out.alice = SpokeRole(Party::Alice, p.cheat, opt).run(*ep); });
    std::thread tb([&, ep = sb.get()] { out.bob = SpokeRole(Party::Bob, p.cheat, opt).run(*ep); });
    out.transcript = CharlieRole(p, opt).run(*ca, *cb);
    ta.join();
    tb.join();
    return out;
}

}  // namespace

TEST(WireCodec, RoundTripCorpus) {
    for (const auto& m : corpus()) {
        const std::string bytes = encode(m);
        const WireMessage back = decode(bytes);
        EXPECT_EQ(back, m) << to_string(m.type);
        EXPECT_EQ(encode(back), bytes);
    }
}

TEST(WireCodec, PinnedBytes) {
    auto m = msg(MsgType::BasisAnnounce, 3, Party::Alice, Json{{"basis", "Z"}});
    m.session_id = "00ff";
    const std::string body =
        R"({"msg_type":"BasisAnnounce","payload":{"basis":"Z"},"round_id":3,"sender":"alice","session_id":"00ff","version":1})";
    EXPECT_EQ(encode(m), frame_of(body));
    EXPECT_EQ(static_cast<unsigned char>(encode(m)[3]), body.size());
    EXPECT_EQ(decode(frame_of(body)), m);
}

TEST(WireCodec, KeyOrderInInputDoesNotMatter) {
    const std::string shuffled =
        R"({"version":1,"sender":"bob","round_id":2,"payload":{"outcome":-1},"msg_type":"OutcomeAnnounce","session_id":""})";
    auto m = decode(frame_of(shuffled));
    EXPECT_EQ(m.type, MsgType::OutcomeAnnounce);
    EXPECT_EQ(m.sender, Party::Bob);
    EXPECT_EQ(wire::get_outcome(m), -1);
}

TEST(WireCodec, TruncatedFramesAreErrors) {
    const std::string bytes = encode(corpus()[1]);
    for (std::size_t n = 0; n < bytes.size(); ++n) {
        EXPECT_THROW(decode(bytes.substr(0, n)), FrameError) << n;
    }
    EXPECT_THROW(decode(bytes + "x"), FrameError);
}

TEST(WireCodec, OversizeFrames) {
    auto big = msg(MsgType::ModeReveal, 0, Party::Charlie, Json{{"modes", std::string(kMaxFrameBytes, 'M')}});
    EXPECT_THROW(encode(big), FrameError);
    std::string header("\x00\x01\x00\x01", 4);
    EXPECT_THROW(frame_length(header), FrameError);
    EXPECT_THROW(decode(header + std::string(65537, ' ')), FrameError);
    std::string at_limit("\x00\x01\x00\x00", 4);
    EXPECT_EQ(frame_length(at_limit), kMaxFrameBytes);
}

TEST(WireCodec, UnknownMsgTypeIsUnsupported) {
    const std::string body =
        R"({"msg_type":"Teleport","payload":{},"round_id":0,"sender":"alice","session_id":"","version":1})";
    EXPECT_THROW(decode(frame_of(body)), UnsupportedMessageError);
    EXPECT_THROW(parse_msg_type("basisannounce"), UnsupportedMessageError);
}

TEST(WireCodec, MalformedBodies) {
    const std::vector<std::string> bad{
        "not json",
        "[1,2,3]",
        R"({"msg_type":"FlipRule","payload":{},"round_id":0,"sender":"alice","version":1})",
        R"({"msg_type":"FlipRule","payload":{},"round_id":-1,"sender":"alice","session_id":"","version":1})",
        R"({"msg_type":"FlipRule","payload":[],"round_id":0,"sender":"alice","session_id":"","version":1})",
        R"({"msg_type":"FlipRule","payload":{},"round_id":0,"sender":"eve","session_id":"","version":1})",
        R"({"msg_type":"FlipRule","payload":{},"round_id":0,"sender":"alice","session_id":"","version":"1"})",
        R"({"msg_type":"FlipRule","payload":{},"round_id":0,"sender":"alice","session_id":"","version":1,"x":0})",
        R"({"msg_type":3,"payload":{},"round_id":0,"sender":"alice","session_id":"","version":1})",
    };
    for (const auto& b : bad) {
        EXPECT_THROW(decode(frame_of(b)), FrameError) << b;
    }
    EXPECT_THROW(encode(msg(MsgType::FlipRule, 0, Party::Alice, Json::array())), FrameError);
}

TEST(WireCodec, PayloadAccessors) {
    auto m = msg(MsgType::OutcomeAnnounce, 0, Party::Alice, Json{{"outcome", 0}, {"basis", "Y"}, {"n", -2}});
    EXPECT_THROW(wire::get_outcome(m), ProtocolError);
    EXPECT_THROW(wire::get_player_basis(m), ProtocolError);
    EXPECT_THROW(wire::get_uint(m, "n"), ProtocolError);
    EXPECT_THROW(wire::get(m, "missing"), ProtocolError);
    EXPECT_EQ(wire::get_double(m, "n"), -2.0);
}

TEST(InProcessChannel, FifoAndClose) {
    auto [a, b] = make_in_process_pair();
    for (std::uint64_t r = 0; r < 5; ++r) {
        a->send(msg(MsgType::AnnounceRequest, r, Party::Charlie));
    }
    for (std::uint64_t r = 0; r < 5; ++r) {
        EXPECT_EQ(b->receive(100ms).round_id, r);
    }
    EXPECT_THROW(b->receive(20ms), TimeoutError);
    a->send(msg(MsgType::FlipRule, 9, Party::Charlie));
    a->close();
    EXPECT_EQ(b->receive(100ms).round_id, 9U);
    EXPECT_THROW(b->receive(100ms), ConnectionClosed);
    EXPECT_THROW(b->send(msg(MsgType::FlipRule, 9, Party::Bob)), ConnectionClosed);
}

TEST(TcpChannel, FramesSurviveTheSocket) {
    TcpListener listener({"127.0.0.1", 0});
    ASSERT_NE(listener.port(), 0);
    auto client = tcp_connect({"127.0.0.1", listener.port()}, 2000ms);
    auto server = listener.accept(2000ms);
    for (const auto& m : corpus()) {
        client->send(m);
        EXPECT_EQ(server->receive(2000ms), m);
    }
    EXPECT_THROW(server->receive(50ms), TimeoutError);
    client->close();
    EXPECT_THROW(server->receive(2000ms), ConnectionClosed);
}

TEST(TcpChannel, HalfFrameThenHangUpIsFrameError) {
    TcpListener listener({"127.0.0.1", 0});
    auto client = tcp_connect({"127.0.0.1", listener.port()}, 2000ms);
    auto server = listener.accept(2000ms);
    std::string f = encode(corpus()[2]);
    client->send_frame(f.substr(0, f.size() / 2));
    client->close();
    EXPECT_THROW(server->receive(2000ms), FrameError);
}

TEST(TcpChannel, OversizeHeaderRejected) {
    TcpListener listener({"127.0.0.1", 0});
    auto client = tcp_connect({"127.0.0.1", listener.port()}, 2000ms);
    auto server = listener.accept(2000ms);
    client->send_frame(std::string("\x7f\x00\x00\x00", 4));
    EXPECT_THROW(server->receive(2000ms), FrameError);
}

TEST(TcpChannel, ConnectTimesOutWithoutListener) {
    std::uint16_t port;
    {
        TcpListener probe({"127.0.0.1", 0});
        port = probe.port();
    }
    EXPECT_THROW(tcp_connect({"127.0.0.1", port}, 100ms), TimeoutError);
}

TEST(TcpChannel, HostPortParsing) {
    auto hp = parse_host_port("127.0.0.1:7001");
    EXPECT_EQ(hp.host, "127.0.0.1");
    EXPECT_EQ(hp.port, 7001);
    EXPECT_EQ(parse_host_port("localhost:0").port, 0);
    EXPECT_THROW(parse_host_port("7001"), ParameterError);
    EXPECT_THROW(parse_host_port("host:70000"), ParameterError);
    EXPECT_THROW(parse_host_port("host:"), ParameterError);
    EXPECT_THROW(parse_host_port(":80"), ParameterError);
}

TEST(Link, RoundIdsMustNotDecreaseOnSend) {
    auto [a, b] = make_in_process_pair();
    SessionOptions opt;
    Link link(*a, Party::Charlie, opt);
    link.send(MsgType::AnnounceRequest, 5);
    link.send(MsgType::MeasurementResult, 5, Json{{"outcome", 1}});
    EXPECT_THROW(link.send(MsgType::AnnounceRequest, 4), ProtocolError);
}

TEST(Link, RoundIdsMustNotDecreaseOnReceive) {
    auto [a, b] = make_in_process_pair();
    SessionOptions opt;
    opt.timeout = 200ms;
    Link link(*b, Party::Alice, opt);
    link.set_peer(Party::Charlie);
    a->send(msg(MsgType::AnnounceRequest, 5, Party::Charlie));
    a->send(msg(MsgType::AnnounceRequest, 3, Party::Charlie));
    link.receive_raw();
    EXPECT_THROW(link.receive_raw(), ProtocolError);
}

TEST(Link, ChecksSenderSessionAndVersion) {
    auto [a, b] = make_in_process_pair();
    SessionOptions opt;
    opt.timeout = 200ms;
    Link link(*b, Party::Alice, opt);
    link.set_peer(Party::Charlie);
    link.set_session("0123456789abcdef");
    a->send(msg(MsgType::AnnounceRequest, 0, Party::Bob));
    EXPECT_THROW(link.receive(), ProtocolError);
    auto other = msg(MsgType::AnnounceRequest, 1, Party::Charlie);
    other.session_id = "ffff";
    a->send(other);
    EXPECT_THROW(link.receive(), ProtocolError);
    auto v2 = msg(MsgType::AnnounceRequest, 2, Party::Charlie);
    v2.version = 2;
    a->send(v2);
    EXPECT_THROW(link.receive(), VersionMismatchError);
}

TEST(Link, RetriesExtendTheWait) {
    auto [a, b] = make_in_process_pair();
    SessionOptions opt;
    opt.timeout = 30ms;
    opt.retries = 3;
    Link link(*b, Party::Alice, opt);
    std::thread late([ep = a.get()] {
        std::this_thread::sleep_for(60ms);
        ep->send(msg(MsgType::AnnounceRequest, 0, Party::Charlie));
    });
    EXPECT_EQ(link.receive_raw().type, MsgType::AnnounceRequest);
    late.join();
    const auto t0 = std::chrono::steady_clock::now();
    EXPECT_THROW(link.receive_raw(), TimeoutError);
    EXPECT_GE(std::chrono::steady_clock::now() - t0, 120ms);
}

TEST(Session, IdIsSixteenHexDigits) {
    auto id = session_id_for(42);
    EXPECT_EQ(id.size(), 16U);
    EXPECT_EQ(id.find_first_not_of("0123456789abcdef"), std::string::npos);
    EXPECT_EQ(id, session_id_for(42));
    EXPECT_NE(id, session_id_for(43));
}

TEST(RunRoles, InProcessMatchesDirectSimulation) {
    for (auto policy : {BasisPolicy::SiftDiscard, BasisPolicy::CharlieAnnounces}) {
        for (const auto& cheat : cheat_models()) {
            auto p = params(100, policy, cheat, 1234);
            auto t = run_roles(p, TransportKind::InProcess);
            EXPECT_TRUE(t.complete) << t.error;
            EXPECT_EQ(t, facilitated_session(p)) << to_string(policy) << " " << cheat.id();
        }
    }
}

TEST(RunRoles, SocketTranscriptIsByteIdentical) {
    for (auto policy : {BasisPolicy::SiftDiscard, BasisPolicy::CharlieAnnounces}) {
        for (std::uint64_t seed : {1, 2, 3}) {
            auto p = params(100, policy, CheatModel::random_announcer(Party::Bob), seed);
            auto in = transcript_to_string(run_roles(p, TransportKind::InProcess));
            auto sock = transcript_to_string(run_roles(p, TransportKind::Socket));
            EXPECT_EQ(in, sock);
            EXPECT_EQ(in, transcript_to_string(facilitated_session(p)));
        }
    }
}

TEST(RunRoles, SecretSharingOverBothTransports) {
    SessionParams p;
    p.protocol = Protocol::HilleryQss;
    p.m = 200;
    p.seed = 77;
    auto ref = qss_session(p.m, p.seed);
    EXPECT_EQ(run_roles(p, TransportKind::InProcess), ref);
    EXPECT_EQ(run_roles(p, TransportKind::Socket), ref);
}

TEST(RunRoles, LargeSessionNeedsChunkedDebrief) {
    auto p = params(12000, BasisPolicy::CharlieAnnounces, CheatModel::honest(), 5);
    auto r = run_in_process(p);
    EXPECT_EQ(r.transcript, facilitated_session(p));
    EXPECT_EQ(r.alice.modes.size(), p.m);
}

TEST(RunRoles, VersionMismatchStopsBeforeAnyRound) {
    SessionOptions opt;
    opt.alice_version = 2;
    opt.timeout = 2000ms;
    for (auto kind : {TransportKind::InProcess, TransportKind::Socket}) {
        auto p = params(100, BasisPolicy::SiftDiscard);
        EXPECT_THROW(run_roles(p, kind, opt), VersionMismatchError) << to_string(kind);
    }
    auto [ca, sa] = make_in_process_pair();
    auto [cb, sb] = make_in_process_pair();
    std::exception_ptr alice_err;
    std::thread ta([&, ep = sa.get()] {
        try {
            SpokeRole(Party::Alice, CheatModel::honest(), opt).run(*ep);
        } catch (...) {
            alice_err = std::current_exception();
        }
    });
    std::thread tb([&, ep = sb.get()] {
        try {
            SpokeRole(Party::Bob, CheatModel::honest(), opt).run(*ep);
        } catch (...) {
        }
    });
    CharlieRole charlie(params(100, BasisPolicy::SiftDiscard), opt);
    EXPECT_THROW(charlie.run(*ca, *cb), VersionMismatchError);
    EXPECT_TRUE(charlie.log().empty());
    ca->close();
    cb->close();
    ta.join();
    tb.join();
    ASSERT_TRUE(alice_err);
    EXPECT_THROW(std::rethrow_exception(alice_err), HandshakeError);
}

TEST(RunRoles, DroppedConnectionTruncatesTranscript) {
    SessionOptions opt;
    opt.bob_drop_after = 37;
    opt.timeout = 2000ms;
    for (auto kind : {TransportKind::InProcess, TransportKind::Socket}) {
        for (auto policy : {BasisPolicy::SiftDiscard, BasisPolicy::CharlieAnnounces}) {
            auto p = params(100, policy, CheatModel::honest(), 8);
            auto t = run_roles(p, kind, opt);
            EXPECT_FALSE(t.complete);
            EXPECT_FALSE(t.error.empty());
            ASSERT_EQ(t.rounds.size(), 37U) << to_string(kind) << " " << to_string(policy);
            auto full = facilitated_session(p);
            EXPECT_TRUE(std::equal(t.rounds.begin(), t.rounds.end(), full.rounds.begin()));
            auto text = transcript_to_string(t);
            EXPECT_NE(text.find("\"complete\":false"), std::string::npos);
        }
    }
}

TEST(RunRoles, SilentSpokeTimesOut) {
    auto [ca, sa] = make_in_process_pair();
    auto [cb, sb] = make_in_process_pair();
    SessionOptions opt;
    opt.timeout = 100ms;
    auto p = params(10, BasisPolicy::SiftDiscard);
    // Alice completes the handshake and then says nothing.
    std::thread ta([ep = sa.get()] {
        WireMessage start;
        start.sender = Party::Alice;
        ep->send(start);
        try {
            ep->receive(2000ms);
            ep->receive(2000ms);
        } catch (const Error&) {
        }
    });
    std::thread tb([&, ep = sb.get()] {
        try {
            SpokeRole(Party::Bob, p.cheat, opt).run(*ep);
        } catch (const Error&) {
        }
    });
    CharlieRole charlie(p, opt);
    EXPECT_THROW(charlie.run(*ca, *cb), TimeoutError);
    EXPECT_TRUE(charlie.handshake_complete());
    ca->close();
    cb->close();
    ta.join();
    tb.join();
}

TEST(RunRoles, DuplicateIdentityFailsHandshake) {
    auto [ca, sa] = make_in_process_pair();
    auto [cb, sb] = make_in_process_pair();
    WireMessage start;
    start.sender = Party::Bob;
    sa->send(start);
    sb->send(start);
    SessionOptions opt;
    opt.timeout = 200ms;
    CharlieRole charlie(params(10, BasisPolicy::SiftDiscard), opt);
    EXPECT_THROW(charlie.run(*ca, *cb), HandshakeError);
    EXPECT_FALSE(charlie.handshake_complete());
}

TEST(RunRoles, OutOfOrderMessageIsProtocolError) {
    auto [ca, sa] = make_in_process_pair();
    auto [cb, sb] = make_in_process_pair();
    SessionOptions opt;
    opt.timeout = 500ms;
    auto p = params(10, BasisPolicy::SiftDiscard);
    std::thread ta([&, ep = sa.get()] {
        try {
            SpokeRole(Party::Alice, p.cheat, opt).run(*ep);
        } catch (const Error&) {
        }
    });
    std::thread tb([ep = sb.get()] {
        WireMessage start;
        start.sender = Party::Bob;
        ep->send(start);
        auto reply = ep->receive(2000ms);
        auto skip = msg(MsgType::BasisAnnounce, 4, Party::Bob, Json{{"basis", "Z"}});
        skip.session_id = reply.session_id;
        ep->send(skip);
    });
    CharlieRole charlie(p, opt);
    EXPECT_THROW(charlie.run(*ca, *cb), ProtocolError);
    ca->close();
    cb->close();
    ta.join();
    tb.join();
}

TEST(Debrief, HonestSpokesDeriveTheSameKeys) {
    for (auto policy : {BasisPolicy::SiftDiscard, BasisPolicy::CharlieAnnounces}) {
        auto p = params(600, policy, CheatModel::honest(), 21);
        auto r = run_in_process(p);
        auto keys = extract_key(r.transcript);
        EXPECT_EQ(r.alice.key, keys.alice_key);
        EXPECT_EQ(r.bob.key, keys.bob_key);
        EXPECT_EQ(r.alice.key, r.bob.key);
        EXPECT_FALSE(r.alice.key.empty());
        EXPECT_EQ(r.alice.verdict, "honest");
        EXPECT_EQ(r.alice.session_id, session_id_for(21));
    }
}

TEST(Debrief, ModesWithheldWhenCheatingSuspected) {
    auto p = params(3000, BasisPolicy::CharlieAnnounces, CheatModel::random_announcer(Party::Bob), 4);
    auto r = run_in_process(p);
    EXPECT_EQ(detect_cheating(r.transcript).verdict, Verdict::CheatingSuspected);
    EXPECT_EQ(r.alice.verdict, to_string(Verdict::CheatingSuspected));
    EXPECT_TRUE(r.alice.modes.empty());
    EXPECT_TRUE(r.bob.key.empty());
    EXPECT_EQ(r.transcript.params.cheat, CheatModel::random_announcer(Party::Bob));
}

TEST(Debrief, SpokesLearnOnlyTheirOwnOutcomes) {
    auto p = params(300, BasisPolicy::SiftDiscard, CheatModel::honest(), 3);
    // A wide slack keeps a short honest session from being flagged, so the modes are revealed.
    SessionOptions opt;
    opt.slack = 0.5;
    auto r = run_in_process(p, opt);
    ASSERT_EQ(r.alice.rounds.size(), p.m);
    ASSERT_EQ(r.alice.modes.size(), p.m);
    for (std::size_t i = 0; i < p.m; ++i) {
        EXPECT_EQ(r.alice.rounds[i].outcome, r.transcript.rounds[i].alice_outcome);
        EXPECT_EQ(r.bob.rounds[i].outcome, r.transcript.rounds[i].bob_outcome);
        EXPECT_EQ(r.alice.modes[i] == '-', !r.transcript.rounds[i].accepted);
    }
}

TEST(TranscriptFile, RoundTrip) {
    auto t = facilitated_session(params(50, BasisPolicy::SiftDiscard, CheatModel::outcome_flipper(Party::Alice), 6));
    auto text = transcript_to_string(t);
    EXPECT_EQ(transcript_from_string(text), t);
    EXPECT_EQ(transcript_to_string(transcript_from_string(text)), text);

    auto q = qss_session(40, 2);
    EXPECT_EQ(transcript_from_string(transcript_to_string(q)), q);

    SessionTranscript broken = t;
    broken.rounds.resize(10);
    broken.complete = false;
    broken.error = "charlie: peer closed the connection";
    EXPECT_EQ(transcript_from_string(transcript_to_string(broken)), broken);
}

TEST(TranscriptFile, LineFormat) {
    auto t = facilitated_session(params(1, BasisPolicy::CharlieAnnounces, CheatModel::honest(), 0));
    auto text = transcript_to_string(t);
    auto first = text.substr(0, text.find('\n'));
    auto j = Json::parse(first);
    EXPECT_EQ(j["type"], "round");
    EXPECT_EQ(j["charlie_basis"], "L");
    EXPECT_TRUE(j["charlie_outcome"] == "b0" || j["charlie_outcome"] == "b1");
    EXPECT_EQ(first.find("{\"accepted\":"), 0U);
    auto summary = Json::parse(text.substr(first.size() + 1));
    EXPECT_EQ(summary["type"], "summary");
    EXPECT_EQ(summary["rounds"], 1);
    EXPECT_EQ(summary["complete"], true);
}

TEST(TranscriptFile, RejectsMalformedInput) {
    auto text = transcript_to_string(facilitated_session(params(3, BasisPolicy::SiftDiscard)));
    EXPECT_THROW(transcript_from_string(""), ParameterError);
    EXPECT_THROW(transcript_from_string(text.substr(0, text.rfind("{\"cheat"))), ParameterError);
    EXPECT_THROW(transcript_from_string(text + text), ParameterError);
    EXPECT_THROW(transcript_from_string("{\"type\":\"round\"}\n"), ParameterError);
    EXPECT_THROW(transcript_from_string("garbage\n"), ParameterError);
}
