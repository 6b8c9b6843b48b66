#pragma once

// Round-level simulation of the GHZ secret-sharing protocol (X/Y bases,
// sifting to XXX, XYY, YXY, YYX) and of the facilitated W-state protocol in
// which Charlie's lambda-basis outcome splits rounds into message and control
// modes.
//
// Every party owns its random streams. Alice, Bob and Charlie each draw exactly
// one basis coin per round from their own stream (when the policy lets them
// choose), cheat models draw from a separate per-party stream, and the quantum
// source draws three uniforms per round from the Nature stream. The in-process
// session and the networked roles in session.hpp share these agents, which is
// what makes their transcripts identical.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vaidman/errors.hpp"
#include "vaidman/games.hpp"
#include "vaidman/qcore.hpp"
#include "vaidman/rng.hpp"
#include "vaidman/states.hpp"

namespace vaidman {

enum class Protocol { HilleryQss, Facilitated };
enum class RoundMode { Message, Control, Unresolved };
enum class BasisPolicy { SiftDiscard, CharlieAnnounces };
enum class Party { Alice, Bob, Charlie };

inline std::string_view to_string(Protocol p) { return p == Protocol::HilleryQss ? "hillery-qss" : "facilitated"; }

inline std::string_view to_string(RoundMode m) {
    switch (m) {
        case RoundMode::Message:
            return "message";
        case RoundMode::Control:
            return "control";
        case RoundMode::Unresolved:
            return "unresolved";
    }
    return "?";
}

inline std::string_view to_string(BasisPolicy p) {
    return p == BasisPolicy::SiftDiscard ? "sift-discard" : "charlie-announces";
}

inline std::string_view to_string(Party p) {
    switch (p) {
        case Party::Alice:
            return "alice";
        case Party::Bob:
            return "bob";
        case Party::Charlie:
            return "charlie";
    }
    return "?";
}

inline Protocol parse_protocol(std::string_view s) {
    if (s == "hillery-qss") return Protocol::HilleryQss;
    if (s == "facilitated") return Protocol::Facilitated;
    throw ParameterError("unknown protocol '" + std::string(s) + "'");
}

inline RoundMode parse_round_mode(std::string_view s) {
    for (auto m : {RoundMode::Message, RoundMode::Control, RoundMode::Unresolved}) {
        if (s == to_string(m)) return m;
    }
    throw ParameterError("unknown round mode '" + std::string(s) + "'");
}

inline BasisPolicy parse_basis_policy(std::string_view s) {
    if (s == "sift-discard" || s == "sift") return BasisPolicy::SiftDiscard;
    if (s == "charlie-announces" || s == "announce") return BasisPolicy::CharlieAnnounces;
    throw ParameterError("unknown basis policy '" + std::string(s) + "' (expected sift-discard or charlie-announces)");
}

inline Party parse_party(std::string_view s) {
    for (auto p : {Party::Alice, Party::Bob, Party::Charlie}) {
        if (s == to_string(p)) return p;
    }
    throw ParameterError("unknown party '" + std::string(s) + "'");
}

inline BasisKind parse_basis_kind(std::string_view s) {
    if (s == "X") return BasisKind::X;
    if (s == "Y") return BasisKind::Y;
    if (s == "Z") return BasisKind::Z;
    if (s == "L") return BasisKind::Lambda;
    throw ParameterError("unknown basis '" + std::string(s) + "'");
}

/// What a dishonest player does to the outcome they record and announce. The
/// quantum sampling is never affected.
struct CheatModel {
    enum class Kind { Honest, RandomAnnouncer, OutcomeFlipper };
    Kind kind = Kind::Honest;
    Party party = Party::Bob;

    static CheatModel honest() { return {}; }
    static CheatModel random_announcer(Party p) { return {Kind::RandomAnnouncer, p}; }
    static CheatModel outcome_flipper(Party p) { return {Kind::OutcomeFlipper, p}; }

    bool affects(Party p) const { return kind != Kind::Honest && party == p; }

    /// "honest", "random:bob", "flip:alice", ...
    std::string id() const {
        switch (kind) {
            case Kind::Honest:
                return "honest";
            case Kind::RandomAnnouncer:
                return "random:" + std::string(to_string(party));
            case Kind::OutcomeFlipper:
                return "flip:" + std::string(to_string(party));
        }
        return "?";
    }

    bool operator==(const CheatModel& o) const { return kind == o.kind && (kind == Kind::Honest || party == o.party); }
};

inline CheatModel parse_cheat_model(std::string_view s) {
    if (s == "honest") return CheatModel::honest();
    auto colon = s.find(':');
    if (colon != std::string_view::npos) {
        auto kind = s.substr(0, colon);
        Party p = parse_party(s.substr(colon + 1));
        if (p == Party::Charlie) {
            throw ParameterError("cheat models apply to alice or bob, not charlie");
        }
        if (kind == "random") return CheatModel::random_announcer(p);
        if (kind == "flip") return CheatModel::outcome_flipper(p);
    }
    throw ParameterError("unknown cheat model '" + std::string(s) + "' (expected honest, random:<party> or flip:<party>)");
}

/// Every cheat model the simulator knows.
inline std::vector<CheatModel> cheat_models() {
    return {CheatModel::honest(), CheatModel::random_announcer(Party::Alice), CheatModel::random_announcer(Party::Bob),
            CheatModel::outcome_flipper(Party::Alice), CheatModel::outcome_flipper(Party::Bob)};
}

struct SessionParams {
    Protocol protocol = Protocol::Facilitated;
    std::uint64_t m = 0;
    double lambda = std::numbers::pi / 2;
    BasisPolicy policy = BasisPolicy::SiftDiscard;
    CheatModel cheat;
    std::uint64_t seed = 0;

    void validate() const {
        if (m == 0) {
            throw ParameterError("a session needs m >= 1 rounds");
        }
        if (protocol == Protocol::Facilitated && !std::isfinite(lambda)) {
            throw ParameterError("lambda must be finite");
        }
        if (protocol == Protocol::HilleryQss && !(cheat == CheatModel::honest())) {
            throw ParameterError("cheat models are only defined for the facilitated protocol");
        }
    }

    bool operator==(const SessionParams&) const = default;
};

/// One protocol round. Outcomes are +1/-1; for a lambda-basis measurement +1
/// stands for b0. Player outcomes are the ones the player recorded, i.e. after
/// any cheat model. `mode` is Unresolved for GHZ rounds.
struct RoundRecord {
    std::uint64_t round_id = 0;
    RoundMode mode = RoundMode::Unresolved;
    BasisKind charlie_basis = BasisKind::Z;
    int charlie_outcome = 1;
    BasisKind alice_basis = BasisKind::Z;
    BasisKind bob_basis = BasisKind::Z;
    int alice_outcome = 1;
    int bob_outcome = 1;
    bool accepted = false;

    std::string charlie_label() const {
        if (charlie_basis == BasisKind::Lambda) {
            return charlie_outcome > 0 ? "b0" : "b1";
        }
        return charlie_outcome > 0 ? "+1" : "-1";
    }

    bool operator==(const RoundRecord&) const = default;
};

struct SessionTranscript {
    SessionParams params;
    std::vector<RoundRecord> rounds;
    /// False when the session stopped early; `error` then says why.
    bool complete = true;
    std::string error;

    bool operator==(const SessionTranscript&) const = default;
};

namespace detail {

inline int sign_of(int branch) { return branch == 0 ? 1 : -1; }

}  // namespace detail

// ---------------------------------------------------------------------------
// GHZ secret sharing

/// A one-qubit X or Y eigenstate, e.g. {Y, -1} is |-y>.
struct QssLabel {
    BasisKind basis = BasisKind::X;
    int sign = 1;

    bool operator==(const QssLabel&) const = default;
};

inline std::string to_string(const QssLabel& l) {
    return std::string(l.sign > 0 ? "+" : "-") + (l.basis == BasisKind::X ? "x" : "y");
}

/// Alice's post-measurement state given Bob's and Charlie's outcomes on the
/// standard GHZ state, as tabulated for the protocol.
inline QssLabel qss_alice_inference(QssLabel bob, QssLabel charlie) {
    for (auto l : {bob, charlie}) {
        if ((l.basis != BasisKind::X && l.basis != BasisKind::Y) || (l.sign != 1 && l.sign != -1)) {
            throw ParameterError("secret-sharing labels are +x, -x, +y or -y");
        }
    }
    // Rows: Bob (+x, -x, +y, -y); columns: Charlie (+x, -x, +y, -y).
    using B = BasisKind;
    static constexpr std::array<std::array<QssLabel, 4>, 4> table{{
        {{{B::X, 1}, {B::X, -1}, {B::Y, -1}, {B::Y, 1}}},
        {{{B::X, -1}, {B::X, 1}, {B::Y, 1}, {B::Y, -1}}},
        {{{B::Y, -1}, {B::Y, 1}, {B::X, -1}, {B::X, 1}}},
        {{{B::Y, 1}, {B::Y, -1}, {B::X, 1}, {B::X, -1}}},
    }};
    auto index = [](QssLabel l) { return (l.basis == BasisKind::X ? 0U : 2U) + (l.sign > 0 ? 0U : 1U); };
    return table[index(bob)][index(charlie)];
}

/// Alice's conditional one-qubit state after Bob and Charlie obtain the given
/// outcomes on the standard GHZ state, computed by projection.
inline StateVector qss_conditional_alice(QssLabel bob, QssLabel charlie) {
    auto br = measure_single(standard_ghz(), 1, MeasurementBasis::of(bob.basis))[bob.sign > 0 ? 0 : 1];
    auto bc = measure_single(*br.post_state, 2, MeasurementBasis::of(charlie.basis))[charlie.sign > 0 ? 0 : 1];
    const auto& post = *bc.post_state;
    // post = |alice> (x) |bob> (x) |charlie>; contract out the known factors.
    auto kb = basis_vectors(MeasurementBasis::of(bob.basis));
    auto kc = basis_vectors(MeasurementBasis::of(charlie.basis));
    const StateVector& vb = bob.sign > 0 ? kb.first : kb.second;
    const StateVector& vc = charlie.sign > 0 ? kc.first : kc.second;
    std::array<Complex, 2> alice{};
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            for (std::size_t c = 0; c < 2; ++c) {
                alice[a] += std::conj(vb[b] * vc[c]) * post[4 * a + 2 * b + c];
            }
        }
    }
    return StateVector(1, alice);
}

inline bool qss_accepts(BasisKind alice, BasisKind bob, BasisKind charlie) {
    int ys = (alice == BasisKind::Y) + (bob == BasisKind::Y) + (charlie == BasisKind::Y);
    return ys == 0 || ys == 2;
}

/// Stand-in for the physics of one GHZ round: a fresh standard GHZ state
/// measured by Charlie, then Bob, then Alice.
class QssSource {
  public:
    struct Sample {
        int alice = 1;
        int bob = 1;
        int charlie = 1;
    };

    QssSource() {
        const auto ghz = standard_ghz();
        const std::array<std::size_t, 3> order{2, 1, 0};
        for (unsigned k = 0; k < 8; ++k) {
            std::array<MeasurementBasis, 3> b{};
            for (unsigned q = 0; q < 3; ++q) {
                b[q] = ((k >> (2 - q)) & 1U) ? MeasurementBasis::y() : MeasurementBasis::x();
            }
            samplers_.emplace_back(ghz, b, order);
        }
    }

    Sample measure(BasisKind alice, BasisKind bob, BasisKind charlie, Rng& nature) const {
        JointOutcome o{3, samplers_[4 * bit(alice) + 2 * bit(bob) + bit(charlie)].sample(nature), 0.0};
        return {o.sign(0), o.sign(1), o.sign(2)};
    }

  private:
    static std::size_t bit(BasisKind k) {
        if (k == BasisKind::X) return 0;
        if (k == BasisKind::Y) return 1;
        throw ParameterError("secret-sharing parties measure in X or Y");
    }

    std::vector<SequentialSampler> samplers_;
};

/// A secret-sharing party's basis choice: X or Y with equal probability.
inline BasisKind qss_choose_basis(Rng& basis_rng) { return basis_rng.coin() ? BasisKind::Y : BasisKind::X; }

inline RoundRecord qss_record(std::uint64_t round_id, BasisKind alice_basis, BasisKind bob_basis,
                              BasisKind charlie_basis, const QssSource::Sample& s) {
    RoundRecord rec;
    rec.round_id = round_id;
    rec.mode = RoundMode::Unresolved;
    rec.alice_basis = alice_basis;
    rec.bob_basis = bob_basis;
    rec.charlie_basis = charlie_basis;
    rec.alice_outcome = s.alice;
    rec.bob_outcome = s.bob;
    rec.charlie_outcome = s.charlie;
    rec.accepted = qss_accepts(alice_basis, bob_basis, charlie_basis);
    return rec;
}

/// m rounds on fresh standard GHZ states; each party picks X or Y uniformly.
inline SessionTranscript qss_session(std::uint64_t m, std::uint64_t seed) {
    SessionParams params;
    params.protocol = Protocol::HilleryQss;
    params.m = m;
    params.seed = seed;
    params.validate();

    const QssSource source;
    Rng alice_rng(seed, Stream::AliceBasis);
    Rng bob_rng(seed, Stream::BobBasis);
    Rng charlie_rng(seed, Stream::CharlieBasis);
    Rng nature(seed, Stream::Nature);

    SessionTranscript t;
    t.params = params;
    t.rounds.reserve(m);
    for (std::uint64_t r = 0; r < m; ++r) {
        BasisKind a = qss_choose_basis(alice_rng);
        BasisKind b = qss_choose_basis(bob_rng);
        BasisKind c = qss_choose_basis(charlie_rng);
        t.rounds.push_back(qss_record(r, a, b, c, source.measure(a, b, c, nature)));
    }
    return t;
}

struct QssReport {
    std::uint64_t rounds = 0;
    std::uint64_t accepted = 0;
    double acceptance_rate = 0.0;
    /// Accepted rounds where Alice's outcome equals the tabulated inference.
    std::uint64_t inference_matches = 0;
};

inline QssReport analyze_qss(const SessionTranscript& t) {
    if (t.params.protocol != Protocol::HilleryQss) {
        throw ParameterError("analyze_qss needs a GHZ secret-sharing transcript");
    }
    QssReport rep;
    rep.rounds = t.rounds.size();
    for (const auto& r : t.rounds) {
        if (!r.accepted) continue;
        ++rep.accepted;
        QssLabel inferred = qss_alice_inference({r.bob_basis, r.bob_outcome}, {r.charlie_basis, r.charlie_outcome});
        if (inferred == QssLabel{r.alice_basis, r.alice_outcome}) {
            ++rep.inference_matches;
        }
    }
    rep.acceptance_rate = rep.rounds ? static_cast<double>(rep.accepted) / static_cast<double>(rep.rounds) : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Facilitated protocol

/// Whether the policy keeps a round with these player bases.
inline bool facilitated_accepts(BasisKind alice, BasisKind bob) { return alice == bob; }

inline RoundMode mode_for_branch(int charlie_branch) {
    return charlie_branch == 0 ? RoundMode::Message : RoundMode::Control;
}

/// Compliance of one control round: on Z both outcomes agree, on X
/// they differ.
inline bool control_round_complies(BasisKind basis, int alice_outcome, int bob_outcome) {
    return basis == BasisKind::Z ? alice_outcome * bob_outcome == 1 : alice_outcome * bob_outcome == -1;
}

/// Stand-in for the physics: prepares a fresh standard W state per round and
/// samples Charlie's lambda-basis outcome, then Alice's, then Bob's.
class FacilitatedSource {
  public:
    struct Sample {
        int charlie_branch = 0;
        int alice = 1;
        int bob = 1;
    };

    explicit FacilitatedSource(double lambda) {
        const auto w = standard_w();
        const auto lam = MeasurementBasis::lambda(lambda);
        const std::array<std::size_t, 3> order{2, 0, 1};
        for (auto a : {BasisKind::X, BasisKind::Z}) {
            for (auto b : {BasisKind::X, BasisKind::Z}) {
                const std::array<MeasurementBasis, 3> bases{MeasurementBasis::of(a), MeasurementBasis::of(b), lam};
                samplers_.emplace_back(w, bases, order);
            }
        }
    }

    Sample measure(BasisKind alice, BasisKind bob, Rng& nature) const {
        JointOutcome o{3, samplers_[2 * index(alice) + index(bob)].sample(nature), 0.0};
        return {o.branch(2), o.sign(0), o.sign(1)};
    }

  private:
    static std::size_t index(BasisKind k) {
        if (k == BasisKind::X) return 0;
        if (k == BasisKind::Z) return 1;
        throw ParameterError("facilitated players measure in X or Z");
    }

    std::vector<SequentialSampler> samplers_;
};

/// Alice or Bob: picks bases from their own stream and applies their cheat
/// model to the outcomes they observe.
class PlayerAgent {
  public:
    PlayerAgent(Party party, const SessionParams& params)
        : party_(party),
          cheat_(params.cheat.affects(party) ? params.cheat.kind : CheatModel::Kind::Honest),
          basis_rng_(params.seed, party == Party::Alice ? Stream::AliceBasis : Stream::BobBasis),
          cheat_rng_(params.seed, party == Party::Alice ? Stream::AliceCheat : Stream::BobCheat) {
        if (party == Party::Charlie) {
            throw ParameterError("PlayerAgent is for alice or bob");
        }
    }

    Party party() const { return party_; }

    BasisKind choose_basis() { return basis_rng_.coin() ? BasisKind::Z : BasisKind::X; }

    /// The outcome the player records and would announce.
    int record(int sampled) {
        switch (cheat_) {
            case CheatModel::Kind::Honest:
                return sampled;
            case CheatModel::Kind::RandomAnnouncer:
                return cheat_rng_.coin() ? 1 : -1;
            case CheatModel::Kind::OutcomeFlipper:
                return -sampled;
        }
        return sampled;
    }

  private:
    Party party_;
    CheatModel::Kind cheat_;
    Rng basis_rng_;
    Rng cheat_rng_;
};

/// Charlie's basis choices under CharlieAnnounces, plus the quantum source
/// and its Nature stream.
class CharlieAgent {
  public:
    explicit CharlieAgent(const SessionParams& params)
        : policy_(params.policy),
          source_(params.lambda),
          basis_rng_(params.seed, Stream::CharlieBasis),
          nature_(params.seed, Stream::Nature) {}

    BasisPolicy policy() const { return policy_; }

    BasisKind choose_basis() { return basis_rng_.coin() ? BasisKind::Z : BasisKind::X; }

    FacilitatedSource::Sample measure(BasisKind alice, BasisKind bob) { return source_.measure(alice, bob, nature_); }

  private:
    BasisPolicy policy_;
    FacilitatedSource source_;
    Rng basis_rng_;
    Rng nature_;
};

/// Assembles the record for one round from the three parties' views.
inline RoundRecord facilitated_record(std::uint64_t round_id, BasisKind alice_basis, BasisKind bob_basis,
                                      int charlie_branch, int alice_outcome, int bob_outcome) {
    RoundRecord rec;
    rec.round_id = round_id;
    rec.mode = mode_for_branch(charlie_branch);
    rec.charlie_basis = BasisKind::Lambda;
    rec.charlie_outcome = detail::sign_of(charlie_branch);
    rec.alice_basis = alice_basis;
    rec.bob_basis = bob_basis;
    rec.alice_outcome = alice_outcome;
    rec.bob_outcome = bob_outcome;
    rec.accepted = facilitated_accepts(alice_basis, bob_basis);
    return rec;
}

inline SessionTranscript facilitated_session(const SessionParams& p) {
    if (p.protocol != Protocol::Facilitated) {
        throw ParameterError("facilitated_session needs protocol = facilitated");
    }
    p.validate();
    CharlieAgent charlie(p);
    PlayerAgent alice(Party::Alice, p);
    PlayerAgent bob(Party::Bob, p);

    SessionTranscript t;
    t.params = p;
    t.rounds.reserve(p.m);
    for (std::uint64_t r = 0; r < p.m; ++r) {
        BasisKind a;
        BasisKind b;
        if (p.policy == BasisPolicy::SiftDiscard) {
            a = alice.choose_basis();
            b = bob.choose_basis();
        } else {
            a = b = charlie.choose_basis();
        }
        auto s = charlie.measure(a, b);
        int ao = alice.record(s.alice);
        int bo = bob.record(s.bob);
        t.rounds.push_back(facilitated_record(r, a, b, s.charlie_branch, ao, bo));
    }
    return t;
}

inline SessionTranscript facilitated_session(std::uint64_t m, double lambda, BasisPolicy policy, CheatModel cheat,
                                             std::uint64_t seed) {
    SessionParams p;
    p.protocol = Protocol::Facilitated;
    p.m = m;
    p.lambda = lambda;
    p.policy = policy;
    p.cheat = cheat;
    p.seed = seed;
    return facilitated_session(p);
}

struct KeyBits {
    std::string alice_key;
    std::string bob_key;
    /// Absent when there are no accepted message rounds.
    std::optional<double> agreement_rate;
};

/// Secret bit of a recorded outcome: |0> and |+> give 0, |1> and |-> give 1.
inline char key_bit(int outcome) { return outcome > 0 ? '0' : '1'; }

/// Bits from accepted message rounds; Bob flips his bit on Z rounds.
inline KeyBits extract_key(const SessionTranscript& t) {
    if (t.params.protocol != Protocol::Facilitated) {
        throw ParameterError("extract_key needs a facilitated transcript");
    }
    KeyBits k;
    std::size_t agree = 0;
    for (const auto& r : t.rounds) {
        if (!r.accepted || r.mode != RoundMode::Message) continue;
        char a = key_bit(r.alice_outcome);
        char b = key_bit(r.bob_basis == BasisKind::Z ? -r.bob_outcome : r.bob_outcome);
        k.alice_key.push_back(a);
        k.bob_key.push_back(b);
        agree += a == b ? 1U : 0U;
    }
    if (!k.alice_key.empty()) {
        k.agreement_rate = static_cast<double>(agree) / static_cast<double>(k.alice_key.size());
    }
    return k;
}

enum class Verdict { Honest, CheatingSuspected, Indeterminate };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Honest:
            return "honest";
        case Verdict::CheatingSuspected:
            return "cheating-suspected";
        case Verdict::Indeterminate:
            return "indeterminate";
    }
    return "?";
}

inline constexpr double kComplianceThreshold = 0.75;
inline constexpr double kDefaultSlack = 0.03;

struct DetectionReport {
    std::uint64_t control_rounds = 0;
    std::uint64_t compliant_rounds = 0;
    /// Absent when there are no accepted control rounds.
    std::optional<double> compliance_rate;
    double threshold = kComplianceThreshold;
    double slack = kDefaultSlack;
    Verdict verdict = Verdict::Indeterminate;
};

/// Honest iff the compliance rate over accepted control rounds is at least
/// threshold - slack.
inline DetectionReport detect_cheating(const SessionTranscript& t, double threshold = kComplianceThreshold,
                                       double slack = kDefaultSlack) {
    if (t.params.protocol != Protocol::Facilitated) {
        throw ParameterError("detect_cheating needs a facilitated transcript");
    }
    if (!(threshold >= 0.0 && threshold <= 1.0) || !(slack >= 0.0 && slack <= 1.0)) {
        throw ParameterError("threshold and slack must lie in [0, 1]");
    }
    DetectionReport rep;
    rep.threshold = threshold;
    rep.slack = slack;
    for (const auto& r : t.rounds) {
        if (!r.accepted || r.mode != RoundMode::Control) continue;
        ++rep.control_rounds;
        rep.compliant_rounds += control_round_complies(r.alice_basis, r.alice_outcome, r.bob_outcome) ? 1U : 0U;
    }
    if (rep.control_rounds == 0) {
        rep.verdict = Verdict::Indeterminate;
        return rep;
    }
    rep.compliance_rate = static_cast<double>(rep.compliant_rounds) / static_cast<double>(rep.control_rounds);
    rep.verdict = *rep.compliance_rate >= threshold - slack ? Verdict::Honest : Verdict::CheatingSuspected;
    return rep;
}

/// One accepted-round outcome class with its probability conditioned on acceptance.
struct AcceptedOutcome {
    RoundMode mode = RoundMode::Message;
    BasisKind basis = BasisKind::X;
    int alice = 1;
    int bob = 1;
    double probability = 0.0;
};

/// Exact distribution of (mode, basis, outcomes) over accepted honest rounds,
/// enumerated through the same acceptance rule the sessions use.
inline std::vector<AcceptedOutcome> accepted_round_distribution(double lambda, BasisPolicy policy) {
    const auto w = standard_w();
    const auto lam = MeasurementBasis::lambda(lambda);
    std::vector<AcceptedOutcome> out;
    double accepted_mass = 0.0;
    for (auto a : {BasisKind::X, BasisKind::Z}) {
        for (auto b : {BasisKind::X, BasisKind::Z}) {
            double p_bases;
            if (policy == BasisPolicy::SiftDiscard) {
                p_bases = 0.25;
            } else {
                p_bases = a == b ? 0.5 : 0.0;
            }
            if (p_bases == 0.0 || !facilitated_accepts(a, b)) continue;
            accepted_mass += p_bases;
            const std::array<MeasurementBasis, 3> bases{MeasurementBasis::of(a), MeasurementBasis::of(b), lam};
            for (const auto& o : joint_distribution(w, bases)) {
                out.push_back({mode_for_branch(o.branch(2)), a, o.sign(0), o.sign(1), p_bases * o.probability});
            }
        }
    }
    for (auto& o : out) {
        o.probability /= accepted_mass;
    }
    return out;
}

/// Expected honest compliance rate over accepted control rounds.
inline double expected_control_compliance(double lambda, BasisPolicy policy) {
    double control = 0.0;
    double compliant = 0.0;
    for (const auto& o : accepted_round_distribution(lambda, policy)) {
        if (o.mode != RoundMode::Control) continue;
        control += o.probability;
        if (control_round_complies(o.basis, o.alice, o.bob)) compliant += o.probability;
    }
    if (control <= 0.0) {
        throw ParameterError("no control rounds occur at this lambda");
    }
    return compliant / control;
}

}  // namespace vaidman
