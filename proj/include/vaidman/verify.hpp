#pragma once

// Reproduction checks run by `vaidman verify-all`. Each check compares the
// exact enumerators against closed forms, published values and sampled
// sessions, and reports PASS/FAIL with the worst deviation it saw.

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vaidman/entanglement.hpp"
#include "vaidman/format.hpp"
#include "vaidman/games.hpp"
#include "vaidman/protocols.hpp"
#include "vaidman/session.hpp"
#include "vaidman/states.hpp"
#include "vaidman/transcript_io.hpp"

namespace vaidman {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 2024;
    std::uint64_t mc_trials = 1000000;
    /// Sessions per cheat model for the detection error rate.
    std::uint64_t detection_sessions = 1000;
};

inline constexpr int kCheckCount = 11;

namespace verify_detail {

using std::numbers::pi;

struct Tally {
    bool ok = true;
    std::ostringstream notes;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes << "[fail] " << what << "; ";
        }
    }

    /// Tracks the largest |got - want| and fails if it exceeds tol.
    void near(double got, double want, double tol, const std::string& what) {
        require(std::abs(got - want) <= tol, what + " = " + format_g12(got) + ", want " + format_g12(want) + " +/- " +
                                                 format_g12(tol));
    }
};

inline std::string max_dev(double d) { return "max |dev| " + format_g12(d); }

inline CheckResult ghz_perfect(const VerifyOptions&) {
    Tally t;
    const auto start = std::chrono::steady_clock::now();
    const double w = exact_quantum_win(standard_ghz(), xy_game_spec());
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    t.near(w, 1.0, 1e-12, "standard GHZ XY win");
    t.require(ms < 1.0, "runtime " + format_g12(ms) + " ms >= 1 ms");
    return {1, "standard GHZ wins the XY game with certainty", t.ok,
            "win " + format_g12(w) + ", " + format_g12(ms) + " ms; " + t.notes.str()};
}

inline CheckResult ghz_theta_curve(const VerifyOptions&) {
    Tally t;
    const auto spec = xy_game_spec();
    double dev_win = 0.0;
    double dev_tau = 0.0;
    int threshold_mismatch = 0;
    for (int i = 1; i <= 1000; ++i) {
        const double theta = (pi / 4) * i / 1000.0;
        auto s = ghz_class({theta});
        const double w = exact_quantum_win(s, spec);
        const double tau = three_tangle(s).tau;
        const double sin2 = std::sin(2 * theta);
        dev_win = std::max(dev_win, std::abs(w - closed_form::ghz_xy(theta)));
        dev_tau = std::max(dev_tau, std::abs(tau - sin2 * sin2));
        threshold_mismatch += (w > 0.75) != (tau > 0.25);
    }
    t.require(dev_win <= 1e-12, "win vs (1 + sin 2theta)/2 " + max_dev(dev_win));
    t.require(dev_tau <= 1e-9, "tau vs sin^2 2theta " + max_dev(dev_tau));
    t.require(threshold_mismatch == 0, std::to_string(threshold_mismatch) + " grid points disagree on the thresholds");
    return {2, "GHZ(theta) XY win follows (1 + sin 2theta)/2 and the tangle threshold", t.ok,
            "1000 points, win " + max_dev(dev_win) + ", tau " + max_dev(dev_tau) + "; " + t.notes.str()};
}

inline CheckResult w_standard(const VerifyOptions&) {
    Tally t;
    const auto w = standard_w();
    const double win = exact_quantum_win(w, zy_game_spec());
    t.near(win, 0.875, 1e-12, "standard W ZY win");
    auto per = per_set_quantum_wins(w, zy_game_spec());
    t.require(per.size() == 4, "four question sets");
    if (per.size() == 4) {
        t.near(per[0], 1.0, 1e-12, "ZZZ win");
        for (int i = 1; i < 4; ++i) t.near(per[i], 5.0 / 6.0, 1e-12, "question set " + std::to_string(i) + " win");
    }
    return {3, "standard W wins the ZY game with 7/8", t.ok, "win " + format_g12(win) + "; " + t.notes.str()};
}

inline CheckResult w_simplex(const VerifyOptions& o) {
    Tally t;
    Rng rng(o.seed, Stream::MonteCarlo, 4);
    const auto spec = zy_game_spec();
    double dev_closed = 0.0;
    double dev_s = 0.0;
    int threshold_mismatch = 0;
    for (int k = 0; k < 100; ++k) {
        // Uniform point on the probability simplex, then square roots.
        double u = rng.uniform();
        double v = rng.uniform();
        if (u > v) std::swap(u, v);
        const double a = std::sqrt(u);
        const double b = std::sqrt(v - u);
        const double c = std::sqrt(1.0 - v);
        auto s = w_class({a, b, c});
        const double w = exact_quantum_win(s, spec);
        const double sum = concurrence_sum(s);
        dev_closed = std::max(dev_closed, std::abs(w - 0.25 * (2.5 + a * b + b * c + a * c)));
        dev_s = std::max(dev_s, std::abs(w - (0.625 + sum / 8)));
        threshold_mismatch += (sum > 1.0) != (w > 0.75);
    }
    t.require(dev_closed <= 1e-12, "win vs (5/2 + ab + bc + ac)/4 " + max_dev(dev_closed));
    t.require(dev_s <= 1e-9, "win vs 5/8 + S/8 " + max_dev(dev_s));
    t.require(threshold_mismatch == 0, std::to_string(threshold_mismatch) + " points disagree on S > 1");
    return {4, "real W states: win = (5/2 + ab + bc + ac)/4 = 5/8 + S/8", t.ok,
            "100 points, closed form " + max_dev(dev_closed) + ", concurrence sum " + max_dev(dev_s) + "; " +
                t.notes.str()};
}

inline CheckResult wn_family(const VerifyOptions&) {
    Tally t;
    const auto spec = zy_game_spec();
    double dev = 0.0;
    double min_win = 1.0;
    for (std::int64_t n = 1; n <= 50; ++n) {
        const double w = exact_quantum_win(w_n({n, 0.0, 0.0}), spec);
        dev = std::max(dev, std::abs(w - closed_form::wn_zy(n)));
        min_win = std::min(min_win, w);
    }
    const auto s1 = w_n({1, 0.0, 0.0});
    const double w1 = exact_quantum_win(s1, spec);
    const double sum1 = concurrence_sum(s1);
    t.require(dev <= 1e-12, "enumerator vs closed form " + max_dev(dev));
    t.near(w1, 0.86425, 1e-4, "n = 1 win");
    t.near(sum1, 1.914, 1e-3, "n = 1 concurrence sum");
    t.require(min_win > 0.75, "min win over n = 1..50 is " + format_g12(min_win));
    return {5, "W_n family beats 3/4 for every n", t.ok,
            "n = 1..50 " + max_dev(dev) + ", n = 1 win " + format_g12(w1) + ", S " + format_g12(sum1) + "; " +
                t.notes.str()};
}

inline CheckResult classical_bound(const VerifyOptions&) {
    Tally t;
    const auto xy = classical_best(xy_game_spec());
    const auto zy = classical_best(zy_game_spec());
    t.require(xy.probability == Rational(3, 4), "XY classical best " + to_string(xy.probability));
    t.require(zy.probability == Rational(3, 4), "ZY classical best " + to_string(zy.probability));
    t.require(xy.strategies_searched == 64 && zy.strategies_searched == 64, "64 strategies searched");
    return {6, "classical strategies reach exactly 3/4", t.ok,
            "XY " + to_string(xy.probability) + ", ZY " + to_string(zy.probability) + "; " + t.notes.str()};
}

inline CheckResult rule_maker(const VerifyOptions&) {
    Tally t;
    const auto w = standard_w();
    const auto g = standard_ghz();
    auto win = [](const StateVector& s, double lambda) {
        RuleMakerSpec spec;
        spec.lambda_angle = lambda;
        return rule_maker_win(s, spec);
    };
    t.near(win(w, pi / 2), 11.0 / 12.0, 1e-12, "W win at lambda = pi/2");
    t.near(win(w, 0.0), 1.0 / 12.0, 1e-12, "W win at lambda = 0");
    t.near(win(w, pi / 2), 0.9167, 5e-5, "W win at pi/2 vs 0.9167");
    t.near(win(w, 0.0), 0.0833, 5e-5, "W win at 0 vs 0.0833");
    double dev = 0.0;
    double ghz_min = 1.0;
    for (int i = 0; i <= 180; ++i) {
        const double lambda = (pi / 2) * i / 180.0;
        dev = std::max(dev, std::abs(win(w, lambda) - closed_form::w_rule_maker(lambda)));
        dev = std::max(dev, std::abs(win(g, lambda) - closed_form::ghz_rule_maker(lambda)));
        ghz_min = std::min(ghz_min, win(g, lambda));
    }
    t.require(dev <= 1e-12, "curves vs closed forms " + max_dev(dev));
    t.near(win(g, 0.0), 0.5, 1e-12, "GHZ win at lambda = 0");
    t.near(win(g, pi / 2), 0.5, 1e-12, "GHZ win at lambda = pi/2");
    return {7, "rule-maker game: W endpoints 1/12 and 11/12, GHZ endpoints 1/2", t.ok,
            "curve " + max_dev(dev) + "; GHZ minimum " + format_g12(ghz_min) + " at pi/4 (not lambda-independent); " +
                t.notes.str()};
}

inline CheckResult qss(const VerifyOptions& o) {
    Tally t;
    double worst = 1.0;
    for (auto bb : {BasisKind::X, BasisKind::Y}) {
        for (int bs : {1, -1}) {
            for (auto cb : {BasisKind::X, BasisKind::Y}) {
                for (int cs : {1, -1}) {
                    const QssLabel bob{bb, bs};
                    const QssLabel charlie{cb, cs};
                    const QssLabel alice = qss_alice_inference(bob, charlie);
                    auto [plus, minus] = basis_vectors(MeasurementBasis::of(alice.basis));
                    worst = std::min(worst, fidelity(qss_conditional_alice(bob, charlie), alice.sign > 0 ? plus : minus));
                }
            }
        }
    }
    t.require(worst >= 1 - 1e-12, "worst table fidelity " + format_g12(worst));
    const std::uint64_t m = 100000;
    const auto rep = analyze_qss(qss_session(m, o.seed));
    const double sigma = std::sqrt(0.25 / static_cast<double>(m));
    t.near(rep.acceptance_rate, 0.5, 3 * sigma, "sifting acceptance");
    t.require(rep.inference_matches == rep.accepted, "every accepted round matches the table");
    return {8, "GHZ secret sharing: 16 table cells and 1/2 sifting", t.ok,
            "worst fidelity " + format_g12(worst) + ", acceptance " + format_g12(rep.acceptance_rate) + " (3 sigma " +
                format_g12(3 * sigma) + "); " + t.notes.str()};
}

inline CheckResult facilitated(const VerifyOptions& o) {
    Tally t;
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t m = 10000;
    // Every round kept, so ~m/3 control rounds back the +/-0.02 bands.
    const auto honest = facilitated_session(m, pi / 2, BasisPolicy::CharlieAnnounces, CheatModel::honest(), o.seed);
    const auto h = detect_cheating(honest);
    const auto key = extract_key(honest);
    const auto cheat = detect_cheating(facilitated_session(m, pi / 2, BasisPolicy::CharlieAnnounces,
                                                           CheatModel::random_announcer(Party::Bob), o.seed));
    t.require(key.agreement_rate && *key.agreement_rate == 1.0, "honest key agreement");
    t.near(h.compliance_rate.value_or(-1), 0.75, 0.02, "honest compliance");
    t.require(h.verdict == Verdict::Honest, "honest verdict");
    t.near(cheat.compliance_rate.value_or(-1), 0.50, 0.02, "random-announcer compliance");
    t.require(cheat.verdict == Verdict::CheatingSuspected, "random-announcer flagged");

    // Error rate: sift-discard sessions sized for >= 500 control rounds, with
    // the decision boundary halfway between 0.75 and 0.50.
    const double slack = 0.125;
    std::uint64_t errors = 0;
    std::uint64_t min_control = ~std::uint64_t{0};
    for (std::uint64_t k = 0; k < o.detection_sessions; ++k) {
        const std::uint64_t seed = o.seed + 1 + k;
        auto hr = detect_cheating(facilitated_session(3600, pi / 2, BasisPolicy::SiftDiscard, {}, seed), 0.75, slack);
        auto cr = detect_cheating(facilitated_session(3600, pi / 2, BasisPolicy::SiftDiscard,
                                                      CheatModel::random_announcer(Party::Bob), seed),
                                  0.75, slack);
        min_control = std::min({min_control, hr.control_rounds, cr.control_rounds});
        errors += hr.verdict != Verdict::Honest;
        errors += cr.verdict != Verdict::CheatingSuspected;
    }
    const double rate = static_cast<double>(errors) / static_cast<double>(2 * o.detection_sessions);
    t.require(min_control >= 500, "fewest control rounds " + std::to_string(min_control));
    t.require(rate < 1e-3, "verdict error rate " + format_g12(rate));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    t.require(secs < 10.0, "runtime " + format_g12(secs) + " s");
    std::ostringstream d;
    d << "agreement " << format_g12(key.agreement_rate.value_or(-1)) << ", compliance honest "
      << format_g12(h.compliance_rate.value_or(-1)) << " random " << format_g12(cheat.compliance_rate.value_or(-1))
      << ", " << errors << " errors in " << 2 * o.detection_sessions << " sessions (min control " << min_control
      << "), " << format_g12(secs) << " s; " << t.notes.str();
    return {9, "facilitated protocol: agreement, compliance and cheat detection", t.ok, d.str()};
}

inline CheckResult monte_carlo(const VerifyOptions& o) {
    Tally t;
    struct Case {
        std::string name;
        StateVector state;
    };
    const std::vector<Case> cases{
        {"ghz", standard_ghz()},
        {"ghz(pi/8)", ghz_class({pi / 8})},
        {"w", standard_w()},
        {"w(0.6,0.48,0.64)", w_class({0.6, 0.48, 0.64})},
        {"wn(3)", w_n({3, 0.0, 0.0})},
    };
    double worst_z = 0.0;
    std::uint64_t salt = 0;
    auto compare = [&](const std::string& what, const MonteCarloResult& r, double exact) {
        const double dev = std::abs(r.estimate - exact);
        if (r.std_error > 0) worst_z = std::max(worst_z, dev / r.std_error);
        t.require(dev <= 4 * r.std_error + 1e-15, what + " off by " + format_g12(dev));
    };
    for (const auto& c : cases) {
        for (const auto& [gname, spec] : {std::pair{"xy", xy_game_spec()}, std::pair{"zy", zy_game_spec()}}) {
            auto r = monte_carlo_win(c.state, spec, o.mc_trials, o.seed + ++salt);
            compare(c.name + " " + gname, r, exact_quantum_win(c.state, spec));
        }
        RuleMakerSpec rm;
        rm.lambda_angle = pi / 3;
        auto r = monte_carlo_rule_maker(c.state, rm, o.mc_trials, o.seed + ++salt);
        compare(c.name + " rule-maker", r, rule_maker_win(c.state, rm));
    }
    const auto a = monte_carlo_win(standard_w(), zy_game_spec(), o.mc_trials, o.seed, 1);
    const auto b = monte_carlo_win(standard_w(), zy_game_spec(), o.mc_trials, o.seed, 4);
    const auto c = monte_carlo_win(standard_w(), zy_game_spec(), o.mc_trials, o.seed, 1);
    t.require(a.wins == b.wins && a.wins == c.wins, "estimate depends on thread count or run");
    return {10, "Monte Carlo agrees with exact enumeration", t.ok,
            std::to_string(cases.size() * 3) + " cases at " + std::to_string(o.mc_trials) + " trials, worst " +
                format_g12(worst_z) + " sigma; " + t.notes.str()};
}

inline CheckResult transport(const VerifyOptions& o) {
    Tally t;
    std::vector<SessionParams> runs;
    for (auto policy : {BasisPolicy::SiftDiscard, BasisPolicy::CharlieAnnounces}) {
        SessionParams p;
        p.m = 100;
        p.policy = policy;
        p.cheat = CheatModel::random_announcer(Party::Bob);
        p.seed = o.seed;
        runs.push_back(p);
        p.cheat = CheatModel::honest();
        runs.push_back(p);
    }
    SessionParams q;
    q.protocol = Protocol::HilleryQss;
    q.m = 100;
    q.seed = o.seed;
    runs.push_back(q);
    for (const auto& p : runs) {
        const auto a = transcript_to_string(run_roles(p, TransportKind::InProcess));
        const auto b = transcript_to_string(run_roles(p, TransportKind::Socket));
        t.require(a == b, std::string(to_string(p.protocol)) + " " + std::string(to_string(p.policy)) + " " +
                              p.cheat.id() + " transcripts differ");
        t.require(a.find("\"complete\":true") != std::string::npos, "session incomplete");
    }
    return {11, "in-process and socket transcripts are byte-identical", t.ok,
            std::to_string(runs.size()) + " sessions of 100 rounds; " + t.notes.str()};
}

}  // namespace verify_detail

/// Runs one check (1..11). Exceptions become failures.
inline CheckResult run_check(int id, const VerifyOptions& o = {}) {
    using Fn = CheckResult (*)(const VerifyOptions&);
    static constexpr Fn table[kCheckCount] = {
        verify_detail::ghz_perfect, verify_detail::ghz_theta_curve, verify_detail::w_standard,
        verify_detail::w_simplex,   verify_detail::wn_family,       verify_detail::classical_bound,
        verify_detail::rule_maker,  verify_detail::qss,             verify_detail::facilitated,
        verify_detail::monte_carlo, verify_detail::transport,
    };
    if (id < 1 || id > kCheckCount) {
        throw ParameterError("check id must be 1.." + std::to_string(kCheckCount));
    }
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = table[id - 1](o);
    } catch (const std::exception& e) {
        r.id = id;
        r.name = "check " + std::to_string(id);
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    while (!r.detail.empty() && (r.detail.back() == ' ' || r.detail.back() == ';')) r.detail.pop_back();
    return r;
}

inline std::vector<CheckResult> verify_all(const VerifyOptions& o = {}) {
    std::vector<CheckResult> out;
    for (int id = 1; id <= kCheckCount; ++id) out.push_back(run_check(id, o));
    return out;
}

/// "PASS  3  standard W wins ... (0.001 s): detail"
inline std::string format_check(const CheckResult& r) {
    char head[32];
    std::snprintf(head, sizeof head, "%s %2d  ", r.pass ? "PASS" : "FAIL", r.id);
    return head + r.name + " (" + format_g12(r.seconds) + " s): " + r.detail;
}

}  // namespace vaidman
