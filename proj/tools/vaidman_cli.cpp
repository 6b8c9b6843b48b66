// vaidman: command-line front end for the games, sweeps and protocol sessions.
//
// Exit codes: 0 ok, 1 a cross-check failed, 2 usage error, 3 transport error
// (including sessions that ended with an incomplete transcript).

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "vaidman/args.hpp"
#include "vaidman/entanglement.hpp"
#include "vaidman/format.hpp"
#include "vaidman/games.hpp"
#include "vaidman/protocols.hpp"
#include "vaidman/session.hpp"
#include "vaidman/states.hpp"
#include "vaidman/transcript_io.hpp"
#include "vaidman/verify.hpp"

namespace fs = std::filesystem;
using namespace vaidman;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTransport = 3;

constexpr const char* kOutputDirEnv = "VAIDMAN_OUTPUT_DIR";

/// Where output goes when --out is not given: $VAIDMAN_OUTPUT_DIR/name, or
/// nothing (stdout) when `fallback_to_cwd` is false and the variable is unset.
std::optional<fs::path> default_output(const std::string& name, bool fallback_to_cwd) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
        return fs::path(dir) / name;
    }
    if (fallback_to_cwd) return fs::path(name);
    return std::nullopt;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write '" + path.string() + "'");
    return out;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_g12(*v) : "n/a"; }

const char* verdict_word(bool pass) { return pass ? "PASS" : "FAIL"; }

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::string family;
    std::string theta = "0:pi/4:100";
    std::string lambda = "0:pi/2:90";
    std::string n = "1..50";
    std::size_t steps = 10;
    std::string out;
    std::string format = "csv";
};

int cmd_sweep(const SweepArgs& a) {
    const SweepFamily family = parse_sweep_family(a.family);
    SweepGrid grid;
    switch (family) {
        case SweepFamily::GhzTheta:
            grid.angles = parse_angle_grid(a.theta);
            break;
        case SweepFamily::RuleMakerW:
        case SweepFamily::RuleMakerGhz:
            grid.angles = parse_angle_grid(a.lambda);
            break;
        case SweepFamily::Wn:
            grid.ns = parse_int_range(a.n);
            break;
        case SweepFamily::WSimplex:
            grid.simplex_steps = a.steps;
            break;
    }
    const auto rows = sweep(family, grid);

    std::ostringstream text;
    if (a.format == "csv") {
        text << "parameter,x_measure,win_exact,win_closed_form,classical_baseline\n";
        for (const auto& r : rows) {
            text << r.parameter << ',' << format_g12(r.x_measure) << ',' << format_g12(r.win_exact) << ','
                 << fmt_opt(r.win_closed_form) << ',' << format_g12(r.classical_baseline) << '\n';
        }
    } else if (a.format == "jsonl") {
        for (const auto& r : rows) {
            Json j{{"parameter", r.parameter},
                   {"x_measure", r.x_measure},
                   {"win_exact", r.win_exact},
                   {"win_closed_form", r.win_closed_form ? Json(*r.win_closed_form) : Json(nullptr)},
                   {"classical_baseline", r.classical_baseline}};
            text << j.dump() << '\n';
        }
    } else {
        throw ParameterError("unknown format '" + a.format + "' (expected csv or jsonl)");
    }

    std::optional<fs::path> path;
    if (!a.out.empty() && a.out != "-") {
        path = a.out;
    } else if (a.out.empty()) {
        path = default_output("sweep-" + a.family + "." + a.format, false);
    }
    if (path) {
        open_output(*path) << text.str();
        std::cerr << "wrote " << rows.size() << " rows to " << path->string() << '\n';
    } else {
        std::cout << text.str();
    }
    if (family == SweepFamily::RuleMakerGhz) {
        std::cerr << kGhzRuleMakerNote << '\n';
    }

    double worst = 0.0;
    for (const auto& r : rows) {
        if (r.win_closed_form) worst = std::max(worst, std::abs(r.win_exact - *r.win_closed_form));
    }
    const bool pass = worst <= 1e-9;
    std::cerr << "check exact vs closed form (max |dev| " << format_g12(worst) << "): " << verdict_word(pass) << '\n';
    return pass ? kExitOk : kExitCheck;
}

// ---------------------------------------------------------------------------
// game

struct GameArgs {
    std::string state = "w-std";
    std::optional<std::string> theta;
    double a = 0, b = 0, c = 0;
    std::int64_t n = 1;
    std::string gamma = "0";
    std::string delta = "0";
    bool xy = false;
    bool zy = false;
    bool rule_maker = false;
    std::string lambda = "pi/2";
    std::optional<std::string> trials;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

int cmd_game(const GameArgs& g) {
    if (g.xy + g.zy + g.rule_maker != 1) {
        throw ParameterError("choose exactly one game: --xy, --zy or --rule-maker");
    }
    std::optional<std::uint64_t> trials;
    if (g.trials) {
        trials = parse_count(*g.trials);
        if (!g.seed) throw ParameterError("--trials needs --seed");
    }

    StateVector state = standard_w();
    enum class Kind { Ghz, GhzTheta, WStd, W, Wn } kind;
    double theta = 0.0;
    WClassParams wp{};
    WnParams np{};
    if (g.state == "ghz") {
        kind = g.theta ? Kind::GhzTheta : Kind::Ghz;
        theta = g.theta ? parse_angle(*g.theta) : std::numbers::pi / 4;
        state = g.theta ? ghz_class({theta}) : standard_ghz();
    } else if (g.state == "w-std") {
        kind = Kind::WStd;
    } else if (g.state == "w") {
        kind = Kind::W;
        wp = {g.a, g.b, g.c};
        state = w_class(wp);
    } else if (g.state == "wn") {
        kind = Kind::Wn;
        np = {g.n, parse_angle(g.gamma), parse_angle(g.delta)};
        state = w_n(np);
    } else {
        throw ParameterError("unknown state '" + g.state + "' (expected ghz, w-std, w or wn)");
    }

    double exact = 0.0;
    std::optional<double> closed;
    double classical = 0.0;
    std::string classical_note;
    std::optional<MonteCarloResult> mc;
    const double lambda = parse_angle(g.lambda);

    if (g.rule_maker) {
        RuleMakerSpec spec;
        spec.lambda_angle = lambda;
        exact = rule_maker_win(state, spec);
        if (kind == Kind::WStd) closed = closed_form::w_rule_maker(lambda);
        if (kind == Kind::Ghz) closed = closed_form::ghz_rule_maker(lambda);
        classical = kRuleMakerRandomBaseline;
        classical_note = " (random answers)";
        if (trials) mc = monte_carlo_rule_maker(state, spec, *trials, *g.seed, g.threads);
    } else {
        const GameSpec spec = g.xy ? xy_game_spec() : zy_game_spec();
        exact = exact_quantum_win(state, spec);
        if (g.xy && (kind == Kind::Ghz || kind == Kind::GhzTheta)) closed = closed_form::ghz_xy(theta);
        if (g.zy && kind == Kind::WStd) closed = closed_form::w_zy({1 / std::sqrt(3.0), 1 / std::sqrt(3.0), 1 / std::sqrt(3.0)});
        if (g.zy && kind == Kind::W) closed = closed_form::w_zy(wp);
        if (g.zy && kind == Kind::Wn && np.gamma == 0.0 && np.delta == 0.0) closed = closed_form::wn_zy(np.n);
        const auto best = classical_best(spec);
        classical = best.probability.value();
        classical_note = " (" + to_string(best.probability) + ", " + best.strategy.describe() + ")";
        if (trials) mc = monte_carlo_win(state, spec, *trials, *g.seed, g.threads);
    }

    bool pass = true;
    std::cout << "state: " << g.state << '\n';
    std::cout << "game: " << (g.xy ? "xy" : g.zy ? "zy" : "rule-maker lambda=" + format_g12(lambda)) << '\n';
    std::cout << "exact: " << format_g12(exact) << '\n';
    std::cout << "closed_form: " << fmt_opt(closed) << '\n';
    if (mc) {
        std::cout << "monte_carlo: " << format_g12(mc->estimate) << " +/- " << format_g12(mc->std_error) << " ("
                  << mc->trials << " trials, seed " << *g.seed << ")\n";
    }
    std::cout << "classical_best: " << format_g12(classical) << classical_note << '\n';
    if (closed) {
        const bool ok = std::abs(exact - *closed) <= 1e-9;
        pass &= ok;
        std::cout << "check exact vs closed form: " << verdict_word(ok) << '\n';
    }
    if (mc) {
        const double dev = std::abs(mc->estimate - exact);
        const bool ok = dev <= 4 * mc->std_error + 1e-12;
        pass &= ok;
        std::cout << "check monte carlo within 4 sigma (" << format_g12(mc->std_error > 0 ? dev / mc->std_error : 0.0)
                  << " sigma): " << verdict_word(ok) << '\n';
    }
    if (g.rule_maker && kind == Kind::Ghz) std::cout << kGhzRuleMakerNote << '\n';
    std::cout << verdict_word(pass) << '\n';
    return pass ? kExitOk : kExitCheck;
}

// ---------------------------------------------------------------------------
// qss / facilitated

struct SessionArgs {
    std::uint64_t m = 0;
    std::optional<std::uint64_t> seed;
    std::string lambda = "pi/2";
    std::string policy = "sift-discard";
    std::string cheat = "honest";
    double threshold = kComplianceThreshold;
    double slack = kDefaultSlack;
    std::string out;
    std::string transport = "inprocess";
    std::string role = "all";
    std::string listen = "127.0.0.1:7001";
    std::string connect = "127.0.0.1:7001";
    std::uint64_t timeout_ms = 10000;
    unsigned retries = 0;
};

SessionOptions options_of(const SessionArgs& a) {
    SessionOptions o;
    o.timeout = Millis(a.timeout_ms);
    o.retries = a.retries;
    o.threshold = a.threshold;
    o.slack = a.slack;
    return o;
}

/// Report for Charlie's (complete or partial) transcript; returns the exit code.
int report_session(const SessionTranscript& t, const SessionArgs& a) {
    const auto& p = t.params;
    const fs::path path = !a.out.empty() ? fs::path(a.out)
                                         : *default_output(std::string(to_string(p.protocol)) + "-seed" +
                                                               std::to_string(p.seed) + ".jsonl",
                                                           true);
    {
        auto out = open_output(path);
        write_transcript(out, t);
    }
    std::cout << "transcript: " << path.string() << '\n';
    std::cout << "rounds: " << t.rounds.size() << " of " << p.m << (t.complete ? "" : " (incomplete)") << '\n';
    if (!t.complete) {
        std::cout << "error: " << t.error << '\n';
        return kExitTransport;
    }
    bool pass = true;
    if (p.protocol == Protocol::HilleryQss) {
        const auto rep = analyze_qss(t);
        const bool ok = rep.inference_matches == rep.accepted;
        std::cout << "accepted: " << rep.accepted << " (rate " << format_g12(rep.acceptance_rate) << ")\n";
        std::cout << "check alice inference matches every accepted round: " << verdict_word(ok) << '\n';
        pass &= ok;
    } else {
        const auto rep = detect_cheating(t, a.threshold, a.slack);
        const auto key = extract_key(t);
        std::cout << "cheat: " << p.cheat.id() << '\n';
        std::cout << "control_rounds: " << rep.control_rounds << '\n';
        std::cout << "compliance: " << fmt_opt(rep.compliance_rate) << " (threshold " << format_g12(rep.threshold)
                  << ", slack " << format_g12(rep.slack) << ")\n";
        std::cout << "verdict: " << to_string(rep.verdict) << '\n';
        std::cout << "key_bits: " << key.alice_key.size() << '\n';
        std::cout << "key_agreement: " << fmt_opt(key.agreement_rate) << '\n';
        const bool honest = p.cheat == CheatModel::honest();
        bool ok = honest ? rep.verdict != Verdict::CheatingSuspected : rep.verdict == Verdict::CheatingSuspected;
        std::cout << "check verdict matches the cheat model: " << verdict_word(ok) << '\n';
        pass &= ok;
        if (honest && key.agreement_rate) {
            bool agree = *key.agreement_rate == 1.0;
            std::cout << "check honest keys agree: " << verdict_word(agree) << '\n';
            pass &= agree;
        }
    }
    std::cout << verdict_word(pass) << '\n';
    return pass ? kExitOk : kExitCheck;
}

int cmd_session(Protocol protocol, const SessionArgs& a) {
    const SessionOptions opt = options_of(a);
    const TransportKind kind = parse_transport_kind(a.transport);
    if (a.role == "alice" || a.role == "bob") {
        if (kind != TransportKind::Socket) throw ParameterError("--role " + a.role + " needs --transport socket");
        const Party self = parse_party(a.role);
        const auto cheat = parse_cheat_model(a.cheat);
        const auto r = join_as_spoke(self, cheat, parse_host_port(a.connect), opt);
        std::cout << "role: " << a.role << '\n';
        std::cout << "session: " << r.session_id << '\n';
        std::cout << "rounds: " << r.rounds.size() << '\n';
        if (protocol == Protocol::Facilitated) {
            std::cout << "verdict: " << r.verdict << '\n';
            std::cout << "key: " << (r.modes.empty() ? "withheld" : r.key) << '\n';
        }
        return kExitOk;
    }
    if (a.role != "all" && a.role != "charlie") {
        throw ParameterError("unknown role '" + a.role + "' (expected all, charlie, alice or bob)");
    }
    if (!a.seed) throw ParameterError("--seed is required");
    if (a.m == 0) throw ParameterError("--m must be at least 1");
    SessionParams p;
    p.protocol = protocol;
    p.m = a.m;
    p.seed = *a.seed;
    if (protocol == Protocol::Facilitated) {
        p.lambda = parse_angle(a.lambda);
        p.policy = parse_basis_policy(a.policy);
        p.cheat = parse_cheat_model(a.cheat);
    } else if (a.cheat != "honest") {
        throw ParameterError("--cheat applies to the facilitated protocol only");
    }
    p.validate();
    if (a.role == "charlie") {
        if (kind != TransportKind::Socket) throw ParameterError("--role charlie needs --transport socket");
        return report_session(serve_charlie(p, parse_host_port(a.listen), opt), a);
    }
    return report_session(run_roles(p, kind, opt), a);
}

// ---------------------------------------------------------------------------
// verify-all

int cmd_verify(std::uint64_t seed, const std::vector<int>& only) {
    VerifyOptions o;
    o.seed = seed;
    bool pass = true;
    for (int id = 1; id <= kCheckCount; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        auto r = run_check(id, o);
        std::cout << format_check(r) << std::endl;
        pass &= r.pass;
    }
    std::cout << (pass ? "all checks PASS" : "some checks FAIL") << '\n';
    return pass ? kExitOk : kExitCheck;
}

void add_session_options(CLI::App* cmd, SessionArgs& a, bool facilitated) {
    cmd->add_option("--m", a.m, "Number of rounds");
    cmd->add_option("--seed", a.seed, "Seed for every random stream");
    if (facilitated) {
        cmd->add_option("--lambda", a.lambda, "Charlie's basis angle (e.g. pi/2, 90deg)")->capture_default_str();
        cmd->add_option("--policy", a.policy, "sift-discard or charlie-announces")->capture_default_str();
        cmd->add_option("--threshold", a.threshold, "Compliance threshold")->capture_default_str();
        cmd->add_option("--slack", a.slack, "Allowed shortfall below the threshold")->capture_default_str();
    }
    cmd->add_option("--cheat", a.cheat, "honest, random:<alice|bob> or flip:<alice|bob>")->capture_default_str();
    cmd->add_option("--out", a.out, "Transcript path (default: $" + std::string(kOutputDirEnv) + " or .)");
    cmd->add_option("--transport", a.transport, "inprocess or socket")->capture_default_str();
    cmd->add_option("--role", a.role, "all, charlie, alice or bob")->capture_default_str();
    cmd->add_option("--listen", a.listen, "Charlie's listen address")->capture_default_str();
    cmd->add_option("--connect", a.connect, "Charlie's address, for alice and bob")->capture_default_str();
    cmd->add_option("--timeout-ms", a.timeout_ms, "Per-message timeout")->capture_default_str();
    cmd->add_option("--retries", a.retries, "Extra timeout periods before giving up")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-party entanglement games and secret-sharing sessions"};
    app.require_subcommand(1);

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Win probability over a parameter grid, as CSV");
    sweep_cmd->add_option("family", sw.family, "ghz, w, wn, rulemaker-w or rulemaker-ghz")->required();
    sweep_cmd->add_option("--theta", sw.theta, "GHZ angle grid start:stop:count")->capture_default_str();
    sweep_cmd->add_option("--lambda", sw.lambda, "Rule-maker angle grid start:stop:count")->capture_default_str();
    sweep_cmd->add_option("--n", sw.n, "W_n range, e.g. 1..50")->capture_default_str();
    sweep_cmd->add_option("--steps", sw.steps, "W simplex subdivisions")->capture_default_str();
    sweep_cmd->add_option("--out", sw.out, "Output file ('-' for stdout)");
    sweep_cmd->add_option("--format", sw.format, "csv or jsonl")->capture_default_str();

    GameArgs gm;
    auto* game_cmd = app.add_subcommand("game", "Exact, closed-form and sampled win probability for one state");
    game_cmd->add_option("--state", gm.state, "ghz, w-std, w or wn")->capture_default_str();
    game_cmd->add_option("--theta", gm.theta, "GHZ-class angle");
    game_cmd->add_option("--a", gm.a, "W amplitude of |100>");
    game_cmd->add_option("--b", gm.b, "W amplitude of |010>");
    game_cmd->add_option("--c", gm.c, "W amplitude of |001>");
    game_cmd->add_option("--n", gm.n, "W_n parameter")->capture_default_str();
    game_cmd->add_option("--gamma", gm.gamma, "W_n phase gamma")->capture_default_str();
    game_cmd->add_option("--delta", gm.delta, "W_n phase delta")->capture_default_str();
    game_cmd->add_flag("--xy", gm.xy, "XY parity game");
    game_cmd->add_flag("--zy", gm.zy, "ZY parity game");
    game_cmd->add_flag("--rule-maker", gm.rule_maker, "Rule-maker game");
    game_cmd->add_option("--lambda", gm.lambda, "Rule-maker angle")->capture_default_str();
    game_cmd->add_option("--trials", gm.trials, "Monte Carlo trials (e.g. 1e6)");
    game_cmd->add_option("--seed", gm.seed, "Monte Carlo seed");
    game_cmd->add_option("--threads", gm.threads, "Worker threads (0 = all cores)")->capture_default_str();

    SessionArgs qs;
    auto* qss_cmd = app.add_subcommand("qss", "GHZ secret-sharing session");
    add_session_options(qss_cmd, qs, false);

    SessionArgs fa;
    fa.m = 0;
    auto* fac_cmd = app.add_subcommand("facilitated", "Facilitated secret-sharing session on W states");
    add_session_options(fac_cmd, fa, true);

    std::uint64_t verify_seed = VerifyOptions{}.seed;
    std::vector<int> only;
    auto* verify_cmd = app.add_subcommand("verify-all", "Run every reproduction check");
    verify_cmd->add_option("--seed", verify_seed, "Seed for the sampled checks")->capture_default_str();
    verify_cmd->add_option("--only", only, "Run only these check numbers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*sweep_cmd) return cmd_sweep(sw);
        if (*game_cmd) return cmd_game(gm);
        if (*qss_cmd) return cmd_session(Protocol::HilleryQss, qs);
        if (*fac_cmd) return cmd_session(Protocol::Facilitated, fa);
        if (*verify_cmd) return cmd_verify(verify_seed, only);
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << '\n';
        return kExitTransport;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheck;
    }
    return kExitUsage;
}
