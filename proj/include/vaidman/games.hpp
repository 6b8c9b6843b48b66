#pragma once

// Three-player parity games played with a shared three-qubit state: the XY
// game, the ZY game for W-class states, and the rule-maker game in which the
// third player's lambda-basis outcome selects the parity rule for the other two.
//
// Exact values come from full enumeration over question sets and joint
// outcomes. Monte Carlo exists only as an independent cross-check and samples
// by sequential single-qubit collapse.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "vaidman/entanglement.hpp"
#include "vaidman/format.hpp"
#include "vaidman/qcore.hpp"
#include "vaidman/rng.hpp"
#include "vaidman/states.hpp"

namespace vaidman {

/// Exact fraction for question distributions and classical win rates.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) {
            throw ParameterError("rational with zero denominator");
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend constexpr Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend constexpr Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
    friend constexpr bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend constexpr bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
    friend constexpr bool operator>(Rational a, Rational b) { return b < a; }
};

inline std::string to_string(Rational r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

/// Question asked to (Alice, Bob, Charlie); each entry is X, Y or Z.
using QuestionSet = std::array<BasisKind, 3>;

inline std::string to_string(const QuestionSet& q) {
    std::string s;
    for (auto k : q) {
        s += to_string(k);
    }
    return s;
}

inline QuestionSet parse_question_set(std::string_view s) {
    if (s.size() != 3) {
        throw ParameterError("question set must name three questions: " + std::string(s));
    }
    QuestionSet q{};
    for (std::size_t i = 0; i < 3; ++i) {
        switch (s[i]) {
            case 'X':
                q[i] = BasisKind::X;
                break;
            case 'Y':
                q[i] = BasisKind::Y;
                break;
            case 'Z':
                q[i] = BasisKind::Z;
                break;
            default:
                throw ParameterError("unknown question '" + std::string(1, s[i]) + "'");
        }
    }
    return q;
}

struct GameEntry {
    QuestionSet questions{};
    Rational probability;
    /// Required product of the three +/-1 answers.
    int target = 1;
};

class GameSpec {
  public:
    explicit GameSpec(std::vector<GameEntry> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) {
            throw ParameterError("game needs at least one question set");
        }
        Rational total(0);
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const auto& e = entries_[i];
            if (e.probability.num < 0) {
                throw ParameterError("negative question-set probability");
            }
            if (e.target != 1 && e.target != -1) {
                throw ParameterError("win target must be +1 or -1");
            }
            for (auto k : e.questions) {
                if (k == BasisKind::Lambda) {
                    throw ParameterError("questions are X, Y or Z");
                }
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (entries_[j].questions == e.questions) {
                    throw ParameterError("duplicate question set " + to_string(e.questions));
                }
            }
            total = total + e.probability;
        }
        if (!(total == Rational(1))) {
            throw ParameterError("question-set probabilities sum to " + to_string(total) + ", not 1");
        }
    }

    const std::vector<GameEntry>& entries() const { return entries_; }

    int win_target(const QuestionSet& q) const {
        for (const auto& e : entries_) {
            if (e.questions == q) {
                return e.target;
            }
        }
        throw ParameterError("question set " + to_string(q) + " is not part of this game");
    }

  private:
    std::vector<GameEntry> entries_;
};

/// XXX wins on product +1; XYY, YXY, YYX win on product -1; uniform.
inline GameSpec xy_game_spec() {
    const Rational q(1, 4);
    return GameSpec({{parse_question_set("XXX"), q, 1},
                     {parse_question_set("XYY"), q, -1},
                     {parse_question_set("YXY"), q, -1},
                     {parse_question_set("YYX"), q, -1}});
}

/// ZZZ wins on product -1; ZYY, YZY, YYZ win on product +1; uniform.
inline GameSpec zy_game_spec() {
    const Rational q(1, 4);
    return GameSpec({{parse_question_set("ZZZ"), q, -1},
                     {parse_question_set("ZYY"), q, 1},
                     {parse_question_set("YZY"), q, 1},
                     {parse_question_set("YYZ"), q, 1}});
}

namespace detail {

inline std::array<MeasurementBasis, 3> bases_for(const QuestionSet& q) {
    return {MeasurementBasis::of(q[0]), MeasurementBasis::of(q[1]), MeasurementBasis::of(q[2])};
}

inline int parity_product(std::uint8_t branches) { return (std::popcount(branches) % 2 == 0) ? 1 : -1; }

}  // namespace detail

/// Winning probability of each question set when every player measures in
/// the asked basis and answers with the outcome label. Same order as spec.entries().
inline std::vector<double> per_set_quantum_wins(const StateVector& state, const GameSpec& spec) {
    require_three_qubits(state, "quantum game");
    std::vector<double> wins;
    wins.reserve(spec.entries().size());
    for (const auto& e : spec.entries()) {
        auto bases = detail::bases_for(e.questions);
        double w = 0.0;
        for (const auto& o : joint_distribution(state, bases)) {
            if (o.product() == e.target) {
                w += o.probability;
            }
        }
        wins.push_back(w);
    }
    return wins;
}

inline double exact_quantum_win(const StateVector& state, const GameSpec& spec) {
    auto wins = per_set_quantum_wins(state, spec);
    double total = 0.0;
    for (std::size_t i = 0; i < wins.size(); ++i) {
        total += spec.entries()[i].probability.value() * wins[i];
    }
    return total;
}

/// Deterministic answer table: answers[player][question] is +1 or -1, or 0
/// for a question the player is never asked.
struct ClassicalStrategy {
    std::array<std::array<int, 3>, 3> answers{};

    int answer(std::size_t player, BasisKind q) const { return answers.at(player).at(static_cast<std::size_t>(q)); }

    std::string describe() const {
        static constexpr std::array<char, 3> names{'A', 'B', 'C'};
        std::string s;
        for (std::size_t p = 0; p < 3; ++p) {
            if (p > 0) {
                s += ' ';
            }
            s += names[p];
            s += ':';
            for (std::size_t k = 0; k < 3; ++k) {
                if (answers[p][k] != 0) {
                    s += to_string(static_cast<BasisKind>(k));
                    s += answers[p][k] > 0 ? '+' : '-';
                }
            }
        }
        return s;
    }
};

struct ClassicalResult {
    Rational probability;
    ClassicalStrategy strategy;
    std::uint64_t strategies_searched = 0;
};

/// Exhaustive search over deterministic strategies. Answer slots are ordered
/// by player, then by question (X, Y, Z); +1 sorts before -1. Ties keep the
/// first strategy in that order.
inline ClassicalResult classical_best(const GameSpec& spec) {
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t k = 0; k < 3; ++k) {
            bool asked = std::any_of(spec.entries().begin(), spec.entries().end(),
                                     [&](const GameEntry& e) { return static_cast<std::size_t>(e.questions[p]) == k; });
            if (asked) {
                slots.emplace_back(p, k);
            }
        }
    }
    const std::uint64_t count = std::uint64_t{1} << slots.size();
    ClassicalResult best;
    best.probability = Rational(-1);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        ClassicalStrategy s;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            bool minus = (mask >> (slots.size() - 1 - i)) & 1U;
            s.answers[slots[i].first][slots[i].second] = minus ? -1 : 1;
        }
        Rational win(0);
        for (const auto& e : spec.entries()) {
            int product = 1;
            for (std::size_t p = 0; p < 3; ++p) {
                product *= s.answer(p, e.questions[p]);
            }
            if (product == e.target) {
                win = win + e.probability;
            }
        }
        if (win > best.probability) {
            best.probability = win;
            best.strategy = s;
        }
    }
    best.strategies_searched = count;
    return best;
}

/// Measures the qubits one at a time in a fixed order with measure_single and
/// stores the conditional branch probabilities, so that sampling a joint
/// outcome costs one uniform draw per qubit.
class SequentialSampler {
  public:
    SequentialSampler(const StateVector& state, std::span<const MeasurementBasis> bases,
                      std::span<const std::size_t> order)
        : num_qubits_(state.num_qubits()) {
        if (bases.size() != num_qubits_ || order.size() != num_qubits_) {
            throw ParameterError("sampler needs one basis and one order slot per qubit");
        }
        std::copy(order.begin(), order.end(), order_.begin());
        build(state, bases, 0, 1);
    }

    /// Returns the outcome in JointOutcome::branches layout.
    std::uint8_t sample(Rng& rng) const {
        std::size_t node = 1;
        std::uint8_t branches = 0;
        for (std::size_t level = 0; level < num_qubits_; ++level) {
            int b = rng.uniform() < p_first_[node] ? 0 : 1;
            branches |= static_cast<std::uint8_t>(b << detail::bit_shift(num_qubits_, order_[level]));
            node = 2 * node + static_cast<std::size_t>(b);
        }
        return branches;
    }

  private:
    void build(const StateVector& s, std::span<const MeasurementBasis> bases, std::size_t level, std::size_t node) {
        if (level == num_qubits_) {
            return;
        }
        auto br = measure_single(s, order_[level], bases[order_[level]]);
        p_first_[node] = br[0].probability / (br[0].probability + br[1].probability);
        for (int k = 0; k < 2; ++k) {
            if (br[static_cast<std::size_t>(k)].post_state) {
                build(*br[static_cast<std::size_t>(k)].post_state, bases, level + 1, 2 * node + static_cast<std::size_t>(k));
            }
        }
    }

    std::size_t num_qubits_;
    std::array<std::size_t, kMaxQubits> order_{};
    // Heap-ordered binary tree, root at 1.
    std::array<double, 16> p_first_{};
};

struct MonteCarloResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t wins = 0;
};

inline constexpr std::uint64_t kMonteCarloChunk = 1U << 16;

namespace detail {

/// Runs `trials` Bernoulli trials in fixed-size chunks; chunk c draws from
/// substream (seed, MonteCarlo, c), so the total does not depend on `threads`.
template <typename Trial>
MonteCarloResult run_monte_carlo(std::uint64_t trials, std::uint64_t seed, unsigned threads, const Trial& trial) {
    if (trials == 0) {
        throw ParameterError("monte carlo needs at least one trial");
    }
    const std::uint64_t chunks = (trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
    std::vector<std::uint64_t> chunk_wins(chunks, 0);
    auto worker = [&](unsigned t) {
        for (std::uint64_t c = t; c < chunks; c += threads) {
            Rng rng(seed, Stream::MonteCarlo, c);
            std::uint64_t n = std::min(kMonteCarloChunk, trials - c * kMonteCarloChunk);
            std::uint64_t w = 0;
            for (std::uint64_t i = 0; i < n; ++i) {
                w += trial(rng) ? 1U : 0U;
            }
            chunk_wins[c] = w;
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker, t);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    MonteCarloResult r;
    r.trials = trials;
    r.wins = std::accumulate(chunk_wins.begin(), chunk_wins.end(), std::uint64_t{0});
    r.estimate = static_cast<double>(r.wins) / static_cast<double>(trials);
    r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials));
    return r;
}

inline std::size_t pick(const std::vector<double>& cumulative, double u) {
    for (std::size_t i = 0; i + 1 < cumulative.size(); ++i) {
        if (u < cumulative[i]) {
            return i;
        }
    }
    return cumulative.size() - 1;
}

}  // namespace detail

/// Sampled winning probability. `threads == 0` uses the hardware concurrency;
/// the result is a function of (state, spec, trials, seed) only.
inline MonteCarloResult monte_carlo_win(const StateVector& state, const GameSpec& spec, std::uint64_t trials,
                                        std::uint64_t seed, unsigned threads = 0) {
    require_three_qubits(state, "quantum game");
    const std::array<std::size_t, 3> order{0, 1, 2};
    std::vector<SequentialSampler> samplers;
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& e : spec.entries()) {
        auto bases = detail::bases_for(e.questions);
        samplers.emplace_back(state, bases, order);
        acc += e.probability.value();
        cumulative.push_back(acc);
    }
    return detail::run_monte_carlo(trials, seed, threads, [&](Rng& rng) {
        std::size_t set = detail::pick(cumulative, rng.uniform());
        return detail::parity_product(samplers[set].sample(rng)) == spec.entries()[set].target;
    });
}

struct RuleMakerSpec {
    double lambda_angle = std::numbers::pi / 2;
    Rational p_x{1, 2};
    Rational p_z{1, 2};

    void validate() const {
        if (!std::isfinite(lambda_angle)) {
            throw ParameterError("rule-maker lambda must be finite");
        }
        if (p_x.num < 0 || p_z.num < 0 || !(p_x + p_z == Rational(1))) {
            throw ParameterError("rule-maker question probabilities must be non-negative and sum to 1");
        }
    }
};

/// Required product of Alice's and Bob's answers. Branch b0 (index 0):
/// X -> +1, Z -> -1. Branch b1: X -> -1, Z -> +1.
inline int rule_maker_target(int charlie_branch, BasisKind question) {
    if (question != BasisKind::X && question != BasisKind::Z) {
        throw ParameterError("rule-maker questions are X or Z");
    }
    bool x = question == BasisKind::X;
    return charlie_branch == 0 ? (x ? 1 : -1) : (x ? -1 : 1);
}

/// Charlie (qubit 2) measures in Lambda(lambda); the branch picks the rule;
/// Alice and Bob both measure in the asked basis.
inline double rule_maker_win(const StateVector& state, const RuleMakerSpec& spec) {
    require_three_qubits(state, "rule-maker game");
    spec.validate();
    const auto lam = MeasurementBasis::lambda(spec.lambda_angle);
    double total = 0.0;
    for (const auto& branch : measure_single(state, 2, lam)) {
        if (!branch.post_state) {
            continue;
        }
        for (auto [q, pq] : {std::pair{BasisKind::X, spec.p_x}, std::pair{BasisKind::Z, spec.p_z}}) {
            const int target = rule_maker_target(branch.index, q);
            const std::array<MeasurementBasis, 3> bases{MeasurementBasis::of(q), MeasurementBasis::of(q), lam};
            double w = 0.0;
            for (const auto& o : joint_distribution(*branch.post_state, bases)) {
                if (o.sign(0) * o.sign(1) == target) {
                    w += o.probability;
                }
            }
            total += branch.probability * pq.value() * w;
        }
    }
    return total;
}

inline MonteCarloResult monte_carlo_rule_maker(const StateVector& state, const RuleMakerSpec& spec,
                                               std::uint64_t trials, std::uint64_t seed, unsigned threads = 0) {
    require_three_qubits(state, "rule-maker game");
    spec.validate();
    const auto lam = MeasurementBasis::lambda(spec.lambda_angle);
    const std::array<std::size_t, 3> order{2, 0, 1};
    const std::array<MeasurementBasis, 3> xb{MeasurementBasis::x(), MeasurementBasis::x(), lam};
    const std::array<MeasurementBasis, 3> zb{MeasurementBasis::z(), MeasurementBasis::z(), lam};
    const SequentialSampler sx(state, xb, order);
    const SequentialSampler sz(state, zb, order);
    const double px = spec.p_x.value();
    return detail::run_monte_carlo(trials, seed, threads, [&](Rng& rng) {
        bool ask_x = rng.uniform() < px;
        std::uint8_t br = (ask_x ? sx : sz).sample(rng);
        JointOutcome o{3, br, 0.0};
        return o.sign(0) * o.sign(1) == rule_maker_target(o.branch(2), ask_x ? BasisKind::X : BasisKind::Z);
    });
}

/// Closed forms, each valid only on the slice documented beside it.
namespace closed_form {

/// GHZ class, XY game.
inline double ghz_xy(double theta) { return 0.5 * (1.0 + std::sin(2.0 * theta)); }

/// GHZ class, XY game, in terms of the three-tangle tau = sin^2(2 theta), theta in [0, pi/4].
inline double ghz_xy_from_tangle(double tau) { return 0.5 * (1.0 + std::sqrt(tau)); }

/// W class, ZY game: (5/2 + ab + bc + ac)/4. Real non-negative amplitudes only.
inline std::optional<double> w_zy(const WClassParams& p) {
    for (Complex z : {p.a, p.b, p.c}) {
        if (z.imag() != 0.0 || z.real() < 0.0) {
            return std::nullopt;
        }
    }
    double a = p.a.real();
    double b = p.b.real();
    double c = p.c.real();
    return 0.25 * (2.5 + a * b + b * c + a * c);
}

/// W class (real non-negative), ZY game, in terms of the concurrence sum S = 2(ab + bc + ac).
inline double w_zy_from_concurrence_sum(double s) { return 0.625 + s / 8.0; }

/// W_n with zero phases, ZY game.
inline double wn_zy(std::int64_t n) {
    const double x = static_cast<double>(n);
    return (5.0 + 5.0 * x + std::sqrt(x + 1.0) + std::sqrt(x) * (std::sqrt(x + 1.0) + 1.0)) / (8.0 * (x + 1.0));
}

/// Standard W, rule-maker game with uniform X/Z questions.
inline double w_rule_maker(double lambda) {
    double s = std::sin(lambda);
    return (1.0 + 10.0 * s * s) / 12.0;
}

/// Standard GHZ, rule-maker game with uniform X/Z questions. Equals 1/2 only
/// where sin(2 lambda) = 0.
inline double ghz_rule_maker(double lambda) { return 0.5 - 0.25 * std::sin(2.0 * lambda); }

}  // namespace closed_form

enum class SweepFamily { GhzTheta, WSimplex, Wn, RuleMakerW, RuleMakerGhz };

inline std::string_view to_string(SweepFamily f) {
    switch (f) {
        case SweepFamily::GhzTheta:
            return "ghz";
        case SweepFamily::WSimplex:
            return "w";
        case SweepFamily::Wn:
            return "wn";
        case SweepFamily::RuleMakerW:
            return "rulemaker-w";
        case SweepFamily::RuleMakerGhz:
            return "rulemaker-ghz";
    }
    return "?";
}

inline SweepFamily parse_sweep_family(std::string_view name) {
    for (auto f : {SweepFamily::GhzTheta, SweepFamily::WSimplex, SweepFamily::Wn, SweepFamily::RuleMakerW,
                   SweepFamily::RuleMakerGhz}) {
        if (name == to_string(f)) {
            return f;
        }
    }
    throw ParameterError("unknown sweep family '" + std::string(name) +
                         "' (expected ghz, w, wn, rulemaker-w or rulemaker-ghz)");
}

/// `angles` feeds the theta/lambda families, `ns` the W_n family and
/// `simplex_steps` the W simplex (points (i, j, k)/steps on a^2 + b^2 + c^2 = 1).
struct SweepGrid {
    std::vector<double> angles;
    std::vector<std::int64_t> ns;
    std::size_t simplex_steps = 0;
};

struct SweepRow {
    std::string parameter;
    double parameter_value = 0.0;
    /// tau (ghz), concurrence sum (w, wn) or lambda (rule-maker).
    double x_measure = 0.0;
    double win_exact = 0.0;
    std::optional<double> win_closed_form;
    double classical_baseline = 0.0;
};

/// Success rate of answering uniformly at random in the rule-maker game.
inline constexpr double kRuleMakerRandomBaseline = 0.5;

inline std::vector<SweepRow> sweep(SweepFamily family, const SweepGrid& grid) {
    std::vector<SweepRow> rows;
    switch (family) {
        case SweepFamily::GhzTheta: {
            if (grid.angles.empty()) {
                throw ParameterError("ghz sweep needs a nonempty theta grid");
            }
            const auto spec = xy_game_spec();
            const double classical = classical_best(spec).probability.value();
            for (double theta : grid.angles) {
                auto s = ghz_class({theta});
                rows.push_back({format_g12(theta), theta, three_tangle(s).tau, exact_quantum_win(s, spec),
                                closed_form::ghz_xy(theta), classical});
            }
            break;
        }
        case SweepFamily::WSimplex: {
            if (grid.simplex_steps == 0) {
                throw ParameterError("w sweep needs simplex_steps >= 1");
            }
            const auto spec = zy_game_spec();
            const double classical = classical_best(spec).probability.value();
            const std::size_t steps = grid.simplex_steps;
            const double inv = 1.0 / static_cast<double>(steps);
            for (std::size_t i = 0; i <= steps; ++i) {
                for (std::size_t j = 0; i + j <= steps; ++j) {
                    std::size_t k = steps - i - j;
                    WClassParams p{std::sqrt(static_cast<double>(i) * inv), std::sqrt(static_cast<double>(j) * inv),
                                   std::sqrt(static_cast<double>(k) * inv)};
                    auto s = w_class(p);
                    rows.push_back({format_g12(p.a.real()) + "/" + format_g12(p.b.real()) + "/" +
                                        format_g12(p.c.real()),
                                    static_cast<double>(rows.size()), concurrence_sum(s), exact_quantum_win(s, spec),
                                    closed_form::w_zy(p), classical});
                }
            }
            break;
        }
        case SweepFamily::Wn: {
            if (grid.ns.empty()) {
                throw ParameterError("wn sweep needs a nonempty n grid");
            }
            const auto spec = zy_game_spec();
            const double classical = classical_best(spec).probability.value();
            for (auto n : grid.ns) {
                auto s = w_n({n, 0.0, 0.0});
                rows.push_back({std::to_string(n), static_cast<double>(n), concurrence_sum(s),
                                exact_quantum_win(s, spec), closed_form::wn_zy(n), classical});
            }
            break;
        }
        case SweepFamily::RuleMakerW:
        case SweepFamily::RuleMakerGhz: {
            if (grid.angles.empty()) {
                throw ParameterError("rule-maker sweep needs a nonempty lambda grid");
            }
            const bool w = family == SweepFamily::RuleMakerW;
            const auto s = w ? standard_w() : standard_ghz();
            for (double lambda : grid.angles) {
                RuleMakerSpec spec;
                spec.lambda_angle = lambda;
                rows.push_back({format_g12(lambda), lambda, lambda, rule_maker_win(s, spec),
                                w ? closed_form::w_rule_maker(lambda) : closed_form::ghz_rule_maker(lambda),
                                kRuleMakerRandomBaseline});
            }
            break;
        }
    }
    return rows;
}

/// Note emitted alongside GHZ rule-maker output: the success rate is 1/2 only
/// at lambda = 0 and lambda = pi/2, not for every lambda.
inline constexpr std::string_view kGhzRuleMakerNote =
    "note: standard GHZ rule-maker success equals 1/2 - sin(2*lambda)/4 by enumeration; "
    "it is 1/2 at lambda = 0 and pi/2 but dips to 1/4 at pi/4, so it is not independent of lambda";

}  // namespace vaidman
