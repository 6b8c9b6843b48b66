#pragma once

// Parsing of angle, grid and integer-range arguments for the command line.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "vaidman/errors.hpp"

namespace vaidman {

namespace detail {

inline double parse_real(const std::string& s, std::string_view whole) {
    if (s.empty()) return 1.0;
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ParameterError("bad number in '" + std::string(whole) + "'");
}

}  // namespace detail

/// Radians from "0.3", "pi", "-pi/4", "3pi/4", "3*pi/4", "0.5pi" or "45deg".
inline double parse_angle(std::string_view text) {
    static const std::regex pi_form(R"(^([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\*?pi(?:/((?:\d+\.?\d*|\.\d+)))?$)");
    static const std::regex plain(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(deg)?$)");
    const std::string s(text);
    std::smatch m;
    if (std::regex_match(s, m, pi_form)) {
        double v = detail::parse_real(m[2].str(), text) * std::numbers::pi;
        if (m[3].matched) {
            double den = detail::parse_real(m[3].str(), text);
            if (den == 0.0) throw ParameterError("division by zero in '" + s + "'");
            v /= den;
        }
        return m[1].str() == "-" ? -v : v;
    }
    if (std::regex_match(s, m, plain)) {
        double v = detail::parse_real(m[1].str(), text);
        return m[2].matched ? v * std::numbers::pi / 180.0 : v;
    }
    throw ParameterError("cannot parse angle '" + s + "' (examples: 0.3, pi/4, 3pi/8, 45deg)");
}

/// "start:stop:count" gives count equal intervals, i.e. count + 1 points
/// including both ends. A single angle gives a one-point grid.
inline std::vector<double> parse_angle_grid(std::string_view text) {
    const auto c1 = text.find(':');
    if (c1 == std::string_view::npos) {
        return {parse_angle(text)};
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) {
        throw ParameterError("grid must be start:stop:count, got '" + std::string(text) + "'");
    }
    const double a = parse_angle(text.substr(0, c1));
    const double b = parse_angle(text.substr(c1 + 1, c2 - c1 - 1));
    const auto count_text = text.substr(c2 + 1);
    std::uint64_t count = 0;
    auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc() || ptr != count_text.data() + count_text.size() || count == 0 || count > 1000000) {
        throw ParameterError("grid count must be an integer in 1..1000000, got '" + std::string(count_text) + "'");
    }
    std::vector<double> out;
    out.reserve(count + 1);
    for (std::uint64_t i = 0; i <= count; ++i) {
        // Exact endpoints, no accumulated drift.
        out.push_back(i == count ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(count));
    }
    return out;
}

/// "7" or "1..50" (inclusive).
inline std::vector<std::int64_t> parse_int_range(std::string_view text) {
    auto parse_one = [&](std::string_view s) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
            throw ParameterError("bad integer range '" + std::string(text) + "' (expected N or A..B)");
        }
        return v;
    };
    const auto dots = text.find("..");
    if (dots == std::string_view::npos) {
        return {parse_one(text)};
    }
    const std::int64_t a = parse_one(text.substr(0, dots));
    const std::int64_t b = parse_one(text.substr(dots + 2));
    if (b < a || b - a > 10000000) {
        throw ParameterError("empty or oversized range '" + std::string(text) + "'");
    }
    std::vector<std::int64_t> out;
    for (std::int64_t v = a; v <= b; ++v) out.push_back(v);
    return out;
}

/// Trial and round counts such as "1000000" or "1e6".
inline std::uint64_t parse_count(std::string_view text) {
    const std::string s(text);
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size() && v >= 1 && v <= 1e15 && std::floor(v) == v) {
            return static_cast<std::uint64_t>(v);
        }
    } catch (const std::exception&) {
    }
    throw ParameterError("expected a positive whole count, got '" + s + "'");
}

}  // namespace vaidman
