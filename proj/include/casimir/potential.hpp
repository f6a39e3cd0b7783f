#pragma once

// Compact-support unit-cell potentials and the textual grammar used on the
// command line:
//
//   free
//   delta:w0=<f>
//   ddp:w0=<f>,w1=<f>[,conv=standard|flipped]
//   barrier:v0=<f>,a=<f>
//   pwc:[(v,a),(v,a),...]

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "casimir/errors.hpp"

namespace casimir {

/// Sign convention for the delta-prime matching matrix.
///   Standard: psi jumps by (1 + w1)/(1 - w1).
///   Flipped:  psi jumps by (1 - w1)/(1 + w1), i.e. w1 -> -w1.
enum class DeltaPrimeConvention { Standard, Flipped };

namespace potential {

struct Free {};

struct Delta {
    double w0 = 0.0;
};

/// w0 delta(x) + 2 w1 delta'(x).
struct DeltaPrime {
    double w0 = 0.0;
    double w1 = 0.0;
    DeltaPrimeConvention convention = DeltaPrimeConvention::Standard;
};

struct SquareBarrier {
    double height = 0.0;
    double width = 0.0;
};

struct Layer {
    double value = 0.0;
    double width = 0.0;
};

/// Consecutive constant layers, listed left to right.
struct PiecewiseConstant {
    std::vector<Layer> layers;
};

}  // namespace potential

class PotentialModel {
public:
    using Variant = std::variant<potential::Free, potential::Delta, potential::DeltaPrime, potential::SquareBarrier,
                                 potential::PiecewiseConstant>;

    PotentialModel() = default;

    template <class T, class = std::enable_if_t<std::is_constructible_v<Variant, T>>>
    PotentialModel(T v) : v_(std::move(v)) {  // NOLINT(google-explicit-constructor)
        validate();
    }

    const Variant& variant() const { return v_; }

    double support_width() const {
        return std::visit(
            [](const auto& p) -> double {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, potential::SquareBarrier>) {
                    return p.width;
                } else if constexpr (std::is_same_v<P, potential::PiecewiseConstant>) {
                    double w = 0.0;
                    for (const auto& l : p.layers) w += l.width;
                    return w;
                } else {
                    return 0.0;
                }
            },
            v_);
    }

    /// Mirror image about the centre of the support.
    bool is_even() const {
        return std::visit(
            [](const auto& p) -> bool {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, potential::DeltaPrime>) {
                    return p.w1 == 0.0;
                } else if constexpr (std::is_same_v<P, potential::PiecewiseConstant>) {
                    const auto& l = p.layers;
                    for (std::size_t i = 0, j = l.size(); i < j--; ++i)
                        if (l[i].value != l[j].value || l[i].width != l[j].width) return false;
                    return true;
                } else {
                    return true;
                }
            },
            v_);
    }

private:
    void validate() const {
        std::visit(
            [](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, potential::Delta>) {
                    if (!std::isfinite(p.w0)) throw ValidationError("delta: w0 must be finite");
                } else if constexpr (std::is_same_v<P, potential::DeltaPrime>) {
                    if (!std::isfinite(p.w0) || !std::isfinite(p.w1)) throw ValidationError("ddp: parameters must be finite");
                    if (std::abs(p.w1) == 1.0)
                        throw ValidationError("ddp: matching matrix is singular at w1 = +-1");
                } else if constexpr (std::is_same_v<P, potential::SquareBarrier>) {
                    if (!std::isfinite(p.height)) throw ValidationError("barrier: v0 must be finite");
                    if (!(p.width > 0.0) || !std::isfinite(p.width)) throw ValidationError("barrier: width must be positive");
                } else if constexpr (std::is_same_v<P, potential::PiecewiseConstant>) {
                    if (p.layers.empty()) throw ValidationError("pwc: at least one layer required");
                    for (const auto& l : p.layers) {
                        if (!std::isfinite(l.value)) throw ValidationError("pwc: layer value must be finite");
                        if (!(l.width > 0.0) || !std::isfinite(l.width))
                            throw ValidationError("pwc: layer width must be positive");
                    }
                }
            },
            v_);
    }

    Variant v_ = potential::Free{};
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(std::string_view text, std::string_view what) {
    const std::string s = trim(text);
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last)
        throw ValidationError("cannot parse " + std::string(what) + " from '" + s + "'");
    return v;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "k1=v1,k2=v2" -> map; rejects unknown or duplicated keys.
inline std::map<std::string, std::string> parse_kv(std::string_view body, const std::vector<std::string>& allowed,
                                                   std::string_view kind) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const auto comma = body.find(',', pos);
        const auto item = body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError(std::string(kind) + ": expected key=value, got '" + std::string(item) + "'");
        const std::string key = trim(item.substr(0, eq));
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == key;
        if (!ok) throw ValidationError(std::string(kind) + ": unknown parameter '" + key + "'");
        if (!out.emplace(key, trim(item.substr(eq + 1))).second)
            throw ValidationError(std::string(kind) + ": duplicate parameter '" + key + "'");
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key,
                                  std::string_view kind) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ValidationError(std::string(kind) + ": missing parameter '" + key + "'");
    return it->second;
}

}  // namespace detail

/// Parses the potential grammar; throws ValidationError on malformed input.
inline PotentialModel parse_potential(std::string_view text) {
    const std::string s = detail::trim(text);
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    const std::string body = colon == std::string::npos ? std::string() : s.substr(colon + 1);

    if (kind == "free") {
        if (colon != std::string::npos) throw ValidationError("free: takes no parameters");
        return potential::Free{};
    }
    if (colon == std::string::npos) throw ValidationError("unknown potential '" + s + "'");
    if (kind == "delta") {
        const auto kv = detail::parse_kv(body, {"w0"}, kind);
        return potential::Delta{detail::parse_double(detail::require(kv, "w0", kind), "w0")};
    }
    if (kind == "ddp") {
        const auto kv = detail::parse_kv(body, {"w0", "w1", "conv"}, kind);
        potential::DeltaPrime p{detail::parse_double(detail::require(kv, "w0", kind), "w0"),
                                detail::parse_double(detail::require(kv, "w1", kind), "w1")};
        if (auto it = kv.find("conv"); it != kv.end()) {
            if (it->second == "standard")
                p.convention = DeltaPrimeConvention::Standard;
            else if (it->second == "flipped")
                p.convention = DeltaPrimeConvention::Flipped;
            else
                throw ValidationError("ddp: conv must be 'standard' or 'flipped'");
        }
        return p;
    }
    if (kind == "barrier") {
        const auto kv = detail::parse_kv(body, {"v0", "a"}, kind);
        return potential::SquareBarrier{detail::parse_double(detail::require(kv, "v0", kind), "v0"),
                                        detail::parse_double(detail::require(kv, "a", kind), "a")};
    }
    if (kind == "pwc") {
        std::string b = detail::trim(body);
        if (b.size() < 2 || b.front() != '[' || b.back() != ']') throw ValidationError("pwc: expected [(v,a),...]");
        b = b.substr(1, b.size() - 2);
        potential::PiecewiseConstant p;
        std::size_t pos = 0;
        while (true) {
            const auto open = b.find('(', pos);
            if (open == std::string::npos) {
                if (detail::trim(std::string_view(b).substr(pos)).find_first_not_of(", ") != std::string::npos)
                    throw ValidationError("pwc: trailing characters");
                break;
            }
            if (detail::trim(std::string_view(b).substr(pos, open - pos)).find_first_not_of(',') != std::string::npos)
                throw ValidationError("pwc: unexpected characters between layers");
            const auto close = b.find(')', open);
            if (close == std::string::npos) throw ValidationError("pwc: unbalanced parenthesis");
            const std::string pair = b.substr(open + 1, close - open - 1);
            const auto comma = pair.find(',');
            if (comma == std::string::npos) throw ValidationError("pwc: layer must be (value,width)");
            p.layers.push_back({detail::parse_double(pair.substr(0, comma), "layer value"),
                                detail::parse_double(pair.substr(comma + 1), "layer width")});
            pos = close + 1;
        }
        return p;
    }
    throw ValidationError("unknown potential kind '" + kind + "'");
}

/// Inverse of parse_potential (lossless for doubles).
inline std::string to_string(const PotentialModel& v) {
    using detail::format_double;
    return std::visit(
        [](const auto& p) -> std::string {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, potential::Free>) {
                return "free";
            } else if constexpr (std::is_same_v<P, potential::Delta>) {
                return "delta:w0=" + format_double(p.w0);
            } else if constexpr (std::is_same_v<P, potential::DeltaPrime>) {
                std::string s = "ddp:w0=" + format_double(p.w0) + ",w1=" + format_double(p.w1);
                if (p.convention == DeltaPrimeConvention::Flipped) s += ",conv=flipped";
                return s;
            } else if constexpr (std::is_same_v<P, potential::SquareBarrier>) {
                return "barrier:v0=" + format_double(p.height) + ",a=" + format_double(p.width);
            } else {
                std::string s = "pwc:[";
                for (std::size_t i = 0; i < p.layers.size(); ++i) {
                    if (i) s += ',';
                    s += "(" + format_double(p.layers[i].value) + "," + format_double(p.layers[i].width) + ")";
                }
                return s + "]";
            }
        },
        v.variant());
}

}  // namespace casimir
