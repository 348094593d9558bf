#include "mitplan/rng.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "mitplan/errors.hpp"

namespace mitplan {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw DomainError("Rng::below: n must be positive");
    if (n == 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
}

std::size_t Rng::categorical(std::span<const double> weights) {
    if (weights.empty()) throw DomainError("Rng::categorical: empty weight vector");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw DomainError("Rng::categorical: negative weight");
        total += w;
    }
    if (total <= 0.0) throw DomainError("Rng::categorical: all weights zero");
    const double u = uniform01() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        cum += weights[i];
        if (u < cum) return i;
    }
    return weights.size() - 1;
}

std::uint64_t Rng::cached_bits() const {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(cached_));
    std::memcpy(&bits, &cached_, sizeof(bits));
    return bits;
}

std::string Rng::save_state() const {
    std::ostringstream os;
    os << engine_;
    os << '|' << (has_cached_ ? 1 : 0) << '|' << cached_bits();
    return os.str();
}

void Rng::load_state(const std::string& s) {
    const auto p2 = s.rfind('|');
    const auto p1 = (p2 == std::string::npos) ? std::string::npos : s.rfind('|', p2 - 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw ParseError("Rng::load_state: malformed state string");
    std::istringstream is(s.substr(0, p1));
    is >> engine_;
    if (is.fail()) throw ParseError("Rng::load_state: bad engine state");
    has_cached_ = s.substr(p1 + 1, p2 - p1 - 1) == "1";
    const std::uint64_t bits = std::stoull(s.substr(p2 + 1));
    std::memcpy(&cached_, &bits, sizeof(cached_));
}

}  // namespace mitplan
