#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "glsb/error.hpp"

namespace glsb {

/// Exact non-negative-denominator fraction, always kept in lowest terms.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw Error(ErrorCode::InvalidArgument, "rational with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const auto g = std::gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// round-half-up(100 * value), for non-negative values.
    std::int64_t percent_rounded() const { return (200 * num_ + den_) / (2 * den_); }
    /// 100 * value rounded half-up to one decimal, e.g. "56.7".
    std::string percent_one_decimal() const {
        const auto tenths = (2000 * num_ + den_) / (2 * den_);
        return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
    }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace glsb
