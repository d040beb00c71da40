// Copyright 2026 The nucleo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NUCLEO_RATIONAL_HPP
#define NUCLEO_RATIONAL_HPP

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nucleo {

/// Exact rational number in canonical form (positive denominator, reduced).
///
/// Thin value wrapper over GMP's mpq_class. Every constructor canonicalizes,
/// and mpq arithmetic keeps results canonical, so equality is structural.
class Rational {
public:
    Rational() = default;
    Rational(long v) : q_(v) {}                // NOLINT(google-explicit-constructor)
    Rational(int v) : q_(v) {}                 // NOLINT(google-explicit-constructor)
    Rational(long num, long den) {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        q_ = mpq_class(mpz_class(num), mpz_class(den));
        q_.canonicalize();
    }
    explicit Rational(const mpz_class& num) : q_(num) {}
    Rational(const mpz_class& num, const mpz_class& den) : q_(num, den) {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        q_.canonicalize();
    }
    explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    /// Parses "p", "-p" or "p/q" (q != 0); whitespace is not accepted.
    static Rational parse(std::string_view text) {
        if (text.empty()) throw std::invalid_argument("empty rational literal");
        auto valid_int = [](std::string_view s, bool allow_sign) {
            if (s.empty()) return false;
            std::size_t i = 0;
            if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
            if (i == s.size()) return false;
            for (; i < s.size(); ++i)
                if (s[i] < '0' || s[i] > '9') return false;
            return true;
        };
        const auto slash = text.find('/');
        std::string_view num = text.substr(0, slash);
        std::string_view den = slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
        if (!valid_int(num, true) || (slash != std::string_view::npos && !valid_int(den, false)))
            throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
        std::string n(num);
        if (!n.empty() && n[0] == '+') n.erase(0, 1);
        mpz_class zn(n, 10);
        mpz_class zd = slash == std::string_view::npos ? mpz_class(1) : mpz_class(std::string(den), 10);
        if (zd == 0) throw std::invalid_argument("rational literal with zero denominator");
        return Rational(zn, zd);
    }

    /// Canonical "p/q" text, or "p" when q = 1.
    [[nodiscard]] std::string str() const {
        if (q_.get_den() == 1) return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    [[nodiscard]] const mpz_class& num() const { return q_.get_num(); }
    [[nodiscard]] const mpz_class& den() const { return q_.get_den(); }
    [[nodiscard]] const mpq_class& raw() const { return q_; }
    [[nodiscard]] int sign() const { return sgn(q_); }
    [[nodiscard]] bool is_zero() const { return sgn(q_) == 0; }
    [[nodiscard]] bool is_integer() const { return q_.get_den() == 1; }
    [[nodiscard]] double to_double() const { return q_.get_d(); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("rational division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class q_;
};

using RationalVector = std::vector<Rational>;

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline std::vector<std::string> to_strings(const RationalVector& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& r : v) out.push_back(r.str());
    return out;
}

}  // namespace nucleo

template <>
struct std::hash<nucleo::Rational> {
    std::size_t operator()(const nucleo::Rational& r) const noexcept {
        return std::hash<std::string>{}(r.str());
    }
};

#endif  // NUCLEO_RATIONAL_HPP
