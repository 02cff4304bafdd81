// Exact rational arithmetic on arbitrary-precision integers.
//
// Probability thresholds and transition weights must compare exactly:
// satisfaction at a bound that is attained (prob == q) flips between >=
// and > and no floating-point representation can decide that reliably.
// Magnitudes stay small in practice (a few limbs), so schoolbook
// algorithms and binary gcd are enough.

#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pctl {

class BigInt {
public:
    BigInt() = default;

    BigInt(std::int64_t v) {
        if (v == 0) return;
        sign_ = v < 0 ? -1 : 1;
        // avoid overflow on INT64_MIN
        std::uint64_t m = v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
        mag_.push_back(static_cast<std::uint32_t>(m & 0xffffffffu));
        if (m >> 32) mag_.push_back(static_cast<std::uint32_t>(m >> 32));
    }

    bool is_zero() const { return sign_ == 0; }
    bool is_negative() const { return sign_ < 0; }
    bool is_one() const { return sign_ == 1 && mag_.size() == 1 && mag_[0] == 1; }
    bool is_even() const { return sign_ == 0 || (mag_[0] & 1u) == 0; }
    int sign() const { return sign_; }

    BigInt negated() const {
        BigInt r = *this;
        r.sign_ = -r.sign_;
        return r;
    }

    BigInt abs() const {
        BigInt r = *this;
        if (r.sign_ < 0) r.sign_ = 1;
        return r;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0) return b;
        if (b.sign_ == 0) return a;
        BigInt r;
        if (a.sign_ == b.sign_) {
            r.mag_ = add_mag(a.mag_, b.mag_);
            r.sign_ = a.sign_;
        } else {
            int c = cmp_mag(a.mag_, b.mag_);
            if (c == 0) return BigInt();
            if (c > 0) {
                r.mag_ = sub_mag(a.mag_, b.mag_);
                r.sign_ = a.sign_;
            } else {
                r.mag_ = sub_mag(b.mag_, a.mag_);
                r.sign_ = b.sign_;
            }
        }
        return r;
    }

    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + b.negated(); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0 || b.sign_ == 0) return BigInt();
        BigInt r;
        r.sign_ = a.sign_ * b.sign_;
        r.mag_.assign(a.mag_.size() + b.mag_.size(), 0);
        for (std::size_t i = 0; i < a.mag_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.mag_.size(); ++j) {
                std::uint64_t cur = static_cast<std::uint64_t>(a.mag_[i]) * b.mag_[j] +
                                    r.mag_[i + j] + carry;
                r.mag_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
            }
            std::size_t k = i + b.mag_.size();
            while (carry) {
                std::uint64_t cur = r.mag_[k] + carry;
                r.mag_[k] = static_cast<std::uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
                ++k;
            }
        }
        r.trim();
        return r;
    }

    // Quotient and remainder by a machine-word divisor; remainder is returned.
    std::uint32_t divmod_small(std::uint32_t d) {
        if (d == 0) throw std::domain_error("BigInt: division by zero");
        if (sign_ == 0) return 0;
        std::uint64_t rem = 0;
        for (std::size_t i = mag_.size(); i-- > 0;) {
            std::uint64_t cur = (rem << 32) | mag_[i];
            mag_[i] = static_cast<std::uint32_t>(cur / d);
            rem = cur % d;
        }
        trim();
        if (mag_.empty()) sign_ = 0;
        return static_cast<std::uint32_t>(rem);
    }

    friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
        if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
        int c = cmp_mag(a.mag_, b.mag_) * a.sign_;
        return c <=> 0;
    }
    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.sign_ == b.sign_ && a.mag_ == b.mag_;
    }

    // Binary gcd: needs only shifts and subtraction.
    static BigInt gcd(BigInt a, BigInt b) {
        a.sign_ = a.mag_.empty() ? 0 : 1;
        b.sign_ = b.mag_.empty() ? 0 : 1;
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        unsigned shift = 0;
        while (a.is_even() && b.is_even()) {
            a.shr1();
            b.shr1();
            ++shift;
        }
        while (a.is_even()) a.shr1();
        while (!b.is_zero()) {
            while (b.is_even()) b.shr1();
            if (cmp_mag(a.mag_, b.mag_) > 0) std::swap(a, b);
            b = b - a;
            b.sign_ = b.mag_.empty() ? 0 : 1;
        }
        while (shift--) a = a + a;
        return a;
    }

    // Shift-subtract long division; adequate for the few-limb magnitudes
    // this library produces.
    static std::pair<BigInt, BigInt> divmod(const BigInt& a, const BigInt& b) {
        if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
        BigInt q, r;
        BigInt babs = b.abs();
        for (std::size_t i = a.bit_length(); i-- > 0;) {
            r.shl1();
            if (a.bit(i)) r = r + BigInt(1);
            q.shl1();
            if (cmp_mag(r.mag_, babs.mag_) >= 0) {
                r.mag_ = sub_mag(r.mag_, babs.mag_);
                r.trim();
                q = q + BigInt(1);
            }
        }
        if (a.sign_ * b.sign_ < 0) q.sign_ = -q.sign_;
        if (a.sign_ < 0) r.sign_ = -r.sign_;
        return {q, r};
    }

    std::size_t bit_length() const {
        if (mag_.empty()) return 0;
        std::uint32_t top = mag_.back();
        std::size_t bits = (mag_.size() - 1) * 32;
        while (top) {
            ++bits;
            top >>= 1;
        }
        return bits;
    }

    bool bit(std::size_t i) const {
        std::size_t limb = i / 32;
        if (limb >= mag_.size()) return false;
        return (mag_[limb] >> (i % 32)) & 1u;
    }

    std::string to_string() const {
        if (sign_ == 0) return "0";
        std::string out;
        BigInt t = abs();
        while (!t.is_zero()) {
            std::uint32_t r = t.divmod_small(1000000000u);
            std::string chunk = std::to_string(r);
            if (!t.is_zero()) chunk.insert(chunk.begin(), 9 - chunk.size(), '0');
            out.insert(0, chunk);
        }
        if (sign_ < 0) out.insert(out.begin(), '-');
        return out;
    }

    static std::optional<BigInt> parse_digits(std::string_view s) {
        if (s.empty()) return std::nullopt;
        BigInt r;
        for (char ch : s) {
            if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
            r = r * BigInt(10) + BigInt(ch - '0');
        }
        return r;
    }

    double to_double() const {
        double v = 0;
        for (std::size_t i = mag_.size(); i-- > 0;) v = v * 4294967296.0 + mag_[i];
        return sign_ < 0 ? -v : v;
    }

private:
    void trim() {
        while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
        if (mag_.empty()) sign_ = 0;
    }

    void shr1() {
        std::uint32_t carry = 0;
        for (std::size_t i = mag_.size(); i-- > 0;) {
            std::uint32_t cur = mag_[i];
            mag_[i] = (cur >> 1) | (carry << 31);
            carry = cur & 1u;
        }
        trim();
    }

    void shl1() {
        std::uint32_t carry = 0;
        for (std::size_t i = 0; i < mag_.size(); ++i) {
            std::uint32_t cur = mag_[i];
            mag_[i] = (cur << 1) | carry;
            carry = cur >> 31;
        }
        if (carry) mag_.push_back(carry);
        if (!mag_.empty() && sign_ == 0) sign_ = 1;
    }

    static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }

    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        const auto& big = a.size() >= b.size() ? a : b;
        const auto& small = a.size() >= b.size() ? b : a;
        std::vector<std::uint32_t> r = big;
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::uint64_t cur = static_cast<std::uint64_t>(r[i]) + carry +
                                (i < small.size() ? small[i] : 0u);
            r[i] = static_cast<std::uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
            if (carry == 0 && i >= small.size()) break;
        }
        if (carry) r.push_back(static_cast<std::uint32_t>(carry));
        return r;
    }

    // requires |a| >= |b|
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r = a;
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::int64_t cur = static_cast<std::int64_t>(r[i]) - borrow -
                               (i < b.size() ? b[i] : 0u);
            borrow = cur < 0 ? 1 : 0;
            if (cur < 0) cur += (1LL << 32);
            r[i] = static_cast<std::uint32_t>(cur);
            if (borrow == 0 && i >= b.size()) break;
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    int sign_ = 0;
    std::vector<std::uint32_t> mag_;
};

// Always normalized: den > 0 and gcd(|num|, den) == 1; zero is 0/1.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t v) : num_(v), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : Rational(BigInt(n), BigInt(d)) {}

    Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
        if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
        if (den_.is_negative()) {
            num_ = num_.negated();
            den_ = den_.negated();
        }
        normalize();
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_integer() const { return den_.is_one(); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw std::domain_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational operator-() const { return Rational(num_.negated(), den_); }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ <=> b.num_ * a.den_;
    }

    // Accepts "n", "-n", "n/m" and decimals like "0.25" or ".5".
    static std::optional<Rational> parse(std::string_view s) {
        if (s.empty()) return std::nullopt;
        bool neg = false;
        if (s[0] == '-' || s[0] == '+') {
            neg = s[0] == '-';
            s.remove_prefix(1);
        }
        auto slash = s.find('/');
        if (slash != std::string_view::npos) {
            auto n = BigInt::parse_digits(s.substr(0, slash));
            auto d = BigInt::parse_digits(s.substr(slash + 1));
            if (!n || !d || d->is_zero()) return std::nullopt;
            Rational r(*n, *d);
            return neg ? -r : r;
        }
        auto dot = s.find('.');
        if (dot != std::string_view::npos) {
            std::string_view ip = s.substr(0, dot);
            std::string_view fp = s.substr(dot + 1);
            if (ip.empty() && fp.empty()) return std::nullopt;
            BigInt n(0);
            if (!ip.empty()) {
                auto v = BigInt::parse_digits(ip);
                if (!v) return std::nullopt;
                n = *v;
            }
            BigInt d(1);
            for (char ch : fp) {
                if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
                n = n * BigInt(10) + BigInt(ch - '0');
                d = d * BigInt(10);
            }
            Rational r(n, d);
            return neg ? -r : r;
        }
        auto v = BigInt::parse_digits(s);
        if (!v) return std::nullopt;
        Rational r(*v, BigInt(1));
        return neg ? -r : r;
    }

    // Canonical form: "n" or "n/m".
    std::string to_string() const {
        if (den_.is_one()) return num_.to_string();
        return num_.to_string() + "/" + den_.to_string();
    }

    // Decimal when the reduced denominator is a power of ten, "n/m"
    // otherwise; both forms re-parse to the same value.
    std::string to_decimal_or_fraction() const {
        if (den_.is_one()) return num_.to_string();
        BigInt t = den_;
        int digits = 0;
        while (!t.is_one()) {
            if (t.divmod_small(10) != 0) return to_string();
            ++digits;
        }
        std::string s = num_.abs().to_string();
        if (static_cast<int>(s.size()) <= digits) s.insert(s.begin(), digits + 1 - s.size(), '0');
        s.insert(s.size() - digits, ".");
        if (num_.is_negative()) s.insert(s.begin(), '-');
        return s;
    }

    double to_double() const { return num_.to_double() / den_.to_double(); }

private:
    void normalize() {
        if (num_.is_zero()) {
            den_ = BigInt(1);
            return;
        }
        BigInt g = BigInt::gcd(num_.abs(), den_);
        if (!g.is_one()) {
            num_ = divide_exact(num_, g);
            den_ = divide_exact(den_, g);
        }
    }

    static BigInt divide_exact(const BigInt& a, const BigInt& g) {
        return BigInt::divmod(a, g).first;
    }

    BigInt num_;
    BigInt den_;
};

} // namespace pctl
