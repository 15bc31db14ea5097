#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kicktop {

namespace detail {

// Minimal sign-magnitude big integer: just enough for exact cat-map matrix
// powers, whose entries grow like e^{2 lambda n} and overflow int64 fast.
class BigInt {
public:
  BigInt() = default;
  BigInt(long long v) {
    if (v < 0) {
      neg_ = true;
      v = -v;
    }
    if (v != 0) limbs_.push_back(static_cast<std::uint64_t>(v));
  }

  bool zero() const { return limbs_.empty(); }
  bool negative() const { return neg_; }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.neg_ == b.neg_) {
      BigInt r;
      r.neg_ = a.neg_;
      r.limbs_ = add_mag(a.limbs_, b.limbs_);
      r.trim();
      return r;
    }
    const int cmp = cmp_mag(a.limbs_, b.limbs_);
    if (cmp == 0) return {};
    BigInt r;
    if (cmp > 0) {
      r.limbs_ = sub_mag(a.limbs_, b.limbs_);
      r.neg_ = a.neg_;
    } else {
      r.limbs_ = sub_mag(b.limbs_, a.limbs_);
      r.neg_ = b.neg_;
    }
    r.trim();
    return r;
  }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.zero() || b.zero()) return {};
    BigInt r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
      unsigned __int128 carry = 0;
      for (std::size_t k = 0; k < b.limbs_.size(); ++k) {
        unsigned __int128 cur = static_cast<unsigned __int128>(a.limbs_[i]) * b.limbs_[k] +
                                r.limbs_[i + k] + carry;
        r.limbs_[i + k] = static_cast<std::uint64_t>(cur);
        carry = cur >> 64;
      }
      std::size_t pos = i + b.limbs_.size();
      while (carry) {
        unsigned __int128 cur = static_cast<unsigned __int128>(r.limbs_[pos]) + carry;
        r.limbs_[pos] = static_cast<std::uint64_t>(cur);
        carry = cur >> 64;
        ++pos;
      }
    }
    r.neg_ = a.neg_ != b.neg_;
    r.trim();
    return r;
  }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.neg_ == b.neg_ && a.limbs_ == b.limbs_;
  }

  // Saturating conversion; magnitudes beyond double range become +/-inf.
  double to_double() const {
    double v = 0.0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
      v = v * 0x1.0p64 + static_cast<double>(limbs_[i]);
      if (v > std::numeric_limits<double>::max()) {
        v = std::numeric_limits<double>::infinity();
        break;
      }
    }
    return neg_ ? -v : v;
  }

  // (|x| mod 2^bits) / 2^bits, exact to double rounding.
  double frac_mod_pow2(int bits) const {
    long double f = 0.0L;
    const int words = (bits + 63) / 64;
    for (int i = 0; i < words && i < static_cast<int>(limbs_.size()); ++i) {
      std::uint64_t limb = limbs_[i];
      const int top = bits - 64 * i; // bits of this limb that survive the mod
      if (top < 64) limb &= (std::uint64_t(1) << top) - 1;
      f += std::ldexp(static_cast<long double>(limb), 64 * i - bits);
    }
    return static_cast<double>(f);
  }

private:
  static std::vector<std::uint64_t> add_mag(const std::vector<std::uint64_t>& a,
                                            const std::vector<std::uint64_t>& b) {
    const auto& big = a.size() >= b.size() ? a : b;
    const auto& small = a.size() >= b.size() ? b : a;
    std::vector<std::uint64_t> r(big.size() + 1, 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < big.size(); ++i) {
      unsigned __int128 cur = carry + big[i] + (i < small.size() ? small[i] : 0);
      r[i] = static_cast<std::uint64_t>(cur);
      carry = cur >> 64;
    }
    r[big.size()] = static_cast<std::uint64_t>(carry);
    return r;
  }

  // requires |a| >= |b|
  static std::vector<std::uint64_t> sub_mag(const std::vector<std::uint64_t>& a,
                                            const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> r(a.size(), 0);
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      unsigned __int128 lhs = a[i];
      unsigned __int128 rhs = (i < b.size() ? b[i] : 0) + static_cast<unsigned __int128>(borrow);
      if (lhs >= rhs) {
        r[i] = static_cast<std::uint64_t>(lhs - rhs);
        borrow = 0;
      } else {
        r[i] = static_cast<std::uint64_t>(((unsigned __int128)1 << 64) + lhs - rhs);
        borrow = 1;
      }
    }
    return r;
  }

  static int cmp_mag(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }

  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
  }

  bool neg_ = false;
  std::vector<std::uint64_t> limbs_; // little-endian base 2^64
};

} // namespace detail

// Integer torus automorphism (q,p) -> (a q + b p, c q + d p) mod 1 with
// ad - bc = 1, acting on a periodicized Gaussian of width sigma centered at
// (q0, p0). Chaotic whenever |a + d| > 2 (e.g. a=2,b=1,c=1,d=1).
struct CatMap {
  long long a = 2, b = 1, c = 1, d = 1;
  double sigma = 0.01;
  double q0 = 0.0, p0 = 0.0;

  void validate() const {
    if (a * d - b * c != 1) throw std::domain_error("CatMap: determinant must be 1");
    if (!(sigma > 0.0)) throw std::domain_error("CatMap: sigma must be > 0");
  }
};

struct CatMapPower {
  detail::BigInt a, b, c, d;
};

// Exact n-th power of the cat-map matrix.
inline CatMapPower cat_map_power(const CatMap& map, int n) {
  if (n < 0) throw std::domain_error("cat_map_power: n must be >= 0");
  CatMapPower r{1, 0, 0, 1};
  const detail::BigInt ma(map.a), mb(map.b), mc(map.c), md(map.d);
  for (int i = 0; i < n; ++i) {
    CatMapPower next;
    next.a = ma * r.a + mb * r.c;
    next.b = ma * r.b + mb * r.d;
    next.c = mc * r.a + md * r.c;
    next.d = mc * r.b + md * r.d;
    r = std::move(next);
  }
  return r;
}

namespace detail {

// Exact fractional part of q * |m| for a double q >= 0 and big integer m:
// q is decomposed as M / 2^s with integer M, so (q m) mod 1 has an exact
// binary representation.
inline double frac_of_product(double q, const detail::BigInt& m) {
  if (q == 0.0) return 0.0;
  int e = 0;
  const double mant = std::frexp(q, &e);
  const long long mantissa = static_cast<long long>(std::ldexp(mant, 53));
  const int s = 53 - e;
  if (s <= 0) return 0.0; // q is an integer multiple of 1 at this scale
  return (BigInt(mantissa) * m).frac_mod_pow2(s);
}

} // namespace detail

// Closed-form variance of f = cos(2 pi q) after n steps of the map, for an
// initial Gaussian centered at (q0, 0):
//   var f(n) = 1/2 (1 - G)(1 - cos(4 pi q0 a_n) G),
//   G = exp(-4 pi^2 sigma^2 (a_n^2 + c_n^2)).
// The matrix power is exact, and the cosine argument is reduced mod 1 in
// exact arithmetic; double precision would corrupt it after a few steps.
inline double cat_map_variance(const CatMap& map, int n) {
  map.validate();
  const CatMapPower pw = cat_map_power(map, n);
  const double an2 = pw.a.to_double() * pw.a.to_double();
  const double cn2 = pw.c.to_double() * pw.c.to_double();
  const double expo = 4.0 * std::numbers::pi * std::numbers::pi * map.sigma * map.sigma;
  const double g = (std::isinf(an2) || std::isinf(cn2)) ? 0.0 : std::exp(-expo * (an2 + cn2));
  // cos(4 pi q0 a_n) is even in a_n, so the magnitude suffices
  const double frac = detail::frac_of_product(std::abs(map.q0), pw.a);
  const double cosine = std::cos(4.0 * std::numbers::pi * frac);
  return 0.5 * (1.0 - g) * (1.0 - cosine * g);
}

} // namespace kicktop
