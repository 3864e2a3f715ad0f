#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <iosfwd>
#include <string>

namespace noble {

// Working precision in bits for newly created Bounds.
void set_precision_bits(long bits);
long precision_bits();
// 40 significant digits need about 133 bits; guard bits are added on top.
long bits_for_digits(int digits);

// Closed interval [lo, hi] with MPFR endpoints and outward rounding.
class Bound {
 public:
  Bound();
  Bound(int v);
  Bound(long v);
  Bound(unsigned long v);
  explicit Bound(double v);
  Bound(const Bound& lo, const Bound& hi);  // hull of the two
  Bound(const Bound& o);
  Bound(Bound&& o) noexcept;
  Bound& operator=(const Bound& o);
  Bound& operator=(Bound&& o) noexcept;
  ~Bound();

  static Bound rational(long p, long q);
  static Bound from_mpz(const mpz_class& z);
  static Bound from_mpq(const mpq_class& q);
  // Decimal or hex-float literal, rounded outward.
  static Bound parse(const std::string& s);
  static Bound endpoints(const std::string& lo, const std::string& hi);
  static Bound pi();
  static Bound unit_disk();  // [-1, 1]

  const mpfr_t& lo() const { return lo_; }
  const mpfr_t& hi() const { return hi_; }
  double lo_d() const;  // rounded down
  double hi_d() const;  // rounded up
  double mid_d() const;
  long double mid_ld() const;
  Bound mid() const;       // degenerate interval at the midpoint
  Bound width() const;     // upper bound on hi - lo, as a point
  double width_d() const;  // rounded up
  Bound lower() const;     // [lo, lo]
  Bound upper() const;     // [hi, hi]

  bool is_point() const;
  bool contains(double v) const;
  bool contains(const Bound& o) const;
  bool contains_zero() const;
  bool overlaps(const Bound& o) const;
  bool certainly_lt(const Bound& o) const;  // hi < o.lo
  bool certainly_le(const Bound& o) const;  // hi <= o.lo
  bool certainly_positive() const;          // lo > 0
  bool certainly_nonneg() const;            // lo >= 0
  bool finite() const;

  Bound operator-() const;
  Bound& operator+=(const Bound& o);
  Bound& operator-=(const Bound& o);
  Bound& operator*=(const Bound& o);
  Bound& operator/=(const Bound& o);

  Bound pow(long n) const;
  Bound square() const;

  // "[lo, hi]" with outward decimal rounding.
  std::string str(int digits = 20) const;
  // Exact hex-float endpoints for bit-exact persistence.
  std::string hex_lo() const;
  std::string hex_hi() const;
  static Bound from_hex(const std::string& lo, const std::string& hi);

 private:
  mpfr_t lo_;
  mpfr_t hi_;
  void init_();
  friend class BoundAccess;
};

Bound operator+(Bound a, const Bound& b);
Bound operator-(Bound a, const Bound& b);
Bound operator*(Bound a, const Bound& b);
Bound operator/(Bound a, const Bound& b);

Bound sqrt(const Bound& a);  // negative lower part clamped to 0
Bound exp(const Bound& a);
Bound log(const Bound& a);
Bound abs(const Bound& a);
Bound min(const Bound& a, const Bound& b);
Bound max(const Bound& a, const Bound& b);
Bound hull(const Bound& a, const Bound& b);
Bound cos(const Bound& a);
Bound sin(const Bound& a);
// a^(k/2) for a > 0.
Bound pow_half(const Bound& a, long k);
// Gamma on a positive interval away from the minimum near 1.4616.
Bound gamma_fn(const Bound& a);
// Drop the sign information and keep [0, hi] (for quantities known >= 0).
Bound clamp_nonneg(const Bound& a);

std::ostream& operator<<(std::ostream& os, const Bound& b);

}  // namespace noble
