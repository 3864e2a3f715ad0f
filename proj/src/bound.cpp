#include "noble/bound.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <vector>

#include "noble/error.hpp"

namespace noble {

namespace {

std::atomic<long> g_bits{160};

mpfr_prec_t cur() { return static_cast<mpfr_prec_t>(g_bits.load()); }

struct Tmp {
  mpfr_t v;
  Tmp() { mpfr_init2(v, cur()); }
  ~Tmp() { mpfr_clear(v); }
  Tmp(const Tmp&) = delete;
  Tmp& operator=(const Tmp&) = delete;
};

void set_min(mpfr_t dst, const mpfr_t a, const mpfr_t b) {
  if (mpfr_cmp(a, b) <= 0)
    mpfr_set(dst, a, MPFR_RNDD);
  else
    mpfr_set(dst, b, MPFR_RNDD);
}

void set_max(mpfr_t dst, const mpfr_t a, const mpfr_t b) {
  if (mpfr_cmp(a, b) >= 0)
    mpfr_set(dst, a, MPFR_RNDU);
  else
    mpfr_set(dst, b, MPFR_RNDU);
}

std::string hexstr(const mpfr_t x) {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%Ra", x);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

}  // namespace

void set_precision_bits(long bits) {
  if (bits < 53) bits = 53;
  g_bits.store(bits);
}

long precision_bits() { return g_bits.load(); }

long bits_for_digits(int digits) {
  return static_cast<long>(std::ceil(digits * 3.3219280948873622)) + 32;
}

void Bound::init_() {
  mpfr_init2(lo_, cur());
  mpfr_init2(hi_, cur());
}

Bound::Bound() {
  init_();
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Bound::Bound(int v) : Bound(static_cast<long>(v)) {}

Bound::Bound(long v) {
  init_();
  mpfr_set_si(lo_, v, MPFR_RNDD);
  mpfr_set_si(hi_, v, MPFR_RNDU);
}

Bound::Bound(unsigned long v) {
  init_();
  mpfr_set_ui(lo_, v, MPFR_RNDD);
  mpfr_set_ui(hi_, v, MPFR_RNDU);
}

Bound::Bound(double v) {
  if (!std::isfinite(v)) fail("NonFiniteLiteral", "bound from non-finite double");
  init_();
  mpfr_set_d(lo_, v, MPFR_RNDD);
  mpfr_set_d(hi_, v, MPFR_RNDU);
}

Bound::Bound(const Bound& a, const Bound& b) {
  init_();
  set_min(lo_, a.lo_, b.lo_);
  set_max(hi_, a.hi_, b.hi_);
}

Bound::Bound(const Bound& o) {
  mpfr_init2(lo_, mpfr_get_prec(o.lo_));
  mpfr_init2(hi_, mpfr_get_prec(o.hi_));
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Bound::Bound(Bound&& o) noexcept {
  init_();
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Bound& Bound::operator=(const Bound& o) {
  if (this != &o) {
    mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
    mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}

Bound& Bound::operator=(Bound&& o) noexcept {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
  return *this;
}

Bound::~Bound() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Bound Bound::rational(long p, long q) {
  if (q == 0) fail("DivisionByIntervalContainingZero", "rational with zero denominator");
  return Bound(p) / Bound(q);
}

Bound Bound::from_mpz(const mpz_class& z) {
  Bound r;
  mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
  return r;
}

Bound Bound::from_mpq(const mpq_class& q) {
  Bound r;
  mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
  return r;
}

Bound Bound::parse(const std::string& s) {
  Bound r;
  char* end = nullptr;
  mpfr_strtofr(r.lo_, s.c_str(), &end, 0, MPFR_RNDD);
  if (end == s.c_str() || *end != '\0') fail("SyntaxError", "bad numeric literal '" + s + "'");
  mpfr_strtofr(r.hi_, s.c_str(), &end, 0, MPFR_RNDU);
  return r;
}

Bound Bound::endpoints(const std::string& lo, const std::string& hi) {
  Bound a = parse(lo), b = parse(hi);
  if (mpfr_cmp(a.lo_, b.hi_) > 0) fail("SyntaxError", "interval with lo > hi");
  Bound r;
  mpfr_set(r.lo_, a.lo_, MPFR_RNDD);
  mpfr_set(r.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Bound Bound::pi() {
  Bound r;
  mpfr_const_pi(r.lo_, MPFR_RNDD);
  mpfr_const_pi(r.hi_, MPFR_RNDU);
  return r;
}

Bound Bound::unit_disk() { return Bound(Bound(-1), Bound(1)); }

double Bound::lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Bound::hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Bound::mid_d() const {
  Tmp t;
  mpfr_add(t.v, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(t.v, t.v, 1, MPFR_RNDN);
  return mpfr_get_d(t.v, MPFR_RNDN);
}

long double Bound::mid_ld() const {
  Tmp t;
  mpfr_add(t.v, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(t.v, t.v, 1, MPFR_RNDN);
  return mpfr_get_ld(t.v, MPFR_RNDN);
}

Bound Bound::mid() const {
  Bound r;
  mpfr_add(r.lo_, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(r.lo_, r.lo_, 1, MPFR_RNDN);
  mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
  return r;
}

Bound Bound::width() const {
  Bound r;
  mpfr_sub(r.hi_, hi_, lo_, MPFR_RNDU);
  mpfr_set(r.lo_, r.hi_, MPFR_RNDD);
  return r;
}

double Bound::width_d() const {
  Tmp t;
  mpfr_sub(t.v, hi_, lo_, MPFR_RNDU);
  return mpfr_get_d(t.v, MPFR_RNDU);
}

Bound Bound::lower() const {
  Bound r;
  mpfr_set(r.lo_, lo_, MPFR_RNDD);
  mpfr_set(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Bound Bound::upper() const {
  Bound r;
  mpfr_set(r.lo_, hi_, MPFR_RNDD);
  mpfr_set(r.hi_, hi_, MPFR_RNDU);
  return r;
}

bool Bound::is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }

bool Bound::contains(double v) const { return mpfr_cmp_d(lo_, v) <= 0 && mpfr_cmp_d(hi_, v) >= 0; }

bool Bound::contains(const Bound& o) const {
  return mpfr_cmp(lo_, o.lo_) <= 0 && mpfr_cmp(hi_, o.hi_) >= 0;
}

bool Bound::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

bool Bound::overlaps(const Bound& o) const {
  return mpfr_cmp(lo_, o.hi_) <= 0 && mpfr_cmp(o.lo_, hi_) <= 0;
}

bool Bound::certainly_lt(const Bound& o) const { return mpfr_cmp(hi_, o.lo_) < 0; }
bool Bound::certainly_le(const Bound& o) const { return mpfr_cmp(hi_, o.lo_) <= 0; }
bool Bound::certainly_positive() const { return mpfr_sgn(lo_) > 0; }
bool Bound::certainly_nonneg() const { return mpfr_sgn(lo_) >= 0; }
bool Bound::finite() const { return mpfr_number_p(lo_) && mpfr_number_p(hi_); }

Bound Bound::operator-() const {
  Bound r;
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Bound& Bound::operator+=(const Bound& o) {
  mpfr_add(lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_add(hi_, hi_, o.hi_, MPFR_RNDU);
  return *this;
}

Bound& Bound::operator-=(const Bound& o) {
  Tmp t;
  mpfr_sub(t.v, lo_, o.hi_, MPFR_RNDD);
  mpfr_sub(hi_, hi_, o.lo_, MPFR_RNDU);
  mpfr_set(lo_, t.v, MPFR_RNDD);
  return *this;
}

Bound& Bound::operator*=(const Bound& o) {
  Tmp a, b, c, e, lo, hi;
  mpfr_mul(a.v, lo_, o.lo_, MPFR_RNDD);
  mpfr_mul(b.v, lo_, o.hi_, MPFR_RNDD);
  mpfr_mul(c.v, hi_, o.lo_, MPFR_RNDD);
  mpfr_mul(e.v, hi_, o.hi_, MPFR_RNDD);
  set_min(lo.v, a.v, b.v);
  set_min(lo.v, lo.v, c.v);
  set_min(lo.v, lo.v, e.v);
  mpfr_mul(a.v, lo_, o.lo_, MPFR_RNDU);
  mpfr_mul(b.v, lo_, o.hi_, MPFR_RNDU);
  mpfr_mul(c.v, hi_, o.lo_, MPFR_RNDU);
  mpfr_mul(e.v, hi_, o.hi_, MPFR_RNDU);
  set_max(hi.v, a.v, b.v);
  set_max(hi.v, hi.v, c.v);
  set_max(hi.v, hi.v, e.v);
  mpfr_set_prec(lo_, cur());
  mpfr_set_prec(hi_, cur());
  mpfr_set(lo_, lo.v, MPFR_RNDD);
  mpfr_set(hi_, hi.v, MPFR_RNDU);
  return *this;
}

Bound& Bound::operator/=(const Bound& o) {
  if (o.contains_zero()) fail("DivisionByIntervalContainingZero", "divisor " + o.str(6));
  Tmp a, b, c, e, lo, hi;
  mpfr_div(a.v, lo_, o.lo_, MPFR_RNDD);
  mpfr_div(b.v, lo_, o.hi_, MPFR_RNDD);
  mpfr_div(c.v, hi_, o.lo_, MPFR_RNDD);
  mpfr_div(e.v, hi_, o.hi_, MPFR_RNDD);
  set_min(lo.v, a.v, b.v);
  set_min(lo.v, lo.v, c.v);
  set_min(lo.v, lo.v, e.v);
  mpfr_div(a.v, lo_, o.lo_, MPFR_RNDU);
  mpfr_div(b.v, lo_, o.hi_, MPFR_RNDU);
  mpfr_div(c.v, hi_, o.lo_, MPFR_RNDU);
  mpfr_div(e.v, hi_, o.hi_, MPFR_RNDU);
  set_max(hi.v, a.v, b.v);
  set_max(hi.v, hi.v, c.v);
  set_max(hi.v, hi.v, e.v);
  mpfr_set_prec(lo_, cur());
  mpfr_set_prec(hi_, cur());
  mpfr_set(lo_, lo.v, MPFR_RNDD);
  mpfr_set(hi_, hi.v, MPFR_RNDU);
  return *this;
}

Bound Bound::square() const {
  Bound r;
  if (mpfr_sgn(lo_) >= 0) {
    mpfr_sqr(r.lo_, lo_, MPFR_RNDD);
    mpfr_sqr(r.hi_, hi_, MPFR_RNDU);
  } else if (mpfr_sgn(hi_) <= 0) {
    mpfr_sqr(r.lo_, hi_, MPFR_RNDD);
    mpfr_sqr(r.hi_, lo_, MPFR_RNDU);
  } else {
    Tmp a, b;
    mpfr_sqr(a.v, lo_, MPFR_RNDU);
    mpfr_sqr(b.v, hi_, MPFR_RNDU);
    mpfr_set_zero(r.lo_, 1);
    set_max(r.hi_, a.v, b.v);
  }
  return r;
}

Bound Bound::pow(long n) const {
  if (n < 0) return Bound(1) / pow(-n);
  if (n == 0) return Bound(1);
  if (n % 2 == 0) {
    Bound h = square();
    Bound r(1);
    Bound base = h;
    long e = n / 2;
    while (e > 0) {
      if (e & 1) r *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return r;
  }
  // odd powers are monotone
  Bound r;
  mpfr_pow_si(r.lo_, lo_, n, MPFR_RNDD);
  mpfr_pow_si(r.hi_, hi_, n, MPFR_RNDU);
  return r;
}

std::string Bound::str(int digits) const {
  char* a = nullptr;
  char* b = nullptr;
  std::string fmt_lo = "%." + std::to_string(digits) + "RDg";
  std::string fmt_hi = "%." + std::to_string(digits) + "RUg";
  mpfr_asprintf(&a, fmt_lo.c_str(), lo_);
  mpfr_asprintf(&b, fmt_hi.c_str(), hi_);
  std::string s = std::string("[") + a + ", " + b + "]";
  mpfr_free_str(a);
  mpfr_free_str(b);
  return s;
}

std::string Bound::hex_lo() const { return hexstr(lo_); }
std::string Bound::hex_hi() const { return hexstr(hi_); }

Bound Bound::from_hex(const std::string& lo, const std::string& hi) {
  Bound r;
  long need = static_cast<long>(4 * (lo.size() + hi.size())) + 8;
  if (need > cur()) {
    mpfr_set_prec(r.lo_, need);
    mpfr_set_prec(r.hi_, need);
  }
  char* end = nullptr;
  mpfr_strtofr(r.lo_, lo.c_str(), &end, 16, MPFR_RNDD);
  if (*end != '\0') fail("CacheCorrupt", "bad hex float '" + lo + "'");
  mpfr_strtofr(r.hi_, hi.c_str(), &end, 16, MPFR_RNDU);
  if (*end != '\0') fail("CacheCorrupt", "bad hex float '" + hi + "'");
  if (mpfr_cmp(r.lo_, r.hi_) > 0) fail("CacheCorrupt", "interval with lo > hi");
  return r;
}

Bound operator+(Bound a, const Bound& b) { return a += b; }
Bound operator-(Bound a, const Bound& b) { return a -= b; }
Bound operator*(Bound a, const Bound& b) { return a *= b; }
Bound operator/(Bound a, const Bound& b) { return a /= b; }

class BoundAccess {
 public:
  static mpfr_t& lo(Bound& b) { return b.lo_; }
  static mpfr_t& hi(Bound& b) { return b.hi_; }
};

Bound sqrt(const Bound& a) {
  if (mpfr_sgn(a.hi()) < 0) fail("DomainError", "sqrt of negative interval " + a.str(6));
  Bound r;
  if (mpfr_sgn(a.lo()) <= 0)
    mpfr_set_zero(BoundAccess::lo(r), 1);
  else
    mpfr_sqrt(BoundAccess::lo(r), a.lo(), MPFR_RNDD);
  mpfr_sqrt(BoundAccess::hi(r), a.hi(), MPFR_RNDU);
  return r;
}

Bound exp(const Bound& a) {
  Bound r;
  mpfr_exp(BoundAccess::lo(r), a.lo(), MPFR_RNDD);
  mpfr_exp(BoundAccess::hi(r), a.hi(), MPFR_RNDU);
  return r;
}

Bound log(const Bound& a) {
  if (!a.certainly_positive()) fail("DomainError", "log of non-positive interval " + a.str(6));
  Bound r;
  mpfr_log(BoundAccess::lo(r), a.lo(), MPFR_RNDD);
  mpfr_log(BoundAccess::hi(r), a.hi(), MPFR_RNDU);
  return r;
}

Bound abs(const Bound& a) {
  if (mpfr_sgn(a.lo()) >= 0) return a;
  if (mpfr_sgn(a.hi()) <= 0) return -a;
  Bound r;
  mpfr_set_zero(BoundAccess::lo(r), 1);
  Tmp t;
  mpfr_neg(t.v, a.lo(), MPFR_RNDU);
  set_max(BoundAccess::hi(r), t.v, a.hi());
  return r;
}

Bound min(const Bound& a, const Bound& b) {
  Bound r;
  set_min(BoundAccess::lo(r), a.lo(), b.lo());
  if (mpfr_cmp(a.hi(), b.hi()) <= 0)
    mpfr_set(BoundAccess::hi(r), a.hi(), MPFR_RNDU);
  else
    mpfr_set(BoundAccess::hi(r), b.hi(), MPFR_RNDU);
  return r;
}

Bound max(const Bound& a, const Bound& b) {
  Bound r;
  if (mpfr_cmp(a.lo(), b.lo()) >= 0)
    mpfr_set(BoundAccess::lo(r), a.lo(), MPFR_RNDD);
  else
    mpfr_set(BoundAccess::lo(r), b.lo(), MPFR_RNDD);
  set_max(BoundAccess::hi(r), a.hi(), b.hi());
  return r;
}

Bound hull(const Bound& a, const Bound& b) { return Bound(a, b); }

Bound cos(const Bound& a) {
  Bound pi = Bound::pi();
  Bound w = a.width();
  Bound two_pi = pi * Bound(2);
  if (!w.certainly_lt(two_pi)) return Bound::unit_disk();
  Bound r;
  Tmp c1, c2;
  mpfr_cos(c1.v, a.lo(), MPFR_RNDD);
  mpfr_cos(c2.v, a.hi(), MPFR_RNDD);
  set_min(BoundAccess::lo(r), c1.v, c2.v);
  mpfr_cos(c1.v, a.lo(), MPFR_RNDU);
  mpfr_cos(c2.v, a.hi(), MPFR_RNDU);
  set_max(BoundAccess::hi(r), c1.v, c2.v);
  // extrema at k*pi inside [lo, hi]; any doubt admits the extremum
  Bound kl = a.lower() / pi;
  Bound kh = a.upper() / pi;
  Tmp f;
  mpfr_floor(f.v, kl.lo());
  long k0 = mpfr_get_si(f.v, MPFR_RNDD);
  mpfr_ceil(f.v, kh.hi());
  long k1 = mpfr_get_si(f.v, MPFR_RNDU);
  for (long k = k0; k <= k1; ++k) {
    Bound kp = Bound(k) * pi;
    if (kp.overlaps(a)) {
      if (k % 2 == 0)
        mpfr_set_si(BoundAccess::hi(r), 1, MPFR_RNDU);
      else
        mpfr_set_si(BoundAccess::lo(r), -1, MPFR_RNDD);
    }
  }
  if (mpfr_cmp_si(r.lo(), -1) < 0) mpfr_set_si(BoundAccess::lo(r), -1, MPFR_RNDD);
  if (mpfr_cmp_si(r.hi(), 1) > 0) mpfr_set_si(BoundAccess::hi(r), 1, MPFR_RNDU);
  return r;
}

Bound sin(const Bound& a) { return cos(a - Bound::pi() / Bound(2)); }

Bound pow_half(const Bound& a, long k) {
  if (!a.certainly_positive()) fail("DomainError", "pow_half of non-positive interval");
  if (k % 2 == 0) return a.pow(k / 2);
  Bound s = sqrt(a);
  return s.pow(k);
}

Bound gamma_fn(const Bound& a) {
  if (!a.certainly_positive()) fail("DomainError", "gamma of non-positive interval");
  Bound r;
  Tmp g1, g2;
  if (mpfr_cmp_d(a.hi(), 1.46) < 0) {
    mpfr_gamma(g1.v, a.hi(), MPFR_RNDD);
    mpfr_gamma(g2.v, a.lo(), MPFR_RNDU);
  } else if (mpfr_cmp_d(a.lo(), 1.47) > 0) {
    mpfr_gamma(g1.v, a.lo(), MPFR_RNDD);
    mpfr_gamma(g2.v, a.hi(), MPFR_RNDU);
  } else {
    fail("DomainError", "gamma interval straddles its minimum");
  }
  mpfr_set(BoundAccess::lo(r), g1.v, MPFR_RNDD);
  mpfr_set(BoundAccess::hi(r), g2.v, MPFR_RNDU);
  return r;
}

Bound clamp_nonneg(const Bound& a) {
  if (mpfr_sgn(a.hi()) < 0) fail("DomainError", "expected a nonnegative quantity, got " + a.str(6));
  if (mpfr_sgn(a.lo()) >= 0) return a;
  Bound r = a;
  mpfr_set_zero(BoundAccess::lo(r), 1);
  return r;
}

std::ostream& operator<<(std::ostream& os, const Bound& b) { return os << b.str(); }

}  // namespace noble
