#include "noble/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "noble/error.hpp"
#include "noble/simd.hpp"

namespace noble {

namespace {

std::mutex g_engine_mutex;

// Legendre P_N and P_{N-1} at x by the three-term recurrence.
std::pair<Bound, Bound> legendre(int N, const Bound& x) {
  Bound p0(1), p1 = x;
  for (int k = 1; k < N; ++k) {
    Bound p2 = (Bound(2 * k + 1) * x * p1 - Bound(k) * p0) / Bound(k + 1);
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  return {p1, p0};
}

// Gauss-Legendre nodes and weights on [-1, 1]. Nodes are exact machine points
// from Newton iteration; weights are midpoints of the standard formula. The
// rule is whatever these numbers are: its defects are measured afterwards.
void gauss_legendre(int N, std::vector<Bound>& x, std::vector<Bound>& w) {
  x.assign(static_cast<std::size_t>(N), Bound(0));
  w.assign(static_cast<std::size_t>(N), Bound(0));
  const double pi = std::acos(-1.0);
  for (int i = 0; i < N; ++i) {
    Bound xi(std::cos(pi * (i + 0.75) / (N + 0.5)));
    for (int it = 0; it < 12; ++it) {
      auto [pn, pm] = legendre(N, xi);
      Bound dp = Bound(N) * (xi * pn - pm) / (xi.square() - Bound(1));
      xi = (xi - pn / dp).mid();
    }
    auto [pn, pm] = legendre(N, xi);
    Bound dp = Bound(N) * (xi * pn - pm) / (xi.square() - Bound(1));
    x[static_cast<std::size_t>(i)] = xi;
    w[static_cast<std::size_t>(i)] = (Bound(2) / ((Bound(1) - xi.square()) * dp.square())).mid();
  }
}

// Lambda(rho) = |E_0| + 2 sum_{1<=k<2N} rho^{-k}|E_k| + 2 (W + 2/(4N^2-1)) rho^{-2N}/(1-1/rho),
// where E_k is the rule defect on T_k: a bound on |error| / M for f analytic with |f| <= M
// inside the Bernstein ellipse E_rho.
Bound chebyshev_defect(const std::vector<Bound>& x, const std::vector<Bound>& w, const Bound& rho) {
  const int N = static_cast<int>(x.size());
  std::vector<Bound> E(static_cast<std::size_t>(2 * N), Bound(0));
  Bound W(0);
  for (const Bound& wi : w) W += abs(wi);
  for (int i = 0; i < N; ++i) {
    const Bound& xi = x[static_cast<std::size_t>(i)];
    const Bound& wi = w[static_cast<std::size_t>(i)];
    Bound t0(1), t1 = xi;
    E[0] += wi;
    if (2 * N > 1) E[1] += wi * t1;
    for (int k = 2; k < 2 * N; ++k) {
      Bound t2 = Bound(2) * xi * t1 - t0;
      E[static_cast<std::size_t>(k)] += wi * t2;
      t0 = std::move(t1);
      t1 = std::move(t2);
    }
  }
  for (int k = 0; k < 2 * N; k += 2) E[static_cast<std::size_t>(k)] -= Bound(2) / Bound(1 - k * k);
  Bound inv = Bound(1) / rho;
  Bound lam = abs(E[0]);
  Bound pk(1);
  for (int k = 1; k < 2 * N; ++k) {
    pk *= inv;
    lam += Bound(2) * pk * abs(E[static_cast<std::size_t>(k)]);
  }
  pk *= inv;
  lam += Bound(2) * (W + Bound(2) / Bound(4L * N * N - 1)) * pk / (Bound(1) - inv);
  return lam.upper();
}

// Upper bound of g(sigma) = e^{-sigma} I_0(|sigma|), decreasing in sigma.
Bound g_upper(const Bound& sigma) {
  Bound a = abs(sigma.lower());
  Bound f0 = scaled_bessel_series(a, 0)[0];  // e^{-|s|} I_0(|s|)
  if (sigma.lower().certainly_nonneg()) return f0.upper();
  return (exp(Bound(2) * a) * f0).upper();
}

// Coefficients tau_k of T_m(1 - u) in powers of u.
std::vector<mpz_class> chebyshev_shift(int m) {
  std::vector<mpz_class> t0{1}, t1{1, -1};
  if (m == 0) return t0;
  for (int k = 1; k < m; ++k) {
    std::vector<mpz_class> t2(t1.size() + 1, 0);
    for (std::size_t i = 0; i < t1.size(); ++i) {
      t2[i] += 2 * t1[i];
      t2[i + 1] -= 2 * t1[i];
    }
    for (std::size_t i = 0; i < t0.size(); ++i) t2[i] -= t0[i];
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  return t1;
}

mpz_class binom(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

mpz_class factorial(unsigned long n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

std::vector<Bound> poly_mul_trunc(const std::vector<Bound>& a, const std::vector<Bound>& b, std::size_t K) {
  std::vector<Bound> c(K, Bound(0));
  for (std::size_t i = 0; i < a.size() && i < K; ++i)
    for (std::size_t j = 0; j < b.size() && i + j < K; ++j) c[i + j] += a[i] * b[j];
  return c;
}

Bound poly_eval(const std::vector<Bound>& p, const Bound& w) {
  Bound r(0);
  for (std::size_t i = p.size(); i-- > 0;) r = r * w + p[i];
  return r;
}

}  // namespace

std::vector<Bound> scaled_bessel_series(const Bound& s, int mmax) {
  if (mmax < 0) return {};
  if (!s.certainly_nonneg()) fail("DomainError", "scaled Bessel series needs s >= 0");
  const long bits = precision_bits();
  Bound half = s / Bound(2);
  Bound q = half.square();
  Bound es = exp(-s);
  std::vector<Bound> out(static_cast<std::size_t>(mmax + 1));
  // top two orders by series, the rest by the backward recurrence
  // I_{m-1} = I_{m+1} + (2m/s) I_m, which only adds nonnegative terms
  auto series = [&](int m) {
    Bound lead(1);
    for (int j = 1; j <= m; ++j) lead *= half / Bound(j);
    Bound term = lead, sum = lead;
    for (long k = 0;; ++k) {
      term *= q / Bound((k + 1) * (k + 1 + m));
      sum += term;
      Bound r = q / Bound((k + 2) * (k + 2 + m));
      if (r.hi_d() < 0.5) {
        Bound tail = (term * r / (Bound(1) - r)).upper();
        Bound rel = tail / clamp_nonneg(sum).upper();
        if (sum.certainly_positive() && rel.hi_d() < std::ldexp(1.0, -static_cast<int>(bits) - 8)) {
          sum += Bound(Bound(0), tail);
          break;
        }
        if (!sum.certainly_positive() && tail.hi_d() == 0.0) break;
      }
      if (k > 100000) fail("PrecisionNotReached", "Bessel series did not converge");
    }
    return sum;
  };
  if (s.hi_d() == 0.0) {
    for (int m = 0; m <= mmax; ++m) out[static_cast<std::size_t>(m)] = m == 0 ? Bound(1) : Bound(0);
    return out;
  }
  bool recur = s.certainly_positive() && mmax >= 2;
  if (!recur) {
    for (int m = 0; m <= mmax; ++m) out[static_cast<std::size_t>(m)] = es * series(m);
    return out;
  }
  std::vector<Bound> I(static_cast<std::size_t>(mmax + 1));
  I[static_cast<std::size_t>(mmax)] = series(mmax);
  I[static_cast<std::size_t>(mmax - 1)] = series(mmax - 1);
  for (int m = mmax - 1; m >= 1; --m)
    I[static_cast<std::size_t>(m - 1)] = I[static_cast<std::size_t>(m + 1)] + Bound(2 * m) / s * I[static_cast<std::size_t>(m)];
  for (int m = 0; m <= mmax; ++m) out[static_cast<std::size_t>(m)] = es * I[static_cast<std::size_t>(m)];
  return out;
}

BesselGreen::BesselGreen(int d, QuadratureConfig cfg) : d_(d), cfg_(cfg) {
  if (d < 3) fail("DimensionTooLow", "d = " + std::to_string(d) + " gives no finite I_{n,0}");
  if (cfg_.log2_cutoff < 1) fail("ConfigError", "cutoff exponent must be positive");
  if (std::ldexp(1.0, cfg_.log2_cutoff) < 2 * cfg_.tail_terms + 1)
    fail("ConfigError", "cutoff must be at least 2K+1 for the tail remainder");
  prefactor_.resize(static_cast<std::size_t>(nmax()));
  Bound pf(1);
  for (int n = 1; n <= nmax(); ++n) {
    pf *= Bound(d);
    if (n > 1) pf /= Bound(n - 1);
    prefactor_[static_cast<std::size_t>(n - 1)] = pf;
  }

  std::vector<Bound> gx, gw;
  gauss_legendre(cfg_.nodes, gx, gw);
  static const double kRho[] = {1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  std::vector<std::pair<Bound, Bound>> lam;
  for (double r : kRho) lam.emplace_back(Bound(r), chebyshev_defect(gx, gw, Bound(r)));

  // dyadic panels [0, 1/2], [1/2, 1], [1, 2], ..., up to the cutoff
  std::vector<Bound> edges{Bound(0), Bound::rational(1, 2), Bound(1)};
  for (int k = 1; k <= cfg_.log2_cutoff; ++k) edges.push_back(Bound(1L << k));
  cutoff_ = edges.back();
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    Panel P;
    P.a = edges[p];
    P.b = edges[p + 1];
    Bound c = (P.a + P.b) / Bound(2), h = (P.b - P.a) / Bound(2);
    for (int i = 0; i < cfg_.nodes; ++i) {
      P.s.push_back(c + h * gx[static_cast<std::size_t>(i)]);
      P.w.push_back(h * gw[static_cast<std::size_t>(i)]);
      P.sd.push_back(P.s.back().mid_d());
      P.wd.push_back(P.w.back().mid_d());
    }
    for (int n = 1; n <= nmax(); ++n) {
      Bound best;
      bool have = false;
      for (auto& [rho, L] : lam) {
        Bound alpha = h * (rho + Bound(1) / rho) / Bound(2);
        Bound M = (c + alpha).pow(n - 1) * g_upper(c - alpha).pow(d);
        Bound e = (prefactor_[static_cast<std::size_t>(n - 1)] * h * M * L).upper();
        if (!have || e.certainly_lt(best)) {
          best = e;
          have = true;
        }
      }
      P.err.push_back(best);
    }
    panels_.push_back(std::move(P));
  }
  diag_.cutoff = cutoff_.mid_d();
  diag_.panels = static_cast<int>(panels_.size());
  for (Panel& P : panels_) diag_.quadrature_error += P.err.empty() ? 0.0 : P.err[0].hi_d();
  ensure_m(std::max(cfg_.initial_mmax, 1));
}

void BesselGreen::ensure_m(int m) {
  if (m <= mmax_) return;
  const int top = std::max(m, 2 * std::max(mmax_, 1));
  // one job per (panel, node); results land in fixed slots so order of completion is irrelevant
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t p = 0; p < panels_.size(); ++p) {
    panels_[p].F.assign(static_cast<std::size_t>(top + 1), std::vector<Bound>(panels_[p].s.size()));
    panels_[p].Fd.assign(static_cast<std::size_t>(top + 1), std::vector<double>(panels_[p].s.size()));
    for (std::size_t i = 0; i < panels_[p].s.size(); ++i) jobs.emplace_back(p, i);
  }
  unsigned nt = cfg_.threads > 0 ? static_cast<unsigned>(cfg_.threads) : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, 16);
  const long bits = precision_bits();
  auto work = [&](unsigned t) {
    set_precision_bits(bits);
    for (std::size_t j = t; j < jobs.size(); j += nt) {
      auto [p, i] = jobs[j];
      std::vector<Bound> f = scaled_bessel_series(panels_[p].s[i], top);
      for (int k = 0; k <= top; ++k) {
        panels_[p].F[static_cast<std::size_t>(k)][i] = f[static_cast<std::size_t>(k)];
        panels_[p].Fd[static_cast<std::size_t>(k)][i] = f[static_cast<std::size_t>(k)].mid_d();
      }
    }
  };
  if (nt <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (int k = mmax_ + 1; k <= top; ++k) build_watson(k);
  mmax_ = top;
}

void BesselGreen::build_watson(int m) {
  const int K = cfg_.tail_terms;
  std::vector<mpz_class> tau = chebyshev_shift(m);
  Bound inv_sqrt_2pi = Bound(1) / sqrt(Bound(2) * Bound::pi());
  std::vector<Bound> p(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    mpq_class acc = 0;
    for (int k = 0; k <= std::min<int>(j, static_cast<int>(tau.size()) - 1); ++k) {
      int r = j - k;
      mpz_class den = 1;
      den <<= static_cast<mp_bitcnt_t>(3 * r);
      acc += mpq_class(tau[static_cast<std::size_t>(k)] * binom(static_cast<unsigned long>(2 * r), static_cast<unsigned long>(r)), den);
    }
    mpz_class fden = factorial(static_cast<unsigned long>(j));
    fden <<= static_cast<mp_bitcnt_t>(2 * j);
    acc *= mpq_class(factorial(static_cast<unsigned long>(2 * j)), fden);
    acc.canonicalize();
    p[static_cast<std::size_t>(j)] = inv_sqrt_2pi * Bound::from_mpq(acc);
  }
  // A_m = (1/pi) M_r r^{1-K}/(r-1) Gamma(K+1/2), r = 3/2, M_r = T_m(1+r)/sqrt(2-r)
  Bound r = Bound::rational(3, 2);
  mpq_class tm = 0, rq(3, 2), pw = 1;
  for (const mpz_class& t : tau) {
    tm += mpq_class(abs(t)) * pw;
    pw *= rq;
  }
  Bound Mr = Bound::from_mpq(tm) / sqrt(Bound(2) - r);
  Bound gK = sqrt(Bound::pi()) * Bound::from_mpq(mpq_class(factorial(static_cast<unsigned long>(2 * K)),
                                                          factorial(static_cast<unsigned long>(K)) * (mpz_class(1) << static_cast<mp_bitcnt_t>(2 * K))));
  Bound A = Mr * r.pow(1 - K) / (r - Bound(1)) * gK / Bound::pi();
  // B_m(S) = S^{1/2} e^{-S}/2 + sum_j |p_j| 2^{j+1/2} S^{-j} e^{-S/2}
  const Bound& S = cutoff_;
  Bound B = sqrt(S) * exp(-S) / Bound(2);
  Bound sq2 = sqrt(Bound(2));
  for (int j = 0; j < K; ++j)
    B += abs(p[static_cast<std::size_t>(j)]) * Bound(2).pow(j) * sq2 * S.pow(-j) * exp(-S / Bound(2));
  Bound eps = (A + S.pow(K) * B).upper();
  if (static_cast<int>(watson_.size()) <= m) {
    watson_.resize(static_cast<std::size_t>(m + 1));
    watson_eps_.resize(static_cast<std::size_t>(m + 1));
  }
  watson_[static_cast<std::size_t>(m)] = std::move(p);
  watson_eps_[static_cast<std::size_t>(m)] = eps;
}

std::vector<Bound> BesselGreen::values(const Coords& x_in) {
  if (static_cast<int>(x_in.size()) != d_) fail("DimensionMismatch", "point has wrong dimension");
  Coords x = canonicalize(x_in);
  ensure_m(x.empty() ? 0 : x[0]);
  std::map<int, int> mult;
  for (int v : x) ++mult[v];
  const int N = nmax();
  std::vector<Bound> out(static_cast<std::size_t>(N), Bound(0));

  // [0, S_T]
  for (const Panel& P : panels_) {
    std::vector<Bound> acc(static_cast<std::size_t>(N), Bound(0));
    for (std::size_t i = 0; i < P.s.size(); ++i) {
      Bound prod(1);
      for (auto& [m, k] : mult) prod *= P.F[static_cast<std::size_t>(m)][i].pow(k);
      Bound t = P.w[i] * prod;
      for (int n = 1; n <= N; ++n) {
        acc[static_cast<std::size_t>(n - 1)] += t;
        t *= P.s[i];
      }
    }
    for (int n = 1; n <= N; ++n) {
      const Bound& e = P.err[static_cast<std::size_t>(n - 1)];
      out[static_cast<std::size_t>(n - 1)] += prefactor_[static_cast<std::size_t>(n - 1)] * acc[static_cast<std::size_t>(n - 1)] + Bound(-e, e);
    }
  }

  // [S_T, inf): s^{d/2} prod F = prod (P_m(w) + delta_m), |delta_m| <= eps_m w^K, w = 1/s
  const std::size_t K = static_cast<std::size_t>(cfg_.tail_terms);
  Bound wT = Bound(1) / cutoff_;
  std::vector<Bound> Q{Bound(1)}, Qplus{Bound(1)};
  Bound full(1);
  for (auto& [m, k] : mult) {
    const std::vector<Bound>& p = watson_[static_cast<std::size_t>(m)];
    std::vector<Bound> pplus;
    for (const Bound& c : p) pplus.push_back(abs(c));
    Bound env = poly_eval(pplus, wT) + watson_eps_[static_cast<std::size_t>(m)] * wT.pow(static_cast<long>(K));
    for (int r = 0; r < k; ++r) {
      Q = poly_mul_trunc(Q, p, K);
      Qplus = poly_mul_trunc(Qplus, pplus, K);
      full *= env;
    }
  }
  Bound E = (full.upper() - poly_eval(Qplus, wT).lower()).upper();
  E = max(E, Bound(0));
  diag_.tail_error = (E * Bound(2) / Bound(static_cast<long>(2 * K) + d_ - 2)).hi_d();
  for (int n = 1; n <= N; ++n) {
    Bound t(0);
    for (std::size_t j = 0; j < K; ++j) {
      long twice = 2 * static_cast<long>(j) + d_ - 2 * n;  // 2(j + d/2 - n) > 0
      t += Q[j] * pow_half(cutoff_, 2L * n - d_ - 2 * static_cast<long>(j)) * Bound(2) / Bound(twice);
    }
    Bound r = E * pow_half(cutoff_, 2L * n - d_) * Bound(2) / Bound(2 * static_cast<long>(K) + d_ - 2 * n);
    t += Bound(-r, r);
    out[static_cast<std::size_t>(n - 1)] += prefactor_[static_cast<std::size_t>(n - 1)] * t;
  }
  for (int n = 1; n <= N; ++n) {
    const Bound& v = out[static_cast<std::size_t>(n - 1)];
    if (!v.finite() || v.width_d() > cfg_.target_width * std::max(1.0, std::fabs(v.mid_d())))
      fail("PrecisionNotReached", "I_{" + std::to_string(n) + ",0}(" + point_name(x) + ") width " +
                                      std::to_string(v.width_d()) + " exceeds target");
  }
  return out;
}

Bound BesselGreen::value(int n, const Coords& x) {
  if (n < 1 || 2 * n + 1 > d_)
    fail("DimensionTooLow", "d = " + std::to_string(d_) + " < 2n+1 with n = " + std::to_string(n));
  return values(x)[static_cast<std::size_t>(n - 1)];
}

std::vector<double> BesselGreen::values_fast(const Coords& x_in) {
  Coords x = canonicalize(x_in);
  ensure_m(x.empty() ? 0 : x[0]);
  const int N = nmax();
  std::vector<double> out(static_cast<std::size_t>(N), 0.0);
  for (const Panel& P : panels_) {
    std::vector<const double*> f;
    for (int v : x) f.push_back(P.Fd[static_cast<std::size_t>(v)].data());
    std::vector<double> spow(P.sd.size(), 1.0);
    double pf = 1;
    for (int n = 1; n <= N; ++n) {
      pf = prefactor_[static_cast<std::size_t>(n - 1)].mid_d();
      std::vector<const double*> g = f;
      g.push_back(spow.data());
      out[static_cast<std::size_t>(n - 1)] += pf * product_sum(P.wd.data(), g.data(), static_cast<int>(g.size()), P.sd.size());
      for (std::size_t i = 0; i < spow.size(); ++i) spow[i] *= P.sd[i];
    }
  }
  const std::size_t K = static_cast<std::size_t>(cfg_.tail_terms);
  std::vector<double> Q(K, 0.0);
  Q[0] = 1;
  for (int v : x) {
    const std::vector<Bound>& p = watson_[static_cast<std::size_t>(v)];
    std::vector<double> R(K, 0.0);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; i + j < K; ++j) R[i + j] += Q[i] * p[j].mid_d();
    Q = std::move(R);
  }
  const double S = cutoff_.mid_d();
  for (int n = 1; n <= N; ++n) {
    double t = 0;
    for (std::size_t j = 0; j < K; ++j) {
      double e = n - d_ / 2.0 - static_cast<double>(j);
      t += Q[j] * std::pow(S, e) / (-e);
    }
    out[static_cast<std::size_t>(n - 1)] += prefactor_[static_cast<std::size_t>(n - 1)].mid_d() * t;
  }
  return out;
}

std::string BesselGreen::policy() const {
  std::ostringstream os;
  os << "Gauss-Legendre " << cfg_.nodes << " nodes on " << panels_.size() << " dyadic panels up to s = "
     << cutoff_.mid_d() << " (t = d s), Bernstein-ellipse remainder; tail from " << cfg_.tail_terms
     << "-term large-s expansion with explicit remainder";
  return os.str();
}

BesselGreen& bessel_engine(int d) {
  static std::map<std::pair<int, long>, std::unique_ptr<BesselGreen>> engines;
  std::lock_guard<std::mutex> lock(g_engine_mutex);
  auto key = std::make_pair(d, precision_bits());
  auto it = engines.find(key);
  if (it == engines.end()) it = engines.emplace(key, std::make_unique<BesselGreen>(d)).first;
  return *it->second;
}

Bound bessel_green(int d, int n, const Coords& x) {
  if (n == 0) {
    for (int v : x)
      if (v != 0) return Bound(0);
    return Bound(1);
  }
  if (n < 0) fail("DomainError", "n must be nonnegative");
  if (d < 2 * n + 1)
    fail("DimensionTooLow", "d = " + std::to_string(d) + " < 2n+1 with n = " + std::to_string(n));
  BesselGreen& g = bessel_engine(d);
  std::lock_guard<std::mutex> lock(g_engine_mutex);
  return g.value(n, x);
}

}  // namespace noble
