#include "noble/aggregation.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "noble/error.hpp"

namespace noble {

namespace {

using MatLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using CMat = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
using CVec = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>;
using cld = std::complex<long double>;

MatLd to_ld(const BoundMatrix& M) {
  const Eigen::Index n = static_cast<Eigen::Index>(M.size());
  MatLd R(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) R(i, j) = M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].mid_ld();
  return R;
}

CVec to_cvec(const BoundVector& v) {
  CVec r(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<Eigen::Index>(i)) = v[i].mid_ld();
  return r;
}

BoundVector matvec(const BoundMatrix& M, const BoundVector& x) {
  BoundVector y(x.size(), Bound(0));
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += M[i][j] * x[j];
  return y;
}

Bound dot(const BoundVector& a, const BoundVector& b) {
  Bound s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool parity_ok(Parity p, int N) {
  if (p == Parity::all) return true;
  return (N % 2 == 0) == (p == Parity::even);
}

long double sup_norm(const MatLd& M) {
  long double best = 0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) best = std::max(best, M.row(i).cwiseAbs().sum());
  return best;
}

long double sup_norm(const CMat& M) {
  long double best = 0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    long double s = 0;
    for (Eigen::Index j = 0; j < M.cols(); ++j) s += std::abs(M(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

void MatrixBoundSpec::validate() const {
  auto sq = [&](const BoundMatrix& M, const char* name, bool optional) {
    if (optional && M.empty()) return;
    if (static_cast<int>(M.size()) != n) fail("ShapeMismatch", std::string(name) + " has wrong row count");
    for (auto& r : M)
      if (static_cast<int>(r.size()) != n) fail("ShapeMismatch", std::string(name) + " has wrong column count");
  };
  if (n < 1) fail("ShapeMismatch", "matrix order must be positive");
  sq(B, "B", false);
  sq(C, "C", true);
  if (static_cast<int>(v.size()) != n || static_cast<int>(w.size()) != n)
    fail("ShapeMismatch", "v and w must have n entries");
  if (!h.empty() && static_cast<int>(h.size()) != n) fail("ShapeMismatch", "h must have n entries");
  for (auto& r : B)
    for (auto& e : r)
      if (!e.certainly_nonneg()) fail("DomainError", "B must be entrywise nonnegative");
  if (!alpha.certainly_nonneg() || !beta.certainly_nonneg()) fail("DomainError", "weight alpha N + beta needs alpha, beta >= 0");
}

Parity parity_from_string(const std::string& s) {
  if (s == "all" || s == "abs") return Parity::all;
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  fail("SyntaxError", "unknown parity '" + s + "'");
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::all:
      return "abs";
    case Parity::even:
      return "even";
    case Parity::odd:
      return "odd";
  }
  return "?";
}

EigenSplit eigen_split(const MatrixBoundSpec& spec, long double tol) {
  spec.validate();
  MatLd B = to_ld(spec.B);
  Eigen::EigenSolver<MatLd> solver(B, true);
  if (solver.info() != Eigen::Success) fail("NotDiagonalizable", "eigen solver did not converge");
  CMat Z = solver.eigenvectors();
  CVec lam = solver.eigenvalues();
  const Eigen::Index n = B.rows();
  Eigen::FullPivLU<CMat> lu(Z);
  if (!lu.isInvertible()) fail("NotDiagonalizable", "eigenvector matrix is singular");
  CMat W = lu.inverse();  // rows are left eigenvectors, W Z = I

  EigenSplit es;
  es.condition = sup_norm(Z) * sup_norm(W);
  if (!(es.condition < 1e10L)) fail("NotDiagonalizable", "eigenbasis condition number too large");
  long double bn = std::max(sup_norm(B), 1e-300L);
  CMat Bc = B.cast<cld>();
  for (Eigen::Index i = 0; i < n; ++i) {
    CVec r = Bc * Z.col(i) - lam(i) * Z.col(i);
    long double res = r.cwiseAbs().maxCoeff() / (Z.col(i).cwiseAbs().maxCoeff() * bn);
    es.residual = std::max(es.residual, res);
    es.spectral_radius = std::max(es.spectral_radius, std::abs(lam(i)));
    if (std::fabs(lam(i).imag()) > tol * std::max(1.0L, std::abs(lam(i)))) es.complex_spectrum = true;
  }
  if (es.residual > tol) {
    if (es.complex_spectrum) fail("ComplexSpectrumBeyondTolerance", "complex eigenpairs fail the residual check");
    fail("NotDiagonalizable", "eigen residual above tolerance");
  }
  if (es.spectral_radius >= 1) fail("SpectralRadiusAtLeastOne", "spectral radius of B is not below 1");

  CVec v = to_cvec(spec.v), w = to_cvec(spec.w);
  CVec vs = CVec::Zero(n), ws = CVec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    es.lambda.push_back(lam(i));
    cld r = v.transpose() * Z.col(i);
    cld b = W.row(i) * w;
    std::vector<cld> vi(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      vi[static_cast<std::size_t>(j)] = r * W(i, j);
      wi[static_cast<std::size_t>(j)] = b * Z(j, i);
      vs(j) += vi[static_cast<std::size_t>(j)];
      ws(j) += wi[static_cast<std::size_t>(j)];
    }
    es.v_i.push_back(std::move(vi));
    es.w_i.push_back(std::move(wi));
  }
  es.reconstruction = (vs - v).cwiseAbs().maxCoeff() + (ws - w).cwiseAbs().maxCoeff();
  return es;
}

long double closed_form_sum(const MatrixBoundSpec& spec, const EigenSplit& es, Parity parity, bool weighted) {
  const std::size_t n = es.lambda.size();
  auto dotc = [](const std::vector<cld>& a, const CVec& b) {
    cld s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b(static_cast<Eigen::Index>(i));
    return s;
  };
  CVec v = to_cvec(spec.v);
  if (!weighted) {
    cld s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cld l = es.lambda[i];
      cld vw = dotc(es.w_i[i], v);
      if (parity == Parity::all) s += vw / (1.0L - l);
      if (parity == Parity::even) s += vw / (1.0L - l * l);
      if (parity == Parity::odd) s += vw * l / (1.0L - l * l);
    }
    return s.real();
  }
  const long double a = spec.alpha.mid_ld(), b = spec.beta.mid_ld();
  CVec h = spec.h.empty() ? CVec::Zero(static_cast<Eigen::Index>(n)) : to_cvec(spec.h);
  MatLd Cm = spec.C.empty() ? MatLd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) : to_ld(spec.C);
  // sum_N (aN + b) l^N and its C-term analogue; sign flips give the parity parts
  auto S = [&](long double sg) {
    cld s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cld l = sg * es.lambda[i];
      cld g = a * l / ((1.0L - l) * (1.0L - l)) + b / (1.0L - l);
      s += (dotc(es.w_i[i], h) + dotc(es.v_i[i], h)) * g;
    }
    return s;
  };
  auto T = [&](long double sg) {
    cld s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        cld li = sg * es.lambda[i], lj = sg * es.lambda[j];
        cld vCw = 0;
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q)
            vCw += es.v_i[i][p] * Cm(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) * es.w_i[j][q];
        cld c = a * (li / ((1.0L - li) * (1.0L - li) * (1.0L - lj)) + lj / ((1.0L - li) * (1.0L - lj) * (1.0L - lj))) +
                (a + b) / ((1.0L - li) * (1.0L - lj));
        s += vCw * c;
      }
    return s;
  };
  cld r;
  switch (parity) {
    case Parity::all:
      r = S(1) + T(1);
      break;
    case Parity::even:
      r = (S(1) + S(-1)) / 2.0L + (T(1) - T(-1)) / 2.0L;
      break;
    case Parity::odd:
      r = (S(1) - S(-1)) / 2.0L + (T(1) + T(-1)) / 2.0L;
      break;
  }
  return r.real();
}

Bound partial_sum(const MatrixBoundSpec& spec, Parity parity, bool weighted, int K) {
  spec.validate();
  const std::size_t n = static_cast<std::size_t>(spec.n);
  BoundVector x = spec.w;
  BoundVector y(n, Bound(0));
  BoundVector p = spec.h.empty() ? BoundVector(n, Bound(0)) : spec.h;
  BoundMatrix C = spec.C.empty() ? BoundMatrix(n, BoundVector(n, Bound(0))) : spec.C;
  Bound s(0);
  for (int N = 0; N < K; ++N) {
    if (parity_ok(parity, N)) {
      if (!weighted) {
        s += dot(spec.v, x);
      } else {
        Bound wN = spec.alpha * Bound(N) + spec.beta;
        Bound t = dot(spec.v, y) + dot(spec.v, p);
        if (!spec.h.empty()) t += dot(spec.h, x);
        s += wN * t;
      }
    }
    if (weighted) {
      BoundVector y2 = matvec(spec.B, y), cx = matvec(C, x);
      for (std::size_t i = 0; i < n; ++i) y2[i] += cx[i];
      y = std::move(y2);
      p = matvec(spec.B, p);
    }
    x = matvec(spec.B, x);
  }
  return s;
}

GeometricSum geometric_sum(const MatrixBoundSpec& spec, Parity parity, bool weighted, double rel_tol) {
  spec.validate();
  if (weighted && spec.C.empty() && spec.h.empty()) fail("ShapeMismatch", "weighted sum needs h or C");
  const std::size_t n = static_cast<std::size_t>(spec.n);
  GeometricSum out;
  EigenSplit es = eigen_split(spec);
  out.closed_form = closed_form_sum(spec, es, parity, weighted);

  // positive test vector: Perron vector of B plus a small floor
  MatLd B = to_ld(spec.B);
  Eigen::Matrix<long double, Eigen::Dynamic, 1> u = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Ones(spec.n);
  for (int it = 0; it < 200; ++it) {
    Eigen::Matrix<long double, Eigen::Dynamic, 1> nu = B * u;
    long double m = nu.maxCoeff();
    if (!(m > 0)) break;
    u = nu / m;
  }
  long double umax = u.maxCoeff();
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = std::max(u(i), 0.0L) + 1e-6L * std::max(umax, 1.0L);
  BoundVector ub(n);
  for (std::size_t i = 0; i < n; ++i) ub[i] = Bound(static_cast<double>(u(static_cast<Eigen::Index>(i))));

  auto upnorm = [&](const BoundVector& x) {  // max |x_i| / u_i
    Bound m(0);
    for (std::size_t i = 0; i < n; ++i) m = max(m, abs(x[i]) / ub[i]);
    return m.upper();
  };
  auto mat_u = [&](const BoundMatrix& M) {  // max_i (|M| u)_i / u_i
    Bound m(0);
    for (std::size_t i = 0; i < n; ++i) {
      Bound s(0);
      for (std::size_t j = 0; j < n; ++j) s += abs(M[i][j]) * ub[j];
      m = max(m, s / ub[i]);
    }
    return m.upper();
  };
  auto udot = [&](const BoundVector& x) {
    Bound s(0);
    for (std::size_t i = 0; i < n; ++i) s += abs(x[i]) * ub[i];
    return s.upper();
  };
  Bound r = mat_u(spec.B);
  out.ratio = r;
  if (!r.certainly_lt(Bound(1))) fail("SpectralRadiusAtLeastOne", "no contraction certificate for B (ratio " + r.str(6) + ")");

  BoundVector zero(n, Bound(0));
  const BoundVector& h = spec.h.empty() ? zero : spec.h;
  Bound A0 = udot(spec.v) * upnorm(spec.w);
  Bound A1 = udot(h) * upnorm(spec.w) + udot(spec.v) * upnorm(h);
  Bound A2 = spec.C.empty() ? Bound(0) : udot(spec.v) * mat_u(spec.C) * upnorm(spec.w);
  Bound one(1);
  auto tail_at = [&](int K) {
    Bound q = one - r;
    Bound rK = r.pow(K);
    if (!weighted) return (A0 * rK / q).upper();
    Bound S0 = rK / q;
    Bound S1 = rK * (Bound(K) * q + r) / q.square();
    Bound rK1 = K >= 1 ? r.pow(K - 1) : Bound(0);
    Bound T1 = rK1 * (Bound(K) * q + r) / q.square();
    Bound T2 = rK1 * (Bound(K).square() * q.square() + Bound(2) * Bound(K) * r * q + r * (one + r)) / q.pow(3);
    Bound t = spec.alpha * A1 * S1 + spec.beta * A1 * S0 + spec.alpha * A2 * T2 + spec.beta * A2 * T1;
    return t.upper();
  };
  double scale = std::max(std::fabs(static_cast<double>(out.closed_form)), 1e-300);
  int K = 8;
  while (K < 200000 && tail_at(K).hi_d() > rel_tol * scale) K *= 2;
  // tighten: smallest K in (K/2, K] meeting the tolerance
  int lo = K / 2, hi = K;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (tail_at(mid).hi_d() > rel_tol * scale)
      lo = mid;
    else
      hi = mid;
  }
  K = std::max(hi, 2);
  out.terms = K;
  out.tail = tail_at(K);
  out.value = partial_sum(spec, parity, weighted, K) + Bound(Bound(0), out.tail);
  double w = out.value.width_d();
  double mid = out.value.mid_d();
  out.closed_form_inside = std::fabs(static_cast<double>(out.closed_form) - mid) <= w / 2 + 1e-14 * std::fabs(mid);
  return out;
}

Bound scalar_series_sum(const std::vector<Bound>& seq, Parity parity, const std::optional<TailDescriptor>& tail) {
  Bound s(0);
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (parity_ok(parity, static_cast<int>(i))) s += seq[i];
  if (!tail) return s;
  const Bound& q = tail->ratio;
  if (!q.certainly_nonneg() || !q.certainly_lt(Bound(1)))
    fail("TailRatioNotContractive", "tail ratio " + q.str(6) + " is not in [0, 1)");
  int start = tail->start >= 0 ? tail->start : static_cast<int>(seq.size());
  if (start < static_cast<int>(seq.size())) fail("ConfigError", "tail must start after the listed entries");
  Bound anchor;
  if (tail->anchor)
    anchor = abs(*tail->anchor);
  else if (!seq.empty())
    anchor = abs(seq.back()) * q.pow(start - static_cast<int>(seq.size()) + 1);
  else
    fail("TailRatioNotContractive", "tail without anchor on an empty sequence");
  // entries a_N <= anchor q^{N-start} for N >= start
  Bound t;
  if (parity == Parity::all) {
    t = anchor / (Bound(1) - q);
  } else {
    bool first_matches = parity_ok(parity, start);
    Bound lead = first_matches ? anchor : anchor * q;
    t = lead / (Bound(1) - q.square());
  }
  bool nonneg = std::all_of(seq.begin(), seq.end(), [](const Bound& b) { return b.certainly_nonneg(); });
  return s + Bound(nonneg ? Bound(0) : -t.upper(), t.upper());
}

}  // namespace noble
