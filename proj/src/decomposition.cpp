#include "noble/decomposition.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "noble/error.hpp"

namespace noble {

namespace {

struct Expanded {
  std::vector<std::pair<Coords, double>> pts;  // every lattice point of the support
};

Expanded expand(const std::vector<std::pair<Coords, double>>& f) {
  Expanded e;
  for (auto& [x, v] : f)
    for (auto& y : orbit_points(x)) e.pts.emplace_back(y, v);
  return e;
}

double dot(const std::vector<double>& k, const Coords& y) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += k[i] * y[i];
  return s;
}

struct FourierData {
  double value = 0;
  std::vector<double> grad;
  double laplacian = 0;
};

FourierData fourier(const Expanded& e, const std::vector<double>& k) {
  FourierData f;
  f.grad.assign(k.size(), 0.0);
  for (auto& [y, v] : e.pts) {
    double t = dot(k, y);
    double c = std::cos(t), s = std::sin(t);
    f.value += v * c;
    double n2 = 0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      f.grad[j] -= v * y[j] * s;
      n2 += double(y[j]) * y[j];
    }
    f.laplacian -= v * n2 * c;
  }
  return f;
}

struct Model {
  const SyntheticRewrite& s;
  Expanded RF, RP;
  double RF0 = 0;

  explicit Model(const SyntheticRewrite& m) : s(m), RF(expand(m.R_F)), RP(expand(m.R_phi)) {
    RF0 = fourier(RF, std::vector<double>(static_cast<std::size_t>(m.d), 0.0)).value;
  }

  double one_minus_F(const std::vector<double>& k) const {
    return 1 - s.c_F - s.alpha_F * dhat(k) - fourier(RF, k).value;
  }
  double G(const std::vector<double>& k) const {
    double D = dhat(k);
    double phi = s.c_phi + s.alpha_phi * D + fourier(RP, k).value;
    return phi / (1 - s.c_F - s.alpha_F * D - fourier(RF, k).value);
  }
};

void canonical_ball(int d, int radius, std::vector<Coords>& out) {
  Coords cur;
  std::function<void(int, int)> rec = [&](int left, int maxpart) {
    Coords x = cur;
    x.resize(static_cast<std::size_t>(d), 0);
    out.push_back(x);
    if (static_cast<int>(cur.size()) == d) return;
    for (int p = std::min(left, maxpart); p >= 1; --p) {
      cur.push_back(p);
      rec(left - p, p);
      cur.pop_back();
    }
  };
  rec(radius, radius);
}

}  // namespace

SyntheticRewrite random_synthetic(int d, std::uint64_t seed, int radius, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SyntheticRewrite s;
  s.d = d;
  s.c_phi = 1.0 + 0.2 * u(rng);
  s.alpha_phi = 0.1 * u(rng);
  s.alpha_F = 1.0 + 0.2 * u(rng);
  double gap = 0.35 + 0.15 * u(rng);  // 1 - c_F - alpha_F
  s.c_F = 1 - s.alpha_F - gap;
  std::vector<Coords> pts;
  canonical_ball(d, radius, pts);
  for (const Coords& x : pts) {
    double w = amp / orbit_size(x).get_d();
    s.R_F.emplace_back(x, w * u(rng));
    s.R_phi.emplace_back(x, w * u(rng));
  }
  return s;
}

DecompositionTerms decomposition_terms(const SyntheticRewrite& s, const std::vector<double>& k, double h) {
  Model m(s);
  int d = s.d;
  DecompositionTerms t;
  double D = dhat(k);
  double Dsin = dhat_sin(k);
  FourierData rf = fourier(m.RF, k), rp = fourier(m.RP, k);
  double omF = 1 - s.c_F - s.alpha_F * D - rf.value;
  double F0 = s.c_F + s.alpha_F + m.RF0;
  double phi = s.c_phi + s.alpha_phi * D + rp.value;
  double G = phi / omF;
  double Cs = 1 / (1 - F0 + s.alpha_F * (1 - D));
  double RF0k = m.RF0 - rf.value;
  double E = RF0k * Cs / omF;
  double Ms = D - 2 * Dsin * Cs;
  double aF = s.alpha_F, aP = s.alpha_phi;
  double lead = aF * (s.c_phi + aP * D);

  t.G = G;
  t.H[0] = (lead * Cs + aP) * Cs * Ms;
  t.H[1] = -(lead * (Cs + 1 / omF) + aP) * E * Ms + aF * rp.value / (omF * omF) * Ms;
  t.H[2] = 2 * Dsin / omF * (aF * G + aP) * (E - (aF - 1) / omF);
  t.H[3] = -rp.laplacian / omF - rf.laplacian / omF * G;
  double s1 = 0, s2 = 0;
  for (int j = 0; j < d; ++j) {
    double dD = -std::sin(k[j]) / d;
    double dPhi = aP * dD + rp.grad[j];
    s1 += rf.grad[j] * rf.grad[j] + 2 * aF * dD * rf.grad[j];
    s2 += rp.grad[j] * aF * dD + dPhi * rf.grad[j];
  }
  t.H[4] = -2 * s1 / (omF * omF) * G - 2 / (omF * omF) * s2;

  double lap = 0;
  for (int j = 0; j < d; ++j) {
    auto at = [&](double off) {
      std::vector<double> q = k;
      q[j] += off;
      return m.G(q);
    };
    lap += (-at(2 * h) + 16 * at(h) - 30 * G + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
  }
  t.minus_laplacian_fd = -lap;
  double sum = t.H[0] + t.H[1] + t.H[2] + t.H[3] + t.H[4];
  t.residual = std::fabs(sum - t.minus_laplacian_fd);
  return t;
}

DecompositionResult decomposition_check(const SyntheticRewrite& s, const std::vector<std::vector<double>>& ks,
                                        double h, double pole_tol) {
  Model m(s);
  DecompositionResult r;
  r.min_distance_to_pole = INFINITY;
  for (const auto& k : ks) {
    if (static_cast<int>(k.size()) != s.d) fail("DimensionMismatch", "k-sample has wrong dimension");
    for (int j = -1; j < s.d; ++j)
      for (double off : {-2 * h, -h, h, 2 * h}) {
        std::vector<double> q = k;
        if (j >= 0) q[static_cast<std::size_t>(j)] += off;
        double g = std::fabs(m.one_minus_F(q));
        r.min_distance_to_pole = std::min(r.min_distance_to_pole, g);
        if (g < pole_tol) fail("SyntheticPoleTooClose", "|1 - F(k)| = " + std::to_string(g) + " below tolerance");
      }
    r.samples.push_back(decomposition_terms(s, k, h));
    r.max_residual = std::max(r.max_residual, r.samples.back().residual);
  }
  return r;
}

}  // namespace noble
