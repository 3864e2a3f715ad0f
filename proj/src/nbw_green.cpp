#include "noble/nbw_green.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "noble/error.hpp"
#include "noble/srw_table.hpp"

namespace noble {

Bound dsin(const std::vector<Bound>& k) {
  std::vector<Bound> k2;
  for (const Bound& v : k) k2.push_back(Bound(2) * v);
  return (Bound(1) - dhat(k2)) / Bound(2 * static_cast<long>(k.size()));
}

Bound srw_twopoint_dhat(int d, const Bound& z, const Bound& D) {
  Bound den = Bound(1) - Bound(2 * d) * z * D;
  if (!den.certainly_positive()) fail("PoleOrBeyond", "1 - 2dz D(k) is not positive: " + den.str(6));
  return Bound(1) / den;
}

Bound srw_twopoint_k(int d, const Bound& z, const std::vector<Bound>& k) {
  if (static_cast<int>(k.size()) != d) fail("DimensionMismatch", "k has wrong dimension");
  return srw_twopoint_dhat(d, z, dhat(k));
}

Bound nbw_twopoint_dhat(int d, const Bound& z, const Bound& D) {
  Bound z2 = z.square();
  Bound den = Bound(1) + Bound(2 * d - 1) * z2 - Bound(2 * d) * z * D;
  if (!den.certainly_positive()) fail("PoleOrBeyond", "NBW denominator is not positive: " + den.str(6));
  return (Bound(1) - z2) / den;
}

Bound nbw_twopoint_k(int d, const Bound& z, const std::vector<Bound>& k) {
  if (static_cast<int>(k.size()) != d) fail("DimensionMismatch", "k has wrong dimension");
  return nbw_twopoint_dhat(d, z, dhat(k));
}

Bound chi_srw(int d, const Bound& z) { return srw_twopoint_dhat(d, z, Bound(1)); }
Bound chi_nbw(int d, const Bound& z) { return nbw_twopoint_dhat(d, z, Bound(1)); }

Bound srw_series_dhat(int d, const Bound& z, const Bound& D, int N) {
  Bound q = Bound(2 * d) * z * D;
  Bound s(0), p(1);
  for (int n = 0; n <= N; ++n) {
    s += p;
    p *= q;
  }
  Bound aq = abs(q);
  if (!(Bound(1) - aq).certainly_positive()) fail("PoleOrBeyond", "series ratio not below 1");
  Bound tail = abs(p) / (Bound(1) - aq);
  return s + Bound(-tail.upper(), tail.upper());
}

Bound nbw_critical_x(IntegralTable& t, const Coords& x) {
  int d = t.dim();
  return Bound(2 * d - 2) / Bound(2 * d - 1) * t.I(1, 0, x);
}

LambdaLink lambda_link(const Bound& mu, const Bound& psi, const Bound& pi_row) {
  Bound den = Bound(1) + pi_row - mu * psi;
  if (den.contains_zero()) fail("DenominatorContainsZero", "1 + pi - mu psi = " + den.str(6));
  Bound lambda = (Bound(1) + psi) * mu / den;
  if (lambda.contains_zero()) fail("DenominatorContainsZero", "lambda encloses 0");
  Bound den2 = (Bound(1) + psi) / lambda + psi;
  if (den2.contains_zero()) fail("DenominatorContainsZero", "(1+psi)/lambda + psi = " + den2.str(6));
  return {lambda, (Bound(1) + pi_row) / den2};
}

double lambda_link_residual(int d, double mu, double psi_val, double pi_same, double pi_opp, double pi_orth,
                            double phi0) {
  const int n = 2 * d;
  // directions ordered e1..ed, -e1..-ed
  auto opposite = [d](int i) { return i < d ? i + d : i - d; };
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    M(i, opposite(i)) += mu;
    for (int j = 0; j < n; ++j) M(i, j) += i == j ? pi_same : j == opposite(i) ? pi_opp : pi_orth;
  }
  Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  double q = one.dot(M.lu().solve(one));
  double G0 = phi0 / (1.0 - mu * (1.0 + psi_val) * q);
  double pi_row = pi_same + pi_opp + (n - 2) * pi_orth;
  LambdaLink L = lambda_link(Bound(mu), Bound(psi_val), Bound(pi_row));
  double B = chi_nbw(d, L.lambda).mid_d();
  return std::fabs(B * phi0 - G0);
}

}  // namespace noble
