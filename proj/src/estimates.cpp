#include "torus_wave/estimates.hpp"

#include <algorithm>
#include <cmath>

#include "torus_wave/error.hpp"
#include "torus_wave/torus_field.hpp"

namespace tw {

TimeSeries gronwall_bound(const TimeSeries& a, const TimeSeries& f, double g0, double t0) {
  if (a.t.size() != a.v.size() || f.t.size() != f.v.size() || a.t != f.t) {
    throw ParameterError("gronwall_bound: coefficient series must share one time grid");
  }
  const auto& t = a.t;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ParameterError("gronwall_bound: times must be increasing");
  }
  const auto it = std::find_if(t.begin(), t.end(), [&](double x) {
    return std::abs(x - t0) <= 1e-12 * std::max(1.0, std::abs(t0));
  });
  if (it == t.end()) throw ParameterError("gronwall_bound: t0 is not a sample time");
  const std::size_t start = static_cast<std::size_t>(it - t.begin());

  TimeSeries out;
  out.t.assign(t.begin() + static_cast<std::ptrdiff_t>(start), t.end());
  out.v.reserve(out.t.size());
  double homogeneous = g0;
  double forced = 0.0;
  out.v.push_back(g0);
  for (std::size_t j = start + 1; j < t.size(); ++j) {
    const double h = t[j] - t[j - 1];
    const double growth = std::exp(0.5 * h * (a.v[j - 1] + a.v[j]));
    homogeneous *= growth;
    forced = growth * forced + 0.5 * h * (growth * f.v[j - 1] + f.v[j]);
    out.v.push_back(homogeneous + forced);
  }
  return out;
}

double derivative_bound(double mu, int l, double delta_prime) {
  double falling = 1.0;
  for (int j = 0; j < l; ++j) falling *= (mu - j);
  falling = std::abs(falling);
  // |(1+x)^{mu-l}| is largest at x = +delta' when mu >= l, at x = -delta' otherwise.
  const double base = mu >= l ? 1.0 + delta_prime : 1.0 - delta_prime;
  return falling * std::pow(base, mu - l);
}

double fractional_constant(int m, double mu, double delta_prime, std::span<const double> moser) {
  if (m < 1) throw ParameterError("fractional_constant: m must be >= 1");
  if (!(delta_prime > 0.0 && delta_prime < 1.0)) {
    throw ParameterError("fractional_constant: delta' must lie in (0, 1)");
  }
  if (moser.size() < static_cast<std::size_t>(m)) {
    throw ParameterError("fractional_constant: need one Moser constant per order 1..m");
  }
  // L^2 part: |(1+u)^mu - 1| <= M_mu |u| pointwise.
  const double m_mu = derivative_bound(mu, 1, delta_prime);
  double total = m_mu;
  double m_k = 0.0;
  for (int k = 1; k <= m; ++k) {
    m_k = std::max(m_k, derivative_bound(mu, k, delta_prime) * std::pow(1.0 + delta_prime, k - 1));
    const double count = (k + 1) * (k + 2) / 2.0;  // multi-indices with |alpha| = k
    total += std::sqrt(count) * moser[static_cast<std::size_t>(k - 1)] * m_k;
  }
  return total;
}

double h_threshold(double omega, double t1) {
  if (!(omega > 0.0 && omega < 1.0)) {
    throw ParameterError("h_threshold: requires 0 < omega < 1 (otherwise no admissible eps' exists)");
  }
  if (!(t1 > 0.0)) throw ParameterError("h_threshold: T1 must be > 0");
  return -std::expm1(-omega * t1) * (1.0 - omega);
}

double g_function(double t, double omega, double eps_prime) {
  if (!(t > 0.0)) throw DomainError("g_function: t must be > 0");
  if (!(omega > 0.0 && omega < 1.0)) throw ParameterError("g_function: requires 0 < omega < 1");
  return (1.0 - omega) - eps_prime / (-std::expm1(-omega * t));
}

double g_function_quotient(double t, double omega, double eps_prime) {
  if (!(t > 0.0)) throw DomainError("g_function_quotient: t must be > 0");
  if (!(omega > 0.0 && omega < 1.0)) throw ParameterError("g_function_quotient: requires 0 < omega < 1");
  const double em1 = std::expm1(omega * t);
  // e^{wt}(1 - eps' - w) - (1 - w) = em1 (1 - eps' - w) - eps'
  return (em1 * (1.0 - eps_prime - omega) - eps_prime) / em1;
}

std::pair<double, double> epsilon_budgets(const BootstrapParams& p, double omega) {
  if (!(p.e_m0 > 0.0)) throw ParameterError("epsilon_budgets: E_m(0) must be > 0");
  if (!(p.c_delta > 0.0)) throw ParameterError("epsilon_budgets: C(delta) must be > 0");
  if (!(p.eps_prime > 0.0 && p.eps_prime < 1.0)) throw ParameterError("epsilon_budgets: eps' must lie in (0, 1)");
  const double h = h_threshold(omega, p.t1);
  if (!(p.eps_prime < h)) {
    throw ParameterError("epsilon_budgets: eps' >= h(T1), so g(T1) <= 0 and no source amplitude is admissible");
  }
  const double g = g_function(p.t1, omega, p.eps_prime);
  const double eps1 = std::max(0.0, omega * g * p.e_m0 / (std::sqrt(2.0) * p.c_delta));
  const double inner = 2.0 * (p.eps_prime - 0.75 * p.eps_prime * p.eps_prime);
  const double eps2 = inner > 0.0 ? 2.0 * omega / p.c_delta * std::sqrt(inner) * p.e_m0 : 0.0;
  return {eps1, eps2};
}

double source_constant(double algebra, double fractional, double e_m0) {
  return algebra * (fractional * std::sqrt(2.0) * e_m0 + std::pow(kTwoPi, 1.5));
}

}  // namespace tw
