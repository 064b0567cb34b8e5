#include "mcflab/jet.hpp"

#include <algorithm>
#include <cmath>

#include "mcflab/error.hpp"

namespace mcflab {

Jet::Jet(int size, double value) : m_(size) {
  if (size < 1 || size > kCap) throw PreconditionError("rotsym_flow", "jet", "jet size out of range");
  c_[0] = value;
}

Jet Jet::variable(int size, double x0) {
  Jet j(size, x0);
  if (size > 1) j.c_[1] = 1.0;
  return j;
}

double Jet::derivative(int k) const {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return c_[k] * f;
}

Jet Jet::truncated(int size) const {
  Jet r = *this;
  for (int k = size; k < m_; ++k) r.c_[k] = 0.0;
  r.m_ = std::min(size, m_);
  return r;
}

Jet Jet::diff() const {
  Jet r(std::max(1, m_ - 1));
  for (int k = 0; k + 1 < m_; ++k) r.c_[k] = (k + 1) * c_[k + 1];
  return r;
}

Jet Jet::integral(double c0) const {
  Jet r(std::min(kCap, m_ + 1), c0);
  for (int k = 1; k < r.m_; ++k) r.c_[k] = c_[k - 1] / k;
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  m_ = std::min(m_, o.m_);
  for (int k = 0; k < m_; ++k) c_[k] += o.c_[k];
  for (int k = m_; k < kCap; ++k) c_[k] = 0.0;
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  m_ = std::min(m_, o.m_);
  for (int k = 0; k < m_; ++k) c_[k] -= o.c_[k];
  for (int k = m_; k < kCap; ++k) c_[k] = 0.0;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (int k = 0; k < m_; ++k) c_[k] *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(std::min(a.m_, b.m_));
  for (int k = 0; k < r.m_; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
    r.c_[k] = s;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  Jet q(std::min(a.m_, b.m_));
  for (int k = 0; k < q.m_; ++k) {
    double s = a.c_[k];
    for (int i = 1; i <= k; ++i) s -= b.c_[i] * q.c_[k - i];
    q.c_[k] = s / b.c_[0];
  }
  return q;
}

Jet operator/(double s, const Jet& b) { return Jet(b.size(), s) / b; }

Jet sqrt(const Jet& a) {
  Jet s(a.size(), std::sqrt(a[0]));
  for (int k = 1; k < a.size(); ++k) {
    double t = a[k];
    for (int i = 1; i < k; ++i) t -= s[i] * s[k - i];
    s[k] = t / (2.0 * s[0]);
  }
  return s;
}

void sincos(const Jet& a, Jet& s, Jet& c) {
  s = Jet(a.size(), std::sin(a[0]));
  c = Jet(a.size(), std::cos(a[0]));
  for (int k = 1; k < a.size(); ++k) {
    double ss = 0.0, cc = 0.0;
    for (int j = 1; j <= k; ++j) {
      ss += j * a[j] * c[k - j];
      cc -= j * a[j] * s[k - j];
    }
    s[k] = ss / k;
    c[k] = cc / k;
  }
}

Jet sin(const Jet& a) {
  Jet s, c;
  sincos(a, s, c);
  return s;
}

Jet cos(const Jet& a) {
  Jet s, c;
  sincos(a, s, c);
  return c;
}

Jet compose(const Jet& f, const Jet& g) {
  const int m = std::min(f.size(), g.size());
  Jet r(m, f[m - 1]);
  Jet gg = g;
  gg[0] = 0.0;
  for (int i = m - 2; i >= 0; --i) r = r * gg.truncated(m) + f[i];
  return r;
}

Jet reverse(const Jet& g) {
  const int m = g.size();
  if (m < 2 || g[1] == 0.0) throw PreconditionError("rotsym_flow", "jet", "series not invertible");
  Jet u(m, 0.0);
  u[1] = 1.0 / g[1];
  Jet g0 = g;
  g0[0] = 0.0;
  for (int k = 2; k < m; ++k) {
    Jet t = compose(g0, u);
    u[k] = -t[k] / g[1];
  }
  return u;
}

}  // namespace mcflab
