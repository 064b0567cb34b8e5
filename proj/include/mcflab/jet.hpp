#pragma once

#include <array>

namespace mcflab {

// Truncated Taylor series: c[k] = f^(k)(x0) / k!, k < size.
class Jet {
 public:
  static constexpr int kCap = 16;

  Jet() = default;
  explicit Jet(int size, double value = 0.0);
  static Jet variable(int size, double x0);  // x0 + t

  int size() const { return m_; }
  double& operator[](int k) { return c_[k]; }
  double operator[](int k) const { return c_[k]; }
  double value() const { return c_[0]; }
  double derivative(int k) const;  // f^(k)(x0)

  Jet truncated(int size) const;
  Jet diff() const;                       // f', one order shorter
  Jet integral(double c0) const;          // antiderivative, one order longer (capped)

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { a.c_[0] += s; return a; }
  friend Jet operator+(double s, Jet a) { a.c_[0] += s; return a; }
  friend Jet operator-(Jet a, double s) { a.c_[0] -= s; return a; }
  friend Jet operator-(double s, const Jet& a) { return (a * -1.0) + s; }
  Jet operator-() const { return *this * -1.0; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(double s, const Jet& b);

 private:
  int m_ = 0;
  std::array<double, kCap> c_{};
};

Jet sqrt(const Jet& a);
void sincos(const Jet& a, Jet& s, Jet& c);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

// f(g(t)) for g[0] == 0 (f expanded about g's base value).
Jet compose(const Jet& f, const Jet& g);
// Series inverse u of g with g[0] == 0, g[1] != 0: g(u(s)) = s.
Jet reverse(const Jet& g);

}  // namespace mcflab
