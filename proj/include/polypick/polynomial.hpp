#pragma once

// Sparse complex polynomials in d variables, their reflections, and the
// rational inner function attached to a stable polynomial.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "polypick/lattice.hpp"

namespace polypick {

using Complex = std::complex<double>;
using Point = std::vector<Complex>;

/// p(z) = sum_alpha c_alpha z^alpha with support inside [0, degree].
/// `degree` is the declared degree box n used for reflection; it may
/// exceed the actual support (p = 1 with degree (1,1) is legitimate and
/// gives the inner function z1*z2).
class Polynomial {
 public:
  using CoeffMap = std::map<MultiIndex, Complex>;

  Polynomial(int dim, MultiIndex degree, CoeffMap coeffs)
      : dim_(dim), degree_(std::move(degree)), coeffs_(std::move(coeffs)) {
    if (dim_ < 1) throw std::invalid_argument("Polynomial: dimension must be positive");
    if (degree_.dim() != dim_ || !degree_.nonnegative())
      throw std::invalid_argument("Polynomial: bad degree box");
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
      const MultiIndex& alpha = it->first;
      if (alpha.dim() != dim_ || !alpha.nonnegative() || !leq(alpha, degree_))
        throw std::invalid_argument("Polynomial: coefficient index " + alpha.to_string() +
                                    " outside [0, degree]");
      if (!std::isfinite(it->second.real()) || !std::isfinite(it->second.imag()))
        throw std::invalid_argument("Polynomial: non-finite coefficient");
      if (it->second == Complex(0.0, 0.0))
        it = coeffs_.erase(it);
      else
        ++it;
    }
  }

  static Polynomial constant(int dim, Complex value, MultiIndex degree) {
    CoeffMap m;
    m.emplace(MultiIndex::zero(dim), value);
    return Polynomial(dim, std::move(degree), std::move(m));
  }
  static Polynomial constant(int dim, Complex value) {
    return constant(dim, value, MultiIndex::zero(dim));
  }

  int dim() const { return dim_; }
  const MultiIndex& degree() const { return degree_; }
  const CoeffMap& coefficients() const { return coeffs_; }

  Complex coefficient(const MultiIndex& alpha) const {
    auto it = coeffs_.find(alpha);
    return it == coeffs_.end() ? Complex(0.0, 0.0) : it->second;
  }

  /// Componentwise maximum of the support (zero polynomial gives all zeros).
  MultiIndex support_degree() const {
    MultiIndex s = MultiIndex::zero(dim_);
    for (const auto& [alpha, c] : coeffs_)
      for (int i = 0; i < dim_; ++i) s[i] = std::max(s[i], alpha[i]);
    return s;
  }

  Complex operator()(const Point& z) const {
    if (static_cast<int>(z.size()) != dim_)
      throw std::invalid_argument("Polynomial: evaluation point has wrong dimension");
    Complex acc(0.0, 0.0);
    for (const auto& [alpha, c] : coeffs_) {
      Complex term = c;
      for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < alpha[i]; ++k) term *= z[static_cast<std::size_t>(i)];
      acc += term;
    }
    return acc;
  }

 private:
  int dim_;
  MultiIndex degree_;
  CoeffMap coeffs_;
};

/// Reflection p~(z) = z^n conj(p(1/conj(z))), i.e. p~_alpha = conj(p_{n-alpha}).
inline Polynomial reflect(const Polynomial& p, const MultiIndex& n) {
  if (n.dim() != p.dim()) throw std::invalid_argument("reflect: dimension mismatch");
  if (!n.nonnegative() || !leq(p.support_degree(), n))
    throw std::invalid_argument("reflect: degree box smaller than actual degree");
  Polynomial::CoeffMap out;
  for (const auto& [alpha, c] : p.coefficients()) out.emplace(n - alpha, std::conj(c));
  return Polynomial(p.dim(), n, std::move(out));
}

inline Polynomial reflect(const Polynomial& p) { return reflect(p, p.degree()); }

/// f = p~/p on the closed polydisk (inner when p is stable).
inline Complex inner_eval(const Polynomial& p, const MultiIndex& n, const Point& z) {
  if (static_cast<int>(z.size()) != p.dim())
    throw std::invalid_argument("inner_eval: point has wrong dimension");
  for (const Complex& zj : z)
    if (std::abs(zj) > 1.0 + 1e-9)
      throw std::domain_error("inner_eval: point outside closed polydisk");
  if (n.dim() != p.dim() || !n.nonnegative() || !leq(p.support_degree(), n))
    throw std::invalid_argument("inner_eval: bad degree box");
  Complex num(0.0, 0.0);
  for (const auto& [alpha, c] : p.coefficients()) {
    Complex term = std::conj(c);
    for (int i = 0; i < p.dim(); ++i)
      for (int k = 0; k < n[i] - alpha[i]; ++k) term *= z[static_cast<std::size_t>(i)];
    num += term;
  }
  Complex den = p(z);
  if (std::abs(den) < 1e-300) throw std::domain_error("inner_eval: denominator vanishes");
  return num / den;
}

inline Complex inner_eval(const Polynomial& p, const Point& z) {
  return inner_eval(p, p.degree(), z);
}

namespace detail {
inline void fnv1a(std::uint64_t& h, const void* data, std::size_t len) {
  const unsigned char* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ull;
  }
}
inline void fnv1a_int(std::uint64_t& h, int v) { fnv1a(h, &v, sizeof v); }
inline void fnv1a_double(std::uint64_t& h, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  fnv1a(h, buf, std::char_traits<char>::length(buf));
}
}  // namespace detail

/// Content hash over dimension, degree box and canonical coefficient list;
/// used as the moment-cache identity.
inline std::uint64_t polynomial_hash(const Polynomial& p) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  detail::fnv1a_int(h, p.dim());
  for (int i = 0; i < p.dim(); ++i) detail::fnv1a_int(h, p.degree()[i]);
  for (const auto& [alpha, c] : p.coefficients()) {
    for (int i = 0; i < p.dim(); ++i) detail::fnv1a_int(h, alpha[i]);
    detail::fnv1a_double(h, c.real());
    detail::fnv1a_double(h, c.imag());
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace polypick
