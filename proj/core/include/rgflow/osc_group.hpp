#pragma once

// The oscillator group Osc(V) = (GL(V) x| V*) x| (V x R), its Heisenberg
// subgroup, sections of the projection Heis(V) -> V*, and the Ur section of
// GL(V) x| Sym2(V).

#include <cstddef>

#include "rgflow/tensor.hpp"

namespace rgflow {

/// Group element (M, k, v, c) of Osc(V).
///
/// The group law is
///   (L, j, u, a) . (M, k, v, b) = (LM, jM + k, u + Lv, a + b + j(v)).
class OscElement {
 public:
  OscElement(GlElement m, DualVec k, Vec v, double c);

  static OscElement identity(std::size_t n);
  /// (M, 0, 0, 0)
  static OscElement linear(const GlElement& m);
  /// (id, k, v, c), an element of the Heisenberg subgroup.
  static OscElement heisenberg(const DualVec& k, const Vec& v, double c);

  std::size_t dim() const { return m_.dim(); }
  const GlElement& m() const { return m_; }
  const DualVec& k() const { return k_; }
  const Vec& v() const { return v_; }
  double c() const { return c_; }

  bool in_heisenberg() const;

 private:
  GlElement m_;
  DualVec k_;
  Vec v_;
  double c_;
};

OscElement osc_mul(const OscElement& g, const OscElement& h);
OscElement osc_inv(const OscElement& g);
inline OscElement operator*(const OscElement& g, const OscElement& h) { return osc_mul(g, h); }

/// Faithful (n+2) x (n+2) representation [[1, k, c], [0, M, v], [0, 0, 1]].
Matrix to_matrix(const OscElement& g);
/// Inverse of to_matrix. Throws InvalidArgument if the block pattern is wrong.
OscElement from_matrix(const Matrix& rep);

/// proj: Heis(V) -> V*
const DualVec& proj(const OscElement& g);

/// Max componentwise absolute difference over (M, k, v, c).
double max_component_diff(const OscElement& g, const OscElement& h);
bool approx_equal(const OscElement& g, const OscElement& h, double tol = 1e-10);

/// Heisenberg group element (k, v, a) with the law
/// (j, u, a) . (k, v, b) = (j + k, u + v, a + b + j(v)).
struct HeisElement {
  DualVec k;
  Vec v;
  double a = 0.0;
};

HeisElement heis_mul(const HeisElement& x, const HeisElement& y);
OscElement embed(const HeisElement& x);

/// Section k -> (id, k, a(k), b(k)) of proj with a(k) = A k and
/// b(k) = 1/2 kBk + k(l). The section law b(k1+k2) - b(k1) - b(k2) = k1(a(k2))
/// forces A = B; the constructor rejects data violating that beyond
/// 1e-10 * scale.
class Section {
 public:
  Section(Matrix a, Sym2Tensor b, Vec linear);
  Section(const Sym2Tensor& c, Vec linear);

  static Section identity(std::size_t n);

  std::size_t dim() const { return b_.dim(); }
  const Matrix& a() const { return a_; }
  const Sym2Tensor& b() const { return b_; }
  const Vec& linear() const { return linear_; }

  Vec a_of(const DualVec& k) const;
  double b_of(const DualVec& k) const;
  OscElement operator()(const DualVec& k) const;

 private:
  Matrix a_;
  Sym2Tensor b_;
  Vec linear_;
};

/// Checks the section laws pointwise at (k1, k2); returns the largest residual.
double section_law_residual(const Section& s, const DualVec& k1, const DualVec& k2);

/// An(C): k -> (id, k, Ck, 1/2 kCk)
Section an_section(const Sym2Tensor& c);
OscElement an_apply(const Sym2Tensor& c, const DualVec& k);

/// [s1 + s2](k) = (id, k, a1(k) + a2(k), b1(k) + b2(k))
Section section_sum(const Section& s1, const Section& s2);
Section section_negate(const Section& s);

/// ActSec(M, s)(k) = (M,0,0,0) . s(kM) . (M^-1,0,0,0) = (id, k, M a(kM), b(kM))
Section act_sec(const GlElement& m, const Section& s);
/// Same action computed literally by conjugation in Osc(V); used as an oracle.
OscElement act_sec_by_conjugation(const GlElement& m, const Section& s, const DualVec& k);

/// Element (M, P) of GL(V) x| Sym2(V) with product
/// (M1, P1) . (M2, P2) = (M1 M2, P1 + ActSym(M1, P2)).
struct UrElement {
  GlElement m;
  Sym2Tensor p;
};

UrElement ur_mul(const UrElement& g, const UrElement& h);
UrElement ur_identity(std::size_t n);

/// Ur(C)(M) = (M, C - ActSym(M, C))
UrElement ur(const Sym2Tensor& c, const GlElement& m);

}  // namespace rgflow
