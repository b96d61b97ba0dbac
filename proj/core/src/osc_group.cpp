#include "rgflow/osc_group.hpp"

#include <algorithm>
#include <cmath>

namespace rgflow {

OscElement::OscElement(GlElement m, DualVec k, Vec v, double c)
    : m_(std::move(m)), k_(std::move(k)), v_(std::move(v)), c_(c) {
  require_same_dim(m_.dim(), k_.size(), "Osc element k");
  require_same_dim(m_.dim(), v_.size(), "Osc element v");
  if (!std::isfinite(c_)) throw InvalidArgument("Osc element: scalar part must be finite");
}

OscElement OscElement::identity(std::size_t n) {
  return OscElement(GlElement::identity(n), DualVec::zero(n), Vec::zero(n), 0.0);
}

OscElement OscElement::linear(const GlElement& m) {
  return OscElement(m, DualVec::zero(m.dim()), Vec::zero(m.dim()), 0.0);
}

OscElement OscElement::heisenberg(const DualVec& k, const Vec& v, double c) {
  return OscElement(GlElement::identity(k.size()), k, v, c);
}

bool OscElement::in_heisenberg() const {
  const auto n = static_cast<Eigen::Index>(dim());
  return m_.matrix() == Matrix::Identity(n, n);
}

OscElement osc_mul(const OscElement& g, const OscElement& h) {
  require_same_dim(g.dim(), h.dim(), "osc_mul");
  return OscElement(g.m() * h.m(), g.k() * h.m() + h.k(), g.v() + g.m() * h.v(),
                    g.c() + h.c() + g.k()(h.v()));
}

OscElement osc_inv(const OscElement& g) {
  const GlElement m_inv = g.m().inverse();
  const Vec v_inv = -(m_inv * g.v());
  return OscElement(m_inv, -(g.k() * m_inv), v_inv, -g.c() - g.k()(v_inv));
}

Matrix to_matrix(const OscElement& g) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  Matrix rep = Matrix::Zero(n + 2, n + 2);
  rep(0, 0) = 1.0;
  rep.block(0, 1, 1, n) = g.k().values().transpose();
  rep(0, n + 1) = g.c();
  rep.block(1, 1, n, n) = g.m().matrix();
  rep.block(1, n + 1, n, 1) = g.v().values();
  rep(n + 1, n + 1) = 1.0;
  return rep;
}

OscElement from_matrix(const Matrix& rep) {
  const Eigen::Index n = rep.rows() - 2;
  if (n < 1 || rep.cols() != rep.rows()) throw InvalidArgument("from_matrix: expected (n+2)x(n+2) matrix");
  const bool pattern = rep(0, 0) == 1.0 && rep(n + 1, n + 1) == 1.0 &&
                       (rep.block(1, 0, n + 1, 1).array() == 0.0).all() &&
                       (rep.block(n + 1, 0, 1, n + 1).array() == 0.0).all();
  if (!pattern) throw InvalidArgument("from_matrix: not an oscillator group representative");
  return OscElement(GlElement(Matrix(rep.block(1, 1, n, n))), DualVec(Vector(rep.block(0, 1, 1, n).transpose())),
                    Vec(Vector(rep.block(1, n + 1, n, 1))), rep(0, n + 1));
}

const DualVec& proj(const OscElement& g) { return g.k(); }

double max_component_diff(const OscElement& g, const OscElement& h) {
  require_same_dim(g.dim(), h.dim(), "max_component_diff");
  double d = (g.m().matrix() - h.m().matrix()).cwiseAbs().maxCoeff();
  d = std::max(d, (g.k().values() - h.k().values()).cwiseAbs().maxCoeff());
  d = std::max(d, (g.v().values() - h.v().values()).cwiseAbs().maxCoeff());
  return std::max(d, std::abs(g.c() - h.c()));
}

bool approx_equal(const OscElement& g, const OscElement& h, double tol) {
  return max_component_diff(g, h) <= tol;
}

HeisElement heis_mul(const HeisElement& x, const HeisElement& y) {
  return HeisElement{x.k + y.k, x.v + y.v, x.a + y.a + x.k(y.v)};
}

OscElement embed(const HeisElement& x) { return OscElement::heisenberg(x.k, x.v, x.a); }

// ---------------------------------------------------------------------------
// Sections

Section::Section(Matrix a, Sym2Tensor b, Vec linear) : a_(std::move(a)), b_(std::move(b)), linear_(std::move(linear)) {
  require_same_dim(static_cast<std::size_t>(a_.rows()), b_.dim(), "section a");
  require_same_dim(static_cast<std::size_t>(a_.cols()), b_.dim(), "section a");
  require_same_dim(linear_.size(), b_.dim(), "section linear part");
  const double scale = std::max(a_.cwiseAbs().maxCoeff(), b_.max_abs());
  const double gap = (a_ - b_.matrix()).cwiseAbs().maxCoeff();
  if (gap > 1e-10 * scale)
    throw InvalidSection("section data violates b(k1+k2) - b(k1) - b(k2) = k1(a(k2))");
}

Section::Section(const Sym2Tensor& c, Vec linear) : Section(c.matrix(), c, std::move(linear)) {}

Section Section::identity(std::size_t n) { return Section(Sym2Tensor::zero(n), Vec::zero(n)); }

Vec Section::a_of(const DualVec& k) const {
  require_same_dim(dim(), k.size(), "section argument");
  return Vec(Vector(a_ * k.values()));
}

double Section::b_of(const DualVec& k) const { return 0.5 * quad_form(k, b_) + k(linear_); }

OscElement Section::operator()(const DualVec& k) const {
  return OscElement(GlElement::identity(dim()), k, a_of(k), b_of(k));
}

double section_law_residual(const Section& s, const DualVec& k1, const DualVec& k2) {
  const auto n = s.dim();
  double r = (s.a_of(DualVec::zero(n)).values()).cwiseAbs().maxCoeff();
  r = std::max(r, std::abs(s.b_of(DualVec::zero(n))));
  r = std::max(r, (s.a_of(k1 + k2).values() - s.a_of(k1).values() - s.a_of(k2).values()).cwiseAbs().maxCoeff());
  r = std::max(r, std::abs(s.b_of(k1 + k2) - s.b_of(k1) - s.b_of(k2) - k1(s.a_of(k2))));
  return r;
}

Section an_section(const Sym2Tensor& c) { return Section(c, Vec::zero(c.dim())); }

OscElement an_apply(const Sym2Tensor& c, const DualVec& k) {
  return OscElement(GlElement::identity(c.dim()), k, contract(c, k), 0.5 * quad_form(k, c));
}

Section section_sum(const Section& s1, const Section& s2) {
  require_same_dim(s1.dim(), s2.dim(), "section_sum");
  return Section(Matrix(s1.a() + s2.a()), s1.b() + s2.b(), s1.linear() + s2.linear());
}

Section section_negate(const Section& s) { return Section(Matrix(-s.a()), -s.b(), -s.linear()); }

Section act_sec(const GlElement& m, const Section& s) {
  require_same_dim(m.dim(), s.dim(), "act_sec");
  const Matrix& mm = m.matrix();
  return Section(Matrix(mm * s.a() * mm.transpose()), act_sym(m, s.b()), m * s.linear());
}

OscElement act_sec_by_conjugation(const GlElement& m, const Section& s, const DualVec& k) {
  return osc_mul(osc_mul(OscElement::linear(m), s(k * m)), OscElement::linear(m.inverse()));
}

// ---------------------------------------------------------------------------
// GL(V) x| Sym2(V)

UrElement ur_mul(const UrElement& g, const UrElement& h) {
  require_same_dim(g.m.dim(), h.m.dim(), "ur_mul");
  return UrElement{g.m * h.m, g.p + act_sym(g.m, h.p)};
}

UrElement ur_identity(std::size_t n) { return UrElement{GlElement::identity(n), Sym2Tensor::zero(n)}; }

UrElement ur(const Sym2Tensor& c, const GlElement& m) {
  require_same_dim(c.dim(), m.dim(), "ur");
  return UrElement{m, c - act_sym(m, c)};
}

}  // namespace rgflow
