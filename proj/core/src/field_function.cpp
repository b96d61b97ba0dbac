#include "rgflow/field_function.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <variant>
#include <vector>

namespace rgflow {

const char* to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::polynomial: return "polynomial";
    case FunctionKind::exp_polynomial: return "exp-polynomial";
    case FunctionKind::gaussian: return "gaussian";
    case FunctionKind::composite: return "composite";
  }
  return "unknown";
}

struct PolyData {
  Polynomial p;
};
struct ExpPolyData {
  Polynomial p;
};
struct CompositeData {
  FieldFunction::Evaluator value;
  FieldFunction::Evaluator log_value;
};

struct FieldFunction::Impl {
  std::size_t dim;
  Traits traits;
  std::variant<PolyData, ExpPolyData, GaussianMeasure, CompositeData> data;
};

FieldFunction FieldFunction::polynomial(Polynomial p) {
  Traits t;
  t.integrable = p.is_zero();
  t.exp_admissible = p.degree() <= 2 || has_negative_leading_form(p);
  const std::size_t n = p.dim();
  return FieldFunction(std::make_shared<const Impl>(Impl{n, t, PolyData{std::move(p)}}));
}

FieldFunction FieldFunction::constant(std::size_t dim, double value) {
  return polynomial(Polynomial::constant(dim, value));
}

FieldFunction FieldFunction::exp_polynomial(Polynomial p, bool declare_integrable) {
  Traits t;
  if (declare_integrable) {
    if (!has_negative_leading_form(p))
      throw NotIntegrable("exp-polynomial declared integrable needs even degree and negative leading form");
    t.integrable = true;
    t.exp_admissible = true;
  }
  const std::size_t n = p.dim();
  return FieldFunction(std::make_shared<const Impl>(Impl{n, t, ExpPolyData{std::move(p)}}));
}

FieldFunction FieldFunction::gaussian(GaussianMeasure g) {
  const std::size_t n = g.dim();
  return FieldFunction(std::make_shared<const Impl>(Impl{n, Traits{true, true, false}, std::move(g)}));
}

FieldFunction FieldFunction::composite(std::size_t dim, Evaluator value, Evaluator log_value, Traits traits) {
  if (!value) throw InvalidArgument("composite function needs an evaluator");
  if (dim == 0 || dim > kMaxTensorDim) throw InvalidArgument("function dimension out of range");
  return FieldFunction(std::make_shared<const Impl>(
      Impl{dim, traits, CompositeData{std::move(value), std::move(log_value)}}));
}

FunctionKind FieldFunction::kind() const {
  switch (impl_->data.index()) {
    case 0: return FunctionKind::polynomial;
    case 1: return FunctionKind::exp_polynomial;
    case 2: return FunctionKind::gaussian;
    default: return FunctionKind::composite;
  }
}

std::size_t FieldFunction::dim() const { return impl_->dim; }

FieldFunction::Traits FieldFunction::traits() const { return impl_->traits; }

double FieldFunction::operator()(const Vec& x) const {
  require_same_dim(impl_->dim, x.size(), "function evaluation");
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PolyData>) {
          return d.p(x);
        } else if constexpr (std::is_same_v<T, ExpPolyData>) {
          return std::exp(d.p(x));
        } else if constexpr (std::is_same_v<T, GaussianMeasure>) {
          return d(x);
        } else {
          return d.value(x);
        }
      },
      impl_->data);
}

bool FieldFunction::has_log_form() const {
  if (const auto* c = std::get_if<CompositeData>(&impl_->data)) return static_cast<bool>(c->log_value);
  return kind() != FunctionKind::polynomial;
}

double FieldFunction::log_value(const Vec& x) const {
  require_same_dim(impl_->dim, x.size(), "function evaluation");
  if (const auto* e = std::get_if<ExpPolyData>(&impl_->data)) return e->p(x);
  if (const auto* g = std::get_if<GaussianMeasure>(&impl_->data)) return g->log_eval(x);
  if (const auto* c = std::get_if<CompositeData>(&impl_->data); c && c->log_value) return c->log_value(x);
  const double v = (*this)(x);
  if (!(v > 0.0)) throw NonPositiveValue("log of a non-positive function value");
  return std::log(v);
}

const Polynomial* FieldFunction::as_polynomial() const {
  if (const auto* p = std::get_if<PolyData>(&impl_->data)) return &p->p;
  if (const auto* e = std::get_if<ExpPolyData>(&impl_->data)) return &e->p;
  return nullptr;
}

const GaussianMeasure* FieldFunction::as_gaussian() const { return std::get_if<GaussianMeasure>(&impl_->data); }

// ---------------------------------------------------------------------------

namespace {

struct BitsHash {
  std::size_t operator()(const std::vector<std::uint64_t>& key) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t v : key) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

class Memo {
 public:
  explicit Memo(FieldFunction::Evaluator f) : f_(std::move(f)) {}

  double operator()(const Vec& x) {
    std::vector<std::uint64_t> key(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) key[i] = std::bit_cast<std::uint64_t>(x[i]);
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const double value = f_(x);
    std::lock_guard lock(mutex_);
    if (cache_.size() >= kCapacity) cache_.clear();
    cache_.emplace(std::move(key), value);
    return value;
  }

 private:
  static constexpr std::size_t kCapacity = std::size_t{1} << 18;

  FieldFunction::Evaluator f_;
  std::mutex mutex_;
  std::unordered_map<std::vector<std::uint64_t>, double, BitsHash> cache_;
};

}  // namespace

FieldFunction::Evaluator memoize(FieldFunction::Evaluator f) {
  auto memo = std::make_shared<Memo>(std::move(f));
  return [memo](const Vec& x) { return (*memo)(x); };
}

}  // namespace rgflow
