#include "labs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace lbs {

std::size_t ModelState::total_atoms() const {
  std::size_t total = 0;
  for (const auto& c : components) total += c.count();
  return total;
}

std::size_t ModelState::component_index(int degree) const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].degree == degree) return i;
  }
  throw PreconditionError("ModelState: no component of degree " + std::to_string(degree));
}

Hyperparams Hyperparams::uniform(std::vector<int> degrees, Scalar r, Scalar R, Scalar a, Scalar b) {
  Hyperparams h;
  std::sort(degrees.begin(), degrees.end());
  h.degrees = std::move(degrees);
  h.r = r;
  h.R = R;
  h.a_gamma.assign(h.degrees.size(), a);
  h.b_gamma.assign(h.degrees.size(), b);
  return h;
}

void Hyperparams::validate() const {
  require(!degrees.empty(), "degrees: at least one B-spline degree is required");
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    require(degrees[i] >= 0, "degrees: degrees must be non-negative");
    if (i > 0) require(degrees[i] > degrees[i - 1], "degrees: must be strictly increasing");
  }
  require(std::isfinite(r) && r > 0, "r: must be positive");
  require(std::isfinite(R) && R > 0, "R: must be positive");
  require(a_gamma.size() == degrees.size(), "a_gamma: need one value per degree");
  require(b_gamma.size() == degrees.size(), "b_gamma: need one value per degree");
  for (Scalar a : a_gamma) require(std::isfinite(a) && a > 0, "a_gamma: must be positive");
  for (Scalar b : b_gamma) require(std::isfinite(b) && b > 0, "b_gamma: must be positive");
  require(moves.birth >= 0 && moves.death >= 0 && moves.relocate >= 0,
          "p_birth, p_death, p_relocate: must be non-negative");
  require(std::abs(moves.birth + moves.death + moves.relocate - 1.0) <= 1e-12,
          "p_birth, p_death, p_relocate: must sum to 1");
}

Dataset::Dataset(Vector xv, Vector yv) : x(std::move(xv)), y(std::move(yv)) {
  require(x.size() == y.size(), "Dataset: x and y lengths differ");
  require(x.size() >= 1, "Dataset: empty");
  domain = Interval{x.minCoeff(), x.maxCoeff()};
  validate();
}

Dataset::Dataset(Vector xv, Vector yv, Interval d) : x(std::move(xv)), y(std::move(yv)), domain(d) {
  validate();
}

void Dataset::validate() const {
  require(x.size() == y.size(), "Dataset: x and y lengths differ");
  require(x.size() >= 1, "Dataset: empty");
  require(x.allFinite() && y.allFinite(), "Dataset: non-finite value");
  require(std::isfinite(domain.lo) && std::isfinite(domain.hi) && domain.lo <= domain.hi,
          "Dataset: invalid domain");
  for (Index i = 0; i < x.size(); ++i) {
    require(domain.contains(x[i]), "Dataset: x outside the domain");
  }
}

Scalar eval_mean(const ModelState& state, Scalar x) {
  Scalar eta = state.beta0;
  for (const auto& c : state.components) {
    for (const auto& a : c.atoms) eta += a.beta * eval_basis(a.knots, x);
  }
  return eta;
}

Vector eval_mean(const ModelState& state, const Vector& xs) {
  return xs.unaryExpr([&state](Scalar x) { return eval_mean(state, x); });
}

Scalar log_likelihood_from_ssr(Scalar ssr, Index n, Scalar sigma2) {
  require(sigma2 > 0, "log_likelihood: sigma2 must be positive");
  return -0.5 * static_cast<Scalar>(n) * std::log(2.0 * std::numbers::pi * sigma2) - 0.5 * ssr / sigma2;
}

Scalar log_likelihood(const ModelState& state, const Dataset& data) {
  require(state.sigma2 > 0, "log_likelihood: sigma2 must be positive");
  const Vector residual = data.y - eval_mean(state, data.x);
  return log_likelihood_from_ssr(residual.squaredNorm(), data.size(), state.sigma2);
}

Atom sample_atom(int degree, Scalar phi, const Interval& domain, Rng& rng) {
  require(phi > 0, "sample_atom: phi must be positive");
  require(domain.length() > 0, "sample_atom: degenerate domain");
  std::vector<Scalar> knots(static_cast<std::size_t>(degree) + 2);
  for (auto& t : knots) t = uniform(rng, domain.lo, domain.hi);
  std::sort(knots.begin(), knots.end());
  Atom atom;
  atom.beta = normal(rng, 0.0, phi);
  atom.knots = KnotVector(degree, std::move(knots));
  return atom;
}

Scalar atom_log_prior(const Atom& atom, Scalar phi, const Interval& domain) {
  if (!atom.knots.within(domain)) return -std::numeric_limits<Scalar>::infinity();
  const int m = atom.degree() + 2;
  const Scalar log_normal =
      -0.5 * std::log(2.0 * std::numbers::pi * phi * phi) - 0.5 * atom.beta * atom.beta / (phi * phi);
  // (k+2)! / |X|^(k+2): density of k+2 sorted iid uniforms.
  const Scalar log_knots = std::lgamma(static_cast<Scalar>(m) + 1.0) - m * std::log(domain.length());
  return log_normal + log_knots;
}

ModelState init_state(const Dataset& data, const Hyperparams& hyper, Rng& rng) {
  hyper.validate();
  data.validate();
  const Scalar range = data.y.maxCoeff() - data.y.minCoeff();
  if (!(range > 0)) {
    throw DegenerateDataError(
        "response is constant (max y == min y), so the coefficient prior scale "
        "0.5*(max y - min y) is zero; nothing to fit beyond the mean");
  }
  require(data.domain.length() > 0, "init_state: domain has zero length");

  ModelState state;
  state.beta0 = data.y.mean();
  const Scalar phi = 0.5 * range;
  for (std::size_t i = 0; i < hyper.degrees.size(); ++i) {
    DegreeComponent c;
    c.degree = hyper.degrees[i];
    c.phi = phi;
    c.rate = gamma_rate(rng, hyper.a_gamma[i], hyper.b_gamma[i]);
    while (!(c.rate > 0)) c.rate = gamma_rate(rng, hyper.a_gamma[i], hyper.b_gamma[i]);
    const int count = poisson(rng, c.rate);
    for (int j = 0; j < count; ++j) c.atoms.push_back(sample_atom(c.degree, phi, data.domain, rng));
    state.components.push_back(std::move(c));
  }
  state.sigma2 = inverse_gamma(rng, 0.5 * hyper.r, 0.5 * hyper.r * hyper.R);
  return state;
}

void validate_state(const ModelState& state, const Hyperparams& hyper, const Interval& domain) {
  require(state.sigma2 > 0 && std::isfinite(state.sigma2), "state: sigma2 must be positive");
  require(state.components.size() == hyper.degrees.size(), "state: component count differs from S");
  for (std::size_t i = 0; i < state.components.size(); ++i) {
    const auto& c = state.components[i];
    require(c.degree == hyper.degrees[i], "state: component degrees differ from S");
    require(c.rate > 0 && c.phi > 0, "state: rate and phi must be positive");
    for (const auto& a : c.atoms) {
      require(a.degree() == c.degree, "state: atom degree differs from its component");
      require(a.knots.within(domain), "state: knot outside the domain");
      require(a.knots.size() == static_cast<std::size_t>(c.degree) + 2, "state: wrong knot count");
      for (std::size_t j = 0; j + 1 < a.knots.size(); ++j) {
        require(a.knots[j] <= a.knots[j + 1], "state: knots out of order");
      }
      require(std::isfinite(a.beta), "state: non-finite coefficient");
    }
  }
}

}  // namespace lbs
