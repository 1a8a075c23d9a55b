#pragma once

// The LABS probabilistic model: a Gaussian regression whose mean is an
// intercept plus, for each configured B-spline degree k, a Poisson number of
// basis functions with normal coefficients and uniformly placed knots.

#include <cstddef>
#include <vector>

#include "labs/bspline.hpp"
#include "labs/random.hpp"
#include "labs/types.hpp"

namespace lbs {

struct Atom {
  KnotVector knots;
  Scalar beta = 0.0;

  int degree() const { return knots.degree(); }
};

struct DegreeComponent {
  int degree = 0;
  std::vector<Atom> atoms;
  Scalar rate = 1.0;  ///< Poisson mean M_k of the atom count.
  Scalar phi = 1.0;   ///< Prior scale of the coefficients.

  std::size_t count() const { return atoms.size(); }
};

struct ModelState {
  Scalar beta0 = 0.0;
  std::vector<DegreeComponent> components;  ///< Ascending degree, one per element of S.
  Scalar sigma2 = 1.0;

  std::size_t total_atoms() const;
  /// Position of degree k in `components`; throws if absent.
  std::size_t component_index(int degree) const;
};

struct MoveProbabilities {
  Scalar birth = 0.4;
  Scalar death = 0.4;
  Scalar relocate = 0.2;
};

struct Hyperparams {
  std::vector<int> degrees{0, 1, 2};
  Scalar r = 0.01;  ///< sigma^2 ~ IG(r/2, rR/2)
  Scalar R = 0.01;
  std::vector<Scalar> a_gamma{5.0, 5.0, 5.0};  ///< per degree, M_k ~ Ga(a, b) (rate b)
  std::vector<Scalar> b_gamma{1.0, 1.0, 1.0};
  MoveProbabilities moves;

  /// Hyperparameters with the same gamma shape/rate for every degree.
  static Hyperparams uniform(std::vector<int> degrees, Scalar r, Scalar R, Scalar a, Scalar b);

  /// Throws PreconditionError naming the offending field.
  void validate() const;
};

struct Dataset {
  Vector x;
  Vector y;
  Interval domain;

  Dataset() = default;
  /// Domain defaults to [min x, max x].
  Dataset(Vector x, Vector y);
  Dataset(Vector x, Vector y, Interval domain);

  Index size() const { return x.size(); }
  void validate() const;
};

/// eta(x) = beta0 + sum over atoms of beta * B_k(x; knots).
Scalar eval_mean(const ModelState& state, Scalar x);
Vector eval_mean(const ModelState& state, const Vector& xs);

/// Gaussian log-likelihood -(n/2) log(2 pi sigma^2) - SSR / (2 sigma^2).
Scalar log_likelihood(const ModelState& state, const Dataset& data);
Scalar log_likelihood_from_ssr(Scalar ssr, Index n, Scalar sigma2);

/// beta ~ N(0, phi^2); knots are k+2 sorted iid uniforms on the domain.
Atom sample_atom(int degree, Scalar phi, const Interval& domain, Rng& rng);

/// log N(beta; 0, phi^2) + log((k+2)! / |domain|^(k+2)), or -inf when a knot
/// leaves the domain.
Scalar atom_log_prior(const Atom& atom, Scalar phi, const Interval& domain);

/// beta0 = mean(y), phi_k = (max y - min y)/2, everything else from the prior.
/// Throws DegenerateDataError for a constant response.
ModelState init_state(const Dataset& data, const Hyperparams& hyper, Rng& rng);

/// Throws PreconditionError if the state breaks an invariant relative to the
/// hyperparameters and domain.
void validate_state(const ModelState& state, const Hyperparams& hyper, const Interval& domain);

}  // namespace lbs
