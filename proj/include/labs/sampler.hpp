#pragma once

// Reversible-jump sampler for the LABS posterior.
//
// One sweep visits every degree k in S: a randomly chosen birth, death or
// relocation move on the atoms of degree k, then a Gibbs draw of the Poisson
// rate M_k. A Gibbs draw of sigma^2 closes the sweep.
//
// The sampler keeps the residual vector y - eta on an x-sorted copy of the
// data, so a move only touches the data points inside the affected basis
// supports. With `full_recompute` every likelihood ratio is instead formed
// from two complete evaluations of the log-likelihood; the two modes consume
// identical random numbers and must agree to rounding.

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "labs/model.hpp"

namespace lbs {

enum class Move { birth, death, relocate };

std::string_view to_string(Move m);

struct ChainConfig {
  long iterations = 50000;
  long burn_in = 25000;
  long thin = 10;
  std::uint64_t seed = 1;

  /// floor((iterations - burn_in) / thin)
  long retained() const { return (iterations - burn_in) / thin; }
  void validate() const;
};

struct SamplerOptions {
  bool prior_only = false;        ///< Drop the likelihood; the chain then targets the prior.
  bool full_recompute = false;    ///< Recompute the likelihood from scratch for every ratio.
  int move_repeats = 1;           ///< RJ moves per degree per sweep.
  bool update_all_betas = false;  ///< Gibbs-refresh every coefficient each sweep.
  long refresh_interval = 1000;   ///< Sweeps between exact residual refreshes (incremental mode).

  void validate() const;
};

struct NormalLaw {
  Scalar mean = 0.0;
  Scalar variance = 1.0;
};

/// Shape/rate parameterisation, mean shape/rate.
struct GammaLaw {
  Scalar shape = 1.0;
  Scalar rate = 1.0;
};

/// Shape/scale parameterisation, mean scale/(shape-1).
struct InverseGammaLaw {
  Scalar shape = 1.0;
  Scalar scale = 1.0;
};

struct MoveCounter {
  long attempts = 0;
  long accepts = 0;

  Scalar rate() const { return attempts > 0 ? static_cast<Scalar>(accepts) / attempts : 0.0; }
};

struct AcceptanceStats {
  MoveCounter birth;
  MoveCounter death;
  MoveCounter relocate;  ///< Counts individual knot proposals.
  long relocation_moves = 0;
};

struct MoveResult {
  Move move = Move::birth;
  bool accepted = false;
  Scalar log_ratio = 0.0;
  std::size_t atom = 0;  ///< Atom created, removed or relocated.
};

struct RelocationResult {
  std::size_t atom = 0;
  std::vector<bool> accepted_knots;
};

/// Proposal b(.) for new atoms. The default draws from the coefficient/knot
/// prior, which cancels the prior-over-proposal factor of the birth ratio.
struct BirthProposal {
  std::function<Atom(int degree, Scalar phi, const Interval& domain, Rng& rng)> draw;
  std::function<Scalar(const Atom& atom, Scalar phi, const Interval& domain)> log_density;

  static BirthProposal prior();
};

/// Birth with probability one when the degree has no atoms, otherwise by the
/// move probabilities.
Move choose_move(const MoveProbabilities& probs, std::size_t count, Rng& rng);

/// Full conditional of M_k: Ga(a + J_k, b + 1).
GammaLaw rate_conditional(std::size_t count, Scalar a, Scalar b);

/// Full conditional of sigma^2: IG((r + n)/2, (ssr + rR)/2).
InverseGammaLaw sigma2_conditional(Scalar ssr, Index n, Scalar r, Scalar R);

/// Full conditional of one coefficient given its basis column and the
/// residual with that atom removed.
template <typename DerivedB, typename DerivedE>
NormalLaw beta_conditional(const Eigen::MatrixBase<DerivedB>& basis,
                           const Eigen::MatrixBase<DerivedE>& partial_residual, Scalar sigma2,
                           Scalar phi) {
  const Scalar precision = basis.squaredNorm() / sigma2 + 1.0 / (phi * phi);
  const Scalar variance = 1.0 / precision;
  return NormalLaw{variance * basis.dot(partial_residual) / sigma2, variance};
}

class Sampler {
 public:
  Sampler(const Dataset& data, Hyperparams hyper, ModelState state, SamplerOptions options = {});

  const ModelState& state() const { return state_; }
  const Hyperparams& hyper() const { return hyper_; }
  const SamplerOptions& options() const { return options_; }
  /// The x-sorted working copy of the data.
  const Dataset& data() const { return data_; }
  /// y - eta on the sorted data.
  const Vector& residuals() const { return residual_; }
  Scalar ssr() const { return residual_.squaredNorm(); }
  const AcceptanceStats& stats(int degree) const;
  long sweeps() const { return sweeps_; }

  void set_birth_proposal(BirthProposal proposal) { proposal_ = std::move(proposal); }
  void refresh_residuals();

  /// log of the birth acceptance ratio for appending `atom` to degree k.
  Scalar birth_log_ratio(int degree, const Atom& atom) const;
  /// log of the death acceptance ratio for removing atom `index` of degree k.
  Scalar death_log_ratio(int degree, std::size_t index) const;
  /// log-likelihood ratio of moving knot `knot` of atom `index` to `value`.
  Scalar knot_log_ratio(int degree, std::size_t index, std::size_t knot, Scalar value) const;

  MoveResult birth(int degree, Rng& rng);
  MoveResult birth(int degree, const Atom& proposal, Rng& rng);
  MoveResult death(int degree, Rng& rng);
  RelocationResult relocate(int degree, Rng& rng);
  MoveResult move(int degree, Rng& rng);

  NormalLaw beta_law(int degree, std::size_t index) const;
  void gibbs_beta(int degree, std::size_t index, Rng& rng);
  void gibbs_rate(int degree, Rng& rng);
  InverseGammaLaw sigma2_law() const;
  void gibbs_sigma2(Rng& rng);

  void sweep(Rng& rng);

 private:
  struct Column {
    Index begin = 0;
    Vector values;
    Index end() const { return begin + values.size(); }
  };

  Column column(const KnotVector& kv) const;
  // Change in SSR when eta loses `beta_old * old_col` and gains `beta_new * new_col`.
  Scalar delta_ssr(const Column& old_col, Scalar beta_old, const Column& new_col, Scalar beta_new) const;
  void apply_delta(const Column& old_col, Scalar beta_old, const Column& new_col, Scalar beta_new);
  Scalar full_log_ratio(const ModelState& proposed) const;
  MoveResult death_at(int degree, std::size_t index, Rng& rng);
  Scalar birth_probability(std::size_t count_before) const;

  Dataset data_;
  Hyperparams hyper_;
  SamplerOptions options_;
  ModelState state_;
  Vector residual_;
  BirthProposal proposal_;
  std::vector<AcceptanceStats> stats_;
  long sweeps_ = 0;
};

struct ChainOutput {
  ChainConfig config;
  SamplerOptions options;
  std::vector<int> degrees;
  Vector grid;
  std::vector<long> iterations;  ///< Sweep number of each retained sample.
  Matrix curves;                 ///< eta on `grid`, one row per retained sample.
  Vector sigma2;
  Eigen::MatrixXi counts;  ///< J_k per retained sample, one column per degree.
  Matrix rates;            ///< M_k per retained sample.
  std::vector<AcceptanceStats> acceptance;
  ModelState final_state;

  Index retained() const { return curves.rows(); }
};

/// Initialises from the prior and runs cfg.iterations sweeps, keeping every
/// thin-th sweep after burn-in. An empty grid means the sorted data abscissae.
ChainOutput run_chain(const Dataset& data, const Hyperparams& hyper, const ChainConfig& cfg,
                      const SamplerOptions& options = {}, const Vector& grid = Vector());

struct PosteriorCurve {
  Vector grid;
  Vector mean;
  Vector lower;
  Vector upper;
};

/// Linear-interpolation (type 7) empirical quantile of unsorted values.
Scalar empirical_quantile(std::vector<Scalar> values, Scalar p);

PosteriorCurve posterior_curve(const Vector& grid, const Matrix& curves, Scalar lower = 0.025,
                               Scalar upper = 0.975);
PosteriorCurve posterior_curve(const ChainOutput& out, Scalar lower = 0.025, Scalar upper = 0.975);

}  // namespace lbs
