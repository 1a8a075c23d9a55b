#include "labs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lbs {

namespace {

constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();

bool accept(Scalar log_ratio, Rng& rng) {
  const Scalar u = uniform_open(rng);
  return std::log(u) < log_ratio;
}

std::size_t uniform_index(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

Dataset sorted_copy(const Dataset& data) {
  std::vector<Index> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&data](Index a, Index b) { return data.x[a] < data.x[b]; });
  Vector x(data.size()), y(data.size());
  for (Index i = 0; i < data.size(); ++i) {
    x[i] = data.x[order[static_cast<std::size_t>(i)]];
    y[i] = data.y[order[static_cast<std::size_t>(i)]];
  }
  return Dataset(std::move(x), std::move(y), data.domain);
}

}  // namespace

std::string_view to_string(Move m) {
  switch (m) {
    case Move::birth:
      return "birth";
    case Move::death:
      return "death";
    case Move::relocate:
      return "relocate";
  }
  return "unknown";
}

void ChainConfig::validate() const {
  require(iterations > 0, "iterations: must be positive");
  require(burn_in >= 0 && burn_in < iterations, "burn_in: must be in [0, iterations)");
  require(thin > 0, "thin: must be positive");
  require(retained() >= 1, "thin: (iterations - burn_in) / thin must retain at least one sample");
}

void SamplerOptions::validate() const {
  require(move_repeats >= 1, "move_repeats: must be at least 1");
  require(refresh_interval >= 0, "refresh_interval: must be non-negative");
}

BirthProposal BirthProposal::prior() {
  return BirthProposal{
      [](int degree, Scalar phi, const Interval& domain, Rng& rng) {
        return sample_atom(degree, phi, domain, rng);
      },
      [](const Atom& atom, Scalar phi, const Interval& domain) {
        return atom_log_prior(atom, phi, domain);
      }};
}

Move choose_move(const MoveProbabilities& probs, std::size_t count, Rng& rng) {
  if (count == 0) return Move::birth;
  const Scalar u = std::generate_canonical<Scalar, 53>(rng);
  if (u < probs.birth) return Move::birth;
  if (u < probs.birth + probs.death) return Move::death;
  return Move::relocate;
}

GammaLaw rate_conditional(std::size_t count, Scalar a, Scalar b) {
  return GammaLaw{a + static_cast<Scalar>(count), b + 1.0};
}

InverseGammaLaw sigma2_conditional(Scalar ssr, Index n, Scalar r, Scalar R) {
  const Scalar r0 = r + static_cast<Scalar>(n);
  const Scalar R0 = (ssr + r * R) / r0;
  return InverseGammaLaw{0.5 * r0, 0.5 * r0 * R0};
}

Sampler::Sampler(const Dataset& data, Hyperparams hyper, ModelState state, SamplerOptions options)
    : data_(sorted_copy(data)),
      hyper_(std::move(hyper)),
      options_(options),
      state_(std::move(state)),
      proposal_(BirthProposal::prior()),
      stats_(hyper_.degrees.size()) {
  hyper_.validate();
  options_.validate();
  validate_state(state_, hyper_, data_.domain);
  refresh_residuals();
}

const AcceptanceStats& Sampler::stats(int degree) const {
  return stats_[state_.component_index(degree)];
}

void Sampler::refresh_residuals() {
  // Accumulate eta in extended precision so residuals of neighbouring states
  // differ only by their final rounding.
  residual_.resize(data_.size());
  for (Index i = 0; i < data_.size(); ++i) {
    const Scalar x = data_.x[i];
    long double eta = state_.beta0;
    for (const auto& c : state_.components) {
      for (const auto& a : c.atoms) eta += static_cast<long double>(a.beta) * eval_basis(a.knots, x);
    }
    residual_[i] = static_cast<Scalar>(data_.y[i] - eta);
  }
}

Sampler::Column Sampler::column(const KnotVector& kv) const {
  const auto [begin, end] = support_range(kv, data_.x);
  Column c;
  c.begin = begin;
  c.values = data_.x.segment(begin, end - begin).unaryExpr([&kv](Scalar x) { return eval_basis(kv, x); });
  return c;
}

Scalar Sampler::delta_ssr(const Column& old_col, Scalar beta_old, const Column& new_col,
                          Scalar beta_new) const {
  const bool has_old = old_col.values.size() > 0;
  const bool has_new = new_col.values.size() > 0;
  if (!has_old && !has_new) return 0.0;
  const Index begin = std::min(has_old ? old_col.begin : new_col.begin, has_new ? new_col.begin : old_col.begin);
  const Index end = std::max(has_old ? old_col.end() : 0, has_new ? new_col.end() : 0);
  Vector delta = Vector::Zero(end - begin);
  if (has_old) delta.segment(old_col.begin - begin, old_col.values.size()) -= beta_old * old_col.values;
  if (has_new) delta.segment(new_col.begin - begin, new_col.values.size()) += beta_new * new_col.values;
  // Per-point terms in extended precision: the ratio is often 1e4 or more in
  // magnitude and birth/death must still cancel to ~1e-12.
  long double sum = 0.0L;
  for (Index i = 0; i < delta.size(); ++i) {
    const Scalar d = delta[i];
    sum += static_cast<long double>(d) * (static_cast<long double>(d) - 2.0L * residual_[begin + i]);
  }
  return static_cast<Scalar>(sum);
}

void Sampler::apply_delta(const Column& old_col, Scalar beta_old, const Column& new_col, Scalar beta_new) {
  if (options_.full_recompute) {
    refresh_residuals();
    return;
  }
  if (old_col.values.size() > 0)
    residual_.segment(old_col.begin, old_col.values.size()) += beta_old * old_col.values;
  if (new_col.values.size() > 0)
    residual_.segment(new_col.begin, new_col.values.size()) -= beta_new * new_col.values;
}

Scalar Sampler::full_log_ratio(const ModelState& proposed) const {
  return log_likelihood(proposed, data_) - log_likelihood(state_, data_);
}

Scalar Sampler::birth_probability(std::size_t count_before) const {
  // An empty degree forces the birth move.
  return count_before == 0 ? 1.0 : hyper_.moves.birth;
}

Scalar Sampler::birth_log_ratio(int degree, const Atom& atom) const {
  const std::size_t ci = state_.component_index(degree);
  const DegreeComponent& c = state_.components[ci];
  require(atom.degree() == degree, "birth: atom degree differs from the component");
  const Scalar log_prior = atom_log_prior(atom, c.phi, data_.domain);
  if (log_prior == kNegInf) return kNegInf;
  const Scalar log_proposal = proposal_.log_density(atom, c.phi, data_.domain);

  Scalar log_lik = 0.0;
  if (!options_.prior_only) {
    if (options_.full_recompute) {
      ModelState proposed = state_;
      proposed.components[ci].atoms.push_back(atom);
      log_lik = full_log_ratio(proposed);
    } else {
      log_lik = -delta_ssr(Column{}, 0.0, column(atom.knots), atom.beta) / (2.0 * state_.sigma2);
    }
  }
  const Scalar count = static_cast<Scalar>(c.count());
  return log_lik + std::log(c.rate) - std::log(count + 1.0) + std::log(hyper_.moves.death) -
         std::log(birth_probability(c.count())) + (log_prior - log_proposal);
}

Scalar Sampler::death_log_ratio(int degree, std::size_t index) const {
  const std::size_t ci = state_.component_index(degree);
  const DegreeComponent& c = state_.components[ci];
  if (c.count() == 0) throw std::logic_error("death move attempted on a degree with no atoms");
  require(index < c.count(), "death: atom index out of range");
  const Atom& atom = c.atoms[index];
  const Scalar log_prior = atom_log_prior(atom, c.phi, data_.domain);
  const Scalar log_proposal = proposal_.log_density(atom, c.phi, data_.domain);

  Scalar log_lik = 0.0;
  if (!options_.prior_only) {
    if (options_.full_recompute) {
      ModelState proposed = state_;
      auto& atoms = proposed.components[ci].atoms;
      atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(index));
      log_lik = full_log_ratio(proposed);
    } else {
      log_lik = -delta_ssr(column(atom.knots), atom.beta, Column{}, 0.0) / (2.0 * state_.sigma2);
    }
  }
  const Scalar count = static_cast<Scalar>(c.count());
  return log_lik + std::log(count) - std::log(c.rate) + std::log(birth_probability(c.count() - 1)) -
         std::log(hyper_.moves.death) + (log_proposal - log_prior);
}

Scalar Sampler::knot_log_ratio(int degree, std::size_t index, std::size_t knot, Scalar value) const {
  const std::size_t ci = state_.component_index(degree);
  const Atom& atom = state_.components[ci].atoms.at(index);
  require(knot < atom.knots.size(), "relocation: knot index out of range");
  if (options_.prior_only) return 0.0;
  KnotVector moved = atom.knots;
  moved.set(knot, value);
  if (options_.full_recompute) {
    ModelState proposed = state_;
    proposed.components[ci].atoms[index].knots = moved;
    return full_log_ratio(proposed);
  }
  return -delta_ssr(column(atom.knots), atom.beta, column(moved), atom.beta) / (2.0 * state_.sigma2);
}

MoveResult Sampler::birth(int degree, Rng& rng) {
  const DegreeComponent& c = state_.components[state_.component_index(degree)];
  const Atom proposal = proposal_.draw(degree, c.phi, data_.domain, rng);
  return birth(degree, proposal, rng);
}

MoveResult Sampler::birth(int degree, const Atom& proposal, Rng& rng) {
  const std::size_t ci = state_.component_index(degree);
  MoveResult result;
  result.move = Move::birth;
  result.log_ratio = birth_log_ratio(degree, proposal);
  result.accepted = accept(result.log_ratio, rng);
  AcceptanceStats& st = stats_[ci];
  ++st.birth.attempts;
  if (result.accepted) {
    ++st.birth.accepts;
    auto& atoms = state_.components[ci].atoms;
    atoms.push_back(proposal);
    result.atom = atoms.size() - 1;
    if (options_.full_recompute) {
      refresh_residuals();
    } else {
      apply_delta(Column{}, 0.0, column(proposal.knots), proposal.beta);
    }
  }
  return result;
}

MoveResult Sampler::death(int degree, Rng& rng) {
  const DegreeComponent& c = state_.components[state_.component_index(degree)];
  if (c.count() == 0) throw std::logic_error("death move attempted on a degree with no atoms");
  return death_at(degree, uniform_index(c.count(), rng), rng);
}

MoveResult Sampler::death_at(int degree, std::size_t index, Rng& rng) {
  const std::size_t ci = state_.component_index(degree);
  MoveResult result;
  result.move = Move::death;
  result.atom = index;
  result.log_ratio = death_log_ratio(degree, index);
  result.accepted = accept(result.log_ratio, rng);
  AcceptanceStats& st = stats_[ci];
  ++st.death.attempts;
  if (result.accepted) {
    ++st.death.accepts;
    auto& atoms = state_.components[ci].atoms;
    const Atom removed = atoms[index];
    atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(index));
    if (options_.full_recompute) {
      refresh_residuals();
    } else {
      apply_delta(column(removed.knots), removed.beta, Column{}, 0.0);
    }
  }
  return result;
}

RelocationResult Sampler::relocate(int degree, Rng& rng) {
  const std::size_t ci = state_.component_index(degree);
  DegreeComponent& c = state_.components[ci];
  if (c.count() == 0) throw std::logic_error("relocation attempted on a degree with no atoms");
  AcceptanceStats& st = stats_[ci];
  ++st.relocation_moves;

  RelocationResult result;
  result.atom = uniform_index(c.count(), rng);
  Atom& atom = c.atoms[result.atom];
  const std::size_t m = atom.knots.size();
  result.accepted_knots.assign(m, false);

  const bool incremental = !options_.prior_only && !options_.full_recompute;
  Column current = incremental ? column(atom.knots) : Column{};
  for (std::size_t i = 0; i < m; ++i) {
    const Scalar lo = i == 0 ? data_.domain.lo : atom.knots[i - 1];
    const Scalar hi = i + 1 == m ? data_.domain.hi : atom.knots[i + 1];
    const Scalar value = uniform(rng, lo, hi);

    Scalar log_ratio = 0.0;
    Column moved_col;
    if (!options_.prior_only) {
      if (options_.full_recompute) {
        log_ratio = knot_log_ratio(degree, result.atom, i, value);
      } else {
        KnotVector moved = atom.knots;
        moved.set(i, value);
        moved_col = column(moved);
        log_ratio = -delta_ssr(current, atom.beta, moved_col, atom.beta) / (2.0 * state_.sigma2);
      }
    }
    ++st.relocate.attempts;
    if (accept(log_ratio, rng)) {
      ++st.relocate.accepts;
      result.accepted_knots[i] = true;
      if (options_.prior_only || options_.full_recompute) {
        atom.knots.set(i, value);
        if (options_.full_recompute) refresh_residuals();
      } else {
        apply_delta(current, atom.beta, moved_col, atom.beta);
        atom.knots.set(i, value);
        current = std::move(moved_col);
      }
    }
  }
  if (options_.prior_only && !options_.full_recompute) refresh_residuals();
  gibbs_beta(degree, result.atom, rng);
  return result;
}

MoveResult Sampler::move(int degree, Rng& rng) {
  const DegreeComponent& c = state_.components[state_.component_index(degree)];
  switch (choose_move(hyper_.moves, c.count(), rng)) {
    case Move::birth:
      return birth(degree, rng);
    case Move::death:
      return death(degree, rng);
    case Move::relocate: {
      const RelocationResult r = relocate(degree, rng);
      MoveResult result;
      result.move = Move::relocate;
      result.atom = r.atom;
      result.accepted = std::find(r.accepted_knots.begin(), r.accepted_knots.end(), true) !=
                        r.accepted_knots.end();
      return result;
    }
  }
  throw std::logic_error("unreachable move type");
}

NormalLaw Sampler::beta_law(int degree, std::size_t index) const {
  const DegreeComponent& c = state_.components[state_.component_index(degree)];
  const Atom& atom = c.atoms.at(index);
  if (options_.prior_only) return NormalLaw{0.0, c.phi * c.phi};
  const Column col = column(atom.knots);
  const Vector partial = residual_.segment(col.begin, col.values.size()) + atom.beta * col.values;
  return beta_conditional(col.values, partial, state_.sigma2, c.phi);
}

void Sampler::gibbs_beta(int degree, std::size_t index, Rng& rng) {
  const NormalLaw law = beta_law(degree, index);
  Atom& atom = state_.components[state_.component_index(degree)].atoms.at(index);
  const Scalar old_beta = atom.beta;
  atom.beta = normal(rng, law.mean, std::sqrt(law.variance));
  if (options_.full_recompute) {
    refresh_residuals();
  } else {
    const Column col = column(atom.knots);
    apply_delta(col, old_beta, col, atom.beta);
  }
}

void Sampler::gibbs_rate(int degree, Rng& rng) {
  const std::size_t ci = state_.component_index(degree);
  DegreeComponent& c = state_.components[ci];
  const GammaLaw law = rate_conditional(c.count(), hyper_.a_gamma[ci], hyper_.b_gamma[ci]);
  Scalar draw = gamma_rate(rng, law.shape, law.rate);
  while (!(draw > 0)) draw = gamma_rate(rng, law.shape, law.rate);
  c.rate = draw;
}

InverseGammaLaw Sampler::sigma2_law() const {
  if (options_.prior_only) return InverseGammaLaw{0.5 * hyper_.r, 0.5 * hyper_.r * hyper_.R};
  return sigma2_conditional(ssr(), data_.size(), hyper_.r, hyper_.R);
}

void Sampler::gibbs_sigma2(Rng& rng) {
  const InverseGammaLaw law = sigma2_law();
  state_.sigma2 = inverse_gamma(rng, law.shape, law.scale);
}

void Sampler::sweep(Rng& rng) {
  for (int degree : hyper_.degrees) {
    for (int rep = 0; rep < options_.move_repeats; ++rep) move(degree, rng);
    if (options_.update_all_betas) {
      const std::size_t count = state_.components[state_.component_index(degree)].count();
      for (std::size_t q = 0; q < count; ++q) gibbs_beta(degree, q, rng);
    }
    gibbs_rate(degree, rng);
  }
  gibbs_sigma2(rng);
  ++sweeps_;
  if (!options_.full_recompute && options_.refresh_interval > 0 && sweeps_ % options_.refresh_interval == 0) {
    refresh_residuals();
  }
}

ChainOutput run_chain(const Dataset& data, const Hyperparams& hyper, const ChainConfig& cfg,
                      const SamplerOptions& options, const Vector& grid) {
  cfg.validate();
  options.validate();
  hyper.validate();
  Rng rng = make_rng(cfg.seed, 1);
  Sampler sampler(data, hyper, init_state(data, hyper, rng), options);

  ChainOutput out;
  out.config = cfg;
  out.options = options;
  out.degrees = hyper.degrees;
  out.grid = grid.size() > 0 ? grid : sampler.data().x;
  const Index kept = cfg.retained();
  const Index ndeg = static_cast<Index>(hyper.degrees.size());
  out.curves.resize(kept, out.grid.size());
  out.sigma2.resize(kept);
  out.counts.resize(kept, ndeg);
  out.rates.resize(kept, ndeg);
  out.iterations.reserve(static_cast<std::size_t>(kept));

  Index row = 0;
  for (long it = 1; it <= cfg.iterations; ++it) {
    sampler.sweep(rng);
    if (it <= cfg.burn_in || (it - cfg.burn_in) % cfg.thin != 0) continue;
    const ModelState& s = sampler.state();
    out.iterations.push_back(it);
    out.curves.row(row) = eval_mean(s, out.grid).transpose();
    out.sigma2[row] = s.sigma2;
    for (Index j = 0; j < ndeg; ++j) {
      out.counts(row, j) = static_cast<int>(s.components[static_cast<std::size_t>(j)].count());
      out.rates(row, j) = s.components[static_cast<std::size_t>(j)].rate;
    }
    ++row;
  }
  for (int degree : hyper.degrees) out.acceptance.push_back(sampler.stats(degree));
  out.final_state = sampler.state();
  return out;
}

Scalar empirical_quantile(std::vector<Scalar> values, Scalar p) {
  require(!values.empty(), "quantile: no values");
  require(p >= 0 && p <= 1, "quantile: level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const Scalar h = (static_cast<Scalar>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<Scalar>(lo)) * (values[lo + 1] - values[lo]);
}

PosteriorCurve posterior_curve(const Vector& grid, const Matrix& curves, Scalar lower, Scalar upper) {
  require(curves.rows() >= 1, "posterior_curve: no retained samples");
  require(curves.cols() == grid.size(), "posterior_curve: grid and curve widths differ");
  require(lower <= upper, "posterior_curve: lower quantile exceeds upper");
  PosteriorCurve pc;
  pc.grid = grid;
  pc.mean = curves.colwise().mean().transpose();
  pc.lower.resize(grid.size());
  pc.upper.resize(grid.size());
  std::vector<Scalar> column(static_cast<std::size_t>(curves.rows()));
  for (Index j = 0; j < curves.cols(); ++j) {
    for (Index i = 0; i < curves.rows(); ++i) column[static_cast<std::size_t>(i)] = curves(i, j);
    pc.lower[j] = empirical_quantile(column, lower);
    pc.upper[j] = empirical_quantile(column, upper);
  }
  return pc;
}

PosteriorCurve posterior_curve(const ChainOutput& out, Scalar lower, Scalar upper) {
  return posterior_curve(out.grid, out.curves, lower, upper);
}

}  // namespace lbs
