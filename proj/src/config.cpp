#include "labs/config.hpp"

#include <charconv>
#include <map>
#include <optional>
#include <set>

#include "labs/io.hpp"

namespace lbs {

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  std::vector<Entry> entries;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Sections in order; entries before any header land in a section named "".
std::vector<Section> tokenize(std::string_view text, const std::string& source) {
  std::vector<Section> sections(1);
  std::set<std::string> names;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source + ":" + std::to_string(line_no) + ": unterminated section header");
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty section name");
      if (!names.insert(name).second) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate section [" + name + "]");
      }
      sections.push_back(Section{name, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    Entry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
    if (e.key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": missing key");
    for (const auto& other : sections.back().entries) {
      if (other.key == e.key) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": field '" + e.key + "' given twice");
      }
    }
    sections.back().entries.push_back(std::move(e));
  }
  return sections;
}

class Reader {
 public:
  Reader(const std::string& source, const Entry& e) : source_(source), e_(e) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(e_.line) + ": field '" + e_.key + "': " + what);
  }

  Scalar real() const { return real_of(e_.value); }

  long integer() const {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(e_.value.data(), e_.value.data() + e_.value.size(), v);
    if (e_.value.empty() || ec != std::errc() || ptr != e_.value.data() + e_.value.size()) {
      fail("expected an integer, got '" + e_.value + "'");
    }
    return v;
  }

  std::uint64_t unsigned_integer() const {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(e_.value.data(), e_.value.data() + e_.value.size(), v);
    if (e_.value.empty() || ec != std::errc() || ptr != e_.value.data() + e_.value.size()) {
      fail("expected a non-negative integer, got '" + e_.value + "'");
    }
    return v;
  }

  bool boolean() const {
    if (e_.value == "true" || e_.value == "1" || e_.value == "yes") return true;
    if (e_.value == "false" || e_.value == "0" || e_.value == "no") return false;
    fail("expected true or false, got '" + e_.value + "'");
  }

  std::vector<int> ints() const {
    try {
      return parse_int_list(e_.value, e_.key);
    } catch (const ConfigError& err) {
      fail(err.what());
    }
  }

  std::vector<Scalar> reals() const {
    std::vector<Scalar> out;
    std::string_view rest = e_.value;
    for (;;) {
      const auto comma = rest.find(',');
      out.push_back(real_of(trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

 private:
  Scalar real_of(std::string_view s) const {
    Scalar v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail("expected a finite real number, got '" + std::string(s) + "'");
    }
    return v;
  }

  const std::string& source_;
  const Entry& e_;
};

// Keys shared by run configurations and benchmark sections. Gamma lists are
// kept aside so a single value can be broadcast once the degrees are known.
struct ModelKeys {
  Hyperparams hyper;
  ChainConfig chain;
  SamplerOptions sampler;
  std::optional<std::vector<Scalar>> a_gamma;
  std::optional<std::vector<Scalar>> b_gamma;

  bool apply(const std::string& source, const Entry& e) {
    const Reader r(source, e);
    if (e.key == "degrees") hyper.degrees = r.ints();
    else if (e.key == "r") hyper.r = r.real();
    else if (e.key == "R") hyper.R = r.real();
    else if (e.key == "a_gamma") a_gamma = r.reals();
    else if (e.key == "b_gamma") b_gamma = r.reals();
    else if (e.key == "p_birth") hyper.moves.birth = r.real();
    else if (e.key == "p_death") hyper.moves.death = r.real();
    else if (e.key == "p_relocate") hyper.moves.relocate = r.real();
    else if (e.key == "iterations") chain.iterations = r.integer();
    else if (e.key == "burn_in") chain.burn_in = r.integer();
    else if (e.key == "thin") chain.thin = r.integer();
    else if (e.key == "seed") chain.seed = r.unsigned_integer();
    else if (e.key == "prior_only") sampler.prior_only = r.boolean();
    else if (e.key == "full_recompute") sampler.full_recompute = r.boolean();
    else if (e.key == "move_repeats") sampler.move_repeats = static_cast<int>(r.integer());
    else if (e.key == "update_all_betas") sampler.update_all_betas = r.boolean();
    else if (e.key == "refresh_interval") sampler.refresh_interval = r.integer();
    else return false;
    return true;
  }

  void finish() {
    const Scalar a0 = hyper.a_gamma.empty() ? 1.0 : hyper.a_gamma.front();
    const Scalar b0 = hyper.b_gamma.empty() ? 1.0 : hyper.b_gamma.front();
    const auto fill = [&](const std::optional<std::vector<Scalar>>& given, Scalar fallback) {
      std::vector<Scalar> v = given ? *given : std::vector<Scalar>{fallback};
      if (v.size() == 1) v.assign(hyper.degrees.size(), v.front());
      return v;
    };
    hyper.a_gamma = fill(a_gamma, a0);
    hyper.b_gamma = fill(b_gamma, b0);
  }
};

// Re-raises a validation failure with the source attached.
template <typename F>
void checked(const std::string& where, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const PreconditionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string join(const std::vector<Scalar>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

void RunConfig::validate() const {
  hyper.validate();
  chain.validate();
  sampler.validate();
  require(grid == 0 || grid >= 2, "grid: must be 0 (data abscissae) or at least 2");
  require(lower > 0 && lower < upper && upper < 1, "quantiles: need 0 < lower < upper < 1");
}

std::vector<int> parse_int_list(std::string_view text, const std::string& field) {
  std::vector<int> out;
  std::string_view rest = text;
  for (;;) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError(field + ": expected comma-separated integers, got '" + std::string(text) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

void set_degrees(Hyperparams& hyper, std::vector<int> degrees) {
  hyper.degrees = std::move(degrees);
  const auto n = hyper.degrees.size();
  if (hyper.a_gamma.size() != n) hyper.a_gamma.assign(n, hyper.a_gamma.empty() ? 1.0 : hyper.a_gamma.front());
  if (hyper.b_gamma.size() != n) hyper.b_gamma.assign(n, hyper.b_gamma.empty() ? 1.0 : hyper.b_gamma.front());
}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
  const auto sections = tokenize(text, source);
  if (sections.size() > 1) {
    throw ConfigError(source + ":" + std::to_string(sections[1].line) + ": section headers are not allowed here");
  }
  RunConfig cfg;
  ModelKeys keys{cfg.hyper, cfg.chain, cfg.sampler, std::nullopt, std::nullopt};
  for (const Entry& e : sections.front().entries) {
    if (keys.apply(source, e)) continue;
    const Reader r(source, e);
    if (e.key == "grid") {
      cfg.grid = r.integer();
    } else if (e.key == "lower_quantile") {
      cfg.lower = r.real();
    } else if (e.key == "upper_quantile") {
      cfg.upper = r.real();
    } else if (e.key == "trace") {
      cfg.trace = r.boolean();
    } else {
      r.fail("unknown key");
    }
  }
  keys.finish();
  cfg.hyper = keys.hyper;
  cfg.chain = keys.chain;
  cfg.sampler = keys.sampler;
  checked(source, [&] { cfg.validate(); });
  return cfg;
}

RunConfig read_run_config(const std::filesystem::path& path) { return parse_run_config(read_file(path), path.string()); }

std::string write_run_config(const RunConfig& cfg) {
  std::string out;
  const auto line = [&](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  line("degrees", join(cfg.hyper.degrees));
  line("r", format_double(cfg.hyper.r));
  line("R", format_double(cfg.hyper.R));
  line("a_gamma", join(cfg.hyper.a_gamma));
  line("b_gamma", join(cfg.hyper.b_gamma));
  line("p_birth", format_double(cfg.hyper.moves.birth));
  line("p_death", format_double(cfg.hyper.moves.death));
  line("p_relocate", format_double(cfg.hyper.moves.relocate));
  line("iterations", std::to_string(cfg.chain.iterations));
  line("burn_in", std::to_string(cfg.chain.burn_in));
  line("thin", std::to_string(cfg.chain.thin));
  line("seed", std::to_string(cfg.chain.seed));
  line("prior_only", bool_text(cfg.sampler.prior_only));
  line("full_recompute", bool_text(cfg.sampler.full_recompute));
  line("move_repeats", std::to_string(cfg.sampler.move_repeats));
  line("update_all_betas", bool_text(cfg.sampler.update_all_betas));
  line("refresh_interval", std::to_string(cfg.sampler.refresh_interval));
  line("grid", std::to_string(cfg.grid));
  line("lower_quantile", format_double(cfg.lower));
  line("upper_quantile", format_double(cfg.upper));
  line("trace", bool_text(cfg.trace));
  return out;
}

std::string default_config_text() {
  return "# labs fit configuration\n"
         "#\n"
         "# degrees            B-spline degrees in the model, comma separated\n"
         "# r, R               sigma^2 ~ IG(r/2, rR/2)\n"
         "# a_gamma, b_gamma   M_k ~ Gamma(shape a, rate b); one value or one per degree\n"
         "# p_*                birth/death/relocation move probabilities (sum to 1)\n"
         "# iterations, burn_in, thin, seed   chain length and retention\n"
         "# prior_only         drop the likelihood (sampler check)\n"
         "# full_recompute     exact likelihood for every ratio (slow; verification)\n"
         "# move_repeats       reversible-jump moves per degree per sweep\n"
         "# update_all_betas   Gibbs-refresh every coefficient each sweep\n"
         "# refresh_interval   sweeps between exact residual refreshes\n"
         "# grid               output grid size; 0 = the data abscissae\n"
         "# *_quantile         pointwise credible band levels\n"
         "# trace              also write <prefix>_trace.csv\n"
         "\n" +
         write_run_config(RunConfig{});
}

std::vector<ExperimentSpec> parse_benchmark_spec(std::string_view text, const std::string& source) {
  const auto sections = tokenize(text, source);
  if (!sections.front().entries.empty()) {
    const Entry& e = sections.front().entries.front();
    throw ConfigError(source + ":" + std::to_string(e.line) + ": field '" + e.key + "' outside a section");
  }

  // [defaults] may set any experiment key except `function`.
  std::vector<Entry> defaults;
  std::vector<const Section*> experiments;
  for (std::size_t i = 1; i < sections.size(); ++i) {
    if (sections[i].name == "defaults") {
      defaults = sections[i].entries;
    } else {
      experiments.push_back(&sections[i]);
    }
  }
  if (experiments.empty()) throw ConfigError(source + ": no experiments");

  std::vector<ExperimentSpec> out;
  for (const Section* sec : experiments) {
    const Entry* fn = nullptr;
    for (const Entry& e : sec->entries) {
      if (e.key == "function") fn = &e;
    }
    if (!fn) throw ConfigError(source + ":" + std::to_string(sec->line) + ": [" + sec->name + "] has no 'function'");
    ExperimentSpec spec;
    spec.label = sec->name;
    try {
      spec.function = parse_test_function(fn->value);
    } catch (const PreconditionError& e) {
      Reader(source, *fn).fail(e.what());
    }
    const Hyperparams published = published_hyperparams(spec.function);
    ModelKeys keys{published, spec.chain, spec.sampler, std::nullopt, std::nullopt};

    const auto apply = [&](const Entry& e) {
      if (e.key == "function") {
        if (&e != fn) Reader(source, e).fail("not allowed in [defaults]");
        return;
      }
      if (keys.apply(source, e)) return;
      const Reader r(source, e);
      if (e.key == "n") spec.n = r.integer();
      else if (e.key == "rsnr") spec.rsnr = r.real();
      else if (e.key == "replicates") spec.replicates = static_cast<int>(r.integer());
      else if (e.key == "base_seed") spec.base_seed = r.unsigned_integer();
      else if (e.key == "signal_sd") spec.signal_sd = r.real();
      else if (e.key == "threshold") spec.mse_threshold = r.real();
      else r.fail("unknown key");
    };
    for (const Entry& e : defaults) apply(e);
    for (const Entry& e : sec->entries) apply(e);

    keys.finish();
    spec.hyper = keys.hyper;
    spec.chain = keys.chain;
    spec.sampler = keys.sampler;
    checked(source + ": [" + sec->name + "]", [&] { spec.validate(); });
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<ExperimentSpec> read_benchmark_spec(const std::filesystem::path& path) {
  return parse_benchmark_spec(read_file(path), path.string());
}

}  // namespace lbs
