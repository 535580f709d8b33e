#include "issa/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "issa/catalog.hpp"
#include "issa/errors.hpp"

namespace issa {
namespace {

// ---------------------------------------------------------------------------
// Arithmetic expressions: expr := term (('+'|'-') term)*, term := unary
// (('*'|'/') unary)*, unary := '-' unary | atom, atom := number | name |
// '(' expr ')'.

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const Parameters& params)
      : text_(text), params_(&params) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    throw std::invalid_argument("in expression '" + std::string(text_) + "': " + msg);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) {
        v += term();
      } else if (eat('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        v /= unary();
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }

  double atom() {
    skip();
    if (pos_ >= text_.size()) error("unexpected end");
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) error("missing ')'");
      return v;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(text_.substr(pos_));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(rest, &used);
      } catch (const std::exception&) {
        error("bad number");
      }
      pos_ += used;
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      if (name == "pi") return std::numbers::pi;
      const auto it = params_->find(name);
      if (it == params_->end()) error("unknown parameter '" + name + "'");
      return it->second;
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const Parameters* params_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Splits "name(a, b, c)" into name and top-level arguments.
std::pair<std::string, std::vector<std::string>> split_call(std::string_view text) {
  const std::string s = trim(text);
  const std::size_t open = s.find('(');
  if (open == std::string::npos) return {"", {s}};
  if (s.back() != ')') throw std::invalid_argument("rate '" + s + "' is missing ')'");
  std::vector<std::string> args;
  int depth = 0;
  std::string cur;
  for (std::size_t i = open + 1; i + 1 < s.size(); ++i) {
    const char c = s[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      args.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !args.empty()) args.push_back(trim(cur));
  return {trim(s.substr(0, open)), args};
}

// ---------------------------------------------------------------------------
// YAML helpers; every failure carries the field path.

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string item(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

template <class T>
T as(const YAML::Node& node, const std::string& path, const char* what) {
  if (!node.IsScalar()) throw ConfigError(path, std::string("expected ") + what);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, std::string("expected ") + what + ", got '" + node.Scalar() + "'");
  }
}

double as_double(const YAML::Node& n, const std::string& path) {
  return as<double>(n, path, "a number");
}

std::uint64_t as_count(const YAML::Node& n, const std::string& path) {
  const double v = as_double(n, path);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::string as_string(const YAML::Node& n, const std::string& path) {
  return as<std::string>(n, path, "a string");
}

bool as_bool(const YAML::Node& n, const std::string& path) {
  return as<bool>(n, path, "true or false");
}

void require_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) throw ConfigError(path, "expected a mapping");
}

void require_list(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) throw ConfigError(path, "expected a list");
}

void check_keys(const YAML::Node& n, const std::string& path,
                std::initializer_list<const char*> allowed) {
  require_map(n, path);
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) {
      std::string list;
      for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      throw ConfigError(child(path, key), "unknown key (expected one of: " + list + ")");
    }
  }
}

std::vector<double> as_doubles(const YAML::Node& n, const std::string& path) {
  if (n.IsScalar()) return {as_double(n, path)};
  require_list(n, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_double(n[i], item(path, i)));
  return out;
}

std::size_t species_ref(const YAML::Node& n, const std::string& path,
                        const std::vector<std::string>& species) {
  const std::string name = as_string(n, path);
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (species[i] == name) return i;
  }
  throw ConfigError(path, "unknown species '" + name + "'");
}

std::vector<std::size_t> species_refs(const YAML::Node& n, const std::string& path,
                                      const std::vector<std::string>& species) {
  if (n.IsScalar()) return {species_ref(n, path, species)};
  require_list(n, path);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    out.push_back(species_ref(n[i], item(path, i), species));
  }
  return out;
}

State parse_state(const YAML::Node& n, const std::string& path,
                  const std::vector<std::string>& species) {
  State x(species.size(), 0);
  auto count = [&](const YAML::Node& v, const std::string& p) {
    const double d = as_double(v, p);
    if (!(d >= 0.0) || d != std::floor(d) || d > 9e18) {
      throw ConfigError(p, "expected a non-negative integer count");
    }
    return static_cast<Count>(d);
  };
  if (n.IsMap()) {
    for (const auto& kv : n) {
      const std::string key = kv.first.as<std::string>();
      x[species_ref(kv.first, child(path, key), species)] = count(kv.second, child(path, key));
    }
    return x;
  }
  require_list(n, path);
  if (n.size() != species.size()) {
    throw ConfigError(path, "expected " + std::to_string(species.size()) + " counts");
  }
  for (std::size_t i = 0; i < n.size(); ++i) x[i] = count(n[i], item(path, i));
  return x;
}

// ---------------------------------------------------------------------------
// Custom models.

struct KineticsSpec {
  Kinetics::Kind kind = Kinetics::Kind::kMassAction;
  std::vector<std::size_t> population;
  std::size_t a = 0;
  std::size_t b = 0;
};

struct ChannelSpec {
  std::string name;
  std::vector<Reactant> reactants;
  std::vector<Count> change;
  std::string rate;
  std::string bound;
  std::string path;
  KineticsSpec kinetics;
};

std::vector<std::pair<std::size_t, int>> stoichiometry(const YAML::Node& n,
                                                        const std::string& path,
                                                        const std::vector<std::string>& species) {
  std::vector<std::pair<std::size_t, int>> out;
  if (!n) return out;
  require_map(n, path);
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    const std::string p = child(path, key);
    const double m = as_double(kv.second, p);
    if (!(m >= 1.0) || m != std::floor(m) || m > 1000.0) {
      throw ConfigError(p, "stoichiometric coefficient must be a positive integer");
    }
    out.emplace_back(species_ref(kv.first, p, species), static_cast<int>(m));
  }
  return out;
}

KineticsSpec parse_kinetics(const YAML::Node& n, const std::string& path,
                            const std::vector<std::string>& species) {
  KineticsSpec k;
  if (!n) return k;
  if (n.IsScalar()) {
    if (as_string(n, path) != "mass_action") {
      throw ConfigError(path, "expected mass_action, {population: [...]} or "
                              "{frequency: [a, b], population: [...]}");
    }
    return k;
  }
  check_keys(n, path, {"population", "frequency"});
  if (!n["population"]) throw ConfigError(child(path, "population"), "required");
  k.population = species_refs(n["population"], child(path, "population"), species);
  if (n["frequency"]) {
    const auto ab = species_refs(n["frequency"], child(path, "frequency"), species);
    if (ab.size() != 2) throw ConfigError(child(path, "frequency"), "expected two species");
    k.kind = Kinetics::Kind::kFrequency;
    k.a = ab[0];
    k.b = ab[1];
  } else {
    k.kind = Kinetics::Kind::kPopulation;
  }
  return k;
}

template <class F>
auto at_field(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  } catch (const ModelError& e) {
    throw ConfigError(path, e.what());
  }
}

ModelFamily custom_model(const YAML::Node& n, const std::string& path) {
  check_keys(n, path,
             {"name", "species", "parameters", "initial", "horizon", "environment", "channels"});
  ModelFamily f;
  f.name = n["name"] ? as_string(n["name"], child(path, "name")) : "custom";
  if (!n["species"]) throw ConfigError(child(path, "species"), "required");
  {
    const std::string p = child(path, "species");
    require_list(n["species"], p);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < n["species"].size(); ++i) {
      const std::string s = as_string(n["species"][i], item(p, i));
      if (!seen.insert(s).second) throw ConfigError(item(p, i), "duplicate species '" + s + "'");
      f.species.push_back(s);
    }
    if (f.species.empty()) throw ConfigError(p, "at least one species is required");
  }
  if (n["parameters"]) {
    const std::string p = child(path, "parameters");
    require_map(n["parameters"], p);
    for (const auto& kv : n["parameters"]) {
      const std::string key = kv.first.as<std::string>();
      f.parameters[key] = as_double(kv.second, child(p, key));
    }
  }
  f.initial_state = n["initial"] ? parse_state(n["initial"], child(path, "initial"), f.species)
                                 : State(f.species.size(), 0);
  f.horizon = n["horizon"] ? as_double(n["horizon"], child(path, "horizon")) : 1.0;
  if (!(f.horizon > 0.0)) throw ConfigError(child(path, "horizon"), "must be > 0");

  double level_max = 0.0;
  if (n["environment"]) {
    const std::string p = child(path, "environment");
    const YAML::Node e = n["environment"];
    check_keys(e, p, {"levels", "transitions", "initial", "holding_rate"});
    EnvironmentModel env;
    if (!e["levels"]) throw ConfigError(child(p, "levels"), "required");
    env.levels = as_doubles(e["levels"], child(p, "levels"));
    if (e["transitions"]) {
      const std::string tp = child(p, "transitions");
      require_list(e["transitions"], tp);
      for (std::size_t i = 0; i < e["transitions"].size(); ++i) {
        env.transitions.push_back(as_doubles(e["transitions"][i], item(tp, i)));
      }
    }
    if (e["initial"]) env.initial_index = as_count(e["initial"], child(p, "initial"));
    if (e["holding_rate"]) env.holding_rate = as_double(e["holding_rate"], child(p, "holding_rate"));
    at_field(p, [&] {
      env.validate();
      return 0;
    });
    level_max = env.max_level();
    f.environment = env;
  }

  if (!n["channels"]) throw ConfigError(child(path, "channels"), "required");
  const std::string cp = child(path, "channels");
  require_list(n["channels"], cp);
  std::vector<ChannelSpec> channels;
  for (std::size_t i = 0; i < n["channels"].size(); ++i) {
    const std::string p = item(cp, i);
    const YAML::Node c = n["channels"][i];
    check_keys(c, p, {"name", "reactants", "products", "rate", "kinetics", "bound"});
    ChannelSpec ch;
    ch.path = p;
    ch.name = c["name"] ? as_string(c["name"], child(p, "name")) : "R" + std::to_string(i + 1);
    ch.change.assign(f.species.size(), 0);
    for (const auto& [s, m] : stoichiometry(c["reactants"], child(p, "reactants"), f.species)) {
      ch.reactants.push_back({s, m});
      ch.change[s] -= m;
    }
    for (const auto& [s, m] : stoichiometry(c["products"], child(p, "products"), f.species)) {
      ch.change[s] += m;
    }
    if (!c["rate"]) throw ConfigError(child(p, "rate"), "required");
    ch.rate = as_string(c["rate"], child(p, "rate"));
    if (c["bound"]) ch.bound = as_string(c["bound"], child(p, "bound"));
    ch.kinetics = parse_kinetics(c["kinetics"], child(p, "kinetics"), f.species);
    channels.push_back(std::move(ch));
  }
  if (channels.empty()) throw ConfigError(cp, "at least one channel is required");

  const std::vector<std::string> species = f.species;
  f.builder = [channels, species, level_max](const Parameters& params,
                                             std::shared_ptr<const EnvironmentPath> env) {
    std::vector<ReactionChannel> out;
    for (const ChannelSpec& c : channels) {
      const RateFunction rate = at_field(child(c.path, "rate"), [&] {
        return parse_rate(c.rate, params, env, level_max);
      });
      Kinetics kin;
      switch (c.kinetics.kind) {
        case Kinetics::Kind::kMassAction:
          kin = Kinetics::mass_action(c.reactants);
          break;
        case Kinetics::Kind::kPopulation:
          kin = Kinetics::population(c.kinetics.population);
          break;
        case Kinetics::Kind::kFrequency:
          kin = Kinetics::frequency(c.kinetics.a, c.kinetics.b, c.kinetics.population);
          break;
      }
      if (c.bound.empty()) {
        out.push_back({c.name, c.change, Propensity(rate, kin)});
        continue;
      }
      // A user-supplied dominating rate: the certificate is its supremum on
      // the window times the state factor.
      const RateFunction bound = at_field(child(c.path, "bound"), [&] {
        return parse_rate(c.bound, params, env, level_max);
      });
      auto evaluate = [rate, kin](double t, StateView x) { return rate(t) * kin.factor(x); };
      auto certify = [bound, kin](double t0, double t1, StateView x) {
        return BoundCertificate{bound.sup(t0, t1) * kin.factor(x), t1};
      };
      out.push_back({c.name, c.change, Propensity::custom(evaluate, certify)});
    }
    return ReactionNetwork(species, std::move(out));
  };
  // Build once with the defaults so definition errors surface at load time.
  if (!f.environment) {
    at_field(path, [&] { return f.build(f.parameters); });
  }
  return f;
}

ModelFamily parse_model_node(const YAML::Node& n, const std::string& path, Parameters& params,
                             State& initial) {
  require_map(n, path);
  ModelFamily f;
  if (n["channels"] || n["species"]) {
    f = custom_model(n, path);
    params = f.parameters;
    initial = f.initial_state;
    return f;
  }
  check_keys(n, path, {"name", "parameters", "initial"});
  if (!n["name"]) throw ConfigError(child(path, "name"), "required (or define species and channels)");
  const std::string name = as_string(n["name"], child(path, "name"));
  f = at_field(child(path, "name"), [&] { return catalog_model(name); });
  params = f.parameters;
  if (n["parameters"]) {
    const std::string p = child(path, "parameters");
    require_map(n["parameters"], p);
    for (const auto& kv : n["parameters"]) {
      const std::string key = kv.first.as<std::string>();
      if (!f.parameters.contains(key)) {
        throw ConfigError(child(p, key), "model '" + name + "' has no such parameter");
      }
      params[key] = as_double(kv.second, child(p, key));
    }
  }
  initial = n["initial"] ? parse_state(n["initial"], child(path, "initial"), f.species)
                         : f.initial_state;
  return f;
}

YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("malformed YAML: ") + e.what());
  }
}

std::vector<double> parse_grid(const YAML::Node& n, const std::string& path) {
  if (n.IsMap()) {
    check_keys(n, path, {"start", "stop", "step"});
    for (const char* k : {"start", "stop", "step"}) {
      if (!n[k]) throw ConfigError(child(path, k), "required");
    }
    const double start = as_double(n["start"], child(path, "start"));
    const double stop = as_double(n["stop"], child(path, "stop"));
    const double step = as_double(n["step"], child(path, "step"));
    if (!(step > 0.0) || !(stop >= start)) throw ConfigError(path, "need step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    std::vector<double> out;
    for (std::size_t i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::vector<double> out = as_doubles(n, path);
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw ConfigError(path, "grid times must increase");
  }
  return out;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::kSimulate:
      return "simulate";
    case Command::kCouple:
      return "couple";
    case Command::kSensitivity:
      return "sensitivity";
    case Command::kMlmc:
      return "mlmc";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::kSimulate, Command::kCouple, Command::kSensitivity, Command::kMlmc}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown command '" + std::string(name) + "'");
}

Functional ExperimentSpec::resolved_functional() const {
  const double T = horizon();
  if (functional.extinction) {
    if (functional.species.size() != 1) {
      throw ConfigError("functional.extinction", "exactly one species is required");
    }
    const double before = functional.before > 0.0 ? functional.before : T;
    if (before > T) throw ConfigError("functional.before", "must not exceed the horizon");
    return Functional::extinction(functional.species[0], before);
  }
  std::vector<std::size_t> species = functional.species;
  if (species.empty()) {
    for (std::size_t s = 0; s < model.species.size(); ++s) species.push_back(s);
  }
  std::vector<double> times = functional.times;
  if (times.empty()) times.push_back(T);
  for (double t : times) {
    if (!(t >= 0.0) || t > T) throw ConfigError("functional.times", "times must lie in [0, T]");
  }
  return Functional::species_at(std::move(species), std::move(times));
}

double evaluate_expression(std::string_view text, const Parameters& params) {
  return ExpressionParser(text, params).parse();
}

RateFunction parse_rate(std::string_view text, const Parameters& params,
                        std::shared_ptr<const EnvironmentPath> env, double level_max) {
  const auto [name, args] = split_call(text);
  auto arg = [&](std::size_t i) { return evaluate_expression(args[i], params); };
  auto arity = [&](std::size_t n) {
    if (args.size() != n) {
      throw std::invalid_argument("rate '" + name + "' takes " + std::to_string(n) +
                                  " argument(s), got " + std::to_string(args.size()));
    }
  };
  if (name.empty()) return RateFunction::constant(arg(0));
  if (name == "const") {
    arity(1);
    return RateFunction::constant(arg(0));
  }
  if (name == "sine") {
    arity(4);
    return RateFunction::sine(arg(0), arg(1), arg(2), arg(3));
  }
  if (name == "pulse") {
    arity(3);
    return RateFunction::pulse(arg(0), arg(1), arg(2));
  }
  if (name == "birth_pulse") {
    arity(3);
    const double s = arg(1);
    return RateFunction::pulse(birth_pulse_scale(arg(0), s), s, arg(2));
  }
  if (name == "modulated") {
    arity(1);
    if (env == nullptr) {
      throw std::invalid_argument("modulated rate needs an environment section");
    }
    return RateFunction::modulated(std::move(env), arg(0), level_max);
  }
  throw std::invalid_argument("unknown rate form '" + name +
                              "' (expected const, sine, pulse, birth_pulse or modulated)");
}

ModelFamily parse_model(std::string_view text) {
  Parameters p;
  State x;
  return parse_model_node(load_yaml(text), "model", p, x);
}

ExperimentSpec parse_config(std::string_view text) {
  const YAML::Node root = load_yaml(text);
  if (!root.IsDefined() || root.IsNull()) throw ConfigError("", "empty configuration");
  check_keys(root, "",
             {"model", "seed", "experiment", "workers", "T", "n", "method", "coupling", "tol",
              "window", "perturb", "functional", "grid", "target_sd", "mlmc", "output",
              "timing"});
  ExperimentSpec spec;
  if (!root["model"]) throw ConfigError("model", "required");
  spec.model = parse_model_node(root["model"], "model", spec.parameters, spec.initial);

  if (root["seed"]) spec.seed = as_count(root["seed"], "seed");
  if (root["experiment"]) spec.experiment = as_count(root["experiment"], "experiment");
  if (root["workers"]) spec.workers = static_cast<unsigned>(as_count(root["workers"], "workers"));
  if (root["T"]) {
    spec.T = as_double(root["T"], "T");
    if (!(spec.T > 0.0)) throw ConfigError("T", "must be > 0");
  }
  if (root["n"]) spec.n = as_count(root["n"], "n");
  if (root["method"]) {
    const std::string m = as_string(root["method"], "method");
    if (m == "extrande") {
      spec.method = ExactMethod::kExtrande;
    } else if (m == "hitting-time" || m == "hitting_time") {
      spec.method = ExactMethod::kHittingTime;
    } else {
      throw ConfigError("method", "expected extrande or hitting-time");
    }
  }
  if (root["coupling"]) {
    spec.coupling = at_field("coupling", [&] {
      return parse_coupling(as_string(root["coupling"], "coupling"));
    });
  }
  if (root["tol"]) {
    spec.tol = as_double(root["tol"], "tol");
    if (!(spec.tol > 0.0)) throw ConfigError("tol", "must be > 0");
  }
  if (root["window"]) {
    spec.window = as_double(root["window"], "window");
    if (!(spec.window >= 0.0)) throw ConfigError("window", "must be >= 0");
  }
  if (root["perturb"]) {
    const YAML::Node p = root["perturb"];
    require_map(p, "perturb");
    if (p.size() != 1) throw ConfigError("perturb", "expected exactly one {parameter: h}");
    const auto kv = *p.begin();
    spec.parameter = kv.first.as<std::string>();
    const std::string fp = child("perturb", spec.parameter);
    if (!spec.parameters.contains(spec.parameter)) throw ConfigError(fp, "unknown parameter");
    spec.h = as_double(kv.second, fp);
    if (!(spec.h > 0.0)) throw ConfigError(fp, "h must be > 0");
  }
  if (root["functional"]) {
    const YAML::Node f = root["functional"];
    check_keys(f, "functional", {"species", "times", "extinction", "before"});
    if (f["extinction"]) {
      spec.functional.extinction = true;
      spec.functional.species = {
          species_ref(f["extinction"], "functional.extinction", spec.model.species)};
      if (f["before"]) spec.functional.before = as_double(f["before"], "functional.before");
      if (f["species"] || f["times"]) {
        throw ConfigError("functional", "extinction excludes species/times");
      }
    } else {
      if (f["species"]) {
        spec.functional.species =
            species_refs(f["species"], "functional.species", spec.model.species);
      }
      if (f["times"]) spec.functional.times = as_doubles(f["times"], "functional.times");
    }
  }
  if (root["grid"]) spec.grid = parse_grid(root["grid"], "grid");
  if (root["target_sd"]) {
    spec.target_sd = as_double(root["target_sd"], "target_sd");
    if (!(spec.target_sd > 0.0)) throw ConfigError("target_sd", "must be > 0");
  }
  if (root["mlmc"]) {
    const YAML::Node m = root["mlmc"];
    check_keys(m, "mlmc",
               {"M", "ell0", "L", "step_scale", "target_sd", "exact_channels", "pilot",
                "max_samples"});
    MlmcConfig& c = spec.mlmc;
    if (m["M"]) c.M = static_cast<int>(as_count(m["M"], "mlmc.M"));
    if (m["ell0"]) c.ell0 = static_cast<int>(as_count(m["ell0"], "mlmc.ell0"));
    if (m["L"]) c.L = static_cast<int>(as_count(m["L"], "mlmc.L"));
    if (m["step_scale"]) c.step_scale = as_double(m["step_scale"], "mlmc.step_scale");
    if (m["target_sd"]) c.target_sd = as_double(m["target_sd"], "mlmc.target_sd");
    if (m["pilot"]) c.pilot = as_count(m["pilot"], "mlmc.pilot");
    if (m["max_samples"]) c.max_samples = as_count(m["max_samples"], "mlmc.max_samples");
    if (m["exact_channels"]) {
      const YAML::Node e = m["exact_channels"];
      require_list(e, "mlmc.exact_channels");
      for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string p = item("mlmc.exact_channels", i);
        const std::uint64_t k = as_count(e[i], p);
        if (k < 1) throw ConfigError(p, "channels are numbered from 1");
        c.exact_channels.push_back(k - 1);
      }
    }
  }
  if (root["output"]) {
    const YAML::Node o = root["output"];
    check_keys(o, "output", {"report", "paths", "curve"});
    if (o["report"]) spec.output.report = as_string(o["report"], "output.report");
    if (o["paths"]) spec.output.paths = as_string(o["paths"], "output.paths");
    if (o["curve"]) spec.output.curve = as_string(o["curve"], "output.curve");
  }
  if (root["timing"]) spec.timing = as_bool(root["timing"], "timing");
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open configuration file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace issa
