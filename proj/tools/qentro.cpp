// qentro: entropy, channel and capacity computations from JSON inputs.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qentro/json_io.hpp"
#include "qentro/qentro.hpp"

namespace {

using qentro::io::json;
using qentro::io::number;

struct Options {
  std::string channel, state, family, constraint, ensemble, out;
  std::string format;
  std::string log_base = "e";
  std::string input_rule = "uniform";
  std::vector<double> weights;
  std::vector<std::int64_t> n_list{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  std::vector<long> dims;
  long k = 1;
  long m = 0;
  int restarts = 20;
  int samples = 200;
  double tol = 1e-10;
  std::uint64_t seed = 0;
};

// entropy-valued outputs are divided by this
double unit = 1.0;

json ent(double nats) { return number(nats / unit); }

json entropies(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(ent(x));
  return a;
}

qentro::PositiveOperator load_state(const std::string& path) {
  if (path.empty()) throw qentro::Error(qentro::ErrorKind::ParseError, "--state is required");
  return qentro::io::state_from_json(qentro::io::read_file(path), path);
}

qentro::KrausOperation load_channel(const std::string& path) {
  if (path.empty()) throw qentro::Error(qentro::ErrorKind::ParseError, "--channel is required");
  return qentro::io::channel_from_json(qentro::io::read_file(path), path);
}

qentro::AnalyticKrausFamily load_family(const std::string& path) {
  if (path.empty()) throw qentro::Error(qentro::ErrorKind::ParseError, "--family is required");
  return qentro::io::family_from_json(qentro::io::read_file(path), path);
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Tables (arrays of flat objects) become one row per entry; objects become key,value lines.
std::string render_csv(const json& j) {
  std::ostringstream os;
  if (j.is_array()) {
    if (j.empty()) return "";
    bool first = true;
    for (auto it = j[0].begin(); it != j[0].end(); ++it) {
      os << (first ? "" : ",") << it.key();
      first = false;
    }
    os << "\n";
    for (const auto& row : j) {
      first = true;
      for (auto it = row.begin(); it != row.end(); ++it) {
        os << (first ? "" : ",") << csv_cell(*it);
        first = false;
      }
      os << "\n";
    }
    return os.str();
  }
  os << "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!it->is_structured()) os << it.key() << "," << csv_cell(*it) << "\n";
  return os.str();
}

void emit(const json& report, const Options& o, const std::string& default_format) {
  const std::string fmt = o.format.empty() ? default_format : o.format;
  const std::string text = fmt == "csv" ? render_csv(report) : report.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw qentro::Error(qentro::ErrorKind::ParseError, "cannot write " + o.out);
  f << text;
}

json with_base(json j, const Options& o) {
  j["log_base"] = o.log_base;
  return j;
}

void cmd_entropy(const Options& o) {
  const auto rho = load_state(o.state);
  emit(with_base({{"entropy", ent(qentro::quantum_entropy(rho))}}, o), o, "json");
}

void cmd_channel(const std::string& sub, const Options& o) {
  const auto phi = load_channel(o.channel);
  if (sub == "complement") {
    emit(qentro::io::channel_to_json(qentro::complement(phi)), o, "json");
  } else if (sub == "apply") {
    const auto out = qentro::apply(phi, load_state(o.state));
    emit({{"output", qentro::io::matrix_to_json(out.matrix())}, {"trace", number(out.trace())}}, o, "json");
  } else if (sub == "output-entropy") {
    emit(with_base({{"output_entropy", ent(qentro::output_entropy(phi, load_state(o.state)))}}, o), o, "json");
  } else if (sub == "coherent-info") {
    emit(with_base({{"coherent_information", ent(qentro::coherent_information(phi, load_state(o.state)))}}, o), o,
         "json");
  } else if (sub == "dual-check") {
    // Tr[Phi(A) X] = Tr[A Phi^*(X)] on seeded random A, X
    double worst = 0.0;
    for (int s = 0; s < o.samples; ++s) {
      qentro::Rng rng(qentro::derive_seed(o.seed, static_cast<std::uint64_t>(s)));
      const qentro::Matrix a = qentro::ginibre(phi.dim_in(), phi.dim_in(), rng);
      const qentro::Matrix x = qentro::ginibre(phi.dim_out(), phi.dim_out(), rng);
      const qentro::cplx lhs = (qentro::detail::apply_raw(phi, a) * x).trace();
      const qentro::cplx rhs = (a * qentro::detail::dual_raw(phi, x)).trace();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    const double defect = qentro::max_abs_entry(phi.defect());
    emit({{"max_deviation", number(worst)},
          {"samples", o.samples},
          {"is_channel", phi.is_channel()},
          {"trace_defect", number(defect)}},
         o, "json");
  } else if (sub == "gap-bound") {
    const auto r = qentro::complement_gap_bound_check(phi, o.samples, o.seed);
    emit(with_base({{"bound", ent(r.bound)},
                    {"max_observed_gap", ent(r.max_gap)},
                    {"samples", r.samples},
                    {"violations", r.violations}},
                   o),
         o, "json");
  }
}

void cmd_analyze(const std::string& sub, const Options& o) {
  const auto fam = load_family(o.family);
  if (sub == "classify") {
    const auto r = qentro::series_classifier(fam);
    emit({{"operation", std::string(qentro::to_string(r.operation))},
          {"complement", std::string(qentro::to_string(r.complement))},
          {"reasons", r.reasons}},
         o, "json");
    return;
  }
  qentro::InputRule rule = qentro::InputRule::Uniform;
  if (o.input_rule == "maximizing") rule = qentro::InputRule::Maximizing;
  if (!o.weights.empty()) rule = qentro::InputRule::Custom;
  const auto rows = qentro::truncation_sweep(fam, o.n_list, rule, o.weights);
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back(json::object());  // keys come out sorted: N, dim, entropy, ...
    auto& t = table.back();
    t["N"] = r.n;
    t["dim"] = r.dim;
    t["entropy"] = ent(r.entropy);
    t["increment"] = ent(r.increment);
    t["tail_entropy"] = ent(r.tail_entropy);
    t["tail_trace"] = number(r.tail_trace);
  }
  emit(table, o, "csv");
}

qentro::OptimizerOptions optimizer_options(const Options& o) {
  qentro::OptimizerOptions opt;
  opt.m = static_cast<int>(o.m);
  opt.restarts = o.restarts;
  opt.tol = o.tol;
  opt.seed = o.seed;
  return opt;
}

void cmd_optimize(const std::string& sub, const Options& o) {
  if (sub == "holevo") {
    const auto phi = load_channel(o.channel);
    const auto c = o.constraint.empty()
                       ? qentro::ConstraintSet::unconstrained()
                       : qentro::io::constraint_from_json(qentro::io::read_file(o.constraint), o.constraint);
    const auto r = qentro::holevo_capacity(phi, c, optimizer_options(o));
    const auto rep = qentro::optimal_ensemble_report(phi, r.ensemble);
    emit(with_base({{"value", ent(r.value)},
                    {"bound", "lower"},
                    {"restart", r.restart},
                    {"ensemble", qentro::io::ensemble_to_json(r.ensemble)},
                    {"divergences", entropies(rep.divergences)},
                    {"equal_divergence", rep.optimal()}},
                   o),
         o, "json");
  } else if (sub == "eof") {
    if (o.dims.size() != 2)
      throw qentro::Error(qentro::ErrorKind::ParseError, "--dims dA,dB is required");
    const auto rho = load_state(o.state);
    const auto r = qentro::eof(rho, o.dims[0], o.dims[1], optimizer_options(o));
    json parts = json::array();
    for (std::size_t i = 0; i < r.weights.size(); ++i)
      parts.push_back({{"weight", number(r.weights[i])}, {"vector", qentro::io::matrix_to_json(r.states[i])}});
    emit(with_base({{"value", ent(r.value)}, {"bound", "upper"}, {"restart", r.restart}, {"decomposition", parts}},
                   o),
         o, "json");
  } else if (sub == "divergence-center") {
    if (o.ensemble.empty()) throw qentro::Error(qentro::ErrorKind::ParseError, "--ensemble is required");
    const auto ens = qentro::io::ensemble_from_json(qentro::io::read_file(o.ensemble), o.ensemble);
    const auto r = qentro::divergence_center(ens.states(), std::max(o.tol, 1e-9));
    emit(with_base({{"radius", ent(r.radius)},
                    {"lower", ent(r.lower)},
                    {"center", qentro::io::matrix_to_json(r.center.matrix())},
                    {"weights", qentro::io::vector_to_json(r.weights)},
                    {"iterations", r.iterations},
                    {"converged", r.converged}},
                   o),
         o, "json");
  } else if (sub == "hk") {
    const auto phi = load_channel(o.channel);
    const auto rho = load_state(o.state);
    const long m = o.m > 0 ? o.m : std::max<long>(1, (rho.rank() + o.k - 1) / o.k) + 1;
    const auto r = qentro::brute_force_hk(phi, rho, o.k, m, o.restarts, o.seed, o.tol);
    const auto a = qentro::approximator(phi, rho, o.k);
    emit(with_base({{"value", ent(r.value)},
                    {"bound", "lower"},
                    {"restart", r.restart},
                    {"approximator_lower", ent(a.lower_bound)},
                    {"gap_certificate", ent(a.gap_certificate)},
                    {"output_entropy", ent(qentro::output_entropy(phi, rho))}},
                   o),
         o, "json");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy, channel and capacity computations for finite-dimensional quantum operations"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--log-base", o.log_base, "entropy unit")->check(CLI::IsMember({"e", "2"}));
    c->add_option("--out", o.out, "write the report to this file");
    c->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--tol", o.tol, "optimizer tolerance")->check(CLI::PositiveNumber);
  };

  auto* entropy = app.add_subcommand("entropy", "entropy of a positive operator");
  entropy->add_option("--state", o.state, "state JSON")->required();
  common(entropy);

  auto* channel = app.add_subcommand("channel", "operations on a Kraus set");
  channel->require_subcommand(1);
  for (const char* name : {"apply", "complement", "dual-check", "output-entropy", "coherent-info", "gap-bound"}) {
    auto* s = channel->add_subcommand(name);
    s->add_option("--channel", o.channel, "channel JSON")->required();
    s->add_option("--state", o.state, "state JSON");
    s->add_option("--samples", o.samples, "random samples")->check(CLI::PositiveNumber);
    common(s);
  }

  auto* analyze = app.add_subcommand("analyze", "analytic Kraus families");
  analyze->require_subcommand(1);
  for (const char* name : {"classify", "sweep"}) {
    auto* s = analyze->add_subcommand(name);
    s->add_option("--family", o.family, "family JSON")->required();
    s->add_option("--n-list", o.n_list, "truncation sizes")->delimiter(',');
    s->add_option("--input", o.input_rule, "input rule")->check(CLI::IsMember({"uniform", "maximizing"}));
    s->add_option("--weights", o.weights, "custom block weights")->delimiter(',');
    common(s);
  }

  auto* optimize = app.add_subcommand("optimize", "capacity and decomposition searches");
  optimize->require_subcommand(1);
  for (const char* name : {"holevo", "eof", "divergence-center", "hk"}) {
    auto* s = optimize->add_subcommand(name);
    s->add_option("--channel", o.channel, "channel JSON");
    s->add_option("--state", o.state, "state JSON");
    s->add_option("--constraint", o.constraint, "constraint JSON");
    s->add_option("--ensemble", o.ensemble, "ensemble JSON");
    s->add_option("--dims", o.dims, "subsystem dimensions dA,dB")->delimiter(',');
    s->add_option("--k", o.k, "part rank")->check(CLI::PositiveNumber);
    s->add_option("--m", o.m, "number of parts")->check(CLI::NonNegativeNumber);
    s->add_option("--restarts", o.restarts, "optimizer restarts")->check(CLI::PositiveNumber);
    common(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  unit = o.log_base == "2" ? std::log(2.0) : 1.0;
  try {
    auto leaf = [](CLI::App* parent) {
      for (auto* s : parent->get_subcommands()) return s->get_name();
      return std::string();
    };
    if (entropy->parsed())
      cmd_entropy(o);
    else if (channel->parsed())
      cmd_channel(leaf(channel), o);
    else if (analyze->parsed())
      cmd_analyze(leaf(analyze), o);
    else if (optimize->parsed())
      cmd_optimize(leaf(optimize), o);
  } catch (const qentro::Error& e) {
    std::cerr << "qentro: " << e.what() << "\n";
    return qentro::exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "qentro: ParseError: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qentro: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
