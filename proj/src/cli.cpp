#include "sideinfo/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sideinfo/benefit.hpp"
#include "sideinfo/causality.hpp"
#include "sideinfo/error.hpp"
#include "sideinfo/model_io.hpp"
#include "sideinfo/parallel.hpp"
#include "sideinfo/sufficiency.hpp"
#include "sideinfo/var.hpp"

namespace sideinfo {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string joint, loss, builtin, model, var, csv, out, dist, g, g_file;
  double scale = 1.0;
  double tol = kSufficiencyTol;
  std::size_t n = 0, budget = 0, horizon = 0, nx = 0, ny = 0;
  std::uint64_t seed = 0;
  bool cond_w = false, conservation = false, pretty = false;
  int threads = 0;
  std::vector<std::string> eval;
};

// Report skeleton shared by every subcommand.
struct Report {
  Json doc;
  Json inputs = Json::object();

  void input(const std::string& role, const std::string& path) {
    inputs[role] = Json{{"path", path}, {"fnv1a", io::fnv1a_hex(io::read_file(path))}};
  }
};

Json action_json(const Action& a) {
  if (const auto* i = std::get_if<std::size_t>(&a)) return *i + 1;
  Json q = Json::array();
  for (double v : std::get<Dist>(a).probs()) q.push_back(v);
  return q;
}

Json joint_json(const Joint& j) {
  Json p = Json::array();
  for (std::size_t x = 0; x < j.rows(); ++x) {
    Json row = Json::array();
    for (std::size_t y = 0; y < j.cols(); ++y) row.push_back(io::format_decimal(j(x, y)));
    p.push_back(row);
  }
  return Json{{"rows", j.rows()}, {"cols", j.cols()}, {"p", p}};
}

Json transform_json(const Transform& t) {
  Json m = Json::array();
  for (std::size_t v : t.map()) m.push_back(v + 1);
  return m;
}

Json witness_json(const ViolationWitness& w) {
  return Json{{"kind", to_string(w.kind)},
              {"transform", transform_json(w.transform)},
              {"c_before", w.c_before},
              {"c_after", w.c_after},
              {"joint", joint_json(w.joint)}};
}

template <class T>
T load_as(const std::string& path, const char* what) {
  io::ModelFile f = io::read_model(path);
  if (auto* v = std::get_if<T>(&f.model)) return std::move(*v);
  throw Error(ErrorKind::SchemaError, path + ": expected a " + what + " document, found " + io::kind_name(f.model));
}

LossSpec load_loss(const Options& o, std::size_t n, Report& r) {
  if (o.loss.empty() == o.builtin.empty()) throw UsageError("give exactly one of --loss and --builtin");
  io::LossDoc doc;
  if (!o.loss.empty()) {
    r.input("loss", o.loss);
    doc = load_as<io::LossDoc>(o.loss, "loss");
  } else {
    doc.builtin = o.builtin;
  }
  if (o.scale != 1.0) {
    if (!(o.scale > 0.0)) throw UsageError("--scale must be positive");
    doc.scale *= o.scale;
  }
  const LossSpec l = doc.to_loss(n);
  r.doc["loss"] = l.name();
  return l;
}

std::vector<double> parse_q(const std::string& s) {
  std::vector<double> q;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) q.push_back(io::parse_decimal(item));
  return q;
}

// ------------------------------------------------------------ subcommands

int run_benefit(const Options& o, Report& r) {
  r.input("joint", o.joint);
  if (o.cond_w) {
    const Joint3 j = load_as<Joint3>(o.joint, "joint3");
    const LossSpec l = load_loss(o, j.nx(), r);
    r.doc["results"] = Json{{"conditional_c_value", conditional_benefit(l, j)}};
    return kExitOk;
  }
  const Joint j = load_as<Joint>(o.joint, "joint");
  const LossSpec l = load_loss(o, j.rows(), r);
  const BenefitReport b = benefit(l, j);
  Json mins = Json::array();
  for (const auto& m : b.per_y_minimizers) mins.push_back(m ? action_json(*m) : Json(nullptr));
  r.doc["results"] = Json{{"c_value", b.c_value},
                          {"risk_no_side", b.risk_no_side},
                          {"risk_with_side", b.risk_with_side},
                          {"per_y_minimizers", mins},
                          {"decomposition_residual", b.decomposition_residual}};
  return kExitOk;
}

int run_audit(const Options& o, Report& r) {
  r.input("joint", o.joint);
  const Joint j = load_as<Joint>(o.joint, "joint");
  const LossSpec l = load_loss(o, j.rows(), r);
  const DpaAudit a = audit_dpa(l, j, o.tol, o.seed);
  Json ws = Json::array();
  for (const auto& w : a.witnesses) ws.push_back(witness_json(w));
  r.doc["tolerances"] = Json{{"sufficiency", o.tol}};
  r.doc["results"] = Json{{"c_before", a.c_before},
                          {"merges_checked", a.merges_checked},
                          {"permutations_checked", a.permutations_checked},
                          {"clean", a.clean()},
                          {"max_equality_deviation", a.max_equality_deviation},
                          {"equality_deviations", a.equality_deviations}};
  r.doc["witnesses"] = ws;
  return a.clean() ? kExitOk : kExitViolation;
}

int run_find(const Options& o, Report& r) {
  const LossSpec l = load_loss(o, o.n, r);
  SearchStats stats;
  const auto w = find_violation(l, o.n, o.budget, o.seed, o.tol, &stats);
  r.doc["tolerances"] = Json{{"sufficiency", o.tol}};
  r.doc["results"] = Json{{"n", o.n},
                          {"budget", o.budget},
                          {"candidates", stats.candidates},
                          {"found", w.has_value()},
                          {"witness_index", stats.witness_index ? Json(*stats.witness_index) : Json(nullptr)}};
  r.doc["witnesses"] = w ? Json::array({witness_json(*w)}) : Json::array();
  if (!w) r.doc["results"]["witness"] = "none";
  return kExitOk;
}

int run_scoring_rule(const Options& o, Report& r) {
  if (o.g.empty() == o.g_file.empty()) throw UsageError("give exactly one of --g and --g-file");
  io::ConvexGDoc doc;
  if (!o.g_file.empty()) {
    r.input("g", o.g_file);
    doc = load_as<io::ConvexGDoc>(o.g_file, "convex_g");
  } else {
    doc.terms.emplace_back(o.g, 1.0);
  }
  if (o.eval.size() != 2) throw UsageError("--eval takes a symbol and a distribution");
  std::size_t x = 0;
  try {
    x = std::stoul(o.eval[0]);
  } catch (const std::exception&) {
    throw UsageError("--eval symbol must be a positive integer");
  }
  const Dist q = Dist::validate(parse_q(o.eval[1]));
  if (x < 1 || x > q.size()) throw Error(ErrorKind::UnknownSymbol, "symbol outside the alphabet of Q");
  const LossSpec l = savage_from_G(doc.to_oracle());
  r.doc["results"] = Json{{"g", l.name()}, {"x", x}, {"value", rule_loss(l, x - 1, q)}};
  return kExitOk;
}

int run_directed_info(const Options& o, Report& r) {
  r.input("model", o.model);
  const ProcessModel m = load_as<ProcessModel>(o.model, "markov_process");
  const DIReport d = conservation_check(m, o.horizon);
  r.doc["tolerances"] = Json{{"conservation", o.tol}};
  r.doc["results"] = Json{{"horizon", o.horizon},
                          {"forward", d.forward},
                          {"reverse_delayed", d.reverse_delayed},
                          {"forward_lagged", d.forward_lagged},
                          {"instantaneous", d.instantaneous},
                          {"total_mi", d.total_mi},
                          {"residual", d.residual},
                          {"refined_residual", d.refined_residual},
                          {"forward_terms", d.forward_terms},
                          {"reverse_terms", d.reverse_terms}};
  if (o.conservation && (d.residual > o.tol || d.refined_residual > o.tol)) return kExitInconsistent;
  return kExitOk;
}

int run_geweke(const Options& o, Report& r) {
  r.input("var", o.var);
  const VarModel v = load_as<VarModel>(o.var, "var_model");
  const GewekeReport g = geweke(v);
  r.doc["tolerances"] = Json{{"reflection", kReflectionTol}, {"max_lag", kMaxPredictorLag}};
  r.doc["results"] = Json{{"f", g.f},
                          {"full_variance", g.full_variance},
                          {"restricted_variance", g.restricted_variance},
                          {"lags", g.lags},
                          {"converged", g.converged}};
  return kExitOk;
}

int run_estimate(const Options& o, Report& r) {
  r.input("csv", o.csv);
  const auto e = io::empirical_joint(io::read_samples_csv(o.csv), o.nx, o.ny);
  const io::ModelFile f{io::kSchemaVersion, e.joint};
  io::write_model(o.out, f);
  r.doc["results"] = Json{{"sample_size", e.sample_size},
                          {"out", o.out},
                          {"out_fnv1a", io::fnv1a_hex(io::serialize_model(f))}};
  return kExitOk;
}

int run_mi(const Options& o, Report& r) {
  r.input("joint", o.joint);
  r.doc["results"] = Json{{"mutual_information", mutual_information(load_as<Joint>(o.joint, "joint"))}};
  return kExitOk;
}

int run_entropy(const Options& o, Report& r) {
  r.input("dist", o.dist);
  r.doc["results"] = Json{{"entropy", entropy(load_as<Dist>(o.dist, "dist"))}};
  return kExitOk;
}

void print_pretty(const Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) print_pretty(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) print_pretty(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << std::left << std::setw(40) << prefix << ' ' << j.dump() << '\n';
  }
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::DidNotConverge:
    case ErrorKind::NotProper:
      return kExitInternal;
    default:
      return kExitData;
  }
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv("SIDEINFO_SEED")) {
    try {
      o.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "SIDEINFO_SEED must be an unsigned integer\n";
      return kExitUsage;
    }
  }

  CLI::App app{"Benefit of side information, sufficiency audits and causality measures", "sideinfo"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.threads, "Worker count for parallel kernels (0: default)");
  app.add_flag("--pretty", o.pretty, "Print a human-readable table instead of JSON");
  app.add_option("--seed", o.seed, "Seed (default: SIDEINFO_SEED or 0)");

  auto loss_opts = [&o](CLI::App* s) {
    s->add_option("--loss", o.loss, "Loss model file");
    s->add_option("--builtin", o.builtin, "Built-in loss name");
    s->add_option("--scale", o.scale, "Positive loss scale");
  };

  auto* benefit_cmd = app.add_subcommand("benefit", "C(loss, P_XY) for a joint");
  benefit_cmd->add_option("--joint", o.joint)->required();
  benefit_cmd->add_flag("--cond-w", o.cond_w, "Joint file is a joint3 with common side information W");
  loss_opts(benefit_cmd);

  auto* audit_cmd = app.add_subcommand("audit-dpa", "Checks C over every sufficient transform");
  audit_cmd->add_option("--joint", o.joint)->required();
  audit_cmd->add_option("--tol", o.tol);
  loss_opts(audit_cmd);

  auto* find_cmd = app.add_subcommand("find-violation", "Searches for a data-processing witness");
  find_cmd->add_option("--n", o.n)->required()->check(CLI::Range(2, 12));
  find_cmd->add_option("--budget", o.budget)->required();
  find_cmd->add_option("--tol", o.tol);
  loss_opts(find_cmd);

  auto* rule_cmd = app.add_subcommand("scoring-rule", "Evaluates the scoring rule built from G");
  rule_cmd->add_option("--g", o.g, "Named convex function");
  rule_cmd->add_option("--g-file", o.g_file, "convex_g model file");
  rule_cmd->add_option("--eval", o.eval, "Symbol (1-based) and comma-separated Q")->expected(2)->required();

  auto* di_cmd = app.add_subcommand("directed-info", "Directed information and the conservation law");
  di_cmd->add_option("--model", o.model)->required();
  di_cmd->add_option("--horizon", o.horizon)->required()->check(CLI::PositiveNumber);
  di_cmd->add_flag("--conservation", o.conservation, "Exit 3 when the conservation residual exceeds --tol");
  di_cmd->add_option("--tol", o.tol);

  auto* geweke_cmd = app.add_subcommand("geweke", "Geweke's F for a bivariate VAR");
  geweke_cmd->add_option("--var", o.var)->required();

  auto* est_cmd = app.add_subcommand("estimate", "Empirical joint from x,y samples");
  est_cmd->add_option("--csv", o.csv)->required();
  est_cmd->add_option("--nx", o.nx)->required()->check(CLI::PositiveNumber);
  est_cmd->add_option("--ny", o.ny)->required()->check(CLI::PositiveNumber);
  est_cmd->add_option("--out", o.out)->required();

  auto* mi_cmd = app.add_subcommand("mi", "Mutual information of a joint");
  mi_cmd->add_option("--joint", o.joint)->required();
  auto* ent_cmd = app.add_subcommand("entropy", "Entropy of a distribution");
  ent_cmd->add_option("--dist", o.dist)->required();

  std::vector<const char*> argv{"sideinfo"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Echo the command without worker settings so reports match across them.
  Json echo = Json::array();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--threads") {
      ++i;
      continue;
    }
    if (args[i].rfind("--threads=", 0) == 0) continue;
    echo.push_back(args[i]);
  }

  Report r;
  const CLI::App* sub = app.get_subcommands().front();
  r.doc["command"] = sub->get_name();
  r.doc["args"] = echo;
  r.doc["seed"] = o.seed;

  set_worker_count(o.threads);
  int code = kExitOk;
  try {
    if (sub == benefit_cmd) code = run_benefit(o, r);
    else if (sub == audit_cmd) code = run_audit(o, r);
    else if (sub == find_cmd) code = run_find(o, r);
    else if (sub == rule_cmd) code = run_scoring_rule(o, r);
    else if (sub == di_cmd) code = run_directed_info(o, r);
    else if (sub == geweke_cmd) code = run_geweke(o, r);
    else if (sub == est_cmd) code = run_estimate(o, r);
    else if (sub == mi_cmd) code = run_mi(o, r);
    else code = run_entropy(o, r);
  } catch (const UsageError& e) {
    set_worker_count(0);
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    set_worker_count(0);
    err << e.what() << '\n';
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    set_worker_count(0);
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  set_worker_count(0);

  Json doc;
  for (const auto& key : {"command", "args", "seed"}) doc[key] = r.doc[key];
  doc["inputs"] = r.inputs;
  for (const auto& [k, v] : r.doc.items())
    if (!doc.contains(k)) doc[k] = v;
  if (o.pretty) {
    print_pretty(doc, "", out);
  } else {
    out << doc.dump(2) << '\n';
  }
  return code;
}

}  // namespace sideinfo
