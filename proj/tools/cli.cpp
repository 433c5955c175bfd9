#include "cli.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "otb/bounds.hpp"
#include "otb/constants.hpp"
#include "otb/coupling.hpp"
#include "otb/errors.hpp"
#include "otb/harness.hpp"
#include "otb/measure.hpp"
#include "otb/ot.hpp"
#include "otb/partition.hpp"
#include "otb/tables.hpp"

namespace otb {

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kVerifyFailed = 3;
constexpr int kCapacity = 4;

nlohmann::ordered_json opt(const std::optional<double>& x) { return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr); }

int cmd_bound(const BoundQuery& q, const std::string& format, std::ostream& out) {
  BoundReport r = evaluate_bound(q);
  if (format == "json") {
    nlohmann::ordered_json j = {{"value", r.value},
                        {"regime", to_string(r.regime)},
                        {"rate_exponent", r.rate_exponent},
                        {"kappa", {{"value", r.kappa.value},
                                   {"norm", to_string(r.kappa.norm)},
                                   {"chosen_r", opt(r.kappa.chosen_r)},
                                   {"chosen_a", opt(r.kappa.chosen_a)},
                                   {"n_dependent", r.kappa.n_dependent}}},
                        {"theta", r.theta},
                        {"chosen_p_prime", opt(r.chosen_p_prime)},
                        {"route", to_string(r.route)},
                        {"formula_text", r.formula_text}};
    out << j.dump(2) << "\n";
    return kOk;
  }
  out << std::setprecision(10);
  out << "value: " << r.value << "\n";
  out << "regime: " << to_string(r.regime) << "\n";
  out << "rate exponent: " << r.rate_exponent << "\n";
  out << "kappa: " << r.kappa.value;
  if (r.kappa.chosen_r) out << " (r = " << *r.kappa.chosen_r << ")";
  if (r.kappa.chosen_a) out << " (a = " << *r.kappa.chosen_a << ")";
  out << "\n";
  out << "theta: " << r.theta << "\n";
  if (r.chosen_p_prime) out << "p': " << *r.chosen_p_prime << "\n";
  out << "route: " << to_string(r.route) << "\n";
  out << r.formula_text << "\n";
  return kOk;
}

int cmd_couple(const std::string& mu_path, const std::string& nu_path, double p, Norm norm, int depth,
               std::optional<double> a, const std::string& emit, std::ostream& out) {
  DiscreteMeasure mu = load_measure(mu_path), nu = load_measure(nu_path);
  bool inside = true;
  for (const DiscreteMeasure* m : {&mu, &nu})
    for (std::size_t i = 0; i < m->size(); ++i) inside = inside && norm_of(m->point(i), m->dim(), norm) < 1.0;
  out << std::setprecision(10);
  TransportPlan plan;
  if (!a && inside) {
    double r = default_ratio(norm);
    int k = depth >= 0 ? depth : default_depth(r, p);
    PartitionTree tree = build_union_partition(mu, nu, norm, k, r);
    CouplingResult c = hierarchical_coupling(mu, nu, tree, p);
    out << "construction: nested partitions (depth " << k << ", r = " << r << ")\n";
    out << "plan cost: " << c.plan.cost << "\n";
    out << "certified bound: " << c.certified_bound << "\n";
    out << "u:";
    for (double u : c.u) out << " " << u;
    out << "\n";
    plan = c.plan;
  } else {
    double av = a.value_or(2.0);
    AnnulusResult c = annulus_coupling(mu, nu, av, p, depth, norm);
    out << "construction: annuli (a = " << av << ")\n";
    out << "plan cost: " << c.plan.cost << "\n";
    out << "certified bound: " << c.certified_bound << "\n";
    for (const auto& s : c.shells)
      out << "shell " << s.shell << ": mu " << s.mu_mass << ", nu " << s.nu_mass << ", certified " << s.certified
          << "\n";
    plan = c.plan;
  }
  out << "triples: " << plan.triples.size() << "\n";
  if (!emit.empty()) save_plan(emit, plan);
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explicit bounds on the expected transport cost of empirical measures"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  BoundQuery bq;
  std::string norm_s = "max", lift_s = "auto", format = "text";
  auto* bound = app.add_subcommand("bound", "Evaluate the bound on E[T_p(mu_N, mu)]");
  bound->add_option("--d", bq.d, "Dimension")->required();
  bound->add_option("--p", bq.p, "Cost exponent")->required();
  bound->add_option("--q", bq.q, "Moment order")->required();
  bound->add_option("--moment", bq.moment, "Moment M_q of mu")->required();
  bound->add_option("--norm", norm_s, "max|euclid")->required()->check(CLI::IsMember({"max", "euclid"}));
  bound->add_option("--n", bq.n, "Sample size")->required();
  bound->add_flag("--refine-p", bq.refine_p, "Minimize over p' in [p, d/2)");
  bound->add_option("--lift", lift_s, "auto|native|sqrtd")->check(CLI::IsMember({"auto", "native", "sqrtd"}));
  bound->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));

  int table_id = 0;
  auto* table = app.add_subcommand("table", "Print one of the constant tables");
  table->add_option("--id", table_id, "Table number 1..8")->required()->check(CLI::Range(1, 8));
  std::string tformat = "text";
  table->add_option("--format", tformat, "text|csv|json")->check(CLI::IsMember({"text", "csv", "json"}));

  int kd_d = 0;
  auto* kd = app.add_subcommand("kd", "Covering constant bound K_d (d >= 8)");
  kd->add_option("--d", kd_d, "Dimension")->required();

  int tq_d = 0;
  double tq_p = 0, tq_c = 0;
  std::optional<long long> tq_n;
  bool tq_root = false;
  std::string tq_norm = "max";
  auto* tq = app.add_subcommand("theta-q", "Smallest q on the 0.1 grid with theta <= c");
  tq->add_option("--d", tq_d, "Dimension")->required();
  tq->add_option("--p", tq_p, "Cost exponent")->required();
  tq->add_option("--c", tq_c, "Target for theta")->required();
  tq->add_option("--norm", tq_norm, "max|euclid")->required()->check(CLI::IsMember({"max", "euclid"}));
  tq->add_option("--n", tq_n, "Sample size for the critical case (default 100)");
  tq->add_flag("--root", tq_root, "Compare theta^(1/p) instead of theta");

  std::string mu_path, nu_path, emit, c_norm = "max";
  double c_p = 1.0;
  int c_depth = -1;
  std::optional<double> c_a;
  auto* couple = app.add_subcommand("couple", "Hierarchical coupling with its certified bound");
  couple->add_option("--mu", mu_path, "Measure JSON")->required();
  couple->add_option("--nu", nu_path, "Measure JSON")->required();
  couple->add_option("--p", c_p, "Cost exponent")->required();
  couple->add_option("--norm", c_norm, "max|euclid")->required()->check(CLI::IsMember({"max", "euclid"}));
  couple->add_option("--depth", c_depth, "Partition depth");
  couple->add_option("--a", c_a, "Annulus ratio a > 1");
  couple->add_option("--emit-plan", emit, "Write the plan as JSON");

  std::string o_mu, o_nu, o_norm = "max";
  double o_p = 1.0;
  auto* otc = app.add_subcommand("ot", "Exact transport cost");
  otc->add_option("--mu", o_mu, "Measure JSON")->required();
  otc->add_option("--nu", o_nu, "Measure JSON")->required();
  otc->add_option("--p", o_p, "Cost exponent")->required();
  otc->add_option("--norm", o_norm, "max|euclid")->required()->check(CLI::IsMember({"max", "euclid"}));

  std::string v_config, v_format = "text";
  std::uint64_t v_seed = 0;
  std::optional<int> v_reps;
  auto* verify = app.add_subcommand("verify", "Monte Carlo check of the bound");
  verify->add_option("--config", v_config, "VerifyConfig JSON")->required();
  verify->add_option("--seed", v_seed, "RNG seed")->required();
  verify->add_option("--replicas", v_reps, "Override the replica count");
  verify->add_option("--format", v_format, "text|csv|json")->check(CLI::IsMember({"text", "csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }

  try {
    if (*bound) {
      bq.norm = parse_norm(norm_s);
      bq.lift_policy = parse_lift(lift_s);
      return cmd_bound(bq, format, out);
    }
    if (*table) {
      Table t = generate_table(table_id);
      out << (tformat == "csv" ? table_csv(t) : tformat == "json" ? table_json(t) : table_text(t));
      return kOk;
    }
    if (*kd) {
      KdComponents k = kd_components(kd_d);
      out << std::setprecision(10) << "K_d <= " << kd_upper(kd_d) << "\n"
          << "components: " << k.k1 << " " << k.k2 << " " << k.k3 << "\n";
      return kOk;
    }
    if (*tq) {
      double q = min_q_for_theta(tq_d, tq_p, tq_c, parse_norm(tq_norm), tq_n, tq_root);
      out << std::fixed << std::setprecision(1) << q << "\n";
      return kOk;
    }
    if (*couple) return cmd_couple(mu_path, nu_path, c_p, parse_norm(c_norm), c_depth, c_a, emit, out);
    if (*otc) {
      OtResult r = exact_transport_cost(load_measure(o_mu), load_measure(o_nu), o_p, parse_norm(o_norm));
      out << std::setprecision(15) << r.cost << "\n";
      return kOk;
    }
    if (*verify) {
      VerifyConfig c = load_config(v_config);
      c.seed = v_seed;
      if (v_reps) c.replicas = *v_reps;
      VerifyReport r = run_verification(c);
      out << (v_format == "csv" ? report_csv(r) : v_format == "json" ? report_json(r) : report_text(r));
      return r.all_pass() ? kOk : kVerifyFailed;
    }
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return kCapacity;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kInvalid;
}

}  // namespace otb
