#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "pbkit/approx.hpp"
#include "pbkit/golden.hpp"
#include "pbkit/io.hpp"
#include "pbkit/learning.hpp"
#include "pbkit/ordering.hpp"

namespace pbkit {

struct cli_result {
  int exit_code = 0;
  std::string out;   // stdout payload (JSON or CSV)
  std::string err;   // stderr payload (manifest, usage messages)
};

namespace cli_detail {

inline arith_mode default_mode() {
  const char* env = std::getenv("PBKIT_MODE");
  if (env && std::string(env) == "rational") return arith_mode::rational_mode;
  return arith_mode::float_mode;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct manifest_builder {
  run_manifest m;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void input(const std::string& arg) {
    std::ifstream probe(arg);
    if (probe)
      m.input_digests.push_back(digest_hex(read_file(arg)));
    else
      m.input_digests.push_back(digest_hex(arg));
  }
  std::string finish(const std::string& output) {
    m.output_digest = digest_hex(output);
    m.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return m.to_json().dump();
  }
};

inline json order_report_to_json(const order_report& rep) {
  json out;
  out["relation"] = to_string(rep.relation);
  json xs = json::array();
  for (const auto& x : rep.crossing_points) xs.push_back(format_rational(x));
  out["crossing_points"] = std::move(xs);
  json detail = json::array();
  for (const auto& [pt, diff] : rep.detail)
    detail.push_back(json{{"point", format_rational(pt)}, {"cdf_diff", diff}});
  out["detail"] = std::move(detail);
  return out;
}

inline std::vector<std::pair<int, int>> pairs_from_csv(const std::string& text) {
  std::vector<std::pair<int, int>> pairs;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.find("c1") != std::string::npos) continue;  // header
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    int a, b;
    if (ls >> a >> b) pairs.emplace_back(a, b);
  }
  if (pairs.empty()) throw std::domain_error("no (c1,c2) pairs found");
  return pairs;
}

inline std::vector<long> draws_from_csv(const std::string& text) {
  std::vector<long> draws;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    draws.push_back(std::stol(line));
  }
  if (draws.empty()) throw std::domain_error("no samples found");
  return draws;
}

inline pmf_method method_from_string(const std::string& s) {
  if (s == "brute_force") return pmf_method::brute_force;
  if (s == "convolution") return pmf_method::convolution;
  if (s == "recursion_cl") return pmf_method::recursion_cl;
  if (s == "recursion_glr") return pmf_method::recursion_glr;
  if (s == "dft") return pmf_method::dft;
  throw std::domain_error("unknown pmf method: " + s);
}

}  // namespace cli_detail

// The whole command surface as a pure function of argv, so tests can drive it
// in-process. stdout carries the result (JSON or CSV); the reproducibility
// manifest goes to stderr, keeping rational-mode stdout byte-stable.
inline cli_result run_cli(std::vector<std::string> args) {
  using namespace cli_detail;
  cli_result res;
  manifest_builder manifest;
  {
    std::ostringstream cmd;
    cmd << "pbkit";
    for (const auto& a : args) cmd << " " << a;
    manifest.m.command = cmd.str();
  }

  CLI::App app{"Poisson binomial distribution toolkit"};
  app.require_subcommand(1);
  std::string mode_flag;
  app.add_option("--arith", mode_flag, "float or rational (default: PBKIT_MODE or float)");

  // pmf
  auto* c_pmf = app.add_subcommand("pmf", "exact probability mass function");
  std::string pmf_probs, pmf_method_s = "convolution";
  bool pmf_csv = false;
  c_pmf->add_option("--probs", pmf_probs)->required();
  c_pmf->add_option("--method", pmf_method_s);
  c_pmf->add_flag("--csv", pmf_csv);

  // cdf
  auto* c_cdf = app.add_subcommand("cdf", "cumulative distribution function");
  std::string cdf_probs;
  long cdf_k = 0;
  c_cdf->add_option("--probs", cdf_probs)->required();
  c_cdf->add_option("--k", cdf_k)->required();

  // mode
  auto* c_mode = app.add_subcommand("mode", "mode location rule");
  std::string mode_probs;
  c_mode->add_option("--probs", mode_probs)->required();

  // approx
  auto* c_approx = app.add_subcommand("approx", "approximation reports");
  auto* c_approx_report = c_approx->add_subcommand("report", "bound report");
  std::string ar_probs, ar_family = "poisson";
  c_approx_report->add_option("--probs", ar_probs)->required();
  c_approx_report->add_option("--family", ar_family)->required();
  auto* c_approx_sens = c_approx->add_subcommand("sensitivity", "matched-pair worst case");
  std::string as_pairs;
  long as_t = 0;
  double as_alpha = 0.05;
  c_approx_sens->add_option("--pairs", as_pairs)->required();
  c_approx_sens->add_option("--t", as_t)->required();
  c_approx_sens->add_option("--alpha", as_alpha)->required();
  c_approx->require_subcommand(1);

  // top-level sensitivity alias
  auto* c_sens = app.add_subcommand("sensitivity", "alias of approx sensitivity");
  std::string s_pairs;
  long s_t = 0;
  double s_alpha = 0.05;
  c_sens->add_option("--pairs", s_pairs)->required();
  c_sens->add_option("--t", s_t)->required();
  c_sens->add_option("--alpha", s_alpha)->required();

  // order
  auto* c_order = app.add_subcommand("order", "stochastic order tests");
  auto* c_order_cmp = c_order->add_subcommand("compare", "compare two parameter vectors");
  std::string oc_p, oc_q, oc_test = "dominance";
  double oc_binp = -1;
  c_order_cmp->add_option("--p", oc_p)->required();
  c_order_cmp->add_option("--q", oc_q);
  c_order_cmp->add_option("--test", oc_test)->required();
  c_order_cmp->add_option("--bin-p", oc_binp, "binomial parameter for the geometric-mean test");
  c_order->require_subcommand(1);

  // poly
  auto* c_poly = app.add_subcommand("poly", "polynomial certificates");
  auto* c_poly_check = c_poly->add_subcommand("check", "run a certificate test");
  std::string pc_in, pc_test = "real";
  long pc_stride = 2;
  c_poly_check->add_option("--in", pc_in)->required();
  c_poly_check->add_option("--test", pc_test)->required();
  c_poly_check->add_option("--stride", pc_stride);
  c_poly->require_subcommand(1);

  // dist
  auto* c_dist = app.add_subcommand("dist", "distances between two distributions");
  std::string d_metric, d_a, d_b;
  double d_p = 1.0;
  c_dist->add_option("metric", d_metric, "tv|kolmogorov|wp|winf")->required();
  c_dist->add_option("a", d_a)->required();
  c_dist->add_option("b", d_b)->required();
  c_dist->add_option("--p", d_p, "order for wp");

  // acc
  auto* c_acc = app.add_subcommand("acc", "best real-rooted lattice approximation");
  std::string acc_source;
  std::string acc_scale = "2/3";
  long acc_maxdeg = -1;
  c_acc->add_option("--source", acc_source);
  c_acc->add_option("--scale", acc_scale);
  c_acc->add_option("--max-degree", acc_maxdeg);
  auto* c_acc_app = c_acc->add_subcommand("appendix", "reproduce the small-case table");

  // learn
  auto* c_learn = app.add_subcommand("learn", "proper parameter learning");
  std::string l_samples;
  long l_n = 0;
  double l_eps = 0.1, l_delta = 0.1;
  c_learn->add_option("--samples", l_samples);
  c_learn->add_option("--n", l_n);
  c_learn->add_option("--eps", l_eps);
  c_learn->add_option("--delta", l_delta);
  auto* c_learn_eval = c_learn->add_subcommand("eval", "seeded evaluation harness");
  std::string le_truth;
  long le_trials = 100;
  double le_eps = 0.1, le_delta = 0.1;
  std::uint64_t le_seed = 0;
  bool le_seed_set = false;
  c_learn_eval->add_option("--truth", le_truth)->required();
  c_learn_eval->add_option("--trials", le_trials);
  c_learn_eval->add_option("--eps", le_eps);
  c_learn_eval->add_option("--delta", le_delta);
  c_learn_eval->add_option("--seed", le_seed)->each([&](const std::string&) { le_seed_set = true; });

  // paper-check
  auto* c_check = app.add_subcommand("paper-check", "run the built-in golden reference suite");
  std::uint64_t check_seed = 20240801;
  c_check->add_option("--seed", check_seed);

  std::vector<const char*> argv;
  argv.push_back("pbkit");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    res.out = app.help();
    res.exit_code = 0;
    return res;
  } catch (const CLI::ParseError& e) {
    res.err = std::string("usage error: ") + e.what() + "\n";
    res.out = json{{"error", e.what()}, {"kind", "usage"}}.dump();
    res.exit_code = 2;
    return res;
  }

  const bool rational_out = [&] {
    if (mode_flag == "rational") return true;
    if (mode_flag == "float") return false;
    return default_mode() == arith_mode::rational_mode;
  }();

  json result;
  std::string payload;
  int exit_code = 0;

  try {
    if (c_pmf->parsed()) {
      manifest.input(pmf_probs);
      auto method = method_from_string(pmf_method_s);
      auto params_q = parse_params_arg(pmf_probs);
      if (rational_out && method != pmf_method::dft) {
        auto d = pb_pmf(params_q, method);
        result["pmf"] = dist_to_json(d.pmf)["masses"];
        auto [mu, var] = mean_var(params_q);
        result["mean"] = format_rational(mu);
        result["variance"] = format_rational(var);
        if (pmf_csv) payload = dist_to_csv(d.pmf);
      } else {
        cl_diagnostics diag;
        auto d = pb_pmf(to_float_params(params_q), method, &diag);
        json masses = json::array();
        for (double m : d.pmf.masses) masses.push_back(m);
        result["pmf"] = std::move(masses);
        auto [mu, var] = mean_var(to_float_params(params_q));
        result["mean"] = mu;
        result["variance"] = var;
        if (method == pmf_method::recursion_cl) {
          result["diagnostics"] = json{{"loss_of_significance", diag.loss_of_significance},
                                       {"max_partial_ratio", diag.max_partial_ratio},
                                       {"precision_digits", diag.precision_digits},
                                       {"recommendation", diag.recommendation}};
        }
        if (pmf_csv) payload = dist_to_csv(d.pmf);
      }
      result["schema_version"] = kSchemaVersion;
    } else if (c_cdf->parsed()) {
      manifest.input(cdf_probs);
      auto params_q = parse_params_arg(cdf_probs);
      auto params = to_float_params(params_q);
      auto d = pb_pmf(params);
      double prefix = pb_cdf(d, cdf_k);
      double fourier = pb_cdf_fourier(params, cdf_k);
      result = json{{"schema_version", kSchemaVersion},
                    {"k", cdf_k},
                    {"cdf", prefix},
                    {"crosscheck", json{{"fourier", fourier}, {"agree", std::fabs(prefix - fourier) < 1e-10}}}};
      if (rational_out) {
        auto dq = pb_pmf(params_q);
        result["cdf_exact"] = format_rational(pb_cdf(dq, cdf_k));
      }
    } else if (c_mode->parsed()) {
      manifest.input(mode_probs);
      auto params = to_float_params(parse_params_arg(mode_probs));
      auto r = darroch_mode(params);
      result["schema_version"] = kSchemaVersion;
      result["branch"] = r.branch;
      if (r.two_modes)
        result["mode"] = json::array({r.mode, r.mode + 1});
      else
        result["mode"] = r.mode;
    } else if (c_approx_report->parsed()) {
      manifest.input(ar_probs);
      auto params = to_float_params(parse_params_arg(ar_probs));
      result["schema_version"] = kSchemaVersion;
      result["family"] = ar_family;
      if (ar_family == "poisson") {
        auto r = poisson_approx_report(params);
        result["tv"] = r.tv;
        result["lower"] = r.lower;
        result["upper"] = r.upper;
        result["truncation"] = r.truncation;
        result["sandwich_holds"] =
            r.tv <= r.upper + 1e-9 + r.truncation && r.tv >= r.lower - 1e-9 - r.truncation;
      } else if (ar_family == "tp") {
        auto r = translated_poisson_report(params);
        result["tv"] = r.tv;
        result["bound"] = r.bound;
        result["shift"] = r.shift;
        result["rate"] = r.rate;
        result["truncation"] = r.truncation;
        result["bound_holds"] = r.tv <= r.bound + 1e-9 + r.truncation;
      } else if (ar_family == "normal") {
        auto r = normal_bound_report(params);
        result["kolmogorov"] = r.kolmogorov;
        result["shi_bound"] = r.shi_bound;
        result["pointwise_max"] = r.pointwise_max;
        result["sigma_scaled_pointwise"] = r.sigma_scaled_pointwise;
        result["bound_holds"] = r.kolmogorov <= r.shi_bound + 1e-9;
      } else if (ar_family == "binomial") {
        auto r = ehm_binomial_report(params);
        result["tv"] = r.tv;
        result["bound"] = r.bound;
        result["bound_holds"] = r.tv <= r.bound + 1e-9;
      } else {
        throw std::domain_error("unknown family: " + ar_family);
      }
    } else if (c_approx_sens->parsed() || c_sens->parsed()) {
      std::string pairs_arg = c_sens->parsed() ? s_pairs : as_pairs;
      long t = c_sens->parsed() ? s_t : as_t;
      double alpha = c_sens->parsed() ? s_alpha : as_alpha;
      manifest.input(pairs_arg);
      auto pairs = pairs_from_csv(read_file(pairs_arg));
      auto search = sensitivity_max_gamma(pairs, t, alpha);
      sensitivity_instance at_star{pairs, search.rejected_at_one ? 1.0 : std::min(search.gamma_star, 1e6),
                                   t, alpha};
      auto tail = sensitivity_worst_tail(at_star);
      result = json{{"schema_version", kSchemaVersion},
                    {"gamma_star", search.unbounded ? json("inf") : json(search.gamma_star)},
                    {"rejected_at_gamma_one", search.rejected_at_one},
                    {"worst_tail", tail.exact},
                    {"tp_approx", tail.tp_approx},
                    {"monotone_precheck", search.monotone}};
    } else if (c_order_cmp->parsed()) {
      manifest.input(oc_p);
      auto p = to_float_params(parse_params_arg(oc_p));
      result["schema_version"] = kSchemaVersion;
      result["test"] = oc_test;
      if (oc_test == "hoeffding") {
        auto r = hoeffding_compare(p);
        result["report"] = order_report_to_json(r.report);
        result["part1_ok"] = r.part1_ok;
        result["convex_order"] = r.convex_order;
        result["equality_case"] = r.equality_case;
        result["max_stop_loss_gap"] = r.max_stop_loss_gap;
      } else if (oc_test == "gleser") {
        if (oc_q.empty()) throw std::domain_error("gleser needs --q");
        manifest.input(oc_q);
        auto q = to_float_params(parse_params_arg(oc_q));
        auto r = gleser_compare(p, q);
        result["applicable"] = r.applicable;
        if (r.applicable) {
          result["report"] = order_report_to_json(r.report);
          result["cdf_pattern_ok"] = r.cdf_pattern_ok;
          result["variance_ok"] = r.variance_ok;
        }
      } else if (oc_test == "dominance") {
        if (oc_q.empty()) throw std::domain_error("dominance needs --q");
        manifest.input(oc_q);
        auto q = to_float_params(parse_params_arg(oc_q));
        auto r = stochastic_dominance(pb_pmf(p).pmf, pb_pmf(q).pmf);
        result["report"] = order_report_to_json(r);
      } else if (oc_test == "bsc") {
        if (oc_binp < 0) throw std::domain_error("bsc needs --bin-p");
        auto r = bsc_conditions(p, oc_binp);
        result["gm_success"] = r.gm_success;
        result["gm_failure"] = r.gm_failure;
        result["dominates_bin_predicted"] = r.dominates_bin_predicted;
        result["dominated_by_bin_predicted"] = r.dominated_by_bin_predicted;
        result["dominates_bin_observed"] = r.dominates_bin_observed;
        result["dominated_by_bin_observed"] = r.dominated_by_bin_observed;
        result["consistent"] = r.consistent;
      } else {
        throw std::domain_error("unknown order test: " + oc_test);
      }
    } else if (c_poly_check->parsed()) {
      manifest.input(pc_in);
      std::string text = pc_in.find(',') != std::string::npos ? pc_in : read_file(pc_in);
      auto poly = poly_from_text(text);
      result["schema_version"] = kSchemaVersion;
      result["test"] = pc_test;
      result["degree"] = poly.degree();
      if (pc_test == "real") {
        result["real_rooted"] = is_real_rooted(poly);
        result["certified"] = true;
      } else if (pc_test == "newton") {
        auto r = newton_check(poly);
        result["ok"] = r.ok;
        result["first_violated"] = r.first_violated;
      } else if (pc_test == "kurtz") {
        bool k = kurtz_check(poly);
        result["ok"] = k;
        if (k) result["implies_real_rooted"] = is_real_rooted(poly);
      } else if (pc_test == "hurwitz") {
        auto h = hurwitz_check(poly);
        result["stable"] = h.stable;
        result["certified"] = h.certified;
      } else if (pc_test == "interlace") {
        auto gs = stride_decompose(poly, pc_stride);
        auto r = interlacing_check(gs);
        result["stride"] = pc_stride;
        result["all_real_rooted"] = r.ok;
        result["non_real_index"] = r.non_real_index;
        result["interlace"] = r.interlace;
        json comps = json::array();
        for (const auto& g : gs) comps.push_back(poly_to_text(g));
        result["components"] = std::move(comps);
      } else {
        throw std::domain_error("unknown poly test: " + pc_test);
      }
    } else if (c_dist->parsed()) {
      manifest.input(d_a);
      manifest.input(d_b);
      auto a = parse_dist_arg(d_a);
      auto b = parse_dist_arg(d_b);
      result["schema_version"] = kSchemaVersion;
      result["metric"] = d_metric;
      if (d_metric == "tv") {
        if (rational_out) {
          result["value"] = format_rational(tv_distance(a, b));
        } else {
          result["value"] = tv_distance(to_float_dist(a), to_float_dist(b));
        }
        result["method"] = "union_support_sum";
        result["crosscheck"] = nullptr;
      } else if (d_metric == "kolmogorov") {
        if (rational_out)
          result["value"] = format_rational(kolmogorov_distance(a, b));
        else
          result["value"] = kolmogorov_distance(to_float_dist(a), to_float_dist(b));
        result["method"] = "union_support_cdf";
        result["crosscheck"] = nullptr;
      } else if (d_metric == "wp") {
        double v = wasserstein_p(a, b, d_p);
        result["value"] = v;
        result["p"] = d_p;
        result["method"] = "monotone_quantile_coupling";
        result["crosscheck"] = nullptr;
      } else if (d_metric == "winf") {
        rational v = winf(a, b);
        result["value"] = rational_out ? json(format_rational(v)) : json(to_double(v));
        result["method"] = "monotone_quantile_coupling";
        auto sa = support_atoms(a), sb = support_atoms(b);
        if (sa.size() <= kWinfOracleLimit && sb.size() <= kWinfOracleLimit) {
          rational o = winf_oracle(a, b);
          result["crosscheck"] =
              json{{"flow_oracle", rational_out ? json(format_rational(o)) : json(to_double(o))},
                   {"agree", o == v}};
        } else {
          result["crosscheck"] = nullptr;
        }
      } else {
        throw std::domain_error("unknown metric: " + d_metric);
      }
    } else if (c_acc->parsed()) {
      if (c_acc_app->parsed()) {
        auto rows = reproduce_appendix();
        json table = json::array();
        bool all_ok = true;
        for (const auto& row : rows) {
          bool ok = row.search_value_matches && row.witness_real_rooted &&
                    row.witness_distance_matches && row.forced_infeasibility_matches;
          all_ok = all_ok && ok;
          json rec = json::array();
          for (double p : row.recovered_p) rec.push_back(p);
          table.push_back(json{{"n", row.n},
                               {"acc", format_rational(row.acc)},
                               {"witness", row.witness_label},
                               {"witness_pgf", poly_to_json(row.reference_pgf)},
                               {"recovered_params", std::move(rec)},
                               {"kurtz_certified", row.kurtz_certified},
                               {"certificate_kinds", [&] {
                                  json kinds = json::array();
                                  for (const auto& e : row.cert.infeasibilities)
                                    kinds.push_back(to_string(e.kind));
                                  return kinds;
                                }()},
                               {"checks_pass", ok}});
        }
        result = json{{"schema_version", kSchemaVersion}, {"table", std::move(table)}, {"all_pass", all_ok}};
        if (!all_ok) exit_code = 1;
      } else {
        if (acc_source.empty()) throw std::domain_error("acc needs --source (or the appendix subcommand)");
        manifest.input(acc_source);
        auto params = parse_params_arg(acc_source);
        auto cert = acc_search(params, parse_rational(acc_scale), acc_maxdeg);
        result = certificate_to_json(cert);
      }
    } else if (c_learn_eval->parsed()) {
      manifest.input(le_truth);
      if (!le_seed_set) {
        le_seed = std::random_device{}();
      }
      manifest.m.seed = le_seed;
      manifest.m.seeded = true;
      auto truth = to_float_params(parse_params_arg(le_truth));
      auto rep = evaluate_learner(truth, le_eps, le_delta, static_cast<std::size_t>(le_trials), le_seed);
      result = json{{"schema_version", kSchemaVersion},
                    {"success_rate", rep.success_rate},
                    {"mean_tv", rep.mean_tv},
                    {"sample_size", rep.sample_size},
                    {"trials", rep.trials},
                    {"constant", rep.constant},
                    {"seed", le_seed}};
    } else if (c_learn->parsed()) {
      if (l_samples.empty() || l_n < 1) throw std::domain_error("learn needs --samples and --n");
      manifest.input(l_samples);
      sample_set s;
      s.draws = draws_from_csv(read_file(l_samples));
      s.n = static_cast<std::size_t>(l_n);
      for (long d : s.draws)
        if (d < 0 || d > l_n) throw std::domain_error("sample outside [0, n]");
      auto model = learn_pb(s, l_eps, l_delta);
      json probs = json::array();
      for (double p : model.params.probs) probs.push_back(p);
      result = json{{"schema_version", kSchemaVersion},
                    {"params", std::move(probs)},
                    {"branch", model.branch == learner_branch::sparse ? "sparse" : "heavy"},
                    {"diagnostics",
                     json{{"empirical_mean", model.empirical_mean},
                          {"empirical_variance", model.empirical_variance},
                          {"sample_size", model.sample_size},
                          {"window_tv", model.window_tv}}}};
    } else if (c_check->parsed()) {
      auto checks = golden::run_all(check_seed);
      json arr = json::array();
      bool all = true;
      std::ostringstream lines;
      for (const auto& c : checks) {
        arr.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        lines << "[" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
        all = all && c.pass;
      }
      res.err += lines.str();
      result = json{{"schema_version", kSchemaVersion}, {"checks", std::move(arr)}, {"all_pass", all}};
      if (!all) exit_code = 1;
      manifest.m.seed = check_seed;
      manifest.m.seeded = true;
    }
  } catch (const std::exception& e) {
    res.out = json{{"error", e.what()}, {"kind", "computation"}}.dump();
    res.exit_code = 1;
    return res;
  }

  res.out = payload.empty() ? result.dump(2) : payload;
  res.err += manifest.finish(res.out) + "\n";
  res.exit_code = exit_code;
  return res;
}

}  // namespace pbkit
