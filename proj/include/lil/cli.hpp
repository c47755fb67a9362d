#pragma once

// Command-line front end: norm, constants, bound, entropy, simulate, compare.
// Exit codes: 0 success, 1 usage or config error, 2 dominance failure.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lil/constants.hpp"
#include "lil/entropy_ct.hpp"
#include "lil/envelopes.hpp"
#include "lil/grid_spaces.hpp"
#include "lil/io.hpp"
#include "lil/lil_bounds.hpp"
#include "lil/parallel.hpp"
#include "lil/partitions.hpp"
#include "lil/simulate.hpp"

namespace lil::cli {

inline constexpr const char* kFormatVersion = "lil-run/1";

struct UGrid {
  double a = std::numbers::e;
  double b = 100.0;
  std::size_t n = 50;
};

inline double parse_scalar(const std::string& s) {
  if (s == "e") return std::numbers::e;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("cannot parse number '" + s + "'");
  return v;
}

/// "a:b:n", log-spaced; a and b may be "e".
inline UGrid parse_u_grid(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("--u-grid: expected a:b:n, got '" + spec + "'");
  UGrid g;
  g.a = parse_scalar(spec.substr(0, c1));
  g.b = parse_scalar(spec.substr(c1 + 1, c2 - c1 - 1));
  const double n = parse_scalar(spec.substr(c2 + 1));
  if (!(n >= 1.0) || n != std::floor(n)) throw std::invalid_argument("--u-grid: n must be a positive integer");
  g.n = static_cast<std::size_t>(n);
  if (!(g.a > 0.0) || !(g.b >= g.a)) throw std::invalid_argument("--u-grid: need 0 < a <= b");
  return g;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_scalar(item));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
  return out;
}

namespace detail {

inline void emit(std::ostream& out, const std::optional<std::string>& path, const std::string& text) {
  if (path)
    io::write_text(*path, text);
  else
    out << text;
}

}  // namespace detail

/// Runs one subcommand. `out` receives results written to stdout, `err` the
/// config echo and diagnostics.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Tail bounds for normed sums in Lebesgue-type spaces"};
  app.require_subcommand(1);
  io::json config{{"format", kFormatVersion}};
  const unsigned threads = thread_count_from_env();

  // norm
  auto* norm = app.add_subcommand("norm", "L_p or mixed norm of a grid function");
  std::string norm_field;
  double norm_p = 0.0;
  std::string norm_pvec, norm_order;
  norm->add_option("--field", norm_field, "GridFunction JSON")->required();
  norm->add_option("--p", norm_p, "scalar exponent (flattens the grid)");
  norm->add_option("--p-vec", norm_pvec, "comma-separated exponents, innermost axis first");
  norm->add_option("--order", norm_order, "axis order for the mixed norm");

  // constants
  auto* cons = app.add_subcommand("constants", "Rosenthal, Doob and mixingale constants");
  std::optional<double> c_p, c_L, c_m, c_geo, c_pow;
  double c_beta_scale = 1.0;
  bool c_symmetric = false;
  cons->add_option("--p", c_p, "K_R(p)");
  cons->add_option("--L", c_L, "Doob factor L/(L-1)");
  cons->add_option("--m", c_m, "K_M(m)");
  cons->add_option("--beta-geometric", c_geo, "beta(k) = c q^k with this q");
  cons->add_option("--beta-power", c_pow, "beta(k) = c k^-a with this a");
  cons->add_option("--beta-scale", c_beta_scale, "c in the beta profile");
  cons->add_flag("--symmetric", c_symmetric, "symmetric-summand Rosenthal constant");

  // bound
  auto* bound = app.add_subcommand("bound", "Tail bound curve u -> G(u) / F(u) / Theta(u)");
  std::string b_env, b_spec, b_part, b_ugrid = "e:100:50", b_width = "block";
  std::optional<std::string> b_out;
  double b_r = 1.0;
  std::optional<double> b_w;
  bool b_opt = false, b_sharp = false;
  int b_dmin = 2, b_dmax = 16;
  auto* env_opt = bound->add_option("--envelope", b_env, "envelope JSON");
  auto* spec_opt = bound->add_option("--spec", b_spec, "FieldSpec JSON (envelope from analytic moments)");
  env_opt->excludes(spec_opt);
  bound->add_option("--norming,--r", b_r, "norming exponent r in v_r");
  bound->add_option("--u-grid", b_ugrid, "a:b:n, log-spaced");
  bound->add_flag("--optimize", b_opt, "optimize over geometric partitions d in [d-min, d-max]");
  bound->add_option("--partition", b_part, "partition JSON (without --optimize)");
  bound->add_option("--w", b_w, "width w (default: family width of the partition)");
  bound->add_option("--width-rule", b_width, "block (covering, default) | largest (inf-ratio class; not a valid bound for d >= 3)")->check(CLI::IsMember({"largest", "block"}));
  bound->add_option("--d-min", b_dmin);
  bound->add_option("--d-max", b_dmax);
  bound->add_flag("--sharp-doob", b_sharp, "use L/(L-1) for --spec envelopes");
  bound->add_option("--out", b_out, "CSV output (default stdout)");

  // entropy
  auto* ent = app.add_subcommand("entropy", "nu_p(Z) table for a field on X x T x Omega");
  std::string e_field, e_cov, e_Z = "1,2,4", e_theta;
  double e_p = 2.0;
  std::optional<std::string> e_out, e_env_out;
  std::string e_L = "";
  bool e_holder = false;
  HolderExample hx;
  ent->add_option("--field", e_field, "IndexedField JSON");
  ent->add_option("--covering", e_cov, "covering JSON (default: empirical)");
  ent->add_option("--p", e_p);
  ent->add_option("--Z", e_Z, "comma-separated Z values");
  ent->add_option("--theta-grid", e_theta, "comma-separated theta values in (0,1)");
  ent->add_flag("--holder", e_holder, "use the Holder-field model instead of --field");
  ent->add_option("--C", hx.C_rho);
  ent->add_option("--l", hx.l);
  ent->add_option("--b", hx.b);
  ent->add_option("--dim", hx.d);
  ent->add_option("--D", hx.D);
  ent->add_option("--out", e_out, "CSV table output (default stdout)");
  ent->add_option("--envelope-out", e_env_out, "write the envelope L -> 2 nu_p(L/p) as JSON");
  ent->add_option("--L-grid", e_L, "comma-separated L values for --envelope-out");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of Q(u)");
  std::string s_spec, s_ugrid = "e:100:50";
  std::optional<std::string> s_out;
  std::size_t s_n = 1000, s_trials = 10000;
  std::uint64_t s_seed = 1;
  double s_r = 0.5;
  sim->add_option("--spec", s_spec, "FieldSpec JSON")->required();
  sim->add_option("--n-max", s_n);
  sim->add_option("--trials", s_trials);
  sim->add_option("--seed", s_seed);
  sim->add_option("--r", s_r);
  sim->add_option("--u-grid", s_ugrid);
  sim->add_option("--out", s_out);

  // compare
  auto* cmp = app.add_subcommand("compare", "dominance report of a simulation CSV against a bound CSV");
  std::string m_sim, m_bound;
  std::optional<std::string> m_out;
  cmp->add_option("--sim", m_sim)->required();
  cmp->add_option("--bound", m_bound)->required();
  cmp->add_option("--out", m_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  auto echo = [&] { err << config.dump() << "\n"; };
  auto ugrid = [](const std::string& s) {
    const auto g = parse_u_grid(s);
    return log_grid(g.a, g.b, g.n);
  };

  try {
    if (*norm) {
      config["subcommand"] = "norm";
      config["field"] = norm_field;
      const auto f = io::grid_function_from_json(io::parse_file(norm_field));
      io::json res;
      if (!norm_pvec.empty()) {
        const auto pv = parse_list(norm_pvec);
        config["p_vec"] = pv;
        ExponentVector p(pv);
        if (!norm_order.empty()) {
          std::vector<std::size_t> order;
          for (double o : parse_list(norm_order)) order.push_back(static_cast<std::size_t>(o));
          config["order"] = order;
          res["norm"] = mixed_norm(f, p, order);
        } else {
          res["norm"] = mixed_norm(f, p);
        }
      } else {
        if (!(norm_p >= 1.0)) throw std::invalid_argument("norm: give --p >= 1 or --p-vec");
        config["p"] = norm_p;
        res["norm"] = lp_norm(flatten(f), norm_p);
      }
      echo();
      out << res.dump() << "\n";
      return 0;
    }

    if (*cons) {
      config["subcommand"] = "constants";
      io::json res{{"C_R", c_symmetric ? kRosenthalConstantSymmetric : kRosenthalConstant}};
      if (c_p) {
        config["p"] = *c_p;
        res["p"] = *c_p;
        res["K_R"] = rosenthal_upper(*c_p, c_symmetric);
      }
      if (c_L) {
        config["L"] = *c_L;
        res["L"] = *c_L;
        res["doob_factor"] = doob_factor(*c_L);
      }
      if (c_m) {
        MixingProfile prof;
        if (c_geo && c_pow) throw std::invalid_argument("constants: give one of --beta-geometric / --beta-power");
        if (c_geo) prof = MixingProfile::geometric(*c_geo, c_beta_scale);
        else if (c_pow) prof = MixingProfile::power(*c_pow, c_beta_scale);
        else throw std::invalid_argument("constants: --m needs --beta-geometric or --beta-power");
        config["m"] = *c_m;
        config["beta"] = c_geo ? io::json{{"geometric", *c_geo}, {"scale", c_beta_scale}}
                               : io::json{{"power", *c_pow}, {"scale", c_beta_scale}};
        const auto km = mixingale_coefficient(*c_m, prof);
        res["m"] = *c_m;
        res["K_M"] = io::detail::number_json(km.value);
        res["K_M_converged"] = km.converged;
        res["K_M_divergent"] = km.divergent;
      }
      config["symmetric"] = c_symmetric;
      echo();
      out << res.dump() << "\n";
      return 0;
    }

    if (*bound) {
      config["subcommand"] = "bound";
      config["r"] = b_r;
      config["u_grid"] = b_ugrid;
      if (b_env.empty() && b_spec.empty()) throw std::invalid_argument("bound: give --envelope or --spec");
      std::optional<MomentEnvelope> env;
      Theorem th = Theorem::lebesgue;
      if (!b_env.empty()) {
        config["envelope"] = b_env;
        const auto j = io::parse_file(b_env);
        env = io::envelope_from_json(j);
        if (j.contains("theorem") && j["theorem"] == "Theta") th = Theorem::continuous_lebesgue;
        else th = theorem_for(*env);
      } else {
        config["spec"] = b_spec;
        config["sharp_doob"] = b_sharp;
        const auto spec = io::field_spec_from_json(io::parse_file(b_spec));
        EnvelopeOptions eo;
        eo.sharp_doob = b_sharp;
        env = envelope_from_spec(spec, eo);
        th = theorem_for(*env);
      }
      const auto v = NormingSequence::iterated_log(b_r);
      const auto u = ugrid(b_ugrid);
      const WidthRule rule = b_width == "block" ? WidthRule::block_covering : WidthRule::largest_admissible;
      config["width_rule"] = b_width;
      std::function<BoundValue(double)> at;
      if (b_opt) {
        config["optimize"] = {{"d_min", b_dmin}, {"d_max", b_dmax}};
        OptimizeOptions oo;
        oo.d_min = b_dmin;
        oo.d_max = b_dmax;
        oo.width = rule;
        at = [&, oo](double uu) { return optimize_bound(*env, v, uu, th, oo); };
      } else {
        auto part = b_part.empty() ? Partition::geometric(2) : io::partition_from_json(io::parse_file(b_part));
        const double w = b_w ? *b_w : family_width(part, rule);
        config["partition"] = io::to_json(part);
        config["w"] = w;
        SeriesOptions so;
        if (rule == WidthRule::largest_admissible) so.condition = WidthCondition::class_Y;
        at = [&, part, w, so](double uu) { return lil::detail::envelope_series(*env, part, v, w, uu, th, so); };
      }
      echo();
      const auto curve = bound_curve(u, at, th, b_r, threads);
      detail::emit(out, b_out, io::to_csv(io::bound_table(curve)));
      return 0;
    }

    if (*ent) {
      config["subcommand"] = "entropy";
      config["p"] = e_p;
      NuOptions no;
      no.threads = threads;
      if (!e_theta.empty()) no.theta_grid = parse_list(e_theta);
      config["theta_grid"] = no.theta_grid;
      const auto Zs = parse_list(e_Z);
      config["Z"] = Zs;
      std::function<NuResult(double)> nu_at;
      std::optional<IndexedField> field;
      if (e_holder) {
        hx.p = e_p;
        config["holder"] = {{"C", hx.C_rho}, {"l", hx.l}, {"b", hx.b}, {"d", hx.d}, {"D", hx.D}};
        nu_at = [&](double Z) { return holder_nu(hx, Z, no); };
      } else {
        if (e_field.empty()) throw std::invalid_argument("entropy: give --field or --holder");
        config["field"] = e_field;
        field = io::indexed_field_from_json(io::parse_file(e_field));
        io::CoveringConfig cc;
        if (!e_cov.empty()) {
          config["covering"] = e_cov;
          cc = io::covering_from_json(io::parse_file(e_cov));
        }
        if (cc.empirical) {
          nu_at = [&](double Z) { return nu_p(*field, e_p, Z, no); };
        } else {
          nu_at = [&, cc](double Z) {
            return nu_p(sigma_bar(*field, e_p, Z), e_p, Z, CoveringFunction::analytic(cc.D, cc.d, cc.l, cc.C_cov, cc.lip), no);
          };
        }
      }
      echo();
      io::Table t{{"Z", "sigma_bar", "sigma_hat", "nu", "nu_pow_p", "theta_star", "divergent", "theta_restricted"}, {}};
      for (double Z : Zs) {
        const auto r = nu_at(Z);
        t.rows.push_back({Z, r.sigma_bar, r.sigma_hat, r.nu, r.nu_pow_p, r.theta_star, r.divergent ? 1.0 : 0.0,
                          r.theta_restricted ? 1.0 : 0.0});
      }
      detail::emit(out, e_out, io::to_csv(t));
      if (e_env_out) {
        std::vector<double> Ls = e_L.empty() ? std::vector<double>{} : parse_list(e_L);
        MomentEnvelope env = e_holder ? holder_example_envelope(hx, Ls, no)
                                      : nu_envelope(*field, e_p, Ls, no);
        auto j = io::to_json(env);
        j["theorem"] = "Theta";
        io::write_text(*e_env_out, j.dump(2) + "\n");
      }
      return 0;
    }

    if (*sim) {
      config["subcommand"] = "simulate";
      config["spec"] = s_spec;
      config["n_max"] = s_n;
      config["trials"] = s_trials;
      config["seed"] = s_seed;
      config["r"] = s_r;
      config["u_grid"] = s_ugrid;
      const auto spec = io::field_spec_from_json(io::parse_file(s_spec));
      config["field"] = io::to_json(spec);
      const auto u = ugrid(s_ugrid);
      echo();
      const auto ens = simulate(spec, s_n, s_trials, s_seed, s_r, threads);
      detail::emit(out, s_out, io::to_csv(io::empirical_table(empirical_Q(ens, u))));
      return 0;
    }

    if (*cmp) {
      config["subcommand"] = "compare";
      config["sim"] = m_sim;
      config["bound"] = m_bound;
      echo();
      const auto emp = io::empirical_from_table(io::read_csv(m_sim));
      const auto bt = io::read_csv(m_bound);
      const auto bv = bt.values("vacuous_flag");
      std::vector<bool> vac;
      for (double f : bv) vac.push_back(f != 0.0);
      const auto rep = dominance_report(emp, bt.values("u"), bt.values("bound"), vac);
      io::Table t{{"u", "q_hat", "cp_upper_99", "bound", "vacuous_flag", "pass", "unresolved"}, {}};
      for (const auto& r : rep.rows)
        t.rows.push_back({r.u, r.q_hat, r.cp_upper, r.bound, r.vacuous ? 1.0 : 0.0, r.pass ? 1.0 : 0.0,
                          r.unresolved ? 1.0 : 0.0});
      detail::emit(out, m_out, io::to_csv(t));
      err << (rep.all_pass() ? "PASS" : "FAIL") << ": " << rep.rows.size() - rep.failures << "/" << rep.rows.size()
          << " rows dominated (" << rep.unresolved << " beyond resolution)\n";
      return rep.all_pass() ? 0 : 2;
    }
  } catch (const io::config_error& e) {
    err << "config error at " << e.where() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace lil::cli
