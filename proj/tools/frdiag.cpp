#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "frdiag/errors.hpp"
#include "frdiag/freeconv.hpp"
#include "frdiag/io.hpp"
#include "frdiag/mcoracle.hpp"
#include "frdiag/models.hpp"
#include "frdiag/rdiag.hpp"
#include "frdiag/semigroup.hpp"

#ifndef FRDIAG_GIT_DESCRIBE
#define FRDIAG_GIT_DESCRIBE "unknown"
#endif

using namespace frdiag;
using json = nlohmann::json;

namespace {

std::string g_command_line;

cplx parse_lambda(const std::string& text) {
  std::stringstream ss(text);
  std::string re, im;
  std::getline(ss, re, ',');
  std::getline(ss, im, ',');
  try {
    return {std::stod(re), im.empty() ? 0.0 : std::stod(im)};
  } catch (const std::exception&) {
    throw std::invalid_argument("bad --lambda '" + text + "', expected re[,im]");
  }
}

// a symmetric law: bernoulli:a=.., scalar:c, or any model
Law parse_law(const std::string& text) {
  if (text.rfind("bernoulli", 0) == 0) {
    const auto x0 = parse_x0(text);
    return Law::of(std::get<SelfAdjointX0>(x0).law);
  }
  if (text.rfind("scalar", 0) == 0) {
    const auto x0 = parse_x0(text);
    const cplx c = std::get<ScalarX0>(x0).c;
    if (c.imag() != 0.0) throw std::invalid_argument("scalar law must be real");
    return Law::point(c.real());
  }
  const ModelSpec spec = parse_model(text);
  const ModelTransforms mt = model_transforms(spec);
  if (!mt.law) throw Unsupported("no Cauchy transform available for " + to_string(spec));
  return *mt.law;
}

// writes `content` to `out` (stdout when empty) plus the metadata sidecar
void emit(const std::string& out, const std::string& content, json meta) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  io::write_file(out, content);
  meta["command_line"] = g_command_line;
  meta["git_describe"] = FRDIAG_GIT_DESCRIBE;
  io::write_file(out + ".meta.json", meta.dump(2) + "\n");
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) g_command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Brown measures and free convolution semigroups of R-diagonal elements"};
  app.require_subcommand(1);
  std::string out;

  // brown-radial
  auto* br = app.add_subcommand("brown-radial", "radial CDF F(r) of an R-diagonal model");
  std::string br_model, br_route = "s";
  double br_rmax = 2.0;
  int br_points = 200;
  br->add_option("--model", br_model, "model, e.g. xmk:m=1,k=1")->required();
  br->add_option("--rmax", br_rmax)->check(CLI::PositiveNumber);
  br->add_option("--points", br_points)->check(CLI::PositiveNumber);
  br->add_option("--route", br_route, "s, theta or closed")->check(CLI::IsMember({"s", "theta", "closed"}));
  br->add_option("-o,--output", out);

  // convolve-add
  auto* ca = app.add_subcommand("convolve-add", "density of mu1 [+] mu2 by Stieltjes inversion");
  std::string ca_mu1, ca_mu2;
  double ca_xmin = -3.0, ca_xmax = 3.0, ca_eta = 1e-3;
  int ca_points = 12001;
  ca->add_option("--mu1", ca_mu1)->required();
  ca->add_option("--mu2", ca_mu2)->required();
  ca->add_option("--xmin", ca_xmin);
  ca->add_option("--xmax", ca_xmax);
  ca->add_option("--points", ca_points)->check(CLI::Range(2, 10000000));
  ca->add_option("--eta", ca_eta)->check(CLI::PositiveNumber);
  ca->add_option("-o,--output", out);

  // semigroup
  auto* sg = app.add_subcommand("semigroup", "W1, W2, G and S along a t grid");
  std::string sg_model, sg_x0 = "scalar:0", sg_lambda = "0";
  double sg_tmax = 1.0, sg_eps = 1e-2;
  int sg_nt = 20;
  sg->add_option("--model", sg_model)->required();
  sg->add_option("--x0", sg_x0);
  sg->add_option("--lambda", sg_lambda);
  sg->add_option("--tmax", sg_tmax)->check(CLI::PositiveNumber);
  sg->add_option("--nt", sg_nt)->check(CLI::PositiveNumber);
  sg->add_option("--eps", sg_eps)->check(CLI::PositiveNumber);
  sg->add_option("-o,--output", out);

  // hj-check
  auto* hj = app.add_subcommand("hj-check", "Hamilton-Jacobi residual of S");
  std::string hj_model, hj_x0 = "scalar:0", hj_lambda = "0";
  double hj_t = 1.0, hj_eps = 1.0, hj_h = 0.0;
  hj->add_option("--model", hj_model)->required();
  hj->add_option("--x0", hj_x0);
  hj->add_option("--lambda", hj_lambda);
  hj->add_option("--t", hj_t)->check(CLI::PositiveNumber);
  hj->add_option("--eps", hj_eps)->check(CLI::PositiveNumber);
  hj->add_option("--step", hj_h, "difference step (0: 1e-3 max(t, eps))");
  hj->add_option("-o,--output", out);

  // radial-pde-check
  auto* rp = app.add_subcommand("radial-pde-check", "radial CDF PDE residual on a (t, r) grid");
  std::string rp_model;
  double rp_tmin = 0.5, rp_tmax = 2.0;
  int rp_nt = 10, rp_nr = 10;
  rp->add_option("--model", rp_model)->required();
  rp->add_option("--tmin", rp_tmin)->check(CLI::PositiveNumber);
  rp->add_option("--tmax", rp_tmax)->check(CLI::PositiveNumber);
  rp->add_option("--nt", rp_nt)->check(CLI::PositiveNumber);
  rp->add_option("--nr", rp_nr)->check(CLI::PositiveNumber);
  rp->add_option("-o,--output", out);

  // support-classify
  auto* sc = app.add_subcommand("support-classify", "region label of lambda for X0 + Y");
  std::string sc_x0, sc_model = "mp1", sc_lambda = "0";
  sc->add_option("--x0", sc_x0)->required();
  sc->add_option("--model", sc_model, "R-diagonal Y");
  sc->add_option("--lambda", sc_lambda);
  sc->add_option("-o,--output", out);

  // lp-moment
  auto* lp = app.add_subcommand("lp-moment", "tau(|X_{m,k}|^p)");
  int lp_m = 1, lp_k = 1;
  double lp_p = 0.5;
  lp->add_option("--m", lp_m)->required();
  lp->add_option("--k", lp_k)->required();
  lp->add_option("--p", lp_p)->required();

  // log-int-report
  auto* li = app.add_subcommand("log-int-report", "the five log-integrability integrals");
  std::string li_model;
  double li_T = 1.0;
  li->add_option("--model", li_model, "semicircle:t=.., cauchy:t=.. or atomic")->required();
  li->add_option("--T", li_T)->check(CLI::PositiveNumber);
  li->add_option("-o,--output", out);

  // mc
  auto* mc = app.add_subcommand("mc", "random matrix samples and KS distances");
  std::string mc_experiment = "xmk";
  int mc_m = 1, mc_k = 0;
  MCConfig cfg;
  double mc_rmax = std::numeric_limits<double>::infinity();
  mc->add_option("--experiment", mc_experiment)
      ->check(CLI::IsMember({"xmk", "commutator", "anticommutator", "product"}));
  mc->add_option("--m", mc_m);
  mc->add_option("--k", mc_k);
  mc->add_option("--N", cfg.N)->check(CLI::Range(2, 1 << 16));
  mc->add_option("--trials", cfg.trials)->check(CLI::PositiveNumber);
  mc->add_option("--seed", cfg.seed);
  mc->add_option("--rmax", mc_rmax, "KS domain restriction for xmk");
  mc->add_option("-o,--output", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*br) {
      const ModelSpec spec = parse_model(br_model);
      std::vector<double> grid(br_points);
      for (int i = 0; i < br_points; ++i) grid[i] = br_rmax * (i + 1) / br_points;
      const ModelTransforms mt = model_transforms(spec);
      RadialCDF cdf;
      if (br_route == "s") {
        if (!mt.s_transform) throw Unsupported("no S-transform for " + to_string(spec));
        cdf = radial_cdf_from_S(mt.s_transform, grid);
      } else if (br_route == "theta") {
        if (!mt.phi_imag) throw Unsupported("no phi for " + to_string(spec));
        cdf = radial_cdf_via_theta(mt.phi_imag, grid);
      } else {
        const auto* x = std::get_if<Xmk>(&spec);
        if (!x) throw Unsupported("closed route needs an xmk model");
        cdf.radii = grid;
        for (double r : grid) cdf.mass.push_back(radial_cdf_xmk(x->m, x->k, r));
      }
      emit(out, to_csv(cdf), {{"subcommand", "brown-radial"}, {"model", to_string(spec)}, {"route", br_route},
                              {"tolerances", {{"root_rel_tol", 1e-15}}}});
    } else if (*ca) {
      const Law l1 = parse_law(ca_mu1);
      const Law l2 = parse_law(ca_mu2);
      if (!(ca_xmax > ca_xmin)) throw std::invalid_argument("--xmax must exceed --xmin");
      const ConvolvedDensity d = convolve_density(l1, l2, linspace(ca_xmin, ca_xmax, ca_points), ca_eta);
      std::string s = "x,density\n";
      for (std::size_t i = 0; i < d.x.size(); ++i) s += io::fmt(d.x[i]) + "," + io::fmt(d.density[i]) + "\n";
      const SubordinationPoint probe = subordinate(l1, l2, cplx(0.5 * (ca_xmin + ca_xmax), ca_eta));
      emit(out, s, {{"subcommand", "convolve-add"}, {"mu1", ca_mu1}, {"mu2", ca_mu2}, {"eta", ca_eta},
                    {"raw_mass", d.raw_mass}, {"iterations_at_center", probe.iterations},
                    {"tolerances", {{"fixed_point", SubordinationOptions{}.tol}, {"mass_defect", 1e-3}}}});
    } else if (*sg) {
      const ModelSpec spec = parse_model(sg_model);
      const X0Spec x0 = parse_x0(sg_x0);
      const cplx lambda = parse_lambda(sg_lambda);
      const std::vector<double> tg = linspace(0.0, sg_tmax, sg_nt + 1);
      const MonotonicityScan scan = det_monotonicity_scan(x0, lambda, spec, tg, sg_eps);
      int iters = 0;
      for (const auto& st : scan.states) iters = std::max(iters, st.iterations);
      emit(out, states_csv(scan.states), {{"subcommand", "semigroup"}, {"model", to_string(spec)},
                                          {"x0", sg_x0}, {"eps", sg_eps}, {"max_iterations", iters},
                                          {"tolerances", {{"bisection_rel", 1e-16}, {"monotone_slack", 1e-10}}}});
    } else if (*hj) {
      const ModelSpec spec = parse_model(hj_model);
      const X0Spec x0 = parse_x0(hj_x0);
      const cplx lambda = parse_lambda(hj_lambda);
      const HJResidual r = hj_residual(x0, lambda, spec, hj_t, hj_eps, hj_h);
      const SemigroupState st = solve_W1(x0, lambda, spec, hj_t, hj_eps);
      std::string s = "h,residual,residual_half,richardson,exact,dS_deps,two_G\n";
      s += io::fmt(r.h) + "," + io::fmt(r.fd) + "," + io::fmt(r.fd_half) + "," + io::fmt(r.richardson) + "," +
           io::fmt(r.exact) + "," + io::fmt(r.dS_deps_fd) + "," + io::fmt(r.two_G) + "\n";
      emit(out, s, {{"subcommand", "hj-check"}, {"model", to_string(spec)}, {"x0", hj_x0}, {"t", hj_t},
                    {"eps", hj_eps}, {"iterations", st.iterations}, {"tolerances", {{"bisection_rel", 1e-16}}}});
    } else if (*rp) {
      const ModelSpec spec = parse_model(rp_model);
      if (!(rp_tmax >= rp_tmin)) throw std::invalid_argument("--tmax must be at least --tmin");
      std::vector<RadialPDERow> rows;
      for (double t : linspace(rp_tmin, rp_tmax, rp_nt)) {
        // interior radii: fractions of the outer radius, or of t when unbounded
        const std::array<double, 1> one{1.0};
        const ModelTransforms mt = model_transforms(spec);
        const double outer = radial_cdf_via_theta([&](double q) { return t * mt.phi_imag(q); }, one)
                                 .outer_radius.as_double();
        const double span = std::isfinite(outer) ? outer : 4.0 * t;
        for (int j = 1; j <= rp_nr; ++j) {
          const double r = span * j / (rp_nr + 1.0);
          rows.push_back({t, r, radial_F(spec, t, r), radial_pde_residual(spec, t, r)});
        }
      }
      emit(out, radial_pde_csv(rows), {{"subcommand", "radial-pde-check"}, {"model", to_string(spec)},
                                       {"tolerances", {{"fd_step_rel", 1e-3}, {"richardson_halvings", 1}}}});
    } else if (*sc) {
      const X0Spec x0 = parse_x0(sc_x0);
      const ModelSpec spec = parse_model(sc_model);
      const cplx lambda = parse_lambda(sc_lambda);
      const PositiveMeasure y_sq = model_mu_sq(spec);
      const RegionLabel label = classify_support_point(x0, y_sq, lambda);
      emit(out, to_string(label) + "\n", {{"subcommand", "support-classify"}, {"x0", sc_x0},
                                          {"model", to_string(spec)}, {"tolerances", {{"label_tol", 1e-12}}}});
    } else if (*lp) {
      std::cout << io::fmt(lp_moment_xmk(lp_m, lp_k, lp_p)) << "\n";
    } else if (*li) {
      GeneratingPair pair;
      std::optional<SymmetricMeasure> mu;
      if (li_model == "atomic") {
        pair = divergent_atomic_pair();
      } else {
        const ModelSpec spec = parse_model(li_model);
        const ModelTransforms mt = model_transforms(spec);
        if (!mt.pair) throw Unsupported("no generating pair for " + to_string(spec));
        pair = *mt.pair;
        if (const auto* s = std::get_if<Semicircle>(&spec)) mu = semicircle_measure(s->t);
        if (const auto* s = std::get_if<SymCauchy>(&spec)) mu = cauchy_measure(s->t);
      }
      emit(out, to_json(log_integrability_report(pair, mu, li_T)) + "\n",
           {{"subcommand", "log-int-report"}, {"model", li_model}, {"T", li_T},
            {"tolerances", {{"divergence_growth", 1.01}}}});
    } else if (*mc) {
      std::vector<std::pair<std::string, double>> ks;
      EmpiricalLaw law;
      if (mc_experiment == "xmk") {
        law = sample_xmk_eigen(cfg, mc_m, mc_k);
        const int m = mc_m, k = mc_k;
        ks.emplace_back("radial_cdf", ks_distance(law, [m, k](double r) { return r > 0.0 ? radial_cdf_xmk(m, k, r) : 0.0; }, 0.0,
                                                  mc_rmax));
      } else if (mc_experiment == "product") {
        const ProductResult r = product_oracle(cfg);
        law = r.sample;
        ks.emplace_back("product_law", r.ks);
      } else {
        const CommutatorResult r = commutator_oracle(cfg, mc_experiment == "commutator" ? -1 : 1);
        law = r.sample;
        ks.emplace_back("free_square", r.ks);
      }
      const std::string meta = meta_json(cfg, mc_experiment, ks);
      if (out.empty()) {
        for (const auto& [name, v] : ks) std::cout << name << " " << io::fmt(v) << "\n";
      } else {
        emit(out, to_csv(law), json::parse(meta));
      }
    }
  } catch (const std::logic_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
