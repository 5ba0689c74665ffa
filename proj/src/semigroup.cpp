#include "frdiag/semigroup.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "frdiag/errors.hpp"
#include "frdiag/freeconv.hpp"
#include "frdiag/io.hpp"
#include "frdiag/parallel.hpp"
#include "frdiag/quadrature.hpp"
#include "frdiag/rdiag.hpp"
#include "frdiag/roots.hpp"

namespace frdiag {

namespace {

std::function<double(double)> model_phi(const ModelSpec& model) {
  ModelTransforms mt = model_transforms(model);
  if (!mt.phi_imag) throw Unsupported("semigroup: no phi for " + to_string(model));
  return mt.phi_imag;
}

double H_of(const ModelTransforms& mt, double y) {
  if (mt.hamiltonian) return mt.hamiltonian(y);
  // y = y v^4 flattens an integrable singularity of R at 0
  return quad::integrate(
      [&](double v) {
        const double v3 = v * v * v;
        return mt.r_imag(y * v3 * v) * 4.0 * y * v3;
      },
      0.0, 1.0, 1e-13, 12);
}

// symmetrized law of |X0 - lambda| for an R-diagonal X0 at lambda != 0 is
// bernoulli(|lambda|) [+] symmetrized |X0|
ImagSubordination rdiag_shift(const PositiveMeasure& mod, double a, double W) {
  return subordinate_imag_symmetric(Law::of(SymmetricMeasure::bernoulli(a)), Law::of(symmetrize(mod)), W);
}

SemigroupState finish(const X0Spec& x0, cplx lambda, const ModelTransforms& mt, double t, double eps, double W1,
                      int evals) {
  SemigroupState s;
  s.t = t;
  s.lambda = lambda;
  s.eps = eps;
  s.W1 = W1;
  s.Gval = g0_imag(x0, lambda, W1);
  s.W2 = 1.0 / s.Gval - W1 + eps;
  const double I = t > 0.0 ? 2.0 * H_of(mt, s.Gval) - 2.0 * s.Gval * mt.r_imag(s.Gval) : 0.0;
  s.S_value = log_trace(x0, lambda, W1) + t * I;
  s.iterations = evals;
  return s;
}

SemigroupState solve_with(const X0Spec& x0, cplx lambda, const ModelTransforms& mt, double t, double eps) {
  if (!(eps > 0.0)) throw DomainError("solve_W1: eps must be positive");
  if (!(t >= 0.0)) throw DomainError("solve_W1: t must be nonnegative");
  if (!mt.r_imag) throw Unsupported("solve_W1: model has no R-transform");
  if (t == 0.0) return finish(x0, lambda, mt, t, eps, eps, 0);
  int evals = 0;
  auto phi = [&](double W) {
    ++evals;
    return W - eps - t * mt.r_imag(g0_imag(x0, lambda, W));
  };
  const double lo = eps;
  double hi = eps + t * mt.r_imag(g0_imag(x0, lambda, eps));
  // constant R (Cauchy) lands on the root at once
  if (std::abs(phi(hi)) <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return finish(x0, lambda, mt, t, eps, hi, evals);
  // R may decrease (free stable, k >= 2), so the first guess need not bracket
  while (phi(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw ConvergenceError("solve_W1: no upper bracket");
  }
  const double W1 = roots::bisect(phi, lo, hi, 1e-16, 2000);
  return finish(x0, lambda, mt, t, eps, W1, evals);
}

}  // namespace

HamiltonianValue hamiltonian(const ModelSpec& model, double y) {
  if (!(y > 0.0)) throw DomainError("hamiltonian: y must be positive");
  const ModelTransforms mt = model_transforms(model);
  if (!mt.r_imag) throw Unsupported("hamiltonian: no R-transform for " + to_string(model));
  const double H = H_of(mt, y);
  return {H, 2.0 * H - 2.0 * y * mt.r_imag(y)};
}

HamiltonianTable hamiltonian_table(const ModelSpec& model, std::span<const double> y_grid) {
  HamiltonianTable tab;
  for (double y : y_grid) {
    const HamiltonianValue v = y == 0.0 ? HamiltonianValue{0.0, 0.0} : hamiltonian(model, y);
    tab.y.push_back(y);
    tab.H.push_back(v.H);
    tab.I.push_back(v.I);
  }
  return tab;
}

double g0_imag(const X0Spec& x0, cplx lambda, double W) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ScalarX0>) {
          return W / (W * W + std::norm(s.c - lambda));
        } else if constexpr (std::is_same_v<T, SelfAdjointX0>) {
          return W * s.law.integrate([&](double x) { return 1.0 / (W * W + std::norm(x - lambda)); });
        } else {
          const double a = std::abs(lambda);
          if (a == 0.0) return g_imag(symmetrize(s.modulus), W);
          return rdiag_shift(s.modulus, a, W).G;
        }
      },
      x0);
}

double log_trace(const X0Spec& x0, cplx lambda, double W) {
  const double W2 = W * W;
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ScalarX0>) {
          return std::log(std::norm(s.c - lambda) + W2);
        } else if constexpr (std::is_same_v<T, SelfAdjointX0>) {
          return s.law.integrate([&](double x) { return std::log(std::norm(x - lambda) + W2); });
        } else {
          const double a = std::abs(lambda);
          if (a == 0.0) return s.modulus.integrate([&](double x) { return std::log(x * x + W2); });
          return 2.0 * log_potential_decomposition(SymmetricMeasure::bernoulli(a), symmetrize(s.modulus), W).total;
        }
      },
      x0);
}

SemigroupState solve_W1(const X0Spec& x0, cplx lambda, const ModelSpec& model, double t, double eps) {
  return solve_with(x0, lambda, model_transforms(model), t, eps);
}

double potential_S(const X0Spec& x0, cplx lambda, const ModelSpec& model, double t, double eps) {
  return solve_W1(x0, lambda, model, t, eps).S_value;
}

EpsLimit potential_S_limit(const X0Spec& x0, cplx lambda, const ModelSpec& model, double t) {
  const ModelTransforms mt = model_transforms(model);
  std::vector<SemigroupState> st;
  for (int k = 4; k <= 8; ++k) st.push_back(solve_with(x0, lambda, mt, t, std::pow(10.0, -k)));
  // least-squares line in eps, evaluated at 0
  auto intercept = [&](auto field) {
    double se = 0, sf = 0, see = 0, sef = 0;
    const double n = double(st.size());
    for (const SemigroupState& s : st) {
      const double f = field(s);
      se += s.eps;
      sf += f;
      see += s.eps * s.eps;
      sef += s.eps * f;
    }
    const double slope = (n * sef - se * sf) / (n * see - se * se);
    return (sf - slope * se) / n;
  };
  EpsLimit out;
  out.S0 = intercept([](const SemigroupState& s) { return s.S_value; });
  out.W1_0 = intercept([](const SemigroupState& s) { return s.W1; });
  out.G0 = intercept([](const SemigroupState& s) { return s.Gval; });
  out.identity_residual = 0.0;
  if (out.W1_0 > 1e-6 && out.G0 > 0.0 && t > 0.0) {
    out.identity_residual = std::abs(out.W1_0 - t * mt.r_imag(out.G0));
  }
  return out;
}

HJResidual hj_residual(const X0Spec& x0, cplx lambda, const ModelSpec& model, double t, double eps, double h) {
  if (h == 0.0) h = 1e-3 * std::max(t, eps);
  if (!(h > 0.0) || h >= t || h >= eps) throw DomainError("hj_residual: need 0 < h < min(t, eps)");
  const ModelTransforms mt = model_transforms(model);
  auto S = [&](double tt, double ee) { return solve_with(x0, lambda, mt, tt, ee).S_value; };
  auto derivs = [&](double step) {
    const double St = (S(t + step, eps) - S(t - step, eps)) / (2.0 * step);
    const double Se = (S(t, eps + step) - S(t, eps - step)) / (2.0 * step);
    return std::array<double, 2>{St, Se};
  };
  const auto d1 = derivs(h);
  const auto d2 = derivs(0.5 * h);
  const double G = solve_with(x0, lambda, mt, t, eps).Gval;
  auto res = [&](double St, double Se) { return std::abs(St - 2.0 * H_of(mt, 0.5 * Se)); };
  HJResidual r;
  r.h = h;
  r.fd = res(d1[0], d1[1]);
  r.fd_half = res(d2[0], d2[1]);
  r.richardson = res((4.0 * d2[0] - d1[0]) / 3.0, (4.0 * d2[1] - d1[1]) / 3.0);
  r.exact = std::abs(d1[0] - 2.0 * H_of(mt, G));
  r.dS_deps_fd = d1[1];
  r.two_G = 2.0 * G;
  return r;
}

MonotonicityScan det_monotonicity_scan(const X0Spec& x0, cplx lambda, const ModelSpec& model,
                                       std::span<const double> t_grid, double eps, double slack) {
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("det_monotonicity_scan: t grid must increase");
  }
  const ModelTransforms mt = model_transforms(model);
  MonotonicityScan scan;
  scan.states.resize(t_grid.size());
  scan.dS_dt.resize(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) {
    scan.states[i] = solve_with(x0, lambda, mt, t_grid[i], eps);
    scan.dS_dt[i] = 2.0 * H_of(mt, scan.states[i].Gval);
  });
  for (std::size_t i = 1; i < scan.states.size(); ++i) {
    const double drop = scan.states[i - 1].S_value - scan.states[i].S_value;
    if (drop > slack) {
      std::ostringstream os;
      os << "det_monotonicity_scan: S decreases by " << drop << " at t = " << t_grid[i];
      throw MonotonicityViolation(os.str());
    }
  }
  return scan;
}

double theta_t(const ModelSpec& model, double t, double q) {
  if (!(q > 0.0)) throw DomainError("theta_t: q must be positive");
  return 1.0 + t * model_phi(model)(q) / q;
}

namespace {

struct RadialAtTime {
  std::function<double(double)> phi;
  double t;
  double outer;

  explicit RadialAtTime(const ModelSpec& model, double tt) : phi(model_phi(model)), t(tt) {
    const std::array<double, 1> r{1.0};
    outer = radial_cdf_via_theta([&](double q) { return t * phi(q); }, r).outer_radius.as_double();
  }

  double operator()(double r) const {
    if (!(r > 0.0) || !(r < outer)) throw DomainError("radial_pde_residual: r outside the radial range");
    const std::array<double, 1> g{r};
    return radial_cdf_via_theta([&](double q) { return t * phi(q); }, g).mass[0];
  }
};

// central difference with one Richardson halving
template <class F>
double deriv(F&& f, double x, double h) {
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

double radial_F(const ModelSpec& model, double t, double r) {
  if (!(t > 0.0)) throw DomainError("radial_F: t must be positive");
  return RadialAtTime(model, t)(r);
}

double radial_pde_residual(const ModelSpec& model, double t, double r) {
  if (!(t > 0.0)) throw DomainError("radial_pde_residual: t must be positive");
  const double ht = 1e-3 * t;
  const double hr = 1e-3 * r;
  const RadialAtTime at_t(model, t);
  const double F = at_t(r);
  const double Fr = deriv(at_t, r, hr);
  const double Ft = deriv([&](double tt) { return RadialAtTime(model, tt)(r); }, t, ht);
  return std::abs(t * Ft + r * (2.0 * F - 1.0) / (2.0 * F) * Fr + 1.0 - F);
}

double radial_pde_residual_scaled(const ModelSpec& model, double t, double r) {
  if (!(t > 0.0)) throw DomainError("radial_pde_residual_scaled: t must be positive");
  const double ht = 1e-3 * t;
  const double hr = 1e-3 * r;
  const RadialAtTime at_t(model, t);
  auto Fh = [&](double rr) { return at_t(t * rr); };
  const double F = Fh(r);
  const double Fr = deriv(Fh, r, hr);
  const double Ft = deriv([&](double tt) { return RadialAtTime(model, tt)(tt * r); }, t, ht);
  return std::abs(t * Ft - r * Fr / (2.0 * F) + 1.0 - F);
}

namespace {

ExtendedReal scaled(const ExtendedReal& v, double c) {
  return v.is_finite() ? ExtendedReal::finite(c * v.value) : v;
}

// int_T^inf f over [T, T e^(2^j)], j = 0..8, in the variable log y
ExtendedReal tail_integral(const std::function<double(double)>& f, double T) {
  std::vector<double> partial;
  double acc = 0.0;
  double s_lo = std::log(T);
  for (int j = 0; j <= 8; ++j) {
    const double s_hi = std::log(T) + std::ldexp(1.0, j);
    acc += quad::integrate(
        [&](double s) {
          const double y = std::exp(s);
          return f(y) * y;
        },
        s_lo, s_hi, 1e-11, 8);
    if (!std::isfinite(acc)) return ExtendedReal::infinity();
    partial.push_back(acc);
    s_lo = s_hi;
  }
  if (quad::diverging(partial)) return ExtendedReal::infinity();
  return ExtendedReal::finite(acc);
}

// phi_hat and its derivative from a pair
std::pair<double, double> phi_pair_dphi(const GeneratingPair& p, double w) {
  if (p.sigma_mass == 0.0) return {0.0, 0.0};
  const double w2 = w * w;
  const PositiveMeasure& m = p.shape.modulus();
  const double body = m.integrate([&](double s) { return (1.0 + s * s) / (w2 + s * s); });
  const double dbody = m.integrate([&](double s) {
    const double d = w2 + s * s;
    return (1.0 + s * s) / (d * d);
  });
  // d/dw [-w m body] = -m body + 2 w^2 m dbody
  return {-w * p.sigma_mass * body, -p.sigma_mass * body + 2.0 * w2 * p.sigma_mass * dbody};
}

// Im F(iy) from w + phi_hat(w) = y, w >= y
double f_imag_from_pair(const GeneratingPair& p, double y) {
  if (p.sigma_mass == 0.0) return y;
  auto fdf = [&](double w) {
    const auto [ph, dph] = phi_pair_dphi(p, w);
    return std::pair{w + ph - y, 1.0 + dph};
  };
  double hi = 2.0 * y;
  while (fdf(hi).first <= 0.0) hi *= 2.0;
  return roots::newton_bisect(fdf, y, hi, 1e-14, 400);
}

double k3(double s, double T) {
  if (s == 0.0) return 1.0 / (2.0 * T * T);
  const double s2 = s * s;
  return (1.0 + s2) / (2.0 * s2) * std::log1p(s2 / (T * T));
}

// int_0^(1/T) y (1 + s^2) / (1 + y^2 s^2) dy by quadrature
double r_head_node(double s, double T) {
  const double top = 1.0 / T;
  const double s2 = s * s;
  auto g = [&](double y) { return y * (1.0 + s2) / (1.0 + y * y * s2); };
  if (s == 0.0) return quad::integrate(g, 0.0, top);
  const double knee = std::min(top, 1.0 / s);
  double acc = quad::integrate(g, 0.0, knee, 1e-12, 8);
  if (knee < top) {
    acc += quad::integrate(
        [&](double v) {
          const double y = std::exp(v);
          return g(y) * y;
        },
        std::log(knee), std::log(top), 1e-12, 10);
  }
  return acc;
}

ExtendedReal sigma_integral(const GeneratingPair& p, const std::function<double(double)>& g) {
  if (p.sigma_mass == 0.0) return ExtendedReal::finite(0.0);
  const PositiveMeasure& m = p.shape.modulus();
  const ExtendedReal body = m.integrate_positive(g);
  if (!body.is_finite()) return body;
  return ExtendedReal::finite(p.sigma_mass * (body.value + m.atom_at_zero() * g(0.0)));
}

}  // namespace

LogIntegrabilityReport log_integrability_report(const GeneratingPair& pair, const std::optional<SymmetricMeasure>& mu,
                                                double T) {
  if (!(T > 0.0)) throw DomainError("log_integrability_report: T must be positive");
  LogIntegrabilityReport r;
  if (mu) {
    r.log_moment_mu = mu->modulus().integrate_positive([](double x) { return std::log1p(x * x); });
  } else {
    // int log(1 + x^2) dmu = 2 int_1^inf (1/y - G(y)) dy
    r.log_moment_mu = scaled(tail_integral(
                                 [&](double y) {
                                   const double w = f_imag_from_pair(pair, y);
                                   return -phi_pair_dphi(pair, w).first / (y * w);
                                 },
                                 1.0),
                             2.0);
  }
  r.log_moment_sigma = pair.sigma_mass == 0.0
                           ? ExtendedReal::finite(0.0)
                           : scaled(pair.shape.modulus().integrate_positive([](double s) { return std::log1p(s * s); }),
                                    pair.sigma_mass);
  r.phi_tail = sigma_integral(pair, [T](double s) { return k3(s, T); });
  r.r_head = sigma_integral(pair, [T](double s) { return r_head_node(s, T); });
  r.f_tail = tail_integral(
      [&](double y) {
        const double w = f_imag_from_pair(pair, y);
        return -phi_pair_dphi(pair, w).first / (y * y);
      },
      T);
  const std::array<bool, 5> fin{r.log_moment_mu.is_finite(), r.log_moment_sigma.is_finite(), r.phi_tail.is_finite(),
                                r.r_head.is_finite(), r.f_tail.is_finite()};
  r.agree = std::all_of(fin.begin(), fin.end(), [](bool b) { return b; }) ||
            std::none_of(fin.begin(), fin.end(), [](bool b) { return b; });
  return r;
}

std::string to_json(const LogIntegrabilityReport& r) {
  auto v = [](const ExtendedReal& x) -> nlohmann::json {
    if (x.is_finite()) return x.value;
    return "inf";
  };
  nlohmann::json j;
  j["log_moment_mu"] = v(r.log_moment_mu);
  j["log_moment_sigma"] = v(r.log_moment_sigma);
  j["phi_tail"] = v(r.phi_tail);
  j["r_head"] = v(r.r_head);
  j["f_tail"] = v(r.f_tail);
  j["agree"] = r.agree;
  return j.dump(2);
}

GeneratingPair divergent_atomic_pair() {
  const PositiveMeasure atoms = PositiveMeasure::from_atom_sequence(
      [](int n) { return Atom{std::exp(std::ldexp(1.0, n)), std::ldexp(1.0, -n)}; }, 8);
  return GeneratingPair{0.0, 1.0, SymmetricMeasure(atoms)};
}

BrownDensityGrid brown_density(const X0Spec& x0, const ModelSpec& model, double t, double eps,
                               std::span<const double> re_grid, std::span<const double> im_grid, double h) {
  if (!(h > 0.0)) throw DomainError("brown_density: h must be positive");
  const ModelTransforms mt = model_transforms(model);
  BrownDensityGrid out;
  out.re.assign(re_grid.begin(), re_grid.end());
  out.im.assign(im_grid.begin(), im_grid.end());
  out.density.resize(re_grid.size() * im_grid.size());
  parallel_for(out.density.size(), [&](std::size_t idx) {
    const cplx lam(re_grid[idx % re_grid.size()], im_grid[idx / re_grid.size()]);
    auto S = [&](cplx l) { return solve_with(x0, l, mt, t, eps).S_value; };
    const double lap = S(lam + h) + S(lam - h) + S(lam + cplx(0, h)) + S(lam - cplx(0, h)) - 4.0 * S(lam);
    out.density[idx] = lap / (h * h) / (4.0 * std::numbers::pi);
  });
  return out;
}

std::vector<SemigroupState> semigroup_sweep(const X0Spec& x0, const ModelSpec& model,
                                            std::span<const SweepPoint> points) {
  const ModelTransforms mt = model_transforms(model);
  std::vector<SemigroupState> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    out[i] = solve_with(x0, points[i].lambda, mt, points[i].t, points[i].eps);
  });
  return out;
}

std::string states_csv(std::span<const SemigroupState> states) {
  std::string s = "t,lambda_re,lambda_im,eps,W1,W2,G,S\n";
  for (const SemigroupState& st : states) {
    s += io::fmt(st.t) + "," + io::fmt(st.lambda.real()) + "," + io::fmt(st.lambda.imag()) + "," + io::fmt(st.eps) +
         "," + io::fmt(st.W1) + "," + io::fmt(st.W2) + "," + io::fmt(st.Gval) + "," + io::fmt(st.S_value) + "\n";
  }
  return s;
}

std::string radial_pde_csv(std::span<const RadialPDERow> rows) {
  std::string s = "t,r,F,residual\n";
  for (const RadialPDERow& r : rows) {
    s += io::fmt(r.t) + "," + io::fmt(r.r) + "," + io::fmt(r.F) + "," + io::fmt(r.residual) + "\n";
  }
  return s;
}

}  // namespace frdiag
