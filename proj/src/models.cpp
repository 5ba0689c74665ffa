#include "frdiag/models.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "frdiag/errors.hpp"
#include "frdiag/roots.hpp"

namespace frdiag {

namespace {

using std::numbers::pi;

std::map<std::string, std::string> parse_params(const std::string& body) {
  std::map<std::string, std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("bad parameter '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double number(const std::map<std::string, std::string>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  std::size_t used = 0;
  const double v = std::stod(it->second, &used);
  if (used != it->second.size()) throw std::invalid_argument("bad number '" + it->second + "'");
  return v;
}

int integer(const std::map<std::string, std::string>& p, const std::string& key, int fallback) {
  const double v = number(p, key, fallback);
  if (v != std::floor(v)) throw std::invalid_argument(key + " must be an integer");
  return static_cast<int>(v);
}

void only_keys(const std::map<std::string, std::string>& p, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : p) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw std::invalid_argument("unknown parameter '" + k + "'");
  }
}

// a log F - b log(1 - F) = target, solved in the logit variable.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double solve_power_ratio(double a, double b, double target) {
  // x = logit F; a log F - b log(1 - F) is increasing in x
  auto fdf = [&](double x) {
    const double log_f = -softplus(-x);
    const double log_1mf = -softplus(x);
    const double f = std::exp(log_f);
    return std::pair{a * log_f - b * log_1mf - target, a * (1.0 - f) + b * f};
  };
  double lo = -1.0, hi = 1.0;
  while (fdf(lo).first > 0.0) lo *= 2.0;
  while (fdf(hi).first < 0.0) hi *= 2.0;
  const double x = roots::newton_bisect(fdf, lo, hi, 2e-16, 400, 1e-15);
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

ModelSpec parse_model(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const auto p = colon == std::string::npos ? std::map<std::string, std::string>{} : parse_params(text.substr(colon + 1));
  if (name == "semicircle") {
    only_keys(p, {"t"});
    const double t = number(p, "t", 1.0);
    if (!(t > 0)) throw std::invalid_argument("semicircle: t must be positive");
    return Semicircle{t};
  }
  if (name == "cauchy") {
    only_keys(p, {"t"});
    const double t = number(p, "t", 1.0);
    if (!(t > 0)) throw std::invalid_argument("cauchy: t must be positive");
    return SymCauchy{t};
  }
  if (name == "fstable") {
    only_keys(p, {"k", "t"});
    const int k = integer(p, "k", 0);
    const double t = number(p, "t", 1.0);
    if (k < 0 || !(t > 0)) throw std::invalid_argument("fstable: need k >= 0 and t > 0");
    return SymFreeStable{k, t};
  }
  if (name == "mp1") {
    only_keys(p, {});
    return MarchenkoPastur1{};
  }
  if (name == "xmk") {
    only_keys(p, {"m", "k"});
    const int m = integer(p, "m", 1);
    const int k = integer(p, "k", 0);
    if (m < 1 || k < 0) throw std::invalid_argument("xmk: need m >= 1 and k >= 0");
    return Xmk{m, k};
  }
  throw std::invalid_argument("unknown model '" + text + "'");
}

std::string to_string(const ModelSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Semicircle>) os << "semicircle:t=" << s.t;
        if constexpr (std::is_same_v<T, SymCauchy>) os << "cauchy:t=" << s.t;
        if constexpr (std::is_same_v<T, SymFreeStable>) os << "fstable:k=" << s.k << ",t=" << s.t;
        if constexpr (std::is_same_v<T, MarchenkoPastur1>) os << "mp1";
        if constexpr (std::is_same_v<T, Xmk>) os << "xmk:m=" << s.m << ",k=" << s.k;
      },
      spec);
  return os.str();
}

X0Spec parse_x0(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (name == "scalar") {
    std::stringstream ss(body);
    std::string re, im;
    std::getline(ss, re, ',');
    std::getline(ss, im, ',');
    if (re.empty()) throw std::invalid_argument("scalar: value required");
    return ScalarX0{{std::stod(re), im.empty() ? 0.0 : std::stod(im)}};
  }
  if (name == "bernoulli") {
    const auto p = parse_params(body);
    only_keys(p, {"a"});
    const double a = number(p, "a", 1.0);
    return SelfAdjointX0{RealMeasure::from_symmetric(SymmetricMeasure::bernoulli(a))};
  }
  throw std::invalid_argument("unknown initial condition '" + text + "'");
}

double s_transform_xmk(int m, int k, double u) {
  if (!(u > -1.0 && u < 0.0)) throw DomainError("s_transform_xmk: u outside (-1, 0)");
  return std::pow(-u, k) / std::pow(1.0 + u, m);
}

double radial_cdf_xmk(int m, int k, double r) {
  if (!(r > 0.0)) throw DomainError("radial_cdf_xmk: r must be positive");
  if (k == 0 && r >= 1.0) return 1.0;
  return solve_power_ratio(m, k, 2.0 * std::log(r));
}

double w_of_s(int m, int k, double s) {
  if (!(s > 0.0)) throw DomainError("w_of_s: s must be positive");
  return solve_power_ratio(k + 1, m + 1, 2.0 * std::log(s));
}

double lp_moment_xmk(int m, int k, double p) {
  if (m < 1 || k < 1) throw DomainError("lp_moment_xmk: need m >= 1 and k >= 1");
  if (!(p > 0.0) || p >= 2.0 / (k + 1)) {
    throw ThresholdExceeded("lp_moment_xmk: p must lie in (0, 2/(k+1))");
  }
  auto beta = [](double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); };
  const double a = (k + 1) * p / 2.0;
  const double b = (m + 1) * p / 2.0;
  const double integral = (k + 1) / 2.0 * beta(1.0 - a, 1.0 + b) + (m + 1) / 2.0 * beta(2.0 - a, b);
  return 2.0 / pi * std::sin(pi * p / 2.0) * integral;
}

double xm0_edge(int m) { return std::pow(m + 1.0, m + 1) / std::pow(double(m), m); }

PositiveMeasure marchenko_pastur1() {
  return PositiveMeasure::from_density([](double x) { return std::sqrt((4.0 - x) / x) / (2.0 * pi); },
                                       {0.0, 4.0, 1.0});
}

PositiveMeasure quarter_circle(double variance) {
  const double t = variance;
  const double edge = 2.0 * std::sqrt(t);
  return PositiveMeasure::from_density(
      [t](double x) { return std::sqrt(std::max(4.0 * t - x * x, 0.0)) / (pi * t); }, {0.0, edge, 1.0});
}

PositiveMeasure half_cauchy(double scale) {
  const double s = scale;
  return PositiveMeasure::from_density([s](double x) { return 2.0 * s / (pi * (s * s + x * x)); },
                                       {0.0, std::numeric_limits<double>::infinity(), s});
}

SymmetricMeasure semicircle_measure(double variance) { return symmetrize(quarter_circle(variance)); }
SymmetricMeasure cauchy_measure(double scale) { return symmetrize(half_cauchy(scale)); }

double xmk_sq_density(int m, int k, double x) {
  if (!(x > 0.0)) return 0.0;
  if (k == 0 && x >= xm0_edge(m)) return 0.0;
  using C = std::complex<double>;
  // root u of (1 + u)^(m+1) + zeta (-u)^(k+1) = 0 followed from zeta = x + iY down to x
  auto newton = [&](C zeta, C u) {
    for (int it = 0; it < 100; ++it) {
      const C a = std::pow(1.0 + u, m + 1);
      const C b = std::pow(-u, k + 1);
      const C p = a + zeta * b;
      const C dp = double(m + 1) * std::pow(1.0 + u, m) - zeta * double(k + 1) * std::pow(-u, k);
      const C du = p / dp;
      u -= du;
      if (std::abs(du) <= 1e-15 * (1.0 + std::abs(u))) break;
    }
    return u;
  };
  double y = 1e6 * (1.0 + x);
  C zeta(x, y);
  C u = -std::pow(-1.0 / zeta, 1.0 / (k + 1));
  u = newton(zeta, u);
  const double y_end = 1e-13 * (1.0 + x);
  while (y > y_end) {
    y *= 0.8;
    u = newton(C(x, y), u);
  }
  u = newton(C(x, 0.0), u);
  return std::max(-u.imag() / (pi * x), 0.0);
}

PositiveMeasure xmk_mu_sq(int m, int k) {
  if (m < 1 || k < 0) throw DomainError("xmk_mu_sq: need m >= 1 and k >= 0");
  if (m + k > 4) throw Unsupported("xmk_mu_sq: density materialised only for m + k <= 4");
  if (m == 1 && k == 0) return marchenko_pastur1();
  const double hi = k == 0 ? xm0_edge(m) : std::numeric_limits<double>::infinity();
  return PositiveMeasure::from_density([m, k](double x) { return xmk_sq_density(m, k, x); }, {0.0, hi, 1.0});
}

PositiveMeasure model_mu_sq(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> PositiveMeasure {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Semicircle>) return marchenko_pastur1().dilate(s.t);
        if constexpr (std::is_same_v<T, SymCauchy>) return square_pushforward(half_cauchy(s.t));
        if constexpr (std::is_same_v<T, MarchenkoPastur1>) return marchenko_pastur1();
        if constexpr (std::is_same_v<T, Xmk>) return xmk_mu_sq(s.m, s.k);
        if constexpr (std::is_same_v<T, SymFreeStable>) {
          if (s.k == 0) return marchenko_pastur1().dilate(s.t);
          if (s.k == 1) return square_pushforward(half_cauchy(s.t));
          if (s.k + 1 > 4) throw Unsupported("free stable densities are not materialised");
          const double a = std::pow(s.t, (s.k + 1) / 2.0);
          return xmk_mu_sq(1, s.k).dilate(a * a);
        }
      },
      spec);
}

namespace {

ModelTransforms free_stable(int k, double t) {
  ModelTransforms mt;
  const double e = (k - 1.0) / (k + 1.0);
  mt.phi_imag = [t, e](double y) { return -t * std::pow(y, e); };
  mt.r_imag = [t, e](double y) { return t * std::pow(y, -e); };
  const double a2 = std::pow(t, k + 1.0);
  mt.s_transform = [k, a2](double u) { return s_transform_xmk(1, k, u) / a2; };
  mt.hamiltonian = [t, k](double y) { return t * (k + 1) / 2.0 * std::pow(y, 2.0 / (k + 1)); };
  return mt;
}

}  // namespace

ModelTransforms model_transforms(const ModelSpec& spec) {
  return std::visit(
      [&](const auto& s) -> ModelTransforms {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Semicircle> || std::is_same_v<T, MarchenkoPastur1>) {
          double t = 1.0;
          if constexpr (std::is_same_v<T, Semicircle>) t = s.t;
          ModelTransforms mt = free_stable(0, t);
          mt.phi_imag = [t](double y) { return -t / y; };
          mt.r_imag = [t](double y) { return t * y; };
          mt.s_transform = [t](double u) { return s_transform_xmk(1, 0, u) / t; };
          mt.hamiltonian = [t](double y) { return 0.5 * t * y * y; };
          mt.pair = GeneratingPair{0.0, t, SymmetricMeasure()};
          mt.law = Law::semicircle(t);
          mt.mu_sq = model_mu_sq(spec);
          return mt;
        }
        if constexpr (std::is_same_v<T, SymCauchy>) {
          const double t = s.t;
          ModelTransforms mt = free_stable(1, t);
          mt.phi_imag = [t](double) { return -t; };
          mt.r_imag = [t](double) { return t; };
          mt.hamiltonian = [t](double y) { return t * y; };
          mt.pair = GeneratingPair{0.0, t, cauchy_measure(1.0)};
          mt.law = Law::cauchy(t);
          mt.mu_sq = model_mu_sq(spec);
          return mt;
        }
        if constexpr (std::is_same_v<T, SymFreeStable>) {
          if (s.k == 0) return model_transforms(Semicircle{s.t});
          if (s.k == 1) return model_transforms(SymCauchy{s.t});
          return free_stable(s.k, s.t);
        }
        if constexpr (std::is_same_v<T, Xmk>) {
          if (s.m == 1) {
            ModelTransforms mt = model_transforms(SymFreeStable{s.k, 1.0});
            if (s.k <= 3 && !mt.mu_sq) mt.mu_sq = xmk_mu_sq(1, s.k);
            return mt;
          }
          ModelTransforms mt;
          const int m = s.m, k = s.k;
          mt.s_transform = [m, k](double u) { return s_transform_xmk(m, k, u); };
          if (m + k <= 4) {
            mt.mu_sq = xmk_mu_sq(m, k);
            const Law law = Law::of(symmetrize(sqrt_pushforward(*mt.mu_sq)));
            mt.law = law;
            mt.phi_imag = [law](double y) { return phi_imag_axis(law, y); };
            mt.r_imag = [law](double y) { return r_imag(law, y); };
          }
          return mt;
        }
      },
      spec);
}

}  // namespace frdiag
