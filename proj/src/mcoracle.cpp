#include "frdiag/mcoracle.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "frdiag/errors.hpp"
#include "frdiag/freeconv.hpp"
#include "frdiag/io.hpp"
#include "frdiag/parallel.hpp"

namespace frdiag {

namespace {

using Mat = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

constexpr double kMinRcond = 1e-12;
constexpr int kMaxRedraws = 10;

Rng trial_rng(const MCConfig& cfg, int trial) { return Rng(splitmix64(cfg.seed ^ static_cast<std::uint64_t>(trial))); }

void check(const MCConfig& cfg) {
  if (cfg.N < 2) throw DomainError("mc: N must be at least 2");
  if (cfg.trials < 1) throw DomainError("mc: trials must be at least 1");
}

Mat ginibre(Rng& rng, int N) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5 / N));
  Mat g(N, N);
  // column-major fill keeps the draw order fixed
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      g(i, j) = {re, im};
    }
  }
  return g;
}

Mat haar_unitary(Rng& rng, int N) {
  const Mat g = ginibre(rng, N);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < N; ++j) {
    const std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

// X <- X G^-1 for a freshly drawn, well-conditioned Ginibre G
void times_inverse_ginibre(Rng& rng, int N, Mat& X) {
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    const Mat g = ginibre(rng, N);
    Eigen::PartialPivLU<Mat> lu(g.transpose());
    if (lu.rcond() < kMinRcond) continue;
    X = lu.solve(X.transpose()).transpose();
    return;
  }
  throw SingularDraw("mc: inverse factor stayed singular after " + std::to_string(kMaxRedraws) + " redraws");
}

// G_1 ... G_m (G_{m+1} ... G_{m+k})^-1
Mat xmk_matrix(Rng& rng, int N, int m, int k) {
  Mat x = ginibre(rng, N);
  for (int i = 1; i < m; ++i) x = x * ginibre(rng, N);
  // the inverse factors are iid, so drawing B_k first gives B_k^-1 ... B_1^-1 in law
  for (int i = 0; i < k; ++i) times_inverse_ginibre(rng, N, x);
  return x;
}

// an R-diagonal element whose symmetrized modulus has the model law
Mat model_matrix(Rng& rng, int N, const ModelSpec& spec) {
  return std::visit(
      [&](const auto& s) -> Mat {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Semicircle>) return std::sqrt(s.t) * xmk_matrix(rng, N, 1, 0);
        if constexpr (std::is_same_v<T, MarchenkoPastur1>) return xmk_matrix(rng, N, 1, 0);
        if constexpr (std::is_same_v<T, SymCauchy>) return s.t * xmk_matrix(rng, N, 1, 1);
        if constexpr (std::is_same_v<T, SymFreeStable>) {
          return std::pow(s.t, (s.k + 1) / 2.0) * xmk_matrix(rng, N, 1, s.k);
        }
        if constexpr (std::is_same_v<T, Xmk>) return xmk_matrix(rng, N, s.m, s.k);
      },
      spec);
}

// quantiles (i + 1/2)/N of a discrete law given as sorted (x, mass) pairs
std::vector<double> quantiles(std::vector<std::pair<double, double>> pts, int N) {
  std::sort(pts.begin(), pts.end());
  const double total = std::accumulate(pts.begin(), pts.end(), 0.0, [](double a, const auto& p) { return a + p.second; });
  std::vector<double> out(N);
  std::size_t j = 0;
  double cum = pts.empty() ? 0.0 : pts[0].second / total;
  for (int i = 0; i < N; ++i) {
    const double p = (i + 0.5) / N;
    while (cum < p && j + 1 < pts.size()) cum += pts[++j].second / total;
    out[i] = pts[j].first;
  }
  return out;
}

Mat x0_matrix(Rng& rng, int N, const X0Spec& x0) {
  return std::visit(
      [&](const auto& s) -> Mat {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ScalarX0>) {
          return s.c * Mat::Identity(N, N);
        } else if constexpr (std::is_same_v<T, SelfAdjointX0>) {
          std::vector<std::pair<double, double>> pts;
          for (const Atom& a : s.law.atoms()) pts.emplace_back(a.x, a.mass);
          for (const DensityNode& n : s.law.nodes()) pts.emplace_back(n.x, n.density * n.weight);
          const std::vector<double> q = quantiles(pts, N);
          Mat a = Mat::Zero(N, N);
          for (int i = 0; i < N; ++i) a(i, i) = q[i];
          return a;
        } else {
          std::vector<std::pair<double, double>> pts;
          if (s.modulus.atom_at_zero() > 0.0) pts.emplace_back(0.0, s.modulus.atom_at_zero());
          for (const Atom& a : s.modulus.atoms()) pts.emplace_back(a.x, a.mass);
          for (const DensityNode& n : s.modulus.nodes()) pts.emplace_back(n.x, n.density * n.weight);
          const std::vector<double> q = quantiles(pts, N);
          Mat d = Mat::Zero(N, N);
          for (int i = 0; i < N; ++i) d(i, i) = q[i];
          return haar_unitary(rng, N) * d;
        }
      },
      x0);
}

void symmetrized_singular_values(const Mat& x, std::vector<double>& out) {
  const Mat xx = x.adjoint() * x;
  Eigen::SelfAdjointEigenSolver<Mat> es(xx, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double s = std::sqrt(std::max(es.eigenvalues()(i), 0.0));
    out.push_back(s);
    out.push_back(-s);
  }
}

// one slot per trial, merged in trial order and sorted
EmpiricalLaw collect(const MCConfig& cfg, EmpiricalLaw::Kind kind,
                     const std::function<void(Rng&, std::vector<double>&)>& trial) {
  check(cfg);
  std::vector<std::vector<double>> slots(cfg.trials);
  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t i) {
    Rng rng = trial_rng(cfg, static_cast<int>(i));
    trial(rng, slots[i]);
  });
  EmpiricalLaw law;
  law.kind = kind;
  for (auto& s : slots) law.values.insert(law.values.end(), s.begin(), s.end());
  std::sort(law.values.begin(), law.values.end());
  return law;
}

SymmetricMeasure product_modulus_law() { return symmetrize(sqrt_pushforward(xmk_mu_sq(2, 0))); }

// CDF of a symmetric law tabulated at its quadrature nodes; each node mass
// is split evenly around the node
std::function<double(double)> node_cdf(const SymmetricMeasure& mu) {
  std::vector<std::pair<double, double>> pts;
  for (const Atom& a : mu.modulus().atoms()) pts.emplace_back(a.x, a.mass);
  for (const DensityNode& n : mu.modulus().nodes()) pts.emplace_back(n.x, n.density * n.weight);
  std::sort(pts.begin(), pts.end());
  const double a0 = mu.mass_at_zero();
  std::vector<double> x, F;
  double cum = 0.0;
  for (const auto& [px, pm] : pts) {
    x.push_back(px);
    F.push_back(0.5 * (1.0 + a0 + cum + 0.5 * pm));
    cum += pm;
  }
  std::vector<double> xs, Fs;
  for (std::size_t i = x.size(); i-- > 0;) {
    xs.push_back(-x[i]);
    Fs.push_back(1.0 - F[i]);
  }
  xs.push_back(0.0);
  Fs.push_back(0.5);
  xs.insert(xs.end(), x.begin(), x.end());
  Fs.insert(Fs.end(), F.begin(), F.end());
  return tabulated_cdf(std::move(xs), std::move(Fs));
}

}  // namespace

std::string to_string(EmpiricalLaw::Kind kind) {
  return kind == EmpiricalLaw::Kind::eigen_moduli ? "eigen_moduli" : "symmetrized_singular";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::complex<double>> sample_xmk_eigenvalues(const MCConfig& cfg, int m, int k) {
  check(cfg);
  if (m < 1 || k < 0) throw DomainError("sample_xmk_eigen: need m >= 1 and k >= 0");
  std::vector<std::vector<std::complex<double>>> slots(cfg.trials);
  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t i) {
    Rng rng = trial_rng(cfg, static_cast<int>(i));
    const Mat x = xmk_matrix(rng, cfg.N, m, k);
    Eigen::ComplexEigenSolver<Mat> es(x, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("sample_xmk_eigen: eigensolver failed");
    slots[i].assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  });
  std::vector<std::complex<double>> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

EmpiricalLaw sample_xmk_eigen(const MCConfig& cfg, int m, int k) {
  EmpiricalLaw law;
  law.kind = EmpiricalLaw::Kind::eigen_moduli;
  for (const auto& z : sample_xmk_eigenvalues(cfg, m, k)) law.values.push_back(std::abs(z));
  std::sort(law.values.begin(), law.values.end());
  return law;
}

EmpiricalLaw free_add_oracle(const X0Spec& a, const ModelSpec& b, const MCConfig& cfg) {
  return collect(cfg, EmpiricalLaw::Kind::symmetrized_singular, [&](Rng& rng, std::vector<double>& out) {
    const Mat A = x0_matrix(rng, cfg.N, a);
    const Mat B = model_matrix(rng, cfg.N, b);
    const Mat U = haar_unitary(rng, cfg.N);
    symmetrized_singular_values(A + U * B * U.adjoint(), out);
  });
}

CommutatorResult commutator_oracle(const MCConfig& cfg, int sign) {
  if (sign != 1 && sign != -1) throw DomainError("commutator_oracle: sign must be +1 or -1");
  CommutatorResult res;
  res.sample = collect(cfg, EmpiricalLaw::Kind::symmetrized_singular, [&](Rng& rng, std::vector<double>& out) {
    const Mat g1 = ginibre(rng, cfg.N);
    const Mat g2 = ginibre(rng, cfg.N);
    symmetrized_singular_values(g1 * g2 + double(sign) * (g2 * g1), out);
  });
  const Law law = Law::of(product_modulus_law());
  std::vector<double> grid(4001);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = -6.0 + 12.0 * double(i) / double(grid.size() - 1);
  const ConvolvedDensity dens = convolve_density(law, law, grid, 2e-3);
  res.ref_x = dens.x;
  res.ref_cdf = cumulative_trapezoid(dens.x, dens.density);
  res.ks = ks_distance(res.sample, tabulated_cdf(res.ref_x, res.ref_cdf));
  return res;
}

ProductResult product_oracle(const MCConfig& cfg) {
  ProductResult res;
  res.sample = collect(cfg, EmpiricalLaw::Kind::symmetrized_singular, [&](Rng& rng, std::vector<double>& out) {
    const Mat g1 = ginibre(rng, cfg.N);
    const Mat g2 = ginibre(rng, cfg.N);
    symmetrized_singular_values(g1 * g2, out);
  });
  const SymmetricMeasure ref = product_modulus_law();
  res.ks = ks_distance(res.sample, node_cdf(ref));
  return res;
}

double ks_distance(const EmpiricalLaw& sample, const std::function<double(double)>& cdf, double lo, double hi) {
  const auto& v = sample.values;
  if (v.empty()) throw EmptySample("ks_distance: empty sample");
  const double n = double(v.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double x = v[i];
    if (x >= lo && x <= hi) {
      const double right = cdf(x);
      const double left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
      d = std::max({d, std::abs(double(j) / n - right), std::abs(double(i) / n - left)});
    }
    i = j;
  }
  return std::min(d, 1.0);
}

std::function<double(double)> tabulated_cdf(std::vector<double> x, std::vector<double> F) {
  if (x.size() != F.size() || x.size() < 2) throw DomainError("tabulated_cdf: need matching grids of size >= 2");
  return [x = std::move(x), F = std::move(F)](double t) {
    if (t <= x.front()) return 0.0;
    if (t >= x.back()) return 1.0;
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t j = std::size_t(it - x.begin());
    const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return std::clamp(F[j - 1] + w * (F[j] - F[j - 1]), 0.0, 1.0);
  };
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& x, const std::vector<double>& density) {
  std::vector<double> c(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) c[i] = c[i - 1] + 0.5 * (x[i] - x[i - 1]) * (density[i] + density[i - 1]);
  if (c.back() > 0.0) {
    for (double& v : c) v /= c.back();
  }
  return c;
}

std::string to_csv(const EmpiricalLaw& law) {
  std::string s = "value\n";
  for (double v : law.values) s += io::fmt(v) + "\n";
  return s;
}

std::string meta_json(const MCConfig& cfg, const std::string& what,
                      const std::vector<std::pair<std::string, double>>& ks) {
  nlohmann::json j;
  j["what"] = what;
  j["N"] = cfg.N;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["rng"] = "mt19937_64, seed splitmix64(seed ^ trial)";
  for (const auto& [name, value] : ks) j["ks"][name] = value;
  return j.dump(2);
}

}  // namespace frdiag
