#include "frdiag/measure.hpp"

#include <algorithm>
#include <cstdio>

#include "frdiag/errors.hpp"
#include "frdiag/quadrature.hpp"

namespace frdiag {

namespace {

constexpr double kMassTol = 1e-10;
constexpr double kRenormTol = 1e-6;

using NodeSource = std::function<std::vector<DensityNode>(int)>;

}  // namespace

struct PositiveMeasure::Data {
  double atom0 = 1.0;
  std::vector<Atom> atoms;
  std::vector<DensityNode> nodes;
  std::function<double(double)> density;
  std::optional<DensitySupport> support;
  NodeSource refine;
  int levels = 0;
  bool atom_sequence = false;
};

std::string to_string(const ExtendedReal& v) {
  if (v.infinite) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v.value);
  return buf;
}

std::vector<DensityNode> graded_nodes(const std::function<double(double)>& density,
                                      const DensitySupport& support, int levels) {
  const quad::GaussRule& rule = quad::gl64();
  const bool finite = std::isfinite(support.hi);
  if (finite && !(support.hi > support.lo)) throw DomainError("graded_nodes: empty support");
  if (!finite && !(support.scale > 0)) throw DomainError("graded_nodes: scale must be positive");

  std::vector<DensityNode> out;
  out.reserve(2 * (levels + 1) * rule.nodes.size());

  // piece 0 ends at lo, piece 1 ends at hi (or +inf); s in (0, 1], s -> 0 at the end
  auto map = [&](int piece, double s, double& x, double& jac) {
    if (finite) {
      const double half = 0.5 * (support.hi - support.lo);
      x = piece == 0 ? support.lo + half * s : support.hi - half * s;
      jac = half;
    } else if (piece == 0) {
      x = support.lo + support.scale * s;
      jac = support.scale;
    } else {
      x = support.lo + support.scale / s;
      jac = support.scale / (s * s);
    }
  };

  for (int piece = 0; piece < 2; ++piece) {
    for (int j = 0; j <= levels; ++j) {
      const double b = std::ldexp(1.0, -j);
      const double a = j == levels ? 0.0 : 0.5 * b;
      const double half = 0.5 * (b - a);
      const double mid = a + half;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double v = mid + half * rule.nodes[i];
        const double v2 = v * v;
        const double s = v2 * v2;
        const double ds = 4.0 * v2 * v * half * rule.weights[i];
        if (s <= 0.0 || ds <= 0.0) continue;
        double x = 0.0, jac = 0.0;
        map(piece, s, x, jac);
        // nodes that round onto an endpoint carry negligible weight
        if (!(x > support.lo) || !(x < support.hi)) continue;
        const double f = density(x);
        if (!std::isfinite(f) || f < 0.0) {
          throw DomainError("graded_nodes: density is negative or not finite at x = " +
                            std::to_string(x));
        }
        out.push_back({x, f, jac * ds});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const DensityNode& l, const DensityNode& r) { return l.x < r.x; });
  out.erase(std::unique(out.begin(), out.end(), [](const DensityNode& l, const DensityNode& r) { return l.x == r.x; }),
            out.end());
  return out;
}

namespace {

double node_mass(std::span<const DensityNode> nodes) {
  double m = 0.0;
  for (const auto& n : nodes) m += n.density * n.weight;
  return m;
}

void validate(const PositiveMeasure::Data& d) {
  if (!(d.atom0 >= 0.0)) throw DomainError("PositiveMeasure: negative atom at zero");
  double total = d.atom0;
  double prev = 0.0;
  for (const Atom& a : d.atoms) {
    if (!(a.x > prev) && !(prev == 0.0 && a.x > 0.0)) {
      throw DomainError("PositiveMeasure: atom locations must be positive and increasing");
    }
    if (!(a.mass >= 0.0)) throw DomainError("PositiveMeasure: negative atom mass");
    prev = a.x;
    total += a.mass;
  }
  double prev_node = 0.0;
  for (const DensityNode& n : d.nodes) {
    if (!(n.x > prev_node) && !(prev_node == 0.0 && n.x > 0.0)) {
      throw DomainError("PositiveMeasure: node locations must be positive and increasing");
    }
    if (!(n.density >= 0.0) || !(n.weight >= 0.0)) {
      throw DomainError("PositiveMeasure: negative density or weight");
    }
    prev_node = n.x;
  }
  total += node_mass(d.nodes);
  if (std::abs(total - 1.0) > kMassTol) {
    throw DomainError("PositiveMeasure: total mass " + std::to_string(total) + " differs from one");
  }
}

std::vector<DensityNode> map_nodes(std::vector<DensityNode> nodes,
                                   const std::function<DensityNode(const DensityNode&)>& f) {
  for (auto& n : nodes) n = f(n);
  return nodes;
}

}  // namespace

PositiveMeasure::PositiveMeasure() : data_(std::make_shared<const Data>()) {}

PositiveMeasure::PositiveMeasure(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

PositiveMeasure PositiveMeasure::dirac(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("dirac: location must be finite and >= 0");
  if (x == 0.0) return PositiveMeasure();
  return from_atoms(0.0, {{x, 1.0}});
}

PositiveMeasure PositiveMeasure::from_atoms(double atom0, std::vector<Atom> atoms) {
  auto d = std::make_shared<Data>();
  d->atom0 = atom0;
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  d->atoms = std::move(atoms);
  validate(*d);
  return PositiveMeasure(std::move(d));
}

PositiveMeasure PositiveMeasure::from_atom_sequence(const std::function<Atom(int)>& term, int count) {
  if (count < 1) throw DomainError("from_atom_sequence: need at least one term");
  auto d = std::make_shared<Data>();
  d->atom0 = 0.0;
  double mass = 0.0;
  for (int n = 1; n <= count; ++n) {
    Atom a = term(n);
    mass += a.mass;
    d->atoms.push_back(a);
  }
  if (mass > 1.0 + kMassTol) throw DomainError("from_atom_sequence: masses exceed one");
  d->atoms.back().mass += 1.0 - mass;
  d->atom_sequence = true;
  validate(*d);
  return PositiveMeasure(std::move(d));
}

PositiveMeasure PositiveMeasure::from_density(std::function<double(double)> density,
                                              DensitySupport support, double atom0,
                                              std::vector<Atom> atoms, GridOptions grid) {
  auto d = std::make_shared<Data>();
  d->atom0 = atom0;
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  d->atoms = std::move(atoms);
  double expected = 1.0 - atom0;
  for (const Atom& a : d->atoms) expected -= a.mass;
  if (!(expected > 0.0)) throw DomainError("from_density: atoms leave no mass for the density");

  auto nodes = graded_nodes(density, support, grid.levels);
  const double mass = node_mass(nodes);
  if (!(mass > 0.0)) throw MassDefect("from_density: density integrates to zero");
  const double factor = expected / mass;
  if (std::abs(factor - 1.0) > kRenormTol) {
    throw MassDefect("from_density: density mass " + std::to_string(mass) + " but expected " +
                     std::to_string(expected));
  }
  for (auto& n : nodes) n.density *= factor;
  auto scaled = [f = std::move(density), factor](double x) { return factor * f(x); };
  d->density = scaled;
  d->support = support;
  d->nodes = std::move(nodes);
  d->levels = grid.levels;
  d->refine = [scaled, support](int levels) { return graded_nodes(scaled, support, levels); };
  validate(*d);
  return PositiveMeasure(std::move(d));
}

PositiveMeasure PositiveMeasure::from_nodes(double atom0, std::vector<Atom> atoms,
                                            std::vector<DensityNode> nodes) {
  auto d = std::make_shared<Data>();
  d->atom0 = atom0;
  d->atoms = std::move(atoms);
  d->nodes = std::move(nodes);
  validate(*d);
  return PositiveMeasure(std::move(d));
}

double PositiveMeasure::atom_at_zero() const { return data_->atom0; }
std::span<const Atom> PositiveMeasure::atoms() const { return data_->atoms; }
std::span<const DensityNode> PositiveMeasure::nodes() const { return data_->nodes; }
bool PositiveMeasure::has_density() const { return !data_->nodes.empty(); }
bool PositiveMeasure::is_atom_sequence() const { return data_->atom_sequence; }

double PositiveMeasure::total_mass() const {
  double m = data_->atom0 + node_mass(data_->nodes);
  for (const Atom& a : data_->atoms) m += a.mass;
  return m;
}

std::optional<double> PositiveMeasure::point_location() const {
  if (!data_->nodes.empty()) return std::nullopt;
  if (data_->atom0 >= 1.0 - kMassTol) return 0.0;
  for (const Atom& a : data_->atoms) {
    if (a.mass >= 1.0 - kMassTol) return a.x;
  }
  return std::nullopt;
}

double PositiveMeasure::density(double x) const {
  if (!data_->density || !data_->support) return 0.0;
  if (x <= data_->support->lo || x >= data_->support->hi) return 0.0;
  return data_->density(x);
}

std::complex<double> PositiveMeasure::cauchy_transform(std::complex<double> z) const {
  using C = std::complex<double>;
  C acc = data_->atom0 / z;
  for (const Atom& a : data_->atoms) acc += a.mass / (z - a.x);
  if (data_->nodes.empty()) return acc;

  const double x0 = z.real(), y = z.imag();
  const bool subtract = data_->support && data_->nodes.size() >= 3 && std::isfinite(data_->support->hi) &&
                        x0 > data_->support->lo && x0 < data_->support->hi;
  const auto& nd = data_->nodes;
  std::size_t j = 1;
  if (subtract) {
    j = std::size_t(std::lower_bound(nd.begin(), nd.end(), x0, [](const DensityNode& n, double x) { return n.x < x; }) -
                    nd.begin());
    j = std::clamp<std::size_t>(j, 1, nd.size() - 2);
  }
  // the plain node sum is fine while Im z exceeds a few local node spacings
  if (!subtract || y > 4.0 * (nd[j + 1].x - nd[j - 1].x)) {
    for (const DensityNode& n : nd) acc += n.density * n.weight / (z - n.x);
    return acc;
  }
  const double lo = data_->support->lo, hi = data_->support->hi;
  // value and slope at x0 from the quadratic through the three nearest nodes;
  // calling the density here would be far too slow for root-continued laws
  const double xa = nd[j - 1].x, xb = nd[j].x, xc = nd[j + 1].x;
  const double fa = nd[j - 1].density, fb = nd[j].density, fc = nd[j + 1].density;
  const double g0 = fa * (x0 - xb) * (x0 - xc) / ((xa - xb) * (xa - xc)) +
                    fb * (x0 - xa) * (x0 - xc) / ((xb - xa) * (xb - xc)) +
                    fc * (x0 - xa) * (x0 - xb) / ((xc - xa) * (xc - xb));
  const double g1 = fa * (2.0 * x0 - xb - xc) / ((xa - xb) * (xa - xc)) +
                    fb * (2.0 * x0 - xa - xc) / ((xb - xa) * (xb - xc)) +
                    fc * (2.0 * x0 - xa - xb) / ((xc - xa) * (xc - xb));
  if (nd.size() < 3 || !std::isfinite(g0) || !std::isfinite(g1)) {
    for (const DensityNode& n : nd) acc += n.density * n.weight / (z - n.x);
    return acc;
  }
  C rem = 0.0;
  for (const DensityNode& n : data_->nodes) {
    rem += (n.density - g0 - g1 * (n.x - x0)) * n.weight / (z - n.x);
  }
  // int_lo^hi dt/(z-t) and int_lo^hi (t-x0)/(z-t) dt
  const C L = std::log(z - lo) - std::log(z - hi);
  const C L1 = (z - x0) * L - (hi - lo);
  return acc + rem + g0 * L + g1 * L1;
}

double PositiveMeasure::cdf(double x) const {
  if (x < 0.0) return 0.0;
  double acc = data_->atom0;
  for (const Atom& a : data_->atoms) {
    if (a.x <= x) acc += a.mass;
  }
  if (data_->nodes.empty()) return acc;
  if (!data_->density || !data_->support) {
    for (const auto& n : data_->nodes) {
      if (n.x <= x) acc += n.density * n.weight;
    }
    return std::min(acc, 1.0);
  }
  const DensitySupport& sp = *data_->support;
  const auto& f = data_->density;
  const double dens_mass = node_mass(data_->nodes);
  if (x <= sp.lo) return acc;
  if (x >= sp.hi) return acc + dens_mass;
  const bool upper = std::isfinite(sp.hi) ? (x > 0.5 * (sp.lo + sp.hi)) : (x > sp.lo + sp.scale);
  double part = 0.0;
  if (!upper) {
    const double len = x - sp.lo;
    part = quad::integrate(
        [&](double v) {
          const double v2 = v * v;
          return f(sp.lo + len * v2 * v2) * 4.0 * v2 * v * len;
        },
        0.0, 1.0, 1e-13, 12);
  } else if (std::isfinite(sp.hi)) {
    const double len = sp.hi - x;
    const double tail = quad::integrate(
        [&](double v) {
          const double v2 = v * v;
          return f(sp.hi - len * v2 * v2) * 4.0 * v2 * v * len;
        },
        0.0, 1.0, 1e-13, 12);
    part = dens_mass - tail;
  } else {
    const double len = x - sp.lo;
    const double tail = quad::integrate(
        [&](double v) {
          if (v <= 0.0) return 0.0;
          const double v2 = v * v;
          const double v4 = v2 * v2;
          return f(sp.lo + len / v4) * 4.0 * len / (v4 * v);
        },
        0.0, 1.0, 1e-13, 12);
    part = dens_mass - tail;
  }
  return std::clamp(acc + part, 0.0, 1.0);
}

std::vector<double> PositiveMeasure::refinement_estimates(const std::function<double(double)>& g,
                                                          int extra) const {
  std::vector<double> est;
  auto sum = [&](std::span<const DensityNode> nodes) {
    double acc = 0.0;
    for (const auto& n : nodes) acc += n.density * n.weight * g(n.x);
    return acc;
  };
  est.push_back(sum(data_->nodes));
  if (data_->refine) {
    for (int e = 1; e <= extra; ++e) est.push_back(sum(data_->refine(data_->levels + e)));
  }
  return est;
}

ExtendedReal PositiveMeasure::integrate_positive(const std::function<double(double)>& g) const {
  double atom_part = 0.0;
  std::vector<double> partial;
  for (const Atom& a : data_->atoms) {
    const double v = a.mass * g(a.x);
    if (!std::isfinite(v)) return ExtendedReal::infinity();
    atom_part += v;
    partial.push_back(atom_part);
  }
  if (data_->atom_sequence && quad::diverging(partial)) return ExtendedReal::infinity();

  double dens_part = 0.0;
  if (!data_->nodes.empty()) {
    const auto est = refinement_estimates(g, data_->refine ? 3 : 0);
    for (double e : est) {
      if (!std::isfinite(e)) return ExtendedReal::infinity();
    }
    if (quad::diverging(est)) return ExtendedReal::infinity();
    dens_part = est.back();
  }
  return ExtendedReal::finite(atom_part + dens_part);
}

PositiveMeasure PositiveMeasure::dilate(double a) const {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("dilate: factor must be positive");
  auto d = std::make_shared<Data>(*data_);
  for (auto& at : d->atoms) at.x *= a;
  auto scale_node = [a](const DensityNode& n) { return DensityNode{a * n.x, n.density / a, a * n.weight}; };
  d->nodes = map_nodes(std::move(d->nodes), scale_node);
  if (data_->density) {
    d->density = [f = data_->density, a](double y) { return f(y / a) / a; };
  }
  if (data_->support) {
    DensitySupport sp = *data_->support;
    sp.lo *= a;
    sp.hi *= a;
    sp.scale *= a;
    d->support = sp;
  }
  if (data_->refine) {
    d->refine = [r = data_->refine, scale_node](int levels) { return map_nodes(r(levels), scale_node); };
  }
  return PositiveMeasure(std::move(d));
}

PositiveMeasure square_pushforward(const PositiveMeasure& mu_abs) {
  const auto& src = *mu_abs.data_;
  auto d = std::make_shared<PositiveMeasure::Data>(src);
  for (auto& at : d->atoms) at.x = at.x * at.x;
  auto sq = [](const DensityNode& n) {
    return DensityNode{n.x * n.x, n.density / (2.0 * n.x), 2.0 * n.x * n.weight};
  };
  d->nodes = map_nodes(std::move(d->nodes), sq);
  if (src.density) {
    d->density = [f = src.density](double y) {
      const double r = std::sqrt(y);
      return f(r) / (2.0 * r);
    };
  }
  if (src.support) {
    DensitySupport sp = *src.support;
    sp.lo *= sp.lo;
    sp.hi *= sp.hi;
    sp.scale = std::isfinite(src.support->hi) ? sp.scale : (src.support->lo + sp.scale) *
                                                                   (src.support->lo + sp.scale) -
                                                               sp.lo;
    d->support = sp;
  }
  if (src.refine) {
    d->refine = [r = src.refine, sq](int levels) { return map_nodes(r(levels), sq); };
  }
  return PositiveMeasure(std::move(d));
}

PositiveMeasure sqrt_pushforward(const PositiveMeasure& mu_sq) {
  const auto& src = *mu_sq.data_;
  auto d = std::make_shared<PositiveMeasure::Data>(src);
  for (auto& at : d->atoms) at.x = std::sqrt(at.x);
  auto rt = [](const DensityNode& n) {
    const double r = std::sqrt(n.x);
    return DensityNode{r, n.density * 2.0 * r, n.weight / (2.0 * r)};
  };
  d->nodes = map_nodes(std::move(d->nodes), rt);
  if (src.density) {
    d->density = [f = src.density](double r) { return f(r * r) * 2.0 * r; };
  }
  if (src.support) {
    DensitySupport sp = *src.support;
    sp.lo = std::sqrt(sp.lo);
    sp.hi = std::sqrt(sp.hi);
    sp.scale = std::isfinite(src.support->hi) ? sp.scale
                                               : std::sqrt(src.support->lo + src.support->scale) - sp.lo;
    d->support = sp;
  }
  if (src.refine) {
    d->refine = [r = src.refine, rt](int levels) { return map_nodes(r(levels), rt); };
  }
  return PositiveMeasure(std::move(d));
}

ExtendedReal moment_p(const PositiveMeasure& mu, double p) {
  if (p < 0.0 && mu.atom_at_zero() > 0.0) return ExtendedReal::infinity();
  ExtendedReal v = mu.integrate_positive([p](double t) { return std::pow(t, p); });
  if (p == 0.0 && v.is_finite()) v.value += mu.atom_at_zero();
  return v;
}

SymmetricMeasure symmetrize(const PositiveMeasure& mu) { return SymmetricMeasure(mu); }

ExtendedReal log_plus_integral(const PositiveMeasure& mu) {
  return mu.integrate_positive([](double t) { return t > 1.0 ? std::log(t) : 0.0; });
}

SymmetricMeasure SymmetricMeasure::bernoulli(double a) {
  return SymmetricMeasure(PositiveMeasure::dirac(std::abs(a)));
}

bool SymmetricMeasure::is_point_mass() const {
  const auto loc = modulus_.point_location();
  return loc && *loc == 0.0;
}

double SymmetricMeasure::cdf(double x) const {
  if (x >= 0.0) return 0.5 * (modulus_.cdf(x) + 1.0);
  const double y = -x;
  double left = modulus_.cdf(y);
  for (const Atom& a : modulus_.atoms()) {
    if (a.x == y) left -= a.mass;
  }
  return 0.5 * (1.0 - left);
}

RealMeasure RealMeasure::from_atoms(std::vector<Atom> atoms) { return from_nodes(std::move(atoms), {}); }

RealMeasure RealMeasure::from_nodes(std::vector<Atom> atoms, std::vector<DensityNode> nodes) {
  RealMeasure m;
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  std::sort(nodes.begin(), nodes.end(), [](const DensityNode& l, const DensityNode& r) { return l.x < r.x; });
  for (const auto& a : atoms) {
    if (!(a.mass >= 0.0)) throw DomainError("RealMeasure: negative atom mass");
  }
  m.atoms_ = std::move(atoms);
  m.nodes_ = std::move(nodes);
  if (std::abs(m.total_mass() - 1.0) > kMassTol) throw DomainError("RealMeasure: total mass differs from one");
  return m;
}

RealMeasure RealMeasure::from_symmetric(const SymmetricMeasure& mu) {
  const PositiveMeasure& h = mu.modulus();
  std::vector<Atom> atoms;
  if (h.atom_at_zero() > 0.0) atoms.push_back({0.0, h.atom_at_zero()});
  for (const Atom& a : h.atoms()) {
    atoms.push_back({a.x, 0.5 * a.mass});
    atoms.push_back({-a.x, 0.5 * a.mass});
  }
  std::vector<DensityNode> nodes;
  for (const DensityNode& n : h.nodes()) {
    nodes.push_back({n.x, 0.5 * n.density, n.weight});
    nodes.push_back({-n.x, 0.5 * n.density, n.weight});
  }
  return from_nodes(std::move(atoms), std::move(nodes));
}

double RealMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.mass;
  return m + node_mass(nodes_);
}

std::optional<double> RealMeasure::point_location() const {
  if (!nodes_.empty()) return std::nullopt;
  for (const auto& a : atoms_) {
    if (a.mass >= 1.0 - kMassTol) return a.x;
  }
  return std::nullopt;
}

double RealMeasure::atom_mass_at(double x, double tol) const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (std::abs(a.x - x) <= tol) m += a.mass;
  }
  return m;
}

}  // namespace frdiag
