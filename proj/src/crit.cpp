#include "novikit/crit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <set>

#include "novikit/error.hpp"

namespace novikit {

namespace {

// ---------------------------------------------------------------------------
// Polynomials over the Gaussian rationals (coefficients, constant first)

using Poly = std::vector<Gaussian>;
using Complex = std::complex<long double>;

void trim(Poly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

Gaussian horner(const Poly& p, const Gaussian& z) {
  Gaussian acc;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

// p / (z - root), assuming root is a root.
Poly deflate(const Poly& p, const Gaussian& root) {
  Poly q(p.size() - 1);
  Gaussian carry;
  for (std::size_t i = p.size() - 1; i >= 1; --i) {
    carry = p[i] + carry * root;
    q[i - 1] = carry;
  }
  return q;
}

Complex to_complex(const Gaussian& g) { return {g.re().to_double(), g.im().to_double()}; }

// Simultaneous (Durand-Kerner) iteration for all roots.
std::vector<Complex> numeric_roots(const Poly& p) {
  const std::size_t n = p.size() - 1;
  std::vector<Complex> c(p.size());
  const Complex lead = to_complex(p.back());
  for (std::size_t i = 0; i < p.size(); ++i) c[i] = to_complex(p[i]) / lead;
  long double radius = 0;
  for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[i]));
  radius = 1 + radius;
  std::vector<Complex> z(n);
  const Complex seed(0.4L, 0.9L);
  for (std::size_t k = 0; k < n; ++k) z[k] = radius * std::pow(seed, static_cast<long double>(k));
  auto eval = [&](Complex x) {
    Complex acc = 1;
    for (std::size_t i = n; i-- > 0;) acc = acc * x + c[i];
    return acc;
  };
  for (int iter = 0; iter < 2000; ++iter) {
    long double change = 0;
    for (std::size_t k = 0; k < n; ++k) {
      Complex denom = 1;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) denom *= z[k] - z[j];
      if (std::abs(denom) == 0) denom = 1e-30L;
      Complex step = eval(z[k]) / denom;
      z[k] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-30L) break;
  }
  return z;
}

// Continued-fraction convergents of x with bounded denominators.
std::vector<Rational> convergents(long double x) {
  std::vector<Rational> out;
  long long h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  long double rest = x;
  for (int i = 0; i < 40; ++i) {
    long double a = std::floor(rest);
    if (std::fabs(a) > 1e15L) break;
    const long long ai = static_cast<long long>(a);
    const long long h = ai * h_prev + h_prev2;
    const long long k = ai * k_prev + k_prev2;
    if (k > 1000000000LL || k <= 0) break;
    out.emplace_back(h, k);
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    long double frac = rest - a;
    if (frac < 1e-15L) break;
    rest = 1 / frac;
  }
  return out;
}

// Roots of p in Q(i) with multiplicities; whatever is left has none.
std::pair<std::vector<std::pair<Gaussian, int>>, Poly> gaussian_roots(Poly p) {
  std::vector<std::pair<Gaussian, int>> roots;
  trim(p);
  auto record = [&](const Gaussian& r) {
    int mult = 0;
    while (p.size() > 1 && horner(p, r).is_zero()) {
      p = deflate(p, r);
      ++mult;
    }
    roots.emplace_back(r, mult);
  };
  while (p.size() > 1) {
    if (p.size() == 2) {
      record(-p[0] / p[1]);
      continue;
    }
    if (p[0].is_zero()) {
      record(Gaussian());
      continue;
    }
    bool found = false;
    for (const Complex& z : numeric_roots(p)) {
      std::vector<Rational> re = convergents(z.real());
      std::vector<Rational> im = convergents(z.imag());
      if (std::fabs(z.imag()) < 1e-12L * std::max<long double>(1, std::abs(z))) im.insert(im.begin(), Rational(0));
      if (std::fabs(z.real()) < 1e-12L * std::max<long double>(1, std::abs(z))) re.insert(re.begin(), Rational(0));
      for (std::size_t sum = 0; !found && sum < re.size() + im.size(); ++sum) {
        for (std::size_t i = 0; i < re.size() && i <= sum; ++i) {
          const std::size_t j = sum - i;
          if (j >= im.size()) continue;
          Gaussian cand(re[i], im[j]);
          if (horner(p, cand).is_zero()) {
            record(cand);
            found = true;
            break;
          }
        }
      }
      if (found) break;
    }
    if (!found) break;
  }
  if (p.size() <= 1) p.clear();
  return {roots, p};
}

// ---------------------------------------------------------------------------
// Linear algebra over truncated Novikov scalars

ExtRational val_bound(const NovikovScalar& s) { return s.is_zero() ? s.cutoff() : s.val(); }

// Solves J x = b by elimination, pivoting on the entry of least valuation.
std::vector<NovikovScalar> solve_linear(std::vector<std::vector<NovikovScalar>> J, std::vector<NovikovScalar> b) {
  const std::size_t n = b.size();
  std::vector<std::size_t> col_of(n);
  std::vector<std::size_t> cols(n);
  for (std::size_t i = 0; i < n; ++i) cols[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = n, pc = n;
    for (std::size_t r = k; r < n; ++r) {
      for (std::size_t c = k; c < n; ++c) {
        const NovikovScalar& e = J[r][cols[c]];
        if (e.is_zero()) continue;
        if (pr == n || e.val() < J[pr][cols[pc]].val()) {
          pr = r;
          pc = c;
        }
      }
    }
    if (pr == n) throw Error(ErrorKind::SingularJacobian, "the Jacobian is singular at the current precision");
    std::swap(J[k], J[pr]);
    std::swap(b[k], b[pr]);
    std::swap(cols[k], cols[pc]);
    const NovikovScalar inv = J[k][cols[k]].invert();
    for (std::size_t r = k + 1; r < n; ++r) {
      if (J[r][cols[k]].is_zero()) continue;
      const NovikovScalar f = J[r][cols[k]] * inv;
      for (std::size_t c = k; c < n; ++c) J[r][cols[c]] -= f * J[k][cols[c]];
      b[r] -= f * b[k];
    }
  }
  std::vector<NovikovScalar> x(n);
  for (std::size_t k = n; k-- > 0;) {
    NovikovScalar acc = b[k];
    for (std::size_t c = k + 1; c < n; ++c) acc -= J[k][cols[c]] * x[cols[c]];
    x[cols[k]] = acc * J[k][cols[k]].invert();
  }
  return x;
}

// Keeps only the terms below the scalar's cutoff and forgets the cutoff.
NovikovScalar exactify(const NovikovScalar& s, const ExtRational& below) {
  return s.truncate(below).with_cutoff(ExtRational::infinity());
}

}  // namespace

std::string SymbolicRoot::str() const {
  std::string out;
  for (std::size_t k = polynomial.size(); k-- > 0;) {
    if (polynomial[k].is_zero()) continue;
    std::string c = "(" + polynomial[k].str() + ")";
    std::string piece = k == 0 ? c : c + (k == 1 ? "*z" : "*z^" + std::to_string(k));
    out += (out.empty() ? "" : " + ") + piece;
  }
  return "z*T^(" + exponent.str() + ") with " + out + " = 0";
}

NewtonResult newton_leading(const MultiSeries& f, const VarName& t) {
  for (const auto& v : f.used_vars())
    if (v != t) throw Error(ErrorKind::InvalidArgument, "newton_leading expects a series in " + t + " only");
  if (f.is_zero()) throw Error(ErrorKind::InvalidArgument, "the equation is identically zero");

  std::map<long, NovikovScalar> coeff;
  for (const auto& [m, c] : f.terms()) coeff.emplace(m.exponent(t), c);
  std::vector<std::pair<long, Rational>> pts;
  for (const auto& [k, c] : coeff) pts.emplace_back(k, c.val().value());

  // Lower convex hull, left to right.
  std::vector<std::pair<long, Rational>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      // drop b when it lies on or above segment a-p
      Rational cross = (b.second - a.second) * Rational(p.first - a.first) -
                       (p.second - a.second) * Rational(b.first - a.first);
      if (cross.sign() >= 0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }

  NewtonResult out;
  out.zero_root = pts.front().first > 0;
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    const auto& [k1, v1] = hull[s];
    const auto& [k2, v2] = hull[s + 1];
    const Rational slope = (v2 - v1) / Rational(k2 - k1);
    Poly poly(static_cast<std::size_t>(k2 - k1 + 1));
    for (const auto& [k, c] : coeff) {
      if (k < k1 || k > k2) continue;
      if (c.val().value() == v1 + slope * Rational(k - k1)) poly[static_cast<std::size_t>(k - k1)] = c.leading_coefficient();
    }
    auto [roots, rest] = gaussian_roots(poly);
    const Rational exponent = -slope;
    for (const auto& [z, mult] : roots) {
      if (z.is_zero()) continue;
      out.roots.push_back(LeadingRoot{exponent, z, mult});
    }
    if (!rest.empty()) out.unresolved.push_back(SymbolicRoot{exponent, rest});
  }
  if (out.roots.empty() && out.unresolved.empty() && !out.zero_root)
    throw Error(ErrorKind::NoRoots, "the Newton polygon of " + f.str() + " has no edges");
  return out;
}

HenselResult hensel_lift(const std::vector<MultiSeries>& equations, const std::vector<VarName>& unknowns,
                         const Point& start, const ExtRational& target) {
  const std::size_t n = unknowns.size();
  if (equations.size() != n)
    throw Error(ErrorKind::InvalidArgument, "hensel_lift needs as many equations as unknowns");
  if (target.is_infinite()) throw Error(ErrorKind::InvalidArgument, "hensel_lift needs a finite target energy");
  for (const auto& eq : equations)
    for (const auto& v : eq.used_vars())
      if (std::find(unknowns.begin(), unknowns.end(), v) == unknowns.end())
        throw Error(ErrorKind::InvalidArgument, "equation involves '" + v + "', which is not an unknown");
  for (const auto& u : unknowns)
    if (!start.count(u)) throw Error(ErrorKind::InvalidArgument, "no starting value for '" + u + "'");

  std::vector<std::vector<MultiSeries>> jac(n, std::vector<MultiSeries>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) jac[i][j] = partial_derivative(equations[i], unknowns[j]);

  const Rational E = target.value();
  Rational spread(0);
  for (const auto& [v, s] : start)
    if (!s.is_zero()) spread = std::max(spread, abs(s.val().value()));

  HenselResult best;
  best.lifted_to = Rational(0);
  best.residual_valuation = Rational(0);
  bool have_best = false;
  int total_iterations = 0;

  // Working precision grows until the final correction certifies the target.
  for (int attempt = 0; attempt < 6; ++attempt) {
    const Rational margin = Rational(2 << attempt) + spread * Rational(4);
    const ExtRational R(E + margin);
    Point x;
    for (const auto& u : unknowns) x.emplace(u, exactify(start.at(u), ExtRational::infinity()));

    auto at_precision = [&](const Point& p) {
      Point q;
      for (const auto& [v, s] : p) q.emplace(v, s.with_cutoff(R));
      return q;
    };
    auto newton_step = [&](const Point& p, std::vector<NovikovScalar>& residual) {
      const Point q = at_precision(p);
      residual.clear();
      std::vector<NovikovScalar> rhs;
      for (const auto& eq : equations) {
        residual.push_back(evaluate(eq, q));
        rhs.push_back(-residual.back());
      }
      std::vector<std::vector<NovikovScalar>> J(n, std::vector<NovikovScalar>(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) J[i][j] = evaluate(jac[i][j], q);
      return solve_linear(std::move(J), std::move(rhs));
    };

    ExtRational last_gain = ExtRational(Rational(-1000000));
    int stalls = 0;
    std::vector<NovikovScalar> residual;
    for (int iter = 0; iter < 64; ++iter) {
      ++total_iterations;
      std::vector<NovikovScalar> delta = newton_step(x, residual);
      ExtRational gain = ExtRational::infinity();
      bool all_zero = true;
      for (std::size_t j = 0; j < n; ++j) {
        gain = min(gain, val_bound(delta[j]));
        NovikovScalar next = x.at(unknowns[j]) + delta[j];
        x[unknowns[j]] = exactify(next, next.cutoff());
        all_zero = all_zero && delta[j].is_zero();
      }
      if (all_zero || gain >= R) break;
      if (gain <= last_gain) {
        if (++stalls >= 3)
          throw Error(ErrorKind::SingularJacobian, "Newton iteration stopped converging (degenerate root?)");
      } else {
        stalls = 0;
      }
      last_gain = gain;
    }

    // Certification: the correction at the truncated point bounds the error.
    for (Rational P = E; P <= E + margin; P += Rational(1, 2)) {
      Point xp;
      bool erased = false;
      for (const auto& u : unknowns) {
        xp.emplace(u, exactify(x.at(u), ExtRational(P)));
        erased = erased || (xp.at(u).is_zero() && !x.at(u).is_zero());
      }
      // A root deeper than P truncates to zero, which negative powers cannot see past.
      if (erased) continue;
      std::vector<NovikovScalar> delta = newton_step(xp, residual);
      ExtRational err = ExtRational::infinity();
      ExtRational res = ExtRational::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        err = min(err, val_bound(delta[j]));
        res = min(res, val_bound(residual[j]));
      }
      // An exact root makes the untruncated residual vanish identically.
      bool exact = true;
      try {
        for (const auto& eq : equations) {
          NovikovScalar r = evaluate(eq, xp);
          exact = exact && r.is_zero() && r.cutoff().is_infinite();
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InfiniteCutoff) throw;
        exact = false;
      }
      if (exact) res = ExtRational::infinity();
      HenselResult r;
      r.iterations = total_iterations;
      r.residual_valuation = res;
      r.lifted_to = exact ? ExtRational::infinity() : min(err, ExtRational(P));
      for (const auto& u : unknowns)
        r.solution.emplace(u, exact ? xp.at(u) : xp.at(u).with_cutoff(r.lifted_to));
      if (exact || (err >= target && res >= target)) return r;
      if (!have_best || r.lifted_to > best.lifted_to) {
        best = r;
        have_best = true;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Critical loci

std::string CriticalComponent::str() const {
  std::string out;
  for (const auto& v : zero_vars) out += (out.empty() ? "" : ", ") + v + "=0";
  if (out.empty()) out = "whole domain";
  if (!free_vars.empty()) {
    std::string free;
    for (const auto& v : free_vars) free += (free.empty() ? "" : ",") + v;
    out += " (free: " + free + ")";
  }
  return out;
}

bool domain_admits(const Domain& d, const std::map<VarName, ExtRational>& known) {
  for (const auto& clause : d.clauses) {
    Conjunction rest;
    bool ok = true;
    for (const auto& k : clause) {
      bool all_known = true;
      bool has_inf = false;
      for (const auto& [v, n] : k.form) {
        if (n.is_zero()) continue;
        auto it = known.find(v);
        if (it == known.end()) all_known = false;
        else if (it->second.is_infinite()) has_inf = true;
      }
      if (all_known || has_inf) {
        // Unknown variables are finite, so an infinite known part decides.
        std::map<VarName, ExtRational> vals = known;
        for (const auto& [v, n] : k.form)
          if (!vals.count(v)) vals.emplace(v, Rational(0));
        if (!k.holds(vals)) {
          ok = false;
          break;
        }
        continue;
      }
      ValuationConstraint reduced = k;
      reduced.form.clear();
      for (const auto& [v, n] : k.form) {
        auto it = known.find(v);
        if (it == known.end()) reduced.form[v] = n;
        else reduced.constant += n * it->second.value();
      }
      rest.push_back(std::move(reduced));
    }
    if (ok && feasible(rest).feasible) return true;
  }
  return false;
}

namespace {

struct UnivariateRoots {
  std::vector<std::pair<NovikovScalar, HenselResult>> points;
  std::vector<LeadingRoot> degenerate;
  std::vector<SymbolicRoot> unresolved;
};

UnivariateRoots univariate_critical(const MultiSeries& w, const VarName& t, const ExtRational& target) {
  UnivariateRoots out;
  const MultiSeries f = partial_derivative(w, t);
  if (f.is_zero()) return out;
  NewtonResult nr;
  try {
    nr = newton_leading(f, t);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoRoots) return out;
    throw;
  }
  out.unresolved = nr.unresolved;
  if (nr.zero_root) {
    HenselResult h;
    h.solution.emplace(t, NovikovScalar());
    h.lifted_to = ExtRational::infinity();
    h.residual_valuation = ExtRational::infinity();
    out.points.emplace_back(NovikovScalar(), h);
  }
  for (const auto& root : nr.roots) {
    if (root.multiplicity > 1) {
      out.degenerate.push_back(root);
      continue;
    }
    Point start{{t, NovikovScalar::monomial(root.coefficient, root.exponent)}};
    HenselResult h = hensel_lift({f}, {t}, start, target);
    out.points.emplace_back(h.solution.at(t), h);
  }
  return out;
}

void add_point(CriticalLocus& locus, const Chart& chart, const MultiSeries& w, CriticalPoint p) {
  Point full = p.coordinates;
  p.value = evaluate(w, full);
  if (domain_admits(chart.domain, valuations(p.coordinates))) locus.points.push_back(std::move(p));
  else locus.excluded.push_back(std::move(p));
}

// Minimal sets S of positive-exponent variables whose vanishing kills every
// partial derivative of the monomial.
std::vector<VarSet> monomial_zero_sets(const Monomial& m) {
  std::vector<VarName> positive;
  for (const auto& [v, e] : m.exponents())
    if (e > 0) positive.push_back(v);
  auto kills = [&](const std::set<VarName>& s) {
    for (const auto& [v, e] : m.exponents()) {
      bool hit = false;
      for (const auto& w : s)
        if (w != v || e >= 2) hit = true;
      if (!hit) return false;
    }
    return true;
  };
  std::vector<VarSet> minimal;
  const std::size_t n = positive.size();
  std::vector<std::set<VarName>> found;
  for (std::size_t size = 1; size <= n; ++size) {
    std::vector<bool> pick(n, false);
    std::fill(pick.end() - static_cast<std::ptrdiff_t>(size), pick.end(), true);
    do {
      std::set<VarName> s;
      for (std::size_t i = 0; i < n; ++i)
        if (pick[i]) s.insert(positive[i]);
      bool superset = std::any_of(found.begin(), found.end(), [&](const std::set<VarName>& f) {
        return std::includes(s.begin(), s.end(), f.begin(), f.end());
      });
      if (!superset && kills(s)) found.push_back(s);
    } while (std::next_permutation(pick.begin(), pick.end()));
  }
  for (const auto& s : found) minimal.emplace_back(s.begin(), s.end());
  std::sort(minimal.begin(), minimal.end());
  return minimal;
}

}  // namespace

CriticalLocus critical_locus(const Chart& chart, const CritConfig& config) {
  const MultiSeries& w = chart.potential;
  CriticalLocus locus;
  locus.target = config.target_energy ? *config.target_energy
                                      : (w.energy_cutoff().is_finite() ? w.energy_cutoff() : ExtRational(5));
  const VarSet used = w.used_vars();
  for (const auto& v : chart.vars)
    if (!std::binary_search(used.begin(), used.end(), v)) locus.free_vars.push_back(v);

  if (used.empty()) {
    CriticalComponent c{{}, chart.vars};
    if (domain_admits(chart.domain, {})) locus.components.push_back(c);
    else locus.excluded_components.push_back(c);
    return locus;
  }

  if (used.size() == 1) {
    UnivariateRoots roots = univariate_critical(w, used.front(), locus.target);
    locus.degenerate = roots.degenerate;
    locus.unresolved = roots.unresolved;
    for (auto& [value, h] : roots.points)
      add_point(locus, chart, w, CriticalPoint{h.solution, {}, h.lifted_to, h.residual_valuation, h.iterations});
    return locus;
  }

  if (w.is_monomial()) {
    const Monomial& m = w.terms().begin()->first;
    for (const auto& zero : monomial_zero_sets(m)) {
      CriticalComponent c;
      c.zero_vars = zero;
      for (const auto& v : chart.vars)
        if (!std::binary_search(zero.begin(), zero.end(), v)) c.free_vars.push_back(v);
      std::map<VarName, ExtRational> known;
      for (const auto& v : zero) known.emplace(v, ExtRational::infinity());
      if (domain_admits(chart.domain, known)) locus.components.push_back(c);
      else locus.excluded_components.push_back(c);
    }
    return locus;
  }

  const bool separable = std::all_of(w.terms().begin(), w.terms().end(),
                                     [](const auto& kv) { return kv.first.exponents().size() <= 1; });
  if (separable && config.seeds.empty()) {
    std::vector<std::pair<VarName, UnivariateRoots>> parts;
    for (const auto& v : used) {
      std::map<Monomial, NovikovScalar> terms;
      for (const auto& [m, c] : w.terms())
        if (m.exponent(v) != 0) terms.emplace(m, c);
      MultiSeries part(w.vars(), std::move(terms), w.energy_cutoff(), w.degree_cutoff());
      UnivariateRoots r = univariate_critical(part, v, locus.target);
      locus.degenerate.insert(locus.degenerate.end(), r.degenerate.begin(), r.degenerate.end());
      locus.unresolved.insert(locus.unresolved.end(), r.unresolved.begin(), r.unresolved.end());
      parts.emplace_back(v, std::move(r));
    }
    // Cartesian product of the per-variable critical points.
    std::function<void(std::size_t, CriticalPoint)> expand = [&](std::size_t i, CriticalPoint acc) {
      if (i == parts.size()) {
        add_point(locus, chart, w, std::move(acc));
        return;
      }
      for (const auto& [value, h] : parts[i].second.points) {
        CriticalPoint next = acc;
        next.coordinates[parts[i].first] = value;
        next.lifted_to = min(next.lifted_to, h.lifted_to);
        next.residual_valuation = min(next.residual_valuation, h.residual_valuation);
        next.iterations += h.iterations;
        expand(i + 1, std::move(next));
      }
    };
    CriticalPoint seed;
    seed.lifted_to = seed.residual_valuation = ExtRational::infinity();
    expand(0, seed);
    return locus;
  }

  if (!config.seeds.empty()) {
    std::vector<MultiSeries> grad;
    std::vector<VarName> unknowns(used.begin(), used.end());
    for (const auto& v : unknowns) grad.push_back(partial_derivative(w, v));
    for (const auto& s : config.seeds) {
      Point start;
      for (const auto& v : unknowns) {
        auto it = s.find(v);
        if (it == s.end()) throw Error(ErrorKind::InvalidArgument, "seed lacks a value for '" + v + "'");
        start.emplace(v, it->second);
      }
      try {
        HenselResult h = hensel_lift(grad, unknowns, start, locus.target);
        add_point(locus, chart, w, CriticalPoint{h.solution, {}, h.lifted_to, h.residual_valuation, h.iterations});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularJacobian) throw;
        // Degenerate seeds are skipped; their leading data is not univariate.
      }
    }
    return locus;
  }

  throw Error(ErrorKind::UnsupportedPotential,
              "potential " + w.str() + " of chart " + chart.name +
                  " is neither univariate, a monomial, nor a sum of univariate parts; supply seed points");
}

}  // namespace novikit
