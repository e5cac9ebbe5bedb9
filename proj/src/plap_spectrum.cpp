#include "cheeger/plap_spectrum.h"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>

#include "cheeger/cheeger_solver.h"
#include "cheeger/parallel.h"

namespace cheeger {

double plap_scale(const Stencil& stencil, double p) {
  if (stencil.kind() == StencilKind::four) return 1.0;
  // Mean of |cos t|^p over the circle.
  const double mean_cos = std::tgamma((p + 1.0) / 2.0) /
                          (std::sqrt(std::numbers::pi) * std::tgamma(p / 2.0 + 1.0));
  double moment = 0.0;
  for (const auto& e : stencil.entries()) moment += e.weight * std::pow(std::hypot(e.dx, e.dy), p);
  return 1.0 / (0.5 * moment * mean_cos);
}

namespace {

// The quotient restricted to the cells of E, in local numbering.
struct Problem {
  double p = 2.0;
  double mass = 1.0;  // cell area
  std::vector<int> global;
  std::vector<int> a;
  std::vector<int> b;
  std::vector<double> w;
  std::vector<double> boundary;

  [[nodiscard]] std::size_t n() const { return global.size(); }

  double power(double t) const { return p == 2.0 ? t * t : std::pow(t, p); }

  double value(const std::vector<double>& x) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e)
      num += w[e] * power(std::abs(x[static_cast<std::size_t>(a[e])] - x[static_cast<std::size_t>(b[e])]));
    for (std::size_t i = 0; i < n(); ++i) {
      const double t = power(std::abs(x[i]));
      num += boundary[i] * t;
      den += t;
    }
    return num / (mass * den);
  }

  // Quotient and its gradient.
  double gradient(const std::vector<double>& x, std::vector<double>& g) const {
    std::vector<double> gn(n(), 0.0);
    std::vector<double> gd(n(), 0.0);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e) {
      const auto i = static_cast<std::size_t>(a[e]);
      const auto j = static_cast<std::size_t>(b[e]);
      const double d = x[i] - x[j];
      const double t = std::abs(d);
      const double tp1 = p == 2.0 ? t : std::pow(t, p - 1.0);
      num += w[e] * tp1 * t;
      const double f = p * w[e] * std::copysign(tp1, d);
      gn[i] += f;
      gn[j] -= f;
    }
    for (std::size_t i = 0; i < n(); ++i) {
      const double t = std::abs(x[i]);
      const double tp1 = p == 2.0 ? t : std::pow(t, p - 1.0);
      const double s = std::copysign(p * tp1, x[i]);
      num += boundary[i] * tp1 * t;
      gn[i] += boundary[i] * s;
      den += tp1 * t;
      gd[i] = s;
    }
    den *= mass;
    const double r = num / den;
    g.resize(n());
    for (std::size_t i = 0; i < n(); ++i) g[i] = (gn[i] - r * mass * gd[i]) / den;
    return r;
  }

  void normalize(std::vector<double>& x) const {
    double den = 0.0;
    for (double v : x) den += power(std::abs(v));
    const double s = std::pow(den * mass, -1.0 / p);
    for (double& v : x) v *= s;
  }
};

Problem build_problem(const GridDomain& domain, const CellSet& E, double p) {
  Problem pr;
  pr.p = p;
  pr.mass = domain.cell_area();
  pr.global = E.cells;
  std::vector<int> local(static_cast<std::size_t>(domain.size()), -1);
  for (std::size_t i = 0; i < pr.global.size(); ++i)
    local[static_cast<std::size_t>(pr.global[i])] = static_cast<int>(i);
  const double scale = plap_scale(domain.stencil(), p) * std::pow(domain.cell(), 2.0 - p);
  pr.boundary.assign(pr.n(), 0.0);
  for (std::size_t i = 0; i < pr.n(); ++i) {
    for (const auto& e : domain.stencil().entries()) {
      const int j = domain.neighbor(pr.global[i], e.dx, e.dy);
      const int lj = j < 0 ? -1 : local[static_cast<std::size_t>(j)];
      if (lj < 0) {
        pr.boundary[i] += scale * e.weight;
      } else if (lj > static_cast<int>(i)) {
        pr.a.push_back(static_cast<int>(i));
        pr.b.push_back(lj);
        pr.w.push_back(scale * e.weight);
      }
    }
  }
  return pr;
}

Eigen::SparseMatrix<double> weighted_laplacian(const Problem& pr, const std::vector<double>& edge,
                                               const std::vector<double>& diag) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(pr.a.size() * 4 + pr.n());
  for (std::size_t e = 0; e < pr.a.size(); ++e) {
    trip.emplace_back(pr.a[e], pr.a[e], edge[e]);
    trip.emplace_back(pr.b[e], pr.b[e], edge[e]);
    trip.emplace_back(pr.a[e], pr.b[e], -edge[e]);
    trip.emplace_back(pr.b[e], pr.a[e], -edge[e]);
  }
  for (std::size_t i = 0; i < pr.n(); ++i)
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), diag[i]);
  const auto n = static_cast<Eigen::Index>(pr.n());
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

// p = 2 ground state by inverse iteration on the sparse Dirichlet matrix.
std::vector<double> ground_state(const GridDomain& domain, const CellSet& E, int& iterations) {
  const Problem pr = build_problem(domain, E, 2.0);
  const Eigen::SparseMatrix<double> A = weighted_laplacian(pr, pr.w, pr.boundary);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("plap_spectrum: factorization of the Dirichlet matrix failed");

  Eigen::VectorXd x = Eigen::VectorXd::Ones(A.rows());
  x.normalize();
  double lambda = x.dot(A * x);
  iterations = 0;
  for (int it = 0; it < 1000; ++it) {
    ++iterations;
    Eigen::VectorXd y = ldlt.solve(x);
    y.normalize();
    const double next = y.dot(A * y);
    x = std::move(y);
    const bool done = std::abs(lambda - next) <= 1e-14 * next;
    lambda = next;
    if (done) break;
  }
  std::vector<double> out(pr.n());
  for (std::size_t i = 0; i < pr.n(); ++i) out[i] = std::abs(x[static_cast<Eigen::Index>(i)]);
  return out;
}

// Inverse of the p-energy Hessian at the current iterate, with
// |t|^(p-2) regularized near t = 0.
class Preconditioner {
 public:
  explicit Preconditioner(const Problem& pr) : pr_(pr) {}

  void rebuild(const std::vector<double>& x) {
    double top = 0.0;
    for (double v : x) top = std::max(top, v);
    const double eps2 = std::pow(1e-3 * top, 2.0);
    const double c = pr_.p * (pr_.p - 1.0);
    auto curvature = [&](double t) { return c * std::pow(t * t + eps2, (pr_.p - 2.0) / 2.0); };
    std::vector<double> edge(pr_.a.size());
    for (std::size_t e = 0; e < edge.size(); ++e)
      edge[e] = pr_.w[e] * curvature(x[static_cast<std::size_t>(pr_.a[e])] - x[static_cast<std::size_t>(pr_.b[e])]);
    std::vector<double> diag(pr_.n());
    for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = pr_.boundary[i] * curvature(x[i]);
    const Eigen::SparseMatrix<double> H = weighted_laplacian(pr_, edge, diag);
    if (!analyzed_) {
      ldlt_.analyzePattern(H);
      analyzed_ = true;
    }
    ldlt_.factorize(H);
    ok_ = ldlt_.info() == Eigen::Success;
  }

  // out = H^-1 in (identity when the factorization failed).
  void apply(const std::vector<double>& in, std::vector<double>& out) const {
    out = in;
    if (!ok_) return;
    const Eigen::Map<const Eigen::VectorXd> v(in.data(), static_cast<Eigen::Index>(in.size()));
    const Eigen::VectorXd r = ldlt_.solve(v);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = r[static_cast<Eigen::Index>(i)];
  }

 private:
  const Problem& pr_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
  bool ok_ = false;
};

// Preconditioned L-BFGS on the quotient with Armijo backtracking. Iterates
// are kept nonnegative, which never raises the quotient, so the value
// decreases monotonically.
double descend(const Problem& pr, std::vector<double>& x, const PLapConfig& config, int& iterations,
               double& residual) {
  constexpr int kMemory = 8;
  constexpr int kPatience = 10;
  constexpr int kRefresh = 50;
  const std::size_t n = pr.n();
  auto dot = [n](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
    return s;
  };
  std::deque<std::vector<double>> S;
  std::deque<std::vector<double>> Y;
  std::deque<double> rho;
  std::vector<double> g;
  std::vector<double> d(n);
  std::vector<double> q(n);
  std::vector<double> trial(n);
  std::vector<double> g_new;
  Preconditioner pre(pr);
  pr.normalize(x);
  double f = pr.gradient(x, g);
  pre.rebuild(x);
  int quiet = 0;
  int since_refresh = 0;
  residual = 0.0;
  iterations = 0;

  while (iterations < config.max_iters) {
    // Two-loop recursion with the Hessian model as the initial matrix.
    q = g;
    std::vector<double> alpha(S.size());
    for (std::size_t m = S.size(); m-- > 0;) {
      alpha[m] = rho[m] * dot(S[m], q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[m] * Y[m][i];
    }
    pre.apply(q, d);
    for (std::size_t m = 0; m < S.size(); ++m) {
      const double beta = rho[m] * dot(Y[m], d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[m] - beta) * S[m][i];
    }
    for (double& v : d) v = -v;
    const double slope = dot(g, d);
    if (!(slope < 0.0)) {
      if (S.empty()) break;
      S.clear();
      Y.clear();
      rho.clear();
      continue;
    }

    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(0.0, x[i] + step * d[i]);
      f_new = pr.gradient(trial, g_new);
      if (!std::isfinite(f_new)) throw std::runtime_error("plap_spectrum: non-finite quotient");
      if (f_new <= f + 1e-4 * step * slope && f_new < f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (S.empty()) break;
      S.clear();
      Y.clear();
      rho.clear();
      pre.rebuild(x);
      since_refresh = 0;
      continue;
    }
    ++iterations;
    std::vector<double> s(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-300) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > kMemory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    residual = (f - f_new) / f;
    x.swap(trial);
    g.swap(g_new);
    f = f_new;
    quiet = residual < config.grad_tol ? quiet + 1 : 0;
    if (quiet >= kPatience) break;
    if (++since_refresh >= kRefresh) {
      pre.rebuild(x);
      since_refresh = 0;
    }
  }
  return f;
}

void check_config(const PLapConfig& config) {
  if (!(config.p >= config.p_floor) || !std::isfinite(config.p))
    throw std::invalid_argument("plap_spectrum: p must be at least " + std::to_string(config.p_floor));
  if (config.max_iters < 0 || !(config.grad_tol > 0.0))
    throw std::invalid_argument("plap_spectrum: iteration limits must be positive");
}

}  // namespace

EigenResult lambda1(const PLapConfig& config, const GridDomain& domain, const CellSet& E,
                    std::span<const double> initial) {
  check_config(config);
  if (E.empty()) throw std::invalid_argument("plap_spectrum: empty support");
  const Problem pr = build_problem(domain, E, config.p);

  std::vector<double> x(pr.n(), 0.0);
  bool warm = false;
  if (initial.size() == static_cast<std::size_t>(domain.size())) {
    for (std::size_t i = 0; i < pr.n(); ++i) {
      x[i] = std::abs(initial[static_cast<std::size_t>(pr.global[i])]);
      warm = warm || x[i] > 0.0;
    }
  }
  EigenResult out;
  int inverse_steps = 0;
  if (!warm || config.p == 2.0) x = ground_state(domain, E, inverse_steps);
  if (config.p == 2.0) {
    pr.normalize(x);
    out.lambda = pr.value(x);
    out.iterations = inverse_steps;
  } else {
    out.lambda = descend(pr, x, config, out.iterations, out.residual);
    pr.normalize(x);
  }
  if (!std::isfinite(out.lambda)) throw std::runtime_error("plap_spectrum: non-finite eigenvalue");
  out.u.assign(static_cast<std::size_t>(domain.size()), 0.0);
  for (std::size_t i = 0; i < pr.n(); ++i) out.u[static_cast<std::size_t>(pr.global[i])] = x[i];
  return out;
}

std::vector<InequalityRow> cheeger_inequality_check(const PLapConfig& config,
                                                    const GridDomain& domain, const CellSet& E,
                                                    const std::vector<double>& ps) {
  if (E.empty()) throw std::invalid_argument("plap_spectrum: empty support");
  const double h1 = cheeger(domain, to_membership(domain, E.cells)).h;
  std::vector<InequalityRow> rows;
  std::vector<double> warm;
  for (double p : ps) {
    PLapConfig c = config;
    c.p = p;
    EigenResult r = lambda1(c, domain, E, warm);
    InequalityRow row;
    row.p = p;
    row.lambda = r.lambda;
    row.h1 = h1;
    row.bound = std::pow(h1 / p, p);
    row.slack = (row.lambda - row.bound) / row.bound;
    row.holds = row.slack >= -0.05;
    rows.push_back(row);
    warm = std::move(r.u);
  }
  return rows;
}

namespace {

struct Attempt {
  std::vector<CellSet> parts;
  std::vector<EigenResult> eig;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

std::vector<CellSet> parts_of(const GridDomain& domain, const std::vector<int>& owner, int k) {
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(k));
  for (int c : domain.cells()) cells[static_cast<std::size_t>(owner[static_cast<std::size_t>(c)])].push_back(c);
  std::vector<CellSet> parts;
  for (auto& v : cells) parts.push_back(measure(domain, std::move(v)));
  return parts;
}

// One alternating run from a given partition. Returns nothing when a part
// empties out.
std::optional<Attempt> alternate(const PLapConfig& config, const GridDomain& domain,
                                 std::vector<CellSet> parts, std::vector<std::vector<double>> warm) {
  constexpr int kMaxRounds = 100;
  constexpr int kStall = 3;
  const int k = static_cast<int>(parts.size());
  const auto cells = domain.cells();
  std::vector<int> owner(static_cast<std::size_t>(domain.size()), -1);
  for (int i = 0; i < k; ++i)
    for (int c : parts[static_cast<std::size_t>(i)].cells) owner[static_cast<std::size_t>(c)] = i;

  Attempt best;
  int stall = 0;
  for (int round = 0; round < kMaxRounds; ++round) {
    for (const auto& part : parts)
      if (part.empty()) return std::nullopt;
    std::vector<EigenResult> eig(static_cast<std::size_t>(k));
    parallel_for(static_cast<std::size_t>(k), [&](std::size_t i) {
      std::span<const double> start;
      if (i < warm.size()) start = warm[i];
      eig[i] = lambda1(config, domain, parts[i], start);
    });
    double value = 0.0;
    for (const auto& e : eig) value = std::max(value, e.lambda);
    if (value < best.value * (1.0 - config.grad_tol)) {
      best.parts = parts;
      best.eig = eig;
      best.value = value;
      best.iterations = round + 1;
      stall = 0;
    } else if (++stall >= kStall) {
      break;
    }

    std::vector<int> next(owner.size(), -1);
    bool changed = false;
    for (int c : cells) {
      int arg = 0;
      for (int i = 1; i < k; ++i)
        if (eig[static_cast<std::size_t>(i)].u[static_cast<std::size_t>(c)] >
            eig[static_cast<std::size_t>(arg)].u[static_cast<std::size_t>(c)])
          arg = i;
      next[static_cast<std::size_t>(c)] = arg;
      changed = changed || arg != owner[static_cast<std::size_t>(c)];
    }
    if (!changed) break;
    owner = std::move(next);
    parts = parts_of(domain, owner, k);
    warm.clear();
    for (auto& e : eig) warm.push_back(std::move(e.u));
  }
  return best;
}

}  // namespace

SpectralPartition spectral_partition(const PLapConfig& config, const GridDomain& domain, int k,
                                     int restarts, std::uint64_t seed,
                                     const std::vector<CellSet>& initial,
                                     const std::vector<std::vector<double>>& warm) {
  check_config(config);
  if (k < 1 || k > domain.cell_count())
    throw std::invalid_argument("plap_spectrum: k must lie in [1, number of cells]");
  if (restarts < 1) throw std::invalid_argument("plap_spectrum: need at least one restart");
  if (!initial.empty() && static_cast<int>(initial.size()) != k)
    throw std::invalid_argument("plap_spectrum: initial partition has the wrong number of parts");
  constexpr int kAttempts = 5;
  const auto cells = domain.cells();

  std::vector<std::optional<Attempt>> runs(static_cast<std::size_t>(restarts));
  std::vector<std::vector<std::string>> logs(static_cast<std::size_t>(restarts));
  parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t r) {
    for (int attempt = 0; attempt < kAttempts && !runs[r]; ++attempt) {
      std::vector<CellSet> parts;
      std::vector<std::vector<double>> start;
      if (r == 0 && attempt == 0 && !initial.empty()) {
        parts = initial;
        start = warm;
      } else if (k == 1) {
        parts = {measure(domain, cells)};
      } else {
        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + r + 1000ULL * static_cast<std::uint64_t>(attempt));
        for (const Membership& region : voronoi_regions(domain, cells, k, rng))
          parts.push_back(measure(domain, region));
      }
      runs[r] = alternate(config, domain, std::move(parts), std::move(start));
      if (!runs[r])
        logs[r].push_back("restart " + std::to_string(r) + " attempt " + std::to_string(attempt) +
                          ": a part emptied; reseeding");
    }
  });

  SpectralPartition out;
  out.value = std::numeric_limits<double>::infinity();
  std::size_t chosen = runs.size();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (auto& line : logs[r]) out.log.push_back(std::move(line));
    out.restart_values.push_back(runs[r] ? runs[r]->value : std::numeric_limits<double>::quiet_NaN());
    if (runs[r] && runs[r]->value < out.value) {
      out.value = runs[r]->value;
      chosen = r;
    }
  }
  if (chosen == runs.size()) throw std::runtime_error("plap_spectrum: every restart lost a part");
  Attempt& best = *runs[chosen];
  out.parts = std::move(best.parts);
  out.iterations = best.iterations;
  for (auto& e : best.eig) {
    out.lambdas.push_back(e.lambda);
    out.eigenfunctions.push_back(std::move(e.u));
  }
  return out;
}

double extrapolate_to_zero(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("plap_spectrum: extrapolation needs matching nonempty samples");
  std::vector<double> t = ys;
  const std::size_t n = xs.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      t[i] = (xs[i + m] * t[i] - xs[i] * t[i + 1]) / (xs[i + m] - xs[i]);
  return t[0];
}

LimitScan limit_scan(const PLapConfig& config, const GridDomain& domain, int k,
                     const std::vector<double>& ps, int restarts, std::uint64_t seed) {
  if (ps.empty()) throw std::invalid_argument("plap_spectrum: empty p sequence");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(ps[i] > 1.0 && ps[i] <= 3.0)) throw std::invalid_argument("plap_spectrum: p values must lie in (1, 3]");
    if (i > 0 && !(ps[i] < ps[i - 1]))
      throw std::invalid_argument("plap_spectrum: p values must decrease strictly");
  }
  LimitScan scan;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    PLapConfig c = config;
    c.p = ps[i];
    scan.last = i == 0 ? spectral_partition(c, domain, k, restarts, seed)
                       : spectral_partition(c, domain, k, 1, seed, scan.last.parts, scan.last.eigenfunctions);
    scan.rows.push_back({ps[i], scan.last.value, scan.last.lambdas});
  }
  const std::size_t first = ps.size() > 3 ? ps.size() - 3 : 0;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = first; i < ps.size(); ++i) {
    xs.push_back(ps[i] - 1.0);
    ys.push_back(scan.rows[i].value);
  }
  scan.extrapolated = extrapolate_to_zero(xs, ys);
  scan.monotone = true;
  for (std::size_t i = 1; i < scan.rows.size(); ++i)
    scan.monotone = scan.monotone && scan.rows[i].value < scan.rows[i - 1].value;
  return scan;
}

}  // namespace cheeger
