#include "pulsejet/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "pulsejet/trace_io.hpp"

namespace pulsejet::opt {

Eigen::VectorXd DesignVector::values() const {
  Eigen::VectorXd v(size());
  for (Eigen::Index i = 0; i < size(); ++i) v[i] = entries[static_cast<std::size_t>(i)].value;
  return v;
}

Eigen::VectorXd DesignVector::lower() const {
  Eigen::VectorXd v(size());
  for (Eigen::Index i = 0; i < size(); ++i) v[i] = entries[static_cast<std::size_t>(i)].lo;
  return v;
}

Eigen::VectorXd DesignVector::upper() const {
  Eigen::VectorXd v(size());
  for (Eigen::Index i = 0; i < size(); ++i) v[i] = entries[static_cast<std::size_t>(i)].hi;
  return v;
}

DesignVector DesignVector::with_values(const Eigen::VectorXd& x) const {
  DesignVector d = *this;
  for (std::size_t i = 0; i < d.entries.size(); ++i) {
    auto& e = d.entries[i];
    e.value = std::clamp(x[static_cast<Eigen::Index>(i)], e.lo, e.hi);
  }
  return d;
}

bool DesignVector::in_bounds() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Parameter& p) { return p.lo <= p.value && p.value <= p.hi; });
}

Method parse_method(const std::string& name) {
  if (name == "nelder-mead" || name == "NELDER_MEAD") return Method::NelderMead;
  if (name == "grid" || name == "GRID") return Method::Grid;
  if (name == "random" || name == "RANDOM") return Method::Random;
  throw std::invalid_argument("unknown optimization method '" + name + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double effective(const Evaluation& e) { return e.feasible ? e.score : kInf; }

struct BudgetExhausted {};

// Evaluation bookkeeping shared by all methods: bound projection, budget,
// append-only log, best feasible design.
class Recorder {
 public:
  Recorder(const DesignVector& layout, const ObjectiveFn& fn, std::size_t budget)
      : layout_(layout), fn_(fn), budget_(budget) {}

  double operator()(const Eigen::VectorXd& x) {
    if (log_.size() >= budget_) throw BudgetExhausted{};
    auto design = layout_.with_values(x);
    auto ev = fn_(design);
    record(design, std::move(ev));
    return effective(last_);
  }

  void record(const DesignVector& design, Evaluation ev) {
    LogEntry entry;
    entry.index = log_.size();
    entry.values = design.values();
    entry.score = ev.score;
    entry.feasible = ev.feasible;
    const bool better = !have_best_ || (ev.feasible && !best_eval_.feasible) ||
                        (ev.feasible == best_eval_.feasible && ev.score < best_eval_.score);
    if (better) {
      have_best_ = true;
      best_ = design;
      best_eval_ = ev;
    }
    best_feasible_ = std::min(best_feasible_, effective(ev));
    entry.best_so_far = best_feasible_;
    log_.push_back(std::move(entry));
    last_ = std::move(ev);
  }

  std::size_t used() const { return log_.size(); }
  std::size_t budget() const { return budget_; }

  OptimizeResult result(bool restarted) const {
    OptimizeResult r;
    r.best = have_best_ ? best_ : layout_;
    r.best_evaluation = best_eval_;
    r.log = log_;
    r.restarted = restarted;
    return r;
  }

 private:
  const DesignVector& layout_;
  const ObjectiveFn& fn_;
  std::size_t budget_;
  std::vector<LogEntry> log_;
  Evaluation last_;
  bool have_best_ = false;
  DesignVector best_;
  Evaluation best_eval_;
  double best_feasible_ = kInf;
};

// Nelder-Mead on range-normalized coordinates u in [0, 1]^d with
// reflection 1, expansion 2, contraction 1/2, shrink 1/2.
OptimizeResult nelder_mead(const DesignVector& initial, const ObjectiveFn& fn, const OptimizeOptions& o) {
  const Eigen::Index d = initial.size();
  if (o.budget < static_cast<std::size_t>(d) + 1) {
    throw std::invalid_argument("Nelder-Mead needs a budget of at least dimension + 1");
  }
  const Eigen::VectorXd lo = initial.lower();
  const Eigen::VectorXd span = (initial.upper() - lo).cwiseMax(std::numeric_limits<double>::min());
  Recorder rec(initial, fn, o.budget);
  auto to_x = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd { return lo + span.cwiseProduct(u); };
  auto eval = [&](Eigen::VectorXd& u) {
    u = u.cwiseMax(0.0).cwiseMin(1.0);
    return rec(to_x(u));
  };

  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(d) + 1);
  std::vector<double> f(pts.size());
  auto build_simplex = [&](const Eigen::VectorXd& base) {
    pts[0] = base;
    f[0] = eval(pts[0]);
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::VectorXd u = base;
      u[i] += (u[i] + o.initial_step <= 1.0) ? o.initial_step : -o.initial_step;
      pts[static_cast<std::size_t>(i) + 1] = u;
      f[static_cast<std::size_t>(i) + 1] = eval(pts[static_cast<std::size_t>(i) + 1]);
    }
  };

  bool restarted = false;
  try {
    Eigen::VectorXd u0 = (initial.values() - lo).cwiseQuotient(span);
    build_simplex(u0);
    std::vector<std::size_t> order(pts.size());
    while (true) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
      std::vector<Eigen::VectorXd> sp;
      std::vector<double> sf;
      for (auto k : order) {
        sp.push_back(pts[k]);
        sf.push_back(f[k]);
      }
      pts = std::move(sp);
      f = std::move(sf);

      double xspread = 0.0;
      for (std::size_t i = 1; i < pts.size(); ++i) xspread = std::max(xspread, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
      const bool flat = std::isfinite(f.back()) && std::abs(f.back() - f[0]) <= o.f_tolerance * (1.0 + std::abs(f[0]));
      if (xspread <= o.x_tolerance || (flat && xspread <= 1e3 * o.x_tolerance)) {
        if (restarted) break;
        restarted = true;
        const Eigen::VectorXd best = pts[0];
        build_simplex(best);
        continue;
      }

      const std::size_t w = pts.size() - 1;
      Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
      for (std::size_t i = 0; i < w; ++i) c += pts[i];
      c /= static_cast<double>(w);

      Eigen::VectorXd xr = c + (c - pts[w]);
      const double fr = eval(xr);
      if (fr < f[0]) {
        Eigen::VectorXd xe = c + 2.0 * (c - pts[w]);
        const double fe = eval(xe);
        if (fe < fr) {
          pts[w] = xe;
          f[w] = fe;
        } else {
          pts[w] = xr;
          f[w] = fr;
        }
        continue;
      }
      if (fr < f[w - 1]) {
        pts[w] = xr;
        f[w] = fr;
        continue;
      }
      Eigen::VectorXd xc = fr < f[w] ? Eigen::VectorXd(c + 0.5 * (xr - c)) : Eigen::VectorXd(c + 0.5 * (pts[w] - c));
      const double fc = eval(xc);
      if (fc < std::min(fr, f[w])) {
        pts[w] = xc;
        f[w] = fc;
        continue;
      }
      for (std::size_t i = 1; i < pts.size(); ++i) {
        pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
        f[i] = eval(pts[i]);
      }
    }
  } catch (const BudgetExhausted&) {
  }
  return rec.result(restarted);
}

OptimizeResult evaluate_batch(const DesignVector& layout, const ObjectiveFn& fn,
                              const std::vector<Eigen::VectorXd>& points, int jobs) {
  std::vector<DesignVector> designs;
  designs.reserve(points.size());
  for (const auto& p : points) designs.push_back(layout.with_values(p));
  std::vector<Evaluation> results(designs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < designs.size(); i = next++) results[i] = fn(designs[i]);
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, jobs));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, designs.size()); ++t) pool.emplace_back(worker);
  }
  Recorder rec(layout, fn, designs.size());
  for (std::size_t i = 0; i < designs.size(); ++i) rec.record(designs[i], results[i]);
  return rec.result(false);
}

}  // namespace

std::vector<Eigen::VectorXd> grid_points(const DesignVector& layout, int points_per_axis) {
  const Eigen::Index d = layout.size();
  const Eigen::VectorXd lo = layout.lower(), hi = layout.upper();
  const auto n = static_cast<std::size_t>(std::max(1, points_per_axis));
  std::size_t total = 1;
  for (Eigen::Index i = 0; i < d; ++i) total *= n;
  std::vector<Eigen::VectorXd> out;
  out.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    Eigen::VectorXd x(d);
    std::size_t rem = k;
    for (Eigen::Index i = d - 1; i >= 0; --i) {
      const auto j = rem % n;
      rem /= n;
      x[i] = n == 1 ? 0.5 * (lo[i] + hi[i])
                    : lo[i] + (hi[i] - lo[i]) * static_cast<double>(j) / static_cast<double>(n - 1);
    }
    out.push_back(std::move(x));
  }
  return out;
}

OptimizeResult optimize(const DesignVector& initial, const ObjectiveFn& objective, const OptimizeOptions& options) {
  if (initial.entries.empty()) throw std::invalid_argument("design vector is empty");
  for (const auto& e : initial.entries) {
    if (!(e.lo <= e.hi)) throw std::invalid_argument("invalid bounds for " + e.path);
  }
  switch (options.method) {
    case Method::NelderMead: return nelder_mead(initial, objective, options);
    case Method::Grid: {
      int n = options.grid_points;
      if (n <= 0) {
        n = static_cast<int>(std::floor(std::pow(static_cast<double>(options.budget), 1.0 / initial.size()) + 1e-9));
      }
      auto pts = grid_points(initial, n);
      if (pts.size() > options.budget) pts.resize(options.budget);
      return evaluate_batch(initial, objective, pts, options.jobs);
    }
    case Method::Random: {
      std::mt19937_64 rng(options.seed);
      const Eigen::VectorXd lo = initial.lower(), hi = initial.upper();
      std::vector<Eigen::VectorXd> pts;
      for (std::size_t k = 0; k < options.budget; ++k) {
        Eigen::VectorXd x(initial.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
          x[i] = lo[i] + (hi[i] - lo[i]) * u;
        }
        pts.push_back(std::move(x));
      }
      return evaluate_batch(initial, objective, pts, options.jobs);
    }
  }
  throw std::logic_error("unreachable");
}

void write_log_csv(std::ostream& out, const DesignVector& layout, const std::vector<LogEntry>& log) {
  out << "eval_index";
  for (const auto& e : layout.entries) out << ',' << e.path;
  out << ",score,feasible\n";
  for (const auto& entry : log) {
    out << entry.index;
    for (Eigen::Index i = 0; i < entry.values.size(); ++i) out << ',' << io::sig9(entry.values[i]);
    out << ',' << io::sig9(entry.score) << ',' << (entry.feasible ? 1 : 0) << '\n';
  }
}

}  // namespace pulsejet::opt
