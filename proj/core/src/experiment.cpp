#include "dslab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dslab/constructions.hpp"
#include "dslab/covers.hpp"
#include "dslab/gridset.hpp"
#include "dslab/incidence.hpp"
#include "dslab/setarith.hpp"

namespace dslab {

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
  ExponentFit fit;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [delta, value] : points) {
    if (!(delta > 0)) throw std::invalid_argument("fit_exponent: delta must be positive");
    if (!(value > 0)) {
      fit.points_dropped++;
      continue;
    }
    logs.emplace_back(std::log2(delta), std::log2(value));
  }
  if (logs.size() < 2)
    throw std::invalid_argument("fit_exponent: need at least two positive points");
  {
    std::vector<double> xs;
    for (const auto& [x, y] : logs) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
      throw std::invalid_argument("fit_exponent: deltas must be distinct");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : logs) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(logs.size());
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  for (const auto& [x, y] : logs)
    fit.residual = std::max(fit.residual, std::fabs(y - (fit.slope * x + fit.intercept)));
  fit.points_used = static_cast<int>(logs.size());
  return fit;
}

void ExperimentConfig::validate() const {
  if (m_list.empty()) throw std::invalid_argument("ExperimentConfig: empty m_list");
  for (std::size_t i = 1; i < m_list.size(); ++i)
    if (m_list[i] <= m_list[i - 1])
      throw std::invalid_argument("ExperimentConfig: m_list must be ascending");
  tol.validate();

  const std::string& c = construction.name;
  auto one_of = [&](std::initializer_list<const char*> names) {
    for (const char* n : names)
      if (c == n) return true;
    return false;
  };
  bool ok = false;
  switch (experiment) {
    case Experiment::Ring:
      ok = one_of({"ap", "gp", "cantor", "random"});
      break;
    case Experiment::Distance:
      ok = one_of({"train_track"});
      break;
    case Experiment::Bilinear:
      ok = one_of({"ap", "cantor", "random"});
      break;
    case Experiment::Furstenberg:
      ok = one_of({"ap", "cantor", "random"});
      break;
    case Experiment::Cordoba:
      ok = one_of({"bush_tubes", "random_tubes", "ring_tubes"});
      break;
    case Experiment::Cover:
      ok = one_of({"ap", "gp", "cantor", "random", "train_track"});
      break;
  }
  if (!ok)
    throw std::invalid_argument("ExperimentConfig: construction '" + c +
                                "' incompatible with experiment " +
                                experiment_name(experiment));
}

double SweepRow::stat(const std::string& name) const {
  for (const auto& [k, v] : stats)
    if (k == name) return v;
  throw std::invalid_argument("SweepRow: no statistic '" + name + "'");
}

namespace {

void guard(double candidates, bool force, const char* what) {
  if (candidates > kCandidateGuard && !force)
    throw ResourceGuardError(std::string(what) + ": candidate count " +
                             std::to_string(candidates) + " exceeds 2^30");
}

std::int64_t occupied_columns(const DiscretizedSet& s) {
  std::vector<bool> seen(static_cast<std::size_t>(s.grid().nx), false);
  s.for_each_cell([&](std::int64_t x, std::int64_t) {
    seen[static_cast<std::size_t>(x)] = true;
  });
  std::int64_t n = 0;
  for (bool b : seen) n += b ? 1 : 0;
  return n;
}

DiscretizedSet build_1d(const ConstructionSpec& c, int m, const ToleranceProfile& tol) {
  if (c.name == "ap") return ap_set(m);
  if (c.name == "gp") return gp_set(m);
  if (c.name == "cantor") return cantor_1d(m, c.alpha);
  if (c.name == "random") return random_delta_alpha(m, c.alpha, c.seed, 1, tol);
  throw std::invalid_argument("unknown 1D construction: " + c.name);
}

SweepRow ring_row(const ExperimentConfig& cfg, int m) {
  const DiscretizedSet a = build_1d(cfg.construction, m, cfg.tol);
  guard(static_cast<double>(a.cell_count()) * a.cell_count(), cfg.force, "ring");
  const DiscretizedSet sum = pointwise_combine(a, a, BinaryOp::Add);
  const DiscretizedSet prod = pointwise_combine(a, a, BinaryOp::Mul);
  const double sqrt_delta = std::exp2(-0.5 * m);
  SweepRow row;
  row.stats = {{"measure_a", a.measure()},
               {"sum_measure", sum.measure()},
               {"prod_measure", prod.measure()},
               {"ring_stat", std::max(sum.measure(), prod.measure()) / sqrt_delta}};
  return row;
}

SweepRow distance_row(const ExperimentConfig& cfg, int m) {
  const DiscretizedSet s = train_track(m);
  const double cols = static_cast<double>(occupied_columns(s));
  guard(cols * cols * (2.0 * s.grid().ny), cfg.force, "distance");
  const DiscretizedSet dist = distance_set(s, s);
  SweepRow row;
  row.stats = {{"measure_s", s.measure()}, {"dist_measure", dist.measure()}};
  return row;
}

SweepRow bilinear_row(const ExperimentConfig& cfg, int m) {
  const DiscretizedSet a = build_1d(cfg.construction, m, cfg.tol);
  const SeparationResult sep = separate(a, cfg.tol);
  const DiscretizedSet e0 = product_2d(sep.s1, sep.s1);
  const DiscretizedSet e1 = product_2d(sep.s1, sep.s2);
  const DiscretizedSet e2 = product_2d(sep.s2, sep.s1);
  guard(static_cast<double>(e0.cell_count()) *
            (static_cast<double>(e1.cell_count()) + e2.cell_count()),
        cfg.force, "bilinear");
  const Box2 i1{sep.q1.x0(), sep.q1.x0() + sep.q1.side(), 0, 0};
  const Box2 i2{sep.q2.x0(), sep.q2.x0() + sep.q2.side(), 0, 0};
  const Box2 q0{i1.x0, i1.x1, i1.x0, i1.x1};
  const Box2 q1{i1.x0, i1.x1, i2.x0, i2.x1};
  const Box2 q2{i2.x0, i2.x1, i1.x0, i1.x1};
  const double wedge = wedge_min(q0, q1, q2);

  SweepRow row;
  const bool admitted = wedge >= cfg.wedge_threshold;
  double raw = 0.0, meas = 0.0;
  if (admitted) {
    std::map<std::string, DiscretizedSet> env;
    env.emplace("A1", sep.s1);
    env.emplace("A2", sep.s2);
    const DiscretizedSet d = eval_expression(env, "sqrt((A2-A1)^2+(A1-A1)^2)");
    const TripleMeasure t = bilinear_triple_measure(e0, e1, e2, d);
    raw = static_cast<double>(t.raw_count);
    meas = t.measure;
  }
  row.stats = {{"wedge", wedge},
               {"admitted", admitted ? 1.0 : 0.0},
               {"triple_raw", raw},
               {"triple_measure", meas}};
  return row;
}

SweepRow furstenberg_row(const ExperimentConfig& cfg, int m) {
  const DiscretizedSet a = build_1d(cfg.construction, m, cfg.tol);
  const TubeFamily fam = ring_tube_family(a, m);
  double pair_candidates = 0.0;
  for (const Tube& t : fam.tubes())
    pair_candidates += static_cast<double>(t.cells.cell_count()) * t.cells.cell_count();
  guard(pair_candidates, cfg.force, "furstenberg");
  // E is the union of the occupied tube parts.
  std::int64_t x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool first = true;
  for (const Tube& t : fam.tubes()) {
    const GridSpec& g = t.cells.grid();
    if (first) {
      x0 = g.ox;
      y0 = g.oy;
      x1 = g.ox + g.nx;
      y1 = g.oy + g.ny;
      first = false;
    } else {
      x0 = std::min(x0, g.ox);
      y0 = std::min(y0, g.oy);
      x1 = std::max(x1, g.ox + g.nx);
      y1 = std::max(y1, g.oy + g.ny);
    }
  }
  SetBuilder b(GridSpec::plane(m, x0, y0, x1 - x0, y1 - y0));
  for (const Tube& t : fam.tubes())
    t.cells.for_each_cell([&](std::int64_t x, std::int64_t y) {
      b.set_abs(x + t.cells.grid().ox, y + t.cells.grid().oy);
    });
  const DiscretizedSet e = b.build();
  const PairMeasure pm = furstenberg_pair_measure(e, fam);
  SweepRow row;
  row.stats = {{"n_tubes", static_cast<double>(fam.size())},
               {"measure_e", e.measure()},
               {"pair_raw", static_cast<double>(pm.raw_count)},
               {"pair_measure", pm.measure}};
  return row;
}

SweepRow cordoba_row(const ExperimentConfig& cfg, int m) {
  const ConstructionSpec& c = cfg.construction;
  const int n = c.n > 0 ? c.n : (1 << m);
  TubeFamily fam = c.name == "bush_tubes"   ? bush_tube_family(m, n)
                   : c.name == "random_tubes" ? random_tube_family(m, n, c.seed)
                                              : ring_tube_family(build_1d({"ap"}, m, cfg.tol), m);
  double cells_total = 0.0;
  for (const Tube& t : fam.tubes()) cells_total += static_cast<double>(t.cells.cell_count());
  guard(std::max(static_cast<double>(fam.size()) * fam.size(), cells_total), cfg.force,
        "cordoba");
  const CordobaNorms norms = cordoba_norms(fam);
  SweepRow row;
  row.stats = {{"n_tubes", static_cast<double>(fam.size())},
               {"l2_sq", norms.l2_sq},
               {"sum_areas", norms.sum_areas}};
  return row;
}

SweepRow cover_row(const ExperimentConfig& cfg, int m) {
  const DiscretizedSet s = cfg.construction.name == "train_track"
                               ? train_track(m)
                               : build_1d(cfg.construction, m, cfg.tol);
  guard(static_cast<double>(s.grid().cells()) * (m + 1), cfg.force, "cover");
  const ContentBound bound = content_upper(s, cfg.alpha, cfg.max_side);
  SweepRow row;
  row.stats = {{"cover_cost", bound.value},
               {"n_cubes", static_cast<double>(bound.cube_count)}};
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows;
  for (int m : cfg.m_list) {
    SweepRow row;
    switch (cfg.experiment) {
      case Experiment::Ring:
        row = ring_row(cfg, m);
        break;
      case Experiment::Distance:
        row = distance_row(cfg, m);
        break;
      case Experiment::Bilinear:
        row = bilinear_row(cfg, m);
        break;
      case Experiment::Furstenberg:
        row = furstenberg_row(cfg, m);
        break;
      case Experiment::Cordoba:
        row = cordoba_row(cfg, m);
        break;
      case Experiment::Cover:
        row = cover_row(cfg, m);
        break;
    }
    row.m = m;
    row.delta = std::exp2(-m);
    rows.push_back(std::move(row));
  }
  if (!cfg.out_path.empty()) {
    std::ofstream f(cfg.out_path);
    if (!f) throw std::runtime_error("run_sweep: cannot open " + cfg.out_path);
    f << render_report(cfg, rows);
  }
  return rows;
}

namespace {

std::string format_stat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_delta(int m) {
  // 2^-m has an exact decimal expansion with m fractional digits
  char buf[96];
  std::snprintf(buf, sizeof buf, "2^-%d=%.*f", m, m, std::exp2(-m));
  return buf;
}

}  // namespace

std::string render_report(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "# dslab sweep experiment=" << experiment_name(cfg.experiment)
      << " construction=" << cfg.construction.name
      << " alpha=" << format_stat(cfg.construction.alpha)
      << " seed=" << cfg.construction.seed << " m_list=";
  for (std::size_t i = 0; i < cfg.m_list.size(); ++i)
    out << (i ? "," : "") << cfg.m_list[i];
  out << "\n";
  out << "m\tdelta";
  if (!rows.empty())
    for (const auto& [k, v] : rows.front().stats) out << "\t" << k;
  out << "\n";
  for (const SweepRow& row : rows) {
    out << row.m << "\t" << format_delta(row.m);
    for (const auto& [k, v] : row.stats) out << "\t" << format_stat(v);
    out << "\n";
  }
  return out.str();
}

Experiment experiment_from_name(const std::string& name) {
  if (name == "ring") return Experiment::Ring;
  if (name == "distance") return Experiment::Distance;
  if (name == "bilinear") return Experiment::Bilinear;
  if (name == "furstenberg") return Experiment::Furstenberg;
  if (name == "cordoba") return Experiment::Cordoba;
  if (name == "cover") return Experiment::Cover;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Ring:
      return "ring";
    case Experiment::Distance:
      return "distance";
    case Experiment::Bilinear:
      return "bilinear";
    case Experiment::Furstenberg:
      return "furstenberg";
    case Experiment::Cordoba:
      return "cordoba";
    case Experiment::Cover:
      return "cover";
  }
  return "?";
}

}  // namespace dslab
