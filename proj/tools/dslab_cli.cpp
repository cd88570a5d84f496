// Command-line laboratory for discretized grid sets: constructions, set
// arithmetic, statistics, scale sweeps and exponent fits over DSETv1 files.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "dslab/constructions.hpp"
#include "dslab/covers.hpp"
#include "dslab/experiment.hpp"
#include "dslab/gridset.hpp"
#include "dslab/incidence.hpp"
#include "dslab/serialize.hpp"
#include "dslab/setarith.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitResource = 3;

void guard_candidates(double candidates, bool force) {
  if (candidates > dslab::kCandidateGuard && !force)
    throw dslab::ResourceGuardError(
        "candidate count " + std::to_string(candidates) +
        " exceeds 2^30; rerun with --force to proceed anyway");
}

dslab::ToleranceProfile tol_from(double eps, double K, double conc, double approx) {
  dslab::ToleranceProfile t;
  t.eps = eps;
  t.K = K;
  t.conc_factor = conc;
  t.approx_factor = approx;
  t.validate();
  return t;
}

struct GenArgs {
  std::string construction;
  int m = 8;
  double alpha = 0.5;
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen(const GenArgs& a) {
  dslab::DiscretizedSet s = [&] {
    if (a.construction == "train_track") return dslab::train_track(a.m);
    if (a.construction == "cantor") return dslab::cantor_1d(a.m, a.alpha);
    if (a.construction == "ap") return dslab::ap_set(a.m);
    if (a.construction == "gp") return dslab::gp_set(a.m);
    if (a.construction == "random")
      return dslab::random_delta_alpha(a.m, a.alpha, a.seed);
    throw std::invalid_argument("unknown construction: " + a.construction);
  }();
  dslab::save_set(s, a.out);
  std::printf("wrote %s: dim=%d m=%d cells=%lld measure=%.12g\n", a.out.c_str(),
              s.dim(), s.resolution(), static_cast<long long>(s.cell_count()),
              s.measure());
  return kExitOk;
}

struct OpArgs {
  std::string op;
  std::vector<std::string> inputs;
  std::string expr;
  std::vector<std::string> binds;
  int k = 1;
  bool force = false;
  std::string out;
};

int run_op(const OpArgs& a) {
  using dslab::BinaryOp;
  using dslab::UnaryOp;
  dslab::DiscretizedSet result = [&] {
    if (!a.expr.empty()) {
      std::map<std::string, dslab::DiscretizedSet> env;
      for (const std::string& bind : a.binds) {
        const auto eq = bind.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--bind expects NAME=FILE: " + bind);
        env.emplace(bind.substr(0, eq), dslab::load_set(bind.substr(eq + 1)));
      }
      return dslab::eval_expression(env, a.expr);
    }
    auto need = [&](std::size_t n) {
      if (a.inputs.size() != n)
        throw std::invalid_argument("op '" + a.op + "' expects " + std::to_string(n) +
                                    " input file(s)");
    };
    if (a.op == "add" || a.op == "sub" || a.op == "mul" || a.op == "div" ||
        a.op == "product") {
      need(2);
      dslab::DiscretizedSet x = dslab::load_set(a.inputs[0]);
      dslab::DiscretizedSet y = dslab::load_set(a.inputs[1]);
      guard_candidates(static_cast<double>(x.cell_count()) * y.cell_count(), a.force);
      if (a.op == "add") return dslab::pointwise_combine(x, y, BinaryOp::Add);
      if (a.op == "sub") return dslab::pointwise_combine(x, y, BinaryOp::Sub);
      if (a.op == "mul") return dslab::pointwise_combine(x, y, BinaryOp::Mul);
      if (a.op == "div") return dslab::pointwise_combine(x, y, BinaryOp::Div);
      return dslab::product_2d(x, y);
    }
    need(1);
    dslab::DiscretizedSet x = dslab::load_set(a.inputs[0]);
    if (a.op == "square") return dslab::unary_transform(x, UnaryOp::Square);
    if (a.op == "sqrt") return dslab::unary_transform(x, UnaryOp::Sqrt);
    if (a.op == "negate") return dslab::unary_transform(x, UnaryOp::Negate);
    if (a.op == "thicken") return dslab::thicken(x, a.k);
    throw std::invalid_argument("unknown op: " + a.op);
  }();
  dslab::save_set(result, a.out);
  std::printf("wrote %s: cells=%lld measure=%.12g\n", a.out.c_str(),
              static_cast<long long>(result.cell_count()), result.measure());
  return kExitOk;
}

struct StatArgs {
  std::string stat;
  std::vector<std::string> inputs;
  double alpha = 0.5;
  double max_side = 1.0;
  double eps = 0.05, K = 10.0, conc = 5.0, approx = 8.0;
  bool force = false;
};

int run_stat(const StatArgs& a) {
  if (a.stat == "measure") {
    for (const std::string& path : a.inputs) {
      dslab::DiscretizedSet s = dslab::load_set(path);
      std::printf("%s\tcells=%lld\tmeasure=%.12g\n", path.c_str(),
                  static_cast<long long>(s.cell_count()), s.measure());
    }
    return kExitOk;
  }
  if (a.stat == "certify") {
    const dslab::ToleranceProfile tol = tol_from(a.eps, a.K, a.conc, a.approx);
    for (const std::string& path : a.inputs) {
      dslab::DiscretizedSet s = dslab::load_set(path);
      const auto rep = dslab::check_delta_alpha(s, a.alpha, tol);
      std::printf("%s\talpha=%.6g\tverdict=%s\tworst_ratio=%.6g\tallowed=%.6g\n",
                  path.c_str(), a.alpha, rep.pass ? "pass" : "fail",
                  rep.worst_ratio(), rep.allowed_ratio);
      for (const auto& row : rep.rows)
        std::printf("  r=2^-%d\tworst_mass=%.12g\tratio=%.6g\n", row.j,
                    row.worst_mass, row.ratio);
    }
    return kExitOk;
  }
  if (a.stat == "distance") {
    if (a.inputs.empty() || a.inputs.size() > 2)
      throw std::invalid_argument("stat distance expects one or two input files");
    dslab::DiscretizedSet k1 = dslab::load_set(a.inputs[0]);
    dslab::DiscretizedSet k2 = a.inputs.size() == 2 ? dslab::load_set(a.inputs[1]) : k1;
    auto columns = [](const dslab::DiscretizedSet& s) {
      std::vector<bool> seen(static_cast<std::size_t>(s.grid().nx), false);
      s.for_each_cell([&](std::int64_t x, std::int64_t) {
        seen[static_cast<std::size_t>(x)] = true;
      });
      double n = 0;
      for (bool b : seen) n += b ? 1 : 0;
      return n;
    };
    guard_candidates(columns(k1) * columns(k2) * 2.0 *
                         static_cast<double>(k1.grid().ny + k2.grid().ny),
                     a.force);
    dslab::DiscretizedSet dist = dslab::distance_set(k1, k2);
    std::printf("dist_cells=%lld\tdist_measure=%.12g\n",
                static_cast<long long>(dist.cell_count()), dist.measure());
    return kExitOk;
  }
  if (a.stat == "content") {
    for (const std::string& path : a.inputs) {
      dslab::DiscretizedSet s = dslab::load_set(path);
      const auto bound = dslab::content_upper(s, a.alpha, a.max_side);
      std::printf("%s\talpha=%.6g\tc=%.6g\tcost=%.12g\tcubes=%lld\tball_factor=%.6g\n",
                  path.c_str(), a.alpha, a.max_side, bound.value,
                  static_cast<long long>(bound.cube_count), bound.ball_upper_factor);
    }
    return kExitOk;
  }
  throw std::invalid_argument("unknown stat: " + a.stat);
}

struct SweepArgs {
  std::string experiment;
  std::string construction;
  std::vector<int> m_list;
  double alpha = 0.5;
  double max_side = 1.0;
  double wedge_threshold = 0.01;
  std::uint64_t seed = 1;
  int n = 0;
  double eps = 0.05, K = 10.0, conc = 5.0, approx = 8.0;
  bool force = false;
  std::string out;
};

int run_sweep_cmd(const SweepArgs& a) {
  dslab::ExperimentConfig cfg;
  cfg.experiment = dslab::experiment_from_name(a.experiment);
  cfg.construction = {a.construction, a.alpha, a.seed, a.n};
  cfg.m_list = a.m_list;
  cfg.alpha = a.alpha;
  cfg.max_side = a.max_side;
  cfg.wedge_threshold = a.wedge_threshold;
  cfg.tol = tol_from(a.eps, a.K, a.conc, a.approx);
  cfg.seed = a.seed;
  cfg.force = a.force;
  cfg.out_path = a.out;
  const auto rows = dslab::run_sweep(cfg);
  std::fputs(dslab::render_report(cfg, rows).c_str(), stdout);
  return kExitOk;
}

struct FitArgs {
  std::string path;
  std::string column;
};

int run_fit(const FitArgs& a) {
  std::ifstream f(a.path);
  if (!f) throw dslab::SetIoError("cannot open report: " + a.path);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::pair<double, double>> points;
  int col = -1;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::vector<std::string> fields;
    std::string field;
    while (std::getline(row, field, '\t')) fields.push_back(field);
    if (header.empty()) {
      header = fields;
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == a.column) col = static_cast<int>(i);
      if (col < 0)
        throw std::invalid_argument("fit: no column '" + a.column + "' in " + a.path);
      continue;
    }
    const int m = std::stoi(fields.at(0));
    points.emplace_back(std::exp2(-m), std::stod(fields.at(static_cast<std::size_t>(col))));
  }
  const dslab::ExponentFit fit = dslab::fit_exponent(points);
  std::printf("column=%s\tslope=%.12g\tintercept=%.12g\tresidual=%.12g\tpoints=%d\tdropped=%d\n",
              a.column.c_str(), fit.slope, fit.intercept, fit.residual,
              fit.points_used, fit.points_dropped);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discretized-set laboratory"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* cgen = app.add_subcommand("gen", "generate a named construction");
  cgen->add_option("--construction", gen.construction,
                   "train_track|cantor|ap|gp|random")->required();
  cgen->add_option("--m", gen.m, "resolution exponent")->required();
  cgen->add_option("--alpha", gen.alpha, "target dimension (cantor/random)");
  cgen->add_option("--seed", gen.seed, "random seed");
  cgen->add_option("-o,--out", gen.out, "output DSETv1 file")->required();

  OpArgs op;
  CLI::App* cop = app.add_subcommand("op", "set operations on DSETv1 files");
  cop->add_option("--op", op.op, "add|sub|mul|div|square|sqrt|negate|product|thicken");
  cop->add_option("--expr", op.expr, "expression over --bind names, e.g. (F-F)^2+(F-F)^2");
  cop->add_option("--bind", op.binds, "NAME=FILE binding for --expr");
  cop->add_option("--k", op.k, "cell radius for thicken");
  cop->add_flag("--force", op.force, "ignore the resource guard");
  cop->add_option("inputs", op.inputs, "input DSETv1 files");
  cop->add_option("-o,--out", op.out, "output DSETv1 file")->required();

  StatArgs stat;
  CLI::App* cstat = app.add_subcommand("stat", "statistics of DSETv1 files");
  cstat->add_option("--stat", stat.stat, "measure|certify|distance|content")->required();
  cstat->add_option("--alpha", stat.alpha, "dimension parameter");
  cstat->add_option("--max-side", stat.max_side, "cover cap c");
  cstat->add_option("--tol-eps,--eps", stat.eps, "tolerance eps");
  cstat->add_option("--tol-k", stat.K, "tolerance K");
  cstat->add_option("--tol-conc", stat.conc, "concentration pass bar");
  cstat->add_option("--tol-approx", stat.approx, "approximation slack");
  cstat->add_flag("--force", stat.force, "ignore the resource guard");
  cstat->add_option("inputs", stat.inputs, "input DSETv1 files")->required();

  SweepArgs sweep;
  CLI::App* csweep = app.add_subcommand("sweep", "experiment sweep across scales");
  csweep->add_option("--experiment", sweep.experiment,
                     "ring|distance|bilinear|furstenberg|cordoba|cover")->required();
  csweep->add_option("--construction", sweep.construction, "generator name")->required();
  csweep->add_option("--m-list", sweep.m_list, "ascending resolutions")->required();
  csweep->add_option("--alpha", sweep.alpha, "dimension parameter");
  csweep->add_option("--max-side", sweep.max_side, "cover cap c");
  csweep->add_option("--wedge-threshold", sweep.wedge_threshold, "bilinear admission bar");
  csweep->add_option("--seed", sweep.seed, "random seed");
  csweep->add_option("--n", sweep.n, "tube count (0 = 1/delta)");
  csweep->add_option("--tol-eps,--eps", sweep.eps, "tolerance eps");
  csweep->add_option("--tol-k", sweep.K, "tolerance K");
  csweep->add_option("--tol-conc", sweep.conc, "concentration pass bar");
  csweep->add_option("--tol-approx", sweep.approx, "approximation slack");
  csweep->add_flag("--force", sweep.force, "ignore the resource guard");
  csweep->add_option("-o,--out", sweep.out, "output TSV report");

  FitArgs fit;
  CLI::App* cfit = app.add_subcommand("fit", "fit a scaling exponent from a TSV report");
  cfit->add_option("report", fit.path, "TSV report path")->required();
  cfit->add_option("--column", fit.column, "statistic column name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cgen->parsed()) return run_gen(gen);
    if (cop->parsed()) return run_op(op);
    if (cstat->parsed()) return run_stat(stat);
    if (csweep->parsed()) return run_sweep_cmd(sweep);
    if (cfit->parsed()) return run_fit(fit);
  } catch (const dslab::ResourceGuardError& e) {
    std::fprintf(stderr, "resource guard: %s\n", e.what());
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
