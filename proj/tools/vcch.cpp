// Command line front end: construct, residual, example, phase.
// Exit codes: 0 ok, 2 invalid model or arguments, 3 construction failure,
// 4 failed accuracy target or example reference.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "vcch/examples.hpp"
#include "vcch/output.hpp"
#include "vcch/residual.hpp"

using namespace vcch;

namespace {

enum Exit { kOk = 0, kModel = 2, kConstruction = 3, kAcceptance = 4 };

struct Config {
  std::string model, kind, out, form = "printed";
  int order = -1;
  double eps = 0.1;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  std::vector<double> rect;
  std::vector<std::size_t> grid;
  double target = NAN, tolerance = NAN, tau_cap = NAN;
};

TwoPhaseForm parse_form(const std::string& s) {
  if (s == "printed") return TwoPhaseForm::Printed;
  if (s == "consistent") return TwoPhaseForm::Consistent;
  throw ModelError("two-phase form must be 'printed' or 'consistent', got '" + s + "'");
}

struct Loaded {
  ModelFile mf;
  std::string kind;
  int order;
  std::shared_ptr<CandidateSolution> c;
};

Loaded load(const Config& cfg) {
  Loaded l;
  l.mf = load_model(cfg.model);
  l.kind = cfg.kind.empty() ? infer_kind(l.mf) : cfg.kind;
  l.order = cfg.order >= 0 ? cfg.order : 0;
  l.c = assemble_candidate(l.mf, l.kind, l.order, parse_form(cfg.form));
  return l;
}

// requested rectangle (model domain by default) restricted to the construction window
Rect scan_rect(const Config& cfg, const Loaded& l) {
  Rect r = l.mf.domain;
  if (!cfg.rect.empty()) {
    if (cfg.rect.size() != 4) throw ModelError("--rect needs four numbers X0,X1,T0,T1");
    r = {cfg.rect[0], cfg.rect[1], cfg.rect[2], cfg.rect[3]};
  }
  if (!(r.x1 > r.x0) || !(r.t1 >= r.t0)) throw ModelError("the rectangle is empty");
  Interval w = l.c->time_window();
  Rect clipped{r.x0, r.x1, std::max(r.t0, w.lo), std::min(r.t1, w.hi)};
  if (!(clipped.t1 >= clipped.t0)) {
    std::ostringstream os;
    os << "t range [" << r.t0 << ", " << r.t1 << "] lies outside the construction window [" << w.lo << ", " << w.hi
       << "]";
    throw ConstructionError(os.str());
  }
  if (clipped.t0 != r.t0 || clipped.t1 != r.t1)
    std::cerr << "note: t range clipped to the construction window [" << clipped.t0 << ", " << clipped.t1 << "]\n";
  return clipped;
}

std::pair<std::size_t, std::size_t> grid_of(const Config& cfg, std::size_t nx, std::size_t nt) {
  if (cfg.grid.empty()) return {nx, nt};
  if (cfg.grid.size() != 2 || cfg.grid[0] < 2 || cfg.grid[1] < 2) throw ModelError("--grid needs NX,NT with both >= 2");
  return {cfg.grid[0], cfg.grid[1]};
}

std::string in_dir(const std::string& dir, const std::string& f) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / f).string();
}

int cmd_construct(const Config& cfg) {
  Loaded l = load(cfg);
  Rect r = scan_rect(cfg, l);
  auto [nx, nt] = grid_of(cfg, 201, 41);
  if (r.t1 == r.t0) nt = 1;
  Surface s = sample_surface(*l.c, r, nx, nt, cfg.eps);
  std::ostringstream title;
  title << l.kind << " order " << l.order << ", eps = " << cfg.eps;
  write_text_file(in_dir(cfg.out, "surface.csv"), surface_csv(s));
  write_text_file(in_dir(cfg.out, "snapshots.svg"), surface_snapshots_svg(s, title.str()));
  if (nt >= 2) write_text_file(in_dir(cfg.out, "surface.svg"), svg_heatmap(title.str(), s.xs, s.ts, s.u));
  std::cout << "kind = " << l.kind << "\norder = " << l.order << "\neps = " << format_number(cfg.eps)
            << "\nwindow_start = " << format_number(l.c->time_window().lo)
            << "\nwindow_end = " << format_number(l.c->time_window().hi) << "\nout = " << cfg.out << '\n';
  return kOk;
}

int cmd_residual(const Config& cfg) {
  Loaded l = load(cfg);
  Rect r = scan_rect(cfg, l);
  ScanOptions opt = default_scan_options(*l.c);
  auto [nx, nt] = grid_of(cfg, opt.nx, opt.nt);
  opt.nx = nx;
  opt.nt = nt;
  if (!std::isnan(cfg.target)) opt.target = cfg.target;
  if (!std::isnan(cfg.tolerance)) opt.tolerance = cfg.tolerance;
  if (!std::isnan(cfg.tau_cap)) opt.tau_cap = cfg.tau_cap;
  ResidualReport rep = scan_orders(*l.c, cfg.eps_list, r, opt);
  std::string txt = report_text(rep);
  write_text_file(in_dir(cfg.out, "report.txt"), txt);
  write_text_file(in_dir(cfg.out, "residual.csv"), report_csv(rep));
  std::cout << txt;
  return rep.pass ? kOk : kAcceptance;
}

int cmd_example(int id, const std::string& out) {
  ExampleRun run = run_example(id, out);
  int status = kOk;
  for (const auto& c : run.checks) {
    std::cout << (c.ok() ? "ok   " : "FAIL ") << c.name << ": " << format_number(c.value) << " (reference "
              << format_number(c.reference) << ", tolerance " << format_number(c.tolerance) << ")\n";
    if (!c.ok() && status == kOk) {
      std::cerr << "example " << id << ": reference violated: " << c.name << '\n';
      status = kAcceptance;
    }
  }
  for (const auto& f : run.files) std::cout << "wrote " << f << '\n';
  return status;
}

int cmd_phase(const Config& cfg) {
  Loaded l = load(cfg);
  Interval w = l.c->time_window();
  CoefficientModel m = build_coefficients(l.mf);
  RegularPart reg = build_regular(l.mf, m);
  std::vector<std::string> names;
  for (const auto& p : l.mf.phases) names.push_back(p.name);
  std::vector<PhaseFunction> phases;
  for (const auto& n : names) phases.push_back(build_phase(l.mf, m, reg, n));
  std::cout << "kind = " << l.kind << "\nwindow_start = " << format_number(w.lo)
            << "\nwindow_end = " << format_number(w.hi) << '\n';
  for (std::size_t k = 0; k < names.size(); ++k) std::cout << names[k] << " = " << phases[k].description << '\n';
  std::vector<std::string> header{"t"};
  for (const auto& n : names) header.push_back(n), header.push_back("d" + n);
  std::vector<std::vector<double>> rows;
  for (double t : linspace(w.lo, w.hi, w.hi > w.lo ? 21 : 1)) {
    std::vector<double> row{t};
    for (const auto& p : phases) row.push_back(p.phi(t)), row.push_back(p.dphi(t));
    rows.push_back(row);
  }
  std::cout << csv_table(header, rows);
  return kOk;
}

void model_options(CLI::App* sub, Config& cfg) {
  sub->add_option("--model", cfg.model, "model file")->required()->check(CLI::ExistingFile);
  sub->add_option("--kind", cfg.kind, "soliton1, soliton2, peakon1 or peakon2 (inferred when omitted)");
  sub->add_option("--order", cfg.order, "order of the approximation (0 or 1 for one-phase kinds)");
  sub->add_option("--two-phase-form", cfg.form, "printed or consistent two-soliton parameters");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic soliton and peakon solutions of the variable-coefficient Camassa-Holm equation"};
  app.require_subcommand(1);
  Config cfg;
  int example_id = 0;

  auto* construct = app.add_subcommand("construct", "build an approximation and sample it on a grid");
  model_options(construct, cfg);
  construct->add_option("--eps", cfg.eps, "small parameter")->required()->check(CLI::PositiveNumber);
  construct->add_option("--rect", cfg.rect, "X0,X1,T0,T1")->delimiter(',');
  construct->add_option("--grid", cfg.grid, "NX,NT")->delimiter(',');
  construct->add_option("--out", cfg.out, "output directory")->required();

  auto* residual = app.add_subcommand("residual", "residual norms over an eps ladder and the fitted order");
  model_options(residual, cfg);
  residual->add_option("--eps-list", cfg.eps_list, "E1,E2,... (at least three)")->delimiter(',');
  residual->add_option("--rect", cfg.rect, "X0,X1,T0,T1")->delimiter(',');
  residual->add_option("--grid", cfg.grid, "NX,NT of the base grid")->delimiter(',');
  residual->add_option("--target", cfg.target, "claimed order (default: the order of the construction)");
  residual->add_option("--tolerance", cfg.tolerance, "pass iff slope >= target - tolerance");
  residual->add_option("--tau-cap", cfg.tau_cap, "keep only points within |tau| <= cap of a curve (0: all)");
  residual->add_option("--out", cfg.out, "output directory")->required();

  auto* example = app.add_subcommand("example", "reproduce one of the worked examples");
  example->add_option("id", example_id, "1, 2, 3 or 4")->required();
  example->add_option("--out", cfg.out, "output directory")->required();

  auto* phase = app.add_subcommand("phase", "print the validated window and the phase table");
  model_options(phase, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kModel;
  }

  try {
    if (*construct) return cmd_construct(cfg);
    if (*residual) return cmd_residual(cfg);
    if (*example) return cmd_example(example_id, cfg.out);
    return cmd_phase(cfg);
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const ParseError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const DomainError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const ConstructionError& e) {
    std::cerr << "construction failed: " << e.what() << '\n';
    return kConstruction;
  } catch (const NumericalError& e) {
    std::cerr << "construction failed: " << e.what() << '\n';
    return kConstruction;
  } catch (const ScanError& e) {
    std::cerr << "construction failed: " << e.what() << '\n';
    return kConstruction;
  } catch (const BandViolation& e) {
    std::cerr << "construction failed: " << e.what() << '\n';
    return kConstruction;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
