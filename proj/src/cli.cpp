#include "strainband/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "strainband/geometry.hpp"
#include "strainband/hamiltonian.hpp"
#include "strainband/spectra.hpp"
#include "strainband/validation.hpp"

namespace strainband {

namespace {

using nlohmann::ordered_json;
constexpr double kPi = 3.14159265358979323846;

struct QGrid {
  double lo = 0.0, hi = 0.0;
  int count = 1;
  std::vector<double> points() const {
    std::vector<double> q(count);
    for (int i = 0; i < count; ++i)
      q[i] = (count == 1) ? lo : lo + (hi - lo) * i / static_cast<double>(count - 1);
    return q;
  }
};

QGrid parse_qgrid(const std::string& s) {
  QGrid g;
  char c1, c2;
  std::istringstream in(s);
  if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.count) || c1 != ':' || c2 != ':' || g.count < 1)
    throw CLI::ValidationError("--q", "expected min:max:count");
  return g;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

Orientation parse_orient(const std::string& s) {
  if (s == "ac") return Orientation::AC;
  if (s == "zz") return Orientation::ZZ;
  throw CLI::ValidationError("--orient", "must be 'ac' or 'zz'");
}

HoppingMode parse_hopping(const std::string& s) {
  if (s == "exact") return HoppingMode::ExactDistance;
  if (s == "fd") return HoppingMode::FiniteDiffStrain;
  if (s == "cell") return HoppingMode::CellLinearized;
  throw CLI::ValidationError("--hopping", "must be exact|fd|cell");
}

BoundaryCondition parse_boundary(const std::string& s) {
  if (s == "zero") return BoundaryCondition::ZeroTruncation;
  if (s == "periodic") return BoundaryCondition::Periodic;
  throw CLI::ValidationError("--boundary", "must be zero|periodic");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output path: " + path);
  return out;
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

// Extracted key=value pairs of reg-ac:L=<v>,w=<v>.
std::pair<double, double> parse_reg_params(const std::string& spec) {
  double L = 1.0, w = 0.2;
  std::string item;
  std::istringstream in(spec);
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad reg-ac parameter: " + item);
    std::string key = item.substr(0, eq);
    double val = std::stod(item.substr(eq + 1));
    if (key == "L")
      L = val;
    else if (key == "w")
      w = val;
    else
      throw std::invalid_argument("unknown reg-ac parameter: " + key);
  }
  return {L, w};
}

UnidirectionalProfile parse_profile(const std::string& name) {
  if (name == "quad-ac") return quadratic_profile();
  if (name.rfind("reg-ac:", 0) == 0) {
    auto [L, w] = parse_reg_params(name.substr(7));
    return regularized_quadratic(L, w);
  }
  if (name.rfind("csv:", 0) == 0) {
    DisplacementField f = DisplacementField::from_profile_csv(name.substr(4));
    return *f.profile();
  }
  throw std::invalid_argument("unknown 1D profile: " + name);
}

struct CommonOpts {
  std::string orient = "ac";
  std::string deform = "none";
  std::string hopping = "fd";
  std::string boundary = "zero";
  double delta = 0.0;
  double t1 = -2.0;
  int nt = 200;
  int threads = 0;
};

SupercellSpec build_spec(const CommonOpts& o) {
  SupercellSpec s;
  s.orientation = parse_orient(o.orient);
  s.boundary = parse_boundary(o.boundary);
  s.hopping = parse_hopping(o.hopping);
  s.delta = o.delta;
  s.t1 = o.t1;
  s.n_t = o.nt;
  s.field = parse_deformation(o.deform);
  return s;
}

// Config-file support: a flat JSON object whose keys mirror the long flag
// names; command-line flags override file values.
std::vector<std::string> inject_config(const std::vector<std::string>& args) {
  std::string config_path;
  std::vector<std::string> rest;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  if (rest.empty()) throw std::invalid_argument("config file given but no subcommand");
  std::vector<std::string> out;
  out.push_back(rest.front());  // subcommand first
  for (auto it = j.begin(); it != j.end(); ++it) {
    out.push_back("--" + it.key());
    if (it.value().is_string())
      out.push_back(it.value().get<std::string>());
    else
      out.push_back(it.value().dump());
  }
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  auto tl = CLI::MultiOptionPolicy::TakeLast;
  cmd->add_option("--orient", o.orient, "ribbon orientation: ac|zz")->multi_option_policy(tl);
  cmd->add_option("--deform", o.deform,
                  "deformation: none|quad-ac|quad-zz|triaxial|reg-ac:L=..,w=..|csv:path")
      ->multi_option_policy(tl);
  cmd->add_option("--delta", o.delta, "slow-strain parameter")->multi_option_policy(tl);
  cmd->add_option("--nt", o.nt, "truncation half-width N_T")->multi_option_policy(tl);
  cmd->add_option("--t1", o.t1, "hopping slope h'(1)")->multi_option_policy(tl);
  cmd->add_option("--hopping", o.hopping, "hopping mode: exact|fd|cell")
      ->multi_option_policy(tl);
  cmd->add_option("--boundary", o.boundary, "boundary: zero|periodic")->multi_option_policy(tl);
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)")
      ->multi_option_policy(tl);
}

int run_bands2d(int grid_n, const std::string& out_path) {
  if (grid_n < 8) throw std::invalid_argument("bands2d: grid must be >= 8");
  const HoneycombGeometry& geo = honeycomb();
  std::ofstream out = open_out(out_path);
  out << "k1,k2,E1,E2\n";
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      Vec2 k = geo.a1 * (static_cast<double>(i) / grid_n) +
               geo.a2 * (static_cast<double>(j) / grid_n);
      auto [em, ep] = bulk_dispersion(k);
      out << fmt17(k.x) << ',' << fmt17(k.y) << ',' << fmt17(em) << ',' << fmt17(ep) << '\n';
    }
  }
  return 0;
}

int run_bands(const CommonOpts& o, const QGrid& qg, int num_bands, const std::string& out_path) {
  SupercellSpec spec = build_spec(o);
  BandSweep sw = sweep(spec, qg.points(), num_bands, o.threads);
  std::ofstream out = open_out(out_path);
  size_t nb = sw.curves.empty() ? 0 : sw.curves.front().size();
  out << "q";
  for (size_t b = 0; b < nb; ++b) out << ",E" << (b + 1);
  out << "\n";
  for (size_t qi = 0; qi < sw.q_grid.size(); ++qi) {
    out << fmt17(sw.q_grid[qi]);
    for (double e : sw.curves[qi]) out << ',' << fmt17(e);
    out << "\n";
  }
  return 0;
}

int run_modes(const CommonOpts& o, double q, double tol, int layer, const std::string& out_path) {
  SupercellSpec spec = build_spec(o);
  BlochMatrix H = assemble_supercell(spec, q);
  EigenResult vals = eig_supercell(H, false);
  int count = 0;
  for (double e : vals.eigenvalues)
    if (std::abs(e) <= tol) ++count;
  ordered_json j;
  j["q"] = q;
  j["abs_tol"] = tol;
  j["layer_cells"] = layer;
  j["modes"] = ordered_json::array();
  if (count > 0) {
    EigenResult sub = eig_supercell(H, true, count);
    auto modes = classify_degenerate_subspace(sub, tol, layer);
    for (const auto& m : modes) {
      ordered_json mj;
      mj["eigenvalue"] = m.eigenvalue;
      mj["label"] = mode_label_name(m.label);
      mj["boundary_weight"] = m.boundary_weight;
      mj["profile"] = m.profile;
      j["modes"].push_back(std::move(mj));
    }
  }
  write_json(out_path, j);
  return 0;
}

int run_dirac(const std::string& dname, double t1, double kpar, double w, int n, int num,
              const std::string& out_path) {
  UnidirectionalProfile prof = parse_profile(dname);
  KappaProfile kappa = KappaProfile::from_profile(prof, kpar, t1);
  DiracDiscretization disc = discretize(kappa, w, n);
  DiracSpectrumResult res = in_gap_spectrum(disc, kappa, num);
  ordered_json j;
  j["profile"] = dname;
  j["t1"] = t1;
  j["k_parallel"] = kpar;
  j["half_width"] = w;
  j["n_cells"] = n;
  j["gap_edge_a"] = res.gap_edge_a;
  j["in_gap_eigenvalues"] = res.in_gap_eigenvalues;
  write_json(out_path, j);
  return 0;
}

int run_strain(const std::string& uname, double t1, int grid_n, const std::string& out_path) {
  if (grid_n < 2) throw std::invalid_argument("strain: grid must be >= 2");
  DisplacementField f = parse_deformation(uname);
  std::ofstream out = open_out(out_path);
  out << "X1,X2,A1,A2,B\n";
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      double x = -1.0 + 2.0 * i / (grid_n - 1);
      double y = -1.0 + 2.0 * j / (grid_n - 1);
      Vec2 A = effective_potential(f, {x, y}, t1);
      double B = pseudo_field(f, {x, y}, t1);
      out << fmt17(x) << ',' << fmt17(y) << ',' << fmt17(A.x) << ',' << fmt17(A.y) << ','
          << fmt17(B) << "\n";
    }
  }
  return 0;
}

int run_validate(double L, double w, double t1, double kpar, const std::vector<double>& deltas,
                 int threads, const std::string& out_path) {
  ValidationConfig cfg;
  cfg.L = L;
  cfg.mollifier_width = w;
  cfg.t1 = t1;
  cfg.k_parallel = kpar;
  if (!deltas.empty()) cfg.deltas = deltas;
  cfg.threads = threads;
  ValidationReport rep = run_regularized_validation(cfg);
  ordered_json j;
  j["deltas"] = rep.deltas;
  j["residuals"] = rep.residuals;
  j["fitted_orders"] = {{"residual", rep.residual_order}, {"zero_band", rep.zero_band_order}};
  j["E1"] = rep.e1_first_level;
  j["E2"] = rep.e2_first_level;
  j["E2_zero_mode_abs"] = rep.e2_zero_mode_abs;
  j["zero_band_abs_e"] = rep.zero_band_abs_e;
  j["eigenvalue_errors"] = rep.corrector_ratio;
  write_json(out_path, j);
  return 0;
}

}  // namespace

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

DisplacementField parse_deformation(const std::string& name) {
  if (name == "none") return DisplacementField::none();
  if (name == "quad-ac") return DisplacementField::quadratic_ac();
  if (name == "quad-zz") return DisplacementField::quadratic_zz();
  if (name == "triaxial") return DisplacementField::triaxial();
  if (name.rfind("reg-ac:", 0) == 0) {
    auto [L, w] = parse_reg_params(name.substr(7));
    return DisplacementField::unidirectional_ac(regularized_quadratic(L, w));
  }
  if (name.rfind("csv:", 0) == 0) return DisplacementField::from_profile_csv(name.substr(4));
  throw std::invalid_argument("unknown deformation: " + name);
}

int cli_run(const std::vector<std::string>& raw_args) {
  CLI::App app{"strainband: band structures and effective Dirac spectra of "
               "slowly strained honeycomb lattices"};
  app.require_subcommand(1);
  auto tl = CLI::MultiOptionPolicy::TakeLast;

  // bands2d
  auto* c2d = app.add_subcommand("bands2d", "bulk dispersion over the Brillouin zone");
  int grid_n = 64;
  std::string out2d = "bands2d.csv";
  c2d->add_option("--n", grid_n, "grid points per BZ direction")->multi_option_policy(tl);
  c2d->add_option("--out", out2d, "output CSV")->multi_option_policy(tl);

  // bands
  auto* cb = app.add_subcommand("bands", "ribbon band sweep over q_parallel");
  CommonOpts ob;
  std::string qspec = "-0.33:0.33:67";
  int num_bands = 40;
  std::string outb = "bands.csv";
  add_common(cb, ob);
  cb->add_option("--q", qspec, "q grid min:max:count")->multi_option_policy(tl);
  cb->add_option("--num", num_bands, "bands kept (smallest magnitude; 0 = all)")
      ->multi_option_policy(tl);
  cb->add_option("--out", outb, "output CSV")->multi_option_policy(tl);

  // modes
  auto* cm = app.add_subcommand("modes", "classify the near-zero eigenspace at one q");
  CommonOpts om;
  double qm = 0.0, tol = 0.06;
  int layer = 20;
  std::string outm = "modes.json";
  add_common(cm, om);
  cm->add_option("--q", qm, "quasi-momentum")->multi_option_policy(tl);
  cm->add_option("--tol", tol, "|E| tolerance selecting the subspace")->multi_option_policy(tl);
  cm->add_option("--layer", layer, "boundary layer width in cells")->multi_option_policy(tl);
  cm->add_option("--out", outm, "output JSON")->multi_option_policy(tl);

  // dirac
  auto* cd = app.add_subcommand("dirac", "in-gap spectrum of the effective 1D Dirac operator");
  std::string dprof = "quad-ac";
  double t1d = -2.0, kpar = 0.0, wd = 20.0;
  int nd = 4096, numd = 7;
  std::string outd = "dirac.json";
  cd->add_option("--d", dprof, "profile: quad-ac|reg-ac:L=..,w=..|csv:path")
      ->multi_option_policy(tl);
  cd->add_option("--t1", t1d, "hopping slope")->multi_option_policy(tl);
  cd->add_option("--kpar", kpar, "parallel quasi-momentum k_par")->multi_option_policy(tl);
  cd->add_option("--w", wd, "half width of the 1D box")->multi_option_policy(tl);
  cd->add_option("--n", nd, "staggered cells")->multi_option_policy(tl);
  cd->add_option("--num", numd, "in-gap states kept (smallest magnitude; 0 = all)")
      ->multi_option_policy(tl);
  cd->add_option("--out", outd, "output JSON")->multi_option_policy(tl);

  // strain
  auto* cs = app.add_subcommand("strain", "effective potential and pseudo-field maps");
  std::string uname = "quad-ac";
  double t1s = -2.0;
  int grid_s = 5;
  std::string outs = "strain.csv";
  cs->add_option("--u", uname, "deformation name")->multi_option_policy(tl);
  cs->add_option("--t1", t1s, "hopping slope")->multi_option_policy(tl);
  cs->add_option("--grid", grid_s, "sample grid per direction")->multi_option_policy(tl);
  cs->add_option("--out", outs, "output CSV")->multi_option_policy(tl);

  // validate
  auto* cv = app.add_subcommand("validate", "multiscale validation for the regularized profile");
  double Lv = 1.0, wv = 0.2, t1v = -2.0, kparv = 0.0;
  std::string deltas_s = "0.08,0.04,0.02";
  int threads_v = 0;
  std::string outv = "validate.json";
  cv->add_option("--L", Lv, "regularization length")->multi_option_policy(tl);
  cv->add_option("--w", wv, "mollifier width")->multi_option_policy(tl);
  cv->add_option("--t1", t1v, "hopping slope")->multi_option_policy(tl);
  cv->add_option("--kpar", kparv, "parallel quasi-momentum")->multi_option_policy(tl);
  cv->add_option("--deltas", deltas_s, "comma-separated delta list")->multi_option_policy(tl);
  cv->add_option("--threads", threads_v, "worker threads")->multi_option_policy(tl);
  cv->add_option("--out", outv, "output JSON")->multi_option_policy(tl);

  try {
    std::vector<std::string> args = inject_config(raw_args);
    // CLI11 parses reversed argv-style vectors.
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);

    if (c2d->parsed()) return run_bands2d(grid_n, out2d);
    if (cb->parsed()) return run_bands(ob, parse_qgrid(qspec), num_bands, outb);
    if (cm->parsed()) return run_modes(om, qm, tol, layer, outm);
    if (cd->parsed()) return run_dirac(dprof, t1d, kpar, wd, nd, numd, outd);
    if (cs->parsed()) return run_strain(uname, t1s, grid_s, outs);
    if (cv->parsed())
      return run_validate(Lv, wv, t1v, kparv, parse_list(deltas_s), threads_v, outv);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help() << std::endl;
      return 0;
    }
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  }
}

int cli_run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_run(args);
}

}  // namespace strainband
