// Command-line front end: parses declarative instance specs, dispatches the
// library computations, runs named verification suites, and emits structured
// JSON reports.  Exit code 0 iff every residual verdict passes.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <flatinv/spec_io.hpp>
#include <flatinv/verify.hpp>

namespace {

using namespace flatinv;

struct Options {
  std::string spec_path;
  std::string out_path;
  double tolerance_scale = 1.0;
  int threads = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

InstanceSpec load(const Options& opt) {
  if (opt.spec_path.empty()) throw std::invalid_argument("--spec is required for this command");
  InstanceSpec s = load_spec(opt.spec_path);
  if (opt.seed_given) {
    s.seed = opt.seed;
    s.has_seed = true;
  }
  return s;
}

FlatBundle bundle_from(const InstanceSpec& s) {
  BaseGrid grid = s.base_grid();
  if (s.holonomies.empty() && s.metric == "seeded-random")
    return instances::random_flat_bundle(grid, s.rank, s.seed);
  if (static_cast<int>(s.holonomies.size()) != grid.dim)
    throw std::invalid_argument("bundle: one holonomy per base axis required");
  return FlatBundle(grid, s.holonomies);
}

std::vector<Eigen::MatrixXd> real_blocks(const InstanceSpec& s) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& h : s.holonomies) {
    if (h.imag().cwiseAbs().maxCoeff() > 0)
      throw std::invalid_argument("holonomies must be real integer matrices here");
    out.push_back(h.real());
  }
  return out;
}

BasedComplex based_complex_from(const InstanceSpec& s) {
  if (s.graded_ranks.empty())
    throw std::invalid_argument("torsion: spec needs complex.graded_ranks");
  BasedComplex c;
  c.ranks = s.graded_ranks;
  c.volumes = s.volumes;
  if (c.volumes.empty()) c.volumes.assign(c.ranks.size(), 1.0);
  if (s.differential.size() > 0 && s.differential.imag().cwiseAbs().maxCoeff() > 0)
    throw std::invalid_argument("torsion: differential must be real");
  const Eigen::MatrixXd d = s.differential.real();
  std::vector<int> offsets{0};
  for (int r : c.ranks) offsets.push_back(offsets.back() + r);
  if (d.rows() != offsets.back() || d.cols() != offsets.back())
    throw std::invalid_argument("torsion: differential shape must match total rank");
  for (std::size_t p = 0; p + 1 < c.ranks.size(); ++p)
    c.d.push_back(d.block(offsets[p + 1], offsets[p], c.ranks[p + 1], c.ranks[p]));
  return c;
}

DualityComplex duality_complex_from(const InstanceSpec& s) {
  if (s.epsilon == 0) throw std::invalid_argument("spec needs a duality section");
  instances::DoubledData d =
      instances::doubled_data(s.epsilon, s.r0, s.r1, s.middle, s.seed, s.injective_w1);
  return instances::random_duality_complex(s.base_grid(), d, s.seed + 1, s.amplitude);
}

void add_cycle_pairings(Report& rep, const GridField& f, const std::string& name) {
  const BaseGrid& g = f.grid();
  if (g.dim >= 1) {
    rep.add_invariant(name + "_cycle0_re", cycle_pairing(f, {0}).real());
    rep.add_invariant(name + "_cycle0_im", cycle_pairing(f, {0}).imag());
  }
  if (g.dim >= 2) {
    rep.add_invariant(name + "_cycle1_re", cycle_pairing(f, {1}).real());
    rep.add_invariant(name + "_cycle01_re", cycle_pairing(f, {0, 1}).real());
  }
}

Report cmd_char_forms(const Options& opt) {
  InstanceSpec s = load(opt);
  Report rep;
  rep.command = "char-forms";
  rep.digest = spec_digest(s);
  FlatBundle fb = bundle_from(s);
  GridField c = fb.c_total();
  rep.add_invariant("c_total_max_norm", c.max_norm());
  add_cycle_pairings(rep, c, "c_total");
  rep.add_residual("f_minus_c_total", (f_form(fb) - c).max_norm(),
                   1e-10 * opt.tolerance_scale);
  return rep;
}

Report cmd_torsion(const Options& opt) {
  InstanceSpec s = load(opt);
  Report rep;
  rep.command = "torsion";
  rep.digest = spec_digest(s);
  BasedComplex c = based_complex_from(s);
  rep.add_invariant("torsion", reidemeister_torsion(c));
  rep.add_invariant("euler_characteristic", c.euler_characteristic());
  return rep;
}

Report cmd_torsion_form(const Options& opt) {
  InstanceSpec s = load(opt);
  Report rep;
  rep.command = "torsion-form";
  rep.digest = spec_digest(s);
  BaseGrid grid = s.base_grid();
  if (s.graded_ranks.empty())
    throw std::invalid_argument("torsion-form: spec needs complex.graded_ranks");
  FlatComplexBundle fc =
      s.holonomies.empty()
          ? instances::random_complex_bundle(grid, s.graded_ranks, s.seed)
          : FlatComplexBundle(FlatBundle(grid, s.holonomies), s.graded_ranks, s.differential);
  GridField tf = fc.torsion_form(s.t_min, s.t_max, s.tolerance);
  rep.add_invariant("torsion_form_scalar", tf.at(0).coeff(0)(0, 0).real());
  rep.add_invariant("torsion_form_max_norm", tf.max_norm());
  add_cycle_pairings(rep, tf, "torsion_form");
  GridField fe = f_form(fc.bundle(), fc.grading());
  auto hb = fc.cohomology_bundle();
  GridField fh = f_form(hb.bundle, hb.tau);
  rep.add_residual("transgression", (exterior_d(tf) - (fe - fh)).max_norm(),
                   1e-3 * opt.tolerance_scale);
  return rep;
}

Report cmd_p_form(const Options& opt) {
  InstanceSpec s = load(opt);
  Report rep;
  rep.command = "p-form";
  rep.digest = spec_digest(s);
  if (s.epsilon == 0) throw std::invalid_argument("p-form: spec needs a duality section");
  GridField p = s.graded_ranks.empty()
                    ? instances::random_duality_bundle(s.base_grid(), s.epsilon, s.r0, s.r1,
                                                       s.seed, s.amplitude)
                          .p_form()
                    : duality_complex_from(s).p_form();
  rep.add_invariant("p_form_max_norm", p.max_norm());
  add_cycle_pairings(rep, p, "p_form");
  double imag = 0.0;
  for (int n = 0; n < p.num_nodes(); ++n)
    for (const auto& [mask, c] : p.at(n).terms())
      imag = std::max(imag, c.imag().cwiseAbs().maxCoeff());
  rep.add_residual("p_form_imaginary_part", imag, 1e-9 * opt.tolerance_scale);
  return rep;
}

Report cmd_eta_form(const Options& opt) {
  InstanceSpec s = load(opt);
  Report rep;
  rep.command = "eta-form";
  rep.digest = spec_digest(s);
  DualityComplex dc = duality_complex_from(s);
  GridField eta = dc.eta_form(s.t_min, s.t_max, s.tolerance);
  rep.add_invariant("eta_form_scalar", eta.at(0).coeff(0)(0, 0).real());
  rep.add_invariant("eta_form_max_norm", eta.max_norm());
  add_cycle_pairings(rep, eta, "eta_form");
  DualityComplex h = dc.induced_duality();
  GridField rhs = dc.p_form() - h.p_form();
  rep.add_residual("eta_transgression", (exterior_d(eta) - rhs).max_norm(),
                   1e-3 * opt.tolerance_scale);
  return rep;
}

Report cmd_normal_form(const Options& opt) {
  InstanceSpec s = load(opt);
  Report rep;
  rep.command = "normal-form";
  rep.digest = spec_digest(s);
  std::vector<Eigen::MatrixXd> ms = real_blocks(s);
  if (ms.empty())
    throw std::invalid_argument("normal-form: spec needs the matrix in bundle.holonomies");
  SymplecticNormalForm nf = symplectic_normal_form(ms[0]);
  for (std::size_t i = 0; i < nf.angles.size(); ++i)
    rep.add_invariant("angle_" + std::to_string(i), nf.angles[i]);
  rep.add_invariant("hyperbolic_rank", nf.hyperbolic_rank);
  return rep;
}

Report cmd_pushforward_point(const Options& opt) {
  InstanceSpec s = load(opt);
  Report rep;
  rep.command = "pushforward-point";
  rep.digest = spec_digest(s);
  CWLocalSystem cw;
  if (s.kind == "point")
    cw = cw_point();
  else if (s.kind == "circle")
    cw = s.resolution[0] > 1 ? cw_circle_subdivided() : cw_circle();
  else if (s.kind == "torus")
    cw = cw_torus();
  else
    throw std::invalid_argument("pushforward-point: base kind must be point, circle or torus");
  std::vector<Eigen::MatrixXd> rho = real_blocks(s);
  const int fiber = s.rank > 0 ? s.rank : 1;
  if (cw.num_generators == 0) rho.clear();
  auto [r, n] = prop12_residual(cw, rho, 1.0, fiber);
  rep.add_invariant("euler_characteristic", cw.euler_characteristic());
  rep.add_residual("Z_component", static_cast<double>(std::abs(n)), 0.5);
  rep.add_residual("R_component", r, 1e-9 * opt.tolerance_scale);
  return rep;
}

Report cmd_verify(const Options& opt, const std::string& suite) {
  const auto& reg = verify::registry();
  auto it = reg.find(suite);
  if (it == reg.end()) {
    std::string names;
    for (const auto& [k, v] : reg) names += (names.empty() ? "" : ", ") + k;
    throw std::invalid_argument("verify: unknown suite '" + suite + "' (known: " + names + ")");
  }
  std::uint64_t seed = opt.seed_given ? opt.seed : 12345;
  if (!opt.spec_path.empty()) {
    InstanceSpec s = load_spec(opt.spec_path);
    if (s.has_seed && !opt.seed_given) seed = s.seed;
  }
  Report rep = it->second(opt.tolerance_scale, seed);
  if (!opt.spec_path.empty()) rep.digest = spec_digest(load_spec(opt.spec_path));
  return rep;
}

void emit(Report rep, const Options& opt, double seconds) {
  rep.seconds = seconds;
  const std::string payload = rep.to_json().dump(2) + "\n";
  if (opt.out_path.empty()) {
    std::cout << payload;
    return;
  }
  // Write atomically: temp file in place, then rename.
  const std::string tmp = opt.out_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output path '" + opt.out_path + "'");
    out << payload;
  }
  if (std::rename(tmp.c_str(), opt.out_path.c_str()) != 0)
    throw std::runtime_error("cannot move report into place at '" + opt.out_path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatinv: secondary invariants of flat bundles on discrete bases"};
  app.require_subcommand(1);
  Options opt;
  std::string suite;
  app.add_option("--spec", opt.spec_path, "instance spec file (JSON)");
  app.add_option("--out", opt.out_path, "write the report here instead of stdout");
  app.add_option("--tolerance-scale", opt.tolerance_scale, "scale all residual tolerances");
  app.add_option("--threads", opt.threads, "worker threads (computations are single-threaded)");
  auto* seed_opt = app.add_option("--seed", opt.seed, "override the spec seed");

  std::map<std::string, std::function<Report(const Options&)>> commands = {
      {"char-forms", cmd_char_forms},     {"torsion", cmd_torsion},
      {"torsion-form", cmd_torsion_form}, {"p-form", cmd_p_form},
      {"eta-form", cmd_eta_form},         {"normal-form", cmd_normal_form},
      {"pushforward-point", cmd_pushforward_point},
  };
  for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();
  CLI::App* ver = app.add_subcommand("verify", "run a named verification suite");
  ver->fallthrough();
  ver->add_option("suite", suite, "suite name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  opt.seed_given = seed_opt->count() > 0;

  try {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "verify")
      rep = cmd_verify(opt, suite);
    else
      rep = commands.at(cmd)(opt);
    const auto t1 = std::chrono::steady_clock::now();
    emit(rep, opt, std::chrono::duration<double>(t1 - t0).count());
    return rep.all_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
