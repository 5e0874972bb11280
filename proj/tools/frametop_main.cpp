// frametop: command-line driver for the tight-frame topology toolkit.
//
// Subcommands: construct, check, strata, retract, connect, contract-loop,
// winding, acceptance.  Every output file embeds a provenance header (seed,
// flags, version) and all randomness is derived from the run seed, so a rerun
// with the same flags produces byte-identical files.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frametop/frametop.hpp"
#include "frametop/io.hpp"

namespace fs = std::filesystem;
using frametop::io::json;

namespace {

struct GlobalOpts {
  uint64_t seed = 20260814;
  double tol_alg = frametop::tol::alg;
  double f_tol = 1e-12;
  double grad_tol = 1e-9;
  std::string out_dir = ".";
  int jobs = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw frametop::ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

fs::path resolve_out(const GlobalOpts& g, const std::string& name) {
  fs::path p(name);
  return p.is_absolute() ? p : fs::path(g.out_dir) / p;
}

// --d accepts a comma-separated list, a JSON array file, or a JSON object
// file {"k":…, "d":[…]} (which also fixes k).
struct DiagonalArg {
  frametop::RealVector d;
  std::optional<int> k;
};

DiagonalArg parse_diagonal(const std::string& arg) {
  DiagonalArg out;
  if (fs::exists(arg) && fs::is_regular_file(arg)) {
    const json j = frametop::io::parse_text(read_file(arg));
    if (j.is_array()) {
      out.d.resize(j.size());
      for (size_t i = 0; i < j.size(); ++i) {
        if (!j.at(i).is_number())
          throw frametop::ParseError("d entries must be numbers in " + arg);
        out.d(i) = j.at(i).get<double>();
      }
    } else {
      const frametop::NormVector nv = frametop::io::normvector_from_json(j);
      out.d = nv.d;
      out.k = nv.k;
    }
    return out;
  }
  std::vector<double> vals;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw frametop::ParseError("cannot parse --d entry '" + tok + "'");
    }
  }
  if (vals.empty()) throw frametop::ParseError("--d is empty");
  out.d = Eigen::Map<frametop::RealVector>(vals.data(), vals.size());
  return out;
}

frametop::NormVector resolve_norm_vector(const DiagonalArg& arg,
                                         std::optional<int> k_flag) {
  frametop::NormVector nv;
  nv.d = arg.d;
  if (k_flag && arg.k && *k_flag != *arg.k)
    throw frametop::ParseError("--k disagrees with the k stored in the d file");
  if (k_flag) nv.k = *k_flag;
  else if (arg.k) nv.k = *arg.k;
  else nv.k = static_cast<int>(std::lround(arg.d.sum()));
  return nv;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json flow_config_json(const frametop::FlowConfig& cfg) {
  return json{{"step0", cfg.step0},
              {"max_iter", cfg.max_iter},
              {"f_tol", cfg.f_tol},
              {"grad_tol", cfg.grad_tol}};
}

// ---------------------------------------------------------------- construct
int cmd_construct(const GlobalOpts& g, const std::string& d_arg,
                  std::optional<int> k_flag, const std::string& out_name) {
  const frametop::NormVector nv = resolve_norm_vector(parse_diagonal(d_arg), k_flag);
  if (!frametop::in_polytope(nv, g.tol_alg))
    throw frametop::NotInPolytope("d is not a valid diagonal target for k=" +
                                  std::to_string(nv.k));
  const frametop::Frame f =
      frametop::construct_frame(nv, frametop::Rng::derive(g.seed, "construct"));
  const frametop::MembershipReport rep = frametop::verify_membership(f, nv);
  json out = frametop::io::frame_to_json(f);
  const json config{{"cmd", "construct"},
                    {"d", frametop::io::normvector_to_json(nv)},
                    {"tol_alg", g.tol_alg}};
  out["provenance"] = frametop::io::provenance(g.seed, config);
  write_file(resolve_out(g, out_name), dump(out));
  std::printf("%s", dump(json{{"out", out_name},
                              {"tight_residual", rep.tight_residual},
                              {"max_norm_residual", rep.max_norm_residual}})
                        .c_str());
  return 0;
}

// -------------------------------------------------------------------- check
int cmd_check(const GlobalOpts& g, const std::string& d_arg,
              std::optional<int> k_flag) {
  const frametop::NormVector nv = resolve_norm_vector(parse_diagonal(d_arg), k_flag);
  const bool inside = frametop::in_polytope(nv, g.tol_alg);
  json out{{"n", nv.n()}, {"k", nv.k}, {"in_polytope", inside}};
  if (nv.k >= 0 && nv.k <= nv.n()) {
    out["min_subset_sum"] = frametop::min_subset_sum(nv);
    out["satisfies_hypothesis"] =
        inside && frametop::satisfies_hypothesis(nv, g.tol_alg);
  } else {
    out["min_subset_sum"] = nullptr;
    out["satisfies_hypothesis"] = false;
  }
  std::printf("%s", dump(out).c_str());
  return 0;
}

// ------------------------------------------------------------------- strata
int cmd_strata(const GlobalOpts& g, const std::string& d_arg,
               std::optional<int> k_flag, int max_n, const std::string& out_name) {
  const frametop::NormVector nv = resolve_norm_vector(parse_diagonal(d_arg), k_flag);
  if (nv.n() > max_n)
    throw frametop::TooLarge("n=" + std::to_string(nv.n()) +
                             " exceeds --max-n=" + std::to_string(max_n));
  const auto strata = frametop::enumerate_strata(nv, g.tol_alg);

  auto join = [](const auto& vals, auto tostr) {
    std::string s;
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i) s += ";";
      s += tostr(vals[i]);
    }
    return s;
  };
  std::string csv = frametop::io::csv_provenance(
      g.seed, "cmd=strata max_n=" + std::to_string(max_n));
  csv += "blocks,capacities,alphas,a,codim_complex,energy_level\n";
  for (const auto& desc : strata) {
    csv += join(desc.blocks, [](const std::vector<int>& b) {
      std::string s;
      for (size_t i = 0; i < b.size(); ++i)
        s += (i ? " " : "") + std::to_string(b[i]);
      return s;
    });
    csv += "," + join(desc.capacities, [](int c) { return std::to_string(c); });
    csv += "," + join(std::vector<double>(desc.levels.data(),
                                          desc.levels.data() + desc.levels.size()),
                      frametop::io::format_double);
    csv += "," + join(std::vector<double>(desc.shift.data(),
                                          desc.shift.data() + desc.shift.size()),
                      frametop::io::format_double);
    csv += "," + std::to_string(desc.codim_complex);
    csv += "," + frametop::io::format_double(desc.energy_level()) + "\n";
  }
  write_file(resolve_out(g, out_name), csv);

  json summary{{"descriptors", strata.size()}, {"out", out_name}};
  try {
    summary["min_positive_codim"] = frametop::min_positive_codim(nv);
  } catch (const frametop::InfeasibleDescriptor&) {
    summary["min_positive_codim"] = nullptr;
  }
  std::printf("%s", dump(summary).c_str());
  return 0;
}

// ------------------------------------------------------------------ retract
int cmd_retract(const GlobalOpts& g, const std::string& frame_path,
                const std::string& d_arg, std::optional<int> k_flag,
                double step0, int max_iter, const std::string& out_name,
                const std::string& proj_name) {
  const frametop::Frame f =
      frametop::io::frame_from_json(frametop::io::parse_text(read_file(frame_path)));
  const frametop::NormVector nv = resolve_norm_vector(parse_diagonal(d_arg), k_flag);
  frametop::FlowConfig cfg;
  cfg.step0 = step0;
  cfg.max_iter = max_iter;
  cfg.f_tol = g.f_tol;
  cfg.grad_tol = g.grad_tol;
  const frametop::FlowResult res =
      frametop::retract_to_level(frametop::gram_projection(f), nv, cfg);

  std::string csv = frametop::io::csv_provenance(
      g.seed, "cmd=retract " + flow_config_json(cfg).dump());
  csv += "iter,f,gradnorm,step\n";
  for (const auto& row : res.trace)
    csv += std::to_string(row.iter) + "," + frametop::io::format_double(row.f) +
           "," + frametop::io::format_double(row.gradnorm) + "," +
           frametop::io::format_double(row.step) + "\n";
  write_file(resolve_out(g, out_name), csv);

  if (!proj_name.empty()) {
    json pj = frametop::io::projection_to_json(res.p);
    pj["provenance"] = frametop::io::provenance(
        g.seed, json{{"cmd", "retract"}, {"flow", flow_config_json(cfg)}});
    write_file(resolve_out(g, proj_name), dump(pj));
  }
  std::printf("%s", dump(json{{"outcome", frametop::to_string(res.outcome)},
                              {"iterations", res.iterations},
                              {"f_final", res.f_final},
                              {"grad_final", res.grad_final},
                              {"trace", out_name}})
                        .c_str());
  return 0;
}

// ------------------------------------------------------------------ connect
int cmd_connect(const GlobalOpts& g, const std::string& f0_path,
                const std::string& f1_path, const std::string& d_arg,
                std::optional<int> k_flag, const std::string& out_name,
                const std::string& csv_name) {
  const frametop::Frame f0 =
      frametop::io::frame_from_json(frametop::io::parse_text(read_file(f0_path)));
  const frametop::Frame f1 =
      frametop::io::frame_from_json(frametop::io::parse_text(read_file(f1_path)));
  const frametop::NormVector nv = resolve_norm_vector(parse_diagonal(d_arg), k_flag);
  frametop::HomotopyConfig cfg;
  cfg.flow.f_tol = g.f_tol;
  cfg.flow.grad_tol = g.grad_tol;
  cfg.flow.record_trace = false;
  cfg.seed = frametop::Rng::derive(g.seed, "connect");
  const frametop::ConnectResult path = frametop::connect_frames(f0, f1, nv, cfg);

  double max_residual = 0.0, max_step = 0.0;
  std::string csv = frametop::io::csv_provenance(g.seed, "cmd=connect");
  csv += "sample,level_residual,step\n";
  for (size_t i = 0; i < path.frames.size(); ++i) {
    const auto rep = frametop::verify_membership(path.frames[i], nv);
    const double residual = std::max(rep.tight_residual, rep.max_norm_residual);
    const double step =
        i == 0 ? 0.0 : (path.frames[i].m - path.frames[i - 1].m).norm();
    max_residual = std::max(max_residual, residual);
    max_step = std::max(max_step, step);
    csv += std::to_string(i) + "," + frametop::io::format_double(residual) + "," +
           frametop::io::format_double(step) + "\n";
  }
  write_file(resolve_out(g, csv_name), csv);

  json out = frametop::io::loop_to_json(nv, path.frames);
  out["provenance"] = frametop::io::provenance(g.seed, json{{"cmd", "connect"}});
  write_file(resolve_out(g, out_name), dump(out));

  std::printf("%s", dump(json{{"frames", path.frames.size()},
                              {"max_level_residual", max_residual},
                              {"max_step", max_step},
                              {"path", out_name},
                              {"samples", csv_name}})
                        .c_str());
  return 0;
}

// -------------------------------------------------------------- contract-loop
int cmd_contract_loop(const GlobalOpts& g, const std::string& loop_path,
                      int grid_s, const std::string& report_name,
                      const std::string& csv_name) {
  const frametop::io::LoopData data =
      frametop::io::loop_from_json(frametop::io::parse_text(read_file(loop_path)));
  frametop::ProjectionPath loop;
  loop.d = data.d;
  if (data.frame_samples)
    for (const auto& f : data.frames)
      loop.samples.push_back(frametop::gram_projection(f));
  else
    loop.samples = data.projections;
  frametop::detail::finalize_path_stats(loop);

  frametop::HomotopyConfig cfg;
  cfg.grid_s = grid_s;
  cfg.flow.f_tol = g.f_tol;
  cfg.flow.grad_tol = g.grad_tol;
  cfg.flow.record_trace = false;
  cfg.seed = frametop::Rng::derive(g.seed, "contract-loop");
  const frametop::HomotopyReport rep = frametop::contract_loop(loop, cfg);

  std::string csv = frametop::io::csv_provenance(
      g.seed, "cmd=contract-loop grid_s=" + std::to_string(grid_s));
  csv += "s,t,level_residual\n";
  for (size_t s = 0; s < rep.grid.size(); ++s)
    for (size_t t = 0; t < rep.grid[s].size(); ++t)
      csv += std::to_string(s) + "," + std::to_string(t) + "," +
             frametop::io::format_double(
                 std::sqrt(frametop::energy(rep.grid[s][t], loop.d))) +
             "\n";
  write_file(resolve_out(g, csv_name), csv);

  const json summary{{"success", rep.success},
                     {"max_level_residual", rep.max_level_residual},
                     {"critical_hits", rep.critical_hits},
                     {"nonconverged", rep.nonconverged},
                     {"cut_locus_columns", rep.cut_locus_columns},
                     {"basepoint_residual", rep.basepoint_residual},
                     {"max_grid_step", rep.max_grid_step},
                     {"grid", csv_name}};
  json report = summary;
  report["provenance"] = frametop::io::provenance(
      g.seed, json{{"cmd", "contract-loop"}, {"grid_s", grid_s}});
  write_file(resolve_out(g, report_name), dump(report));
  std::printf("%s", dump(summary).c_str());
  return 0;
}

// ------------------------------------------------------------------ winding
int cmd_winding(const GlobalOpts& g, const std::string& loop_path,
                const std::string& mode, const std::string& csv_name) {
  const frametop::io::LoopData data =
      frametop::io::loop_from_json(frametop::io::parse_text(read_file(loop_path)));
  frametop::WindingInvariant inv;
  std::string csv = frametop::io::csv_provenance(g.seed, "cmd=winding mode=" + mode);
  if (mode == "cp1") {
    if (!data.frame_samples)
      throw frametop::ParseError("cp1 winding expects frame samples");
    inv = frametop::winding_cp1(data.frames);
    csv += "sample,phase\n";
    for (size_t i = 0; i < data.frames.size(); ++i) {
      const auto& m = data.frames[i].m;
      csv += std::to_string(i) + "," +
             frametop::io::format_double(std::arg(m(0, 1) * std::conj(m(0, 0)))) +
             "\n";
    }
  } else if (mode == "ex53") {
    std::vector<frametop::ProjectionMatrix> samples;
    if (data.frame_samples)
      for (const auto& f : data.frames)
        samples.push_back(frametop::gram_projection(f));
    else
      samples = data.projections;
    inv = frametop::torus_invariant_ex53(samples);
    csv += "sample,phase2,phase3\n";
    for (size_t i = 0; i < samples.size(); ++i) {
      const Eigen::Vector3cd v = frametop::detail::ex53_line(samples[i]);
      csv += std::to_string(i) + "," +
             frametop::io::format_double(std::arg(v(1))) + "," +
             frametop::io::format_double(std::arg(v(2))) + "\n";
    }
  } else {
    throw frametop::ParseError("--mode must be cp1 or ex53");
  }
  write_file(resolve_out(g, csv_name), csv);
  std::printf("%s", dump(json{{"components", inv.components},
                              {"mode", mode},
                              {"samples", csv_name}})
                        .c_str());
  return 0;
}

// --------------------------------------------------------------- acceptance
int cmd_acceptance(const GlobalOpts& g, const std::string& only,
                   const std::string& csv_name) {
  frametop::acceptance::Options opts;
  opts.seed = g.seed;
  opts.jobs = g.jobs;
  opts.only = only;
  const auto results = frametop::acceptance::run(opts);

  std::string csv = frametop::io::csv_provenance(g.seed, "cmd=acceptance only=" + only);
  csv += "id,name,pass,seconds,details\n";
  bool all_pass = !results.empty();
  for (const auto& r : results) {
    std::printf("[%2d] %-22s %s  (%.1fs)  %s\n", r.id, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds, r.details.c_str());
    csv += std::to_string(r.id) + "," + r.name + "," +
           (r.pass ? "true" : "false") + "," +
           frametop::io::format_double(r.seconds) + ",\"" + r.details + "\"\n";
    all_pass = all_pass && r.pass;
  }
  write_file(resolve_out(g, csv_name), csv);
  std::printf("%s\n", all_pass ? "ALL PASS" : "FAILURES PRESENT");
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tight-frame topology toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  if (const char* env = std::getenv("FRAMETOP_SEED")) {
    try {
      g.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::fprintf(stderr, "{\"error\":\"ParseError\",\"message\":\"bad FRAMETOP_SEED\"}\n");
      return 2;
    }
  }
  app.add_option("--seed", g.seed, "run seed (default: FRAMETOP_SEED or 20260814)");
  app.add_option("--tol-alg", g.tol_alg, "algebraic residual tolerance");
  app.add_option("--f-tol", g.f_tol, "flow energy tolerance");
  app.add_option("--grad-tol", g.grad_tol, "flow gradient tolerance");
  app.add_option("--out-dir", g.out_dir, "directory for output files");
  app.add_option("--jobs", g.jobs, "worker threads for batch drivers");

  std::string d_arg, frame_path, f0_path, f1_path, loop_path;
  std::string mode = "cp1", only;
  std::string construct_out = "frame.json", strata_out = "strata.csv";
  std::string retract_out = "trace.csv", retract_proj;
  std::string connect_out = "connect_path.json", connect_csv = "connect_samples.csv";
  std::string contract_out = "contract_report.json", contract_csv = "contract_grid.csv";
  std::string winding_csv = "winding.csv", acceptance_csv = "acceptance.csv";
  int k_flag = -1, max_n = 9, max_iter = 5000, grid_s = 32;
  double step0 = 0.5;
  auto k_opt = [&](CLI::App* cmd) {
    cmd->add_option("--k", k_flag, "rank (default: round(sum d) or the d file's k)");
  };

  CLI::App* construct = app.add_subcommand("construct", "synthesize a frame with prescribed column norms");
  construct->add_option("--d", d_arg, "diagonal target (comma list or JSON file)")->required();
  k_opt(construct);
  construct->add_option("--out", construct_out, "output frame JSON");

  CLI::App* check = app.add_subcommand("check", "report polytope membership and the subset-sum hypothesis");
  check->add_option("--d", d_arg, "diagonal target")->required();
  k_opt(check);

  CLI::App* strata = app.add_subcommand("strata", "enumerate critical stratum descriptors");
  strata->add_option("--d", d_arg, "diagonal target")->required();
  k_opt(strata);
  strata->add_option("--max-n", max_n, "refuse larger problems");
  strata->add_option("--out", strata_out, "output CSV");

  CLI::App* retract = app.add_subcommand("retract", "gradient-flow a projection onto the level set");
  retract->add_option("--frame", frame_path, "input frame JSON")->required();
  retract->add_option("--d", d_arg, "diagonal target")->required();
  k_opt(retract);
  retract->add_option("--step0", step0, "initial step size");
  retract->add_option("--max-iter", max_iter, "iteration cap");
  retract->add_option("--out", retract_out, "trace CSV");
  retract->add_option("--out-projection", retract_proj, "optional retracted projection JSON");

  CLI::App* connect = app.add_subcommand("connect", "build a level-set path between two frames");
  connect->add_option("--f0", f0_path, "first frame JSON")->required();
  connect->add_option("--f1", f1_path, "second frame JSON")->required();
  connect->add_option("--d", d_arg, "diagonal target")->required();
  k_opt(connect);
  connect->add_option("--out", connect_out, "path JSON");
  connect->add_option("--out-csv", connect_csv, "per-sample CSV");

  CLI::App* contract = app.add_subcommand("contract-loop", "contract a level-set loop to its basepoint");
  contract->add_option("--loop", loop_path, "loop JSON")->required();
  contract->add_option("--grid-s", grid_s, "contraction steps");
  contract->add_option("--out", contract_out, "report JSON");
  contract->add_option("--out-csv", contract_csv, "grid residual CSV");

  CLI::App* winding = app.add_subcommand("winding", "integer winding invariants of a loop");
  winding->add_option("--loop", loop_path, "loop JSON")->required();
  winding->add_option("--mode", mode, "cp1 or ex53");
  winding->add_option("--out", winding_csv, "phase CSV");

  CLI::App* acceptance = app.add_subcommand("acceptance", "run the acceptance suite");
  acceptance->add_option("--only", only, "substring filter on criterion names");
  acceptance->add_option("--out", acceptance_csv, "summary CSV");

  // allow the global flags to appear after the subcommand name too
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    std::optional<int> k = k_flag >= 0 ? std::optional<int>(k_flag) : std::nullopt;
    if (*construct) return cmd_construct(g, d_arg, k, construct_out);
    if (*check) return cmd_check(g, d_arg, k);
    if (*strata) return cmd_strata(g, d_arg, k, max_n, strata_out);
    if (*retract)
      return cmd_retract(g, frame_path, d_arg, k, step0, max_iter, retract_out, retract_proj);
    if (*connect) return cmd_connect(g, f0_path, f1_path, d_arg, k, connect_out, connect_csv);
    if (*contract) return cmd_contract_loop(g, loop_path, grid_s, contract_out, contract_csv);
    if (*winding) return cmd_winding(g, loop_path, mode, winding_csv);
    if (*acceptance) return cmd_acceptance(g, only, acceptance_csv);
  } catch (const frametop::Error& e) {
    const json err{{"error", e.code()}, {"message", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 2;
  } catch (const std::exception& e) {
    const json err{{"error", "Internal"}, {"message", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
  return 1;
}
