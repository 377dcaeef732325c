#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "satgibbs/config_io.hpp"
#include "satgibbs/contours.hpp"
#include "satgibbs/enumeration.hpp"
#include "satgibbs/errors.hpp"
#include "satgibbs/model_config.hpp"
#include "satgibbs/parallel.hpp"
#include "satgibbs/peierls.hpp"
#include "satgibbs/polymer.hpp"
#include "satgibbs/sampler.hpp"

using namespace satgibbs;
using nlohmann::json;

namespace {

const std::vector<std::string> kSections = {"model", "sample", "scan", "contours", "peierls", "polymer", "critical"};

struct Globals {
  bool no_timestamp = false;
  unsigned threads = 0;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Tracks the resolved configuration of one command and writes its outputs.
class Output {
 public:
  Output(std::string command, const Globals& globals) : command_(std::move(command)), globals_(globals) {}

  void set_config(const KvConfig* cfg) { cfg_ = cfg; }
  void add_setting(const std::string& name, const std::string& value) { extra_ += name + " = " + value + "\n"; }

  std::string resolved() const { return (cfg_ ? cfg_->resolved() : std::string()) + extra_; }

  std::string csv_header() const {
    std::string out = "# satgibbs " SATGIBBS_VERSION "\n# command: " + command_ + "\n";
    if (!globals_.no_timestamp) out += "# generated: " + utc_now() + "\n";
    std::istringstream lines(resolved());
    std::string line;
    while (std::getline(lines, line)) out += "# config: " + line + "\n";
    return out;
  }

  json report() const {
    json j;
    j["schema"] = 1;
    j["command"] = command_;
    j["version"] = SATGIBBS_VERSION;
    if (!globals_.no_timestamp) j["generated"] = utc_now();
    json cfg = json::object();
    std::istringstream lines(resolved());
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["config"] = cfg;
    return j;
  }

  // Empty path: standard output.
  void write(const std::string& path, const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    require(out.good(), "cannot open output file " + path);
    out << text;
  }

  void write_csv(const std::string& path, const std::string& body) const { write(path, csv_header() + body); }
  void write_report(const std::string& path, const json& j) const { write(path, j.dump(2) + "\n"); }

 private:
  std::string command_;
  const Globals& globals_;
  const KvConfig* cfg_ = nullptr;
  std::string extra_;
};

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double rank0_root(double beta, double b0, double delta, int dim) {
  return std::log1p(std::exp(beta * b0)) / std::pow(delta, dim);
}

IndexSet volume_sites(const KvConfig& cfg, const std::string& section, int dim) {
  const int side = cfg.get_int(section, "side");
  require(side >= 1, section + ".side must be >= 1");
  return box_sites(dim, 0, side - 1);
}

void finish(const KvConfig& cfg, const std::string& section) {
  std::vector<std::string> tolerated;
  for (const auto& s : kSections)
    if (s != "model" && s != section) tolerated.push_back(s);
  cfg.reject_unknown({"model", section}, tolerated);
}

json window_json(const ActivityWindow& w) { return json{{"z_minus", w.lo}, {"z_plus", w.hi}}; }

int cmd_model_info(const std::string& config, double beta, Output& out) {
  const auto cfg = KvConfig::load(config);
  out.set_config(&cfg);
  const auto model = load_model(cfg);
  std::vector<std::string> tolerated(kSections.begin() + 1, kSections.end());
  cfg.reject_unknown({"model"}, tolerated);
  out.add_setting("beta", number(beta));
  require(beta >= 0.0, "beta must be nonnegative");

  const auto& sat = model->saturation();
  auto j = out.report();
  j["kind"] = to_string(model->kind());
  j["dimension"] = model->dim();
  j["delta"] = sat.delta;
  j["L"] = sat.L;
  j["b"] = sat.b;
  j["b0"] = sat.b0;
  j["range"] = model->range();
  j["reach"] = model->reach();
  j["exact"] = model->exact();
  j["saturation_issue"] = model->saturation_issue();
  j["beta"] = beta;
  j["window"] = window_json(critical_window(beta, sat.b, sat.b0, sat.delta, model->dim()));
  if (sat.b == 0.0) j["rank0_critical_activity"] = rank0_root(beta, sat.b0, sat.delta, model->dim());
  if (const auto* dil = dynamic_cast<const DilutedPairwise*>(model.get())) {
    const auto& p = dil->profile();
    j["C_phi"] = p.c_phi();
    j["R"] = p.R;
    j["R1"] = p.R1();
    j["R2"] = p.R2();
    const auto check = diluted_condition_check(p);
    j["condition"] = {{"pass", check.pass}, {"margin", check.margin}};
  }
  if (const auto* sur = dynamic_cast<const Surrogate*>(model.get())) {
    j["rho"] = sur->rho();
    j["table_patterns"] = sur->table().values().size();
  }
  out.write_report("", j);
  return 0;
}

SamplerOptions sampler_options(const KvConfig& cfg, const std::string& section) {
  SamplerOptions opt;
  opt.p_birth = cfg.get_double(section, "p_birth", opt.p_birth);
  opt.p_death = cfg.get_double(section, "p_death", opt.p_death);
  opt.jitter = cfg.get_double(section, "jitter", opt.jitter);
  opt.check_every = cfg.get_u64(section, "check_every", opt.check_every);
  opt.max_per_tile = cfg.get_u64(section, "max_per_tile", 0);
  return opt;
}

int cmd_sample(const std::string& config, const std::string& out_path, Output& out) {
  const auto cfg = KvConfig::load(config);
  out.set_config(&cfg);
  const std::string sec = "sample";
  const auto model = load_model(cfg);
  const auto lam = volume_sites(cfg, sec, model->dim());
  const int sharp = cfg.get_int(sec, "sharp", 0);
  const double z = cfg.get_double(sec, "z");
  const double beta = cfg.get_double(sec, "beta");
  const auto steps = cfg.get_u64(sec, "steps", 100000);
  const auto thin = cfg.get_u64(sec, "thin", 100);
  const auto seed = cfg.get_u64(sec, "seed", 1);
  auto opt = sampler_options(cfg, sec);
  opt.record_contours = cfg.get_bool(sec, "record_contours", false);
  const auto csv = out_path.empty() ? cfg.get_path(sec, "csv", std::string()) : out_path;
  const auto report = cfg.get_path(sec, "report", std::string());
  finish(cfg, sec);

  ChainState state(model, lam, sharp, z, beta, seed, opt);
  const auto trace = run_chain(state, steps, thin);
  out.write_csv(csv, trace_csv(trace));

  if (!report.empty() || !csv.empty()) {
    auto j = out.report();
    j["steps"] = state.steps();
    j["final_count"] = state.count();
    j["rows"] = trace.rows.size();
    const char* names[] = {"birth", "death", "translate"};
    for (int m = 0; m < 3; ++m)
      j["acceptance"][names[m]] = {{"proposed", trace.stats.proposed[m]},
                                   {"accepted", trace.stats.accepted[m]},
                                   {"rate", trace.stats.rate(static_cast<MoveKind>(m))}};
    std::vector<double> rho;
    for (const auto& r : trace.rows) rho.push_back(r.rho);
    const auto bm = batch_means(rho);
    j["rho_mean"] = bm.mean;
    j["rho_se"] = std::isfinite(bm.std_error) ? json(bm.std_error) : json(nullptr);
    out.write_report(report, j);
  }
  return 0;
}

int cmd_scan(const std::string& config, const std::string& out_path, Output& out) {
  const auto cfg = KvConfig::load(config);
  out.set_config(&cfg);
  const std::string sec = "scan";
  const auto model = load_model(cfg);
  const auto lam = volume_sites(cfg, sec, model->dim());
  const double beta = cfg.get_double(sec, "beta");
  const auto grid = cfg.get_doubles(sec, "z_grid");
  ScanOptions opt;
  opt.steps = cfg.get_u64(sec, "steps", opt.steps);
  opt.thin = cfg.get_u64(sec, "thin", opt.thin);
  opt.replicas = cfg.get_u64(sec, "replicas", opt.replicas);
  opt.burn_in = cfg.get_double(sec, "burn_in", opt.burn_in);
  opt.batches = cfg.get_u64(sec, "batches", opt.batches);
  opt.sampler = sampler_options(cfg, sec);
  const auto seed = cfg.get_u64(sec, "seed", 1);
  const auto csv = out_path.empty() ? cfg.get_path(sec, "csv", std::string()) : out_path;
  finish(cfg, sec);
  require(!grid.empty(), "scan.z_grid must be nonempty");

  const auto rows = hysteresis_scan(model, lam, beta, grid, opt, seed);
  out.write_csv(csv, scan_csv(rows));
  return 0;
}

Configuration load_configuration(const std::string& path, const Tiling& tiling, int side) {
  std::ifstream in(path);
  require(in.good(), "cannot open configuration file " + path);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    std::stringstream ss;
    ss << in.rdbuf();
    double delta = 0.0;
    auto config = configuration_from_json(ss.str(), &delta);
    require(std::abs(delta - tiling.delta()) <= 1e-12 * tiling.delta(), "configuration delta differs from the model's");
    return config;
  }
  require(side >= 1, "contours.side is needed to read a CSV configuration");
  const double d = tiling.delta();
  return read_configuration_csv(in, cube_window(tiling.dim(), -0.5 * d, (side - 0.5) * d));
}

int cmd_contours(const std::string& config, const std::string& input, Output& out) {
  const auto cfg = KvConfig::load(config);
  out.set_config(&cfg);
  const std::string sec = "contours";
  const auto model = load_model(cfg);
  const auto path = input.empty() ? cfg.get_path(sec, "input") : input;
  const int side = cfg.get_int(sec, "side", 0);
  const auto report = cfg.get_path(sec, "report", std::string());
  finish(cfg, sec);
  if (!input.empty()) out.add_setting("contours.input", input);

  const auto config_points = load_configuration(path, model->tiling(), side);
  const auto ex = configuration_contours(*model, config_points);
  auto j = out.report();
  j["points"] = config_points.size();
  j["external"] = ex.external;
  json list = json::array();
  for (const auto& g : ex.contours) {
    auto c = json::parse(contour_to_json(g, model->dim()));
    c["size"] = g.size();
    c["domino_ratio"] = domino_ratio(g);
    const auto full = peierls_gap(*model, config_points, g, GapVariant::full);
    const auto minus = peierls_gap(*model, config_points, g, GapVariant::minus_inner_boundary);
    c["gap"] = {{"full", full.value}, {"minus_inner_boundary", minus.value}, {"error", full.error + minus.error}};
    list.push_back(c);
  }
  j["contours"] = list;
  out.write_report(report, j);
  return 0;
}

int cmd_peierls(const std::string& config, const std::string& out_path, Output& out) {
  const auto cfg = KvConfig::load(config);
  out.set_config(&cfg);
  const std::string sec = "peierls";
  const auto model = load_model(cfg);
  const auto count = cfg.get_u64(sec, "corpus", 200);
  const int side = cfg.get_int(sec, "side_tiles", 10);
  const auto seed = cfg.get_u64(sec, "seed", 1);
  const auto variant_name = cfg.get_string(sec, "variant", to_string(GapVariant::minus_inner_boundary));
  const auto csv = out_path.empty() ? cfg.get_path(sec, "csv", std::string()) : out_path;
  const auto report = cfg.get_path(sec, "report", std::string());
  finish(cfg, sec);
  GapVariant variant;
  if (variant_name == to_string(GapVariant::full))
    variant = GapVariant::full;
  else if (variant_name == to_string(GapVariant::minus_inner_boundary))
    variant = GapVariant::minus_inner_boundary;
  else
    throw ValidationError("unknown gap variant: " + variant_name);

  const auto corpus = peierls_corpus(*model, count, side, seed);
  const auto rep = estimate_b_plus(*model, corpus, variant);
  auto j = out.report();
  j["model"] = rep.model;
  j["variant"] = to_string(rep.variant);
  j["configs"] = rep.configs;
  j["contours"] = rep.records.size();
  j["b_plus"] = rep.b_plus;
  j["b_plus_certified"] = rep.b_plus_certified;
  j["pass"] = rep.pass;
  if (!rep.records.empty()) {
    const auto& w = rep.records[rep.witness];
    j["witness"] = {{"config", w.config}, {"size", w.size}, {"gap", w.gap}, {"error", w.error}, {"ratio", w.ratio}};
  }
  out.write_report(report, j);
  if (!csv.empty()) {
    std::string body = "config,size,gap,error,ratio\n";
    char buf[160];
    for (const auto& r : rep.records) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.12g,%.12g,%.12g\n", r.config, r.size, r.gap, r.error, r.ratio);
      body += buf;
    }
    out.write_csv(csv, body);
  }
  return 0;
}

int cmd_check_condition(const std::string& phi, double R, int dim, std::size_t mc, std::uint64_t seed, bool truncate,
                        Output& out) {
  out.add_setting("phi", phi);
  out.add_setting("R", number(R));
  out.add_setting("dim", std::to_string(dim));
  PotentialProfile profile;
  profile.phi = load_radial_csv(phi);
  profile.R = R;
  profile.dim = dim;
  profile.validate(false);

  const auto check = diluted_condition_check(profile);
  auto j = out.report();
  j["pass"] = check.pass;
  j["margin"] = check.margin;
  j["core_term"] = check.core_term;
  j["shell_term"] = check.shell_term;
  j["negative_term"] = check.negative_term;
  j["R1"] = profile.R1();
  j["R2"] = profile.R2();
  if (mc > 0) {
    out.add_setting("mc_samples", std::to_string(mc));
    const auto est = diluted_condition_mc(profile, mc, seed);
    j["mc"] = {{"margin", est.margin.mean}, {"margin_se", est.margin.std_error}, {"seed", seed}};
  }
  if (truncate) {
    const auto search = find_truncation_epsilon(profile);
    j["truncation"] = {{"eps", search.eps}, {"margin", search.margin}, {"boundary", search.boundary}};
  }
  out.write_report("", j);
  return 0;
}

int cmd_polymer_verify(const std::string& config, Output& out) {
  const auto cfg = KvConfig::load(config);
  out.set_config(&cfg);
  const std::string sec = "polymer";
  const auto model = load_surrogate(cfg);
  const auto sites = volume_sites(cfg, sec, model->dim());
  const int sharp = cfg.get_int(sec, "sharp", 1);
  const double z = cfg.get_double(sec, "z");
  const double beta = cfg.get_double(sec, "beta");
  const double tol = cfg.get_double(sec, "tolerance", 1e-10);
  const auto report = cfg.get_path(sec, "report", std::string());
  finish(cfg, sec);
  require(sharp == 0 || sharp == 1, "polymer.sharp must be 0 or 1");

  const SurrogateSystem sys(model, z, beta);
  const auto vol = make_volume(sites, model->saturation().L, model->tiling());
  PolymerEngine engine;
  const auto cmp = polymer_development(engine, sys, vol, sharp);
  const double walls = model->dim() == 1 ? wall_contribution(sys, vol, sharp) : 0.0;
  const double corrected = std::abs(cmp.phi_direct - walls - cmp.phi_contour) / std::abs(cmp.phi_direct);

  auto j = out.report();
  j["phi_direct"] = cmp.phi_direct;
  j["phi_contour"] = cmp.phi_contour;
  j["rel_err"] = cmp.rel_err;
  j["contours_enumerated"] = cmp.contours;
  j["compatible_sets"] = cmp.sets;
  j["free_sites"] = cmp.free_sites;
  j["wall_contribution"] = walls;
  j["rel_err_wall_corrected"] = corrected;
  j["tolerance"] = tol;
  const bool pass = corrected <= tol;
  j["pass"] = pass;
  out.write_report(report, j);
  if (!pass) throw NumericalError("polymer identity off by " + number(corrected));
  return 0;
}

int cmd_critical(const std::string& config, const std::string& out_path, Output& out) {
  const auto cfg = KvConfig::load(config);
  out.set_config(&cfg);
  const std::string sec = "critical";
  const auto model = load_surrogate(cfg);
  const double beta = cfg.get_double(sec, "beta");
  const int rank = cfg.get_int(sec, "rank", 2);
  const auto sides = cfg.get_ints(sec, "box_ladder", std::vector<int>{10, 12, 14});
  const int points = cfg.get_int(sec, "grid_points", 20);
  const double tol = cfg.get_double(sec, "tolerance", 1e-8);
  const auto csv = out_path.empty() ? cfg.get_path(sec, "csv", std::string()) : out_path;
  const auto report = cfg.get_path(sec, "report", std::string());
  finish(cfg, sec);
  require(rank >= 0, "critical.rank must be >= 0");
  require(points >= 2, "critical.grid_points must be >= 2");
  require(!sides.empty(), "critical.box_ladder must be nonempty");

  const auto& tiling = model->tiling();
  const double L = model->saturation().L;
  const auto ladder = box_ladder(tiling.dim(), sides, L, tiling);
  const auto window = critical_window(beta, 0.0, model->b0(), tiling.delta(), tiling.dim());
  PolymerEngine engine;
  const SystemBuilder build = [&](double z) { return SurrogateSystem(model, z, beta); };

  std::vector<std::pair<double, double>> values;
  std::string body = "z,G\n";
  char buf[96];
  for (int k = 0; k < points; ++k) {
    const double z = window.lo + (window.hi - window.lo) * k / (points - 1);
    const double g = truncated_g(engine, build(z), rank, ladder);
    values.emplace_back(z, g);
    std::snprintf(buf, sizeof buf, "%.15g,%.15g\n", z, g);
    body += buf;
  }
  const auto br = bracket_critical_activity(engine, build, window.lo, window.hi, rank, tol, ladder);

  auto j = out.report();
  j["z_minus"] = window.lo;
  j["z_plus"] = window.hi;
  j["z_c_interval"] = {br.lo, br.hi};
  j["rank"] = rank;
  j["box_ladder"] = sides;
  j["G_values"] = values;
  j["rank0_root"] = rank0_root(beta, model->b0(), tiling.delta(), tiling.dim());
  out.write_report(report, j);
  if (!csv.empty()) out.write_csv(csv, body);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saturated Gibbs point processes: sampling, contours, Peierls diagnostics and polymer checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals globals;
  app.add_flag("--no-timestamp", globals.no_timestamp, "Omit generation times so outputs are byte-identical");
  app.add_option("--threads", globals.threads, "Worker cap (default: SATGIBBS_THREADS or hardware concurrency)")
      ->check(CLI::PositiveNumber);

  std::string config, out_path, input, phi;
  double beta = 1.0, R = 1.0;
  int dim = 2;
  std::size_t mc = 0;
  std::uint64_t seed = 1;
  bool truncate = false;

  auto* info = app.add_subcommand("model-info", "Model constants, defaults and the activity window");
  info->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  info->add_option("--beta", beta, "Inverse temperature for the window");

  auto* sample = app.add_subcommand("sample", "Run one chain and write the trace CSV");
  sample->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  sample->add_option("--out", out_path, "Trace CSV path (overrides sample.csv)");

  auto* scan = app.add_subcommand("scan", "Hysteresis scan over an activity grid for both boundary conditions");
  scan->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  scan->add_option("--out", out_path, "Scan CSV path (overrides scan.csv)");

  auto* contours = app.add_subcommand("contours", "Contours of a configuration with their gaps");
  contours->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  contours->add_option("--input", input, "Configuration CSV or JSON (overrides contours.input)");

  auto* peierls = app.add_subcommand("peierls", "Estimate b_plus on a contour corpus");
  peierls->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  peierls->add_option("--out", out_path, "Per-contour CSV path (overrides peierls.csv)");

  auto* check = app.add_subcommand("check-condition", "Diluted-pairwise sufficient condition for a tabulated potential");
  check->add_option("--phi", phi, "Potential CSV (radius,value)")->required()->check(CLI::ExistingFile);
  check->add_option("--R", R, "Dilution radius")->required();
  check->add_option("--dim", dim, "Dimension");
  check->add_option("--mc", mc, "Monte Carlo samples per term (0 disables)");
  check->add_option("--seed", seed, "Monte Carlo seed");
  check->add_flag("--truncate", truncate, "Also search for a truncation radius");

  auto* verify = app.add_subcommand("polymer-verify", "Compare the direct and contour sums on the surrogate");
  verify->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  auto* critical = app.add_subcommand("critical", "Truncated pressure difference and critical bracketing");
  critical->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  critical->add_option("--out", out_path, "(z, G) CSV path (overrides critical.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (globals.threads) set_thread_limit(globals.threads);
  auto* sub = app.get_subcommands().front();
  Output out(sub->get_name(), globals);
  try {
    if (sub == info) return cmd_model_info(config, beta, out);
    if (sub == sample) return cmd_sample(config, out_path, out);
    if (sub == scan) return cmd_scan(config, out_path, out);
    if (sub == contours) return cmd_contours(config, input, out);
    if (sub == peierls) return cmd_peierls(config, out_path, out);
    if (sub == check) return cmd_check_condition(phi, R, dim, mc, seed, truncate, out);
    if (sub == verify) return cmd_polymer_verify(config, out);
    if (sub == critical) return cmd_critical(config, out_path, out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ContourError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
