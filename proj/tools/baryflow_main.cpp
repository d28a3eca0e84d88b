// baryflow: generate instances, solve multi-marginal transport with the
// infimal convolution cost, export barycentre flows, and run the
// verification harness.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "baryflow/dynflow.hpp"
#include "baryflow/error.hpp"
#include "baryflow/generate.hpp"
#include "baryflow/io.hpp"
#include "baryflow/mmot.hpp"
#include "baryflow/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitError = 2;

struct CommonFlags {
  std::vector<std::string> files;
  double p = 2.0;
  std::size_t max_grid = baryflow::kDefaultMaxGrid;
  std::string out_dir;
};

struct GenerateFlags {
  std::uint64_t seed = 1;
  std::size_t marginals = 3;
  std::size_t atoms = 4;
  std::size_t dim = 2;
  std::string distribution = "uniform-box";
};

std::vector<baryflow::DiscreteMeasure> load(const std::vector<std::string>& files) {
  std::vector<baryflow::DiscreteMeasure> mus;
  mus.reserve(files.size());
  for (const auto& f : files) mus.push_back(baryflow::read_measure(f));
  return mus;
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw baryflow::Error(baryflow::ErrorCode::IoError, "cannot create " + dir);
  return fs::path(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw baryflow::Error(baryflow::ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

ordered_json point_json(const baryflow::Point& x) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

int run_generate(const GenerateFlags& g, const std::string& out_dir) {
  baryflow::InstanceSpec spec;
  spec.seed = g.seed;
  spec.marginals = g.marginals;
  spec.atoms = g.atoms;
  spec.dim = g.dim;
  spec.distribution = baryflow::parse_distribution(g.distribution);
  const auto mus = baryflow::generate_instance(spec);

  if (out_dir.empty()) {
    ordered_json j;
    j["measures"] = ordered_json::array();
    for (const auto& m : mus) j["measures"].push_back(baryflow::to_json(m));
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  const fs::path dir = ensure_dir(out_dir);
  ordered_json files = ordered_json::array();
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const fs::path path = dir / ("mu_" + std::to_string(i + 1) + ".json");
    baryflow::write_measure(path, mus[i]);
    files.push_back(path.string());
  }
  std::cout << ordered_json{{"files", files}}.dump(2) << '\n';
  return 0;
}

int run_solve(const CommonFlags& c, double inner_tol, double entropic_eps) {
  const auto mus = load(c.files);
  const baryflow::Exponent p(c.p);
  baryflow::MmotOptions options;
  options.max_grid = c.max_grid;
  options.infconv.tol = inner_tol;
  const auto res = baryflow::solve_mmot(mus, p, options);
  const auto barycenter = baryflow::extract_barycenter(res);

  ordered_json j;
  j["p"] = c.p;
  j["value"] = res.value;
  j["barycenter"] = baryflow::to_json(barycenter);
  ordered_json plan = ordered_json::array();
  for (std::size_t e = 0; e < res.plan.entries.size(); ++e) {
    ordered_json row;
    row["index"] = res.plan.entries[e].index;
    row["mass"] = res.plan.entries[e].mass;
    row["z_bar"] = point_json(res.tuple_barycenters[e]);
    row["cost"] = res.tuple_costs[e];
    plan.push_back(std::move(row));
  }
  j["plan"] = std::move(plan);
  j["duals"] = res.duals;

  if (entropic_eps > 0.0) {
    baryflow::EntropicOptions eo;
    eo.epsilon = entropic_eps;
    ordered_json entropic = ordered_json::array();
    for (const auto& mu : mus) {
      entropic.push_back(baryflow::solve_pairwise_entropic(barycenter, mu, p, eo).value);
    }
    j["entropic_pairwise"] = std::move(entropic);
  }

  if (!c.out_dir.empty()) {
    const fs::path dir = ensure_dir(c.out_dir);
    write_text(dir / "solution.json", j.dump(2) + "\n");
    std::ofstream csv(dir / "barycenter.csv");
    baryflow::write_measure_csv(csv, barycenter);
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_flow(const CommonFlags& c, int frames) {
  const auto mus = load(c.files);
  const baryflow::Exponent p(c.p);
  baryflow::MmotOptions options;
  options.max_grid = c.max_grid;
  const auto res = baryflow::solve_mmot(mus, p, options);
  const auto flow = baryflow::build_dc_flow(res);
  const auto ps = baryflow::build_ps_flow(flow);
  const auto times = baryflow::frame_times(frames);

  std::ostringstream dc_csv, ps_csv;
  baryflow::write_dc_frames(dc_csv, flow, times);
  baryflow::write_ps_frames(ps_csv, ps, times);

  ordered_json j;
  j["p"] = c.p;
  j["C"] = res.value;
  j["dc_action"] = baryflow::dc_action(flow);
  j["ps_action"] = baryflow::ps_action(ps);
  j["times"] = times;
  if (c.out_dir.empty()) {
    j["dc_frames_csv"] = dc_csv.str();
    j["ps_frames_csv"] = ps_csv.str();
  } else {
    const fs::path dir = ensure_dir(c.out_dir);
    write_text(dir / "frames_dc.csv", dc_csv.str());
    write_text(dir / "frames_ps.csv", ps_csv.str());
    j["files"] = {(dir / "frames_dc.csv").string(), (dir / "frames_ps.csv").string()};
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_verify(const CommonFlags& c, double value_tol, const GenerateFlags& g, bool generated) {
  std::vector<baryflow::DiscreteMeasure> mus;
  if (generated) {
    baryflow::InstanceSpec spec;
    spec.seed = g.seed;
    spec.marginals = g.marginals;
    spec.atoms = g.atoms;
    spec.dim = g.dim;
    spec.distribution = baryflow::parse_distribution(g.distribution);
    mus = baryflow::generate_instance(spec);
  } else {
    mus = load(c.files);
  }
  baryflow::VerifyOptions options;
  options.value_tol = value_tol;
  options.mmot.max_grid = c.max_grid;
  const auto report = baryflow::verify_instance(mus, baryflow::Exponent(c.p), options);
  const std::string text = baryflow::to_json(report).dump(2);
  if (!c.out_dir.empty()) write_text(ensure_dir(c.out_dir) / "report.json", text + "\n");
  std::cout << text << '\n';
  if (const auto failed = report.first_failure()) {
    std::cerr << "verification failed: " << *failed << '\n';
    return kExitChecksFailed;
  }
  return 0;
}

void add_common(CLI::App* cmd, CommonFlags& c, bool files_required) {
  auto* files = cmd->add_option("files", c.files, "Measure JSON files, one per marginal")
                    ->check(CLI::ExistingFile);
  if (files_required) files->required();
  cmd->add_option("--p", c.p, "Transport exponent, 1 < p < inf")->capture_default_str();
  cmd->add_option("--max-grid", c.max_grid, "Cap on the product-grid size")
      ->capture_default_str();
  cmd->add_option("--out", c.out_dir, "Write results into this directory");
}

void add_generate_flags(CLI::App* cmd, GenerateFlags& g) {
  cmd->add_option("--seed", g.seed, "64-bit seed")->capture_default_str();
  cmd->add_option("-N,--marginals", g.marginals, "Number of measures")
      ->check(CLI::Range(std::size_t{2}, std::size_t{64}))
      ->capture_default_str();
  cmd->add_option("-n,--atoms", g.atoms, "Atoms per measure")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("-d,--dim", g.dim, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--distribution", g.distribution, "uniform-box | gaussian")
      ->check(CLI::IsMember({"uniform-box", "gaussian"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-marginal optimal transport, barycentres and their dynamical flows"};
  app.require_subcommand(1);

  GenerateFlags gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write N random measures");
  add_generate_flags(generate, gen);
  generate->add_option("--out", gen_out, "Directory for mu_1.json ... mu_N.json");

  CommonFlags solve_flags;
  double solve_tol = 1e-10;
  double entropic_eps = 0.0;
  auto* solve = app.add_subcommand("solve", "Solve the multi-marginal problem");
  add_common(solve, solve_flags, true);
  solve->add_option("--tol", solve_tol, "Inner minimizer stationarity tolerance")
      ->capture_default_str();
  solve->add_option("--entropic-eps", entropic_eps,
                    "Also report Sinkhorn estimates of W_p^p(barycentre, mu_i)");

  CommonFlags flow_flags;
  int frames = 2;
  auto* flow = app.add_subcommand("flow", "Export particle-flow frames and actions");
  add_common(flow, flow_flags, true);
  flow->add_option("--frames", frames, "Number of equally spaced frames (>= 2)")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();

  CommonFlags verify_flags;
  double verify_tol = baryflow::kDefaultValueTolerance;
  GenerateFlags verify_gen;
  auto* verify = app.add_subcommand(
      "verify", "Run the full verification chain (files, or a generated instance via --seed)");
  add_common(verify, verify_flags, false);
  verify->add_option("--tol", verify_tol, "Relative tolerance for the value chain")
      ->capture_default_str();
  add_generate_flags(verify, verify_gen);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return run_generate(gen, gen_out);
    if (solve->parsed()) return run_solve(solve_flags, solve_tol, entropic_eps);
    if (flow->parsed()) return run_flow(flow_flags, frames);
    if (verify->parsed()) {
      const bool generated = verify_flags.files.empty();
      if (generated && verify->count("--seed") == 0) {
        std::cerr << "verify: give measure files or --seed\n";
        return kExitError;
      }
      return run_verify(verify_flags, verify_tol, verify_gen, generated);
    }
  } catch (const baryflow::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
