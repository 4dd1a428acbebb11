#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "waveslam/capabilities.hpp"
#include "waveslam/encoding.hpp"
#include "waveslam/pipeline.hpp"

namespace waveslam::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.txt";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Artifacts go straight to disk as they are produced; the manifest is written
// last, and also after a failure so partial output stays accounted for.
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) throw ConfigError(fmt::format("cannot create output directory {}", root_.string()));
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(root_ / name, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error(fmt::format("failed writing {}", (root_ / name).string()));
    hashes_[name] = sha256_hex(content);
  }

  void finish() {
    std::string manifest;
    for (const auto& [name, hash] : hashes_) manifest += fmt::format("{}  {}\n", hash, name);
    std::ofstream out(root_ / kManifest, std::ios::binary | std::ios::trunc);
    out << manifest;
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::map<std::string, std::string> hashes_;
};

struct Common {
  std::string scenario;
  std::uint64_t seed = 1;
  std::string profile = "paper_calibrated";
  std::string out;
  bool lidar_only = false;
  bool mmwave_only = false;
  int ftm_n = 8;
  int max_order = 2;
  int random_walk = 0;
};

Scenario load_scenario_for(const Common& c) {
  Scenario scenario = load_scenario(c.scenario);
  if (c.random_walk > 0) {
    const Pose start = scenario.route.front().pose;
    scenario.route = random_walk_route(scenario.walls, start, c.random_walk, 0.05, 0.1, deg2rad(15.0), 0.4, c.seed);
  }
  return scenario;
}

RunOptions options_for(const Common& c, bool needs_profile) {
  RunOptions o;
  o.seed = c.seed;
  if (needs_profile) o.profile = load_profile(c.profile);
  o.lidar_only = c.lidar_only;
  o.mmwave_only = c.mmwave_only;
  o.ftm_n = c.ftm_n;
  o.max_order = c.max_order;
  o.validate();
  return o;
}

void write_reports(OutputDir& dir, const std::vector<ErrorSample>& samples) {
  dir.write("samples.csv", encode_samples_csv(samples));
  dir.write("ecdf.csv", encode_ecdf_csv(samples));
  dir.write("summary.csv", encode_summary_csv(samples));
}

void write_processed(OutputDir& dir, const ProcessResult& r) {
  dir.write("points.csv", encode_points_csv(r.points));
  dir.write("map.pgm", encode_pgm(r.grid));
  dir.write("map.yaml", encode_map_yaml(r.grid, "map.pgm"));
  dir.write("metrics.csv", encode_metrics_csv(r.metrics));
  write_reports(dir, r.samples);
}

void print_metrics(std::ostream& out, const ProcessResult& r) {
  out << fmt::format("events {}  lidar points {}  mmwave points {}  iou {:.4f}  glass coverage {:.4f}\n", r.events,
                     r.metrics.lidar_points, r.metrics.mmwave_points, r.metrics.iou, r.metrics.glass_coverage);
}

std::map<std::string, std::string> keyed_rows(const std::string& text, std::size_t key_columns) {
  // header line names the value columns; each row becomes key=value entries
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string header, line;
  std::getline(in, header);
  std::vector<std::string> names;
  {
    std::istringstream h(header);
    std::string cell;
    while (std::getline(h, cell, ',')) names.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream l(line);
    std::string cell;
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    std::string key;
    for (std::size_t i = 0; i < key_columns && i < cells.size(); ++i) key += (i ? "/" : "") + cells[i];
    for (std::size_t i = key_columns; i < cells.size() && i < names.size(); ++i)
      out[key.empty() ? names[i] : key + "/" + names[i]] = cells[i];
  }
  return out;
}

std::string compare_dirs(const fs::path& a, const fs::path& b) {
  std::string out = "file,key,a,b,delta\n";
  bool any = false;
  for (const auto& [file, keys] : std::vector<std::pair<std::string, std::size_t>>{{"metrics.csv", 0}, {"summary.csv", 2}}) {
    if (!fs::exists(a / file) || !fs::exists(b / file)) continue;
    any = true;
    const auto ra = keyed_rows(read_file(a / file), keys);
    const auto rb = keyed_rows(read_file(b / file), keys);
    for (const auto& [key, va] : ra) {
      auto it = rb.find(key);
      if (it == rb.end()) continue;
      const double delta = std::stod(it->second) - std::stod(va);
      out += fmt::format("{},{},{},{},{}\n", file, key, va, it->second, delta);
    }
  }
  if (!any) throw ConfigError("compare: neither metrics.csv nor summary.csv present in both directories");

  // artifacts with the same name, hashed by each manifest
  auto manifest = [](const fs::path& dir) {
    std::map<std::string, std::string> m;
    if (!fs::exists(dir / kManifest)) return m;
    std::istringstream in(read_file(dir / kManifest));
    std::string hash, name;
    while (in >> hash >> name) m[name] = hash;
    return m;
  };
  const auto ma = manifest(a);
  const auto mb = manifest(b);
  for (const auto& [name, hash] : ma) {
    auto it = mb.find(name);
    if (it != mb.end()) out += fmt::format("manifest,{},{},{},{}\n", name, hash, it->second, hash == it->second ? 0 : 1);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"waveslam: mmWave self-sensing SLAM simulator"};
  app.require_subcommand(1);

  Common c;
  auto add_scenario_flags = [&](CLI::App* sub, bool selection_flags) {
    sub->add_option("--scenario", c.scenario, "Scenario JSON")->required();
    sub->add_option("--out", c.out, "Output directory")->required();
    sub->add_option("--seed", c.seed, "Master seed");
    sub->add_option("--max-order", c.max_order, "Highest reflection order traced (1-3)");
    if (selection_flags) {
      sub->add_flag("--lidar-only", c.lidar_only, "Map with LiDAR points only");
      sub->add_flag("--mmwave-only", c.mmwave_only, "Map with mmWave points only");
    }
  };

  auto* run = app.add_subcommand("run", "Simulate, estimate, fuse and map a scenario");
  add_scenario_flags(run, true);
  run->add_option("--profile", c.profile, "Noise profile name or JSON path");
  run->add_option("--ftm-n", c.ftm_n, "FTM measurements per burst");
  run->add_option("--random-walk", c.random_walk, "Replace the route by a seeded random walk of this many steps");

  auto* collect_cmd = app.add_subcommand("collect", "Simulate sensors only and write the sensor log");
  add_scenario_flags(collect_cmd, false);
  collect_cmd->add_option("--profile", c.profile, "Noise profile name or JSON path");
  collect_cmd->add_option("--ftm-n", c.ftm_n, "FTM measurements per burst");
  collect_cmd->add_option("--random-walk", c.random_walk, "Replace the route by a seeded random walk");

  std::string log_path;
  auto* process_cmd = app.add_subcommand("process", "Turn a sensor log into points, a map and metrics");
  add_scenario_flags(process_cmd, true);
  process_cmd->add_option("--log", log_path, "Sensor log (JSONL)")->required();

  std::string mode;
  int trials = 50;
  auto* caps = app.add_subcommand("capabilities", "Ranging and AoA error sweeps against a single wall");
  caps->add_option("--mode", mode, "distance or angle")->required();
  caps->add_option("--out", c.out, "Output directory")->required();
  caps->add_option("--seed", c.seed, "Master seed");
  caps->add_option("--profile", c.profile, "Noise profile name or JSON path");
  caps->add_option("--ftm-n", c.ftm_n, "FTM measurements per burst");
  caps->add_option("--trials", trials, "Measurements per setting");

  std::string input;
  auto* report = app.add_subcommand("report", "ECDF and summary tables from a samples.csv");
  report->add_option("--input", input, "Directory holding samples.csv, or the file itself")->required();
  report->add_option("--out", c.out, "Output directory")->required();

  std::string dir_a, dir_b;
  auto* compare = app.add_subcommand("compare", "Side-by-side metrics of two output directories");
  compare->add_option("--a", dir_a, "First output directory")->required();
  compare->add_option("--b", dir_b, "Second output directory")->required();
  compare->add_option("--out", c.out, "Output directory")->required();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto started = std::chrono::steady_clock::now();
  std::optional<OutputDir> dir;
  try {
    if (*run || *collect_cmd) {
      const RunOptions options = options_for(c, true);
      const Scenario scenario = load_scenario_for(c);
      dir.emplace(c.out);
      dir->write("scenario.json", serialize_scenario(scenario));
      dir->write("profile.json", serialize_profile(options.profile));
      const auto log = collect(scenario, options);
      dir->write("sensor_log.jsonl", encode_log(log));
      if (*run) {
        const ProcessResult r = process(log, scenario, options);
        write_processed(*dir, r);
        print_metrics(out, r);
      } else {
        out << fmt::format("events {}  records {}\n", scenario.route.size(), log.size());
      }
    } else if (*process_cmd) {
      const RunOptions options = options_for(c, false);
      const Scenario scenario = load_scenario(c.scenario);
      const std::string text = read_file(log_path);
      dir.emplace(c.out);
      const auto log = decode_log(text, log_path);
      const ProcessResult r = process(log, scenario, options);
      write_processed(*dir, r);
      print_metrics(out, r);
    } else if (*caps) {
      CapabilityOptions options;
      options.mode = parse_capability_mode(mode);
      options.profile = load_profile(c.profile);
      options.seed = c.seed;
      options.trials = trials;
      options.ftm_n = c.ftm_n;
      dir.emplace(c.out);
      dir->write("profile.json", serialize_profile(options.profile));
      const CapabilityReport rep = run_capabilities(options);
      const auto samples = rep.samples();
      write_reports(*dir, samples);
      out << encode_summary_csv(samples);
    } else if (*report) {
      fs::path path(input);
      if (fs::is_directory(path)) path /= "samples.csv";
      const auto samples = parse_samples_csv(read_file(path), path.string());
      dir.emplace(c.out);
      dir->write("ecdf.csv", encode_ecdf_csv(samples));
      dir->write("summary.csv", encode_summary_csv(samples));
      out << encode_summary_csv(samples);
    } else if (*compare) {
      const std::string table = compare_dirs(dir_a, dir_b);
      dir.emplace(c.out);
      dir->write("comparison.csv", table);
      out << table;
    }
    dir->finish();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    if (dir) dir->finish();
    return kExitConfig;
  } catch (const ScenarioError& e) {
    err << "config error: " << e.what() << "\n";
    if (dir) dir->finish();
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    if (dir) dir->finish();
    return kExitRuntime;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  out << fmt::format("wall clock {:.3f} s\n", seconds);
  return kExitOk;
}

}  // namespace waveslam::cli
