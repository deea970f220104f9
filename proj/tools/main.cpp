#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lab.hpp"

namespace {

using sgl::lab::json;

json read_config(const std::string& arg) {
  if (arg.empty()) return json::object();
  std::ifstream in(arg);
  if (in) return json::parse(in);
  return json::parse(arg);
}

// --key value pairs not known to the parser become config fields
void merge_extras(json& cfg, const std::vector<std::string>& extras) {
  for (size_t k = 0; k < extras.size(); ++k) {
    const std::string& a = extras[k];
    if (a.rfind("--", 0) != 0 || k + 1 >= extras.size())
      throw std::invalid_argument("unexpected argument '" + a + "'");
    std::string key = a.substr(2), val = extras[++k];
    try {
      cfg[key] = json::parse(val);
    } catch (const json::exception&) {
      cfg[key] = val;
    }
  }
}

void write_json(const std::filesystem::path& p, const json& j) {
  std::ofstream os(p);
  os << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sle-gff-lab: verification suites and experiments"};
  app.require_subcommand(1);
  std::string name, config_arg, out_dir, grid, replay;
  std::uint64_t seed = 1;
  int workers = 1;

  std::ostringstream names;
  for (const auto& n : sgl::lab::verify_names()) names << ' ' << n;
  auto* verify = app.add_subcommand("verify", "run a named identity check; names:" + names.str());
  std::ostringstream enames;
  for (const auto& n : sgl::lab::experiment_names()) enames << ' ' << n;
  auto* exper = app.add_subcommand("experiment", "run a named experiment; names:" + enames.str());
  for (auto* sub : {verify, exper}) {
    sub->add_option("name", name, "suite or experiment name")->required();
    sub->add_option("--config", config_arg, "JSON file or inline JSON object");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker count recorded in the manifest");
    sub->add_option("--manifest", replay, "replay the config and seed of a manifest");
    sub->allow_extras();
  }
  verify->add_option("--grid", grid, "rectangle size RxC for det-factorization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  json cfg;
  try {
    cfg = read_config(config_arg);
    if (!replay.empty()) {
      std::ifstream in(replay);
      if (!in) throw std::invalid_argument("cannot read manifest " + replay);
      json m = json::parse(in);
      cfg = m.at("config");
      seed = m.at("master_seed").get<std::uint64_t>();
    }
    merge_extras(cfg, app.got_subcommand(verify) ? verify->remaining() : exper->remaining());
    if (!grid.empty()) cfg["grid"] = grid;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  std::string command = (app.got_subcommand(verify) ? "verify " : "experiment ") + name;
  try {
    if (app.got_subcommand(verify)) {
      auto r = sgl::lab::verify(name, cfg, seed);
      json j = r.to_json();
      std::cout << j.dump(2) << '\n';
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_json(std::filesystem::path(out_dir) / "report.json", j);
        write_json(std::filesystem::path(out_dir) / "manifest.json",
                   sgl::lab::manifest(command, cfg, seed, workers, wall));
      }
      return r.pass() ? 0 : 1;
    }
    std::string dir = out_dir.empty() ? "." : out_dir;
    auto r = sgl::lab::experiment(name, cfg, seed, dir);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json j{{"name", name}, {"pass", r.pass}, {"summary", r.summary}, {"files", r.files}};
    write_json(std::filesystem::path(dir) / "summary.json", j);
    write_json(std::filesystem::path(dir) / "manifest.json", sgl::lab::manifest(command, cfg, seed, workers, wall));
    std::cout << j.dump(2) << '\n';
    return r.pass ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
