#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "simplex/experiment.hpp"

namespace simplex {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct DatasetEntry {
  std::string name;
  std::string train;
  std::string test;  // empty: seeded stratified split of `train`
  std::string format = "csv";
  int label_col = -1;
  bool has_header = false;
  bool standardize = false;
};

struct SolverEntry {
  std::string name;
  ExperimentConfig config;
};

struct LoadedData {
  Dataset train;
  Dataset test;
  std::string error;
};

struct Cell {
  bool ok = false;
  double accuracy = 0.0;
  TrainReport report;
  std::string error;
};

template <typename T>
T field(const json& j, const char* key, T fallback) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

std::optional<double> auto_or_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto& v = j.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "auto") return std::nullopt;
    fail(ErrorCode::config, std::string("manifest field '") + key + "' must be \"auto\" or a number");
  }
  return v.get<double>();
}

Dataset load_any(const std::string& path, const DatasetEntry& entry) {
  if (entry.format == "sparse") return load_sparse(path);
  return load_csv(path, CsvOptions{entry.label_col, entry.has_header});
}

LoadedData load_entry(const DatasetEntry& entry, double fraction, std::uint64_t seed) {
  LoadedData out;
  try {
    if (!entry.test.empty()) {
      out.train = load_any(entry.train, entry);
      out.test = remap_labels(load_any(entry.test, entry), out.train.label_names);
    } else {
      auto parts = split(load_any(entry.train, entry), {fraction, seed, true});
      out.train = std::move(parts.train);
      out.test = std::move(parts.validation);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

size_t thread_budget() {
  size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SIMPLEX_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) threads = static_cast<size_t>(v);
  }
  return threads;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

BenchmarkReport run_benchmark(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot read manifest " + manifest_path);
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::config, "manifest " + manifest_path + ": " + e.what());
  }

  std::vector<DatasetEntry> datasets;
  std::vector<SolverEntry> solvers;
  std::uint64_t seed = 1;
  double fraction = 0.8;
  const fs::path base = fs::path(manifest_path).parent_path();
  const auto resolve = [&](const std::string& p) {
    if (p.empty()) return p;
    const fs::path path(p);
    return (path.is_absolute() ? path : base / path).string();
  };
  try {
    seed = field<std::uint64_t>(manifest, "seed", 1);
    fraction = field<double>(manifest, "split_fraction", 0.8);
    for (const auto& d : manifest.at("datasets")) {
      DatasetEntry e;
      e.name = d.at("name").get<std::string>();
      e.train = resolve(d.at("train").get<std::string>());
      e.test = resolve(field<std::string>(d, "test", ""));
      e.format = field<std::string>(d, "format", "csv");
      e.label_col = field<int>(d, "label_col", -1);
      e.has_header = field<bool>(d, "has_header", false);
      e.standardize = field<bool>(d, "standardize", false);
      require(e.format == "csv" || e.format == "sparse", ErrorCode::config,
              "dataset " + e.name + ": format must be csv or sparse");
      datasets.push_back(std::move(e));
    }
    for (const auto& s : manifest.at("solvers")) {
      SolverEntry e;
      e.name = s.at("name").get<std::string>();
      auto& c = e.config;
      c.loss = parse_loss(field<std::string>(s, "loss", "s-ls"));
      const auto mode = field<std::string>(s, "mode", "batch");
      require(mode == "batch" || mode == "online", ErrorCode::config, "solver " + e.name + ": bad mode " + mode);
      c.online = mode == "online";
      const auto kernel = field<std::string>(s, "kernel", "linear");
      require(kernel == "linear" || kernel == "rbf", ErrorCode::config,
              "solver " + e.name + ": bad kernel " + kernel);
      c.kernel = kernel == "rbf" ? KernelKind::rbf : KernelKind::linear;
      const auto select = field<std::string>(s, "select", "ho");
      require(select == "ho" || select == "loo", ErrorCode::config,
              "solver " + e.name + ": bad selection " + select);
      c.select = select == "loo" ? SelectMode::loo : SelectMode::holdout;
      c.lambda = auto_or_number(s, "lambda");
      c.sigma = auto_or_number(s, "sigma");
      c.epochs = field<int>(s, "epochs", 10);
      c.seed = seed;
      c.split_fraction = fraction;
      c.validate();
      solvers.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::config, "manifest " + manifest_path + ": " + e.what());
  }
  require(!datasets.empty() && !solvers.empty(), ErrorCode::config, "manifest lists no datasets or no solvers");

  std::vector<LoadedData> loaded;
  for (const auto& d : datasets) loaded.push_back(load_entry(d, fraction, seed));

  const size_t cells = solvers.size() * datasets.size();
  std::vector<Cell> results(cells);
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t k = next++; k < cells; k = next++) {
      const size_t s = k / datasets.size();
      const size_t d = k % datasets.size();
      Cell& cell = results[k];
      if (!loaded[d].error.empty()) {
        cell.error = loaded[d].error;
        continue;
      }
      try {
        ExperimentConfig config = solvers[s].config;
        config.standardize = datasets[d].standardize;
        auto outcome = run_train(config, loaded[d].train);
        cell.accuracy = evaluate(outcome.model, loaded[d].test).accuracy;
        cell.report = outcome.report;
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const size_t threads = std::min(thread_budget(), cells);
  std::vector<std::thread> pool;
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  BenchmarkReport report;
  size_t name_width = 6;
  for (const auto& s : solvers) name_width = std::max(name_width, s.name.size() + 2);
  std::ostringstream text, table, details;
  text << std::left << std::setw(static_cast<int>(name_width)) << "solver" << std::right;
  table << "solver";
  for (const auto& d : datasets) {
    text << std::setw(static_cast<int>(std::max<size_t>(10, d.name.size() + 2))) << d.name;
    table << ',' << csv_field(d.name);
  }
  text << '\n';
  table << '\n';
  details << "solver,dataset,status,accuracy,lambda,sigma,wall_seconds,message\n";
  details << std::setprecision(10);
  for (size_t s = 0; s < solvers.size(); ++s) {
    text << std::left << std::setw(static_cast<int>(name_width)) << solvers[s].name << std::right;
    table << csv_field(solvers[s].name);
    for (size_t d = 0; d < datasets.size(); ++d) {
      const Cell& cell = results[s * datasets.size() + d];
      const int width = static_cast<int>(std::max<size_t>(10, datasets[d].name.size() + 2));
      std::ostringstream value;
      if (cell.ok) {
        value << std::fixed << std::setprecision(2) << 100.0 * cell.accuracy;
      } else {
        value << "ERROR";
        report.any_error = true;
      }
      text << std::setw(width) << value.str();
      table << ',' << value.str();
      details << csv_field(solvers[s].name) << ',' << csv_field(datasets[d].name) << ','
              << (cell.ok ? "ok" : "error") << ',';
      if (cell.ok) {
        details << cell.accuracy << ',' << cell.report.lambda << ',';
        if (cell.report.sigma) details << *cell.report.sigma;
        details << ',' << cell.report.wall_seconds << ",\n";
      } else {
        details << ",,,," << csv_field(cell.error) << '\n';
      }
    }
    text << '\n';
    table << '\n';
  }
  for (size_t k = 0; k < cells; ++k) {
    if (!results[k].ok) {
      text << "error in " << solvers[k / datasets.size()].name << " / " << datasets[k % datasets.size()].name
           << ": " << results[k].error << '\n';
    }
  }
  report.text = text.str();
  report.table_csv = table.str();
  report.details_csv = details.str();
  return report;
}

}  // namespace simplex
