#pragma once

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mamd/flow.hpp"
#include "mamd/io.hpp"
#include "mamd/market.hpp"
#include "mamd/sim.hpp"
#include "mamd/tensor.hpp"

namespace mamd::cli {

enum ExitCode : int { kOk = 0, kInadequate = 1, kInvalidInput = 2, kInternal = 3 };

struct InvalidArgument : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "all", "smallest9" (any smallestN) or an explicit list "a-d,a-d,...".
inline std::vector<sim::WindowPair> parse_pairs(const std::string& text, const TimePartition& p) {
  if (text == "all") return sim::all_pairs(p);
  if (text.rfind("smallest", 0) == 0) {
    try {
      std::size_t used = 0;
      const int count = std::stoi(text.substr(8), &used);
      if (used == text.size() - 8 && count > 0) return sim::smallest_pairs(p, count);
    } catch (const std::exception&) {
    }
    throw InvalidArgument("bad --pairs value '" + text + "'");
  }
  std::vector<sim::WindowPair> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto sep = item.find_first_of("-:");
    if (sep == std::string::npos) throw InvalidArgument("bad pair '" + item + "'");
    try {
      std::size_t ua = 0, ud = 0;
      const int a = std::stoi(item.substr(0, sep), &ua);
      const int d = std::stoi(item.substr(sep + 1), &ud);
      if (ua != sep || ud != item.size() - sep - 1) throw InvalidArgument("bad pair");
      out.emplace_back(a, d);
    } catch (const std::exception&) {
      throw InvalidArgument("bad pair '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("--pairs is empty");
  return out;
}

/// "lo:hi:step" or a comma list of loads-per-pair values.
inline std::vector<int> parse_sweep(const std::string& text) {
  std::vector<int> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::stringstream ss(text);
      std::string lo, hi, step;
      std::getline(ss, lo, ':');
      std::getline(ss, hi, ':');
      std::getline(ss, step, ':');
      const int l = std::stoi(lo), h = std::stoi(hi), s = step.empty() ? 1 : std::stoi(step);
      if (s <= 0 || l < 0 || h < l) throw InvalidArgument("bad sweep");
      for (int v = l; v <= h; v += s) out.push_back(v);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const std::exception&) {
    throw InvalidArgument("bad --sweep value '" + text + "'");
  }
  if (out.empty()) throw InvalidArgument("--sweep is empty");
  return out;
}

namespace detail {

inline std::string read_input(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_output(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << data;
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Adequacy, allocation, market clearing and GNR simulation for MAMD services"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string output = "-";
  std::optional<double> tolerance;
  bool canonicalize = true;

  auto* check = app.add_subcommand("check", "Structure-tensor adequacy report");
  check->add_option("-i,--input", input, "Instance document (default stdin)");
  check->add_option("-o,--output", output, "Report destination (default stdout)");
  check->add_option("--tolerance", tolerance, "Absolute tolerance on the minimum entry");
  check->add_option("--canonicalize", canonicalize, "Sort supply within segments first")
      ->default_val(true);

  auto* allocate = app.add_subcommand("allocate", "Feasible allocation or min-cut certificate");
  allocate->add_option("-i,--input", input, "Instance document (default stdin)");
  allocate->add_option("-o,--output", output, "Report destination (default stdout)");
  allocate->add_option("--canonicalize", canonicalize, "Ignored by the flow path");

  auto* market = app.add_subcommand("market", "Competitive equilibrium from welfare duals");
  market->add_option("-i,--input", input, "Instance document with consumers (default stdin)");
  market->add_option("-o,--output", output, "Report destination (default stdout)");
  market->add_option("--tolerance", tolerance, "Equilibrium check tolerance");

  std::uint64_t seed = 1;
  int trials = 20;
  int loads_per_pair = 200;
  std::string pairs = "all";
  std::string sweep;
  std::string summary;
  std::vector<int> partition;
  unsigned threads = 1;
  auto* simulate = app.add_subcommand("simulate", "GNR benchmark-comparison experiment");
  simulate->add_option("-o,--output", output, "CSV destination (default stdout)");
  simulate->add_option("--seed", seed, "64-bit seed");
  simulate->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--loads-per-pair", loads_per_pair, "Loads per arrival-deadline pair")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--pairs", pairs, "all | smallest9 | a-d,a-d,...");
  simulate->add_option("--sweep", sweep, "Loads per pair for each trial: lo:hi:step or list");
  simulate->add_option("--summary", summary, "JSON summary destination");
  simulate->add_option("--partition", partition, "Breakpoints (default 0 3 7 12 14 16)");
  simulate->add_option("--threads", threads, "Worker threads for trials");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (check->parsed()) {
      const Instance inst = io::load_instance(detail::read_input(input, in));
      if (!canonicalize && !is_canonical(inst.supply, inst.partition)) throw NotCanonical();
      const AdequacyReport report = check_adequacy(inst.supply, inst.demand, inst.partition, tolerance);
      detail::write_output(output, io::to_json(report).dump(2) + "\n", out);
      return report.adequate ? kOk : kInadequate;
    }
    if (allocate->parsed()) {
      const Instance inst = io::load_instance(detail::read_input(input, in));
      io::json doc;
      int code = kOk;
      try {
        const AllocationMatrix A = extract_allocation(inst.supply, inst.demand, inst.partition);
        doc = io::to_json(A);
        doc["adequate"] = true;
      } catch (const NotAdequate& e) {
        doc = {{"adequate", false},
               {"cut", io::to_json(e.cut())},
               {"demand", inst.demand.energy()}};
        code = kInadequate;
      }
      detail::write_output(output, doc.dump(2) + "\n", out);
      return code;
    }
    if (market->parsed()) {
      const Instance inst = io::load_instance(detail::read_input(input, in));
      const EquilibriumReport report =
          clear_market(inst, tolerance.value_or(kEquilibriumTolerance));
      detail::write_output(output, io::to_json(report).dump(2) + "\n", out);
      if (!report.checks.all()) {
        err << "equilibrium checks failed\n";
        return kInternal;
      }
      return kOk;
    }
    if (simulate->parsed()) {
      sim::SimConfig config;
      if (!partition.empty()) config.partition = TimePartition(partition);
      config.pairs = parse_pairs(pairs, config.partition);
      config.seed = seed;
      config.trials = trials;
      config.loads_per_pair = loads_per_pair;
      config.threads = threads;
      if (!sweep.empty()) config.loads_sweep = parse_sweep(sweep);
      const sim::GnrTrace trace = sim::run_experiment(config);
      detail::write_output(output, io::trace_csv(trace), out);
      std::string summary_path = summary;
      if (summary_path.empty() && output != "-") summary_path = output + ".summary.json";
      if (!summary_path.empty()) {
        std::ofstream f(summary_path, std::ios::binary);
        if (!f) throw InvalidArgument("cannot write " + summary_path);
        f << io::summary_json(trace, config).dump(2) << "\n";
      }
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ValidationError& e) {
    err << "invalid instance: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    // NotCanonical, NonIntegerInput
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const TensorTooLarge& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInvalidInput;
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cin, std::cout, std::cerr);
}

}  // namespace mamd::cli
