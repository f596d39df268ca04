// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include "shield/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "shield/circuit.hpp"
#include "shield/distribution.hpp"
#include "shield/explorer.hpp"
#include "shield/poly_text.hpp"
#include "shield/privacy.hpp"
#include "shield/simulator.hpp"
#include "shield/types.hpp"
#include "shield/votes_io.hpp"

namespace shield::cli {

namespace {

using nlohmann::ordered_json;

// Infinities have no JSON literal; they serialize as strings so reports
// stay parseable. An infinite epsilon is a valid answer, not an error.
ordered_json json_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

// Either one histogram (JSON input) or per-sample histograms of a vote
// matrix (CSV input). The matrix is kept when per-teacher identity matters.
struct LoadedVotes {
  std::vector<core::VoteHistogram> hists;
  std::optional<core::VoteMatrix> matrix;
  std::int64_t offset = 0;
};

LoadedVotes load_votes(const std::string& path, std::int64_t offset,
                       bool offset_given) {
  LoadedVotes out;
  if (io::looks_like_histogram_json(path)) {
    core::VoteHistogram h = io::read_histogram_json_file(path);
    // An explicit --offset wins over the file's "offset" field.
    out.offset = offset_given ? offset : h.offset();
    out.hists.emplace_back(h.counts(), out.offset);
  } else {
    out.matrix = io::read_votes_csv_file(path);
    out.offset = offset;
    for (int i = 0; i < out.matrix->num_samples(); ++i) {
      out.hists.push_back(
          core::histogram_from_votes(*out.matrix, i, out.offset));
    }
  }
  return out;
}

std::vector<int> read_labels(const std::string& path, std::size_t expected) {
  std::ifstream in(path);
  if (!in) throw core::ValidationError("cannot open " + path);
  std::vector<int> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    out.push_back(std::stoi(line));
  }
  if (out.size() != expected) {
    throw core::ValidationError("label count does not match sample count");
  }
  return out;
}

privacy::AdjacencyMode adjacency_of(const std::string& mode) {
  return mode == "symmetric" ? privacy::AdjacencyMode::kSymmetric
                             : privacy::AdjacencyMode::kCanonical;
}

struct DistOptions {
  std::string votes_path;
  std::string poly_text;
  std::string labels_path;
  std::int64_t offset = 1;
  bool offset_given = false;
  bool dummy_weights = false;
};

void run_dist(const DistOptions& opt, std::ostream& out) {
  const core::PolyParam poly = core::parse_poly(opt.poly_text);
  const LoadedVotes in =
      load_votes(opt.votes_path, opt.offset, opt.offset_given);

  std::vector<int> labels;
  if (!opt.labels_path.empty()) {
    labels = read_labels(opt.labels_path, in.hists.size());
  }

  ordered_json doc;
  doc["schema"] = 1;
  doc["command"] = "dist";
  doc["poly"] = core::format_poly(poly);
  doc["offset"] = in.offset;
  doc["num_samples"] = in.hists.size();
  doc["samples"] = ordered_json::array();

  Rational gta_sum(0);
  Rational argmax_sum(0);
  Rational correct_sum(0);
  for (std::size_t i = 0; i < in.hists.size(); ++i) {
    const auto& h = in.hists[i];
    const auto dist = distribution::output_distribution(h, poly);
    const Rational g = distribution::gta(h, poly, opt.dummy_weights);
    const Rational a = distribution::exact_argmax_accuracy(h, poly);
    gta_sum += g;
    argmax_sum += a;

    ordered_json row;
    row["sample"] = i;
    row["probs"] = ordered_json::array();
    row["probs_exact"] = ordered_json::array();
    for (int k = 1; k <= h.num_classes(); ++k) {
      row["probs"].push_back(rational_to_double(dist.prob(k)));
      row["probs_exact"].push_back(rational_to_string(dist.prob(k)));
    }
    row["fail"] = rational_to_double(dist.fail());
    row["fail_exact"] = rational_to_string(dist.fail());
    row["gta"] = rational_to_double(g);
    row["gta_exact"] = rational_to_string(g);
    row["exact_argmax"] = rational_to_double(a);
    row["exact_argmax_exact"] = rational_to_string(a);
    if (!labels.empty()) {
      const int truth = labels[i];
      if (truth < 1 || truth > h.num_classes()) {
        throw core::ValidationError("label class out of range");
      }
      row["label"] = truth;
      correct_sum += dist.prob(truth);
    }
    doc["samples"].push_back(std::move(row));
  }

  const auto n = static_cast<std::int64_t>(in.hists.size());
  ordered_json mean;
  mean["gta"] = rational_to_double(gta_sum / n);
  mean["gta_exact"] = rational_to_string(gta_sum / n);
  mean["exact_argmax"] = rational_to_double(argmax_sum / n);
  mean["exact_argmax_exact"] = rational_to_string(argmax_sum / n);
  if (!labels.empty()) {
    mean["expected_correct"] = rational_to_double(correct_sum);
    mean["expected_correct_exact"] = rational_to_string(correct_sum);
  }
  doc["mean"] = std::move(mean);
  out << doc.dump(2) << "\n";
}

struct EpsilonOptions {
  std::string votes_path;
  std::string poly_text;
  std::string mode = "canonical";
  std::int64_t offset = 1;
  bool offset_given = false;
  double delta = privacy::kDefaultDelta;
  std::int64_t queries = 1;
  int max_order = privacy::kDefaultMaxOrder;
};

void run_epsilon(const EpsilonOptions& opt, std::ostream& out) {
  if (!(opt.delta > 0.0 && opt.delta < 1.0)) {
    throw core::ValidationError("delta must lie in (0, 1)");
  }
  if (opt.queries < 1) throw core::ValidationError("queries must be >= 1");
  const core::PolyParam poly = core::parse_poly(opt.poly_text);
  const LoadedVotes in =
      load_votes(opt.votes_path, opt.offset, opt.offset_given);
  const privacy::AdjacencyMode adjacency = adjacency_of(opt.mode);

  privacy::MomentsLedger composed(opt.max_order);
  std::vector<double> mean_alpha(opt.max_order, 0.0);
  double eps_single_sum = 0.0;
  bool all_single_finite = true;

  ordered_json per_sample = ordered_json::array();
  for (std::size_t i = 0; i < in.hists.size(); ++i) {
    const auto qm =
        privacy::query_moments(in.hists[i], poly, opt.max_order, adjacency);
    composed.add_query(qm, static_cast<std::uint64_t>(opt.queries));

    privacy::MomentsLedger single(opt.max_order);
    single.add_query(qm);
    const double eps1 = privacy::solve_epsilon(single, opt.delta);
    if (std::isfinite(eps1)) {
      eps_single_sum += eps1;
    } else {
      all_single_finite = false;
    }

    ordered_json row;
    row["sample"] = i;
    row["epsilon_single"] = json_real(eps1);
    row["alpha"] = ordered_json::array();
    for (int l = 1; l <= opt.max_order; ++l) {
      const double a = qm.alpha(l);
      row["alpha"].push_back(json_real(a));
      mean_alpha[l - 1] += a;
    }
    per_sample.push_back(std::move(row));
  }

  const auto n = static_cast<double>(in.hists.size());
  for (double& a : mean_alpha) {
    a = a / n * static_cast<double>(opt.queries);
  }

  const double eps_composed = privacy::solve_epsilon(composed, opt.delta);
  const double eps_mean_scaled =
      all_single_finite
          ? eps_single_sum / n * static_cast<double>(opt.queries)
          : std::numeric_limits<double>::infinity();
  const double eps_mean_alpha =
      privacy::solve_epsilon_from_alphas(mean_alpha, opt.delta);
  const double headline =
      opt.mode == "compat" ? eps_mean_scaled : eps_composed;

  ordered_json doc;
  doc["schema"] = 1;
  doc["command"] = "epsilon";
  doc["poly"] = core::format_poly(poly);
  doc["offset"] = in.offset;
  doc["delta"] = opt.delta;
  doc["queries"] = opt.queries;
  doc["mode"] = opt.mode;
  doc["max_order"] = opt.max_order;
  doc["num_samples"] = in.hists.size();
  doc["per_sample"] = std::move(per_sample);
  doc["composed_alpha"] = ordered_json::array();
  for (int l = 1; l <= opt.max_order; ++l) {
    doc["composed_alpha"].push_back(json_real(composed.alpha(l)));
  }
  doc["epsilon_composed"] = json_real(eps_composed);
  doc["epsilon_mean_scaled"] = json_real(eps_mean_scaled);
  doc["epsilon_mean_alpha"] = json_real(eps_mean_alpha);
  doc["epsilon"] = json_real(headline);
  doc["finite"] = std::isfinite(headline);
  out << doc.dump(2) << "\n";
}

struct SimulateOptions {
  std::string votes_path;
  std::string poly_text;
  std::int64_t offset = 1;
  bool offset_given = false;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
};

void run_simulate(const SimulateOptions& opt, std::ostream& out) {
  const core::PolyParam poly = core::parse_poly(opt.poly_text);
  const LoadedVotes in =
      load_votes(opt.votes_path, opt.offset, opt.offset_given);

  ordered_json doc;
  doc["schema"] = 1;
  doc["command"] = "simulate";
  doc["poly"] = core::format_poly(poly);
  doc["offset"] = in.offset;
  doc["trials"] = opt.trials;
  doc["seed"] = opt.seed;
  doc["num_samples"] = in.hists.size();
  doc["samples"] = ordered_json::array();

  for (std::size_t i = 0; i < in.hists.size(); ++i) {
    const core::AugmentedVotes votes =
        in.matrix.has_value()
            ? core::AugmentedVotes(*in.matrix, static_cast<int>(i), in.offset)
            : core::AugmentedVotes(in.hists[i]);
    const auto emp = sim::monte_carlo(votes, poly, opt.trials, opt.seed, i);
    const auto exact = distribution::output_distribution(in.hists[i], poly);

    ordered_json row;
    row["sample"] = i;
    row["class_counts"] = emp.class_counts;
    row["fail_count"] = emp.fail_count;
    row["freq"] = ordered_json::array();
    row["std_error"] = ordered_json::array();
    row["expected"] = ordered_json::array();
    for (int k = 1; k <= votes.num_classes(); ++k) {
      row["freq"].push_back(emp.frequency(k));
      row["std_error"].push_back(emp.std_error(k));
      row["expected"].push_back(rational_to_double(exact.prob(k)));
    }
    row["fail_freq"] = emp.frequency(core::kFailOutcome);
    row["fail_std_error"] = emp.std_error(core::kFailOutcome);
    row["fail_expected"] = rational_to_double(exact.fail());
    doc["samples"].push_back(std::move(row));
  }
  out << doc.dump(2) << "\n";
}

struct CircuitOptions {
  std::string votes_path;
  std::string poly_text;
  std::int64_t offset = 1;
  std::uint64_t seed = 0;
  std::int64_t slots = 32768;
  bool pack_rounds = false;
  bool check = false;
};

void run_circuit_cmd(const CircuitOptions& opt, std::ostream& out) {
  if (io::looks_like_histogram_json(opt.votes_path)) {
    throw core::ValidationError(
        "the circuit command needs per-teacher votes (CSV input)");
  }
  const core::PolyParam poly = core::parse_poly(opt.poly_text);
  const core::VoteMatrix votes = io::read_votes_csv_file(opt.votes_path);
  const circuit::Layout layout = circuit::make_layout(
      opt.slots, votes.num_classes(),
      opt.pack_rounds ? poly.num_rounds() : 1);

  const circuit::CircuitResult result =
      circuit::run_circuit(votes, poly, opt.offset, opt.seed, layout);
  const circuit::CostReport estimate = circuit::estimate_cost(
      poly, votes.num_samples(), votes.num_teachers(), layout);

  if (opt.check) {
    for (int i = 0; i < votes.num_samples(); ++i) {
      const int expected =
          sim::run_shield(votes, i, poly, opt.offset, opt.seed);
      if (expected != result.outcomes[i]) {
        throw std::logic_error("circuit and simulator disagree on sample " +
                               std::to_string(i));
      }
    }
  }

  ordered_json doc;
  doc["schema"] = 1;
  doc["command"] = "circuit";
  doc["poly"] = core::format_poly(poly);
  doc["offset"] = opt.offset;
  doc["seed"] = opt.seed;
  doc["layout"] = {{"n_slots", layout.n_slots},
                   {"num_classes", layout.num_classes},
                   {"k_pad", layout.k_pad},
                   {"rounds", layout.rounds},
                   {"capacity", layout.capacity}};
  doc["packed"] = result.report.packed;
  doc["num_samples"] = votes.num_samples();
  doc["outcomes"] = result.outcomes;
  doc["depth"] = result.report.depth;
  doc["counters"] = {{"ct_ct_mults", result.report.counters.ct_ct_mults},
                     {"ct_pt_mults", result.report.counters.ct_pt_mults},
                     {"additions", result.report.counters.additions},
                     {"rotations", result.report.counters.rotations}};
  doc["estimate_match"] = estimate == result.report;
  if (opt.check) doc["check"] = "ok";
  out << doc.dump(2) << "\n";
}

struct ParetoOptions {
  std::string votes_path;
  std::string csv_path;
  std::string mode = "canonical";
  int max_degree = 4;
  std::vector<int> max_sums;  // empty: the standard budget grid
  bool require_a1 = false;
  std::int64_t offset = 1;
  double delta = privacy::kDefaultDelta;
  std::int64_t queries = 100;
  int max_order = privacy::kDefaultMaxOrder;
  std::int64_t slots = 32768;
};

// table.csv -> table_s12.csv when several budgets share one --csv flag
std::string csv_path_for_sum(const std::string& base, int sum, bool lone) {
  if (lone) return base;
  const std::string tag = "_s" + std::to_string(sum);
  const std::size_t dot = base.rfind('.');
  const std::size_t slash = base.find_last_of('/');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash)) {
    return base + tag;
  }
  return base.substr(0, dot) + tag + base.substr(dot);
}

void run_pareto(const ParetoOptions& opt, std::ostream& out) {
  if (io::looks_like_histogram_json(opt.votes_path)) {
    throw core::ValidationError(
        "the pareto command needs per-teacher votes (CSV input)");
  }
  const core::VoteMatrix votes = io::read_votes_csv_file(opt.votes_path);
  const std::vector<int> sums =
      opt.max_sums.empty() ? std::vector<int>{6, 12, 17, 32} : opt.max_sums;

  explorer::SpaceOptions space;
  space.max_degree = opt.max_degree;
  space.require_a1 = opt.require_a1;
  space.offset = opt.offset;
  space.delta = opt.delta;
  space.queries = static_cast<int>(opt.queries);
  space.max_order = opt.max_order;
  space.mode = adjacency_of(opt.mode);
  space.n_slots = opt.slots;

  // evaluate everything before any file is touched
  std::vector<explorer::SpaceReport> reports;
  reports.reserve(sums.size());
  for (int sum : sums) {
    space.max_coeff_sum = sum;
    reports.push_back(explorer::evaluate_space(votes, space));
  }

  auto row_json = [](const explorer::SpaceRow& row) {
    ordered_json j;
    j["poly"] = core::format_poly(row.poly);
    j["gta"] = row.mean_gta;
    j["eps_mean_scaled"] = json_real(row.eps_mean_scaled);
    j["eps_composed"] = json_real(row.eps_composed);
    j["fail"] = row.mean_fail;
    j["depth"] = row.depth;
    j["ct_ct_mults"] = row.ct_ct_mults;
    j["rotations"] = row.rotations;
    j["capacity"] = row.capacity;
    j["on_front"] = row.on_front;
    return j;
  };

  ordered_json doc;
  doc["schema"] = 1;
  doc["command"] = "pareto";
  doc["max_degree"] = opt.max_degree;
  doc["max_sums"] = sums;
  doc["require_a1"] = opt.require_a1;
  doc["offset"] = opt.offset;
  doc["delta"] = opt.delta;
  doc["queries"] = opt.queries;
  doc["mode"] = opt.mode;
  doc["spaces"] = ordered_json::array();
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const auto& report = reports[i];
    ordered_json entry;
    entry["max_sum"] = sums[i];
    entry["num_polys"] = report.rows.size();
    entry["infinite_count"] = report.infinite_count;
    if (!opt.csv_path.empty()) {
      entry["csv"] = csv_path_for_sum(opt.csv_path, sums[i], sums.size() == 1);
    }
    entry["front"] = ordered_json::array();
    for (std::size_t idx : report.front) {
      entry["front"].push_back(row_json(report.rows[idx]));
    }
    entry["rows"] = ordered_json::array();
    for (const auto& row : report.rows) entry["rows"].push_back(row_json(row));
    doc["spaces"].push_back(std::move(entry));
  }

  if (!opt.csv_path.empty()) {
    for (std::size_t i = 0; i < sums.size(); ++i) {
      std::ostringstream csv;
      csv << "poly,gta,eps_mean_scaled,eps_composed,fail,depth,ct_ct_mults,"
             "rotations,capacity,on_front\n";
      for (const auto& row : reports[i].rows) {
        csv << core::format_poly(row.poly) << ','
            << format_double(row.mean_gta) << ','
            << format_double(row.eps_mean_scaled) << ','
            << format_double(row.eps_composed) << ','
            << format_double(row.mean_fail) << ',' << row.depth << ','
            << row.ct_ct_mults << ',' << row.rotations << ',' << row.capacity
            << ',' << (row.on_front ? 1 : 0) << '\n';
      }
      const std::string path =
          csv_path_for_sum(opt.csv_path, sums[i], sums.size() == 1);
      std::ofstream file(path);
      if (!file) throw core::ValidationError("cannot write " + path);
      file << csv.str();
    }
  }
  out << doc.dump(2) << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"SHIELD probabilistic argmax: distributions, privacy "
               "accounting, simulation, circuit costs, Pareto search"};
  app.require_subcommand(1);

  DistOptions dist;
  auto* dist_cmd = app.add_subcommand(
      "dist", "Exact output distribution and accuracy metrics");
  dist_cmd->add_option("votes", dist.votes_path, "votes CSV or histogram JSON")
      ->required();
  dist_cmd->add_option("--poly", dist.poly_text, "parameterization, e.g. 2X^3+3X^2+X")
      ->required();
  dist_cmd->add_option("--offset", dist.offset, "dummy votes per class")
      ->check(CLI::NonNegativeNumber);
  dist_cmd->add_option("--labels", dist.labels_path,
                       "ground truth labels, one class per line");
  dist_cmd->add_flag("--dummy-weights", dist.dummy_weights,
                     "weight ground-truth accuracy by offset-augmented counts");
  dist_cmd->callback([&] {
    dist.offset_given = dist_cmd->count("--offset") > 0;
    run_dist(dist, out);
  });

  EpsilonOptions eps;
  auto* eps_cmd = app.add_subcommand(
      "epsilon", "Moments-accountant differential privacy report");
  eps_cmd->add_option("votes", eps.votes_path, "votes CSV or histogram JSON")
      ->required();
  eps_cmd->add_option("--poly", eps.poly_text, "parameterization")->required();
  eps_cmd->add_option("--offset", eps.offset, "dummy votes per class")
      ->check(CLI::NonNegativeNumber);
  eps_cmd->add_option("--delta", eps.delta, "target delta");
  eps_cmd->add_option("--queries", eps.queries, "answered queries per sample")
      ->check(CLI::PositiveNumber);
  eps_cmd->add_option("--max-order", eps.max_order, "moment orders 1..L")
      ->check(CLI::PositiveNumber);
  eps_cmd->add_option("--mode", eps.mode, "canonical, compat or symmetric")
      ->check(CLI::IsMember({"canonical", "compat", "symmetric"}));
  eps_cmd->callback([&] {
    eps.offset_given = eps_cmd->count("--offset") > 0;
    run_epsilon(eps, out);
  });

  SimulateOptions simulate;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Monte-Carlo estimate from the plaintext protocol");
  sim_cmd->add_option("votes", simulate.votes_path,
                      "votes CSV or histogram JSON")
      ->required();
  sim_cmd->add_option("--poly", simulate.poly_text, "parameterization")
      ->required();
  sim_cmd->add_option("--offset", simulate.offset, "dummy votes per class")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--trials", simulate.trials, "trials per sample")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", simulate.seed, "root seed");
  sim_cmd->callback([&] {
    simulate.offset_given = sim_cmd->count("--offset") > 0;
    run_simulate(simulate, out);
  });

  CircuitOptions circ;
  auto* circ_cmd = app.add_subcommand(
      "circuit", "Slot-level homomorphic pipeline with cost accounting");
  circ_cmd->add_option("votes", circ.votes_path, "votes CSV")->required();
  circ_cmd->add_option("--poly", circ.poly_text, "parameterization")
      ->required();
  circ_cmd->add_option("--offset", circ.offset, "dummy votes per class")
      ->check(CLI::NonNegativeNumber);
  circ_cmd->add_option("--seed", circ.seed, "root seed");
  circ_cmd->add_option("--slots", circ.slots, "slots per ciphertext")
      ->check(CLI::PositiveNumber);
  circ_cmd->add_flag("--pack-rounds", circ.pack_rounds,
                     "pack all rounds into one ciphertext");
  circ_cmd->add_flag("--check", circ.check,
                     "verify outcomes against the plaintext simulator");
  circ_cmd->callback([&] { run_circuit_cmd(circ, out); });

  ParetoOptions pareto;
  auto* pareto_cmd = app.add_subcommand(
      "pareto", "Evaluate a polynomial space and its Pareto front");
  pareto_cmd->add_option("votes", pareto.votes_path, "votes CSV")->required();
  pareto_cmd->add_option("--max-degree", pareto.max_degree, "max degree D")
      ->check(CLI::PositiveNumber);
  pareto_cmd->add_option("--max-sum", pareto.max_sums,
                         "coefficient sum budgets (default 6 12 17 32)")
      ->check(CLI::PositiveNumber);
  pareto_cmd->add_flag("--require-a1", pareto.require_a1,
                       "restrict to a_1 = 1 (never fails)");
  pareto_cmd->add_option("--offset", pareto.offset, "dummy votes per class")
      ->check(CLI::NonNegativeNumber);
  pareto_cmd->add_option("--delta", pareto.delta, "target delta");
  pareto_cmd->add_option("--queries", pareto.queries, "queries per sample")
      ->check(CLI::PositiveNumber);
  pareto_cmd->add_option("--max-order", pareto.max_order, "moment orders 1..L")
      ->check(CLI::PositiveNumber);
  pareto_cmd->add_option("--mode", pareto.mode,
                         "canonical, compat or symmetric")
      ->check(CLI::IsMember({"canonical", "compat", "symmetric"}));
  pareto_cmd->add_option("--slots", pareto.slots, "slots per ciphertext")
      ->check(CLI::PositiveNumber);
  pareto_cmd->add_option("--csv", pareto.csv_path, "write the full table here");
  pareto_cmd->callback([&] { run_pareto(pareto, out); });

  try {
    app.parse(argc, argv);
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  } catch (const core::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const core::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace shield::cli
