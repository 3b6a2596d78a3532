// Command-line driver for the staged workflow: translate a program into a
// sum-product graph, condition it on events, and query the result.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "spe/condition.hpp"
#include "spe/errors.hpp"
#include "spe/serialize.hpp"
#include "spe/translator.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitTranslate = 2;
constexpr int kExitZeroProbability = 3;

int exit_code_for(const spe::SpeError& err) {
  switch (err.kind()) {
    case spe::ErrorKind::zero_probability:
    case spe::ErrorKind::zero_density:
      return kExitZeroProbability;
    case spe::ErrorKind::parse:
    case spe::ErrorKind::restriction:
      return kExitTranslate;
    default:
      return kExitTranslate;
  }
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct QuerySpec {
  std::string verb;  // prob | density | simulate | condition | constrain
  std::string payload;
};

QuerySpec parse_query_text(const std::string& text) {
  size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  size_t start = i;
  while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  QuerySpec q;
  q.verb = text.substr(start, i - start);
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  std::string rest = text.substr(i);
  if (!rest.empty() && rest.front() == '(') {
    size_t close = rest.rfind(')');
    if (close == std::string::npos) spe::fail(spe::ErrorKind::parse, "unbalanced query parentheses");
    rest = rest.substr(1, close - 1);
  }
  q.payload = rest;
  return q;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) cur += c;
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string simulate_table(const spe::Graph& g, spe::NodeId root,
                           const std::vector<std::string>& names, int samples,
                           uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string out;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out += ",";
    out += names[i];
  }
  out += "\n";
  for (int row = 0; row < samples; ++row) {
    spe::Assignment a = spe::simulate(g, root, names, rng);
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) out += ",";
      const spe::Outcome& o = a.at(names[i]);
      out += o.is_real() ? fmt17(o.real()) : "'" + o.str() + "'";
    }
    out += "\n";
  }
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

int cmd_translate(const std::string& program_path, const std::string& out_path,
                  bool no_optimize, bool stats) {
  Timer timer;
  std::string text = spe::read_file(program_path);
  spe::TranslateOptions opts;
  opts.optimize = !no_optimize;
  spe::TranslateResult result = spe::translate_source(text, opts);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  spe::write_file_atomic(out_path, spe::save_graph(result.graph, result.root));
  std::cout << "nodes " << result.nodes_before_optimize << " -> "
            << result.nodes_after_optimize << "\n";
  std::cerr << "translate took " << timer.ms() << " ms\n";
  if (stats)
    std::cerr << "graph table holds " << result.graph.size()
              << " nodes including intermediates\n";
  return 0;
}

int cmd_condition(const std::string& in_path, const std::string& event_text,
                  const std::string& out_path, bool stats) {
  Timer timer;
  spe::LoadedGraph loaded = spe::load_graph(spe::read_file(in_path));
  spe::EventPtr e = spe::compile_event_text(event_text);
  spe::NodeId posterior;
  if (spe::is_equality_conjunction(e)) {
    posterior = spe::constrain(loaded.graph, loaded.root, e);
  } else {
    posterior = spe::condition(loaded.graph, loaded.root, e);
  }
  posterior = spe::optimize_graph(loaded.graph, posterior);
  spe::write_file_atomic(out_path, spe::save_graph(loaded.graph, posterior));
  std::cout << "nodes " << loaded.graph.reachable_count(posterior) << "\n";
  if (stats) std::cerr << "condition took " << timer.ms() << " ms\n";
  return 0;
}

int cmd_query(const std::string& in_path, const std::string& query_text,
              const std::string& out_path, const std::string& table_path, int samples,
              uint64_t seed, bool stats) {
  Timer timer;
  spe::LoadedGraph loaded = spe::load_graph(spe::read_file(in_path));
  QuerySpec q = parse_query_text(query_text);
  if (q.verb == "prob") {
    spe::EventPtr e = spe::compile_event_text(q.payload);
    std::cout << fmt17(spe::prob(loaded.graph, loaded.root, e)) << "\n";
  } else if (q.verb == "density") {
    spe::EventPtr e = spe::compile_event_text(q.payload);
    spe::Density d = spe::density(loaded.graph, loaded.root, e);
    std::cout << "degree=" << d.degree << " value=" << fmt17(d.value) << "\n";
  } else if (q.verb == "simulate") {
    auto names = split_names(q.payload);
    if (names.empty()) spe::fail(spe::ErrorKind::parse, "simulate needs variable names");
    std::string table = simulate_table(loaded.graph, loaded.root, names, samples, seed);
    if (table_path.empty()) {
      std::cout << table;
    } else {
      spe::write_file_atomic(table_path, table);
    }
  } else if (q.verb == "condition" || q.verb == "constrain") {
    if (out_path.empty())
      spe::fail(spe::ErrorKind::parse, q.verb + " queries need --spe-out");
    spe::EventPtr e = spe::compile_event_text(q.payload);
    spe::NodeId posterior;
    if (q.verb == "constrain" || spe::is_equality_conjunction(e)) {
      posterior = spe::constrain(loaded.graph, loaded.root, e);
    } else {
      posterior = spe::condition(loaded.graph, loaded.root, e);
    }
    posterior = spe::optimize_graph(loaded.graph, posterior);
    spe::write_file_atomic(out_path, spe::save_graph(loaded.graph, posterior));
    std::cout << "nodes " << loaded.graph.reachable_count(posterior) << "\n";
  } else {
    spe::fail(spe::ErrorKind::parse, "unknown query verb '" + q.verb + "'");
  }
  if (stats) std::cerr << "query took " << timer.ms() << " ms\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact inference on sum-product expressions"};
  app.require_subcommand(1);

  std::string program_path, spe_in, spe_out, event_text, query_text, table_out;
  bool no_optimize = false, stats = false;
  int samples = 10;
  uint64_t seed = 0;

  auto* translate = app.add_subcommand("translate", "translate a program into a graph");
  translate->add_option("--program", program_path)->required();
  translate->add_option("--spe-out", spe_out)->required();
  translate->add_flag("--no-optimize", no_optimize);
  translate->add_flag("--stats", stats);

  auto* condition = app.add_subcommand("condition", "condition a graph on an event");
  condition->add_option("--spe-in", spe_in)->required();
  condition->add_option("--event", event_text)->required();
  condition->add_option("--spe-out", spe_out)->required();
  condition->add_flag("--stats", stats);

  auto* query = app.add_subcommand("query", "run prob/density/simulate/condition");
  query->add_option("--spe-in", spe_in)->required();
  query->add_option("--query", query_text)->required();
  query->add_option("--spe-out", spe_out);
  query->add_option("--out", table_out);
  query->add_option("--samples", samples);
  query->add_option("--seed", seed);
  query->add_flag("--stats", stats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (translate->parsed()) return cmd_translate(program_path, spe_out, no_optimize, stats);
    if (condition->parsed()) return cmd_condition(spe_in, event_text, spe_out, stats);
    if (query->parsed())
      return cmd_query(spe_in, query_text, spe_out, table_out, samples, seed, stats);
  } catch (const spe::SpeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTranslate;
  }
  return kExitUsage;
}
