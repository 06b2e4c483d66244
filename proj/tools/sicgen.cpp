// Command line driver: generate, check, and replay SIC test vector
// sequences for sequential cells described by a state table.
//
// Exit codes:
//   0  success
//   1  parse/validation/format error
//   2  graph not strongly connected under the strict policy
//   3  internal self-check failure (always a bug)
//   4  replay found mismatches

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sicgen/dcpw.hpp"
#include "sicgen/sicstg.hpp"
#include "sicgen/state_table.hpp"
#include "sicgen/vectors.hpp"

namespace {

struct RunConfig {
  std::string input_path;
  std::string out_path;     // empty: vectors to stdout
  std::string report_path;  // empty: report to stderr
  std::string vectors_path;
  std::string dump_graph_path;
  std::string dot_path;
  sicgen::PrunePolicy policy = sicgen::PrunePolicy::Strict;
  bool verbose = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Interrupted runs must never leave truncated output files behind.
void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("cannot write '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "': " +
                             ec.message());
  }
}

void print_warnings(const std::vector<std::string>& warnings,
                    const std::string& path) {
  for (const std::string& w : warnings) {
    std::cerr << path << ": warning: " << w << "\n";
  }
}

void chat(const RunConfig& cfg, const std::string& message) {
  if (cfg.verbose) std::cerr << message << "\n";
}

int run_generate(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const sicgen::StateTable parsed =
      sicgen::parse_state_table(read_file(cfg.input_path), &warnings);
  print_warnings(warnings, cfg.input_path);
  chat(cfg, "parsed " + std::to_string(parsed.rows.size()) + " rows for cell '" +
                parsed.cell_name + "'");

  const sicgen::StateTable table = sicgen::expand(parsed);
  const std::size_t added = table.rows.size() - parsed.rows.size();
  chat(cfg, "expansion added " + std::to_string(added) + " rows (" +
                std::to_string(table.rows.size()) + " total)");

  const sicgen::SicGraph full =
      sicgen::build_edges(table.shape, sicgen::build_vertices(table));
  chat(cfg, std::to_string(full.vertices.size()) + " vertices, " +
                std::to_string(full.edges.size()) + " edges");
  if (!cfg.dump_graph_path.empty()) {
    write_file_atomic(cfg.dump_graph_path, sicgen::dump_edge_list(full));
  }
  if (!cfg.dot_path.empty()) {
    write_file_atomic(cfg.dot_path, sicgen::to_dot(full));
  }

  auto [graph, scc_report] = sicgen::prune_and_check(full, cfg.policy);
  if (!scc_report.pruned_vertices.empty()) {
    chat(cfg, "pruned " + std::to_string(scc_report.pruned_vertices.size()) +
                  " configurations, dropped " +
                  std::to_string(scc_report.dropped_edges.size()) + " edges");
  }

  const sicgen::PostmanWalk walk = sicgen::dcpw(graph);
  chat(cfg, "walk length " + std::to_string(walk.length()) + " (" +
                std::to_string(walk.length() - graph.edges.size()) +
                " repeated traversals)");

  const sicgen::TestVectorSequence sequence =
      sicgen::walk_to_vectors(walk, graph, table);

  // Self check: the emitted expected responses must agree with the state
  // table, and the walk must cover every edge.
  sicgen::CoverageReport cov = sicgen::coverage(walk, graph, scc_report);
  cov.cell_name = table.cell_name;
  if (added > 0) {
    cov.notes.push_back(
        "expansion added " + std::to_string(added) +
        " rows; unspecified keys hold their previous memory values "
        "(applied to every missing key, level-only keys included)");
  }
  const sicgen::ReplayReport self_check = sicgen::replay(table, sequence);
  if (!self_check.ok() || !cov.complete()) {
    std::cerr << "internal self-check failed: "
              << self_check.mismatches.size() << " replay mismatches, coverage "
              << (cov.complete() ? "complete" : "incomplete")
              << "; this is a bug\n";
    return 3;
  }

  const std::string csv = sicgen::to_csv(sequence);
  if (cfg.out_path.empty()) {
    std::cout << csv;
    std::cout.flush();
  } else {
    write_file_atomic(cfg.out_path, csv);
  }
  const std::string report_text = sicgen::format_report(cov);
  if (cfg.report_path.empty()) {
    std::cerr << report_text;
  } else {
    write_file_atomic(cfg.report_path, report_text);
  }
  return 0;
}

int run_check(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const sicgen::StateTable parsed =
      sicgen::parse_state_table(read_file(cfg.input_path), &warnings);
  print_warnings(warnings, cfg.input_path);

  const sicgen::StateTable table = sicgen::expand(parsed);
  const sicgen::CompletenessReport completeness = sicgen::validate_complete(table);

  std::cout << "cell: " << table.cell_name << "\n";
  std::cout << parsed.rows.size() << " rows given, "
            << table.rows.size() - parsed.rows.size()
            << " rows added by expansion, " << table.rows.size() << " total\n";
  if (!completeness.complete()) {
    // Expansion guarantees completeness; reaching this means a bug.
    std::cerr << "internal self-check failed: expanded table is incomplete\n";
    return 3;
  }

  const sicgen::SicGraph graph =
      sicgen::build_edges(table.shape, sicgen::build_vertices(table));
  std::cout << "vertices: " << graph.vertices.size() << "\n";
  std::cout << "edges: " << graph.edges.size() << "\n";
  return 0;
}

std::string format_mismatches(const sicgen::ReplayReport& report,
                              const std::vector<std::string>& memory_names) {
  std::ostringstream out;
  out << "replay: " << report.mismatches.size() << " mismatch"
      << (report.mismatches.size() == 1 ? "" : "es") << " in "
      << report.steps_replayed << " steps\n";
  for (const sicgen::ReplayMismatch& m : report.mismatches) {
    out << "step " << m.step << ": " << memory_names[m.memory] << " expected "
        << (m.expected ? 1 : 0) << ", got " << (m.simulated ? 1 : 0) << "\n";
  }
  return out.str();
}

int run_replay(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const sicgen::StateTable parsed =
      sicgen::parse_state_table(read_file(cfg.input_path), &warnings);
  print_warnings(warnings, cfg.input_path);
  const sicgen::StateTable table = sicgen::expand(parsed);

  warnings.clear();
  sicgen::TestVectorSequence sequence;
  try {
    sequence = sicgen::parse_csv(read_file(cfg.vectors_path), table, &warnings);
  } catch (const sicgen::ParseError& e) {
    std::cerr << cfg.vectors_path << ": " << e.what() << "\n";
    return 1;
  }
  print_warnings(warnings, cfg.vectors_path);
  chat(cfg, "replaying " + std::to_string(sequence.steps.size()) + " steps");

  const sicgen::ReplayReport report = sicgen::replay(table, sequence);
  const std::string text = format_mismatches(report, table.memory_names());
  if (cfg.report_path.empty()) {
    std::cerr << text;
  } else {
    write_file_atomic(cfg.report_path, text);
    std::cerr << "replay: " << report.mismatches.size() << " mismatch"
              << (report.mismatches.size() == 1 ? "" : "es") << " in "
              << report.steps_replayed << " steps\n";
  }
  return report.ok() ? 0 : 4;
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"SIC transition test vector generator for sequential cells"};
  app.set_version_flag("--version", "sicgen 0.1.0");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string policy_name = "strict";

  CLI::App* generate = app.add_subcommand(
      "generate", "Build the SICSTG and emit a minimal covering vector sequence");
  generate->add_option("input", cfg.input_path, "State table file (.st)")
      ->required();
  generate->add_option("--out", cfg.out_path,
                       "Vector CSV output path (default: stdout)");
  generate->add_option("--report", cfg.report_path,
                       "Coverage report path (default: stderr)");
  generate
      ->add_option("--scc-policy", policy_name,
                   "Connectivity policy: strict | largest-component")
      ->check(CLI::IsMember({"strict", "largest-component"}));
  generate->add_option("--dump-graph", cfg.dump_graph_path,
                       "Write the full edge list (src -> dst per line)");
  generate->add_option("--dot", cfg.dot_path, "Write a DOT rendering");
  generate->add_flag("-v,--verbose", cfg.verbose, "Progress details on stderr");

  CLI::App* check = app.add_subcommand(
      "check", "Parse, expand, and report completeness and graph statistics");
  check->add_option("input", cfg.input_path, "State table file (.st)")
      ->required();
  check->add_flag("-v,--verbose", cfg.verbose, "Progress details on stderr");

  CLI::App* replay_cmd = app.add_subcommand(
      "replay", "Replay a vector CSV against a state table and report mismatches");
  replay_cmd->add_option("input", cfg.input_path, "State table file (.st)")
      ->required();
  replay_cmd->add_option("vectors", cfg.vectors_path, "Vector CSV file")
      ->required();
  replay_cmd->add_option("--report", cfg.report_path,
                         "Mismatch report path (default: stderr)");
  replay_cmd->add_flag("-v,--verbose", cfg.verbose, "Progress details on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  cfg.policy = policy_name == "largest-component"
                   ? sicgen::PrunePolicy::LargestComponent
                   : sicgen::PrunePolicy::Strict;

  try {
    if (generate->parsed()) return run_generate(cfg);
    if (check->parsed()) return run_check(cfg);
    if (replay_cmd->parsed()) return run_replay(cfg);
  } catch (const sicgen::ParseError& e) {
    std::cerr << cfg.input_path << ": " << e.what() << "\n";
    return 1;
  } catch (const sicgen::ConnectivityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (...) {
    std::cerr << "error: unknown failure\n";
    return 1;
  }
}
