// Command-line driver: one subcommand per pipeline operation over a state directory.

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ukg/store.hpp"

namespace {

using ukg::json;

struct Options {
  std::string state = "./ukg-state";
  bool as_json = false;
};

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::string describe(const ukg::UncertainTriple& t) {
  return t.id + "  " + t.subject + " " + t.predicate + " " + t.object.to_string() + "  " + num(t.certainty.value()) +
         "  [" + std::string(ukg::to_string(t.kind)) + "]";
}

void emit(const Options& opt, const json& data, const std::function<void()>& text) {
  if (opt.as_json) {
    std::cout << data.dump(2) << "\n";
  } else {
    text();
  }
}

// "?p graduates ?d; ?d awardedIn 1256" or a JSON array of {"s","p","o"}.
std::vector<ukg::TriplePattern> parse_patterns(const std::string& text, const ukg::Schema& schema) {
  json patterns;
  if (!text.empty() && text.front() == '[') {
    patterns = ukg::parse_json(text, "--pattern");
  } else {
    patterns = json::array();
    std::stringstream all(text);
    std::string clause;
    while (std::getline(all, clause, ';')) {
      std::istringstream words(clause);
      std::string s, p, o;
      if (!(words >> s)) continue;
      if (!(words >> p >> o)) throw ukg::Error(ukg::ErrorCode::usage, "pattern '" + clause + "' needs s p o");
      std::string rest;
      while (words >> rest) o += " " + rest;
      patterns.push_back(json{{"s", s}, {"p", p}, {"o", o}});
    }
  }
  json h{{"patterns", patterns}};
  return ukg::hypothesis_from_json(h, schema, 0.0).patterns;
}

void print_tree(const ukg::ProvenanceNode& n, int depth) {
  std::cout << std::string(static_cast<std::size_t>(depth) * 2, ' ') << n.id << "  " << n.subject << " " << n.predicate
            << " " << n.object.to_string() << "  " << num(n.certainty) << "  [" << ukg::to_string(n.kind) << ", "
            << ukg::to_string(n.derivation) << "]";
  if (n.source) std::cout << "  source " << *n.source;
  std::cout << "\n";
  for (const auto& c : n.children) print_tree(c, depth + 1);
}

int exit_code(ukg::ErrorCode code) {
  switch (code) {
    case ukg::ErrorCode::usage: return 1;
    case ukg::ErrorCode::non_termination: return 3;
    default: return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Fuse uncertain triples from sources of varying reliability into factoids and facts."};
  app.require_subcommand(1);
  app.add_option("--state", opt.state, "state directory (UKG_STATE overrides)");
  app.add_flag("--json", opt.as_json, "machine-readable output");

  std::function<void()> action;

  auto* init = app.add_subcommand("init", "create a state directory");
  std::string config_file;
  std::vector<std::string> taxonomy_files;
  init->add_option("--config", config_file, "config JSON (predicates, thresholds, aggregators)");
  init->add_option("--taxonomy", taxonomy_files, "taxonomy JSON file; repeatable");

  auto* source = app.add_subcommand("source", "manage sources");
  source->require_subcommand(1);
  auto* source_add = source->add_subcommand("add", "register a source");
  ukg::Source new_source;
  double reliability = 0.0;
  source_add->add_option("--name", new_source.name, "source name")->required();
  source_add->add_option("--reliability", reliability, "reliability in [0,1]")->required();
  source_add->add_option("--category", new_source.category, "free tag such as register or testimony")->required();
  source_add->add_option("--id", new_source.id, "source id (defaults to the name)");
  auto* source_list = source->add_subcommand("list", "list sources");

  auto* capture = app.add_subcommand("capture", "read a mention file from a source");
  std::string capture_source, capture_file;
  capture->add_option("--source", capture_source, "source id")->required();
  capture->add_option("--file", capture_file, "JSON-lines mentions")->required();

  auto* associate = app.add_subcommand("associate", "resolve entities and fuse factoids to a fixpoint");
  auto* establish = app.add_subcommand("establish", "promote factoids above pi to facts");

  auto* test = app.add_subcommand("test", "test a hypothesis and record the verdict");
  std::string hypothesis_file;
  test->add_option("--hypothesis-file", hypothesis_file, "hypothesis JSON")->required();

  auto* propagate = app.add_subcommand("propagate", "feed a verdict back into source reliabilities");
  std::string verdict_id;
  propagate->add_option("--verdict-id", verdict_id, "verdict id")->required();

  auto* query = app.add_subcommand("query", "match triple patterns against current triples");
  std::string pattern;
  query->add_option("--pattern", pattern, "e.g. \"?p graduates ?d; ?d awardedIn 1256\"")->required();

  auto* explain = app.add_subcommand("explain", "show the provenance tree of a triple");
  std::string triple_id;
  explain->add_option("--triple-id", triple_id, "triple id")->required();

  auto* exporter = app.add_subcommand("export", "write the archive to stdout or a file");
  std::string export_file;
  exporter->add_option("--output", export_file, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (const char* env = std::getenv("UKG_STATE"); env && *env) opt.state = env;

  try {
    if (init->parsed()) {
      json config = json::object();
      if (!config_file.empty()) config = ukg::parse_json(ukg::read_file(config_file), config_file);
      std::vector<ukg::Taxonomy> taxonomies;
      for (const auto& f : taxonomy_files) {
        taxonomies.push_back(ukg::taxonomy_from_json(ukg::parse_json(ukg::read_file(f), f)));
      }
      ukg::StateDir::init(opt.state, config, taxonomies);
      ukg::StateDir dir(opt.state);
      const auto state = dir.load();
      json data{{"state", opt.state},
                {"taxonomies", state.graph.schema().taxonomies().size()},
                {"predicates", state.graph.schema().predicates().size()}};
      emit(opt, data, [&] { std::cout << "initialized " << opt.state << "\n"; });
      return 0;
    }

    ukg::StateDir dir(opt.state);
    const ukg::FusionConfig config = dir.config();
    ukg::GraphState state = dir.load();

    if (source_add->parsed()) {
      if (new_source.id.empty()) new_source.id = new_source.name;
      new_source.reliability = ukg::Certainty(reliability);
      const auto& s = state.add_source(new_source);
      json data = ukg::to_json(s);
      dir.commit(state);
      emit(opt, data, [&] { std::cout << "source " << s.id << " reliability " << num(reliability) << "\n"; });
    } else if (source_list->parsed()) {
      json data = json::array();
      for (const auto& [id, s] : state.sources) data.push_back(ukg::to_json(s));
      emit(opt, data, [&] {
        for (const auto& [id, s] : state.sources) {
          std::cout << id << "  " << s.name << "  " << s.category << "  " << num(s.reliability.value()) << "\n";
        }
      });
    } else if (capture->parsed()) {
      const auto statements = ukg::import_mentions(capture_file, state, capture_source);
      const auto report = ukg::capture(state, capture_source, statements, config);
      dir.commit(state);
      emit(opt, ukg::to_json(report), [&] {
        std::cout << "captured " << report.mentions.size() << " mentions from " << capture_source << " ("
                  << report.facts.size() << " direct facts)\n";
      });
    } else if (associate->parsed()) {
      const auto report = ukg::associate(state, config);
      dir.commit(state);
      emit(opt, ukg::to_json(report), [&] {
        std::cout << report.created.size() << " new factoids\n";
        if (!report.updated.empty()) std::cout << report.updated.size() << " updated\n";
        if (!report.retracted.empty()) std::cout << report.retracted.size() << " retracted\n";
        for (const auto& [from, to] : report.merges) std::cout << "merged " << from << " into " << to << "\n";
      });
    } else if (establish->parsed()) {
      const auto report = ukg::establish(state, config);
      dir.commit(state);
      emit(opt, ukg::to_json(report, state.graph), [&] {
        std::cout << report.facts.size() << " facts (" << report.promoted.size() << " promoted, "
                  << report.demoted.size() << " demoted)\n";
        for (const auto& id : report.facts) std::cout << "  " << describe(state.graph.triple(id)) << "\n";
        for (const auto& id : report.demoted) std::cout << "  demoted " << describe(state.graph.triple(id)) << "\n";
      });
    } else if (test->parsed()) {
      const json j = ukg::parse_json(ukg::read_file(hypothesis_file), hypothesis_file);
      ukg::Hypothesis h = ukg::hypothesis_from_json(j, state.graph.schema(), config.theta);
      std::vector<std::string> warnings;
      std::string hid = h.id;
      if (hid.empty() || !state.hypotheses.count(hid)) hid = ukg::add_hypothesis(state, std::move(h), &warnings).id;
      const auto& verdict = ukg::record_verdict(state, ukg::test_hypothesis(state, state.hypotheses.at(hid), config));
      json data = ukg::to_json(verdict);
      dir.commit(state);
      emit(opt, data, [&] {
        std::cout << verdict.id << " " << ukg::to_string(verdict.status);
        if (verdict.best_score()) std::cout << " score " << num(*verdict.best_score());
        std::cout << " (theta " << num(verdict.theta) << ")\n";
        for (const auto& b : verdict.bindings) {
          std::cout << " ";
          for (const auto& [name, v] : b.vars) std::cout << " ?" << name << "=" << v.to_string();
          std::cout << "  " << num(b.score) << "\n";
        }
        for (const auto& w : verdict.warnings) std::cerr << "warning: " << w << "\n";
      });
    } else if (propagate->parsed()) {
      const auto report = ukg::propagate_feedback(state, verdict_id, config);
      dir.commit(state);
      emit(opt, ukg::to_json(report), [&] {
        for (const auto& r : report.reliabilities) {
          std::cout << r.source << " reliability " << num(r.before) << " -> " << num(r.after) << "\n";
        }
        for (const auto& id : report.demoted) std::cout << "demoted " << id << "\n";
      });
    } else if (query->parsed()) {
      const auto bindings = ukg::match_patterns(state.graph, parse_patterns(pattern, state.graph.schema()),
                                                &state.aliases);
      json data = json::array();
      for (const auto& b : bindings) data.push_back(ukg::to_json(b));
      emit(opt, data, [&] {
        for (const auto& b : bindings) {
          for (const auto& [name, v] : b.vars) std::cout << "?" << name << "=" << v.to_string() << " ";
          std::cout << num(b.score) << "\n";
        }
        if (bindings.empty()) std::cout << "no match\n";
      });
    } else if (explain->parsed()) {
      const auto tree = ukg::decompose(state.graph, triple_id);
      emit(opt, ukg::to_json(tree), [&] { print_tree(tree, 0); });
    } else if (exporter->parsed()) {
      const std::string archive = ukg::dump_archive(state);
      if (export_file.empty()) {
        std::cout << archive;
      } else {
        ukg::save(state, export_file);
      }
    }
    return 0;
  } catch (const ukg::Error& e) {
    std::cerr << "ukg: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "ukg: " << e.what() << "\n";
    return 2;
  }
}
