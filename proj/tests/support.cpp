#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>

#include "ukg/store.hpp"

namespace fixture {

using namespace ukg;

Taxonomy places() {
  return Taxonomy::from_edges("places", "Europe",
                              {{"Europe", "France"},
                               {"Europe", "Italy"},
                               {"France", "ParisianRegion"},
                               {"ParisianRegion", "Paris"},
                               {"ParisianRegion", "Versailles"},
                               {"Italy", "Roma"}});
}

Taxonomy diplomas() { return Taxonomy::from_edges("diplomas", "diploma", {{"diploma", "master"}, {"diploma", "doctorate"}}); }

Schema schema() {
  Schema s;
  s.add_taxonomy(places());
  s.add_taxonomy(diplomas());
  s.add_predicate(Predicate{"bornIn", DomainKind::taxonomy, "places", 1});
  s.add_predicate(Predicate{"isA", DomainKind::taxonomy, "diplomas", 0});
  s.add_predicate(Predicate{"graduates", DomainKind::entity, "", 0});
  s.add_predicate(Predicate{"awardedIn", DomainKind::year, "", 0});
  s.add_predicate(Predicate{"nickname", DomainKind::text, "", 0});
  return s;
}

FusionConfig config() {
  FusionConfig c;
  c.tau = {{"bornIn", 1}, {"isA", 0}};
  return c;
}

GraphState empty_state() {
  GraphState st;
  st.graph = Graph(schema());
  return st;
}

GraphState state_with_sources(const std::vector<std::pair<std::string, double>>& sources) {
  GraphState st = empty_state();
  for (const auto& [id, r] : sources) st.add_source(Source{id, id, "test", Certainty(r)});
  return st;
}

Statement stmt(const std::string& s, const std::string& p, RawObject o, double credibility) {
  Statement out;
  out.subject = s;
  out.predicate = p;
  out.object = std::move(o);
  out.credibility = credibility;
  return out;
}

TripleId mention(GraphState& st, const std::string& src, const std::string& s, const std::string& p, Value o,
                 double certainty) {
  const double r = st.source(src).reliability.value();
  TripleDraft d;
  d.subject = s;
  d.predicate = p;
  d.object = std::move(o);
  d.certainty = certainty;
  d.source = src;
  d.credibility = r > 0 ? certainty / r : 0.0;
  return st.graph.add(std::move(d)).id;
}

GraphState end_state() {
  GraphState st = state_with_sources({{"S", 1.0}});
  st.graph.set_entity("ThomasAquinas", "Thomas Aquinas");
  mention(st, "S", "ThomasAquinas", "graduates", Value::entity("diploma2"), 0.99);
  mention(st, "S", "diploma2", "isA", Value::node("master"), 0.58);
  mention(st, "S", "diploma2", "awardedIn", Value::year(1256), 0.98);
  return st;
}

GraphState diploma_scenario() {
  GraphState st = state_with_sources({{"S1", 0.7}, {"S2", 0.7}, {"S3", 0.9}});
  const FusionConfig cfg = config();
  capture(st, "S1",
          {stmt("ThomasAquinas", "graduates", std::string("diploma2")), stmt("diploma2", "isA", std::string("master")),
           stmt("diploma2", "awardedIn", std::int64_t{1256})},
          cfg);
  capture(st, "S2",
          {stmt("ThomasAquinas", "graduates", std::string("diploma2")), stmt("diploma2", "isA", std::string("master")),
           stmt("diploma2", "awardedIn", std::int64_t{1256}, 0.9)},
          cfg);
  st.graph.set_entity("ThomasAquinas", "Thomas Aquinas");
  associate(st, cfg);
  establish(st, cfg);
  capture(st, "S3",
          {stmt("ThomasAquinas", "graduates", std::string("diploma3")),
           stmt("diploma3", "isA", std::string("doctorate"), 0.4),
           stmt("diploma3", "awardedIn", std::int64_t{1256}, 0.9)},
          cfg);
  associate(st, cfg);
  establish(st, cfg);
  return st;
}

Hypothesis graduation_hypothesis(double theta) {
  Hypothesis h;
  h.id = "h1";
  h.threshold = Certainty(theta);
  h.patterns = {TriplePattern{Term::var("p"), "graduates", Term::var("d")},
                TriplePattern{Term::var("d"), "awardedIn", Term::of(Value::year(1256))}};
  return h;
}

const UncertainTriple* live(const GraphState& st, const std::string& s, const std::string& p, const Value& o) {
  for (const auto& id : current_triples(st.graph)) {
    const UncertainTriple& t = st.graph.triple(id);
    if (t.subject == s && t.predicate == p && t.object == o) return &t;
  }
  return nullptr;
}

std::string path(const std::string& name) { return std::string(UKG_FIXTURE_DIR) + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("ukg-test-" + std::to_string(::getpid()) + "-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json config_json() { return parse_json(read_file(path("config.json")), "config"); }

std::vector<Taxonomy> taxonomies() { return {places(), diplomas()}; }

CliResult run_cli(const std::string& args, const std::string& env, bool merge_stderr) {
  const std::string cmd = "env -u UKG_STATE " + env + " " + UKG_CLI + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace fixture
