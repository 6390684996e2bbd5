#pragma once

// Fixtures shared by the unit tests and the acceptance runner.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ukg/codec.hpp"
#include "ukg/pipeline.hpp"

namespace fixture {

// F1: Europe{France{ParisianRegion{Paris, Versailles}}, Italy{Roma}}
ukg::Taxonomy places();
// F2: diploma{master, doctorate}
ukg::Taxonomy diplomas();

// bornIn -> places (tau 1), isA -> diplomas (tau 0), graduates -> entity,
// awardedIn -> year, nickname -> text.
ukg::Schema schema();
ukg::FusionConfig config();

ukg::GraphState empty_state();
ukg::GraphState state_with_sources(const std::vector<std::pair<std::string, double>>& sources);

ukg::Statement stmt(const std::string& s, const std::string& p, ukg::RawObject o, double credibility = 1.0);

// Adds a mention with the given certainty from source `src` (credibility = certainty / reliability).
ukg::TripleId mention(ukg::GraphState& st, const std::string& src, const std::string& s, const std::string& p,
                      ukg::Value o, double certainty);

// The worked end state: graduates 0.99, isA master 0.58, awardedIn 1256 0.98,
// held as single mentions of a fully reliable source.
ukg::GraphState end_state();

// The three-source diploma scenario run through capture/associate/establish:
// S1 and S2 (0.7) before S3 (0.9), with an establish after each round.
ukg::GraphState diploma_scenario();

ukg::Hypothesis graduation_hypothesis(double theta = 0.9);

// Live triple of `subject predicate object`, or null.
const ukg::UncertainTriple* live(const ukg::GraphState& st, const std::string& s, const std::string& p,
                                 const ukg::Value& o);

std::string path(const std::string& name);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch(const std::string& name);

// Fixture config.json plus the two fixture taxonomies.
ukg::json config_json();
std::vector<ukg::Taxonomy> taxonomies();

struct CliResult {
  int code = -1;
  std::string out;
};

// Runs the ukg binary through the shell with UKG_STATE cleared unless `env`
// sets it. stderr is dropped unless `merge_stderr`.
CliResult run_cli(const std::string& args, const std::string& env = "", bool merge_stderr = false);

}  // namespace fixture
