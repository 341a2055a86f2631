#pragma once

#include <string>
#include <vector>

#include "dirmix/model.hpp"

namespace dirmix {

// Parsed on-disk model document:
//   {"alpha": [...], "beta": [[one row per vocabulary item, one column per
//    cause]], "vocab": [...], "causes": [...]}
// vocab/causes are optional labels; beta[v][z] matches beta(w|z).
struct ModelFile {
  Model model;
  std::vector<std::string> vocab;
  std::vector<std::string> causes;
};

ModelFile load_model_file(const std::string& path, double alpha_scale = 1.0,
                          bool algebraic = false);

ModelFile parse_model_json(const std::string& text, double alpha_scale = 1.0,
                           bool algebraic = false);

// Comma-separated vocabulary indices; the empty string is the empty sequence.
ObservationSeq parse_observations(const std::string& csv, int vocab_size);

// One index per line; blank lines are ignored.
ObservationSeq load_observations_file(const std::string& path, int vocab_size);

}  // namespace dirmix
