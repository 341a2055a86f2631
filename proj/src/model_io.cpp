#include "dirmix/model_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dirmix {

namespace {

using nlohmann::json;

std::vector<std::string> parse_labels(const json& doc, const char* key,
                                      std::size_t expected) {
  std::vector<std::string> labels;
  if (!doc.contains(key)) return labels;
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw DomainError(std::string("model file: ") + key + " must be an array");
  for (const json& item : arr) {
    if (!item.is_string()) {
      throw DomainError(std::string("model file: ") + key + " entries must be strings");
    }
    labels.push_back(item.get<std::string>());
  }
  if (labels.size() != expected) {
    throw DomainError(std::string("model file: ") + key + " has " +
                      std::to_string(labels.size()) + " labels for " +
                      std::to_string(expected) + " entries");
  }
  return labels;
}

}  // namespace

ModelFile parse_model_json(const std::string& text, double alpha_scale, bool algebraic) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("model file: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("alpha") || !doc.contains("beta")) {
    throw DomainError("model file: expected an object with alpha and beta");
  }
  if (!doc["alpha"].is_array() || !doc["beta"].is_array()) {
    throw DomainError("model file: alpha and beta must be arrays");
  }
  std::vector<double> alpha;
  for (const json& a : doc["alpha"]) {
    if (!a.is_number()) throw DomainError("model file: alpha entries must be numbers");
    alpha.push_back(a.get<double>() * alpha_scale);
  }
  std::vector<std::vector<double>> beta;
  for (const json& row : doc["beta"]) {
    if (!row.is_array()) {
      throw DomainError("model file: beta must be an array of per-vocabulary rows");
    }
    std::vector<double> r;
    for (const json& b : row) {
      if (!b.is_number()) throw DomainError("model file: beta entries must be numbers");
      r.push_back(b.get<double>());
    }
    if (r.size() != alpha.size()) {
      throw DomainError("model file: every beta row needs one column per cause");
    }
    beta.push_back(std::move(r));
  }

  ModelFile out{Model(std::move(alpha), std::move(beta), algebraic),
                parse_labels(doc, "vocab", doc["beta"].size()),
                parse_labels(doc, "causes", doc["alpha"].size())};
  return out;
}

ModelFile load_model_file(const std::string& path, double alpha_scale, bool algebraic) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open model file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model_json(buffer.str(), alpha_scale, algebraic);
}

namespace {

int parse_index(const std::string& field, int vocab_size) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(field, &pos);
  } catch (const std::exception&) {
    throw DomainError("observations: '" + field + "' is not a vocabulary index");
  }
  while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
  if (pos != field.size()) {
    throw DomainError("observations: '" + field + "' is not a vocabulary index");
  }
  if (value < 0 || value >= vocab_size) {
    throw DomainError("observations: index " + std::to_string(value) +
                      " outside the vocabulary of size " + std::to_string(vocab_size));
  }
  return value;
}

}  // namespace

ObservationSeq parse_observations(const std::string& csv, int vocab_size) {
  ObservationSeq obs;
  std::string trimmed = csv;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (!trimmed.empty()) trimmed.erase(trimmed.find_last_not_of(" \t\r\n") + 1);
  if (trimmed.empty()) return obs;
  std::stringstream ss(trimmed);
  std::string field;
  while (std::getline(ss, field, ',')) {
    obs.tokens.push_back(parse_index(field, vocab_size));
  }
  return obs;
}

ObservationSeq load_observations_file(const std::string& path, int vocab_size) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open observations file: " + path);
  ObservationSeq obs;
  std::string line;
  while (std::getline(in, line)) {
    line.erase(0, line.find_first_not_of(" \t\r\n"));
    if (!line.empty()) line.erase(line.find_last_not_of(" \t\r\n") + 1);
    if (line.empty()) continue;
    obs.tokens.push_back(parse_index(line, vocab_size));
  }
  return obs;
}

}  // namespace dirmix
