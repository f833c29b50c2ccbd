#include "fwus/checkpoint.hpp"

#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "fwus/error.hpp"

namespace fwus {
namespace {

using nlohmann::json;
constexpr const char* kFormat = "fwus-lstm";

template <class M>
json matrix_json(const M& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  return flat;
}

template <class M>
void read_matrix(const json& j, const char* key, M& m) {
  const auto flat = j.at(key).get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != m.size()) {
    fail(ErrorCode::kShape, std::string("checkpoint array '") + key + "' has the wrong length");
  }
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = flat[k++];
}

}  // namespace

void save_checkpoint(const LstmModel& model, std::ostream& out) {
  json j;
  j["format"] = kFormat;
  j["version"] = kCheckpointVersion;
  j["input_size"] = model.input_size();
  j["hidden_size"] = model.hidden_size();
  j["window"] = model.window;
  j["phase_period"] = model.phase_period;
  j["margin"] = model.margin;
  j["trained"] = model.trained;
  j["w_in"] = matrix_json(model.w_in);
  j["w_rec"] = matrix_json(model.w_rec);
  j["bias"] = matrix_json(model.bias);
  j["w_out"] = matrix_json(model.w_out);
  j["b_out"] = model.b_out;
  j["feature_mean"] = matrix_json(model.feature_mean);
  j["feature_scale"] = matrix_json(model.feature_scale);
  j["target_mean"] = model.target_mean;
  j["target_scale"] = model.target_scale;
  out << j.dump(1) << '\n';
  if (!out) fail(ErrorCode::kIo, "failed writing checkpoint");
}

void save_checkpoint(const LstmModel& model, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  save_checkpoint(model, f);
}

LstmModel load_checkpoint(std::istream& in) {
  json j;
  try {
    in >> j;
    if (j.value("format", std::string{}) != kFormat) fail(ErrorCode::kIo, "not an LSTM checkpoint");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      fail(ErrorCode::kIo, "unsupported checkpoint version " + std::to_string(version));
    }
    LstmModel m(j.at("input_size").get<int>(), j.at("hidden_size").get<int>());
    m.window = j.at("window").get<int>();
    m.phase_period = j.at("phase_period").get<double>();
    m.margin = j.at("margin").get<double>();
    m.trained = j.at("trained").get<bool>();
    read_matrix(j, "w_in", m.w_in);
    read_matrix(j, "w_rec", m.w_rec);
    read_matrix(j, "bias", m.bias);
    read_matrix(j, "w_out", m.w_out);
    m.b_out = j.at("b_out").get<double>();
    read_matrix(j, "feature_mean", m.feature_mean);
    read_matrix(j, "feature_scale", m.feature_scale);
    m.target_mean = j.at("target_mean").get<double>();
    m.target_scale = j.at("target_scale").get<double>();
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, std::string("malformed checkpoint: ") + e.what());
  }
}

LstmModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open " + path.string());
  return load_checkpoint(f);
}

}  // namespace fwus
