#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carigeo/io.hpp"
#include "carigeo/model.hpp"
#include "carigeo/pca.hpp"
#include "carigeo/train.hpp"

/// JSON checkpoints. Documents use insertion-ordered objects so the field
/// order is fixed, and nlohmann's shortest round-trip float printing so a
/// reload reproduces every double bit for bit.
namespace carigeo {

inline constexpr int kCheckpointVersion = 1;

using OrderedJson = nlohmann::ordered_json;

namespace detail {

inline OrderedJson to_json_array(const Eigen::Ref<const Eigen::VectorXd>& v) {
  OrderedJson a = OrderedJson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::VectorXd vector_from_json(const OrderedJson& j, Eigen::Index expected, const char* field) {
  if (!j.is_array() || (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected)) {
    throw Error(ErrorKind::Parse, std::string("field '") + field + "' has the wrong length");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::Parse, std::string("field '") + field + "' holds a non-number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

inline const OrderedJson& field(const OrderedJson& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error(ErrorKind::Parse, std::string("missing field '") + name + "'");
  return j.at(name);
}

inline void check_version(const OrderedJson& j) {
  const auto& v = field(j, "version");
  if (!v.is_number_integer() || v.get<int>() != kCheckpointVersion) {
    throw Error(ErrorKind::Parse, "unsupported checkpoint version");
  }
}

inline OrderedJson parse_json(const std::string& text, const std::string& source) {
  try {
    return OrderedJson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, source + ": " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PCA model

inline OrderedJson pca_to_json(const PcaModel& m) {
  OrderedJson j;
  j["version"] = kCheckpointVersion;
  j["k"] = m.k();
  j["mean"] = detail::to_json_array(m.mean);
  OrderedJson comps = OrderedJson::array();
  for (Eigen::Index r = 0; r < m.k(); ++r) comps.push_back(detail::to_json_array(m.components.row(r).transpose()));
  j["components"] = std::move(comps);
  j["variances"] = detail::to_json_array(m.variances);
  j["total_variance"] = m.total_variance;
  return j;
}

inline PcaModel pca_from_json(const OrderedJson& j) {
  try {
    detail::check_version(j);
    const auto k = detail::field(j, "k").get<Eigen::Index>();
    if (k < 1 || k > static_cast<Eigen::Index>(kShapeDim)) throw Error(ErrorKind::Parse, "k out of range");
    PcaModel m;
    m.mean = detail::vector_from_json(detail::field(j, "mean"), kShapeDim, "mean");
    const auto& comps = detail::field(j, "components");
    if (!comps.is_array() || static_cast<Eigen::Index>(comps.size()) != k) {
      throw Error(ErrorKind::Parse, "components must have k rows");
    }
    m.components.resize(k, kShapeDim);
    for (Eigen::Index r = 0; r < k; ++r) {
      m.components.row(r) = detail::vector_from_json(comps[static_cast<std::size_t>(r)], kShapeDim, "components").transpose();
    }
    m.variances = detail::vector_from_json(detail::field(j, "variances"), k, "variances");
    m.total_variance = detail::field(j, "total_variance").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("pca checkpoint: ") + e.what());
  }
}

inline void save_pca(const PcaModel& m, const std::filesystem::path& path) {
  write_file_atomic(path, pca_to_json(m).dump(1) + "\n");
}

inline PcaModel load_pca(const std::filesystem::path& path) {
  return pca_from_json(detail::parse_json(read_text_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// Geometry GAN model

inline OrderedJson net_to_json(const DenseNet& net) {
  OrderedJson j;
  j["dims"] = net.dims();
  OrderedJson weights = OrderedJson::array();
  OrderedJson biases = OrderedJson::array();
  for (const auto& l : net.layers()) {
    OrderedJson w = OrderedJson::array();
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.push_back(l.weight(r, c));
    }
    weights.push_back(std::move(w));
    biases.push_back(detail::to_json_array(l.bias));
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  return j;
}

inline DenseNet net_from_json(const OrderedJson& j) {
  const auto dims = detail::field(j, "dims").get<std::vector<int>>();
  const auto& weights = detail::field(j, "weights");
  const auto& biases = detail::field(j, "biases");
  if (dims.size() < 2 || weights.size() != dims.size() - 1 || biases.size() != dims.size() - 1) {
    throw Error(ErrorKind::Parse, "network layer count does not match dims");
  }
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i + 1] < 1) throw Error(ErrorKind::Parse, "network dims must be positive");
    const Eigen::VectorXd flat =
        detail::vector_from_json(weights[i], static_cast<Eigen::Index>(dims[i]) * dims[i + 1], "weights");
    DenseLayer l;
    l.weight = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), dims[i + 1], dims[i]);
    l.bias = detail::vector_from_json(biases[i], dims[i + 1], "biases");
    layers.push_back(std::move(l));
  }
  return DenseNet::from_layers(std::move(layers));
}

inline OrderedJson train_config_to_json(const TrainConfig& c) {
  OrderedJson j;
  j["lambda_cyc"] = c.lambda_cyc;
  j["lambda_cha"] = c.lambda_cha;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  j["replay_buffer_size"] = c.replay_buffer_size;
  j["linear_decay"] = c.linear_decay;
  j["generator_hidden"] = c.generator_hidden;
  j["discriminator_hidden"] = c.discriminator_hidden;
  return j;
}

inline TrainConfig train_config_from_json(const OrderedJson& j) {
  TrainConfig c;
  c.lambda_cyc = detail::field(j, "lambda_cyc").get<double>();
  c.lambda_cha = detail::field(j, "lambda_cha").get<double>();
  c.learning_rate = detail::field(j, "learning_rate").get<double>();
  c.batch_size = detail::field(j, "batch_size").get<int>();
  c.epochs = detail::field(j, "epochs").get<int>();
  c.seed = detail::field(j, "seed").get<std::uint64_t>();
  c.adam_beta1 = detail::field(j, "adam_beta1").get<double>();
  c.adam_beta2 = detail::field(j, "adam_beta2").get<double>();
  c.adam_eps = detail::field(j, "adam_eps").get<double>();
  c.replay_buffer_size = detail::field(j, "replay_buffer_size").get<int>();
  c.linear_decay = detail::field(j, "linear_decay").get<bool>();
  c.generator_hidden = detail::field(j, "generator_hidden").get<std::vector<int>>();
  c.discriminator_hidden = detail::field(j, "discriminator_hidden").get<std::vector<int>>();
  return c;
}

struct ModelCheckpoint {
  GeoGanModel model;
  TrainConfig config;
  int epoch = 0;  // epochs completed
};

inline OrderedJson model_to_json(const ModelCheckpoint& c) {
  OrderedJson j;
  j["version"] = kCheckpointVersion;
  j["k"] = c.model.k();
  OrderedJson nets;
  nets["g_xy"] = net_to_json(c.model.g_xy);
  nets["g_yx"] = net_to_json(c.model.g_yx);
  nets["d_x"] = net_to_json(c.model.d_x);
  nets["d_y"] = net_to_json(c.model.d_y);
  j["nets"] = std::move(nets);
  j["mean_x"] = detail::to_json_array(c.model.mean_x);
  j["mean_y"] = detail::to_json_array(c.model.mean_y);
  j["train_config"] = train_config_to_json(c.config);
  j["epoch"] = c.epoch;
  return j;
}

inline ModelCheckpoint model_from_json(const OrderedJson& j) {
  try {
    detail::check_version(j);
    const int k = detail::field(j, "k").get<int>();
    ModelCheckpoint c;
    const auto& nets = detail::field(j, "nets");
    c.model.g_xy = net_from_json(detail::field(nets, "g_xy"));
    c.model.g_yx = net_from_json(detail::field(nets, "g_yx"));
    c.model.d_x = net_from_json(detail::field(nets, "d_x"));
    c.model.d_y = net_from_json(detail::field(nets, "d_y"));
    c.model.mean_x = detail::vector_from_json(detail::field(j, "mean_x"), k, "mean_x");
    c.model.mean_y = detail::vector_from_json(detail::field(j, "mean_y"), k, "mean_y");
    c.config = train_config_from_json(detail::field(j, "train_config"));
    c.epoch = detail::field(j, "epoch").get<int>();
    c.model.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model checkpoint: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    throw Error(ErrorKind::Parse, std::string("model checkpoint: ") + e.what());
  }
}

inline void save_model(const ModelCheckpoint& c, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(c).dump() + "\n");
}

inline ModelCheckpoint load_model(const std::filesystem::path& path) {
  return model_from_json(detail::parse_json(read_text_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// Loss report

inline std::string loss_report_csv(const std::vector<EpochLosses>& report) {
  std::string out = "adv_x,adv_y,cyc,cha_x,cha_y,total\n";
  for (const auto& e : report) {
    for (double v : {e.adv_x, e.adv_y, e.cyc, e.cha_x, e.cha_y}) {
      out += format_double(v, LmkPrecision::RoundTrip);
      out += ',';
    }
    out += format_double(e.total, LmkPrecision::RoundTrip);
    out += '\n';
  }
  return out;
}

}  // namespace carigeo
