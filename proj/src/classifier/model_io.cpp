#include <bit>
#include <fstream>

#include <sodium.h>

#include "authorship/classifier/mlp.hpp"

namespace authorship::classifier {

namespace {

constexpr int kVariant = sodium_base64_VARIANT_ORIGINAL;
constexpr const char* kFormat = "authorship-mlp";
constexpr int kVersion = 1;

nlohmann::json encode_array(const double* data, std::size_t n, std::vector<Index> shape) {
  return {{"shape", shape}, {"data", encode_f64(std::span<const double>(data, n))}};
}

std::vector<double> decode_array(const nlohmann::json& j, const std::vector<Index>& want, const std::string& what) {
  const auto shape = j.at("shape").get<std::vector<Index>>();
  if (shape != want) {
    std::string s;
    for (auto v : shape) s += (s.empty() ? "" : "x") + std::to_string(v);
    throw ArgumentError(what + " has shape " + s + " which breaks the layer chain");
  }
  auto values = decode_f64(j.at("data").get<std::string>());
  Index expect = 1;
  for (auto v : want) expect *= v;
  if (static_cast<Index>(values.size()) != expect)
    throw ArgumentError(what + " holds " + std::to_string(values.size()) + " values for shape of " +
                        std::to_string(expect));
  return values;
}

}  // namespace

std::string encode_f64(std::span<const double> values) {
  std::vector<unsigned char> bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    const auto u = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) bytes.push_back(static_cast<unsigned char>((u >> (8 * k)) & 0xFF));
  }
  std::string out(sodium_base64_encoded_len(bytes.size(), kVariant), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(), kVariant);
  out.pop_back();  // terminator
  return out;
}

std::vector<double> decode_f64(std::string_view text) {
  std::vector<unsigned char> bytes(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(bytes.data(), bytes.size(), text.data(), text.size(), nullptr, &len, &end, kVariant) != 0 ||
      end != text.data() + text.size())
    throw ArgumentError("invalid base64 payload");
  if (len % 8 != 0) throw ArgumentError("base64 payload is not a whole number of float64 values");
  std::vector<double> out(len / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t u = 0;
    for (int k = 7; k >= 0; --k) u = (u << 8) | bytes[8 * i + static_cast<std::size_t>(k)];
    out[i] = std::bit_cast<double>(u);
  }
  return out;
}

nlohmann::json model_to_json(const MlpModel& model) {
  model.validate();
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < model.params.layers(); ++l) {
    const auto& w = model.params.weights[l];
    const auto& b = model.params.biases[l];
    // column-major storage of an in x out matrix
    layers.push_back({{"weights", encode_array(w.data(), static_cast<std::size_t>(w.size()), {w.rows(), w.cols()})},
                      {"bias", encode_array(b.data(), static_cast<std::size_t>(b.size()), {b.size()})}});
  }
  nlohmann::json j = {{"format", kFormat},
                      {"version", kVersion},
                      {"author_id", model.author_id},
                      {"input_dim", model.input_dim},
                      {"hyperparams", model.hyperparams.to_json()},
                      {"layers", layers},
                      {"n_iter", model.n_iter},
                      {"train_loss_curve", model.train_loss_curve}};
  if (model.hyperparams.standardize) {
    j["input_mean"] = encode_array(model.input_mean.data(), static_cast<std::size_t>(model.input_dim), {model.input_dim});
    j["input_scale"] = encode_array(model.input_scale.data(), static_cast<std::size_t>(model.input_dim), {model.input_dim});
  }
  return j;
}

MlpModel model_from_json(const nlohmann::json& j) {
  MlpModel m;
  try {
    if (j.value("format", std::string()) != kFormat) throw ArgumentError("not an MLP model document");
    if (j.value("version", 0) != kVersion) throw ArgumentError("unsupported model version");
    m.author_id = j.at("author_id").get<std::string>();
    m.input_dim = j.at("input_dim").get<Index>();
    if (m.input_dim <= 0) throw ArgumentError("input_dim must be positive");
    m.hyperparams = MlpHyperparams::from_json(j.at("hyperparams"));
    const auto& layers = j.at("layers");
    const std::size_t L = m.hyperparams.hidden_layer_sizes.size() + 1;
    if (layers.size() != L)
      throw ArgumentError("model lists " + std::to_string(layers.size()) + " layers, expected " + std::to_string(L));
    Index width = m.input_dim;
    for (std::size_t l = 0; l < L; ++l) {
      const Index out = l + 1 < L ? m.hyperparams.hidden_layer_sizes[l] : 1;
      const std::string name = "layer " + std::to_string(l);
      const auto w = decode_array(layers[l].at("weights"), {width, out}, name + " weights");
      const auto b = decode_array(layers[l].at("bias"), {out}, name + " bias");
      m.params.weights.push_back(Eigen::Map<const Matrix>(w.data(), width, out));
      m.params.biases.push_back(Eigen::Map<const Vector>(b.data(), out));
      width = out;
    }
    if (m.hyperparams.standardize) {
      const auto mean = decode_array(j.at("input_mean"), {m.input_dim}, "input_mean");
      const auto scale = decode_array(j.at("input_scale"), {m.input_dim}, "input_scale");
      m.input_mean = Eigen::Map<const Vector>(mean.data(), m.input_dim);
      m.input_scale = Eigen::Map<const Vector>(scale.data(), m.input_dim);
    }
    m.n_iter = j.value("n_iter", 0);
    m.train_loss_curve = j.value("train_loss_curve", std::vector<double>{});
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed model document: ") + e.what());
  }
  m.validate();
  return m;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  const auto text = model_to_json(model).dump(2);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text << '\n';
  if (!out) throw IoError("error writing " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const ArgumentError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace authorship::classifier
