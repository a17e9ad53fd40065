#include "ads/nn/model.hpp"

#include <nlohmann/json.hpp>

#include "ads/error.hpp"

namespace ads::nn {

using nlohmann::json;

Shape ModelSpec::output_shape() const {
  Shape shape = input;
  for (const auto& ls : layers) shape = make_layer(ls)->output_shape(shape);
  return shape;
}

void to_json(json& j, const ModelSpec& spec) {
  j = json::object();
  j["input"] = spec.input;
  j["layers"] = json::array();
  for (const auto& l : spec.layers) {
    json lj = {{"type", std::string(to_string(l.kind))}};
    switch (l.kind) {
      case LayerKind::Conv1d:
      case LayerKind::ConvTranspose1d:
        lj["in"] = l.in;
        lj["out"] = l.out;
        lj["kernel"] = l.kernel;
        lj["stride"] = l.stride;
        break;
      case LayerKind::Dense:
        lj["in"] = l.in;
        lj["out"] = l.out;
        break;
      case LayerKind::MaxPool1d:
      case LayerKind::Upsample1d:
        lj["factor"] = l.factor;
        break;
      case LayerKind::Reshape:
        lj["channels"] = l.channels;
        lj["length"] = l.length;
        break;
      case LayerKind::WinnerTakeAll:
        lj["sparsity"] = l.sparsity;
        break;
      default:
        break;
    }
    j["layers"].push_back(lj);
  }
}

void from_json(const json& j, ModelSpec& spec) {
  try {
    spec.input = j.at("input").get<Shape>();
    spec.layers.clear();
    for (const auto& lj : j.at("layers")) {
      LayerSpec l;
      l.kind = parse_layer_kind(lj.at("type").get<std::string>());
      l.in = lj.value("in", std::size_t{0});
      l.out = lj.value("out", std::size_t{0});
      l.kernel = lj.value("kernel", std::size_t{0});
      l.stride = lj.value("stride", std::size_t{1});
      l.factor = lj.value("factor", std::size_t{2});
      l.channels = lj.value("channels", std::size_t{0});
      l.length = lj.value("length", std::size_t{0});
      l.sparsity = lj.value("sparsity", 1.0);
      spec.layers.push_back(l);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("model spec: ") + e.what());
  }
}

Model::Model(ModelSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  (void)spec_.output_shape();
  Rng rng(seed);
  for (const auto& ls : spec_.layers) {
    layers_.push_back(make_layer(ls));
    layers_.back()->initialize(rng);
  }
}

Model::Model(const Model& other) : spec_(other.spec_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Model& Model::operator=(const Model& other) {
  if (this != &other) {
    Model copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Model::check_input(const Tensor& batch) const {
  if (batch.rank() != spec_.input.size() + 1 ||
      !std::equal(spec_.input.begin(), spec_.input.end(), batch.shape().begin() + 1)) {
    throw Error(ErrorCode::ShapeMismatch,
                "model expects [B]+" + shape_string(spec_.input) + ", got " + shape_string(batch.shape()));
  }
}

Tensor Model::forward(const Tensor& batch) {
  check_input(batch);
  Tensor x = batch;
  for (auto& l : layers_) x = l->forward(x);
  return x;
}

Tensor Model::backward(const Tensor& grad_out) {
  Tensor g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

Tensor Model::infer(const Tensor& batch) const {
  check_input(batch);
  Tensor x = batch;
  for (const auto& l : layers_) x = l->infer(x);
  return x;
}

std::vector<ParamTensor*> Model::params() {
  std::vector<ParamTensor*> out;
  for (auto& l : layers_) {
    for (auto* p : l->params()) out.push_back(p);
  }
  return out;
}

std::vector<const ParamTensor*> Model::params() const {
  std::vector<const ParamTensor*> out;
  for (const auto& l : layers_) {
    // Layer::params() is non-const only because it hands out mutable access.
    for (auto* p : const_cast<Layer&>(*l).params()) out.push_back(p);
  }
  return out;
}

void Model::zero_grad() {
  for (auto* p : params()) p->zero_grad();
}

std::size_t Model::num_params() const {
  std::size_t n = 0;
  for (const auto* p : params()) n += p->value.size();
  return n;
}

std::vector<double> Model::flat_values() const {
  std::vector<double> out;
  out.reserve(num_params());
  for (const auto* p : params()) out.insert(out.end(), p->value.values().begin(), p->value.values().end());
  return out;
}

void Model::set_flat_values(std::span<const double> values) {
  if (values.size() != num_params()) throw Error(ErrorCode::ShapeMismatch, "flat parameter size mismatch");
  std::size_t offset = 0;
  for (auto* p : params()) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), p->value.size(), p->value.values().begin());
    offset += p->value.size();
  }
}

ModelSpec classifier_spec(std::size_t window, std::size_t classes) {
  ModelSpec s;
  s.input = {3, window};
  s.layers = {conv1d(3, 8, 5), relu(), maxpool1d(2), conv1d(8, 16, 5), relu(), global_avg_pool(),
              dense(16, classes)};
  return s;
}

ModelSpec embedding_spec(std::size_t window, std::size_t embedding_dim) {
  ModelSpec s;
  s.input = {3, window};
  s.layers = {conv1d(3, 8, 5), relu(), maxpool1d(2), conv1d(8, 16, 5), relu(), global_avg_pool(),
              dense(16, embedding_dim), l2_normalize()};
  return s;
}

}  // namespace ads::nn
