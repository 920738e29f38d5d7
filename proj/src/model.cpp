// Copyright 2026 The qden Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qden/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "qden/error.hpp"
#include "qden/rng.hpp"

namespace qden::nn {
namespace {

constexpr char kMagic[4] = {'Q', 'N', 'N', '1'};

std::size_t num_blocks(const ModelConfig& config) { return config.filters.size(); }

std::vector<std::uint32_t> decoder_widths(const ModelConfig& config) {
  return {config.filters.rbegin(), config.filters.rend()};
}

nlohmann::ordered_json config_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["dim"] = c.dim;
  j["filters"] = c.filters;
  j["kernel"] = c.kernel;
  j["dropout"] = c.dropout;
  j["lambda"] = c.lambda;
  return j;
}

ModelConfig config_from(const nlohmann::json& j) {
  ModelConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "dim") c.dim = value.get<std::uint32_t>();
    else if (key == "filters") c.filters = value.get<std::vector<std::uint32_t>>();
    else if (key == "kernel") c.kernel = value.get<std::uint32_t>();
    else if (key == "dropout") c.dropout = value.get<double>();
    else if (key == "lambda") c.lambda = value.get<double>();
    else throw InvalidArgument("model config: unknown key '" + key + "'");
  }
  return c;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* dst, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError(std::string("truncated checkpoint while reading ") + what,
                        offset_ + static_cast<std::uint64_t>(in_.gcount()));
    }
    offset_ += n;
  }
  std::uint32_t u32(const char* what) {
    unsigned char b[4];
    bytes(b, 4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::uint64_t u64(const char* what) {
    unsigned char b[8];
    bytes(b, 8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::uint64_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

}  // namespace

void validate(const ModelConfig& c) {
  if (c.dim == 0) throw InvalidArgument("model config: dim must be positive");
  if (c.filters.empty()) throw InvalidArgument("model config: need at least one encoder block");
  for (auto f : c.filters)
    if (f == 0) throw InvalidArgument("model config: filter counts must be positive");
  if (c.filters.size() > 16 || c.dim % (1u << c.filters.size()) != 0) {
    throw InvalidArgument("model config: dim " + std::to_string(c.dim) + " is not divisible by 2^" +
                          std::to_string(c.filters.size()));
  }
  if (c.kernel == 0 || c.kernel % 2 == 0) throw InvalidArgument("model config: kernel must be odd and positive");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw InvalidArgument("model config: dropout must lie in [0, 1)");
  if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) throw InvalidArgument("model config: lambda must be >= 0");
}

std::string to_json(const ModelConfig& config) { return config_json(config).dump(); }

ModelConfig model_config_from_json(const std::string& text) {
  try {
    return config_from(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("model config: ") + e.what());
  }
}

void ModelParams::add(std::string name, Tensor value) {
  Param p{std::move(name), std::move(value), {}, {}};
  p.adam_m = Tensor(p.value.shape());
  p.adam_v = Tensor(p.value.shape());
  params.push_back(std::move(p));
}

const Param* ModelParams::find(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

Param* ModelParams::find(const std::string& name) {
  for (auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

std::size_t ModelParams::count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.value.numel();
  return n;
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  validate(config);
  Rng rng(seed);
  ModelParams mp;
  const std::size_t k = config.kernel;
  auto add_conv = [&](const std::string& prefix, std::size_t cin, std::size_t cout) {
    const double limit = std::sqrt(6.0 / static_cast<double>(k * k * cin + k * k * cout));
    Tensor w({k, k, cin, cout});
    for (double& v : w.data()) v = (2.0 * rng.uniform01() - 1.0) * limit;
    mp.add(prefix + ".w", std::move(w));
    mp.add(prefix + ".b", Tensor({cout}));
  };
  std::size_t cin = 2;
  for (std::size_t i = 0; i < config.filters.size(); ++i) {
    add_conv("enc" + std::to_string(i), cin, config.filters[i]);
    cin = config.filters[i];
  }
  const auto dec = decoder_widths(config);
  for (std::size_t i = 0; i < dec.size(); ++i) {
    add_conv("dec" + std::to_string(i), cin, dec[i]);
    cin = dec[i];
  }
  add_conv("head", cin, 2);
  return mp;
}

ForwardTrace model_forward(const ModelParams& params, const ModelConfig& config, const Tensor& x, bool train_mode,
                           std::uint64_t dropout_seed) {
  if (x.rank() != 4 || x.dim(1) != config.dim || x.dim(2) != config.dim || x.dim(3) != 2) {
    throw InvalidArgument("model_forward: expected input (N, " + std::to_string(config.dim) + ", " +
                          std::to_string(config.dim) + ", 2), got " + shape_to_string(x.shape()));
  }
  const std::size_t blocks = 2 * num_blocks(config);
  if (params.params.size() != 2 * blocks + 2) throw InvalidArgument("model_forward: parameter count mismatch");

  Rng rng(dropout_seed);
  ForwardTrace trace;
  trace.blocks.resize(blocks);
  Tensor h = x;
  for (std::size_t i = 0; i < blocks; ++i) {
    auto& blk = trace.blocks[i];
    const bool encoder = i < num_blocks(config);
    blk.input = std::move(h);
    blk.preact = conv2d_forward(blk.input, params.params[2 * i].value, params.params[2 * i + 1].value);
    Tensor act = relu_forward(blk.preact);
    blk.relu_shape = act.shape();
    Tensor resized;
    if (encoder) {
      auto pooled = maxpool2_forward(act);
      blk.pool_argmax = std::move(pooled.argmax);
      resized = std::move(pooled.y);
    } else {
      resized = upsample2_forward(act);
    }
    auto dropped = dropout_forward(resized, config.dropout, train_mode, rng);
    blk.dropout_mask = std::move(dropped.mask);
    h = std::move(dropped.y);
  }
  trace.head_input = std::move(h);
  trace.output = conv2d_forward(trace.head_input, params.params[2 * blocks].value, params.params[2 * blocks + 1].value);
  return trace;
}

std::vector<Tensor> model_backward(const ModelParams& params, const ModelConfig& config, const ForwardTrace& trace,
                                   const Tensor& dout) {
  const std::size_t blocks = trace.blocks.size();
  if (dout.shape() != trace.output.shape()) throw InvalidArgument("model_backward: gradient shape mismatch");
  std::vector<Tensor> grads(params.params.size());

  auto head = conv2d_backward(trace.head_input, params.params[2 * blocks].value, dout);
  grads[2 * blocks] = std::move(head.dw);
  grads[2 * blocks + 1] = std::move(head.db);
  Tensor g = std::move(head.dx);
  for (std::size_t i = blocks; i-- > 0;) {
    const auto& blk = trace.blocks[i];
    const bool encoder = i < num_blocks(config);
    g = dropout_backward(blk.dropout_mask, g);
    g = encoder ? maxpool2_backward(blk.pool_argmax, blk.relu_shape, g) : upsample2_backward(g);
    g = relu_backward(blk.preact, g);
    auto cg = conv2d_backward(blk.input, params.params[2 * i].value, g, i > 0);
    grads[2 * i] = std::move(cg.dw);
    grads[2 * i + 1] = std::move(cg.db);
    g = std::move(cg.dx);
  }
  return grads;
}

void adam_step(ModelParams& params, const std::vector<Tensor>& grads, double lr, const AdamConfig& adam) {
  if (grads.size() != params.params.size()) throw InvalidArgument("adam_step: gradient count mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].shape() != params.params[i].value.shape()) {
      throw InvalidArgument("adam_step: gradient shape mismatch for " + params.params[i].name);
    }
    if (!grads[i].all_finite()) throw NumericError("adam_step: non-finite gradient in " + params.params[i].name);
  }
  ++params.step;
  const double t = static_cast<double>(params.step);
  const double c1 = 1.0 - std::pow(adam.beta1, t);
  const double c2 = 1.0 - std::pow(adam.beta2, t);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto w = params.params[i].value.data();
    auto m = params.params[i].adam_m.data();
    auto v = params.params[i].adam_v.data();
    const auto g = grads[i].data();
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = adam.beta1 * m[j] + (1.0 - adam.beta1) * g[j];
      v[j] = adam.beta2 * v[j] + (1.0 - adam.beta2) * g[j] * g[j];
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      w[j] -= lr * mhat / (std::sqrt(vhat) + adam.epsilon);
    }
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  validate(ckpt.config);
  nlohmann::ordered_json header;
  header["model"] = config_json(ckpt.config);
  try {
    header["metadata"] = nlohmann::ordered_json::parse(ckpt.metadata_json);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("save_checkpoint: metadata is not JSON: ") + e.what());
  }
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("save_checkpoint: cannot open " + path.string());
  out.write(kMagic, 4);
  put_u32(out, kQnnVersion);
  put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  put_u32(out, static_cast<std::uint32_t>(ckpt.params.params.size()));
  for (const auto& p : ckpt.params.params) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_u32(out, static_cast<std::uint32_t>(p.value.rank()));
    for (auto d : p.value.shape()) put_u64(out, d);
    for (double v : p.value.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  out.flush();
  if (!out) throw IoError("save_checkpoint: write to " + path.string() + " failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<ModelConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_checkpoint: cannot open " + path.string());
  Reader rd(in);
  char magic[4];
  rd.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad checkpoint magic", 0);
  const auto version = rd.u32("version");
  if (version != kQnnVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version), 4);
  const auto header_len = rd.u32("header length");
  if (header_len > (1u << 24)) throw FormatError("implausible header length", 8);
  std::string header_text(header_len, '\0');
  rd.bytes(header_text.data(), header_len, "header");

  Checkpoint ckpt;
  try {
    const auto header = nlohmann::json::parse(header_text);
    ckpt.config = config_from(header.at("model"));
    ckpt.metadata_json = header.value("metadata", nlohmann::json::object()).dump();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint header: ") + e.what(), 12);
  }
  validate(ckpt.config);
  if (expected && !(*expected == ckpt.config)) {
    throw ConfigMismatch("checkpoint config " + to_json(ckpt.config) + " does not match requested " +
                         to_json(*expected));
  }

  const ModelParams reference = init_params(ckpt.config, 0);
  const auto count = rd.u32("tensor count");
  if (count != reference.params.size()) {
    throw ConfigMismatch("checkpoint holds " + std::to_string(count) + " tensors, config implies " +
                         std::to_string(reference.params.size()));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = rd.u32("tensor name length");
    if (name_len > 4096) throw FormatError("implausible tensor name length", rd.offset() - 4);
    std::string name(name_len, '\0');
    rd.bytes(name.data(), name_len, "tensor name");
    const auto rank = rd.u32("tensor rank");
    if (rank > 8) throw FormatError("implausible tensor rank", rd.offset() - 4);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = rd.u64("tensor dims");
    const Param& ref = reference.params[i];
    if (name != ref.name || shape != ref.value.shape()) {
      throw ConfigMismatch("checkpoint tensor '" + name + "' " + shape_to_string(shape) + " does not match '" +
                           ref.name + "' " + shape_to_string(ref.value.shape()));
    }
    Tensor value(shape);
    for (double& v : value.data()) v = std::bit_cast<double>(rd.u64("tensor payload"));
    ckpt.params.add(std::move(name), std::move(value));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in checkpoint", rd.offset());
  return ckpt;
}

}  // namespace qden::nn
