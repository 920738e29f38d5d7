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

#include "qden/dataset.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "qden/error.hpp"
#include "qden/rng.hpp"

namespace qden {
namespace {

constexpr char kMagic[4] = {'Q', 'D', 'S', '1'};
constexpr std::size_t kHeaderBytes = 24;
constexpr std::size_t kRecordPrefixBytes = 24;

std::size_t record_bytes(std::size_t dim) { return kRecordPrefixBytes + 2 * dim * dim * 16; }

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_f64(std::vector<unsigned char>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

void put_matrix(std::vector<unsigned char>& out, const CMat& m) {
  for (const auto& v : m.data()) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
}

CMat get_matrix(const unsigned char* p, std::size_t dim) {
  CMat m(dim, dim);
  auto data = m.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = Complex(get_f64(p + 16 * i), get_f64(p + 16 * i + 8));
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void validate_config(const GenerateConfig& config) {
  if (config.kinds.empty()) throw InvalidArgument("generate_dataset: kind list is empty");
  if (config.levels.empty()) throw InvalidArgument("generate_dataset: level list is empty");
  if (config.num_qubits < 2) throw InvalidArgument("generate_dataset: need at least 2 qubits");
  if (config.num_qubits > 10) throw InvalidArgument("generate_dataset: more than 10 qubits is not supported");
  if (config.depth_min > config.depth_max) throw InvalidArgument("generate_dataset: depth_min > depth_max");
  for (double level : config.levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw InvalidArgument("generate_dataset: noise level " + std::to_string(level) + " outside (0, 1)");
    }
  }
}

}  // namespace

SampleRecord generate_sample(const GenerateConfig& config, std::uint64_t index) {
  const std::size_t levels = config.levels.size();
  const std::uint64_t cell = index % (config.kinds.size() * levels);
  SampleRecord rec;
  rec.noise_kind = config.kinds[cell / levels];
  rec.noise_level = config.levels[cell % levels];
  rec.sample_seed = derive_seed(config.global_seed, index);
  const Circuit circuit = random_circuit(config.num_qubits, config.depth_min, config.depth_max, rec.sample_seed);
  rec.clean = simulate_clean(circuit);
  rec.noisy = apply_noise(rec.clean, {rec.noise_kind, rec.noise_level}, derive_seed(rec.sample_seed, 1));
  return rec;
}

Dataset generate_dataset(const GenerateConfig& config) {
  validate_config(config);
  Dataset ds;
  ds.manifest.num_qubits = config.num_qubits;
  ds.manifest.dim = 1u << config.num_qubits;
  ds.manifest.num_samples = config.num_samples;
  ds.manifest.levels = config.levels;
  ds.manifest.kinds = config.kinds;
  ds.manifest.global_seed = config.global_seed;
  ds.manifest.depth_min = config.depth_min;
  ds.manifest.depth_max = config.depth_max;
  ds.manifest.created_at = utc_timestamp();
  ds.samples.resize(config.num_samples);

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(1, config.num_samples)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < config.num_samples; ++i) ds.samples[i] = generate_sample(config, i);
    return ds;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t i = w; i < config.num_samples; i += workers) ds.samples[i] = generate_sample(config, i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return ds;
}

std::filesystem::path manifest_path(const std::filesystem::path& qds_path) {
  auto p = qds_path;
  p += ".manifest.json";
  return p;
}

std::string manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["num_qubits"] = m.num_qubits;
  j["dim"] = m.dim;
  j["num_samples"] = m.num_samples;
  j["levels"] = m.levels;
  auto kinds = nlohmann::ordered_json::array();
  for (auto k : m.kinds) kinds.push_back(std::string(noise_kind_name(k)));
  j["kinds"] = kinds;
  j["global_seed"] = m.global_seed;
  j["version"] = m.version;
  j["depth_min"] = m.depth_min;
  j["depth_max"] = m.depth_max;
  j["created_at"] = m.created_at;
  return j.dump(2) + "\n";
}

void write_qds(const Dataset& dataset, const std::filesystem::path& path) {
  const auto& m = dataset.manifest;
  if (m.num_samples != dataset.samples.size()) throw InvalidArgument("write_qds: manifest sample count mismatch");
  if (m.dim != (1u << m.num_qubits)) throw InvalidArgument("write_qds: dim != 2^num_qubits");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_qds: cannot open " + path.string() + " for writing");

  std::vector<unsigned char> buf;
  buf.reserve(record_bytes(m.dim));
  buf.insert(buf.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(buf, kQdsVersion);
  put_u32(buf, m.num_qubits);
  put_u32(buf, m.dim);
  put_u64(buf, m.num_samples);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));

  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const auto& rec = dataset.samples[i];
    if (rec.clean.dim() != m.dim || rec.noisy.dim() != m.dim) {
      throw InvalidArgument("write_qds: sample " + std::to_string(i) + " has the wrong dimension");
    }
    buf.clear();
    buf.push_back(static_cast<unsigned char>(rec.noise_kind));
    buf.insert(buf.end(), 7, 0);
    put_f64(buf, rec.noise_level);
    put_u64(buf, rec.sample_seed);
    put_matrix(buf, rec.clean.mat);
    put_matrix(buf, rec.noisy.mat);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  out.flush();
  if (!out) throw IoError("write_qds: write to " + path.string() + " failed");

  std::ofstream mf(manifest_path(path), std::ios::trunc);
  if (!mf) throw IoError("write_qds: cannot write manifest next to " + path.string());
  mf << manifest_to_json(m);
  if (!mf) throw IoError("write_qds: manifest write failed");
}

Dataset read_qds(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_qds: cannot open " + path.string());

  unsigned char header[kHeaderBytes];
  in.read(reinterpret_cast<char*>(header), kHeaderBytes);
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got < 4 || std::memcmp(header, kMagic, 4) != 0) {
    std::size_t bad = 0;
    while (bad < std::min<std::size_t>(got, 4) && header[bad] == static_cast<unsigned char>(kMagic[bad])) ++bad;
    throw FormatError("bad magic", bad);
  }
  if (got < kHeaderBytes) throw FormatError("truncated header", got);
  const std::uint32_t version = get_u32(header + 4);
  if (version != kQdsVersion) throw FormatError("unsupported version " + std::to_string(version), 4);

  Dataset ds;
  auto& m = ds.manifest;
  m.version = version;
  m.num_qubits = get_u32(header + 8);
  m.dim = get_u32(header + 12);
  m.num_samples = get_u64(header + 16);
  if (m.num_qubits == 0 || m.num_qubits > 16 || m.dim != (1u << m.num_qubits)) {
    throw FormatError("inconsistent num_qubits/dim", 8);
  }

  const std::size_t rec_bytes = record_bytes(m.dim);
  std::vector<unsigned char> buf(rec_bytes);
  ds.samples.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(m.num_samples, 1u << 20)));
  std::uint64_t offset = kHeaderBytes;
  for (std::uint64_t i = 0; i < m.num_samples; ++i) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(rec_bytes));
    if (static_cast<std::size_t>(in.gcount()) != rec_bytes) {
      throw FormatError("truncated record", offset + static_cast<std::uint64_t>(in.gcount()),
                        static_cast<std::int64_t>(i));
    }
    SampleRecord rec;
    if (buf[0] > static_cast<unsigned char>(NoiseKind::kMixed)) {
      throw FormatError("unknown noise kind code " + std::to_string(buf[0]), offset, static_cast<std::int64_t>(i));
    }
    rec.noise_kind = static_cast<NoiseKind>(buf[0]);
    rec.noise_level = get_f64(buf.data() + 8);
    if (!std::isfinite(rec.noise_level)) {
      throw FormatError("non-finite noise level", offset + 8, static_cast<std::int64_t>(i));
    }
    rec.sample_seed = get_u64(buf.data() + 16);
    rec.clean = {m.num_qubits, get_matrix(buf.data() + kRecordPrefixBytes, m.dim)};
    rec.noisy = {m.num_qubits, get_matrix(buf.data() + kRecordPrefixBytes + m.dim * m.dim * 16, m.dim)};
    ds.samples.push_back(std::move(rec));
    offset += rec_bytes;
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after last record", offset);

  const auto mpath = manifest_path(path);
  if (std::filesystem::exists(mpath)) {
    std::ifstream mf(mpath);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(mf);
      if (j.at("num_qubits").get<std::uint32_t>() != m.num_qubits || j.at("dim").get<std::uint32_t>() != m.dim ||
          j.at("num_samples").get<std::uint64_t>() != m.num_samples) {
        throw FormatError("manifest " + mpath.string() + " disagrees with binary header", 0);
      }
      m.levels = j.at("levels").get<std::vector<double>>();
      m.kinds.clear();
      for (const auto& name : j.at("kinds")) {
        auto kind = parse_noise_kind(name.get<std::string>());
        if (!kind) throw FormatError("manifest has unknown kind " + name.get<std::string>(), 0);
        m.kinds.push_back(*kind);
      }
      m.global_seed = j.at("global_seed").get<std::uint64_t>();
      m.depth_min = j.value("depth_min", 0u);
      m.depth_max = j.value("depth_max", 0u);
      m.created_at = j.value("created_at", std::string());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed manifest: ") + e.what(), 0);
    }
  } else {
    for (const auto& rec : ds.samples) {
      if (std::find(m.levels.begin(), m.levels.end(), rec.noise_level) == m.levels.end())
        m.levels.push_back(rec.noise_level);
      if (std::find(m.kinds.begin(), m.kinds.end(), rec.noise_kind) == m.kinds.end())
        m.kinds.push_back(rec.noise_kind);
    }
    std::sort(m.levels.begin(), m.levels.end());
    std::sort(m.kinds.begin(), m.kinds.end());
  }
  return ds;
}

void validate_dataset(const Dataset& dataset, double tol) {
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const auto& rec = dataset.samples[i];
    try {
      validate_state(rec.clean.mat, tol);
      validate_state(rec.noisy.mat, tol);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("sample " + std::to_string(i) + ": " + e.what());
    }
  }
}

TrainTestSplit split_indices(const Dataset& dataset, std::span<const std::size_t> pool, double test_fraction,
                             std::uint64_t split_seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("split: fraction must lie in (0, 1), got " + std::to_string(test_fraction));
  }
  const std::size_t total = pool.size();
  const auto want = static_cast<std::size_t>(std::llround(static_cast<double>(total) * test_fraction));
  if (want == 0 || want >= total) {
    throw InvalidArgument("split: fraction " + std::to_string(test_fraction) + " of " + std::to_string(total) +
                          " samples leaves one side empty");
  }

  std::map<std::pair<std::uint8_t, double>, std::vector<std::size_t>> cells;
  for (std::size_t idx : pool) {
    if (idx >= dataset.samples.size()) throw InvalidArgument("split: index out of range");
    const auto& rec = dataset.samples[idx];
    cells[{static_cast<std::uint8_t>(rec.noise_kind), rec.noise_level}].push_back(idx);
  }

  struct Quota {
    std::vector<std::size_t>* members;
    std::size_t take;
    double remainder;
    std::size_t ordinal;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  std::size_t ordinal = 0;
  for (auto& [key, members] : cells) {
    Rng rng(derive_seed(split_seed, ordinal));
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
    const double exact = static_cast<double>(members.size()) * test_fraction;
    const auto take = static_cast<std::size_t>(std::floor(exact + 1e-9));
    quotas.push_back({&members, take, exact - static_cast<double>(take), ordinal});
    assigned += take;
    ++ordinal;
  }
  std::vector<Quota*> order;
  for (auto& q : quotas) order.push_back(&q);
  std::stable_sort(order.begin(), order.end(), [](const Quota* a, const Quota* b) { return a->remainder > b->remainder; });
  for (std::size_t i = 0; assigned < want && i < order.size(); ++i) {
    if (order[i]->take < order[i]->members->size()) {
      ++order[i]->take;
      ++assigned;
    }
  }

  TrainTestSplit split;
  for (const auto& q : quotas) {
    split.test.insert(split.test.end(), q.members->begin(), q.members->begin() + static_cast<std::ptrdiff_t>(q.take));
    split.train.insert(split.train.end(), q.members->begin() + static_cast<std::ptrdiff_t>(q.take), q.members->end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

TrainTestSplit split_train_test(const Dataset& dataset, double test_fraction, std::uint64_t split_seed) {
  std::vector<std::size_t> all(dataset.samples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return split_indices(dataset, all, test_fraction, split_seed);
}

Tensor dm_to_channels(const CMat& rho) {
  if (!rho.square()) throw InvalidArgument("dm_to_channels: matrix is not square");
  const std::size_t dim = rho.rows();
  Tensor t({dim, dim, 2});
  auto out = t.data();
  const auto in = rho.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[2 * i] = in[i].real();
    out[2 * i + 1] = in[i].imag();
  }
  return t;
}

CMat channels_to_dm(const Tensor& t) {
  if (t.rank() != 3 || t.dim(0) != t.dim(1) || t.dim(2) != 2) {
    throw InvalidArgument("channels_to_dm: expected shape (dim, dim, 2), got " + shape_to_string(t.shape()));
  }
  const std::size_t dim = t.dim(0);
  CMat m(dim, dim);
  auto out = m.data();
  const auto in = t.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(in[2 * i], in[2 * i + 1]);
  return m;
}

CMat batch_item_to_matrix(const Tensor& batch, std::size_t n) {
  if (batch.rank() != 4 || batch.dim(1) != batch.dim(2) || batch.dim(3) != 2 || n >= batch.dim(0)) {
    throw InvalidArgument("batch_item_to_matrix: bad batch shape " + shape_to_string(batch.shape()));
  }
  const std::size_t dim = batch.dim(1);
  CMat m(dim, dim);
  auto out = m.data();
  const double* in = batch.data().data() + n * dim * dim * 2;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(in[2 * i], in[2 * i + 1]);
  return m;
}

}  // namespace qden
