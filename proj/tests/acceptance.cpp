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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qden/dataset.hpp"
#include "qden/error.hpp"
#include "qden/eval.hpp"
#include "qden/metrics.hpp"
#include "qden/model.hpp"
#include "qden/noise.hpp"
#include "qden/train.hpp"
#include "test_util.hpp"

using namespace qden;
namespace qt = qden::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void run(int id, const char* name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0 && secs > budget_seconds) {
    out.pass = false;
    out.detail += "; over time budget " + fmt("%.0f s", budget_seconds);
  }
  if (!out.pass) ++g_failures;
  std::printf("%s %d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cptp_suite() {
  double completeness = 0.0, trace = 0.0, herm = 0.0, min_eig = 1.0;
  std::mt19937_64 gen(101);
  for (NoiseKind kind : kAllNoiseKinds) {
    for (double level : kDefaultNoiseLevels) {
      if (kind != NoiseKind::kMixed) completeness = std::max(completeness, validate_cptp(kraus_for(kind, level)).completeness_error);
      for (int s = 0; s < 100; ++s) {
        // Alternate pure and full-rank inputs.
        const CMat in = s % 2 ? qt::random_density(gen, 8) : qt::outer(qt::random_ket(gen, 8));
        const auto out = apply_noise(DensityMatrix::from_matrix(in), {kind, level}, gen());
        const auto check = check_state(out.mat);
        trace = std::max(trace, check.trace_error);
        herm = std::max(herm, check.hermiticity);
        min_eig = std::min(min_eig, check.min_eigenvalue);
      }
    }
  }
  const bool ok = completeness <= 1e-12 && trace <= 1e-12 && herm <= 1e-12 && min_eig >= -1e-10;
  return {ok, "completeness " + fmt("%.1e", completeness) + ", trace " + fmt("%.1e", trace) + ", hermiticity " +
                  fmt("%.1e", herm) + ", min eigenvalue " + fmt("%.1e", min_eig)};
}

Outcome channel_oracles() {
  double worst = 0.0;
  std::mt19937_64 gen(102);
  for (double p : {0.0, 0.05, 0.1, 0.15, 0.2, 0.5, 1.0}) {
    const auto dep = apply_channel_on_qubit(DensityMatrix::ground(1), kraus_for(NoiseKind::kDepolarizing, p), 0);
    worst = std::max(worst, frob_distance(dep.mat, CMat::diag({1.0 - p / 2.0, p / 2.0})));

    DensityMatrix one{1, CMat::diag({0.0, 1.0})};
    const auto amp = apply_channel_on_qubit(one, kraus_for(NoiseKind::kAmplitudeDamping, p), 0);
    worst = std::max(worst, frob_distance(amp.mat, CMat::diag({p, 1.0 - p})));

    const CMat rho = qt::random_density(gen, 8);
    for (std::uint32_t q = 0; q < 3; ++q) {
      const auto ph = apply_channel_on_qubit({3, rho}, kraus_for(NoiseKind::kPhaseDamping, p), q);
      for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, std::abs(ph.mat(i, i) - rho(i, i)));
    }
  }
  return {worst <= 1e-12, "max deviation " + fmt("%.1e", worst)};
}

Outcome simulator_oracle() {
  double dist = 0.0, purity_err = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto circuit = random_circuit(3, 6, 9, 1000 + seed);
    const auto rho = simulate_clean(circuit);
    dist = std::max(dist, frob_distance(rho.mat, qt::statevector_density(circuit)));
    purity_err = std::max(purity_err, std::abs(purity(rho) - 1.0));
  }
  return {dist <= 1e-10 && purity_err <= 1e-10,
          "max Frobenius distance " + fmt("%.1e", dist) + ", max purity error " + fmt("%.1e", purity_err)};
}

Outcome gradient_check() {
  nn::ModelConfig cfg;
  cfg.dim = 8;
  cfg.filters = {4, 8, 16};
  const auto ds = generate_dataset({.num_samples = 20, .num_qubits = 3, .threads = 1});
  const std::vector<std::size_t> idx{0, 7, 13};
  const Tensor x = train::make_batch(ds, idx, false);
  const Tensor y = train::make_batch(ds, idx, true);
  double worst = 0.0;
  std::string worst_name;
  std::size_t checked = 0;
  for (double lambda : {0.0, 1.0}) {
    nn::ModelParams params = nn::init_params(cfg, 5);
    // Non-zero biases keep ReLU inputs away from the kink at zero.
    std::mt19937_64 gen(103);
    for (auto& p : params.params)
      if (p.name.ends_with(".b"))
        for (double& v : p.value.data()) v = 0.05 * std::normal_distribution<double>()(gen);
    const auto trace = nn::model_forward(params, cfg, x, true, 17);
    const auto grads = nn::model_backward(params, cfg, trace, nn::composite_loss(trace.output, y, lambda).grad);
    auto loss = [&] { return nn::composite_loss(nn::model_forward(params, cfg, x, true, 17).output, y, lambda).loss; };
    constexpr double h = 1e-6;
    for (std::size_t k = 0; k < params.params.size(); ++k) {
      Tensor& w = params.params[k].value;
      for (std::size_t i = 0; i < w.numel(); ++i) {
        const double keep = w[i];
        w[i] = keep + h;
        const double up = loss();
        w[i] = keep - h;
        const double down = loss();
        w[i] = keep;
        const double numeric = (up - down) / (2.0 * h), analytic = grads[k][i];
        const double err = std::abs(numeric - analytic) / std::max(std::abs(numeric) + std::abs(analytic), 1e-6);
        if (err > worst) {
          worst = err;
          worst_name = params.params[k].name;
        }
        ++checked;
      }
    }
  }
  return {worst < 1e-4, std::to_string(checked) + " partials, max relative error " + fmt("%.1e", worst) + " (" +
                            worst_name + ")"};
}

Outcome metric_agreement() {
  GenerateConfig cfg{.num_samples = 200, .num_qubits = 3, .threads = 1};
  cfg.global_seed = 104;
  const auto ds = generate_dataset(cfg);
  std::vector<double> u, s;
  std::set<std::pair<int, double>> cells;
  for (const auto& rec : ds.samples) {
    u.push_back(uhlmann_fidelity(rec.clean, rec.noisy));
    s.push_back(surrogate_fidelity(rec.clean.mat, rec.noisy.mat));
    cells.insert({static_cast<int>(rec.noise_kind), rec.noise_level});
  }
  const double r = eval::correlation(s, u);
  return {r > 0.5 && cells.size() == 20, "pearson " + fmt("%.3f", r) + " over " + std::to_string(u.size()) +
                                             " pairs in " + std::to_string(cells.size()) + " cells"};
}

Outcome dataset_format() {
  qt::TempDir dir("accept");
  GenerateConfig cfg{.num_samples = 300, .num_qubits = 3};
  std::vector<std::string> bytes;
  for (unsigned threads : {1u, 2u, 4u}) {
    cfg.threads = threads;
    const auto path = dir / ("t" + std::to_string(threads) + ".qds");
    write_qds(generate_dataset(cfg), path);
    bytes.push_back(slurp(path));
  }
  const bool same = bytes[0] == bytes[1] && bytes[0] == bytes[2];

  const auto back = read_qds(dir / "t1.qds");
  write_qds(back, dir / "again.qds");
  const bool round_trip = slurp(dir / "again.qds") == bytes[0];

  std::string faults;
  {
    std::string cut = bytes[0].substr(0, bytes[0].size() - 100);
    std::ofstream(dir / "cut.qds", std::ios::binary) << cut;
    try {
      read_qds(dir / "cut.qds");
      faults += " truncation-not-detected";
    } catch (const FormatError& e) {
      if (e.record() != 299) faults += " truncation-wrong-record";
    }
  }
  {
    std::string bad = bytes[0];
    bad[0] = 'X';
    std::ofstream(dir / "magic.qds", std::ios::binary) << bad;
    try {
      read_qds(dir / "magic.qds");
      faults += " bad-magic-not-detected";
    } catch (const FormatError& e) {
      if (e.offset() != 0 || e.record() != -1) faults += " bad-magic-wrong-location";
    }
  }
  return {same && round_trip && faults.empty(),
          std::string("thread-independent bytes ") + (same ? "yes" : "no") + ", round trip " +
              (round_trip ? "bit-exact" : "differs") + ", fault injection " + (faults.empty() ? "ok" : faults)};
}

struct ExperimentResult {
  eval::EvalSummary model, identity, oracle;
  double test_mae = 0.0, untrained_mae = 0.0;
};

ExperimentResult scaled_experiment(std::uint32_t qubits, std::uint64_t samples, std::uint32_t epochs) {
  const auto ds = generate_dataset({.num_samples = samples, .num_qubits = qubits});
  const auto split = split_train_test(ds, 0.2, 1234);
  nn::ModelConfig model;
  model.dim = 1u << qubits;
  model.lambda = 1.0;
  train::TrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = 16;
  tc.initial_lr = 1e-3;
  const auto initial = nn::init_params(model, 7);
  const auto result = train::train(initial, model, ds, split.train, tc);
  ExperimentResult r;
  r.untrained_mae = train::evaluate_loss(initial, model, ds, split.test).mae;
  r.test_mae = train::evaluate_loss(result.best_params, model, ds, split.test).mae;
  r.model = eval::evaluate_corrections(ds, split.test, eval::model_corrector(result.best_params, model));
  r.identity = eval::evaluate_corrections(ds, split.test, eval::identity_corrector());
  r.oracle = eval::evaluate_corrections(ds, split.test, eval::oracle_corrector());
  return r;
}

Outcome judge(const ExperimentResult& r) {
  const auto& m = r.model;
  const bool a = m.mean_corrected >= m.mean_noisy + 0.05;
  const bool b = m.level_fidelity_correlation < 0.0;
  const auto best = std::max_element(m.by_kind.begin(), m.by_kind.end(), [](const auto& x, const auto& y) {
    return x.noisy_fidelity < y.noisy_fidelity;
  });
  const bool c = best != m.by_kind.end() && best->group == "phase_damping";
  const bool d = r.identity.mean_improvement == 0.0 && r.oracle.mean_corrected >= 0.999;
  std::string detail = std::string("(a) ") + (a ? "ok" : "FAIL") + " noisy " + fmt("%.3f", m.mean_noisy) +
                       " -> corrected " + fmt("%.3f", m.mean_corrected) + " (" + fmt("%+.3f", m.mean_improvement) +
                       "); (b) " + (b ? "ok" : "FAIL") + " corr(level, noisy) " +
                       fmt("%.3f", m.level_fidelity_correlation) + "; (c) " + (c ? "ok" : "FAIL") +
                       " highest noisy fidelity " + (best != m.by_kind.end() ? best->group : "none") + "; (d) " +
                       (d ? "ok" : "FAIL") + " identity " + fmt("%+.3g", r.identity.mean_improvement) + ", oracle " +
                       fmt("%.6f", r.oracle.mean_corrected) + "; test MAE " + fmt("%.4f", r.test_mae) +
                       " vs untrained " + fmt("%.4f", r.untrained_mae);
  return {a && b && c && d, detail};
}

Outcome plateau() {
  std::string faults;
  train::PlateauScheduler s(1e-3, 0.5, 5, 1e-6);
  s.observe(1.0);
  for (int e = 1; e <= 4; ++e)
    if (s.observe(1.0)) faults += " early-decay";
  if (!s.observe(1.0) || s.lr() != 0.5e-3) faults += " no-decay-at-5";

  const auto ds = generate_dataset({.num_samples = 120, .num_qubits = 2, .threads = 1});
  const auto split = split_train_test(ds, 0.2, 1);
  nn::ModelConfig model;
  model.dim = 4;
  model.filters = {4, 8};
  train::TrainConfig tc;
  tc.epochs = 12;
  tc.batch_size = 8;
  tc.initial_lr = 1e-14;  // weights effectively frozen, so validation loss stalls from epoch 2
  const auto r = train::train(nn::init_params(model, 3), model, ds, split.train, tc);
  for (std::size_t e = 0; e < 6; ++e)
    if (r.logs.at(e).lr != 1e-14) faults += " lr-changed-before-epoch-7";
  if (r.logs.at(6).lr != 0.5e-14) faults += " lr-not-halved-at-epoch-7";

  const std::set<std::size_t> val(r.val_indices.begin(), r.val_indices.end());
  const std::set<std::size_t> test(split.test.begin(), split.test.end());
  std::size_t leaked = 0;
  for (auto i : r.gradient_indices) leaked += val.count(i) + test.count(i);
  if (leaked) faults += " leaked " + std::to_string(leaked);
  return {faults.empty(), "decay after exactly 5 stagnant epochs, " + std::to_string(r.gradient_indices.size()) +
                              " gradient rows with " + std::to_string(leaked) + " from validation or test" + faults};
}

}  // namespace

int main() {
  run(1, "cptp suite", 30, cptp_suite);
  run(2, "channel oracles", 0, channel_oracles);
  run(3, "simulator oracle", 30, simulator_oracle);
  run(4, "gradient check", 120, gradient_check);
  run(5, "metric agreement", 0, metric_agreement);
  run(6, "dataset determinism and format", 0, dataset_format);
  run(7, "scaled trend experiment", 20 * 60, [] { return judge(scaled_experiment(3, 2000, 30)); });
  run(8, "plateau scheduler", 0, plateau);

  // The 5-qubit, 10000-sample configuration takes hours on one core; opt in.
  if (const char* env = std::getenv("QDEN_ACCEPTANCE_PARITY_EPOCHS")) {
    const auto epochs = static_cast<std::uint32_t>(std::strtoul(env, nullptr, 10));
    const auto start = std::chrono::steady_clock::now();
    const auto out = judge(scaled_experiment(5, 10000, epochs));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("INFO 7 parity run, 5 qubits, %u epochs: %s (%.1f s)\n", epochs, out.detail.c_str(), secs);
  }
  std::printf("%d of 8 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
