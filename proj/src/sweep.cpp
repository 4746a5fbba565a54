#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "dnls/harness.hpp"

namespace dnls {

namespace {

template <class T>
std::vector<T> list_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return {fallback};
  try {
    return j.at(key).get<std::vector<T>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep: bad list '") + key + "': " + e.what());
  }
}

auto key(const SweepRow& r) { return std::tie(r.h, r.K, r.tau, r.stepper, r.delta, r.seed); }

std::string run_dir_name(std::size_t index) {
  std::ostringstream os;
  os << "run_" << std::setw(5) << std::setfill('0') << index;
  return os.str();
}

void fill(SweepRow& row, const RunResult& res) {
  row.status = to_string(res.record.status);
  const auto drift = drift_report(res.record, ModifiedEnergyMode::resummed_spectral);
  row.max_dN = drift.summary.max_dN;
  row.max_dH = drift.summary.max_dH;
  row.max_dHmod = drift.summary.max_dHmod;
  row.max_dist = 0.0;
  for (const auto& s : res.record.samples) {
    row.max_dist = std::isnan(s.report.dist) ? s.report.dist : std::max(row.max_dist, s.report.dist);
  }
  row.terminal_dist = res.record.samples.empty() ? 0.0 : res.record.samples.back().report.dist;
  row.instability_time = res.instability_time;
}

}  // namespace

SweepSpec sweep_spec_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
  SweepSpec s;
  if (j.contains("base")) s.base = run_config_from_json(j.at("base"));
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const std::array<const char*, 8> known = {"base", "h", "K", "tau", "stepper", "delta", "seed", "workers"};
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError("unknown key '" + it.key() + "' in sweep spec");
    }
  }
  s.hs = list_or(j, "h", s.base.h);
  s.Ks = list_or(j, "K", s.base.K);
  s.taus = list_or(j, "tau", s.base.stepper.tau);
  s.deltas = list_or(j, "delta", s.base.initial.delta);
  s.seeds = list_or(j, "seed", s.base.initial.seed);
  for (const auto& name : list_or(j, "stepper", to_string(s.base.stepper.kind))) {
    try {
      s.steppers.push_back(stepper_kind_from_string(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  s.workers = j.value("workers", 1);
  return s;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  for (double h : spec.hs)
    for (int K : spec.Ks)
      for (double tau : spec.taus)
        for (StepperKind kind : spec.steppers)
          for (double delta : spec.deltas)
            for (std::uint64_t seed : spec.seeds) {
              SweepRow r;
              r.h = h;
              r.K = K;
              r.tau = tau;
              r.stepper = kind;
              r.delta = delta;
              r.seed = seed;
              rows.push_back(r);
            }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return key(a) < key(b); });
  rows.erase(std::unique(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return key(a) == key(b); }),
             rows.end());
  if (rows.empty()) return rows;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      RunConfig c = spec.base;
      c.h = row.h;
      c.K = row.K;
      c.stepper.tau = row.tau;
      c.stepper.kind = row.stepper;
      c.initial.delta = row.delta;
      c.initial.seed = row.seed;
      if (row.delta > 0.0) c.initial.kind = InitialKind::perturbed;
      if (!spec.base.output_dir.empty()) c.output_dir = spec.base.output_dir + "/" + run_dir_name(i);
      try {
        const CflReport cfl = cfl_check(row.h, row.tau, c.cfl_M);
        row.cfl_ratio = cfl.ratio;
        row.cfl_pass = cfl.pass;
        row.eps_mu = epsilon_mu(row.h, row.K, row.tau, 0.5);
        fill(row, run(c));
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
    }
  };
  const int n = std::clamp(spec.workers, 1, static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "h,K,tau,stepper,delta,seed,status,terminal_dist,max_dist,max_dN,max_dH,max_dHmod,cfl_ratio,cfl_pass,eps_mu,"
        "instability_time\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << r.h << ',' << r.K << ',' << r.tau << ',' << to_string(r.stepper) << ',' << r.delta << ',' << r.seed << ','
       << status << ',' << r.terminal_dist << ',' << r.max_dist << ',' << r.max_dN << ',' << r.max_dH << ','
       << r.max_dHmod << ',' << r.cfl_ratio << ',' << (r.cfl_pass ? 1 : 0) << ',' << r.eps_mu << ',';
    if (r.instability_time) os << *r.instability_time;
    os << '\n';
  }
}

}  // namespace dnls
