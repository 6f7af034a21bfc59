#include "ppress/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "ppress/error.hpp"
#include "ppress/hash.hpp"

namespace ppress {

std::string pair_id(const DatasetPair& pair) {
  return sha256_hex(pair.train.id() + ":" + pair.validation.id());
}

namespace {

struct PartResult {
  Dataset reconstructed;
  std::uint64_t orig_bytes = 0;
  std::uint64_t comp_bytes = 0;
  std::size_t orig_rows = 0;
  std::size_t kept_rows = 0;
  double compress_seconds = 0;
  double decompress_seconds = 0;
};

PartResult run_codec(const Dataset& d, const ReducerConfig& config) {
  CompressResult c = compress(d, config);
  const Bytes bytes = serialize(c.artifact);
  DecompressResult r = decompress(bytes);
  PartResult p{std::move(r.dataset), c.artifact.orig_bytes(), bytes.size(), d.n_obs(), c.output_rows,
               c.seconds, r.seconds};
  return p;
}

void merge_errors(ErrorSummary& acc, std::size_t& acc_n, const ErrorReport& e, std::size_t n) {
  acc.max_abs_err = std::max(acc.max_abs_err, e.max_abs_err);
  acc.max_rel_to_range_err = std::max(acc.max_rel_to_range_err, e.max_rel_to_range_err);
  acc.mse = (acc.mse * static_cast<double>(acc_n) + e.mse * static_cast<double>(n)) /
            static_cast<double>(acc_n + n);
  acc.psnr_db = acc_n == 0 ? e.psnr_db : std::min(acc.psnr_db, e.psnr_db);
  acc_n += n;
}

}  // namespace

EvaluationRecord eval_config(const DatasetPair& data, const std::string& dataset_id,
                             const Application& app, const ReducerConfig& config,
                             const EvalOptions& opts) {
  EvaluationRecord rec;
  rec.record_id = cache_key(dataset_id, app, config, opts.target, opts.seed);
  if (opts.cache != nullptr) {
    if (auto hit = opts.cache->get(rec.record_id)) {
      hit->cached = true;
      hit->role = opts.role;
      return *hit;
    }
  }
  rec.dataset_id = dataset_id;
  rec.app_id = app.id;
  rec.label = config.label();
  rec.role = opts.role;
  rec.config = config;
  rec.target = opts.target;
  rec.seed = opts.seed;
  rec.metric = std::string(to_string(app.metric.name));
  rec.direction = app.metric.direction();
  try {
    config.validate();
    app.validate();
    const bool do_train = opts.target != CompressTarget::validation;
    const bool do_val = opts.target != CompressTarget::train;
    std::optional<PartResult> tr, va;
    if (do_train) tr = run_codec(data.train, config);
    if (do_val) va = run_codec(data.validation, config);

    std::uint64_t ob = 0, cb = 0;
    std::size_t orows = 0, krows = 0;
    ErrorSummary errs;
    std::size_t err_n = 0;
    for (const auto* part : {tr ? &*tr : nullptr, va ? &*va : nullptr}) {
      if (part == nullptr) continue;
      ob += part->orig_bytes;
      cb += part->comp_bytes;
      orows += part->orig_rows;
      krows += part->kept_rows;
      rec.compress_seconds += part->compress_seconds;
      rec.decompress_seconds += part->decompress_seconds;
    }
    if (is_sampling(config.method)) {
      rec.ratio = static_cast<double>(orows) / static_cast<double>(std::max<std::size_t>(krows, 1));
      const double nan = std::numeric_limits<double>::quiet_NaN();
      errs = {nan, nan, nan, nan};
    } else {
      rec.ratio = static_cast<double>(ob) / static_cast<double>(cb);
      if (tr) merge_errors(errs, err_n, error_report(data.train, tr->reconstructed), data.train.n_obs());
      if (va) {
        merge_errors(errs, err_n, error_report(data.validation, va->reconstructed),
                     data.validation.n_obs());
      }
    }
    rec.errors = errs;
    rec.orig_bytes = ob;
    rec.comp_bytes = cb;
    rec.compress_bandwidth = static_cast<double>(ob) / std::max(rec.compress_seconds, 1e-9);
    rec.decompress_bandwidth = static_cast<double>(ob) / std::max(rec.decompress_seconds, 1e-9);

    const Dataset& train = tr ? tr->reconstructed : data.train;
    const Dataset& val = va ? va->reconstructed : data.validation;
    const AppResult res = run_application(train, val, app, opts.seed);
    rec.psi = res.psi;
    rec.degenerate = res.degenerate;
    rec.app_seconds = res.seconds;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.timestamp = utc_timestamp();
  if (opts.cache != nullptr) opts.cache->put(rec);
  return rec;
}

std::string MethodEntry::label() const { return domain.config(domain.bound_min).label(); }

std::vector<EvaluationRecord> eval_many(const DatasetPair& data, const std::string& dataset_id,
                                        const Application& app,
                                        const std::vector<ReducerConfig>& configs,
                                        const std::vector<EvalOptions>& opts, int jobs) {
  if (configs.size() != opts.size()) throw ConfigError("eval_many: size mismatch");
  std::vector<EvaluationRecord> out(configs.size());
  const std::size_t workers =
      std::min<std::size_t>(configs.size(), static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) {
      out[i] = eval_config(data, dataset_id, app, configs[i], opts[i]);
    }
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) {
        out[i] = eval_config(data, dataset_id, app, configs[i], opts[i]);
      }
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

Baseline measure_baseline(const DatasetPair& data, const std::string& dataset_id,
                          const Application& app, const CampaignOptions& opts) {
  const int reps = opts.spec.replicates;
  std::vector<ReducerConfig> configs(static_cast<std::size_t>(reps), ReducerConfig{});
  std::vector<EvalOptions> eo;
  for (int i = 0; i < reps; ++i) {
    eo.push_back({opts.target, opts.seed + static_cast<std::uint64_t>(i), opts.cache, "baseline"});
  }
  Baseline b;
  b.records = eval_many(data, dataset_id, app, configs, eo, opts.jobs);
  std::vector<double> psis;
  for (const auto& r : b.records) {
    if (!r.ok) throw ApplicationError("baseline evaluation failed: " + r.error);
    psis.push_back(r.psi);
  }
  b.phi = median(psis);
  b.spread = *std::max_element(psis.begin(), psis.end()) - *std::min_element(psis.begin(), psis.end());
  return b;
}

namespace {

class Runner {
 public:
  Runner(const DatasetPair& data, std::string dataset_id, const Application& app,
         const CampaignOptions& opts)
      : data_(data), dataset_id_(std::move(dataset_id)), app_(app), opts_(opts) {}

  // Records for `bounds` across replicates, in (bound, replicate) order.
  std::vector<EvaluationRecord> evaluate(const SearchDomain& d, const std::vector<double>& bounds,
                                         const std::string& role) {
    std::vector<ReducerConfig> configs;
    std::vector<EvalOptions> eo;
    for (double b : bounds) {
      for (int i = 0; i < opts_.spec.replicates; ++i) {
        ReducerConfig c = d.config(b);
        if (is_sampling(c.method)) c.fixed.seed += opts_.seed + static_cast<std::uint64_t>(i);
        configs.push_back(std::move(c));
        eo.push_back({opts_.target, opts_.seed + static_cast<std::uint64_t>(i), opts_.cache, role});
      }
    }
    return eval_many(data_, dataset_id_, app_, configs, eo, opts_.jobs);
  }

  // Oriented median quality of the records for one bound; failures count as -inf.
  double quality(std::span<const EvaluationRecord> recs) const {
    std::vector<double> v;
    for (const auto& r : recs) {
      if (!r.ok || std::isnan(r.psi)) return -std::numeric_limits<double>::infinity();
      v.push_back(app_.metric.oriented(r.psi));
    }
    return median(v);
  }

 private:
  const DatasetPair& data_;
  std::string dataset_id_;
  const Application& app_;
  const CampaignOptions& opts_;
};

}  // namespace

CampaignResult run_campaign(const DatasetPair& data, const std::vector<Application>& apps,
                            const std::vector<MethodEntry>& methods, const CampaignOptions& opts) {
  if (apps.empty()) throw ConfigError("campaign needs at least one application");
  if (methods.empty()) throw ConfigError("campaign needs at least one method");
  opts.spec.validate();
  const std::string did = pair_id(data);
  CampaignResult out;
  auto emit = [&](std::vector<EvaluationRecord> recs) {
    if (opts.store != nullptr) opts.store->append(recs);
    for (auto& r : recs) out.records.push_back(std::move(r));
  };

  for (const auto& app : apps) {
    Baseline base = measure_baseline(data, did, app, opts);
    emit(base.records);
    const double phi_o = app.metric.oriented(base.phi);
    SearchSpec spec = opts.spec;
    spec.tau = app.metric.oriented(opts.spec.tau);
    Runner runner(data, did, app, opts);

    for (const auto& m : methods) {
      SearchSummary s;
      s.app_id = app.id;
      s.label = m.label();
      s.phi = base.phi;
      s.spread = base.spread;
      const Method method = m.domain.method;
      if (method == Method::none) {
        out.searches.push_back(s);
        continue;
      }
      if (!m.sweep || method == Method::lossless || method == Method::trunc) {
        std::vector<double> bounds = m.bounds;
        if (bounds.empty()) bounds.push_back(method == Method::trunc ? 16.0 : 0.0);
        std::vector<ReducerConfig> configs;
        std::vector<EvalOptions> eo;
        for (double b : bounds) {
          ReducerConfig c = m.domain.config(b);
          if (method == Method::lossless) c.bound.clear();
          configs.push_back(c);
          eo.push_back({opts.target, opts.seed, opts.cache, "control"});
        }
        emit(eval_many(data, did, app, configs, eo, opts.jobs));
        out.searches.push_back(s);
        continue;
      }

      s.searched = true;
      const SearchDomain& d = m.domain;
      std::map<double, std::vector<EvaluationRecord>> seen;
      auto oracle_for = [&](const std::string& role) {
        return [&, role](double b) {
          auto it = seen.find(b);
          if (it == seen.end()) {
            auto recs = runner.evaluate(d, {b}, role);
            emit(recs);
            it = seen.emplace(b, std::move(recs)).first;
          }
          return runner.quality(it->second);
        };
      };
      try {
        BoundaryResult up, lo;
        if (d.noisy()) {
          const auto scan_bounds = prescan_bounds(d, spec);
          auto recs = runner.evaluate(d, scan_bounds, "prescan");
          emit(recs);
          std::vector<Probe> scan;
          const auto reps = static_cast<std::size_t>(spec.replicates);
          for (std::size_t i = 0; i < scan_bounds.size(); ++i) {
            scan.push_back({scan_bounds[i],
                            runner.quality(std::span(recs).subspan(i * reps, reps))});
          }
          up = select_upper(d, spec, phi_o, scan);
          lo = select_lower(d, spec, phi_o, scan);
        } else {
          up = find_upper(d, spec, phi_o, oracle_for("probe_upper"));
          lo = find_lower(d, spec, phi_o, oracle_for("probe_lower"));
        }
        s.upper = up.bound;
        s.upper_flag = up.not_diagnostically_lossless;
        s.lower = lo.bound;
        s.budget_exhausted = up.budget_exhausted || lo.budget_exhausted;
        s.probes = up.probes.size() + lo.probes.size();
        const CandidateSet cs = candidate_points(lo.bound, up.bound, spec.n_candidates, d.integer());
        s.candidates = cs.bounds;
        emit(runner.evaluate(d, cs.bounds, "candidate"));
      } catch (const InfeasibleError& e) {
        s.infeasible = true;
        s.message = e.what();
      }
      out.searches.push_back(s);
    }
  }
  return out;
}

}  // namespace ppress
