// ppress: command-line front end.
//
// Exit codes: 0 success, 1 internal failure, 2 usage or configuration error,
// 3 data or format error, 4 infeasible search, 5 application failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "ppress/campaign.hpp"
#include "ppress/campaign_file.hpp"
#include "ppress/error.hpp"
#include "ppress/pareto.hpp"
#include "ppress/perfmodel.hpp"
#include "ppress/records.hpp"
#include "ppress/report.hpp"
#include "ppress/tabular.hpp"

namespace fs = std::filesystem;
using namespace ppress;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kInfeasible = 4, kApplication = 5 };

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

std::vector<double> parse_bandwidths(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0') throw ConfigError("bad bandwidth '" + item + "'");
    if (!(v > 0)) throw ConfigError("bandwidths must be > 0 (got " + item + ")");
    out.push_back(v * kGB);
  }
  if (out.empty()) throw ConfigError("empty bandwidth list");
  return out;
}

// "METHOD[/MODE][:bound[,bound...]][@matrix]" or a JSON object.
ReducerConfig parse_config_arg(const std::string& s) {
  if (!s.empty() && s.front() == '{') {
    ReducerConfig c = config_from_json(Json::parse(s));
    c.validate();
    return c;
  }
  std::string rest = s;
  ReducerConfig c;
  if (const auto at = rest.find('@'); at != std::string::npos) {
    c.layout = parse_layout(rest.substr(at + 1));
    rest = rest.substr(0, at);
  }
  std::string bounds;
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    bounds = rest.substr(colon + 1);
    rest = rest.substr(0, colon);
  }
  if (const auto slash = rest.find('/'); slash != std::string::npos) {
    c.mode = parse_mode(rest.substr(slash + 1));
    rest = rest.substr(0, slash);
  }
  c.method = parse_method(rest);
  std::stringstream ss(bounds);
  std::string item;
  while (std::getline(ss, item, ',')) c.bound.push_back(std::stod(item));
  c.validate();
  return c;
}

struct Common {
  std::string store;
  std::string cache_dir;
  bool no_cache = false;
  int jobs = 0;
};

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

fs::path store_path(const Common& c, const CampaignFile* f) {
  if (!c.store.empty()) return c.store;
  const std::string env = env_or("PPRESS_STORE", "");
  if (!env.empty()) return env;
  if (f != nullptr) return f->output.store;
  throw ConfigError("no record store given (use --store or PPRESS_STORE)");
}

fs::path cache_path(const Common& c, const CampaignFile& f) {
  if (!c.cache_dir.empty()) return c.cache_dir;
  const std::string env = env_or("PPRESS_CACHE_DIR", "");
  if (!env.empty()) return env;
  return f.output.cache;
}

std::vector<EvaluationRecord> load_store(const Common& c) {
  const fs::path p = store_path(c, nullptr);
  auto recs = RecordStore::load(p);
  if (recs.empty()) throw DataError("record store " + p.string() + " is empty");
  return recs;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::string path;
  std::string format;
  std::string desc;
  std::string dtype = "f64";
  bool no_header = false;
  std::size_t bins = 20;
  std::string scale = "log10";
  std::string out_dir = ".";
};

int cmd_stats(const StatsArgs& a) {
  DatasetEntry e;
  e.path = a.path;
  e.format = !a.format.empty() ? a.format : (fs::path(a.path).extension() == ".csv" ? "csv" : "raw");
  if (!a.desc.empty()) e.descriptor = a.desc;
  e.dtype = parse_dtype(a.dtype);
  e.header = !a.no_header;
  const Dataset d = load_dataset(e);
  const auto stats = column_stats(d);
  std::ostringstream sc;
  sc << "column,min,max,range,mean,variance,zero_range\n";
  sc.precision(17);
  for (std::size_t j = 0; j < stats.size(); ++j) {
    const auto& s = stats[j];
    sc << d.names()[j] << ',' << s.min << ',' << s.max << ',' << s.range << ',' << s.mean << ','
       << s.variance << ',' << (s.zero_range ? 1 : 0) << '\n';
  }
  const RangeHistogram h = range_histogram(stats, a.bins, parse_hist_scale(a.scale));
  std::ostringstream hc;
  hc.precision(17);
  hc << "bin,lo,hi,count\n";
  hc << "zero,0,0," << h.zero_count << '\n';
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    hc << i << ',' << h.edges[i] << ',' << h.edges[i + 1] << ',' << h.counts[i] << '\n';
  }
  const fs::path out(a.out_dir);
  write_text(out / "stats.csv", sc.str());
  write_text(out / "histogram.csv", hc.str());
  std::cout << "dataset " << a.path << ": " << d.n_obs() << " rows x " << d.n_feat() << " columns ("
            << to_string(d.dtype()) << ")\n";
  std::cout << "zero-range columns: " << h.zero_count << "\n";
  std::cout << "range histogram (" << a.scale << ", " << h.counts.size() << " bins): total "
            << h.total() << "\n";
  std::cout << "wrote " << (out / "stats.csv").string() << " and " << (out / "histogram.csv").string()
            << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct CampaignArgs {
  std::string file;
  std::vector<std::string> configs;
  Common common;
  double tau = std::numeric_limits<double>::quiet_NaN();
  int n = 0;
};

CampaignOptions campaign_options(const CampaignArgs& a, const CampaignFile& f,
                                 std::unique_ptr<RecordCache>& cache,
                                 std::unique_ptr<RecordStore>& store) {
  CampaignOptions o;
  o.spec = f.spec;
  if (!std::isnan(a.tau)) o.spec.tau = a.tau;
  if (a.n > 0) o.spec.n_candidates = a.n;
  o.spec.validate();
  o.target = f.target;
  o.seed = f.seed;
  o.jobs = resolve_jobs(a.common.jobs);
  if (!a.common.no_cache) {
    cache = std::make_unique<RecordCache>(cache_path(a.common, f));
    o.cache = cache.get();
  }
  store = std::make_unique<RecordStore>(store_path(a.common, &f));
  o.store = store.get();
  return o;
}

int cmd_eval(const CampaignArgs& a) {
  const CampaignFile f = load_campaign_file(a.file);
  std::unique_ptr<RecordCache> cache;
  std::unique_ptr<RecordStore> store;
  const CampaignOptions o = campaign_options(a, f, cache, store);
  std::vector<ReducerConfig> configs = f.evaluate;
  for (const auto& s : a.configs) configs.push_back(parse_config_arg(s));
  std::size_t total = 0, hits = 0, failed = 0;
  for (const auto& entry : f.datasets) {
    const DatasetPair pair = load_pair(entry);
    const std::string did = pair_id(pair);
    for (const auto& app : f.apps) {
      const Baseline base = measure_baseline(pair, did, app, o);
      std::vector<EvaluationRecord> recs = base.records;
      std::vector<EvalOptions> eo(configs.size(), EvalOptions{o.target, o.seed, o.cache, "control"});
      auto more = eval_many(pair, did, app, configs, eo, o.jobs);
      recs.insert(recs.end(), more.begin(), more.end());
      store->append(recs);
      std::cout << entry.id << " / " << app.id << ": phi = " << base.phi << " (spread " << base.spread
                << ")\n";
      for (const auto& r : more) {
        std::cout << "  " << r.label << " " << (r.config.bound.empty() ? 0.0 : r.config.primary())
                  << ": ";
        if (r.ok) {
          std::cout << r.metric << "=" << r.psi << " C=" << r.ratio;
        } else {
          std::cout << "FAILED: " << r.error;
        }
        std::cout << (r.cached ? " (cached)" : "") << "\n";
      }
      for (const auto& r : recs) {
        ++total;
        hits += r.cached ? 1 : 0;
        failed += r.ok ? 0 : 1;
      }
    }
  }
  std::cout << total << " records (" << hits << " cache hits, " << failed << " failed) -> "
            << store->path().string() << "\n";
  return kOk;
}

int cmd_search(const CampaignArgs& a) {
  const CampaignFile f = load_campaign_file(a.file);
  if (f.methods.empty()) throw ConfigError("campaign lists no methods to search");
  std::unique_ptr<RecordCache> cache;
  std::unique_ptr<RecordStore> store;
  const CampaignOptions o = campaign_options(a, f, cache, store);
  bool infeasible = false;
  std::size_t total = 0;
  for (const auto& entry : f.datasets) {
    const DatasetPair pair = load_pair(entry);
    const CampaignResult res = run_campaign(pair, f.apps, f.methods, o);
    total += res.records.size();
    for (const auto& s : res.searches) {
      std::cout << entry.id << " / " << s.app_id << " / " << s.label << ": phi=" << s.phi;
      if (!s.searched) {
        std::cout << " (evaluated without search)\n";
        continue;
      }
      if (s.infeasible) {
        infeasible = true;
        std::cout << " INFEASIBLE: " << s.message << "\n";
        continue;
      }
      std::cout << " l=" << s.lower << " u=" << s.upper << (s.upper_flag ? " (u not diagnostically lossless)" : "")
                << (s.budget_exhausted ? " (probe budget exhausted)" : "") << " probes=" << s.probes
                << " candidates=" << s.candidates.size() << "\n";
    }
  }
  std::cout << total << " records -> " << store->path().string() << "\n";
  return infeasible ? kInfeasible : kOk;
}

// ---------------------------------------------------------------------------

struct ParetoArgs {
  Common common;
  std::string out_dir = "pareto";
  bool include_probes = false;
};

int cmd_pareto(const ParetoArgs& a) {
  const auto recs = load_store(a.common);
  std::map<std::string, std::vector<EvaluationRecord>> by_app;
  for (const auto& r : recs) by_app[r.app_id].push_back(r);
  const fs::path out(a.out_dir);
  std::vector<Front> all_fronts;
  for (const auto& [app, rs] : by_app) {
    const auto pts = points_from_records(rs, a.include_probes);
    if (pts.empty()) continue;
    const Front global = pareto_front(pts, Scope::global);
    auto per = per_method_fronts(pts);
    std::vector<Front> fronts = per;
    fronts.push_back(global);
    write_text((out / svg_file_name(app)).replace_extension(".csv"), fronts_csv(fronts));
    write_text(out / svg_file_name(app), fronts_svg(pts, fronts, app + " (" + rs.front().metric + ")"));
    std::cout << "application " << app << " (" << rs.front().metric << "): " << pts.size()
              << " points, global front " << global.points.size() << "\n";
    for (const auto& p : global.points) {
      std::cout << "  " << p.method << " bound=" << p.bound << " C=" << p.cr << " q=" << p.q << "\n";
    }
    const auto dom = dominated_methods(pts, global);
    if (!dom.empty()) {
      std::cout << "  * not Pareto optimal (omitted):";
      for (const auto& m : dom) std::cout << " " << m;
      std::cout << "\n";
    }
  }
  std::cout << "wrote fronts to " << out.string() << "\n";
  return kOk;
}

struct SpeedupArgs {
  Common common;
  std::string csv;
  std::string bandwidths = "3.75,1.0,0.125";
  std::string out;
};

int cmd_speedup(const SpeedupArgs& a) {
  const auto bws = parse_bandwidths(a.bandwidths);
  std::vector<CoresInput> inputs;
  if (!a.csv.empty()) {
    const Bytes b = read_file(a.csv);
    inputs = parse_cores_csv(std::string(b.begin(), b.end()));
  } else {
    inputs = cores_inputs(load_store(a.common));
  }
  if (inputs.empty()) throw DataError("no rows with C and b_c");
  const CoresTable t = cores_table(inputs, bws);
  std::cout << t.text();
  if (!a.out.empty()) {
    write_text(a.out, t.csv());
  } else {
    std::cout << "\n" << t.csv();
  }
  return kOk;
}

struct ReportArgs {
  Common common;
  std::string out_dir = "report";
  std::string bandwidths = "3.75,1.0,0.125";
};

int cmd_report(const ReportArgs& a) {
  const auto recs = load_store(a.common);
  const fs::path p = write_report(recs, parse_bandwidths(a.bandwidths), a.out_dir);
  std::cout << "wrote " << p.string() << "\n";
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool campaign) {
  sub->add_option("--store", c.store, "Record store (JSON lines); default $PPRESS_STORE");
  if (campaign) {
    sub->add_option("--cache-dir", c.cache_dir, "Cache directory; default $PPRESS_CACHE_DIR");
    sub->add_flag("--no-cache", c.no_cache, "Recompute every evaluation");
    sub->add_option("-j,--jobs", c.jobs, "Worker threads (default: available cores)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ppress: compression evaluation for tabular training data"};
  app.set_version_flag("--version", "ppress 0.1.0");
  app.require_subcommand(1);

  StatsArgs stats;
  auto* s = app.add_subcommand("stats", "Column statistics and value-range histogram");
  s->add_option("dataset", stats.path, "CSV or raw binary file")->required();
  s->add_option("--format", stats.format, "csv or raw (default: by extension)");
  s->add_option("--desc", stats.desc, "Raw descriptor (default <file>.desc)");
  s->add_option("--dtype", stats.dtype, "f32 or f64 (CSV)");
  s->add_flag("--no-header", stats.no_header, "CSV has no header row");
  s->add_option("--bins", stats.bins, "Histogram bins")->check(CLI::PositiveNumber);
  s->add_option("--scale", stats.scale, "linear or log10");
  s->add_option("-o,--out-dir", stats.out_dir, "Output directory");

  CampaignArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate the listed configurations of a campaign");
  e->add_option("campaign", ev.file, "Campaign file (JSON)")->required();
  e->add_option("-c,--config", ev.configs, "Extra config, e.g. EBLC_PRED/REL:1e-3");
  add_common(e, ev.common, true);

  CampaignArgs se;
  auto* sr = app.add_subcommand("search", "Boundary search and candidate evaluation");
  sr->add_option("campaign", se.file, "Campaign file (JSON)")->required();
  sr->add_option("--tau", se.tau, "Override the minimum acceptable quality");
  sr->add_option("-N,--candidates", se.n, "Override the candidate count");
  add_common(sr, se.common, true);

  ParetoArgs pa;
  auto* p = app.add_subcommand("pareto", "Per-method and global Pareto fronts");
  add_common(p, pa.common, false);
  p->add_option("-o,--out-dir", pa.out_dir, "Output directory");
  p->add_flag("--include-probes", pa.include_probes, "Include boundary-search probes");

  SpeedupArgs sp;
  auto* u = app.add_subcommand("speedup", "Minimum core counts for compressed transfer");
  add_common(u, sp.common, false);
  u->add_option("--csv", sp.csv, "CSV with columns C,b_c (GB/s) instead of a store");
  u->add_option("-b,--bandwidths", sp.bandwidths, "Comma-separated link bandwidths in GB/s");
  u->add_option("-o,--out", sp.out, "Write the CSV table here");

  ReportArgs re;
  auto* r = app.add_subcommand("report", "Markdown report of a record store");
  add_common(r, re.common, false);
  r->add_option("-o,--out-dir", re.out_dir, "Output directory");
  r->add_option("-b,--bandwidths", re.bandwidths, "Comma-separated link bandwidths in GB/s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_stats(stats);
    if (*e) return cmd_eval(ev);
    if (*sr) return cmd_search(se);
    if (*p) return cmd_pareto(pa);
    if (*u) return cmd_speedup(sp);
    if (*r) return cmd_report(re);
  } catch (const ConfigError& err) {
    std::cerr << "ppress: configuration error: " << err.what() << "\n";
    return kUsage;
  } catch (const DataError& err) {
    std::cerr << "ppress: data error: " << err.what() << "\n";
    return kData;
  } catch (const FormatError& err) {
    std::cerr << "ppress: format error: " << err.what() << "\n";
    return kData;
  } catch (const InfeasibleError& err) {
    std::cerr << "ppress: infeasible: " << err.what() << "\n";
    return kInfeasible;
  } catch (const ApplicationError& err) {
    std::cerr << "ppress: application failure: " << err.what() << "\n";
    return kApplication;
  } catch (const Json::exception& err) {
    std::cerr << "ppress: configuration error: " << err.what() << "\n";
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "ppress: internal error: " << err.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
