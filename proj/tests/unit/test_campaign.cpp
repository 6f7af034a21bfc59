#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ppress/campaign.hpp"
#include "ppress/campaign_file.hpp"
#include "ppress/error.hpp"
#include "ppress/records.hpp"
#include "synth.hpp"

using namespace ppress;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ppress_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const DatasetPair& small_pair() {
  static const DatasetPair p = [] {
    SplitSpec s;
    s.seed = 1;
    return split(testing::latent_dataset(1500, 8, 3), s);
  }();
  return p;
}

Application ridge() {
  Application a;
  a.id = "ridge";
  a.kind = AppKind::ridge_regression;
  a.target = "c0";
  return a;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MethodEntry rel_entry(double lo = 1e-7, double hi = 0.5) {
  MethodEntry m;
  m.domain.method = Method::eblc_pred;
  m.domain.mode = Mode::rel;
  m.domain.bound_min = lo;
  m.domain.bound_max = hi;
  return m;
}

}  // namespace

TEST_CASE("records: JSON round trip including non-finite values") {
  EvaluationRecord r;
  r.record_id = "abc";
  r.dataset_id = "d";
  r.app_id = "a";
  r.label = "EBLC_PRED/REL";
  r.role = "candidate";
  r.config.method = Method::eblc_pred;
  r.config.mode = Mode::rel;
  r.config.bound = {1e-3};
  r.psi = 0.5;
  r.ratio = 12.5;
  r.errors.psnr_db = std::numeric_limits<double>::infinity();
  r.errors.mse = std::numeric_limits<double>::quiet_NaN();
  r.metric = "R2";
  const std::string line = to_json_line(r);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.find("\"inf\"") != std::string::npos);
  const EvaluationRecord back = record_from_json(Json::parse(line));
  CHECK(back.config == r.config);
  CHECK(std::isinf(back.errors.psnr_db));
  CHECK(std::isnan(back.errors.mse));
  CHECK(to_json_line(back) == line);
}

TEST_CASE("cache key depends on every identifying input") {
  const Application a = ridge();
  ReducerConfig c;
  const std::string k = cache_key("d", a, c, CompressTarget::both, 0);
  CHECK(k.size() == 64);
  CHECK(k == cache_key("d", a, c, CompressTarget::both, 0));
  CHECK(k != cache_key("e", a, c, CompressTarget::both, 0));
  CHECK(k != cache_key("d", a, c, CompressTarget::train, 0));
  CHECK(k != cache_key("d", a, c, CompressTarget::both, 1));
  Application b = a;
  b.ridge_lambda_scale = 1e-2;
  CHECK(k != cache_key("d", b, c, CompressTarget::both, 0));
  c.fixed.codec_level = 2;
  Application kn = a;
  kn.knn_k = 7;  // inactive for ridge: not part of the identity
  CHECK(k == cache_key("d", kn, ReducerConfig{}, CompressTarget::both, 0));
  CHECK(k != cache_key("d", a, c, CompressTarget::both, 0));
}

TEST_CASE("eval_config: NONE reproduces phi; cache hit equals recompute") {
  const auto& data = small_pair();
  const Application app = ridge();
  const auto phi = lossless_quality(data.train, data.validation, app, 1).phi;
  const EvaluationRecord none = eval_config(data, pair_id(data), app, ReducerConfig{});
  REQUIRE(none.ok);
  CHECK(none.psi == phi);
  CHECK(none.ratio > 0.99);
  CHECK(none.ratio < 1.0);

  const fs::path dir = fresh_dir("cache");
  const RecordCache cache(dir);
  ReducerConfig rel;
  rel.method = Method::eblc_pred;
  rel.mode = Mode::rel;
  rel.bound = {1e-3};
  EvalOptions o;
  o.cache = &cache;
  const auto first = eval_config(data, pair_id(data), app, rel, o);
  CHECK_FALSE(first.cached);
  const auto second = eval_config(data, pair_id(data), app, rel, o);
  CHECK(second.cached);
  CHECK(same_content(first, second));
  const auto fresh = eval_config(data, pair_id(data), app, rel);
  CHECK(same_content(first, fresh));
  CHECK(first.errors.max_rel_to_range_err <= 1e-3);
  CHECK(first.ratio > 2);

  const auto tiny = eval_config(data, pair_id(data), app, rel.with_bound(1e-8));
  CHECK(std::fabs(tiny.psi - phi) <= 1e-6);
}

TEST_CASE("eval_config: failures become records") {
  const auto& data = small_pair();
  Application app = ridge();
  app.target = "nope";
  const auto r = eval_config(data, pair_id(data), app, ReducerConfig{});
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("eval_many preserves order across workers") {
  const auto& data = small_pair();
  std::vector<ReducerConfig> cfgs;
  std::vector<EvalOptions> opts;
  for (double b : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    ReducerConfig c;
    c.method = Method::eblc_pred;
    c.mode = Mode::rel;
    c.bound = {b};
    cfgs.push_back(c);
    opts.emplace_back();
  }
  const auto serial = eval_many(data, "d", ridge(), cfgs, opts, 1);
  const auto par = eval_many(data, "d", ridge(), cfgs, opts, 3);
  for (std::size_t i = 0; i < cfgs.size(); ++i) CHECK(same_content(serial[i], par[i]));
}

TEST_CASE("run_campaign: NONE only yields replicates records") {
  CampaignOptions o;
  o.spec.replicates = 3;
  MethodEntry none;
  none.domain.method = Method::none;
  none.domain.mode = Mode::none;
  none.sweep = false;
  const auto res = run_campaign(small_pair(), {ridge()}, {none}, o);
  CHECK(res.records.size() == 3);
  for (const auto& r : res.records) CHECK(r.role == "baseline");
}

TEST_CASE("run_campaign: REL search, candidate structure, determinism") {
  const fs::path dir = fresh_dir("campaign");
  CampaignOptions o;
  o.spec.n_candidates = 8;
  o.spec.tau = 0.7;
  o.spec.max_iters = 14;
  o.spec.bound_rtol = 1e-2;
  MethodEntry l;
  l.domain.method = Method::lossless;
  l.domain.mode = Mode::none;
  l.sweep = false;
  const std::vector<MethodEntry> methods{rel_entry(), l};

  RecordStore s1(dir / "a.jsonl");
  o.store = &s1;
  const auto res = run_campaign(small_pair(), {ridge()}, methods, o);
  RecordStore s2(dir / "b.jsonl");
  o.store = &s2;
  run_campaign(small_pair(), {ridge()}, methods, o);

  REQUIRE(res.searches.size() == 2);
  const auto& s = res.searches[0];
  REQUIRE(s.searched);
  CHECK_FALSE(s.infeasible);
  REQUIRE(s.candidates.size() == 8);
  CHECK(s.candidates.front() == s.lower);
  CHECK(s.candidates.back() == s.upper);
  CHECK(s.upper <= s.lower);

  std::size_t cand = 0, probes = 0, control = 0;
  std::vector<std::pair<double, double>> bp;
  for (const auto& r : res.records) {
    if (r.role == "candidate") {
      ++cand;
      bp.emplace_back(r.config.primary(), r.psi);
    }
    if (r.role == "probe_upper" || r.role == "probe_lower") ++probes;
    if (r.role == "control") ++control;
  }
  CHECK(cand == 8);
  CHECK(probes >= 2);
  CHECK(probes <= 2 * static_cast<std::size_t>(o.spec.max_iters));
  CHECK(control == 1);
  std::sort(bp.begin(), bp.end());
  for (std::size_t i = 1; i < bp.size(); ++i) CHECK(bp[i].second <= bp[i - 1].second + 1e-3);
  for (const auto& [b, psi] : bp) CHECK(psi > 0.7);

  const auto a = RecordStore::load(dir / "a.jsonl");
  const auto b = RecordStore::load(dir / "b.jsonl");
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == res.records.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(deterministic_view(a[i]).dump() == deterministic_view(b[i]).dump());
}

TEST_CASE("run_campaign: tau above phi is reported infeasible") {
  CampaignOptions o;
  o.spec.tau = 1.5;
  const auto res = run_campaign(small_pair(), {ridge()}, {rel_entry()}, o);
  REQUIRE(res.searches.size() == 1);
  CHECK(res.searches[0].infeasible);
}

TEST_CASE("run_campaign: N=2 evaluates exactly the boundaries") {
  CampaignOptions o;
  o.spec.n_candidates = 2;
  o.spec.max_iters = 10;
  o.spec.bound_rtol = 1e-2;
  const auto res = run_campaign(small_pair(), {ridge()}, {rel_entry()}, o);
  std::vector<double> cand;
  for (const auto& r : res.records) {
    if (r.role == "candidate") cand.push_back(r.config.primary());
  }
  REQUIRE(cand.size() == 2);
  CHECK(cand[0] == res.searches[0].lower);
  CHECK(cand[1] == res.searches[0].upper);
}

TEST_CASE("run_campaign: lower_better metric and sampling prescan") {
  Application lr;
  lr.id = "lowrank";
  lr.kind = AppKind::lowrank_reconstruction;
  lr.metric.name = MetricName::mse;
  lr.rank = 5;
  CampaignOptions o;
  o.spec.max_iters = 6;
  o.spec.bound_rtol = 1e-2;
  // MSE threshold: orientation maps tau to -tau, so "psi > tau" becomes mse < 1e12
  o.spec.tau = 1e12;
  MethodEntry wor;
  wor.domain.method = Method::sample_wor;
  wor.domain.mode = Mode::none;
  wor.domain.bound_min = 0.05;
  wor.domain.bound_max = 1.0;
  const auto res = run_campaign(small_pair(), {lr}, {rel_entry(1e-6, 1e-1), wor}, o);
  REQUIRE(res.searches.size() == 2);
  CHECK_FALSE(res.searches[0].infeasible);
  CHECK_FALSE(res.searches[1].infeasible);
  std::size_t prescan = 0;
  for (const auto& r : res.records) prescan += r.role == "prescan" ? 1 : 0;
  CHECK(prescan == 12);
  for (const auto& r : res.records) CHECK(r.direction == Direction::lower_better);
}

TEST_CASE("campaign file parsing") {
  const fs::path dir = fresh_dir("cfile");
  save_csv(testing::latent_dataset(100, 3, 1), (dir / "data.csv").string());
  const Json good = Json::parse(R"({
    "schema_version": 1,
    "seed": 4,
    "datasets": [{"id": "syn", "path": "data.csv", "split": {"train_fraction": 0.75}}],
    "applications": [{"id": "ridge", "kind": "ridge_regression", "target": "c0"}],
    "methods": [
      {"method": "EBLC_PRED", "mode": "REL", "bound_min": 1e-6, "bound_max": 0.1},
      {"method": "TRUNC", "bounds": [16]},
      {"method": "LOSSLESS"}
    ],
    "search": {"tau": 0.5, "N": 4},
    "output": {"store": "out/records.jsonl"}
  })");
  const CampaignFile c = parse_campaign(good, dir);
  CHECK(c.seed == 4);
  CHECK(c.spec.n_candidates == 4);
  CHECK(c.spec.tau == 0.5);
  CHECK(c.methods.size() == 3);
  CHECK(c.methods[0].sweep);
  CHECK_FALSE(c.methods[1].sweep);
  CHECK(c.output.store == dir / "out/records.jsonl");
  CHECK(c.bandwidths.size() == 3);
  CHECK(load_pair(c.datasets[0]).train.n_obs() == 75);

  Json unknown = good;
  unknown["bogus"] = 1;
  CHECK_THROWS_AS(parse_campaign(unknown, dir), ConfigError);
  Json version = good;
  version["schema_version"] = 2;
  CHECK_THROWS_AS(parse_campaign(version, dir), ConfigError);
  Json missing = good;
  missing["datasets"][0]["path"] = "nope.csv";
  CHECK_THROWS_AS(parse_campaign(missing, dir), DataError);
  Json bad_mode = good;
  bad_mode["methods"][0]["mode"] = "PREC";
  CHECK_THROWS_AS(parse_campaign(bad_mode, dir), ConfigError);
}

TEST_CASE("record store: append-only lines and malformed input") {
  const fs::path dir = fresh_dir("store");
  RecordStore s(dir / "r.jsonl");
  EvaluationRecord r;
  r.record_id = "x";
  s.append(r);
  const std::string first = slurp(dir / "r.jsonl");
  r.record_id = "y";
  s.append(r);
  const std::string both = slurp(dir / "r.jsonl");
  CHECK(both.substr(0, first.size()) == first);
  CHECK(RecordStore::load(dir / "r.jsonl").size() == 2);
  std::ofstream(dir / "r.jsonl", std::ios::app) << "{not json\n";
  CHECK_THROWS_AS(RecordStore::load(dir / "r.jsonl"), DataError);
}
