#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rascap/bounds.hpp"
#include "rascap/channel.hpp"
#include "rascap/montecarlo.hpp"
#include "rascap/selection.hpp"
#include "rascap/validation.hpp"

namespace rascap::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Largest C(N_r, L) for which --method auto still runs exhaustive search.
constexpr std::uint64_t kAutoExhaustiveLimit = 5000;
constexpr int kCdfPoints = 501;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw UsageError("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  if (text.empty()) throw UsageError("empty value list");
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_real(parts[0]));
    } else if (parts.size() == 3) {
      const double start = parse_real(parts[0]);
      const double step = parse_real(parts[1]);
      const double stop = parse_real(parts[2]);
      if (!(step > 0.0) || stop < start) {
        throw UsageError("range '" + item + "' needs step > 0 and stop >= start");
      }
      const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
      if (n > 100000) throw UsageError("range '" + item + "' is too long");
      for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    } else {
      throw UsageError("bad list item '" + item + "' (expected v or start:step:stop)");
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_real_list(text)) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) throw UsageError("expected integers in '" + text + "'");
    out.push_back(static_cast<int>(r));
  }
  return out;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string Table::to_csv() const {
  std::string s;
  auto cell = [](const Cell& c) {
    return std::holds_alternative<double>(c) ? format_real(std::get<double>(c))
                                             : std::get<std::string>(c);
  };
  for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + cell(row[i]);
    s += '\n';
  }
  for (const auto& [name, value] : summary) {
    s += name + "," + format_real(value);
    for (std::size_t i = 2; i < columns.size(); ++i) s += ',';
    s += '\n';
  }
  return s;
}

std::string Table::to_json() const {
  // Values are rounded through the 9-digit text form so both formats carry
  // the same numbers.
  auto num = [](double v) { return std::stod(format_real(v)); };
  json doc;
  doc["columns"] = columns;
  json rs = json::array();
  for (const auto& row : rows) {
    json r = json::array();
    for (const auto& c : row) {
      if (std::holds_alternative<double>(c)) {
        r.push_back(num(std::get<double>(c)));
      } else {
        r.push_back(std::get<std::string>(c));
      }
    }
    rs.push_back(std::move(r));
  }
  doc["rows"] = std::move(rs);
  if (!summary.empty()) {
    json sm = json::object();
    for (const auto& [name, value] : summary) sm[name] = num(value);
    doc["summary"] = std::move(sm);
  }
  return doc.dump(2) + "\n";
}

namespace {

struct Common {
  std::string nt, nr, l, snr_db, rho_bar;
  long long trials = static_cast<long long>(kDefaultTrials);
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string format = "csv";
  std::string regime = "auto";
  std::string method = "auto";
};

struct Context {
  const std::vector<std::string>& args;
  std::ostream& out;
  std::string subcommand;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

void add_common(CLI::App* sub, Common& c, bool with_trials) {
  sub->add_option("--nt", c.nt, "transmit antennas (list or start:step:stop)")->required();
  sub->add_option("--nr", c.nr, "receive antennas (list or range)")->required();
  sub->add_option("--l", c.l, "selected antennas (list or range)")->required();
  auto* db = sub->add_option("--snr-db", c.snr_db, "normalized SNR in dB (list or range)");
  auto* lin = sub->add_option("--rho-bar", c.rho_bar, "normalized SNR, linear (list or range)");
  db->excludes(lin);
  if (with_trials) {
    sub->add_option("--trials", c.trials, "Monte-Carlo trials per point")
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  }
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--regime", c.regime, "bub, mub, or auto (from L vs N_t)")
      ->check(CLI::IsMember({"auto", "bub", "mub"}))
      ->capture_default_str();
}

struct Snr {
  double db;
  double rho;
};

std::vector<Snr> snr_points(const Common& c, const std::string& fallback_db) {
  std::vector<Snr> out;
  if (!c.rho_bar.empty()) {
    for (double r : parse_real_list(c.rho_bar)) {
      if (!(r > 0.0)) throw UsageError("--rho-bar values must be > 0");
      out.push_back({10.0 * std::log10(r), r});
    }
  } else {
    for (double d : parse_real_list(c.snr_db.empty() ? fallback_db : c.snr_db)) {
      out.push_back({d, db_to_linear(d)});
    }
  }
  return out;
}

std::size_t trial_count(const Common& c) {
  if (c.trials < 1) throw UsageError("--trials must be >= 1");
  return static_cast<std::size_t>(c.trials);
}

SystemConfig make_config(int nt, int nr, int l, double rho) {
  SystemConfig cfg{nt, nr, l, rho};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

Regime resolve_regime(const std::string& flag, const SystemConfig& cfg) {
  return flag == "auto" ? cfg.regime() : regime_from_string(flag);
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

json config_json(const SystemConfig& cfg, Regime regime) {
  json c;
  c["n_t"] = cfg.n_t;
  c["n_r"] = cfg.n_r;
  c["l"] = cfg.l;
  c["rho_bar"] = cfg.rho_bar;
  c["regime"] = to_string(regime);
  return c;
}

void write_manifest(const Context& ctx, const fs::path& path, const std::string& content,
                    json config, std::optional<std::size_t> trials,
                    std::optional<std::uint64_t> seed) {
  json m;
  m["subcommand"] = ctx.subcommand;
  m["config"] = std::move(config);
  m["trials"] = trials ? json(*trials) : json(nullptr);
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["version"] = RASCAP_VERSION;
  m["duration_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
  m["output"] = path.filename().string();
  m["digest"] = "fnv1a64:" + fnv1a_hex(content);
  m["argv"] = ctx.args;
  write_atomic(path.string() + ".manifest.json", m.dump(2) + "\n");
}

void emit(Context& ctx, const Common& c, const std::string& stem, const Table& table,
          json config, std::optional<std::size_t> trials, std::optional<std::uint64_t> seed) {
  fs::create_directories(c.out);
  const std::string ext = c.format == "json" ? ".json" : ".csv";
  const fs::path path = fs::path(c.out) / (stem + ext);
  const std::string content = c.format == "json" ? table.to_json() : table.to_csv();
  write_atomic(path, content);
  write_manifest(ctx, path, content, std::move(config), trials, seed);
  ctx.out << path.string() << '\n';
}

std::string stem_number(double v) {
  std::string s = format_real(v);
  for (auto& ch : s) {
    if (ch == '.') ch = 'p';
    if (ch == '-') ch = 'm';
  }
  return s;
}

void cmd_cdf(Context& ctx, const Common& c) {
  const auto trials = trial_count(c);
  const auto nts = parse_int_list(c.nt);
  const auto nrs = parse_int_list(c.nr);
  const auto ls = parse_int_list(c.l);
  const auto snrs = snr_points(c, "8");
  const Workers workers = Workers::from_env();
  for (int nt : nts) {
    for (int l : ls) {
      for (const auto& snr : snrs) {
        for (int nr : nrs) {
          const SystemConfig cfg = make_config(nt, nr, l, snr.rho);
          const Regime regime = resolve_regime(c.regime, cfg);

          EmpiricalSample sample;
          std::function<double(double)> asym;
          double ks = 0.0;
          DensityGrid grid;
          if (regime == Regime::Bub) {
            sample = sample_bub_exact(cfg, trials, c.seed, workers);
            const NormalLaw law(bub_gaussian(cfg));
            asym = [law](double x) { return law.cdf(x); };
            ks = ks_distance(sample, asym);
          } else {
            sample = sample_mub_exact(cfg, trials, c.seed, workers);
            grid = mub_density(cfg);
            asym = [&grid](double x) { return grid.cdf_at(x); };
            ks = ks_distance(sample, grid);
          }

          Table t;
          t.columns = {"x_bits", "cdf_exact_mc", "cdf_asymptotic"};
          const double lo = sample.values.front();
          const double hi = sample.values.back();
          const double pad = 0.05 * std::max(hi - lo, 1e-9);
          for (int i = 0; i < kCdfPoints; ++i) {
            const double x = lo - pad + (hi - lo + 2 * pad) * i / (kCdfPoints - 1);
            t.rows.push_back({x, sample.cdf_at(x), asym(x)});
          }
          t.summary = {{"ks", ks}};

          json config = config_json(cfg, regime);
          config["snr_db"] = snr.db;
          const std::string stem = "cdf_" + std::string(to_string(regime)) + "_nt" +
                                   std::to_string(nt) + "_nr" + std::to_string(nr) + "_l" +
                                   std::to_string(l) + "_snr" + stem_number(snr.db);
          emit(ctx, c, stem, t, std::move(config), trials, c.seed);
        }
      }
    }
  }
}

double asymptotic_mean(const SystemConfig& cfg, Regime regime) {
  return regime == Regime::Bub ? bub_gaussian(cfg).mu
                               : asymptotic_ergodic(mub_density(cfg)).mean;
}

void cmd_ergodic(Context& ctx, const Common& c) {
  const auto trials = trial_count(c);
  const auto nts = parse_int_list(c.nt);
  const auto nrs = parse_int_list(c.nr);
  const auto ls = parse_int_list(c.l);
  const auto snrs = snr_points(c, "0:2:20");
  const Workers workers = Workers::from_env();
  for (int nt : nts) {
    for (int nr : nrs) {
      for (int l : ls) {
        const SystemConfig base = make_config(nt, nr, l, 1.0);
        const Regime regime = resolve_regime(c.regime, base);
        SelectionMethod method = SelectionMethod::Greedy;
        if (c.method == "exhaustive" ||
            (c.method == "auto" && binomial(nr, l) <= kAutoExhaustiveLimit)) {
          method = SelectionMethod::Exhaustive;
        }
        Table t;
        t.columns = {"snr_db", "asym_bound_mean", "exact_bound_mean", "capacity_mean",
                     "capacity_method"};
        json db = json::array();
        for (const auto& snr : snrs) {
          const SystemConfig cfg = make_config(nt, nr, l, snr.rho);
          const auto exact = regime == Regime::Bub
                                 ? sample_bub_exact(cfg, trials, c.seed, workers)
                                 : sample_mub_exact(cfg, trials, c.seed, workers);
          const auto cap = sample_selected_capacity(cfg, trials, c.seed, method, workers);
          t.rows.push_back({snr.db, asymptotic_mean(cfg, regime), summarize(exact).mean,
                            summarize(cap).mean, std::string(to_string(method))});
          db.push_back(snr.db);
        }
        json config = config_json(base, regime);
        config.erase("rho_bar");
        config["snr_db"] = std::move(db);
        config["method"] = to_string(method);
        const std::string stem = "ergodic_" + std::string(to_string(regime)) + "_nt" +
                                 std::to_string(nt) + "_nr" + std::to_string(nr) + "_l" +
                                 std::to_string(l);
        emit(ctx, c, stem, t, std::move(config), trials, c.seed);
      }
    }
  }
}

void cmd_moments(Context& ctx, const Common& c) {
  const auto nts = parse_int_list(c.nt);
  const auto nrs = parse_int_list(c.nr);
  const auto ls = parse_int_list(c.l);
  const auto snrs = snr_points(c, "8");
  for (int nt : nts) {
    for (int l : ls) {
      for (const auto& snr : snrs) {
        const SystemConfig first = make_config(nt, nrs.front(), l, snr.rho);
        const Regime regime = resolve_regime(c.regime, first);
        Table t;
        t.columns = {"n_r", "asym_mean", "asym_variance"};
        json nr_list = json::array();
        for (int nr : nrs) {
          const SystemConfig cfg = make_config(nt, nr, l, snr.rho);
          const ErgodicMoments m = regime == Regime::Bub
                                       ? asymptotic_ergodic(bub_gaussian(cfg))
                                       : asymptotic_ergodic(mub_density(cfg));
          t.rows.push_back({static_cast<double>(nr), m.mean, m.variance});
          nr_list.push_back(nr);
        }
        json config = config_json(first, regime);
        config["n_r"] = std::move(nr_list);
        config["snr_db"] = snr.db;
        const std::string stem = "moments_" + std::string(to_string(regime)) + "_nt" +
                                 std::to_string(nt) + "_l" + std::to_string(l) + "_snr" +
                                 stem_number(snr.db);
        emit(ctx, c, stem, t, std::move(config), std::nullopt, std::nullopt);
      }
    }
  }
}

struct ValidateFlags {
  std::string suite = "fast";
  std::uint64_t seed = 0;
  std::string only;
  int corrupt = 0;
  std::string out;
};

int cmd_validate(Context& ctx, const ValidateFlags& v) {
  ValidationOptions opt;
  opt.suite = suite_from_string(v.suite);
  opt.seed = v.seed;
  if (!v.only.empty()) {
    opt.only = parse_int_list(v.only);
    for (int id : opt.only) {
      if (id < 1 || id > kCriterionCount) throw UsageError("--only: no criterion " + std::to_string(id));
    }
  }
  if (v.corrupt != 0) opt.corrupt_criterion = v.corrupt;
  const ValidationReport report = run_validation(opt);
  for (const auto& r : report.criteria) ctx.out << summary_line(r) << '\n';
  if (!v.out.empty()) {
    fs::create_directories(v.out);
    const fs::path path = fs::path(v.out) / "validation_report.json";
    const std::string content = report.to_json() + "\n";
    write_atomic(path, content);
    json config;
    config["suite"] = v.suite;
    config["only"] = opt.only;
    write_manifest(ctx, path, content, std::move(config), std::nullopt, v.seed);
    ctx.out << path.string() << '\n';
  }
  if (!report.pass()) {
    for (const auto& r : report.criteria) {
      if (!r.pass) ctx.out << "failed criterion " << r.id << ": " << r.title << '\n';
    }
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Receive-antenna-selection capacity bounds and Monte-Carlo experiments",
               "rascap"};
  app.require_subcommand(1);

  Common cdf_flags, erg_flags, mom_flags;
  auto* cdf = app.add_subcommand("cdf", "CDF of the exact bound (MC) and its asymptotic law");
  add_common(cdf, cdf_flags, true);
  auto* erg = app.add_subcommand("ergodic", "ergodic bound and capacity versus SNR");
  add_common(erg, erg_flags, true);
  erg->add_option("--method", erg_flags.method, "auto, exhaustive or greedy")
      ->check(CLI::IsMember({"auto", "exhaustive", "greedy"}))
      ->capture_default_str();
  auto* mom = app.add_subcommand("moments", "asymptotic bound mean and variance versus N_r");
  add_common(mom, mom_flags, false);

  ValidateFlags val_flags;
  auto* val = app.add_subcommand("validate", "run the acceptance criteria");
  val->add_option("--suite", val_flags.suite, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}))
      ->capture_default_str();
  val->add_option("--seed", val_flags.seed, "master seed")->capture_default_str();
  val->add_option("--only", val_flags.only, "criteria to run (list)");
  val->add_option("--out", val_flags.out, "directory for validation_report.json");
  // Test hook: makes the named criterion's thresholds unattainable.
  val->add_option("--corrupt", val_flags.corrupt)->group("");

  auto* ver = app.add_subcommand("version", "print the tool version");

  std::vector<std::string> argv_store{"rascap"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx{args, out, ""};
  try {
    if (ver->parsed()) {
      out << "rascap " << RASCAP_VERSION << '\n';
      return kExitOk;
    }
    if (val->parsed()) {
      ctx.subcommand = "validate";
      return cmd_validate(ctx, val_flags);
    }
    if (cdf->parsed()) {
      ctx.subcommand = "cdf";
      cmd_cdf(ctx, cdf_flags);
    } else if (erg->parsed()) {
      ctx.subcommand = "ergodic";
      cmd_ergodic(ctx, erg_flags);
    } else if (mom->parsed()) {
      ctx.subcommand = "moments";
      cmd_moments(ctx, mom_flags);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace rascap::cli
