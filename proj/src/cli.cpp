#include "ietlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

namespace ietlab {

namespace {

namespace fs = std::filesystem;

// Options each command accepts, by config-file name.
const std::map<std::string, std::set<std::string>>& allowed_options() {
  static const std::map<std::string, std::set<std::string>> table{
      {"return-map", {"iet", "interval", "step_cap"}},
      {"certify-rigidity", {"iet", "epsilon", "n", "idoc_depth"}},
      {"verify-certificate", {"certificate", "samples"}},
      {"correlations", {"iet", "n", "depth"}},
      {"mixing-window", {"iet", "j", "k", "epsilon", "depth"}},
      {"block-mixing", {"certificate", "iet"}},
      {"minimality", {"iet", "idoc_depth"}},
      {"partition", {"iet", "n"}},
  };
  return table;
}

bool is_common(const std::string& key) { return key == "output" || key == "seed" || key == "command"; }

long long parse_ll(std::string_view s, const std::string& what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(what + ": '" + std::string(s) + "' is not an integer");
  }
  return v;
}

std::string resolve(const std::string& path, const std::string& base) {
  if (path.empty() || base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).string();
}

const char* category(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Verification: return "verification";
    case ErrorKind::Domain: return "domain";
  }
  return "internal";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return kExitParse;
    case ErrorKind::Verification: return kExitVerification;
    default: return kExitPrecondition;
  }
}

void report_error(std::ostream& err, const std::string& cat, int code, const std::string& msg) {
  const json j{{"schema", kSchema}, {"kind", "error"}, {"category", cat}, {"exit_code", code}, {"message", msg}};
  err << j.dump() << "\n";
}

void emit(const std::string& text, const RunConfig& cfg, std::ostream& out) {
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  const fs::path target(cfg.output_path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw PreconditionError("cannot write '" + tmp.string() + "'");
    f << text;
    f.close();
    if (!f) throw PreconditionError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw PreconditionError("cannot move output into place: " + ec.message());
}

IetDocument load_iet(const RunConfig& cfg) {
  if (cfg.iet_path.empty()) throw ParseError("--iet is required for " + cfg.command);
  return iet_from_json(parse_json_text(read_text_file(cfg.iet_path), cfg.iet_path));
}

ExactScalar need_epsilon(const RunConfig& cfg) {
  if (!cfg.epsilon) throw ParseError("--epsilon is required for " + cfg.command);
  const ExactScalar e = ExactScalar::parse(*cfg.epsilon);
  if (e.sign() <= 0) throw PreconditionError("epsilon must be positive");
  return e;
}

const std::vector<long long>& need_n(const RunConfig& cfg) {
  if (cfg.n.empty()) throw ParseError("--n is required for " + cfg.command);
  return cfg.n;
}

Interval parse_interval_text(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ParseError("interval '" + text + "' must be lo,hi");
  const ExactScalar lo = ExactScalar::parse(text.substr(0, comma));
  const ExactScalar hi = ExactScalar::parse(text.substr(comma + 1));
  try {
    return Interval(lo, hi);
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("interval: ") + e.what());
  }
}

// Certificates from a single-certificate or list document.
std::vector<RigidityCertificate> load_certificates(const std::string& path) {
  const json j = parse_json_text(read_text_file(path), path);
  if (j.is_object() && j.value("kind", "") == "certificate-list") {
    std::vector<RigidityCertificate> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key != "schema" && key != "kind" && key != "certificates" && key != "n" && key != "max_ratio") {
        throw ParseError(path + ": unknown field '" + key + "'");
      }
    }
    if (!j.contains("certificates") || !j["certificates"].is_array()) {
      throw ParseError(path + ": 'certificates' must be an array");
    }
    for (const auto& c : j["certificates"]) out.push_back(certificate_from_json(c));
    return out;
  }
  return {certificate_from_json(j)};
}

int cmd_return_map(const RunConfig& cfg, std::ostream& out) {
  const IET t = load_iet(cfg).iet;
  if (!cfg.interval) throw ParseError("--interval is required for return-map");
  const Interval base = parse_interval_text(*cfg.interval);
  const ReturnSystem rs = first_return(t, base, cfg.step_cap);
  emit(dump_artifact(to_json(rs)), cfg, out);
  return kExitOk;
}

int cmd_certify(const RunConfig& cfg, std::ostream& out) {
  const IET t = load_iet(cfg).iet;
  const ExactScalar eps = need_epsilon(cfg);
  const auto& ns = need_n(cfg);
  std::vector<RigidityCertificate> certs;
  for (long long n : ns) {
    CertifyOptions opt;
    opt.idoc_depth = cfg.idoc_depth.value_or(0);
    certs.push_back(certify_rigidity(t, eps, n, opt));
  }
  if (certs.size() == 1) {
    emit(dump_artifact(to_json(certs.front())), cfg, out);
    return kExitOk;
  }
  json j{{"schema", kSchema}, {"kind", "certificate-list"}, {"n", ns}};
  json arr = json::array();
  for (const auto& c : certs) arr.push_back(to_json(c));
  j["certificates"] = arr;
  // Largest ratio between consecutive requested n (sorted).
  std::vector<long long> sorted = ns;
  std::sort(sorted.begin(), sorted.end());
  ExactScalar ratio(1);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    ratio = max(ratio, ExactScalar(sorted[i]) / ExactScalar(sorted[i - 1]));
  }
  j["max_ratio"] = ratio.str();
  emit(dump_artifact(j), cfg, out);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.certificate_path.empty()) throw ParseError("--certificate is required");
  const auto certs = load_certificates(cfg.certificate_path);
  const long long samples = cfg.samples.value_or(1000);
  if (samples < 0) throw PreconditionError("samples must be >= 0");
  bool ok = true;
  std::vector<VerificationReport> reps;
  for (const auto& c : certs) {
    reps.push_back(verify_certificate(c, samples, cfg.seed));
    ok = ok && reps.back().ok;
  }
  json j;
  if (reps.size() == 1) {
    j = to_json(reps.front());
  } else {
    j = json{{"schema", kSchema}, {"kind", "verification-list"}, {"ok", ok}};
    json arr = json::array();
    for (const auto& r : reps) arr.push_back(to_json(r));
    j["reports"] = arr;
  }
  emit(dump_artifact(j), cfg, out);
  if (!ok) {
    for (std::size_t i = 0; i < reps.size(); ++i) {
      if (!reps[i].ok) {
        report_error(err, "verification", kExitVerification,
                     "certificate " + std::to_string(i) + ": " + reps[i].failures.front());
        break;
      }
    }
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_correlations(const RunConfig& cfg, std::ostream& out) {
  const IET t = load_iet(cfg).iet;
  const auto rows = correlation_table(t, need_n(cfg), cfg.depth.value_or(6));
  std::ostringstream csv;
  csv << "n,a,b,value,target,deviation\n";
  for (const auto& r : rows) {
    csv << r.n << ',' << r.a.str() << ',' << r.b.str() << ',' << r.report.value.str() << ','
        << r.report.target.str() << ',' << r.report.deviation.str() << '\n';
  }
  emit(csv.str(), cfg, out);
  return kExitOk;
}

int cmd_mixing_window(const RunConfig& cfg, std::ostream& out) {
  const IET t = load_iet(cfg).iet;
  if (!cfg.j || !cfg.k) throw ParseError("--j and --k are required for mixing-window");
  const ExactScalar eps = need_epsilon(cfg);
  const int depth = cfg.depth.value_or(6);
  const auto res = mixing_window_check(t, *cfg.j, *cfg.k, eps, depth);
  emit(dump_artifact(to_json(res, *cfg.j, *cfg.k, eps, depth)), cfg, out);
  return kExitOk;
}

int cmd_block_mixing(const RunConfig& cfg, std::ostream& out) {
  if (cfg.certificate_path.empty()) throw ParseError("--certificate is required");
  const auto certs = load_certificates(cfg.certificate_path);
  if (certs.size() != 1) throw PreconditionError("block-mixing takes a single certificate");
  const RigidityCertificate& c = certs.front();
  const IET t = cfg.iet_path.empty() ? c.iet : load_iet(cfg).iet;
  emit(dump_artifact(to_json(rigidity_blocks_mixing(t, c))), cfg, out);
  return kExitOk;
}

int cmd_minimality(const RunConfig& cfg, std::ostream& out) {
  const IET t = load_iet(cfg).iet;
  emit(dump_artifact(to_json(check_idoc(t, cfg.idoc_depth.value_or(10000)))), cfg, out);
  return kExitOk;
}

int cmd_partition(const RunConfig& cfg, std::ostream& out) {
  const IET t = load_iet(cfg).iet;
  const auto& ns = need_n(cfg);
  if (ns.size() != 1) throw PreconditionError("partition takes a single n");
  const BackwardPartition bp = backward_partition(t, ns.front());
  emit(dump_artifact(to_json(bp, classify_pairs(bp, t))), cfg, out);
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : allowed_options()) v.push_back(k);
    return v;
  }();
  return names;
}

std::vector<long long> parse_n_list(const std::string& text) {
  std::vector<long long> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long long a = parse_ll(std::string_view(text).substr(0, dots), "n range");
    const long long b = parse_ll(std::string_view(text).substr(dots + 2), "n range");
    if (a > b) throw ParseError("n range '" + text + "' is empty");
    if (b - a > 1000000) throw ParseError("n range '" + text + "' too long");
    for (long long v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  std::string_view rest(text);
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_ll(rest.substr(0, comma), "n"));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

RunConfig config_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ParseError("config: expected an object");
  RunConfig c;
  auto str = [&](const json& v, const std::string& k) {
    if (!v.is_string()) throw ParseError("config." + k + ": expected a string");
    return v.get<std::string>();
  };
  auto integer = [&](const json& v, const std::string& k) {
    if (!v.is_number_integer()) throw ParseError("config." + k + ": expected an integer");
    return v.get<long long>();
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "schema") {
      if (str(v, k) != kSchema) throw ParseError("config.schema: unsupported '" + v.get<std::string>() + "'");
    } else if (k == "command") {
      c.command = str(v, k);
    } else if (k == "iet") {
      c.iet_path = resolve(str(v, k), base_dir);
    } else if (k == "output") {
      c.output_path = resolve(str(v, k), base_dir);
    } else if (k == "certificate") {
      c.certificate_path = resolve(str(v, k), base_dir);
    } else if (k == "seed") {
      const long long s = integer(v, k);
      if (s < 0) throw ParseError("config.seed: must be >= 0");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (k == "epsilon") {
      c.epsilon = v.is_number_integer() ? std::to_string(v.get<long long>()) : str(v, k);
    } else if (k == "n") {
      if (v.is_number_integer()) {
        c.n = {v.get<long long>()};
      } else if (v.is_string()) {
        c.n = parse_n_list(v.get<std::string>());
      } else if (v.is_array()) {
        for (const auto& e : v) c.n.push_back(integer(e, "n[]"));
      } else {
        throw ParseError("config.n: expected an integer, list or range string");
      }
    } else if (k == "depth") {
      c.depth = static_cast<int>(integer(v, k));
    } else if (k == "interval") {
      if (v.is_array() && v.size() == 2) {
        c.interval = scalar_from_json(v[0], "config.interval").str() + "," +
                     scalar_from_json(v[1], "config.interval").str();
      } else {
        c.interval = str(v, k);
      }
    } else if (k == "step_cap") {
      c.step_cap = integer(v, k);
    } else if (k == "samples") {
      c.samples = integer(v, k);
    } else if (k == "j") {
      c.j = integer(v, k);
    } else if (k == "k") {
      c.k = integer(v, k);
    } else if (k == "idoc_depth") {
      c.idoc_depth = integer(v, k);
    } else {
      throw ParseError("config: unknown field '" + k + "'");
    }
  }
  return c;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "return-map") return cmd_return_map(cfg, out);
    if (cfg.command == "certify-rigidity") return cmd_certify(cfg, out);
    if (cfg.command == "verify-certificate") return cmd_verify(cfg, out, err);
    if (cfg.command == "correlations") return cmd_correlations(cfg, out);
    if (cfg.command == "mixing-window") return cmd_mixing_window(cfg, out);
    if (cfg.command == "block-mixing") return cmd_block_mixing(cfg, out);
    if (cfg.command == "minimality") return cmd_minimality(cfg, out);
    if (cfg.command == "partition") return cmd_partition(cfg, out);
    throw ParseError("unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    report_error(err, category(e.kind()), exit_code(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "internal", kExitVerification, e.what());
    return kExitVerification;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact computations with interval exchange transformations", "ietlab"};
  app.require_subcommand(1, 1);

  struct Raw {
    std::string iet, config, output, epsilon, n, interval, certificate;
    std::uint64_t seed = 1;
    int depth = 0;
    long long step_cap = 0, samples = 0, j = 0, k = 0, idoc_depth = 0;
  } raw;
  // Flags given on the command line, by config-file name.
  std::map<std::string, CLI::Option*> given;

  const std::map<std::string, std::string> help{
      {"return-map", "first-return map of T to an interval"},
      {"certify-rigidity", "partial-rigidity certificates for a list of n"},
      {"verify-certificate", "re-check certificates from scratch"},
      {"correlations", "CSV of dyadic correlations"},
      {"mixing-window", "finite mixing-window membership"},
      {"block-mixing", "dyadic witness that a certificate blocks mixing"},
      {"minimality", "infinite distinct orbit condition to a depth"},
      {"partition", "backward-orbit partition and endpoint classes"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, opts] : allowed_options()) {
    CLI::App* s = app.add_subcommand(name, help.at(name));
    subs[name] = s;
    s->add_option("--config", raw.config, "JSON run config; flags override it");
    given[name + "/output"] = s->add_option("--output,-o", raw.output, "output file (default stdout)");
    given[name + "/seed"] = s->add_option("--seed", raw.seed, "seed for sampling");
    auto opt = [&](const std::string& key, CLI::Option* o) { given[name + "/" + key] = o; };
    if (opts.count("iet")) opt("iet", s->add_option("--iet", raw.iet, "IET JSON file"));
    if (opts.count("epsilon")) opt("epsilon", s->add_option("--epsilon", raw.epsilon, "exact scalar"));
    if (opts.count("n")) opt("n", s->add_option("--n", raw.n, "n, list a,b,c or range a..b"));
    if (opts.count("depth")) opt("depth", s->add_option("--depth", raw.depth, "dyadic depth"));
    if (opts.count("interval")) opt("interval", s->add_option("--interval", raw.interval, "lo,hi"));
    if (opts.count("step_cap")) opt("step_cap", s->add_option("--step-cap", raw.step_cap, "return step cap"));
    if (opts.count("certificate")) {
      opt("certificate", s->add_option("--certificate", raw.certificate, "certificate JSON file"));
    }
    if (opts.count("samples")) opt("samples", s->add_option("--samples", raw.samples, "random points"));
    if (opts.count("j")) opt("j", s->add_option("--j", raw.j, "first n of the window"));
    if (opts.count("k")) opt("k", s->add_option("--k", raw.k, "last n of the window"));
    if (opts.count("idoc_depth")) {
      opt("idoc_depth", s->add_option("--idoc-depth", raw.idoc_depth, "orbit depth for the minimality check"));
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "parse", kExitParse, e.what());
    return kExitParse;
  }

  std::string command;
  for (const auto& [name, s] : subs) {
    if (s->parsed()) command = name;
  }

  RunConfig cfg;
  try {
    if (!raw.config.empty()) {
      const json j = parse_json_text(read_text_file(raw.config), raw.config);
      cfg = config_from_json(j, fs::path(raw.config).parent_path().string());
      if (!cfg.command.empty() && cfg.command != command) {
        throw ParseError("config is for '" + cfg.command + "', not '" + command + "'");
      }
      const auto& opts = allowed_options().at(command);
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "schema" && !is_common(it.key()) && !opts.count(it.key())) {
          throw ParseError("config field '" + it.key() + "' does not apply to " + command);
        }
      }
    }
    cfg.command = command;
    auto flag = [&](const std::string& key) {
      auto it = given.find(command + "/" + key);
      return it != given.end() && it->second->count() > 0;
    };
    if (flag("iet")) cfg.iet_path = raw.iet;
    if (flag("output")) cfg.output_path = raw.output;
    if (flag("seed")) cfg.seed = raw.seed;
    if (flag("epsilon")) cfg.epsilon = raw.epsilon;
    if (flag("n")) cfg.n = parse_n_list(raw.n);
    if (flag("depth")) cfg.depth = raw.depth;
    if (flag("interval")) cfg.interval = raw.interval;
    if (flag("step_cap")) cfg.step_cap = raw.step_cap;
    if (flag("certificate")) cfg.certificate_path = raw.certificate;
    if (flag("samples")) cfg.samples = raw.samples;
    if (flag("j")) cfg.j = raw.j;
    if (flag("k")) cfg.k = raw.k;
    if (flag("idoc_depth")) cfg.idoc_depth = raw.idoc_depth;
  } catch (const Error& e) {
    report_error(err, category(e.kind()), exit_code(e.kind()), e.what());
    return exit_code(e.kind());
  }
  return run(cfg, out, err);
}

}  // namespace ietlab
