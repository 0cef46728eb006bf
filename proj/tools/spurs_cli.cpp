// spurs: simulate, plan, reconstruct, score and benchmark from the command line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spurs/spurs.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kCsvSchema = "spurs-metrics/1";
bool g_quiet = false;  // --quiet: no log lines or progress rows

constexpr const char* kCsvHeader = "method,M,isnr_db,p,sigma,rho,iterations,snr_db,mssim,wall_ms,nnz_lu,weights";

struct CliError {
  int code;
  std::string message;
};

void check(spurs_status s) {
  if (s != SPURS_OK) throw CliError{static_cast<int>(s), spurs_last_error()};
}

[[noreturn]] void invalid(const std::string& msg) { throw CliError{SPURS_E_VALIDATION, msg}; }

struct Deleter {
  void operator()(spurs_trajectory* p) const { spurs_trajectory_free(p); }
  void operator()(spurs_phantom* p) const { spurs_phantom_free(p); }
  void operator()(spurs_samples* p) const { spurs_samples_free(p); }
  void operator()(spurs_plan* p) const { spurs_plan_free(p); }
  void operator()(spurs_image* p) const { spurs_image_free(p); }
};
template <class T>
using Handle = std::unique_ptr<T, Deleter>;

template <class T, class F>
Handle<T> make(F&& f) {
  T* raw = nullptr;
  check(f(&raw));
  return Handle<T>(raw);
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string hash_of(const std::string& path) {
  char h[17];
  check(spurs_file_hash(path.c_str(), h));
  return h;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError{SPURS_E_IO, "cannot write " + path.string()};
  out << text;
  if (!out) throw CliError{SPURS_E_IO, "write failed: " + path.string()};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{SPURS_E_IO, "cannot create directory " + dir.string() + ": " + ec.message()};
}

// ---- parameters: flags > config file > defaults ----

enum class Kind { integer, real, text, reals, integers, texts };

struct Param {
  std::string name;
  Kind kind;
  json value;
  std::string help;
  std::string raw;
  CLI::Option* opt = nullptr;
};

double parse_real(const std::string& name, const std::string& s) {
  if (s == "inf" || s == "none") return INFINITY;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') invalid("--" + name + ": not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& name, const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') invalid("--" + name + ": not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

json real_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

json convert(const Param& p, const std::string& s) {
  switch (p.kind) {
    case Kind::integer: return parse_int(p.name, s);
    case Kind::real: return real_json(parse_real(p.name, s));
    case Kind::text: return s;
    case Kind::reals: {
      json a = json::array();
      for (const auto& x : split(s)) a.push_back(real_json(parse_real(p.name, x)));
      return a;
    }
    case Kind::integers: {
      json a = json::array();
      for (const auto& x : split(s)) a.push_back(parse_int(p.name, x));
      return a;
    }
    case Kind::texts: {
      json a = json::array();
      for (const auto& x : split(s)) a.push_back(x);
      return a;
    }
  }
  return {};
}

// Checks a config-file value against the parameter kind.
json coerce(const Param& p, const json& v) {
  auto bad = [&] { invalid("config file: wrong type for '" + p.name + "'"); };
  auto real_ok = [](const json& x) { return x.is_number() || (x.is_string() && (x == "inf" || x == "none")); };
  switch (p.kind) {
    case Kind::integer:
      if (!v.is_number_integer()) bad();
      return v;
    case Kind::real:
      if (!real_ok(v)) bad();
      return v.is_string() ? json("inf") : v;
    case Kind::text:
      if (!v.is_string()) bad();
      return v;
    case Kind::reals:
    case Kind::integers:
    case Kind::texts: {
      json a = v.is_array() ? v : json::array({v});
      for (const auto& x : a) {
        if (p.kind == Kind::reals && !real_ok(x)) bad();
        if (p.kind == Kind::integers && !x.is_number_integer()) bad();
        if (p.kind == Kind::texts && !x.is_string()) bad();
      }
      return a;
    }
  }
  return v;
}

class Command {
 public:
  Command(CLI::App& parent, const std::string& name, const std::string& help)
      : app_(parent.add_subcommand(name, help)), name_(name) {
    app_->add_option("--config", config_path_, "JSON config file (flags take precedence)");
    app_->add_flag("--no-timing", no_timing_, "Record wall_ms as NA so outputs are reproducible");
  }

  CLI::App* app() { return app_; }

  void add(const std::string& name, Kind kind, json def, const std::string& help) {
    params_.push_back({name, kind, std::move(def), help, {}, nullptr});
  }

  // Binds the options after all params are registered (stable addresses).
  void bind() {
    for (auto& p : params_) p.opt = app_->add_option("--" + p.name, p.raw, describe(p));
  }

  json resolve() {
    std::map<std::string, Param*> by_name;
    for (auto& p : params_) by_name[p.name] = &p;
    if (!config_path_.empty()) {
      std::ifstream in(config_path_);
      if (!in) throw CliError{SPURS_E_IO, "cannot read config file " + config_path_};
      json cfg;
      try {
        cfg = json::parse(in);
      } catch (const std::exception& e) {
        invalid("config file " + config_path_ + ": " + e.what());
      }
      if (cfg.contains("parameters")) cfg = cfg["parameters"];
      if (!cfg.is_object()) invalid("config file must hold a JSON object");
      for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        auto f = by_name.find(it.key());
        if (f == by_name.end()) invalid("config file: unknown key '" + it.key() + "' for " + name_);
        f->second->value = coerce(*f->second, it.value());
      }
    }
    for (auto& p : params_)
      if (p.opt->count() > 0) p.value = convert(p, p.raw);
    json out = json::object();
    for (const auto& p : params_) out[p.name] = p.value;
    return out;
  }

  bool no_timing() const { return no_timing_; }
  const std::string& config_path() const { return config_path_; }
  const std::string& name() const { return name_; }

 private:
  static std::string describe(const Param& p) {
    std::string d = p.value.is_string() ? p.value.get<std::string>() : p.value.dump();
    return p.help + " (default: " + d + ")";
  }

  CLI::App* app_;
  std::string name_;
  std::string config_path_;
  bool no_timing_ = false;
  std::vector<Param> params_;
};

double real_of(const json& v) {
  if (v.is_string()) return INFINITY;
  return v.get<double>();
}

std::size_t size_of(const json& v, const char* name, bool allow_zero = false) {
  const auto x = v.get<long long>();
  if (x < 0 || (!allow_zero && x == 0)) invalid(std::string("--") + name + " must be positive");
  return static_cast<std::size_t>(x);
}

std::string isnr_text(double isnr) { return std::isinf(isnr) ? "inf" : fmt(isnr); }

// "parameters" holds only accepted keys, so a written config can be fed back
// through --config; computed values go under "derived".
void write_config(const fs::path& dir, const Command& cmd, const json& params, const json& inputs,
                  const json& outputs, const json& derived = json::object()) {
  json j;
  j["command"] = cmd.name();
  j["version"] = spurs_version();
  j["csv_schema"] = kCsvSchema;
  j["parameters"] = params;
  if (!derived.empty()) j["derived"] = derived;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  write_file(dir / "config.json", j.dump(2) + "\n");
}

// ---- shared pipeline pieces ----

Handle<spurs_trajectory> generate_trajectory(const std::string& kind, std::size_t n, std::size_t spokes,
                                             std::size_t bins, std::size_t m) {
  if (kind == "radial")
    return make<spurs_trajectory>([&](auto** o) { return spurs_trajectory_radial(n, spokes, bins, o); });
  if (kind == "spiral")
    return make<spurs_trajectory>([&](auto** o) { return spurs_trajectory_spiral(n, m, o); });
  if (!fs::exists(kind)) invalid("--traj must be radial, spiral or an existing trajectory file: '" + kind + "'");
  return make<spurs_trajectory>([&](auto** o) { return spurs_trajectory_load(kind.c_str(), o); });
}

spurs_ordering ordering_of(const std::string& s) {
  if (s == "constrained-amd") return SPURS_ORDER_CONSTRAINED_AMD;
  if (s == "amd") return SPURS_ORDER_AMD;
  if (s == "natural") return SPURS_ORDER_NATURAL;
  invalid("--ordering must be constrained-amd, amd or natural");
}

spurs_density density_of(const std::string& s) {
  if (s == "radial") return SPURS_DENSITY_RADIAL;
  if (s == "uniform") return SPURS_DENSITY_UNIFORM;
  invalid("--density must be radial or uniform");
}

struct Row {
  std::string method;
  std::size_t m = 0;
  double isnr = INFINITY;
  std::string p = "NA", sigma = "NA", rho = "NA";
  int iterations = 1;
  double snr = NAN, ssim = NAN;
  double wall_ms = NAN;
  std::string nnz_lu = "NA";
  std::string weights;

  std::string csv(bool timing) const {
    std::ostringstream o;
    o << method << ',' << m << ',' << isnr_text(isnr) << ',' << p << ',' << sigma << ',' << rho << ','
      << iterations << ',' << (std::isnan(snr) ? "NA" : fmt(snr)) << ',' << (std::isnan(ssim) ? "NA" : fmt(ssim))
      << ',' << (timing ? fmt(wall_ms) : "NA") << ',' << nnz_lu << ',' << weights << '\n';
    return o.str();
  }
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void score(Row& row, const spurs_image* truth, const spurs_image* image) {
  if (!truth) return;
  check(spurs_snr(truth, image, &row.snr));
  check(spurs_mssim(truth, image, &row.ssim));
}

void fill_plan_fields(Row& row, const spurs_plan* plan) {
  spurs_plan_info info{};
  check(spurs_plan_info_get(plan, &info));
  row.p = std::to_string(info.degree);
  row.sigma = fmt(info.sigma);
  row.rho = fmt(info.rho);
  row.nnz_lu = std::to_string(info.nnz_lu);
  row.weights = "identity";
}

// ---- subcommands ----

int run_simulate(Command& cmd) {
  const json p = cmd.resolve();
  const fs::path out = p["out"].get<std::string>();
  const auto n = size_of(p["n"], "n");
  const double isnr = real_of(p["isnr"]);
  const auto seed = static_cast<std::uint64_t>(p["seed"].get<long long>());
  const std::string traj_kind = p["traj"];
  ensure_dir(out);

  json inputs = json::object();
  if (traj_kind != "radial" && traj_kind != "spiral" && fs::exists(traj_kind)) inputs[traj_kind] = hash_of(traj_kind);
  if (!cmd.config_path().empty()) inputs[cmd.config_path()] = hash_of(cmd.config_path());

  auto traj = generate_trajectory(traj_kind, n, size_of(p["spokes"], "spokes"), size_of(p["bins"], "bins"),
                                  size_of(p["m"], "m"));
  auto phantom = make<spurs_phantom>([&](auto** o) { return spurs_phantom_create(p["phantom"].get<std::string>().c_str(), o); });
  auto clean = make<spurs_samples>([&](auto** o) { return spurs_phantom_kspace(phantom.get(), traj.get(), o); });
  auto noisy = make<spurs_samples>([&](auto** o) { return spurs_samples_add_noise(clean.get(), isnr, seed, o); });
  auto truth = make<spurs_image>([&](auto** o) { return spurs_phantom_image(phantom.get(), n, o); });

  check(spurs_trajectory_save(traj.get(), (out / "trajectory.csv").c_str()));
  check(spurs_samples_save(clean.get(), (out / "samples_clean.raw").c_str()));
  check(spurs_samples_save(noisy.get(), (out / "samples.raw").c_str()));
  check(spurs_image_save_raw(truth.get(), (out / "truth.raw").c_str()));
  check(spurs_image_save_pgm(truth.get(), (out / "truth.pgm").c_str()));

  char h[17];
  check(spurs_trajectory_hash(traj.get(), h));
  json outputs = json::array({"trajectory.csv", "samples_clean.raw", "samples.raw", "truth.raw", "truth.pgm"});
  write_config(out, cmd, p, inputs, outputs,
               json{{"trajectory_hash", h}, {"M", spurs_trajectory_size(traj.get())}});
  std::cout << "M=" << spurs_trajectory_size(traj.get()) << " trajectory_hash=" << h << '\n';
  return 0;
}

int run_plan(Command& cmd) {
  const json p = cmd.resolve();
  const fs::path out = p["out"].get<std::string>();
  const std::string traj_path = p["traj"];
  if (traj_path.empty()) invalid("plan needs --traj FILE");
  ensure_dir(out);
  auto traj = make<spurs_trajectory>([&](auto** o) { return spurs_trajectory_load(traj_path.c_str(), o); });

  spurs_config c;
  spurs_config_init(&c);
  c.n = size_of(p["n"], "n");
  c.degree = static_cast<int>(p["degree"].get<long long>());
  c.sigma = real_of(p["os"]);
  c.rho = real_of(p["rho"]);
  c.ordering = ordering_of(p["ordering"]);

  const auto t0 = std::chrono::steady_clock::now();
  auto plan = make<spurs_plan>([&](auto** o) { return spurs_plan_create(traj.get(), &c, o); });
  const double plan_ms = ms_since(t0);
  check(spurs_plan_save(plan.get(), (out / "plan.spursfac").c_str()));

  spurs_plan_info info{};
  check(spurs_plan_info_get(plan.get(), &info));
  json nnz;
  nnz["M"] = info.m;
  nnz["grid_size"] = info.grid_size;
  nnz["dim"] = info.dim;
  nnz["nnz_phi"] = info.nnz_phi;
  nnz["nnz_psi"] = info.nnz_psi;
  nnz["nnz_psi_formula"] = 2 * info.nnz_phi + info.m + static_cast<std::size_t>(std::pow(info.grid_size, info.dim));
  nnz["nnz_lu"] = info.nnz_lu;
  nnz["fill_ratio"] = info.fill_ratio;
  nnz["rho"] = info.rho;
  if (!cmd.no_timing()) nnz["phase1_ms"] = plan_ms;
  write_file(out / "nnz.json", nnz.dump(2) + "\n");

  write_config(out, cmd, p, json{{traj_path, hash_of(traj_path)}}, json::array({"plan.spursfac", "nnz.json"}),
               json{{"rho", info.rho}, {"trajectory_hash", info.trajectory_hash}});

  std::cout << "NNZ(Phi)=" << info.nnz_phi << " NNZ(Psi)=" << info.nnz_psi << " NNZ(L+U)=" << info.nnz_lu
            << " fill=" << fmt(info.fill_ratio) << " rho=" << fmt(info.rho) << '\n';
  return 0;
}

int run_reconstruct(Command& cmd) {
  json p = cmd.resolve();
  const fs::path out = p["out"].get<std::string>();
  std::string method = p["method"];
  const int iterate = static_cast<int>(p["iterate"].get<long long>());
  if (iterate < 0) invalid("--iterate must be >= 0");
  if (iterate > 0) method = "spurs-iter";
  if (method != "spurs" && method != "spurs-iter" && method != "gridding")
    invalid("--method must be spurs, spurs-iter or gridding");
  const int iterations = method == "spurs-iter" ? (iterate > 0 ? iterate : 15) : 1;
  p["method"] = method;
  p["iterate"] = method == "spurs-iter" ? iterations : 0;

  const std::string samples_path = p["samples"], truth_path = p["truth"];
  if (samples_path.empty()) invalid("reconstruct needs --samples FILE");
  ensure_dir(out);
  json inputs = json::object();
  inputs[samples_path] = hash_of(samples_path);
  auto samples = make<spurs_samples>([&](auto** o) { return spurs_samples_load(samples_path.c_str(), o); });
  Handle<spurs_image> truth;
  if (!truth_path.empty()) {
    inputs[truth_path] = hash_of(truth_path);
    truth = make<spurs_image>([&](auto** o) { return spurs_image_load_raw(truth_path.c_str(), o); });
  }

  Row row;
  row.method = method;
  row.m = spurs_samples_size(samples.get());
  {
    // Noise level comes from the sample sidecar when present.
    std::ifstream side(samples_path + ".json");
    json s = json::parse(side, nullptr, false);
    if (!s.is_discarded() && s.contains("isnr_db") && s["isnr_db"].is_number()) row.isnr = s["isnr_db"];
  }
  row.iterations = iterations;

  Handle<spurs_image> image, coeffs;
  json outputs = json::array();
  std::vector<double> history(static_cast<std::size_t>(iterations) + 1, 0.0);
  std::size_t history_len = 0;

  if (method == "gridding") {
    const std::string traj_path = p["traj"];
    if (traj_path.empty()) invalid("gridding needs --traj FILE");
    inputs[traj_path] = hash_of(traj_path);
    auto traj = make<spurs_trajectory>([&](auto** o) { return spurs_trajectory_load(traj_path.c_str(), o); });
    std::size_t n = size_of(p["n"], "n", true);
    if (n == 0 && truth) n = spurs_image_extent(truth.get());
    if (n == 0) invalid("gridding needs --n or --truth");
    const auto density = density_of(p["density"]);
    const auto t0 = std::chrono::steady_clock::now();
    image = make<spurs_image>([&](auto** o) {
      return spurs_gridding(traj.get(), samples.get(), n, 12.0, 2.0, density, o);
    });
    row.wall_ms = ms_since(t0);
    row.sigma = "2";
    row.weights = p["density"].get<std::string>();
  } else {
    const std::string plan_path = p["plan"];
    if (plan_path.empty()) invalid(method + " needs --plan FILE");
    inputs[plan_path] = hash_of(plan_path);
    auto plan = make<spurs_plan>([&](auto** o) { return spurs_plan_load(plan_path.c_str(), o); });
    fill_plan_fields(row, plan.get());
    const auto t0 = std::chrono::steady_clock::now();
    spurs_image *img = nullptr, *cf = nullptr;
    if (method == "spurs") {
      check(spurs_reconstruct(plan.get(), samples.get(), &img, &cf));
    } else {
      check(spurs_reconstruct_iterative(plan.get(), samples.get(), iterations, real_of(p["tol"]), &img, &cf,
                                        history.data(), history.size(), &history_len));
      row.iterations = static_cast<int>(history_len);
    }
    row.wall_ms = ms_since(t0);
    image.reset(img);
    coeffs.reset(cf);
    check(spurs_image_save_raw(coeffs.get(), (out / "coeffs.raw").c_str()));
    outputs.push_back("coeffs.raw");
  }

  score(row, truth.get(), image.get());
  check(spurs_image_save_raw(image.get(), (out / "image.raw").c_str()));
  check(spurs_image_save_pgm(image.get(), (out / "image.pgm").c_str()));
  outputs.push_back("image.raw");
  outputs.push_back("image.pgm");
  write_file(out / "metrics.csv", std::string(kCsvHeader) + "\n" + row.csv(!cmd.no_timing()));
  outputs.push_back("metrics.csv");
  if (method == "spurs-iter") {
    std::ostringstream h;
    h << "iteration,error_norm\n";
    for (std::size_t i = 0; i < history_len && i < history.size(); ++i) h << i << ',' << fmt(history[i]) << '\n';
    write_file(out / "history.csv", h.str());
    outputs.push_back("history.csv");
  }
  write_config(out, cmd, p, inputs, outputs);
  std::cout << kCsvHeader << '\n' << row.csv(!cmd.no_timing());
  return 0;
}

int run_metrics(Command& cmd) {
  const json p = cmd.resolve();
  const std::string truth_path = p["truth"], image_path = p["image"];
  if (truth_path.empty() || image_path.empty()) invalid("metrics needs --truth FILE and --image FILE");
  auto truth = make<spurs_image>([&](auto** o) { return spurs_image_load_raw(truth_path.c_str(), o); });
  auto image = make<spurs_image>([&](auto** o) { return spurs_image_load_raw(image_path.c_str(), o); });
  double snr = 0, ssim = 0;
  check(spurs_snr(truth.get(), image.get(), &snr));
  check(spurs_mssim(truth.get(), image.get(), &ssim));
  const std::string text = "snr_db,mssim\n" + fmt(snr) + "," + fmt(ssim) + "\n";
  const std::string out = p["out"];
  if (!out.empty()) write_file(out, text);
  std::cout << text;
  return 0;
}

int run_benchmark(Command& cmd) {
  const json p = cmd.resolve();
  const fs::path out = p["out"].get<std::string>();
  const std::string traj_kind = p["traj"];
  if (traj_kind != "radial" && traj_kind != "spiral") invalid("benchmark --traj must be radial or spiral");
  const auto n = size_of(p["n"], "n");
  const auto bins = size_of(p["bins"], "bins");
  const int iterate = static_cast<int>(p["iterate"].get<long long>());
  if (iterate < 1) invalid("--iterate must be >= 1");
  const auto density = p["density"].get<std::string>();
  const auto density_kind = density_of(density);
  std::vector<std::size_t> sizes;
  for (const auto& v : p[traj_kind == "radial" ? "spokes" : "m"]) sizes.push_back(size_of(v, "spokes/m"));
  std::vector<double> isnrs;
  for (const auto& v : p["isnr"]) isnrs.push_back(real_of(v));
  std::vector<std::string> methods = p["methods"];
  for (const auto& m : methods)
    if (m != "spurs" && m != "spurs-iter" && m != "gridding") invalid("unknown method '" + m + "'");
  std::vector<long long> degrees = p["degree"];
  std::vector<double> sigmas;
  for (const auto& v : p["os"]) sigmas.push_back(real_of(v));
  const bool save_images = p["images"].get<std::string>() == "yes";
  const auto ordering = ordering_of(p["ordering"]);

  ensure_dir(out);
  if (save_images) ensure_dir(out / "cells");
  auto phantom = make<spurs_phantom>([&](auto** o) { return spurs_phantom_create(p["phantom"].get<std::string>().c_str(), o); });
  auto truth = make<spurs_image>([&](auto** o) { return spurs_phantom_image(phantom.get(), n, o); });

  std::ofstream csv(out / "benchmark.csv", std::ios::trunc);
  if (!csv) throw CliError{SPURS_E_IO, "cannot write " + (out / "benchmark.csv").string()};
  csv << kCsvHeader << '\n' << std::flush;

  // One generator drives every noise seed, in cell order.
  std::mt19937_64 rng(static_cast<std::uint64_t>(p["seed"].get<long long>()));
  const bool timing = !cmd.no_timing();

  for (const auto size : sizes) {
    auto traj = generate_trajectory(traj_kind, n, size, bins, size);
    const auto m = spurs_trajectory_size(traj.get());
    auto clean = make<spurs_samples>([&](auto** o) { return spurs_phantom_kspace(phantom.get(), traj.get(), o); });
    std::map<std::pair<long long, double>, Handle<spurs_plan>> plans;
    auto plan_for = [&](long long degree, double sigma) -> spurs_plan* {
      auto& slot = plans[{degree, sigma}];
      if (!slot) {
        spurs_config c;
        spurs_config_init(&c);
        c.n = n;
        c.degree = static_cast<int>(degree);
        c.sigma = sigma;
        c.rho = real_of(p["rho"]);
        c.ordering = ordering;
        slot = make<spurs_plan>([&](auto** o) { return spurs_plan_create(traj.get(), &c, o); });
      }
      return slot.get();
    };

    for (const double isnr : isnrs) {
      const std::uint64_t seed = rng();
      auto noisy = make<spurs_samples>([&](auto** o) { return spurs_samples_add_noise(clean.get(), isnr, seed, o); });
      for (const auto& method : methods) {
        std::vector<std::pair<long long, double>> cells;
        if (method == "gridding") {
          cells.push_back({-1, 2.0});
        } else {
          for (auto d : degrees)
            for (auto s : sigmas) cells.push_back({d, s});
        }
        for (const auto& [degree, sigma] : cells) {
          Row row;
          row.method = method;
          row.m = m;
          row.isnr = isnr;
          Handle<spurs_image> image;
          spurs_image* img = nullptr;
          if (method == "gridding") {
            const auto t0 = std::chrono::steady_clock::now();
            check(spurs_gridding(traj.get(), noisy.get(), n, 12.0, 2.0, density_kind, &img));
            row.wall_ms = ms_since(t0);
            row.sigma = "2";
            row.weights = density;
          } else {
            spurs_plan* plan = plan_for(degree, sigma);
            fill_plan_fields(row, plan);
            const auto t0 = std::chrono::steady_clock::now();
            if (method == "spurs") {
              check(spurs_reconstruct(plan, noisy.get(), &img, nullptr));
            } else {
              std::vector<double> hist(static_cast<std::size_t>(iterate) + 1);
              std::size_t len = 0;
              check(spurs_reconstruct_iterative(plan, noisy.get(), iterate, real_of(p["tol"]), &img, nullptr,
                                                hist.data(), hist.size(), &len));
              row.iterations = static_cast<int>(len);
            }
            row.wall_ms = ms_since(t0);
          }
          image.reset(img);
          score(row, truth.get(), image.get());
          csv << row.csv(timing) << std::flush;
          if (!csv) throw CliError{SPURS_E_IO, "write failed: benchmark.csv"};
          if (save_images) {
            std::string tag = method + "_M" + std::to_string(m) + "_isnr" + isnr_text(isnr);
            if (method != "gridding") tag += "_p" + std::to_string(degree) + "_os" + fmt(sigma);
            check(spurs_image_save_pgm(image.get(), (out / "cells" / (tag + ".pgm")).c_str()));
          }
          if (!g_quiet) std::cerr << row.csv(timing);
        }
      }
    }
  }
  json inputs = json::object();
  if (!cmd.config_path().empty()) inputs[cmd.config_path()] = hash_of(cmd.config_path());
  write_config(out, cmd, p, inputs, json::array({"benchmark.csv"}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPURS non-uniform k-space resampling: simulate, plan, reconstruct, score and benchmark"};
  app.require_subcommand(1);
  bool& quiet = g_quiet;
  app.add_flag("--quiet", quiet, "Suppress log messages and benchmark progress");
  app.set_version_flag("--version", spurs_version());

  Command simulate(app, "simulate", "Generate a trajectory, phantom samples and the ground-truth image");
  simulate.add("out", Kind::text, "sim", "output directory");
  simulate.add("phantom", Kind::text, "shepp-logan", "shepp-logan or modified-shepp-logan");
  simulate.add("traj", Kind::text, "radial", "radial, spiral or a trajectory file");
  simulate.add("spokes", Kind::integer, 100, "radial spokes");
  simulate.add("bins", Kind::integer, 512, "radial samples per spoke");
  simulate.add("m", Kind::integer, 30000, "spiral sample count");
  simulate.add("n", Kind::integer, 256, "image size N");
  simulate.add("isnr", Kind::real, "inf", "input SNR in dB (inf for noiseless)");
  simulate.add("seed", Kind::integer, 1, "noise seed");
  simulate.bind();

  Command plan(app, "plan", "Offline phase: assemble and factorize the sparse tableau");
  plan.add("out", Kind::text, "plan", "output directory");
  plan.add("traj", Kind::text, "", "trajectory file");
  plan.add("n", Kind::integer, 256, "image size N");
  plan.add("degree", Kind::integer, 3, "B-spline degree p");
  plan.add("os", Kind::real, 2.0, "grid oversampling sigma");
  plan.add("rho", Kind::real, 0.0, "regularization (<= 0 for the default)");
  plan.add("ordering", Kind::text, "constrained-amd", "constrained-amd, amd or natural");
  plan.bind();

  Command recon(app, "reconstruct", "Online phase: reconstruct an image from samples");
  recon.add("out", Kind::text, "recon", "output directory");
  recon.add("method", Kind::text, "spurs", "spurs, spurs-iter or gridding");
  recon.add("iterate", Kind::integer, 0, "run iterative SPURS for K iterations");
  recon.add("tol", Kind::real, 1e-6, "relative residual tolerance for spurs-iter");
  recon.add("plan", Kind::text, "", "plan file (spurs methods)");
  recon.add("traj", Kind::text, "", "trajectory file (gridding)");
  recon.add("samples", Kind::text, "", "sample file");
  recon.add("truth", Kind::text, "", "ground-truth image for metrics");
  recon.add("n", Kind::integer, 0, "image size N for gridding (default: truth size)");
  recon.add("density", Kind::text, "radial", "gridding density weights: radial or uniform");
  recon.bind();

  Command metrics(app, "metrics", "Score an image against ground truth");
  metrics.add("truth", Kind::text, "", "ground-truth raw image");
  metrics.add("image", Kind::text, "", "reconstructed raw image");
  metrics.add("out", Kind::text, "", "optional CSV output path");
  metrics.bind();

  Command bench(app, "benchmark", "Sweep (M, isnr, method, p, sigma) cells into one CSV");
  bench.add("out", Kind::text, "bench", "output directory");
  bench.add("phantom", Kind::text, "shepp-logan", "phantom name");
  bench.add("traj", Kind::text, "radial", "radial or spiral");
  bench.add("n", Kind::integer, 128, "image size N");
  bench.add("spokes", Kind::integers, json::array({50, 100, 200}), "radial spoke counts");
  bench.add("bins", Kind::integer, 256, "radial samples per spoke");
  bench.add("m", Kind::integers, json::array({10000, 20000, 30000}), "spiral sample counts");
  bench.add("isnr", Kind::reals, json::array({"inf", 30.0}), "input SNR levels in dB");
  bench.add("methods", Kind::texts, json::array({"spurs", "gridding"}), "methods to run");
  bench.add("degree", Kind::integers, json::array({3}), "B-spline degrees");
  bench.add("os", Kind::reals, json::array({2.0}), "oversampling factors");
  bench.add("rho", Kind::real, 0.0, "regularization (<= 0 for the default)");
  bench.add("iterate", Kind::integer, 15, "iterations for spurs-iter");
  bench.add("tol", Kind::real, 1e-6, "relative residual tolerance for spurs-iter");
  bench.add("density", Kind::text, "radial", "gridding density weights");
  bench.add("ordering", Kind::text, "constrained-amd", "fill-reducing ordering");
  bench.add("seed", Kind::integer, 1, "seed of the noise generator");
  bench.add("images", Kind::text, "no", "yes to save one PGM per cell");
  bench.bind();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : SPURS_E_VALIDATION;
  }

  if (!quiet) {
    spurs_set_log_callback(
        [](int level, const char* msg, void*) {
          if (level >= 1) std::cerr << "[spurs] " << msg << '\n';
        },
        nullptr);
  }

  try {
    if (*simulate.app()) return run_simulate(simulate);
    if (*plan.app()) return run_plan(plan);
    if (*recon.app()) return run_reconstruct(recon);
    if (*metrics.app()) return run_metrics(metrics);
    if (*bench.app()) return run_benchmark(bench);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return SPURS_E_VALIDATION;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return SPURS_E_INTERNAL;
  }
  return 0;
}
