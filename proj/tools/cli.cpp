#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "dlab/convolution.hpp"
#include "dlab/error.hpp"
#include "dlab/evaluate.hpp"
#include "dlab/io.hpp"
#include "dlab/moments.hpp"
#include "dlab/parallel.hpp"
#include "dlab/series.hpp"
#include "dlab/torus.hpp"
#include "dlab/zeros.hpp"
#include "dlab/zeta.hpp"

namespace dlab::cli {
namespace {

using io::Json;

enum class Format { kJson, kCsv };

/// A flag value that does not match its format; exits like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string output = "json";
  std::string out_path;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

std::vector<double> parse_reals(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError(std::string(what) + ": not a number: '" + item + "'");
    }
  }
  if (values.empty()) throw UsageError(std::string(what) + ": empty list");
  return values;
}

Rectangle parse_rect(const std::string& text) {
  const auto v = parse_reals(text, "--rect");
  if (v.size() != 4) throw UsageError("--rect expects sigma_lo,sigma_hi,t_lo,t_hi");
  Rectangle r{v[0], v[1], v[2], v[3]};
  r.validate();
  return r;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text, const char* what) {
  const auto v = parse_reals(text, what);
  if (v.size() % 2 != 0) throw UsageError(std::string(what) + " expects comma pairs lo,hi per dimension");
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < v.size(); i += 2) pairs.emplace_back(v[i], v[i + 1]);
  return pairs;
}

Complex parse_complex_flag(const std::string& text, const char* what) {
  try {
    return io::parse_complex(text);
  } catch (const PreconditionError&) {
    throw UsageError(std::string(what) + " expects a+bi, got '" + text + "'");
  }
}

/// Limit mean of |f(sigma + it)|^{2k} when a closed form is available.
std::optional<double> moment_target(const SeriesSpec& spec, double sigma, unsigned k) {
  if (spec.coeffs().finite_support()) return polynomial_moment_exact(spec, sigma, k);
  if (!spec.coeffs().is_builtin(BuiltinKind::kZeta) || !(2.0 * sigma > 1.0)) return std::nullopt;
  const double z2 = zeta(Complex(2.0 * sigma, 0.0)).real();
  if (k == 1) return z2;
  if (k == 2) return std::pow(z2, 4) / zeta(Complex(4.0 * sigma, 0.0)).real();
  if (k <= 6) return lindelof_target(k, sigma, 100'000, std::numeric_limits<double>::infinity()).euler_value;
  return std::nullopt;
}

Json rect_json(const Rectangle& r) { return Json::array({r.sigma_lo, r.sigma_hi, r.t_lo, r.t_hi}); }

class Emitter {
 public:
  Emitter(const Common& common, std::ostream& out) : common_(common), out_(out) {}

  Format format() const { return common_.output == "csv" ? Format::kCsv : Format::kJson; }

  void require_json(const char* subcommand) const {
    if (format() == Format::kCsv) {
      throw PreconditionError(std::string(subcommand) + ": csv output is not available; use --output json");
    }
  }

  void json(Json config, Json result) const {
    config["seed"] = common_.seed;
    config["output"] = common_.output;
    Json doc{{"config", std::move(config)}, {"result", std::move(result)}};
    write(doc.dump(2) + "\n");
  }

  void text(const std::string& body) const { write(body); }

 private:
  void write(const std::string& body) const {
    if (common_.out_path.empty()) {
      out_ << body;
      return;
    }
    std::ofstream file(common_.out_path, std::ios::binary);
    if (!file) throw PreconditionError("cannot open output file: " + common_.out_path);
    file << body;
  }

  const Common& common_;
  std::ostream& out_;
};

struct MomentArgs {
  std::string series = "zeta";
  double sigma = 0.75;
  unsigned k = 1;
  double T = 2000.0;
  double step = 0.01;
  std::string rule = "simpson";
  std::string window = "half";
  std::size_t chunks = 64;
};

void run_moment(const MomentArgs& a, const Emitter& emit) {
  const auto spec = io::resolve_series(a.series);
  QuadratureConfig cfg;
  cfg.step = a.step;
  cfg.parallel_chunks = a.chunks;
  if (a.rule == "simpson") {
    cfg.rule = QuadratureRule::kSimpson;
  } else if (a.rule == "trapezoid") {
    cfg.rule = QuadratureRule::kTrapezoid;
  } else {
    throw UsageError("--rule must be simpson or trapezoid");
  }
  if (a.window == "half") {
    cfg.window = TimeWindow::kHalf;
  } else if (a.window == "symmetric") {
    cfg.window = TimeWindow::kSymmetric;
  } else {
    throw UsageError("--window must be half or symmetric");
  }
  cfg.validate();

  const auto report = estimate_moment(spec, a.sigma, a.k, a.T, cfg, make_evaluator(spec), moment_target(spec, a.sigma, a.k));
  if (emit.format() == Format::kCsv) {
    emit.text(io::moment_csv_header() + "\n" + io::to_csv_row(report) + "\n");
    return;
  }
  emit.json({{"subcommand", "moment"},
             {"series", io::series_to_json(spec)},
             {"sigma", a.sigma},
             {"k", a.k},
             {"T", a.T},
             {"step", a.step},
             {"rule", a.rule},
             {"window", a.window},
             {"parallel_chunks", a.chunks}},
            io::to_json(report));
}

struct ZerosArgs {
  std::string series = "zeta";
  std::string rect;
  double tol = 1e-12;
  double boundary_step = kDefaultBoundaryStep;
};

void run_zeros(const ZerosArgs& a, const Emitter& emit) {
  const auto spec = io::resolve_series(a.series);
  const auto rect = parse_rect(a.rect);
  const auto scan = zero_scan(make_zero_evaluator(spec), rect, a.tol, a.boundary_step);
  if (emit.format() == Format::kCsv) {
    std::ostringstream body;
    io::write_zeros_csv(body, scan);
    emit.text(body.str());
    return;
  }
  emit.json({{"subcommand", "zeros"},
             {"series", io::series_to_json(spec)},
             {"rect", rect_json(rect)},
             {"tol", a.tol},
             {"boundary_step", a.boundary_step},
             {"pole_order_removed", pole_order_at_one(spec)}},
            io::to_json(scan));
}

struct DensityArgs {
  std::string series = "zeta";
  std::string sigmas;
  double T = 100.0;
  double sigma_hi = 4.0;
  double t_lo = -0.125;
  double boundary_step = kDefaultBoundaryStep;
};

void run_density(const DensityArgs& a, const Emitter& emit) {
  const auto spec = io::resolve_series(a.series);
  const auto sigmas = parse_reals(a.sigmas, "--sigma");
  DensityOptions opts;
  opts.sigma_hi = a.sigma_hi;
  opts.t_lo = a.t_lo;
  opts.boundary_step = a.boundary_step;
  const auto rows = density_table(make_zero_evaluator(spec), sigmas, a.T, opts);
  if (emit.format() == Format::kCsv) {
    std::ostringstream body;
    io::write_density_csv(body, rows);
    emit.text(body.str());
    return;
  }
  emit.json({{"subcommand", "density"},
             {"series", io::series_to_json(spec)},
             {"sigma", sigmas},
             {"T", a.T},
             {"sigma_hi", a.sigma_hi},
             {"t_lo", a.t_lo},
             {"boundary_step", a.boundary_step},
             {"perturbation", opts.perturbation},
             {"retries", opts.retries},
             {"pole_order_removed", pole_order_at_one(spec)}},
            io::to_json(rows));
}

struct FlowArgs {
  std::size_t dims = 1;
  std::string box;
  std::string ball_center;
  double ball_radius = -1.0;
  double T = 1e5;
  double step = 0.01;
  std::size_t horizons = 4;
  std::size_t samples = 100'000;
  std::string config_path;
};

void run_flow(const FlowArgs& a, const std::uint64_t seed, const Emitter& emit) {
  Json file_doc = Json::object();
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw PreconditionError("cannot open flow config: " + a.config_path);
    try {
      file_doc = Json::parse(in);
    } catch (const Json::parse_error&) {
      throw PreconditionError("flow config is not valid JSON: " + a.config_path);
    }
  }
  FlowConfig cfg = file_doc.contains("flow") ? io::flow_config_from_json(file_doc.at("flow"))
                                             : FlowConfig::log_prime(a.dims, a.T, a.step);

  std::optional<Box> box;
  if (file_doc.contains("box")) box = io::box_from_json(file_doc.at("box"));
  if (!a.box.empty()) box = Box(parse_pairs(a.box, "--box"));
  std::optional<TychonoffBall> ball;
  if (!a.ball_center.empty()) ball = TychonoffBall(TorusPoint(parse_reals(a.ball_center, "--ball")), a.ball_radius);
  if (box.has_value() == ball.has_value()) throw PreconditionError("flow: give exactly one of --box or --ball");
  if (a.horizons < 1) throw PreconditionError("flow: --horizons must be >= 1");

  double target = 0.0;
  std::optional<MonteCarloEstimate> mc;
  if (box) {
    target = box->volume();
  } else {
    mc = ball_measure_mc(*ball, a.samples, seed);
    target = mc->estimate;
  }

  std::vector<io::FlowRow> rows;
  for (std::size_t h = a.horizons; h-- > 0;) {
    FlowConfig c = cfg;
    c.T = cfg.T / std::ldexp(1.0, static_cast<int>(h));
    c.validate();
    const double est = box ? box_hitting_fraction(c, *box).fraction
                           : ball_time_average(c, *ball, [](std::span<const double>) { return 1.0; });
    rows.push_back({c.T, est, target, std::abs(est - target)});
  }

  if (emit.format() == Format::kCsv) {
    std::ostringstream body;
    io::write_flow_csv(body, rows);
    emit.text(body.str());
    return;
  }
  Json config{{"subcommand", "flow"},
              {"dims", cfg.dims},
              {"lambda", cfg.lambda},
              {"independent", cfg.independent},
              {"T", cfg.T},
              {"step", cfg.step},
              {"horizons", a.horizons}};
  if (box) {
    Json sides = Json::array();
    for (const auto& [lo, hi] : box->sides()) sides.push_back(Json::array({lo, hi}));
    config["box"] = std::move(sides);
  } else {
    config["ball"] = {{"center", std::vector<double>(ball->center().coords().begin(), ball->center().coords().end())},
                      {"radius", ball->radius()}};
    config["samples"] = a.samples;
  }
  Json result = Json::array();
  for (const auto& r : rows) {
    result.push_back({{"t_horizon", r.horizon}, {"estimate", r.estimate}, {"target", r.target}, {"error", r.error}});
  }
  Json doc{{"rows", std::move(result)}};
  if (mc) doc["target_std_error"] = mc->std_error;
  emit.json(std::move(config), std::move(doc));
}

struct RecurArgs {
  std::string series = "builtin:eta-factor";
  std::string s0 = "1";
  double r = 0.05;
  double T = 100.0;
  double t_step = 0.01;
  std::size_t grid = kDefaultDiscGrid;
  bool skip_verify = false;
};

void run_recur(const RecurArgs& a, const Emitter& emit) {
  emit.require_json("recur");
  const auto spec = io::resolve_series(a.series);
  const Complex s0 = parse_complex_flag(a.s0, "--s0");
  const auto f = make_zero_evaluator(spec);
  RecurrenceOptions opts;
  opts.grid = a.grid;
  const auto report = recurrence_scan(f, s0, a.r, a.T, a.t_step, opts);

  Json result = io::to_json(report);
  if (!a.skip_verify) {
    Json checks = Json::array();
    std::size_t passed = 0;
    double re_min = std::numeric_limits<double>::infinity();
    double re_max = -re_min;
    for (const auto& hit : report.hits) {
      const auto check = rouche_verify(f, s0, hit.t, a.r);
      Json row{{"t", hit.t}, {"passed", check.passed}, {"max_difference", check.max_difference}, {"m0", check.m0}};
      row["winding"] = check.winding ? Json(*check.winding) : Json(nullptr);
      if (check.passed) {
        ++passed;
        const Complex c = s0 + Complex(0.0, hit.t);
        const Rectangle cell{c.real() - a.r, c.real() + a.r, c.imag() - a.r, c.imag() + a.r};
        Json zeros = Json::array();
        for (const auto& z : zero_scan(f, cell).zeros) {
          zeros.push_back(Json::array({z.location.real(), z.location.imag()}));
          re_min = std::min(re_min, z.location.real());
          re_max = std::max(re_max, z.location.real());
        }
        row["induced_zeros"] = std::move(zeros);
      }
      checks.push_back(std::move(row));
    }
    result["rouche"] = std::move(checks);
    result["rouche_passed"] = passed;
    result["induced_real_part_spread"] = re_max >= re_min ? Json(re_max - re_min) : Json(nullptr);
  }
  emit.json({{"subcommand", "recur"},
             {"series", io::series_to_json(spec)},
             {"s0", io::format_complex(s0)},
             {"r", a.r},
             {"T", a.T},
             {"t_step", a.t_step},
             {"grid", a.grid},
             {"verify", !a.skip_verify}},
            std::move(result));
}

struct MollifyArgs {
  std::string series = "zeta";
  double sigma = 0.75;
  std::string X = "10,100,1000";
  std::size_t N = 100'000;
};

void run_mollify(const MollifyArgs& a, const Emitter& emit) {
  const auto spec = io::resolve_series(a.series);
  if (!(a.sigma > spec.sigma_m())) throw PreconditionError("mollify: requires sigma > sigma_m");
  std::vector<std::size_t> xs;
  for (double x : parse_reals(a.X, "--X")) {
    if (!(x >= 1.0) || x != std::floor(x)) throw PreconditionError("--X entries must be integers >= 1");
    xs.push_back(static_cast<std::size_t>(x));
  }
  const auto coeffs = coefficient_list(spec, a.N);
  const auto inverse = inverse_coefficients(coeffs);
  const auto tails = mollifier_tail_decay(coeffs, inverse, a.sigma, xs, a.N);
  if (emit.format() == Format::kCsv) {
    std::string body = "X,tail,remainder_bound\n";
    for (const auto& t : tails) {
      body += std::to_string(t.X) + ',' + io::format_double(t.tail) + ',' + io::format_double(t.remainder_bound) + '\n';
    }
    emit.text(body);
    return;
  }
  Json rows = Json::array();
  for (const auto& t : tails) rows.push_back({{"X", t.X}, {"tail", t.tail}, {"remainder_bound", t.remainder_bound}});
  emit.json({{"subcommand", "mollify"}, {"series", io::series_to_json(spec)}, {"sigma", a.sigma}, {"X", xs}, {"N", a.N}},
            std::move(rows));
}

struct TruncateArgs {
  std::string series = "zeta";
  std::string s = "2";
  unsigned k = 4;
  std::uint64_t M = 100'000;
  std::optional<double> t;
};

void run_truncate(const TruncateArgs& a, const Emitter& emit) {
  emit.require_json("truncate");
  const auto spec = io::resolve_series(a.series);
  const Complex s = parse_complex_flag(a.s, "--s");
  const auto trunc = smooth_truncation_eval(spec, s, a.k, a.M);
  Json result{{"value", Json::array({trunc.value.real(), trunc.value.imag()})}, {"tail_bound", trunc.tail_bound}};
  if (spec.coeffs().is_multiplicative()) {
    const Complex e = euler_product_eval(spec, s, a.k);
    result["euler_product"] = Json::array({e.real(), e.imag()});
  }
  Json config{{"subcommand", "truncate"},
              {"series", io::series_to_json(spec)},
              {"s", io::format_complex(s)},
              {"k", a.k},
              {"M", a.M}};
  if (a.t) {
    const auto theta = kronecker_point(*a.t, prime_pi(std::uint64_t{1} << a.k));
    const Complex twisted = twisted_eval(spec, theta, s, a.k, a.M);
    const Complex shifted = smooth_truncation_eval(spec, s + Complex(0.0, *a.t), a.k, a.M).value;
    result["twisted"] = Json::array({twisted.real(), twisted.imag()});
    result["shifted"] = Json::array({shifted.real(), shifted.imag()});
    result["twist_difference"] = std::abs(twisted - shifted);
    config["t"] = *a.t;
  }
  emit.json(std::move(config), std::move(result));
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

void report_error(std::ostream& err, const char* kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", one_line(message)}}.dump() << '\n';
}

std::size_t default_threads() {
  if (const char* env = std::getenv("DLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
    }
  }
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirichlet series experiments", "dlab"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);
  app.fallthrough();

  Common common;
  common.threads = default_threads();
  app.add_option("--output", common.output, "Result format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", common.out_path, "Write the result here instead of stdout");
  app.add_option("--seed", common.seed, "Random seed");
  app.add_option("--threads", common.threads, "Worker threads (default DLAB_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  MomentArgs moment;
  auto* m = app.add_subcommand("moment", "Mean of |f(sigma+it)|^{2k} over a time window");
  m->add_option("--series", moment.series);
  m->add_option("--sigma", moment.sigma)->default_str("")->required();
  m->add_option("--k", moment.k);
  m->add_option("--T", moment.T)->default_str("")->required();
  m->add_option("--step", moment.step);
  m->add_option("--rule", moment.rule)->check(CLI::IsMember({"simpson", "trapezoid"}));
  m->add_option("--window", moment.window)->check(CLI::IsMember({"half", "symmetric"}));
  m->add_option("--chunks", moment.chunks);

  ZerosArgs zeros;
  auto* z = app.add_subcommand("zeros", "Locate zeros in a rectangle");
  z->add_option("--series", zeros.series);
  z->add_option("--rect", zeros.rect, "sigma_lo,sigma_hi,t_lo,t_hi")->default_str("")->required();
  z->add_option("--tol", zeros.tol);
  z->add_option("--boundary-step", zeros.boundary_step);

  DensityArgs density;
  auto* d = app.add_subcommand("density", "Zero counts N(sigma, T)");
  d->add_option("--series", density.series);
  d->add_option("--sigma", density.sigmas, "Comma-separated sigma values")->default_str("")->required();
  d->add_option("--T", density.T)->default_str("")->required();
  d->add_option("--sigma-hi", density.sigma_hi);
  d->add_option("--t-lo", density.t_lo);
  d->add_option("--boundary-step", density.boundary_step);

  FlowArgs flow;
  auto* fl = app.add_subcommand("flow", "Kronecker flow time averages");
  fl->add_option("--dims", flow.dims);
  fl->add_option("--box", flow.box, "lo,hi pairs per dimension");
  fl->add_option("--ball", flow.ball_center, "Ball center coordinates");
  fl->add_option("--radius", flow.ball_radius);
  fl->add_option("--T", flow.T);
  fl->add_option("--step", flow.step);
  fl->add_option("--horizons", flow.horizons, "Rows at T/2^j, j < horizons");
  fl->add_option("--samples", flow.samples, "Monte Carlo samples for ball targets");
  fl->add_option("--config", flow.config_path, "JSON with \"flow\" and \"box\"");

  RecurArgs recur;
  auto* r = app.add_subcommand("recur", "Recurrence of a zero under vertical shifts");
  r->add_option("--series", recur.series);
  r->add_option("--s0", recur.s0);
  r->add_option("--r", recur.r);
  r->add_option("--T", recur.T);
  r->add_option("--t-step", recur.t_step);
  r->add_option("--grid", recur.grid);
  r->add_flag("--no-verify", recur.skip_verify);

  MollifyArgs mollify;
  auto* mo = app.add_subcommand("mollify", "Tail of f times its truncated inverse");
  mo->add_option("--series", mollify.series);
  mo->add_option("--sigma", mollify.sigma);
  mo->add_option("--X", mollify.X, "Comma-separated cutoffs");
  mo->add_option("--N", mollify.N);

  TruncateArgs truncate;
  auto* tr = app.add_subcommand("truncate", "Smooth truncation f_k(s)");
  tr->add_option("--series", truncate.series);
  tr->add_option("--s", truncate.s);
  tr->add_option("--k", truncate.k);
  tr->add_option("--M", truncate.M);
  tr->add_option("--t", truncate.t, "Compare the torus twist at {t log p / 2 pi} with the shift s + it");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    err << app.help();
    return kExitUsage;
  }

  try {
    parallel::set_thread_count(common.threads);
    const Emitter emit(common, out);
    if (m->parsed()) run_moment(moment, emit);
    if (z->parsed()) run_zeros(zeros, emit);
    if (d->parsed()) run_density(density, emit);
    if (fl->parsed()) run_flow(flow, common.seed, emit);
    if (r->parsed()) run_recur(recur, emit);
    if (mo->parsed()) run_mollify(mollify, emit);
    if (tr->parsed()) run_truncate(truncate, emit);
  } catch (const UsageError& e) {
    report_error(err, "usage", e.what());
    err << app.help();
    return kExitUsage;
  } catch (const PreconditionError& e) {
    report_error(err, "precondition", e.what());
    return kExitPrecondition;
  } catch (const NumericalError& e) {
    report_error(err, "numerical", e.what());
    return kExitNumerical;
  } catch (const Json::exception& e) {
    report_error(err, "precondition", e.what());
    return kExitPrecondition;
  }
  return kExitOk;
}

}  // namespace dlab::cli
