#include "dlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dlab::io {
namespace {

std::uint64_t as_index(const Json& v, const char* what) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw PreconditionError(std::string("coefficient document: ") + what + " must be an integer >= 1");
  }
  return v.get<std::uint64_t>();
}

double as_real(const Json& v, const char* what) {
  if (!v.is_number()) throw PreconditionError(std::string("coefficient document: ") + what + " must be a number");
  return v.get<double>();
}

SeriesSpec builtin_named(const std::string& name, const Json& doc) {
  if (name == "zeta") return SeriesSpec::zeta();
  if (name == "moebius" || name == "mobius") return SeriesSpec::moebius();
  if (name == "eta-factor") return SeriesSpec::eta_factor();
  if (name == "divisor") return SeriesSpec::divisor(doc.value("k", 2u));
  if (name == "character") {
    if (!doc.contains("modulus")) throw PreconditionError("builtin character: missing modulus");
    return SeriesSpec::dirichlet_character(doc.at("modulus").get<std::uint64_t>(), doc.value("index", std::uint64_t{0}));
  }
  throw PreconditionError("unknown builtin series: " + name);
}

std::pair<double, double> abscissas(const Json& doc) {
  const double inf = std::numeric_limits<double>::infinity();
  double sm = doc.contains("sigma_m") ? as_real(doc.at("sigma_m"), "sigma_m") : -inf;
  double sa = doc.contains("sigma_a") ? as_real(doc.at("sigma_a"), "sigma_a") : sm;
  return {sm, sa};
}

std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

SeriesSpec series_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
    throw PreconditionError("coefficient document: missing \"kind\"");
  }
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "builtin") {
    if (!doc.contains("name") || !doc.at("name").is_string()) {
      throw PreconditionError("coefficient document: builtin needs \"name\"");
    }
    return builtin_named(doc.at("name").get<std::string>(), doc);
  }

  const auto name = doc.value("name", kind);
  const auto [sigma_m, sigma_a] = abscissas(doc);
  if (kind == "explicit") {
    if (!doc.contains("coeffs") || !doc.at("coeffs").is_array()) {
      throw PreconditionError("coefficient document: explicit needs \"coeffs\"");
    }
    ExplicitCoefficients c;
    for (const auto& row : doc.at("coeffs")) {
      if (!row.is_array() || row.size() != 3) throw PreconditionError("coefficient document: coeffs rows are [n, re, im]");
      c.entries.emplace_back(as_index(row[0], "n"), Complex(as_real(row[1], "re"), as_real(row[2], "im")));
    }
    std::sort(c.entries.begin(), c.entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return SeriesSpec(name, CoefficientSource(std::move(c)), sigma_m, sigma_a);
  }
  if (kind == "multiplicative") {
    if (!doc.contains("prime_powers") || !doc.at("prime_powers").is_array()) {
      throw PreconditionError("coefficient document: multiplicative needs \"prime_powers\"");
    }
    MultiplicativeRule rule;
    for (const auto& row : doc.at("prime_powers")) {
      if (!row.is_array() || row.size() != 4) {
        throw PreconditionError("coefficient document: prime_powers rows are [p, e, re, im]");
      }
      rule.prime_powers.push_back({as_index(row[0], "p"), static_cast<unsigned>(as_index(row[1], "e")),
                                   Complex(as_real(row[2], "re"), as_real(row[3], "im"))});
    }
    return SeriesSpec(name, CoefficientSource(std::move(rule)), sigma_m, sigma_a);
  }
  throw PreconditionError("coefficient document: unknown kind \"" + kind + "\"");
}

Json series_to_json(const SeriesSpec& spec) {
  Json doc;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ExplicitCoefficients>) {
          doc["kind"] = "explicit";
          doc["name"] = spec.name();
          Json rows = Json::array();
          for (const auto& [n, a] : k.entries) rows.push_back(Json::array({n, a.real(), a.imag()}));
          doc["coeffs"] = std::move(rows);
        } else if constexpr (std::is_same_v<K, MultiplicativeRule>) {
          doc["kind"] = "multiplicative";
          doc["name"] = spec.name();
          Json rows = Json::array();
          for (const auto& pp : k.prime_powers) rows.push_back(Json::array({pp.p, pp.e, pp.value.real(), pp.value.imag()}));
          doc["prime_powers"] = std::move(rows);
        } else {
          doc["kind"] = "builtin";
          switch (k.kind) {
            case BuiltinKind::kZeta: doc["name"] = "zeta"; break;
            case BuiltinKind::kMoebius: doc["name"] = "moebius"; break;
            case BuiltinKind::kDivisor:
              doc["name"] = "divisor";
              doc["k"] = k.k;
              break;
            case BuiltinKind::kCharacter:
              doc["name"] = "character";
              doc["modulus"] = k.modulus;
              doc["index"] = k.index;
              break;
          }
        }
      },
      spec.coeffs().kind());
  if (!std::holds_alternative<BuiltinSeries>(spec.coeffs().kind())) {
    if (std::isfinite(spec.sigma_m())) doc["sigma_m"] = spec.sigma_m();
    if (std::isfinite(spec.sigma_a())) doc["sigma_a"] = spec.sigma_a();
  }
  return doc;
}

SeriesSpec resolve_series(std::string_view ref) {
  if (ref == "zeta") return SeriesSpec::zeta();
  constexpr std::string_view prefix = "builtin:";
  if (ref.substr(0, prefix.size()) == prefix) {
    std::vector<std::string> parts;
    std::stringstream ss{std::string(ref.substr(prefix.size()))};
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.empty()) throw PreconditionError("empty builtin series name");
    Json doc{{"kind", "builtin"}, {"name", parts[0]}};
    try {
      if (parts[0] == "divisor" && parts.size() > 1) doc["k"] = std::stoul(parts[1]);
      if (parts[0] == "character") {
        if (parts.size() > 1) doc["modulus"] = std::stoull(parts[1]);
        if (parts.size() > 2) doc["index"] = std::stoull(parts[2]);
      }
    } catch (const std::logic_error&) {
      throw PreconditionError("malformed builtin series: " + std::string(ref));
    }
    return series_from_json(doc);
  }
  std::ifstream in{std::string(ref)};
  if (!in) throw PreconditionError("cannot open series file: " + std::string(ref));
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error&) {
    throw PreconditionError("series file is not valid JSON: " + std::string(ref));
  }
  return series_from_json(doc);
}

Complex parse_complex(std::string_view text) {
  auto fail = [&] { return PreconditionError("malformed complex number: " + std::string(text)); };
  auto read = [&](std::string_view part) {
    if (part == "+" || part.empty()) return 1.0;
    if (part == "-") return -1.0;
    if (part.front() == '+') part.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) throw fail();
    return v;
  };
  if (text.empty()) throw fail();
  if (text.back() != 'i') return {read(text), 0.0};
  const auto body = text.substr(0, text.size() - 1);
  // Split at the last sign that is neither leading nor part of an exponent.
  std::size_t cut = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  if (cut == std::string_view::npos) return {0.0, read(body)};
  return {read(body.substr(0, cut)), read(body.substr(cut))};
}

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string format_complex(Complex z) {
  std::string out = format_double(z.real());
  if (z.imag() >= 0.0 || std::isnan(z.imag())) out += '+';
  return out + format_double(z.imag()) + 'i';
}

FlowConfig flow_config_from_json(const Json& doc) {
  const double T = doc.value("T", 1e5);
  const double step = doc.value("step", 0.01);
  if (doc.contains("lambda")) {
    auto lambda = doc.at("lambda").get<std::vector<double>>();
    if (doc.contains("dims") && doc.at("dims").get<std::size_t>() != lambda.size()) {
      throw PreconditionError("flow config: dims does not match lambda");
    }
    return FlowConfig::custom(std::move(lambda), T, step, doc.value("independent", false));
  }
  return FlowConfig::log_prime(doc.value("dims", std::size_t{1}), T, step);
}

Box box_from_json(const Json& doc) {
  if (!doc.is_array()) throw PreconditionError("box: expected [[lo, hi], ...]");
  std::vector<std::pair<double, double>> sides;
  for (const auto& side : doc) {
    if (!side.is_array() || side.size() != 2) throw PreconditionError("box: each side is [lo, hi]");
    sides.emplace_back(side[0].get<double>(), side[1].get<double>());
  }
  return Box(std::move(sides));
}

Json to_json(const MomentReport& r) {
  Json doc{{"sigma", r.sigma},
           {"k", r.k},
           {"T", r.T},
           {"step", r.step},
           {"window", to_string(r.window)},
           {"rule", to_string(r.rule)},
           {"estimate", r.estimate}};
  doc["target"] = r.target ? Json(*r.target) : Json(nullptr);
  doc["rel_error"] = r.rel_error ? Json(*r.rel_error) : Json(nullptr);
  return doc;
}

std::string moment_csv_header() { return "sigma,k,T,step,estimate,target,rel_error"; }

std::string to_csv_row(const MomentReport& r) {
  return format_double(r.sigma) + ',' + std::to_string(r.k) + ',' + format_double(r.T) + ',' + format_double(r.step) +
         ',' + format_double(r.estimate) + ',' + csv_optional(r.target) + ',' + csv_optional(r.rel_error);
}

Json to_json(const ZeroScan& scan) {
  Json zeros = Json::array();
  for (const auto& z : scan.zeros) {
    zeros.push_back({{"re", z.location.real()},
                     {"im", z.location.imag()},
                     {"residual", z.refinement_residual},
                     {"winding_confirmed", z.winding_confirmed},
                     {"multiplicity", z.multiplicity}});
  }
  Json unresolved = Json::array();
  for (const auto& u : scan.unresolved) {
    unresolved.push_back({{"rect", {u.cell.sigma_lo, u.cell.sigma_hi, u.cell.t_lo, u.cell.t_hi}}, {"count", u.count}});
  }
  const auto& r = scan.scanned;
  return {{"scanned_rect", Json::array({r.sigma_lo, r.sigma_hi, r.t_lo, r.t_hi})},
          {"zeros", std::move(zeros)},
          {"unresolved", std::move(unresolved)}};
}

void write_zeros_csv(std::ostream& out, const ZeroScan& scan) {
  out << "re,im,residual\n";
  for (const auto& z : scan.zeros) {
    out << format_double(z.location.real()) << ',' << format_double(z.location.imag()) << ','
        << format_double(z.refinement_residual) << '\n';
  }
}

Json to_json(const std::vector<DensityRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"sigma", r.sigma}, {"T", r.T}, {"count", r.count}, {"sigma_used", r.sigma_used}, {"T_used", r.T_used}});
  }
  return out;
}

void write_density_csv(std::ostream& out, const std::vector<DensityRow>& rows) {
  out << "sigma,T,count\n";
  for (const auto& r : rows) out << format_double(r.sigma) << ',' << format_double(r.T) << ',' << r.count << '\n';
}

Json to_json(const RecurrenceReport& r) {
  Json hits = Json::array();
  for (const auto& h : r.hits) hits.push_back({{"t", h.t}, {"disc_integral", h.disc_integral}});
  return {{"s0", complex_json(r.s0)},
          {"r", r.r},
          {"m0", r.m0},
          {"T", r.T},
          {"t_step", r.t_step},
          {"threshold", r.threshold},
          {"hits", std::move(hits)},
          {"lower_bound_rate", r.lower_bound_rate}};
}

void write_flow_csv(std::ostream& out, const std::vector<FlowRow>& rows) {
  out << "t-horizon,estimate,target,error\n";
  for (const auto& r : rows) {
    out << format_double(r.horizon) << ',' << format_double(r.estimate) << ',' << format_double(r.target) << ','
        << format_double(r.error) << '\n';
  }
}

}  // namespace dlab::io
