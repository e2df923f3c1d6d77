#include "recshape/json_io.hpp"

#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "recshape/errors.hpp"

namespace recshape {

namespace {

using nlohmann::json;

json parse_or_throw(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw JsonParseError("input is not valid JSON");
  }
  return j;
}

double number_field(const json& j, const char* field) {
  if (!j.is_number()) {
    throw JsonParseError(std::string("field '") + field + "' must be a number");
  }
  return j.get<double>();
}

std::vector<double> number_array(const json& j, const char* field) {
  if (!j.is_array()) {
    throw JsonParseError(std::string("field '") + field + "' must be an array");
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& entry : j) out.push_back(number_field(entry, field));
  return out;
}

void append_array(std::string& out, const std::vector<double>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  out += ']';
}

void append_intervals(std::string& out, const IntervalSet& intervals) {
  out += '[';
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (i) out += ',';
    out += '[';
    out += format_double(intervals[i].lo);
    out += ',';
    out += format_double(intervals[i].hi);
    out += ']';
  }
  out += ']';
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

LinearRecurrence parse_recurrence(const std::string& text) {
  json j = parse_or_throw(text);
  if (!j.is_object()) {
    throw JsonParseError("recurrence JSON must be an object");
  }
  if (!j.contains("order")) throw JsonParseError("missing field 'order'");
  if (!j.contains("coefficients")) throw JsonParseError("missing field 'coefficients'");
  if (!j.contains("initial")) throw JsonParseError("missing field 'initial'");
  if (!j["order"].is_number_integer() || j["order"].get<std::int64_t>() < 1) {
    throw JsonParseError("field 'order' must be a positive integer");
  }
  auto order = j["order"].get<std::int64_t>();
  std::vector<double> coeffs = number_array(j["coefficients"], "coefficients");
  std::vector<double> initial = number_array(j["initial"], "initial");
  if (static_cast<std::int64_t>(coeffs.size()) != order) {
    throw JsonParseError("field 'coefficients' must have length == order");
  }
  if (static_cast<std::int64_t>(initial.size()) != order) {
    throw JsonParseError("field 'initial' must have length == order");
  }
  try {
    return LinearRecurrence(std::move(coeffs), std::move(initial));
  } catch (const std::invalid_argument& e) {
    throw JsonParseError(e.what());
  }
}

std::string dump_recurrence(const LinearRecurrence& rec) {
  std::string out = "{\"order\": " + std::to_string(rec.order()) +
                    ", \"coefficients\": ";
  append_array(out, rec.coefficients);
  out += ", \"initial\": ";
  append_array(out, rec.initial);
  out += "}";
  return out;
}

TargetIntervals parse_targets(const std::string& text) {
  json j = parse_or_throw(text);
  if (!j.is_array() || j.empty()) {
    throw JsonParseError("targets JSON must be a nonempty array of [mu, nu] pairs");
  }
  TargetIntervals out;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2) {
      throw JsonParseError("each target must be a [mu, nu] pair");
    }
    double mu = number_field(entry[0], "mu");
    double nu = number_field(entry[1], "nu");
    if (!(mu <= nu)) throw JsonParseError("target with mu > nu");
    out.push_back({mu, nu});
  }
  return out;
}

std::string dump_targets(const TargetIntervals& targets) {
  std::string out;
  append_intervals(out, targets);
  return out;
}

std::string dump_report(const ClosureReport& report) {
  std::string out = "{\"classification\": \"";
  out += to_string(report.classification);
  out += "\", \"intervals\": ";
  append_intervals(out, report.intervals);
  out += ", \"points\": ";
  append_array(out, report.points);
  out += ", \"method\": \"";
  out += to_string(report.method);
  out += "\"}";
  return out;
}

std::string dump_synthesis(const SynthesisResult& result) {
  std::string out = dump_recurrence(result.recurrence);
  out.pop_back();  // reopen the object for the verification block
  out += ", \"verification\": {\"residual\": " + format_double(result.residual);
  out += ", \"hausdorff\": " + format_double(result.hausdorff);
  out += ", \"samples\": " + std::to_string(result.samples);
  out += ", \"rho0\": " + format_double(result.plan.rho0);
  out += ", \"period\": " + std::to_string(result.plan.period());
  out += ", \"periodic_values\": ";
  append_array(out, result.plan.periodic_values);
  out += ", \"degenerate_points\": ";
  append_array(out, result.plan.degenerate_points);
  out += "}}";
  return out;
}

std::string dump_spectral(const Decomposition& dec) {
  std::string out = "{\"roots\": [";
  for (std::size_t i = 0; i < dec.roots.roots.size(); ++i) {
    const auto& r = dec.roots.roots[i];
    if (i) out += ',';
    out += "{\"re\": " + format_double(r.value.real());
    out += ", \"im\": " + format_double(r.value.imag());
    out += ", \"multiplicity\": " + std::to_string(r.multiplicity) + "}";
  }
  out += "], \"residual\": " + format_double(dec.roots.residual);
  out += ", \"dominant_modulus\": " + format_double(dec.dominant_modulus);
  out += ", \"d\": " + std::to_string(dec.d);
  out += ", \"g\": " + std::to_string(dec.g);
  out += ", \"independence_verified\": ";
  out += dec.independence_verified ? "true" : "false";
  out += "}";
  return out;
}

}  // namespace recshape
