#include "pcx/trace_io.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "json_line.hpp"
#include "pcx/errors.hpp"

namespace pcx {
namespace {

using detail::JsonLine;
using nlohmann::json;

std::string constants_json(const ConstantRegistry& c) {
  JsonLine j;
  j.add("h_lipschitz", c.h_lipschitz)
      .add("inner_jacobian_lipschitz", c.inner_jacobian_lipschitz)
      .add("outer_jacobian_lipschitz", c.outer_jacobian_lipschitz)
      .add("outer_gradient_bound", c.outer_gradient_bound)
      .add_list("channel_lipschitz", c.channel_lipschitz)
      .add_list("channel_gradient_lipschitz", c.channel_gradient_lipschitz)
      .add_list("linearizable", c.linearizable)
      .add("channel_map_lipschitz", c.channel_map_lipschitz)
      .add("linearized_curvature", c.linearized_curvature)
      .add("upper_model_constant", c.upper_model_constant)
      .add("lower_model_constant", c.lower_model_constant)
      .add("curvature_cap", c.curvature_cap)
      .add("estimated", c.estimated);
  return j.str();
}

double as_double(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("expected a number");
}

double num(const json& obj, const char* key) {
  if (!obj.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  return as_double(obj.at(key));
}

Vector vec(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array())
    throw std::invalid_argument(std::string("missing array '") + key + "'");
  const json& arr = obj.at(key);
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = as_double(arr[i]);
  return v;
}

std::vector<double> dlist(const json& obj, const char* key) {
  std::vector<double> out;
  for (const auto& e : obj.at(key)) out.push_back(as_double(e));
  return out;
}

ConstantRegistry constants_from(const json& j) {
  ConstantRegistry c;
  c.h_lipschitz = num(j, "h_lipschitz");
  c.inner_jacobian_lipschitz = num(j, "inner_jacobian_lipschitz");
  c.outer_jacobian_lipschitz = num(j, "outer_jacobian_lipschitz");
  c.outer_gradient_bound = num(j, "outer_gradient_bound");
  c.channel_lipschitz = dlist(j, "channel_lipschitz");
  c.channel_gradient_lipschitz = dlist(j, "channel_gradient_lipschitz");
  c.linearizable = j.at("linearizable").get<std::vector<int>>();
  c.channel_map_lipschitz = num(j, "channel_map_lipschitz");
  c.linearized_curvature = num(j, "linearized_curvature");
  c.upper_model_constant = num(j, "upper_model_constant");
  c.lower_model_constant = num(j, "lower_model_constant");
  c.curvature_cap = num(j, "curvature_cap");
  c.estimated = j.at("estimated").get<bool>();
  return c;
}

StepReport step_from(const json& j) {
  StepReport r;
  r.outer_index = j.at("outer_index").get<int>();
  r.mu = num(j, "mu");
  r.mu_next = num(j, "mu_next");
  r.rejections = j.at("rejections").get<int>();
  r.rejected_mus = dlist(j, "rejected_mus");
  r.pred = num(j, "pred");
  r.pred_used = num(j, "pred_used");
  r.act = num(j, "act");
  r.rho = num(j, "rho");
  r.eps = num(j, "eps");
  r.accepted = j.at("accepted").get<bool>();
  r.step_norm = num(j, "step_norm");
  r.metric_step_norm = num(j, "metric_step_norm");
  r.prox_grad_norm = num(j, "prox_grad_norm");
  r.sigma_min = num(j, "sigma_min");
  r.sigma_max = num(j, "sigma_max");
  r.curvature_norm = num(j, "curvature_norm");
  r.linearized_count = j.at("linearized_count").get<int>();
  r.sub_iterations = j.at("sub_iterations").get<int>();
  r.sub_residual = num(j, "sub_residual");
  r.sub_converged = j.at("sub_converged").get<bool>();
  r.sub_method = j.at("sub_method").get<std::string>();
  r.f_before = num(j, "f_before");
  r.f_after = num(j, "f_after");
  r.model_decrease = num(j, "model_decrease");
  r.slope_bound = num(j, "slope_bound");
  r.x_before = vec(j, "x_before");
  r.x_after = vec(j, "x_after");
  return r;
}

}  // namespace

std::string header_line(const Trace& t) {
  JsonLine j;
  j.add("type", "header")
      .add("format", "pcx-trace")
      .add("version", 1)
      .add("instance", t.instance)
      .raw("config", config_to_json(t.config))
      .raw("constants", t.constants ? constants_json(*t.constants) : "null")
      .add("f_star", t.f_star)
      .add("x0", t.x0);
  return j.str();
}

std::string step_line(const StepReport& r) {
  JsonLine j;
  j.add("type", "step")
      .add("outer_index", r.outer_index)
      .add("mu", r.mu)
      .add("mu_next", r.mu_next)
      .add("rejections", r.rejections)
      .add_list("rejected_mus", r.rejected_mus)
      .add("pred", r.pred)
      .add("pred_used", r.pred_used)
      .add("act", r.act)
      .add("rho", r.rho)
      .add("eps", r.eps)
      .add("accepted", r.accepted)
      .add("step_norm", r.step_norm)
      .add("metric_step_norm", r.metric_step_norm)
      .add("prox_grad_norm", r.prox_grad_norm)
      .add("sigma_min", r.sigma_min)
      .add("sigma_max", r.sigma_max)
      .add("curvature_norm", r.curvature_norm)
      .add("linearized_count", r.linearized_count)
      .add("sub_iterations", r.sub_iterations)
      .add("sub_residual", r.sub_residual)
      .add("sub_converged", r.sub_converged)
      .add("sub_method", r.sub_method)
      .add("f_before", r.f_before)
      .add("f_after", r.f_after)
      .add("model_decrease", r.model_decrease)
      .add("slope_bound", r.slope_bound)
      .add("x_before", r.x_before)
      .add("x_after", r.x_after);
  return j.str();
}

std::string footer_line(const Trace& t, bool include_wall_time) {
  JsonLine j;
  j.add("type", "footer")
      .add("termination", t.termination)
      .add("final_f", t.final_f)
      .add("final_x", t.final_x)
      .add("max_iterate_norm", t.max_iterate_norm);
  if (include_wall_time) j.add("wall_time", t.wall_time);
  return j.str();
}

std::string serialize_trace(const Trace& t, bool include_wall_time) {
  std::string out = header_line(t) + "\n";
  for (const auto& s : t.steps) out += step_line(s) + "\n";
  out += footer_line(t, include_wall_time) + "\n";
  return out;
}

void write_trace(std::ostream& out, const Trace& t) { out << serialize_trace(t); }

Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool have_footer = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (have_footer) throw ParseError(lineno, "content after footer");
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        if (have_header) throw std::invalid_argument("duplicate header");
        have_header = true;
        t.instance = j.at("instance").get<std::string>();
        t.config = config_from_json(j.at("config").dump());
        if (!j.at("constants").is_null()) t.constants = constants_from(j.at("constants"));
        t.f_star = num(j, "f_star");
        t.x0 = vec(j, "x0");
      } else if (type == "step") {
        if (!have_header) throw std::invalid_argument("step before header");
        t.steps.push_back(step_from(j));
      } else if (type == "footer") {
        if (!have_header) throw std::invalid_argument("footer before header");
        have_footer = true;
        t.termination = j.at("termination").get<std::string>();
        t.final_f = num(j, "final_f");
        t.final_x = vec(j, "final_x");
        t.max_iterate_norm = num(j, "max_iterate_norm");
        t.wall_time = j.contains("wall_time") ? num(j, "wall_time") : 0.0;
      } else {
        throw std::invalid_argument("unknown line type '" + type + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!have_header) throw ParseError(lineno + 1, "missing header line");
  return t;
}

void JsonlTraceSink::begin(const Trace& trace) { out_ << header_line(trace) << '\n' << std::flush; }
void JsonlTraceSink::step(const StepReport& report) { out_ << step_line(report) << '\n' << std::flush; }
void JsonlTraceSink::end(const Trace& trace) { out_ << footer_line(trace) << '\n' << std::flush; }

std::string export_summary(const std::vector<Trace>& traces) {
  if (traces.empty()) throw ConfigError("export_summary: need at least one trace");
  std::string out =
      "instance,iterations,accepted_steps,total_rejections,final_prox_grad_norm,final_f_gap,wall_time,termination\n";
  for (const auto& t : traces) {
    const double g = t.steps.empty() ? std::numeric_limits<double>::quiet_NaN() : t.steps.back().prox_grad_norm;
    const double gap = t.final_f - t.f_star;
    auto f = [](double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); };
    out += fmt::format("{},{},{},{},{},{},{},{}\n", t.instance, t.steps.size(), t.accepted_steps(),
                       t.total_rejections(), f(g), f(gap), f(t.wall_time), t.termination);
  }
  return out;
}

}  // namespace pcx
