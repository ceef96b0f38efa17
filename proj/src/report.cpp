#include "sobrig/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

namespace sobrig {

namespace {

using Json = nlohmann::ordered_json;

Json jnum(double x) {
  if (!std::isfinite(x)) return format_number(x);
  return round12(x);
}

// Header values that parse as numbers are emitted as numbers.
Json jvalue(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(v)) return round12(v);
  return s;
}

void header_lines(std::ostringstream& os, const KeyValues& header) {
  for (const auto& [k, v] : header) os << "# " << k << "=" << v << "\n";
}

Json header_object(const KeyValues& header) {
  Json j = Json::object();
  for (const auto& [k, v] : header) j[k] = jvalue(v);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

std::string render_checks(std::span<const CheckRow> rows, const KeyValues& header, Format format) {
  if (format == Format::json) {
    Json j = header_object(header);
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back(Json{{"check_name", r.name},
                         {"t", jnum(r.t)},
                         {"lhs", jnum(r.lhs)},
                         {"rhs", jnum(r.rhs)},
                         {"slack", jnum(r.slack)},
                         {"pass", r.pass}});
    }
    j["checks"] = std::move(arr);
    j["pass"] = all_pass(rows);
    return dump(j);
  }
  std::ostringstream os;
  header_lines(os, header);
  os << "check_name,t,lhs,rhs,slack,pass\n";
  for (const auto& r : rows) {
    os << r.name << "," << format_number(r.t) << "," << format_number(r.lhs) << ","
       << format_number(r.rhs) << "," << format_number(r.slack) << ","
       << (r.pass ? "true" : "false") << "\n";
  }
  return os.str();
}

std::string render_rigidity(const RigidityReport& rep, const KeyValues& extra, Format format) {
  const std::string verdict = rep.consistent ? "consistent" : "violated";
  if (format == Format::json) {
    Json j;
    j["params"] = Json{{"m", rep.params.m()},
                       {"p", jnum(rep.params.p())},
                       {"p_star", jnum(rep.params.p_star())}};
    j["model"] = rep.model;
    j["mode"] = to_string(rep.mode);
    j["K"] = jnum(rep.K);
    j["C_M"] = jnum(rep.C_M);
    j["C_M_source"] = rep.C_M_source;
    j["b"] = jnum(rep.b);
    j["gamma"] = jnum(rep.gamma);
    j["gamma_source"] = rep.gamma_source;
    j["C1"] = rep.C1 ? jnum(*rep.C1) : Json(nullptr);
    j["C2"] = jnum(rep.C2);
    j["C3"] = jnum(rep.C3);
    j["C_hat"] = jnum(rep.C_hat);
    Json table = Json::array();
    for (const auto& r : rep.ratio_table) {
      table.push_back(Json{{"t", jnum(r.t)},
                           {"ratio", jnum(r.ratio)},
                           {"lower", jnum(r.lower)},
                           {"upper", jnum(r.upper)},
                           {"pass", r.pass}});
    }
    j["ratio_table"] = std::move(table);
    Json vp = Json::array();
    for (const auto& [t, v] : rep.v.values) vp.push_back(Json{{"t", jnum(t)}, {"v", jnum(v)}});
    j["v_profile"] = std::move(vp);
    j["v_nonincreasing"] = rep.v.nonincreasing;
    j["verdict"] = verdict;
    j["verdict_details"] = rep.verdict_details;
    Json notes = Json::object();
    for (const auto& [k, v] : rep.notes) notes[k] = v;
    for (const auto& [k, v] : extra) notes[k] = jvalue(v);
    j["notes"] = std::move(notes);
    return dump(j);
  }
  std::ostringstream os;
  KeyValues header{{"m", std::to_string(rep.params.m())},
                   {"p", format_number(rep.params.p())},
                   {"p_star", format_number(rep.params.p_star())},
                   {"model", rep.model},
                   {"mode", to_string(rep.mode)},
                   {"K", format_number(rep.K)},
                   {"C_M", format_number(rep.C_M)},
                   {"C_M_source", rep.C_M_source},
                   {"b", format_number(rep.b)},
                   {"gamma", format_number(rep.gamma)},
                   {"gamma_source", rep.gamma_source},
                   {"C1", rep.C1 ? format_number(*rep.C1) : "none"},
                   {"C2", format_number(rep.C2)},
                   {"C3", format_number(rep.C3)},
                   {"C_hat", format_number(rep.C_hat)},
                   {"v_nonincreasing", rep.v.nonincreasing ? "true" : "false"},
                   {"verdict", verdict},
                   {"verdict_details", rep.verdict_details}};
  for (const auto& kv : rep.notes) header.push_back(kv);
  for (const auto& kv : extra) header.push_back(kv);
  header_lines(os, header);
  os << "t,ratio,lower,upper,pass,v\n";
  for (const auto& r : rep.ratio_table) {
    os << format_number(r.t) << "," << format_number(r.ratio) << "," << format_number(r.lower)
       << "," << format_number(r.upper) << "," << (r.pass ? "true" : "false") << ","
       << format_number(r.v) << "\n";
  }
  return os.str();
}

std::string render_limits(const MassEscapeReport& rep, const KeyValues& header, Format format) {
  KeyValues all = header;
  all.emplace_back("T", format_number(rep.T));
  all.emplace_back("threshold", format_number(rep.threshold));
  all.emplace_back("lambda0", rep.lambda0 ? format_number(*rep.lambda0) : "none");
  all.emplace_back("sums_ok", rep.sums_ok ? "true" : "false");
  all.emplace_back("head_monotone", rep.head_monotone ? "true" : "false");
  all.emplace_back("final_below_threshold", rep.final_below_threshold ? "true" : "false");
  all.emplace_back("pass", rep.pass() ? "true" : "false");
  if (format == Format::json) {
    Json j = header_object(all);
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
      rows.push_back(Json{{"lambda", jnum(r.lambda)},
                          {"head", jnum(r.head)},
                          {"tail", jnum(r.tail)},
                          {"sum", jnum(r.sum)}});
    }
    j["rows"] = std::move(rows);
    return dump(j);
  }
  std::ostringstream os;
  header_lines(os, all);
  os << "lambda,head,tail,sum\n";
  for (const auto& r : rep.rows) {
    os << format_number(r.lambda) << "," << format_number(r.head) << "," << format_number(r.tail)
       << "," << format_number(r.sum) << "\n";
  }
  return os.str();
}

std::string render_table(const KeyValues& rows, Format format) {
  if (format == Format::json) return dump(header_object(rows));
  std::ostringstream os;
  os << "quantity,value\n";
  for (const auto& [k, v] : rows) os << k << "," << v << "\n";
  return os.str();
}

}  // namespace sobrig
