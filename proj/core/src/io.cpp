#include "qcbench/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace qcbench::io {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw std::invalid_argument(std::string("malformed JSON in ") + what);
  }
  return j;
}

void expect_kind(const json& j, const char* kind) {
  if (!j.is_object() || j.value("schema_version", 0) != 1 ||
      j.value("kind", "") != kind) {
    throw std::invalid_argument(std::string("expected a schema_version 1 \"") +
                                kind + "\" document");
  }
}

std::vector<double> double_list(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw std::invalid_argument(std::string("missing array field ") + field);
  }
  std::vector<double> out;
  out.reserve(j[field].size());
  for (const auto& v : j[field]) {
    if (!v.is_number()) {
      throw std::invalid_argument(std::string("non-numeric entry in ") + field);
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string control_to_json(const prop::PiecewiseConstantControl& u) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "control";
  j["breakpoints"] = u.breakpoints;
  j["values"] = u.values;
  return j.dump();
}

prop::PiecewiseConstantControl control_from_json(const std::string& text) {
  json j = parse(text, "control");
  expect_kind(j, "control");
  return prop::PiecewiseConstantControl(double_list(j, "breakpoints"),
                                        double_list(j, "values"));
}

std::string control_to_csv(const prop::PiecewiseConstantControl& u) {
  std::string out = "t_start,t_end,value\n";
  char buf[128];
  for (std::size_t i = 0; i < u.segments(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", u.breakpoints[i],
                  u.breakpoints[i + 1], u.values[i]);
    out += buf;
  }
  return out;
}

prop::PiecewiseConstantControl control_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t_start,t_end,value") {
    throw std::invalid_argument("control CSV must start with t_start,t_end,value");
  }
  std::vector<double> breakpoints{0.0}, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double a = 0, b = 0, v = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &v) != 3) {
      throw std::invalid_argument("bad control CSV row: " + line);
    }
    if (a != breakpoints.back()) {
      throw std::invalid_argument("control CSV segments are not contiguous");
    }
    breakpoints.push_back(b);
    values.push_back(v);
  }
  return prop::PiecewiseConstantControl(std::move(breakpoints), std::move(values));
}

std::string trajectory_to_json(const prop::Trajectory& traj) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "trajectory";
  j["order"] = traj.order;
  j["control_l1"] = traj.control_l1;
  j["times"] = traj.times;
  j["cumulative_l1"] = traj.cumulative_l1;
  json states = json::array();
  for (const auto& x : traj.states) {
    json row = json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      row.push_back(json::array({x(i).real(), x(i).imag()}));
    }
    states.push_back(std::move(row));
  }
  j["states"] = std::move(states);
  return j.dump();
}

prop::Trajectory trajectory_from_json(const std::string& text) {
  json j = parse(text, "trajectory");
  expect_kind(j, "trajectory");

  prop::Trajectory traj;
  if (!j.contains("order") || !j["order"].is_number_integer()) {
    throw std::invalid_argument("trajectory order must be an integer");
  }
  traj.order = j["order"].get<int>();
  traj.control_l1 = j.value("control_l1", 0.0);
  traj.times = double_list(j, "times");
  traj.cumulative_l1 = double_list(j, "cumulative_l1");
  if (!j.contains("states") || !j["states"].is_array()) {
    throw std::invalid_argument("missing states array");
  }
  for (const auto& row : j["states"]) {
    if (!row.is_array() || int(row.size()) != traj.order) {
      throw std::invalid_argument("state size does not match trajectory order");
    }
    Eigen::VectorXcd x(traj.order);
    for (int i = 0; i < traj.order; ++i) {
      const auto& pair = row[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number()) {
        throw std::invalid_argument("state entries must be [re, im] pairs");
      }
      x(i) = spectral::cplx(pair[0].get<double>(), pair[1].get<double>());
    }
    traj.states.push_back(std::move(x));
  }
  if (traj.times.size() != traj.states.size() ||
      traj.times.size() != traj.cumulative_l1.size()) {
    throw std::invalid_argument("times, cumulative_l1, states length mismatch");
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const prop::Trajectory& traj) {
  out << "t";
  for (int i = 1; i <= traj.order; ++i) out << ",re_" << i;
  for (int i = 1; i <= traj.order; ++i) out << ",im_" << i;
  for (int i = 1; i <= traj.order; ++i) out << ",pop_" << i;
  out << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  };
  for (std::size_t s = 0; s < traj.samples(); ++s) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[s]);
    out << buf;
    const Eigen::VectorXcd& x = traj.states[s];
    for (Eigen::Index i = 0; i < x.size(); ++i) put(x(i).real());
    for (Eigen::Index i = 0; i < x.size(); ++i) put(x(i).imag());
    for (Eigen::Index i = 0; i < x.size(); ++i) put(std::norm(x(i)));
    out << "\n";
  }
}

std::string report_to_json(const diag::DiagnosticReport& report) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "diagnostic-report";
  j["check"] = report.check;
  j["inputs"] = report.inputs;
  j["verdict"] = diag::to_string(report.verdict);
  j["measured"] = report.measured;
  j["bound"] = report.bound;
  j["tolerance"] = report.tolerance;
  if (!report.reason.empty()) j["reason"] = report.reason;
  if (!report.details.empty()) {
    json d = json::object();
    for (const auto& [k, v] : report.details) d[k] = v;
    j["details"] = std::move(d);
  }
  return j.dump();
}

spectral::SystemPtr system_from_json(const std::string& text) {
  json j = parse(text, "spectral-data");
  expect_kind(j, "spectral-data");

  auto sys = std::make_shared<spectral::SpectralSystem>();
  sys->name = j.value("name", "external");

  std::vector<double> lambda = double_list(j, "eigenvalues");
  int nfile = int(lambda.size());
  if (nfile == 0) throw std::invalid_argument("eigenvalue list is empty");
  for (int i = 0; i < nfile; ++i) {
    if (!std::isfinite(lambda[i])) {
      throw std::invalid_argument("non-finite eigenvalue in data file");
    }
    if (i > 0 && lambda[i] >= lambda[i - 1]) {
      throw std::invalid_argument("eigenvalues must be strictly decreasing");
    }
  }

  if (!j.contains("couplings") || !j["couplings"].is_array()) {
    throw std::invalid_argument("missing couplings array");
  }
  std::map<std::pair<int, int>, spectral::cplx> table;
  for (const auto& t : j["couplings"]) {
    if (!t.is_array() || t.size() != 4 || !t[0].is_number_integer() ||
        !t[1].is_number_integer() || !t[2].is_number() || !t[3].is_number()) {
      throw std::invalid_argument("coupling entries must be [j, k, re, im]");
    }
    int cj = t[0].get<int>(), ck = t[1].get<int>();
    if (cj < 1 || cj > nfile || ck < 1 || ck > nfile) {
      throw std::invalid_argument("coupling index out of range");
    }
    spectral::cplx v(t[2].get<double>(), t[3].get<double>());
    if (!table.emplace(std::make_pair(cj, ck), v).second) {
      throw std::invalid_argument("duplicate coupling entry");
    }
  }
  // Skew-Hermiticity: check listed mirrors, derive missing ones.
  for (const auto& [jk, v] : table) {
    auto mirror = table.find({jk.second, jk.first});
    spectral::cplx want = -std::conj(v);
    if (mirror != table.end()) {
      if (std::abs(mirror->second - want) >
          1e-12 * std::max(1.0, std::abs(v))) {
        throw std::invalid_argument("couplings are not skew-Hermitian");
      }
    }
  }
  std::map<std::pair<int, int>, spectral::cplx> full = table;
  for (const auto& [jk, v] : table) {
    full.emplace(std::make_pair(jk.second, jk.first), -std::conj(v));
  }

  sys->eigenvalue = [lambda, nfile](int k) {
    if (k < 1 || k > nfile) {
      throw std::invalid_argument("eigenvalue index outside data file range");
    }
    return lambda[std::size_t(k - 1)];
  };
  sys->coupling = [full](int cj, int ck) {
    auto it = full.find({cj, ck});
    return it == full.end() ? spectral::cplx(0.0) : it->second;
  };
  sys->max_order = nfile;

  if (j.contains("b_opnorm")) {
    if (!j["b_opnorm"].is_number()) {
      throw std::invalid_argument("b_opnorm must be a number");
    }
    sys->b_opnorm = j["b_opnorm"].get<double>();
  }
  if (j.contains("control_set")) {
    const json& cs = j["control_set"];
    std::string kind = cs.is_object() ? cs.value("kind", "") : "";
    if (kind == "interval") {
      sys->control_set = spectral::ControlSet::interval(
          cs.value("lo", 0.0), cs.value("hi", 0.0));
    } else if (kind == "finite") {
      sys->control_set = spectral::ControlSet::finite(double_list(cs, "values"));
    } else {
      throw std::invalid_argument("control_set kind must be interval or finite");
    }
  }
  sys->math_note = "external spectral data; operator-level couplings";

  spectral::validate_system(*sys, nfile, 1e-12);
  return sys;
}

std::string spectral_data_to_json(const spectral::SpectralSystem& sys, int N) {
  if (N < 1) throw std::invalid_argument("export order must be >= 1");
  sys.require_level(N);

  json j;
  j["schema_version"] = 1;
  j["kind"] = "spectral-data";
  j["name"] = sys.name;
  std::vector<double> lambda;
  lambda.reserve(std::size_t(N));
  for (int k = 1; k <= N; ++k) lambda.push_back(sys.eigenvalue(k));
  j["eigenvalues"] = std::move(lambda);
  json triplets = json::array();
  for (int a = 1; a <= N; ++a) {
    for (int b = a; b <= N; ++b) {
      spectral::cplx v = sys.operator_element(a, b);
      if (v == spectral::cplx(0.0)) continue;
      triplets.push_back(json::array({a, b, v.real(), v.imag()}));
    }
  }
  j["couplings"] = std::move(triplets);
  if (sys.b_opnorm) j["b_opnorm"] = *sys.b_opnorm;
  const spectral::ControlSet& cs = sys.control_set;
  if (cs.kind == spectral::ControlSet::Kind::finite) {
    j["control_set"] = {{"kind", "finite"}, {"values", cs.values}};
  } else if (std::isfinite(cs.lo) || std::isfinite(cs.hi)) {
    j["control_set"] = {{"kind", "interval"}, {"lo", cs.lo}, {"hi", cs.hi}};
  }
  return j.dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace qcbench::io
