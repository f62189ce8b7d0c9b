#include "qtm4f/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "qtm4f/errors.hpp"

namespace qtm4f::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line_no, const char* column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw DomainError("line " + std::to_string(line_no) + ": cannot parse " + column + " value '" +
                      s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  const bool moments = !table.ground_moment_rows.empty();
  os << "axis,lambda1,lambda2,lambda3,lambda4";
  if (moments) os << ",mx,my";
  os << '\n';
  for (std::size_t k = 0; k < table.axis_values.size(); ++k) {
    os << format_double(table.axis_values[k]);
    for (double l : table.eigenvalue_rows[k]) os << ',' << format_double(l);
    if (moments)
      os << ',' << format_double(table.ground_moment_rows[k].mx) << ','
         << format_double(table.ground_moment_rows[k].my);
    os << '\n';
  }
}

nlohmann::json sweep_to_json(const SweepTable& table) {
  nlohmann::json j;
  j["axis_name"] = table.axis_name;
  j["axis"] = table.axis_values;
  j["eigenvalues"] = nlohmann::json::array();
  for (const auto& row : table.eigenvalue_rows) j["eigenvalues"].push_back(row);
  if (!table.ground_moment_rows.empty()) {
    j["ground_moment"] = nlohmann::json::array();
    for (const auto& m : table.ground_moment_rows)
      j["ground_moment"].push_back({{"mx", m.mx}, {"my", m.my}, {"mz", m.mz}});
  }
  return j;
}

void write_dataset_csv(std::ostream& os, const RelaxationDataset& data) {
  os << "T_K,tau_s,sigma_ln_tau,mode\n";
  for (const auto& pt : data.points) {
    os << format_double(pt.temperature) << ',' << format_double(pt.tau) << ',';
    if (pt.sigma_log_tau) os << format_double(*pt.sigma_log_tau);
    os << ',' << pt.mode << '\n';
  }
}

RelaxationDataset read_dataset_csv(std::istream& is, const std::string& source) {
  RelaxationDataset data;
  data.source = source;
  std::string line;
  std::size_t line_no = 0;
  int col_T = -1, col_tau = -1, col_sigma = -1, col_mode = -1;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t")] == '#') continue;
    const auto fields = split_csv_line(line);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const int c = static_cast<int>(i);
        if (fields[i] == "T_K") col_T = c;
        else if (fields[i] == "tau_s") col_tau = c;
        else if (fields[i] == "sigma_ln_tau") col_sigma = c;
        else if (fields[i] == "mode") col_mode = c;
        else throw DomainError("line " + std::to_string(line_no) + ": unknown column '" + fields[i] + "'");
      }
      if (col_T < 0 || col_tau < 0) throw DomainError("dataset header must name T_K and tau_s");
      have_header = true;
      continue;
    }
    auto field = [&](int c) -> std::string {
      return c >= 0 && static_cast<std::size_t>(c) < fields.size() ? fields[c] : std::string{};
    };
    RelaxationPoint pt;
    pt.temperature = parse_double(field(col_T), line_no, "T_K");
    pt.tau = parse_double(field(col_tau), line_no, "tau_s");
    if (const auto s = field(col_sigma); !s.empty())
      pt.sigma_log_tau = parse_double(s, line_no, "sigma_ln_tau");
    pt.mode = field(col_mode);
    data.points.push_back(std::move(pt));
  }
  if (!have_header) throw DomainError("dataset is empty");
  data.validate();
  return data;
}

nlohmann::json eigensystem_to_json(const EigenSystem& es) {
  nlohmann::json j;
  j["values_K"] = es.values;
  j["vectors"] = nlohmann::json::array();
  for (const auto& v : es.vectors)
    j["vectors"].push_back(
        {{"a1", v[0]}, {"a1bar", v[1]}, {"a2", v[2]}, {"a2bar", v[3]}});
  j["convention"] =
      "eigenvalues ascending in kelvin; vectors[i] pairs with values_K[i]; amplitudes in the "
      "basis (|1>,|1bar>,|2>,|2bar>); largest-magnitude amplitude of each vector is positive; "
      "vectors of degenerate levels are any orthonormal basis of their subspace";
  return j;
}

nlohmann::json model_to_json(const RelaxationModel& model) {
  auto j = nlohmann::json::array();
  for (const auto& p : model.processes()) j.push_back({{"tau0_s", p.tau0}, {"delta_K", p.delta}});
  return j;
}

nlohmann::json fit_to_json(const FitResult& r) {
  nlohmann::json j;
  j["model"] = model_to_json(r.model);
  j["parameter_names"] = r.parameter_names;
  j["parameters"] = r.parameters;
  nlohmann::json errs = nlohmann::json::array();
  for (std::size_t i = 0; i < r.model.size(); ++i)
    errs.push_back({{"tau0_s", r.tau0_std_error(i)},
                    {"ln_tau0", r.std_errors[2 * i]},
                    {"delta_K", r.std_errors[2 * i + 1]}});
  j["std_errors"] = errs;
  j["covariance"] = r.covariance;
  j["residual_rms"] = r.residual_rms;
  j["undetermined_parameters"] = r.undetermined_parameters();
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  return j;
}

}  // namespace qtm4f::io
