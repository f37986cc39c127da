#include "fts/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fts {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw validation_error("csv: non-numeric cell '" + cell + "'");
    }
  }
  return out;
}

int read_T_header(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw validation_error("csv: empty input");
  if (line.rfind("T,", 0) != 0) throw validation_error("csv: missing 'T,<size>' header");
  try {
    return std::stoi(line.substr(2));
  } catch (const std::exception&) {
    throw validation_error("csv: bad grid size in header");
  }
}

void write_row(std::ostream& os, const double* v, int count) {
  for (int i = 0; i < count; ++i) {
    if (i) os << ',';
    os << format_double(v[i]);
  }
  os << '\n';
}

}  // namespace

void write_gridfn_csv(std::ostream& os, const GridFn& f) {
  os << "T," << f.grid.size << '\n';
  write_row(os, f.values.data(), f.grid.size);
}

GridFn read_gridfn_csv(std::istream& is) {
  const int T = read_T_header(is);
  std::string line;
  if (!std::getline(is, line)) throw validation_error("csv: missing value row");
  std::vector<double> v = parse_csv_row(line);
  return GridFn(make_grid(T), std::move(v));
}

void write_kernel_csv(std::ostream& os, const KernelOp& K) {
  os << "T," << K.grid.size << '\n';
  for (int i = 0; i < K.grid.size; ++i) write_row(os, K.matrix.row(i), K.grid.size);
}

KernelOp read_kernel_csv(std::istream& is) {
  const int T = read_T_header(is);
  KernelOp K(make_grid(T));
  std::string line;
  for (int i = 0; i < T; ++i) {
    if (!std::getline(is, line)) throw validation_error("csv: kernel row count mismatch");
    const std::vector<double> row = parse_csv_row(line);
    if (static_cast<int>(row.size()) != T)
      throw validation_error("csv: kernel row length mismatch");
    for (int s = 0; s < T; ++s) K.matrix(i, s) = row[s];
  }
  return K;
}

json gridfn_to_json(const GridFn& f) {
  return json{{"grid_T", f.grid.size}, {"values", f.values}};
}

GridFn gridfn_from_json(const json& j) {
  return GridFn(make_grid(j.at("grid_T").get<int>()),
                j.at("values").get<std::vector<double>>());
}

json kernel_to_json(const KernelOp& K) {
  json rows = json::array();
  for (int i = 0; i < K.grid.size; ++i) {
    json row = json::array();
    for (int s = 0; s < K.grid.size; ++s) row.push_back(K.matrix(i, s));
    rows.push_back(std::move(row));
  }
  return json{{"grid_T", K.grid.size}, {"matrix", std::move(rows)}};
}

KernelOp kernel_from_json(const json& j) {
  const int T = j.at("grid_T").get<int>();
  KernelOp K(make_grid(T));
  const json& rows = j.at("matrix");
  if (static_cast<int>(rows.size()) != T) throw validation_error("json: matrix row count mismatch");
  for (int i = 0; i < T; ++i) {
    if (static_cast<int>(rows[i].size()) != T)
      throw validation_error("json: matrix row length mismatch");
    for (int s = 0; s < T; ++s) K.matrix(i, s) = rows[i][s].get<double>();
  }
  return K;
}

void write_sample_csv(std::ostream& os, const SamplePath& sample) {
  os << "T," << sample.spec.grid().size << '\n';
  for (const GridFn& x : sample.curves) write_row(os, x.values.data(), x.grid.size);
}

SamplePath read_sample_csv(std::istream& is) {
  const int T = read_T_header(is);
  const Grid grid = make_grid(T);
  SamplePath sample;
  sample.spec.kind = ProcessSpec::Kind::Kl;
  sample.spec.basis.grid = grid;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row = parse_csv_row(line);
    if (static_cast<int>(row.size()) != T) throw validation_error("csv: curve length mismatch");
    sample.curves.emplace_back(grid, std::move(row));
  }
  sample.n = static_cast<int>(sample.curves.size());
  if (sample.n == 0) throw validation_error("csv: sample holds no curves");
  return sample;
}

namespace {

json profile_to_json(const EigenProfile& p) {
  json j;
  switch (p.kind) {
    case EigenProfile::Kind::Polynomial:
      j["kind"] = "polynomial";
      j["rate"] = p.rate;
      break;
    case EigenProfile::Kind::Exponential:
      j["kind"] = "exponential";
      j["rate"] = p.rate;
      break;
    case EigenProfile::Kind::Explicit:
      j["kind"] = "explicit";
      j["values"] = p.values;
      break;
  }
  j["count"] = p.count;
  return j;
}

EigenProfile profile_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "polynomial")
    return EigenProfile::polynomial(j.at("rate").get<double>(), j.at("count").get<int>());
  if (kind == "exponential")
    return EigenProfile::exponential(j.at("rate").get<double>(), j.at("count").get<int>());
  if (kind == "explicit")
    return EigenProfile::explicit_list(j.at("values").get<std::vector<double>>());
  throw validation_error("json: unknown profile kind '" + kind + "'");
}

json scores_to_json(const ScoreModel& m) {
  json j;
  switch (m.kind) {
    case ScoreModel::Kind::IidGaussian:
      j["kind"] = "iid_gaussian";
      break;
    case ScoreModel::Kind::LinearGaussian:
      j["kind"] = "linear_gaussian";
      j["alpha"] = m.alpha;
      j["truncation"] = m.truncation;
      break;
    case ScoreModel::Kind::MaQ:
      j["kind"] = "ma_q";
      j["coefficients"] = m.ma_coeffs;
      break;
    case ScoreModel::Kind::MultiplicativeVol:
      j["kind"] = "multiplicative_vol";
      j["omega"] = m.omega;
      j["beta"] = m.beta;
      j["gamma"] = m.gamma;
      break;
  }
  return j;
}

ScoreModel scores_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "iid_gaussian") return ScoreModel::iid_gaussian();
  if (kind == "linear_gaussian")
    return ScoreModel::linear_gaussian(j.at("alpha").get<double>(),
                                       j.value("truncation", 0));
  if (kind == "ma_q") return ScoreModel::ma_q(j.at("coefficients").get<std::vector<double>>());
  if (kind == "multiplicative_vol")
    return ScoreModel::multiplicative_vol(j.at("omega").get<double>(), j.at("beta").get<double>(),
                                          j.at("gamma").get<double>());
  throw validation_error("json: unknown score model kind '" + kind + "'");
}

}  // namespace

json spec_to_json(const ProcessSpec& spec) {
  json j;
  switch (spec.kind) {
    case ProcessSpec::Kind::Kl:
      j["kind"] = "kl";
      break;
    case ProcessSpec::Kind::Arh1:
      j["kind"] = "arh1";
      break;
    case ProcessSpec::Kind::Multiplicative:
      j["kind"] = "multiplicative";
      break;
  }
  j["grid_T"] = spec.grid().size;
  j["basis_J"] = spec.basis.count;
  j["profile"] = profile_to_json(spec.profile);
  j["scores"] = scores_to_json(spec.scores);
  if (spec.kind == ProcessSpec::Kind::Arh1) {
    j["phi_profile"] = profile_to_json(spec.phi_profile);
    j["noise_profile"] = profile_to_json(spec.noise_profile);
  }
  if (spec.mean) j["mean"] = spec.mean->values;
  return j;
}

ProcessSpec spec_from_json(const json& j) {
  ProcessSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "kl")
    spec.kind = ProcessSpec::Kind::Kl;
  else if (kind == "arh1")
    spec.kind = ProcessSpec::Kind::Arh1;
  else if (kind == "multiplicative")
    spec.kind = ProcessSpec::Kind::Multiplicative;
  else
    throw validation_error("json: unknown process kind '" + kind + "'");

  const Grid grid = make_grid(j.at("grid_T").get<int>());
  spec.profile = profile_from_json(j.at("profile"));
  const int basis_J = j.value("basis_J", spec.profile.count);
  spec.basis = fourier_basis(grid, basis_J);
  spec.scores = scores_from_json(j.at("scores"));
  if (spec.kind == ProcessSpec::Kind::Arh1) {
    spec.phi_profile = profile_from_json(j.at("phi_profile"));
    spec.noise_profile = profile_from_json(j.at("noise_profile"));
  }
  if (j.contains("mean"))
    spec.mean = GridFn(grid, j.at("mean").get<std::vector<double>>());
  spec.validate();
  return spec;
}

void write_eigensystem_csv(std::ostream& lambdas_os, std::ostream& efuns_os,
                           const EigenSystem& eig) {
  lambdas_os << "j,lambda,psi,Lambda\n";
  for (int j = 0; j < eig.count; ++j) {
    lambdas_os << (j + 1) << ',' << format_double(eig.lambdas[j]) << ','
               << format_double(eig.gaps[j]) << ',' << format_double(eig.caps[j]) << '\n';
  }
  efuns_os << "T," << eig.grid.size << '\n';
  for (const GridFn& e : eig.efuns) write_row(efuns_os, e.values.data(), e.grid.size);
}

void write_expansion_csv(std::ostream& os, const ExpansionReport& rep) {
  os << "j,lambda_hat,lambda_pop,I_jj,R1,R2,R3,RF,m\n";
  for (int j = 0; j < rep.J; ++j) {
    os << (j + 1) << ',' << format_double(rep.lambda_hat[j]) << ','
       << format_double(rep.lambda_pop[j]) << ',' << format_double(rep.I_jj[j]) << ','
       << format_double(rep.R1[j]) << ',' << format_double(rep.R2[j]) << ','
       << format_double(rep.R3[j]) << ',' << format_double(rep.RF[j]) << ','
       << format_double(rep.m) << '\n';
  }
}

json maxdev_to_json(const MaxDevResult& res) {
  json j;
  j["T"] = res.T;
  j["Jplus"] = res.Jplus;
  j["a_m"] = res.a_m;
  j["b_m"] = res.b_m;
  j["u"] = res.u;
  j["pvalue"] = res.pvalue;
  j["method"] = res.method;
  j["used_population_reference"] = res.used_population_reference;
  json lower = json::array(), upper = json::array(), inf = json::array();
  for (int k = 0; k < res.Jplus; ++k) {
    lower.push_back(res.band_lower[k]);
    upper.push_back(res.upper_infinite[k] ? json() : json(res.band_upper[k]));
    inf.push_back(static_cast<bool>(res.upper_infinite[k]));
  }
  j["band_lower"] = std::move(lower);
  j["band_upper"] = std::move(upper);
  j["upper_infinite"] = std::move(inf);
  return j;
}

void save_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw validation_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw validation_error("write failed: " + path);
}

std::string load_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw validation_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace fts
