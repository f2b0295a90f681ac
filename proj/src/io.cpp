#include "hsflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hsflow {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_real_list(const std::string& text,
                                    const std::string& what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    std::size_t used = 0;
    out.push_back(std::stod(token, &used));
    if (used != token.size()) {
      throw std::invalid_argument(what + ": bad real '" + token + "'");
    }
  }
  return out;
}

}  // namespace

ExperimentConfig load_config(const std::string& path,
                             const std::string& mode) {
  if (mode != "run" && mode != "orders") {
    throw std::invalid_argument("load_config: mode must be run|orders");
  }
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");

  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw std::invalid_argument(path + ": duplicate key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw std::invalid_argument(path + ": missing mandatory key '" + key +
                                  "' for mode " + mode);
    }
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  cfg.space = take("space");
  cfg.method = take("method");
  cfg.field = take("field");
  cfg.x0 = take("x0");
  if (cfg.x0 != "sample" && cfg.x0 != "origin") {
    throw std::invalid_argument(path + ": x0 must be sample|origin");
  }
  cfg.seed = std::stoull(take("seed"));
  cfg.out = take("out");
  if (mode == "run") {
    cfg.step = std::stod(take("step"));
    cfg.steps = std::stol(take("steps"));
    if (!(cfg.step > 0.0) || cfg.steps < 1) {
      throw std::invalid_argument(path + ": need step > 0 and steps >= 1");
    }
  } else {
    cfg.t_final = std::stod(take("t_final"));
    cfg.h_list = parse_real_list(take("h_list"), path);
    if (!(cfg.t_final > 0.0) || cfg.h_list.size() < 4) {
      throw std::invalid_argument(
          path + ": need t_final > 0 and h_list with >= 4 levels");
    }
  }
  if (cfg.field == "custom") {
    cfg.field_coeffs = parse_real_list(take("field_coeffs"), path);
  }
  if (!kv.empty()) {
    throw std::invalid_argument(path + ": unknown key '" + kv.begin()->first +
                                "'");
  }
  return cfg;
}

SubalgebraSplit load_basis_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open basis file '" + path + "'");
  SubalgebraSplit split;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " +
                                msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream head(line);
    std::string keyword, role, name;
    int rows = 0, cols = 0;
    head >> keyword >> role >> name >> rows >> cols;
    if (keyword != "matrix" || head.fail() || rows < 1 || cols < 1) {
      fail("expected 'matrix <h|m|g> <name> <rows> <cols>'");
    }
    if (role != "h" && role != "m" && role != "g") {
      fail("role must be h, m or g");
    }
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      if (!std::getline(in, line)) fail("unexpected end of file in matrix");
      ++lineno;
      std::istringstream row(line);
      for (int j = 0; j < cols; ++j) {
        if (!(row >> m(i, j))) fail("bad entry in row " + std::to_string(i));
      }
    }
    ensure_finite(m, path);
    split.g_basis.push_back(m);
    if (role == "h") split.h_basis.push_back(m);
    if (role == "m") split.m_basis.push_back(m);
  }
  if (split.g_basis.empty()) fail("no matrices found");
  return split;
}

void save_basis_file(const std::string& path, const SubalgebraSplit& split) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' to write");
  auto contains = [](const std::vector<Matrix>& v, const Matrix& m) {
    for (const auto& e : v) {
      if (e.rows() == m.rows() && e.cols() == m.cols() && e == m) return true;
    }
    return false;
  };
  int index = 0;
  for (const auto& m : split.g_basis) {
    const char* role = contains(split.h_basis, m)
                           ? "h"
                           : (contains(split.m_basis, m) ? "m" : "g");
    out << "matrix " << role << " e" << index++ << " " << m.rows() << " "
        << m.cols() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out << (j ? " " : "") << format_real(m(i, j));
      }
      out << "\n";
    }
  }
}

void write_trajectory_csv(std::ostream& out, const HomogeneousSpace& space,
                          const std::vector<Matrix>& points, double step) {
  if (points.empty()) return;
  const Matrix& first = points.front();
  out << "step,time";
  for (Eigen::Index i = 0; i < first.rows(); ++i) {
    for (Eigen::Index j = 0; j < first.cols(); ++j) {
      out << ",x" << i << "_" << j;
    }
  }
  out << "," << space.invariant_name << "\n";
  for (std::size_t n = 0; n < points.size(); ++n) {
    out << n << "," << format_real(static_cast<double>(n) * step);
    const Matrix& p = points[n];
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.cols(); ++j) {
        out << "," << format_real(p(i, j));
      }
    }
    out << "," << format_real(space.invariant_of(p)) << "\n";
  }
}

}  // namespace hsflow
