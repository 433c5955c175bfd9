#include "otb/tables.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "otb/bounds.hpp"
#include "otb/constants.hpp"
#include "otb/errors.hpp"
#include "otb/parallel.hpp"

namespace otb {

namespace {

const std::vector<int> kMaxDims = {1, 2, 3, 4, 5, 6, 7, 8, 9, 100, 500};
const std::vector<int> kEucDims = {8, 15, 20, 25, 30, 35, 50, 75, 100, 500};
const std::vector<double> kTargets = {4.0, 2.0, 1.25};

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

std::string dim_label(int d) { return "d=" + std::to_string(d); }

Table compact_max_norm(int id, double p) {
  Table t;
  t.id = id;
  t.title = p == 1.0 ? "E[T_1] bound numerators, max norm, support in B(0,1/2)"
                     : "sqrt(E[T_2]) bound numerators, max norm, support in B(0,1/2)";
  t.rows = {"numerator"};
  for (int d : kMaxDims) t.cols.push_back(dim_label(d));
  t.cells.resize(t.cols.size());
  parallel_for(kMaxDims.size(), [&](std::size_t j) {
    int d = kMaxDims[j];
    TableCell& c = t.cells[j];
    c.row_label = t.rows[0];
    c.col_label = t.cols[j];
    if (is_critical(d, p)) {
      CriticalAffine a = critical_affine_max_norm(p);
      c.value = ceil_to(a.a, 2);
      c.intercept = ceil_to(a.b, 2);
      c.n_floor = a.n_floor;
      std::string body = fixed(*c.intercept, 2);
      if (body.size() > 3 && body.substr(body.size() - 3) == ".00") body.resize(body.size() - 3);
      body = fixed(c.value, 2) + " ln N + " + body;
      if (p != 1.0) body = "sqrt(" + body + ")";
      c.display = "(" + body + ") / N^(1/" + std::to_string(p == 1.0 ? 2 : 4) + ") for N >= " + std::to_string(a.n_floor);
    } else {
      double k = kappa_max_norm(d, p).value;
      c.value = ceil_to(p == 1.0 ? k : std::sqrt(k), 2);
      int den = p > d / 2.0 ? (p == 1.0 ? 2 : 4) : d;
      c.display = fixed(c.value, 2) + " / N^(1/" + std::to_string(den) + ")";
    }
  });
  return t;
}

Table compact_euclidean(int id, double p) {
  Table t;
  t.id = id;
  t.title = p == 1.0 ? "E[T_1] bound numerators, Euclidean norm, support in B(0,1/2)"
                     : "sqrt(E[T_2]) bound numerators, Euclidean norm, support in B(0,1/2)";
  t.rows = {"euclidean", "sqrt(d) * max-norm"};
  for (int d : kEucDims) t.cols.push_back(dim_label(d));
  const std::size_t nc = t.cols.size();
  t.cells.resize(2 * nc);
  std::vector<double> raw(2 * nc);
  parallel_for(nc, [&](std::size_t j) {
    int d = kEucDims[j];
    double native = kappa_euclidean(d, p).value;
    double lift = std::pow(double(d), p / 2.0) * kappa_max_norm(d, p).value;
    raw[j] = p == 1.0 ? native : std::sqrt(native);
    raw[nc + j] = p == 1.0 ? lift : std::sqrt(lift);
  });
  for (std::size_t j = 0; j < nc; ++j) {
    for (std::size_t i = 0; i < 2; ++i) {
      TableCell& c = t.cells[i * nc + j];
      c.row_label = t.rows[i];
      c.col_label = t.cols[j];
      c.value = ceil_to(raw[i * nc + j], 2);
      c.bold = raw[i * nc + j] <= raw[(1 - i) * nc + j];
      c.display = fixed(c.value, 2) + " / N^(1/" + std::to_string(kEucDims[j]) + ")";
    }
  }
  return t;
}

Table min_q_table(int id, double p, Norm norm) {
  Table t;
  t.id = id;
  const bool root = p != 1.0;
  t.title = std::string("minimum q on the 0.1 grid with ") + (root ? "sqrt(theta)" : "theta") + " <= c, " +
            (norm == Norm::Max ? "max" : "Euclidean") + " norm, p = " + fixed(p, 0) + " (critical cells at N = 100)";
  const std::vector<int>& dims = norm == Norm::Max ? kMaxDims : kEucDims;
  for (double c : kTargets) t.rows.push_back("c=" + fixed(c, c == 1.25 ? 2 : 0));
  for (int d : dims) t.cols.push_back(dim_label(d));
  const std::size_t nc = dims.size();
  t.cells.resize(kTargets.size() * nc);
  parallel_for(t.cells.size(), [&](std::size_t k) {
    std::size_t i = k / nc, j = k % nc;
    TableCell& c = t.cells[k];
    c.row_label = t.rows[i];
    c.col_label = t.cols[j];
    c.value = min_q_for_theta(dims[j], p, kTargets[i], norm, 100, root);
    c.display = fixed(c.value, 1);
  });
  return t;
}

}  // namespace

double ceil_to(double x, int decimals) {
  double s = std::pow(10.0, decimals);
  double y = x * s;
  return std::ceil(y - 1e-9 * std::max(1.0, std::abs(y))) / s;
}

Table generate_table(int id) {
  switch (id) {
    case 1:
      return compact_max_norm(1, 1.0);
    case 2:
      return compact_max_norm(2, 2.0);
    case 3:
      return compact_euclidean(3, 1.0);
    case 4:
      return compact_euclidean(4, 2.0);
    case 5:
      return min_q_table(5, 1.0, Norm::Max);
    case 6:
      return min_q_table(6, 2.0, Norm::Max);
    case 7:
      return min_q_table(7, 1.0, Norm::Euclidean);
    case 8:
      return min_q_table(8, 2.0, Norm::Euclidean);
    default:
      throw ArgumentError("table id must be in 1..8, got " + std::to_string(id));
  }
}

std::string table_text(const Table& t) {
  std::vector<std::size_t> width(t.cols.size() + 1, 0);
  for (const auto& r : t.rows) width[0] = std::max(width[0], r.size());
  for (std::size_t j = 0; j < t.cols.size(); ++j) width[j + 1] = t.cols[j].size();
  auto shown = [](const TableCell& c) { return c.bold ? "*" + c.display + "*" : c.display; };
  for (const auto& c : t.cells) {
    for (std::size_t j = 0; j < t.cols.size(); ++j)
      if (c.col_label == t.cols[j]) width[j + 1] = std::max(width[j + 1], shown(c).size());
  }
  std::ostringstream os;
  os << "Table " << t.id << ": " << t.title << "\n";
  os << std::left << std::setw(int(width[0])) << "" ;
  for (std::size_t j = 0; j < t.cols.size(); ++j) os << "  " << std::setw(int(width[j + 1])) << t.cols[j];
  os << "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    os << std::setw(int(width[0])) << t.rows[i];
    for (std::size_t j = 0; j < t.cols.size(); ++j) os << "  " << std::setw(int(width[j + 1])) << shown(t.at(i, j));
    os << "\n";
  }
  if (t.id == 3 || t.id == 4) os << "(*...* marks the smaller constant of each column)\n";
  return os.str();
}

std::string table_csv(const Table& t) {
  std::ostringstream os;
  os << "row_label,col_label,value,bold,display_string\n";
  os << std::setprecision(17);
  for (const auto& c : t.cells) {
    os << '"' << c.row_label << "\",\"" << c.col_label << "\"," << c.value << ',' << (c.bold ? "true" : "false")
       << ",\"" << c.display << "\"\n";
  }
  return os.str();
}

std::string table_json(const Table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : t.cells) {
    nlohmann::ordered_json j = {{"row_label", c.row_label}, {"col_label", c.col_label}, {"value", c.value},
                        {"display_string", c.display}};
    if (t.id == 3 || t.id == 4) j["bold"] = c.bold;
    if (c.intercept) j["intercept"] = *c.intercept;
    if (c.n_floor) j["n_floor"] = *c.n_floor;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

}  // namespace otb
