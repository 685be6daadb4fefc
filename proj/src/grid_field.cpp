#include "pmc/grid_field.hpp"

#include "pmc/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pmc {

GridField::GridField(DomainPtr domain, std::string name)
    : domain_(std::move(domain)), values_(domain_->node_count(), 0.0), name_(std::move(name)) {}

GridField::GridField(DomainPtr domain, std::vector<double> values, std::string name)
    : domain_(std::move(domain)), values_(std::move(values)), name_(std::move(name)) {
  if (values_.size() != domain_->node_count())
    throw std::invalid_argument("GridField: value count does not match the domain");
}

GridField GridField::from_function(DomainPtr domain, const std::function<double(const Point&)>& fn,
                                   std::string name) {
  GridField f(domain, std::move(name));
  for (std::size_t k = 0; k < f.size(); ++k) f.values_[k] = fn(domain->position(static_cast<int>(k)));
  return f;
}

GridField GridField::constant(DomainPtr domain, double value, std::string name) {
  GridField f(std::move(domain), std::move(name));
  std::fill(f.values_.begin(), f.values_.end(), value);
  return f;
}

bool GridField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void GridField::require_finite(const char* context) const {
  if (!all_finite())
    throw std::domain_error(std::string(context) + ": field '" + name_ + "' has non-finite values");
}

void GridField::check_same_domain(const GridField& other) const {
  if (domain_ != other.domain_) throw std::invalid_argument("GridField: fields live on different domains");
}

GridField& GridField::operator+=(const GridField& other) {
  check_same_domain(other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  check_same_domain(other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridField GridField::blend(const GridField& a, const GridField& b, double theta) {
  a.check_same_domain(b);
  GridField out(a.domain_, a.name_);
  for (std::size_t k = 0; k < a.values_.size(); ++k)
    out.values_[k] = (1.0 - theta) * a.values_[k] + theta * b.values_[k];
  return out;
}

GridField apply_stencil(const GridField& u, StencilKind kind) {
  const Domain& d = u.domain();
  const StencilTable& table = d.stencil(kind);
  GridField out(u.domain_ptr());
  for (std::size_t k = 0; k < d.node_count(); ++k) out[static_cast<int>(k)] = table.apply(static_cast<int>(k), u.values());
  return out;
}

std::vector<GridField> gradient(const GridField& u) {
  std::vector<GridField> g;
  for (int a = 0; a < u.domain().dim(); ++a) g.push_back(apply_stencil(u, d1_kind(a)));
  return g;
}

HessianField hessian(const GridField& u) {
  HessianField h;
  h.dim = u.domain().dim();
  h.xx = apply_stencil(u, StencilKind::d2_xx);
  if (h.dim == 2) {
    h.xy = apply_stencil(u, StencilKind::d2_xy);
    h.yy = apply_stencil(u, StencilKind::d2_yy);
  }
  return h;
}

void write_csv(const GridField& u, std::ostream& out) {
  const Domain& d = u.domain();
  const auto [nx, ny] = d.grid_nodes();
  out << "# field=" << (u.name().empty() ? "u" : u.name()) << " shape=" << to_string(d.shape())
      << " nx=" << nx << " ny=" << ny << " dx=" << format_double(d.spacing()[0]) << '\n';
  for (std::size_t k = 0; k < d.node_count(); ++k) {
    const Point& x = d.position(static_cast<int>(k));
    out << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(u[static_cast<int>(k)])
        << '\n';
  }
}

void write_csv(const GridField& u, const std::string& path) {
  std::ostringstream s;
  write_csv(u, s);
  write_file_atomic(path, s.str());
}

namespace {

struct CsvData {
  std::map<std::string, std::string> header;
  std::vector<std::array<double, 3>> rows;
};

CsvData parse_csv(std::istream& in) {
  CsvData data;
  std::string line;
  if (!std::getline(in, line) || line.rfind("#", 0) != 0)
    throw std::runtime_error("read_csv: missing '# field=...' header");
  std::istringstream hs(line.substr(1));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("read_csv: malformed header token '" + tok + "'");
    data.header[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char* key : {"field", "shape", "nx", "ny", "dx"})
    if (!data.header.count(key)) throw std::runtime_error(std::string("read_csv: header lacks '") + key + "'");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 3> row{};
    std::istringstream ls(line);
    for (int c = 0; c < 3; ++c) {
      std::string cell;
      if (!std::getline(ls, cell, ',')) throw std::runtime_error("read_csv: short row '" + line + "'");
      row[c] = parse_double(cell, "read_csv");
    }
    data.rows.push_back(row);
  }
  return data;
}

GridField map_rows(const CsvData& data, DomainPtr domain, const std::string& name) {
  const Domain& d = *domain;
  const double tol = 1e-9 * d.min_spacing();
  std::vector<int> order(d.node_count());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  auto less = [&](const Point& a, const Point& b) {
    if (std::abs(a[1] - b[1]) > tol) return a[1] < b[1];
    if (std::abs(a[0] - b[0]) > tol) return a[0] < b[0];
    return false;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return less(d.position(a), d.position(b)); });
  if (data.rows.size() != d.node_count())
    throw std::runtime_error("read_csv: row count " + std::to_string(data.rows.size()) +
                             " does not match the domain's " + std::to_string(d.node_count()) + " nodes");
  GridField f(domain, name);
  for (const auto& row : data.rows) {
    const Point x{row[0], row[1]};
    auto it = std::lower_bound(order.begin(), order.end(), x,
                               [&](int node, const Point& p) { return less(d.position(node), p); });
    if (it == order.end() || less(x, d.position(*it)))
      throw std::runtime_error("read_csv: point (" + format_double(x[0]) + ", " + format_double(x[1]) +
                               ") is not a node of the domain");
    f[*it] = row[2];
  }
  return f;
}

}  // namespace

GridField read_csv(std::istream& in) {
  const CsvData data = parse_csv(in);
  if (data.rows.empty()) throw std::runtime_error("read_csv: no data rows");
  const Shape shape = shape_from_string(data.header.at("shape"));
  const int nx = static_cast<int>(parse_double(data.header.at("nx"), "read_csv nx"));
  const int ny = static_cast<int>(parse_double(data.header.at("ny"), "read_csv ny"));
  Point lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Point hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& r : data.rows)
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], r[a]);
      hi[a] = std::max(hi[a], r[a]);
    }
  DomainSpec spec;
  switch (shape) {
    case Shape::interval: spec = DomainSpec::interval(lo[0], hi[0], nx); break;
    case Shape::rectangle: spec = DomainSpec::rectangle(lo, hi, nx, ny); break;
    case Shape::disc:
      spec = DomainSpec::disc({0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])}, 0.5 * (hi[0] - lo[0]), nx);
      break;
  }
  return map_rows(data, build_domain(spec), data.header.at("field"));
}

GridField read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");
  return read_csv(in);
}

GridField read_csv_onto(const std::string& path, DomainPtr domain) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");
  const CsvData data = parse_csv(in);
  return map_rows(data, std::move(domain), data.header.at("field"));
}

}  // namespace pmc
