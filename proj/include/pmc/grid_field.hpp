#pragma once

#include "pmc/domain.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pmc {

/// Scalar samples on every non-exterior node of a domain.
class GridField {
 public:
  GridField() = default;
  GridField(DomainPtr domain, std::string name = {});
  GridField(DomainPtr domain, std::vector<double> values, std::string name = {});

  static GridField from_function(DomainPtr domain, const std::function<double(const Point&)>& fn,
                                 std::string name = {});
  static GridField constant(DomainPtr domain, double value, std::string name = {});

  const DomainPtr& domain_ptr() const { return domain_; }
  const Domain& domain() const { return *domain_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  std::size_t size() const { return values_.size(); }
  double operator[](int node) const { return values_[node]; }
  double& operator[](int node) { return values_[node]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool all_finite() const;
  /// Throws std::domain_error naming the field if any sample is NaN or Inf.
  void require_finite(const char* context) const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s);

  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(double s, GridField a) { return a *= s; }

  /// (1 - theta) * a + theta * b.
  static GridField blend(const GridField& a, const GridField& b, double theta);

 private:
  void check_same_domain(const GridField& other) const;

  DomainPtr domain_;
  std::vector<double> values_;
  std::string name_;
};

/// Symmetric Hessian. The off-diagonal entry is stored once.
struct HessianField {
  int dim = 0;
  GridField xx;
  GridField xy;
  GridField yy;

  const GridField& operator()(int i, int j) const {
    if (i != j) return xy;
    return i == 0 ? xx : yy;
  }
};

/// Applies one stencil table to a field. Nodes without a stencil row get 0.
GridField apply_stencil(const GridField& u, StencilKind kind);

/// Second-order finite-difference gradient on every node.
std::vector<GridField> gradient(const GridField& u);

/// Second-order finite-difference Hessian; mixed derivative by the centred
/// cross stencil.
HessianField hessian(const GridField& u);

/// CSV: header `# field=<name> shape=<...> nx=<..> ny=<..> dx=<..>` then one
/// `x1,x2,value` row per node.
void write_csv(const GridField& u, std::ostream& out);
void write_csv(const GridField& u, const std::string& path);

/// Reads a field written by write_csv. The domain is rebuilt from the header
/// and the node coordinates.
GridField read_csv(std::istream& in);
GridField read_csv(const std::string& path);

/// Reads a field and maps it onto an existing domain by node position.
GridField read_csv_onto(const std::string& path, DomainPtr domain);

}  // namespace pmc
