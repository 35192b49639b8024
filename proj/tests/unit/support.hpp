#pragma once

#include <memory>
#include <string>
#include <vector>

#include "piola/chart.hpp"
#include "piola/expr.hpp"

namespace piola::test {

inline std::vector<Expr> exprs(const std::vector<std::string>& text, int dim) {
  std::vector<Expr> out;
  for (const auto& t : text) out.push_back(parse(t, dim));
  return out;
}

/// Chart over `box` whose metric is diag(entries) or a full matrix.
inline std::shared_ptr<const Chart> chart(Box box, const std::vector<std::vector<std::string>>& metric) {
  const int d = box.dim();
  std::vector<std::vector<Expr>> g;
  for (const auto& row : metric) g.push_back(exprs(row, d));
  return std::make_shared<const Chart>(std::move(box), std::move(g));
}

inline std::shared_ptr<const Chart> euclidean(Box box) { return std::make_shared<const Chart>(Chart::euclidean(std::move(box))); }

inline std::shared_ptr<const ChartMap> map(std::shared_ptr<const Chart> src, std::shared_ptr<const Chart> tgt,
                                           const std::vector<std::string>& components) {
  const int d = src->dim();
  return std::make_shared<const ChartMap>(std::move(src), std::move(tgt), exprs(components, d));
}

inline VecD vec(std::initializer_list<double> v) {
  VecD out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace piola::test
