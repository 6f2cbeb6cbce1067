#include "grid.hpp"

#include <algorithm>

namespace levyfield {

GridSpec::GridSpec(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
  check_dim(dim());
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const auto& ax = axes_[a];
    require(std::isfinite(ax.min) && std::isfinite(ax.max), ErrorKind::Config, "grid axis ", a + 1,
            " bounds must be finite");
    require(ax.count >= 1, ErrorKind::Config, "grid axis ", a + 1, " needs at least one point");
    if (ax.count == 1) {
      require(ax.min == ax.max, ErrorKind::Config, "grid axis ", a + 1, " with a single point needs min == max");
    } else {
      require(ax.min < ax.max, ErrorKind::Config, "grid axis ", a + 1, " needs min < max");
    }
    std::vector<double> c(ax.count);
    const int last = ax.count - 1;
    for (int i = 0; i < ax.count; ++i) c[i] = last == 0 ? ax.min : ax.min + ((ax.max - ax.min) * i) / last;
    c[last] = ax.max;
    for (int i = 1; i < ax.count; ++i)
      require(c[i] > c[i - 1], ErrorKind::Config, "grid axis ", a + 1, " is too fine for double precision");
    coords_.push_back(std::move(c));
  }
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const auto& c : coords_) n *= c.size();
  return coords_.empty() ? 0 : n;
}

double GridSpec::spacing(int axis) const {
  const auto& ax = axes_[axis];
  return ax.count < 2 ? 0.0 : (ax.max - ax.min) / (ax.count - 1);
}

double GridSpec::min_spacing() const {
  double h = kInf;
  for (int a = 0; a < dim(); ++a)
    if (count(a) > 1) h = std::min(h, spacing(a));
  return h;
}

std::size_t GridSpec::flat_index(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = dim() - 1; a >= 0; --a) flat = flat * coords_[a].size() + idx[a];
  return flat;
}

std::array<int, 3> GridSpec::multi_index(std::size_t flat) const {
  std::array<int, 3> idx{};
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(flat % coords_[a].size());
    flat /= coords_[a].size();
  }
  return idx;
}

Vec GridSpec::point(const std::array<int, 3>& idx) const {
  Vec p{};
  for (int a = 0; a < dim(); ++a) p[a] = coords_[a][idx[a]];
  return p;
}

Vec GridSpec::point(std::size_t flat) const { return point(multi_index(flat)); }

bool GridSpec::find_origin(std::size_t& flat) const {
  std::array<int, 3> idx{};
  for (int a = 0; a < dim(); ++a) {
    const auto& c = coords_[a];
    const auto it = std::find(c.begin(), c.end(), 0.0);
    if (it == c.end()) return false;
    idx[a] = static_cast<int>(it - c.begin());
  }
  flat = flat_index(idx);
  return true;
}

double GridSpec::max_norm() const {
  Vec far{};
  for (int a = 0; a < dim(); ++a) far[a] = std::max(std::abs(axes_[a].min), std::abs(axes_[a].max));
  return norm(far);
}

GridSpec GridSpec::subgrid(int stride) const {
  require(stride >= 1, ErrorKind::Argument, "subgrid stride must be >= 1");
  GridSpec g;
  for (int a = 0; a < dim(); ++a) {
    std::vector<double> c;
    for (std::size_t i = 0; i < coords_[a].size(); i += stride) c.push_back(coords_[a][i]);
    g.axes_.push_back({c.front(), c.back(), static_cast<int>(c.size())});
    g.coords_.push_back(std::move(c));
  }
  return g;
}

std::vector<std::size_t> GridSpec::subgrid_indices(int stride) const {
  const GridSpec sub = subgrid(stride);
  std::vector<std::size_t> out(sub.size());
  for (std::size_t f = 0; f < sub.size(); ++f) {
    auto idx = sub.multi_index(f);
    for (int a = 0; a < dim(); ++a) idx[a] *= stride;
    out[f] = flat_index(idx);
  }
  return out;
}

bool GridSpec::same_as(const GridSpec& other) const { return coords_ == other.coords_; }

}  // namespace levyfield
