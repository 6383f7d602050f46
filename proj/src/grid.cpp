#include "ceda/grid.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>

namespace ceda {

GridMap::GridMap(int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("grid dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  obstacles_.assign(cell_count(), 0);
  wind_.assign(cell_count(), 0);
  lowsig_.assign(cell_count(), 0);
}

void GridMap::set_obstacle(Cell c, bool v) {
  const auto i = index(c);
  obstacles_[i] = v;
  if (v) {
    wind_[i] = 0;
    lowsig_[i] = 0;
  }
}

void GridMap::clear_hazards() {
  std::fill(wind_.begin(), wind_.end(), 0);
  std::fill(lowsig_.begin(), lowsig_.end(), 0);
}

std::size_t GridMap::obstacle_count() const {
  return static_cast<std::size_t>(std::count(obstacles_.begin(), obstacles_.end(), 1));
}
std::size_t GridMap::wind_count() const {
  return static_cast<std::size_t>(std::count(wind_.begin(), wind_.end(), 1));
}
std::size_t GridMap::lowsig_count() const {
  return static_cast<std::size_t>(std::count(lowsig_.begin(), lowsig_.end(), 1));
}

std::vector<Cell> GridMap::obstacle_cells() const {
  std::vector<Cell> out;
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    if (obstacles_[i]) out.push_back(cell_at(i));
  }
  return out;
}

std::optional<std::vector<Cell>> astar_path(const GridMap& grid, Cell start, Cell goal) {
  if (!grid.passable(start) || !grid.passable(goal)) {
    throw std::invalid_argument("astar_path: start and goal must be in-bounds free cells");
  }
  if (start == goal) return std::vector<Cell>{start};

  constexpr int kUnseen = std::numeric_limits<int>::max();
  const std::size_t n = grid.cell_count();
  std::vector<int> g(n, kUnseen);
  std::vector<std::size_t> parent(n, n);
  std::vector<std::uint8_t> closed(n, 0);

  // (f, insertion order, cell index); the counter makes ties FIFO so the
  // fixed neighbour order decides between equal-cost routes.
  using Entry = std::tuple<int, std::uint64_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::uint64_t counter = 0;

  const std::size_t s = grid.index(start);
  const std::size_t t = grid.index(goal);
  g[s] = 0;
  open.emplace(manhattan(start, goal), counter++, s);

  while (!open.empty()) {
    const auto [f, order, cur] = open.top();
    open.pop();
    if (closed[cur]) continue;
    closed[cur] = 1;
    if (cur == t) break;
    const Cell c = grid.cell_at(cur);
    for (const Cell d : kNeighbourOffsets) {
      const Cell nb{c.x + d.x, c.y + d.y};
      if (!grid.passable(nb)) continue;
      const std::size_t ni = grid.index(nb);
      if (closed[ni]) continue;
      const int cand = g[cur] + 1;
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = cur;
        open.emplace(cand + manhattan(nb, goal), counter++, ni);
      }
    }
  }

  if (g[t] == kUnseen) return std::nullopt;
  std::vector<Cell> path;
  for (std::size_t at = t; at != n; at = parent[at]) path.push_back(grid.cell_at(at));
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace ceda
