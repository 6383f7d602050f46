#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <vector>

namespace ceda {

struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

constexpr int manhattan(Cell a, Cell b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

constexpr int sign_of(int v) { return (v > 0) - (v < 0); }

// Row-major cell layers over a width x height board. y grows downward, so
// "up" is y - 1.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(width_) * height_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * width_ + c.x;
  }
  Cell cell_at(std::size_t idx) const {
    return {static_cast<int>(idx % width_), static_cast<int>(idx / width_)};
  }

  bool obstacle(Cell c) const { return obstacles_[index(c)] != 0; }
  bool wind(Cell c) const { return wind_[index(c)] != 0; }
  bool lowsig(Cell c) const { return lowsig_[index(c)] != 0; }

  void set_obstacle(Cell c, bool v = true);
  void set_wind(Cell c, bool v = true) { wind_[index(c)] = v; }
  void set_lowsig(Cell c, bool v = true) { lowsig_[index(c)] = v; }
  void clear_hazards();

  std::size_t obstacle_count() const;
  std::size_t wind_count() const;
  std::size_t lowsig_count() const;
  std::vector<Cell> obstacle_cells() const;

  // Free for travel: inside the board and not an obstacle.
  bool passable(Cell c) const { return in_bounds(c) && !obstacle(c); }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> obstacles_;
  std::vector<std::uint8_t> wind_;
  std::vector<std::uint8_t> lowsig_;
};

// Neighbour expansion order shared by pathfinding and the action set:
// up, down, left, right.
inline constexpr Cell kNeighbourOffsets[4] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};

// Shortest 4-connected obstacle-avoiding path, endpoints included.
// Throws std::invalid_argument if start or goal is out of bounds or blocked.
std::optional<std::vector<Cell>> astar_path(const GridMap& grid, Cell start, Cell goal);

}  // namespace ceda
