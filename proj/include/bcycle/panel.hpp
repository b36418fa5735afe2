#pragma once

#include <Eigen/Dense>

#include <array>
#include <compare>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bcycle {

/// Calendar month on the monthly grid.
struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  [[nodiscard]] int ordinal() const { return year * 12 + (month - 1); }
  [[nodiscard]] static YearMonth from_ordinal(int ordinal);
  /// Parses `YYYY-MM`.
  [[nodiscard]] static YearMonth parse(std::string_view text);
  [[nodiscard]] std::string str() const;

  [[nodiscard]] YearMonth operator+(int months) const { return from_ordinal(ordinal() + months); }
  [[nodiscard]] int operator-(const YearMonth& other) const { return ordinal() - other.ordinal(); }
  auto operator<=>(const YearMonth&) const = default;
};

enum class Variable { production = 0, shipment = 1, inventory = 2 };

inline constexpr std::array<Variable, 3> kVariables{Variable::production, Variable::shipment,
                                                    Variable::inventory};
inline constexpr Eigen::Index kNumVariables = 3;

[[nodiscard]] std::string_view to_string(Variable v);
[[nodiscard]] std::optional<Variable> parse_variable(std::string_view text);

struct GoodDescriptor {
  int id = 0;
  std::string label;
  std::string category;

  bool operator==(const GoodDescriptor&) const = default;
};

/// Monthly level panel. Series are stored variable-major: row
/// `v * G + g` holds variable `v` for the good at position `g`, so the
/// production block is the first G rows.
struct Panel {
  YearMonth start;
  std::vector<GoodDescriptor> goods;
  Eigen::MatrixXd levels;  // (3 G) x N, strictly positive
  bool seasonally_adjusted = true;
  /// Processing notes carried into reports (chops, interpolated cells).
  std::vector<std::string> provenance;

  [[nodiscard]] Eigen::Index n_goods() const { return static_cast<Eigen::Index>(goods.size()); }
  [[nodiscard]] Eigen::Index n_series() const { return kNumVariables * n_goods(); }
  [[nodiscard]] Eigen::Index n_months() const { return levels.cols(); }
  [[nodiscard]] Eigen::Index series_index(Variable v, Eigen::Index good_pos) const {
    return static_cast<Eigen::Index>(v) * n_goods() + good_pos;
  }
  [[nodiscard]] YearMonth month(Eigen::Index j) const { return start + static_cast<int>(j); }
  [[nodiscard]] YearMonth last_month() const { return month(n_months() - 1); }

  /// Throws InputError when any invariant is violated.
  void validate() const;

  bool operator==(const Panel& other) const;
};

struct LoadOptions {
  /// Linearly interpolate interior gaps of at most `max_gap` months instead
  /// of rejecting the file.
  bool interpolate_gaps = false;
  int max_gap = 2;
  /// Goods table; when absent, goods are taken from the data and must be
  /// numbered 1..G.
  std::optional<std::vector<GoodDescriptor>> goods;
  bool seasonally_adjusted = true;
};

inline constexpr std::string_view kPanelHeader = "date,variable,good,value";

[[nodiscard]] Panel read_panel(std::istream& in, const LoadOptions& options = {},
                               std::string_view source = "<stream>");
[[nodiscard]] Panel load_panel(const std::filesystem::path& path, const LoadOptions& options = {});

/// Long-format output with 12 significant digits. `metadata` lines are
/// written first, each prefixed with "# ".
void write_panel(std::ostream& out, const Panel& panel,
                 const std::vector<std::string>& metadata = {});
void save_panel(const std::filesystem::path& path, const Panel& panel,
                const std::vector<std::string>& metadata = {});

[[nodiscard]] std::vector<GoodDescriptor> read_goods(std::istream& in,
                                                     std::string_view source = "<stream>");
[[nodiscard]] std::vector<GoodDescriptor> load_goods(const std::filesystem::path& path);
void write_goods(std::ostream& out, const std::vector<GoodDescriptor>& goods);

/// The 21 goods classes of the Japanese IIP by type of goods.
[[nodiscard]] std::vector<GoodDescriptor> iip_goods_table();

/// First `months` months of the panel.
[[nodiscard]] Panel chop(const Panel& panel, Eigen::Index months);

/// (prefix ending at `boundary` inclusive, full panel).
[[nodiscard]] std::pair<Panel, Panel> split_in_sample(const Panel& panel, YearMonth boundary);

}  // namespace bcycle
