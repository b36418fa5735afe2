#include "bcycle/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "bcycle/csv.hpp"
#include "bcycle/error.hpp"

namespace bcycle {

YearMonth YearMonth::from_ordinal(int ordinal) {
  const int year = ordinal >= 0 ? ordinal / 12 : -((-ordinal + 11) / 12);
  return {year, ordinal - year * 12 + 1};
}

YearMonth YearMonth::parse(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') {
    throw InputError("date must be YYYY-MM, got '" + std::string(text) + "'");
  }
  const auto year = csv::parse_integer(text.substr(0, 4));
  const auto month = csv::parse_integer(text.substr(5, 2));
  if (month < 1 || month > 12) throw InputError("month out of range in '" + std::string(text) + "'");
  return {static_cast<int>(year), static_cast<int>(month)};
}

std::string YearMonth::str() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

std::string_view to_string(Variable v) {
  switch (v) {
    case Variable::production: return "production";
    case Variable::shipment: return "shipment";
    case Variable::inventory: return "inventory";
  }
  return "?";
}

std::optional<Variable> parse_variable(std::string_view text) {
  for (auto v : kVariables)
    if (to_string(v) == text) return v;
  return std::nullopt;
}

namespace {

void check_goods(const std::vector<GoodDescriptor>& goods) {
  if (goods.empty()) throw InputError("goods table is empty");
  for (std::size_t i = 0; i < goods.size(); ++i) {
    if (goods[i].id != static_cast<int>(i) + 1) {
      throw InputError("goods ids must be unique and contiguous from 1; position " +
                       std::to_string(i + 1) + " has id " + std::to_string(goods[i].id));
    }
  }
}

std::string cell_name(Variable v, int good, YearMonth m) {
  return "(" + std::string(to_string(v)) + ", good " + std::to_string(good) + ", " + m.str() + ")";
}

}  // namespace

void Panel::validate() const {
  check_goods(goods);
  if (levels.rows() != n_series()) {
    throw InputError("panel has " + std::to_string(levels.rows()) + " series, expected " +
                     std::to_string(n_series()));
  }
  if (levels.cols() < 1) throw InputError("panel has no months");
  for (Eigen::Index s = 0; s < levels.rows(); ++s) {
    for (Eigen::Index j = 0; j < levels.cols(); ++j) {
      const double x = levels(s, j);
      if (!std::isfinite(x) || x <= 0.0) {
        throw InputError("non-positive or non-finite level at " +
                         cell_name(kVariables[static_cast<std::size_t>(s / n_goods())],
                                   goods[static_cast<std::size_t>(s % n_goods())].id, month(j)));
      }
    }
  }
}

bool Panel::operator==(const Panel& other) const {
  return start == other.start && goods == other.goods &&
         levels.rows() == other.levels.rows() && levels.cols() == other.levels.cols() &&
         levels == other.levels && seasonally_adjusted == other.seasonally_adjusted;
}

Panel read_panel(std::istream& in, const LoadOptions& options, std::string_view source) {
  const std::string where = std::string(source);
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_record(in, line, line_no)) throw InputError(where + ": empty panel file");
  if (line != kPanelHeader) {
    throw InputError(where + ": header must be exactly '" + std::string(kPanelHeader) +
                     "', got '" + line + "'");
  }

  using Key = std::tuple<int, int, int>;  // variable, good id, month ordinal
  std::map<Key, double> cells;
  std::set<int> good_ids;
  while (csv::next_record(in, line, line_no)) {
    const auto f = csv::split_line(line);
    const std::string at = where + ":" + std::to_string(line_no) + ": ";
    if (f.size() != 4) throw InputError(at + "expected 4 fields, got " + std::to_string(f.size()));
    try {
      const auto date = YearMonth::parse(f[0]);
      const auto var = parse_variable(f[1]);
      if (!var) throw InputError("unknown variable '" + f[1] + "'");
      const auto good = static_cast<int>(csv::parse_integer(f[2]));
      const double value = csv::parse_double(f[3]);
      if (!std::isfinite(value) || value <= 0.0) {
        throw InputError("non-positive value " + f[3] + " at " + cell_name(*var, good, date));
      }
      const Key key{static_cast<int>(*var), good, date.ordinal()};
      if (!cells.emplace(key, value).second) {
        throw InputError("duplicate cell " + cell_name(*var, good, date));
      }
      good_ids.insert(good);
    } catch (const InputError& e) {
      throw InputError(at + e.what());
    }
  }
  if (cells.empty()) throw InputError(where + ": panel has no data rows");

  Panel panel;
  panel.seasonally_adjusted = options.seasonally_adjusted;
  if (options.goods) {
    panel.goods = *options.goods;
    check_goods(panel.goods);
    std::set<int> table_ids;
    for (const auto& g : panel.goods) table_ids.insert(g.id);
    if (table_ids != good_ids) {
      throw InputError(where + ": goods in data do not match the goods table");
    }
  } else {
    for (int id : good_ids) panel.goods.push_back({id, "good " + std::to_string(id), ""});
    check_goods(panel.goods);
  }

  const auto G = panel.n_goods();
  // Per-series month range; all series must share it.
  std::map<std::pair<int, int>, std::pair<int, int>> ranges;
  for (const auto& [key, value] : cells) {
    const auto [v, g, m] = key;
    auto [it, inserted] = ranges.try_emplace({v, g}, m, m);
    if (!inserted) {
      it->second.first = std::min(it->second.first, m);
      it->second.second = std::max(it->second.second, m);
    }
  }
  int first = ranges.begin()->second.first;
  int last = ranges.begin()->second.second;
  for (const auto& [series, range] : ranges) {
    first = std::min(first, range.first);
    last = std::max(last, range.second);
  }
  for (auto v : kVariables) {
    for (const auto& good : panel.goods) {
      const auto it = ranges.find({static_cast<int>(v), good.id});
      if (it == ranges.end()) {
        throw InputError(where + ": missing cell " +
                         cell_name(v, good.id, YearMonth::from_ordinal(first)) +
                         " (series absent)");
      }
      if (it->second.first != first || it->second.second != last) {
        throw InputError(where + ": ragged month range for " + std::string(to_string(v)) +
                         " good " + std::to_string(good.id) + ": " +
                         YearMonth::from_ordinal(it->second.first).str() + ".." +
                         YearMonth::from_ordinal(it->second.second).str() + " vs panel " +
                         YearMonth::from_ordinal(first).str() + ".." +
                         YearMonth::from_ordinal(last).str());
      }
    }
  }

  const Eigen::Index N = last - first + 1;
  panel.start = YearMonth::from_ordinal(first);
  panel.levels = Eigen::MatrixXd::Constant(kNumVariables * G, N, std::nan(""));
  for (const auto& [key, value] : cells) {
    const auto [v, g, m] = key;
    panel.levels(v * G + (g - 1), m - first) = value;
  }

  for (auto v : kVariables) {
    for (Eigen::Index g = 0; g < G; ++g) {
      auto row = panel.levels.row(panel.series_index(v, g));
      Eigen::Index j = 0;
      while (j < N) {
        if (!std::isnan(row(j))) {
          ++j;
          continue;
        }
        Eigen::Index end = j;
        while (end < N && std::isnan(row(end))) ++end;
        const auto gap = end - j;
        const auto id = panel.goods[static_cast<std::size_t>(g)].id;
        if (!options.interpolate_gaps || gap > options.max_gap) {
          throw InputError(where + ": missing cell " + cell_name(v, id, panel.month(j)) +
                           (options.interpolate_gaps ? " (gap of " + std::to_string(gap) +
                                                           " months exceeds limit)"
                                                     : ""));
        }
        // Gaps are interior because every series spans [first, last].
        const double lo = row(j - 1);
        const double hi = row(end);
        for (Eigen::Index t = j; t < end; ++t) {
          const double frac = static_cast<double>(t - j + 1) / static_cast<double>(gap + 1);
          row(t) = lo + frac * (hi - lo);
          panel.provenance.push_back("interpolated " + cell_name(v, id, panel.month(t)));
        }
        j = end;
      }
    }
  }
  panel.validate();
  return panel;
}

Panel load_panel(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open panel file " + path.string());
  return read_panel(in, options, path.string());
}

void write_panel(std::ostream& out, const Panel& panel, const std::vector<std::string>& metadata) {
  for (const auto& m : metadata) out << "# " << m << '\n';
  out << kPanelHeader << '\n';
  for (auto v : kVariables) {
    for (Eigen::Index g = 0; g < panel.n_goods(); ++g) {
      const auto row = panel.levels.row(panel.series_index(v, g));
      for (Eigen::Index j = 0; j < panel.n_months(); ++j) {
        out << panel.month(j).str() << ',' << to_string(v) << ','
            << panel.goods[static_cast<std::size_t>(g)].id << ','
            << csv::format_double(row(j), 12) << '\n';
      }
    }
  }
}

void save_panel(const std::filesystem::path& path, const Panel& panel,
                const std::vector<std::string>& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write panel file " + path.string());
  write_panel(out, panel, metadata);
}

std::vector<GoodDescriptor> read_goods(std::istream& in, std::string_view source) {
  const std::string where(source);
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_record(in, line, line_no) || line != "id,label,category") {
    throw InputError(where + ": goods table header must be 'id,label,category'");
  }
  std::vector<GoodDescriptor> goods;
  while (csv::next_record(in, line, line_no)) {
    const auto f = csv::split_line(line);
    if (f.size() != 3) {
      throw InputError(where + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    goods.push_back({static_cast<int>(csv::parse_integer(f[0])), f[1], f[2]});
  }
  std::sort(goods.begin(), goods.end(),
            [](const GoodDescriptor& a, const GoodDescriptor& b) { return a.id < b.id; });
  check_goods(goods);
  return goods;
}

std::vector<GoodDescriptor> load_goods(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open goods table " + path.string());
  return read_goods(in, path.string());
}

void write_goods(std::ostream& out, const std::vector<GoodDescriptor>& goods) {
  out << "id,label,category\n";
  for (const auto& g : goods) {
    out << g.id << ',' << csv::escape(g.label) << ',' << csv::escape(g.category) << '\n';
  }
}

std::vector<GoodDescriptor> iip_goods_table() {
  return {
      {1, "Manufacturing Equipment", "Capital Goods"},
      {2, "Electricity", "Capital Goods"},
      {3, "Communication and Broadcasting", "Capital Goods"},
      {4, "Agriculture", "Capital Goods"},
      {5, "Construction", "Capital Goods"},
      {6, "Transport", "Capital Goods"},
      {7, "Offices", "Capital Goods"},
      {8, "Other Capital Goods", "Capital Goods"},
      {9, "Construction", "Construction Goods"},
      {10, "Engineering", "Construction Goods"},
      {11, "House Work", "Durable Consumer Goods"},
      {12, "Heating/Cooling Equipment", "Durable Consumer Goods"},
      {13, "Furniture & Furnishings", "Durable Consumer Goods"},
      {14, "Education & Amusement", "Durable Consumer Goods"},
      {15, "Motor Vehicles", "Durable Consumer Goods"},
      {16, "House Work", "Non-durable Consumer Goods"},
      {17, "Education & Amusement", "Non-durable Consumer Goods"},
      {18, "Clothing & Footwear", "Non-durable Consumer Goods"},
      {19, "Food & Beverage", "Non-durable Consumer Goods"},
      {20, "Mining & Manufacturing", "Producer Goods"},
      {21, "Others", "Producer Goods"},
  };
}

Panel chop(const Panel& panel, Eigen::Index months) {
  if (months < 2 || months > panel.n_months()) {
    throw InputError("chop length " + std::to_string(months) + " outside [2, " +
                     std::to_string(panel.n_months()) + "]");
  }
  Panel out = panel;
  out.levels = panel.levels.leftCols(months);
  if (months != panel.n_months()) {
    out.provenance.push_back("chopped to first " + std::to_string(months) + " of " +
                             std::to_string(panel.n_months()) + " months");
  }
  return out;
}

std::pair<Panel, Panel> split_in_sample(const Panel& panel, YearMonth boundary) {
  const int offset = boundary - panel.start;
  if (offset < 1 || offset >= panel.n_months()) {
    throw InputError("in-sample boundary " + boundary.str() + " outside panel range " +
                     panel.month(1).str() + ".." + panel.last_month().str());
  }
  Panel prefix = chop(panel, offset + 1);
  prefix.provenance.push_back("in-sample through " + boundary.str());
  return {std::move(prefix), panel};
}

}  // namespace bcycle
