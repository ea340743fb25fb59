// export.hpp - CSV tables and JSON documents for policies and reports

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fogran/scheme.hpp"
#include "fogran/simulator.hpp"

namespace fogran {

using Json = nlohmann::ordered_json;

// 12 significant digits, '.' separator, explicit inf/nan.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// JSON has no inf/nan; non-finite values are written as the CSV spelling.
inline Json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

class Table {
 public:
  using Cell = std::variant<double, std::int64_t, bool, std::string>;

  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::logic_error("row width does not match the header");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  std::string to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
    out += '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += cell_text(row[i]);
      }
      out += '\n';
    }
    return out;
  }

  Json to_json() const {
    Json arr = Json::array();
    for (const auto& row : rows_) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[columns_[i]] = cell_json(row[i]);
      arr.push_back(std::move(obj));
    }
    return arr;
  }

 private:
  static std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "1" : "0";
    return std::get<std::string>(c);
  }

  static Json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return json_number(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (const auto* b = std::get_if<bool>(&c)) return *b;
    return std::get<std::string>(c);
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

inline Json to_json(const NdtTriple& t) {
  return Json{{"delta_f", json_number(t.delta_f)}, {"delta_e", json_number(t.delta_e)}, {"delta_d", json_number(t.delta_d)}};
}

inline Json to_json(const SerialPolicy& pol) {
  Json plan = Json::array();
  for (const auto& e : pol.plan)
    plan.push_back({{"mode", to_string(e.mode)},
                    {"fraction", e.fraction},
                    {"fronthaul", e.use.fronthaul},
                    {"edge", e.use.edge},
                    {"d2d", e.use.d2d}});
  return Json{{"placement",
               {{"joint", pol.placement.joint},
                {"exclusive_1", pol.placement.exclusive_1},
                {"exclusive_2", pol.placement.exclusive_2},
                {"uncached", pol.placement.uncached()}}},
              {"phase_plan", std::move(plan)},
              {"ndt", to_json(pol.ndt)}};
}

inline Json to_json(const BusySymbols& b) {
  return Json{{"fronthaul_1", b.fronthaul_1},
              {"fronthaul_2", b.fronthaul_2},
              {"edge", b.edge},
              {"d2d_12", b.d2d_12},
              {"d2d_21", b.d2d_21}};
}

inline Json to_json(const DeliveryReport& r) {
  return Json{{"total_symbols", r.total_symbols},
              {"busy", to_json(r.busy)},
              {"decode_success", r.decode_success},
              {"empirical_ndt", json_number(r.empirical_ndt)},
              {"gap_to_closed_form", json_number(r.gap_to_closed_form)}};
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace fogran
