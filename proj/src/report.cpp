/*
 * Copyright 2026 The align-audit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "align_audit/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "align_audit/error.hpp"

namespace align_audit {

namespace {

using nlohmann::json;

json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw DataError("unexpected string '" + s + "' in a numeric field");
  }
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

Agreement agreement_from_label(const std::string& label) {
  if (label == "strong") return Agreement::kStrong;
  if (label == "moderate") return Agreement::kModerate;
  if (label == "weak") return Agreement::kWeak;
  return Agreement::kUndefined;
}

// Shortest representation that reads back to the same double.
std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

json report_to_json(const AlignmentReport& report) {
  json j;
  j["dataset"] = report.dataset;
  json rho = json::object();
  json agreement = json::object();
  if (report.smd_tree) {
    rho["smd_tree"] = report.smd_tree->rho ? json(*report.smd_tree->rho) : json(nullptr);
    agreement["smd_tree"] = agreement_label(report.smd_tree->agreement);
  }
  if (report.smd_shap) {
    rho["smd_shap"] = report.smd_shap->rho ? json(*report.smd_shap->rho) : json(nullptr);
    agreement["smd_shap"] = agreement_label(report.smd_shap->agreement);
  }
  j["rho"] = rho;
  j["agreement"] = agreement;

  json rows = json::array();
  for (std::size_t k = 0; k < report.features().size(); ++k) {
    json row;
    row["feature"] = report.features()[k];
    row["smd"] = number(report.smd_delta.at(k));
    row["smd_abs"] = number(report.smd.scores[k]);
    row["smd_rank"] = report.smd.ranks[k];
    if (report.tree) {
      row["tree_importance"] = number(report.tree->scores[k]);
      row["tree_rank"] = report.tree->ranks[k];
    }
    if (report.shap) {
      row["shap_importance"] = number(report.shap->scores[k]);
      row["shap_rank"] = report.shap->ranks[k];
    }
    rows.push_back(std::move(row));
  }
  j["rankings"] = std::move(rows);

  json acc = json::object();
  if (report.tree_accuracy)
    acc["tree"] = {{"train", report.tree_accuracy->train}, {"test", report.tree_accuracy->test}};
  if (report.mlp_accuracy)
    acc["mlp"] = {{"train", report.mlp_accuracy->train}, {"test", report.mlp_accuracy->test}};
  j["accuracies"] = acc;
  j["config"] = report.config;
  return j;
}

AlignmentReport report_from_json(const json& j) {
  try {
    AlignmentReport r;
    r.dataset = j.at("dataset").get<std::string>();
    const auto& rows = j.at("rankings");
    std::vector<std::string> names;
    std::vector<double> smd_abs, tree, shap, smd_ranks, tree_ranks, shap_ranks;
    const bool has_tree = j.at("rho").contains("smd_tree");
    const bool has_shap = j.at("rho").contains("smd_shap");
    for (const auto& row : rows) {
      names.push_back(row.at("feature").get<std::string>());
      r.smd_delta.push_back(to_number(row.at("smd")));
      smd_abs.push_back(to_number(row.at("smd_abs")));
      smd_ranks.push_back(row.at("smd_rank").get<double>());
      if (has_tree) {
        tree.push_back(to_number(row.at("tree_importance")));
        tree_ranks.push_back(row.at("tree_rank").get<double>());
      }
      if (has_shap) {
        shap.push_back(to_number(row.at("shap_importance")));
        shap_ranks.push_back(row.at("shap_rank").get<double>());
      }
    }
    r.smd = Ranking{Method::kSmd, names, smd_abs, smd_ranks};
    auto correlation = [&](const char* key) {
      Correlation c;
      const auto& v = j.at("rho").at(key);
      if (!v.is_null()) c.rho = v.get<double>();
      c.agreement = agreement_from_label(j.at("agreement").at(key).get<std::string>());
      return c;
    };
    if (has_tree) {
      r.tree = Ranking{Method::kTree, names, tree, tree_ranks};
      r.smd_tree = correlation("smd_tree");
    }
    if (has_shap) {
      r.shap = Ranking{Method::kShap, names, shap, shap_ranks};
      r.smd_shap = correlation("smd_shap");
    }
    const auto& acc = j.at("accuracies");
    if (acc.contains("tree"))
      r.tree_accuracy = ModelAccuracy{acc["tree"].at("train"), acc["tree"].at("test")};
    if (acc.contains("mlp"))
      r.mlp_accuracy = ModelAccuracy{acc["mlp"].at("train"), acc["mlp"].at("test")};
    r.config = j.value("config", json::object());
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed alignment report: ") + e.what());
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  write_text(j.dump(2) + "\n", path);
}

void emit_json(const AlignmentReport& report, const std::filesystem::path& path) {
  write_json(report_to_json(report), path);
}

std::string rankings_csv(const AlignmentReport& report) {
  std::ostringstream out;
  out << "feature,smd,smd_abs,smd_rank,tree_importance,tree_rank,shap_importance,shap_rank\n";
  for (std::size_t k = 0; k < report.features().size(); ++k) {
    out << csv_field(report.features()[k]) << ',' << format_double(report.smd_delta.at(k)) << ','
        << format_double(report.smd.scores[k]) << ',' << format_double(report.smd.ranks[k]);
    for (const auto* ranking : {&report.tree, &report.shap}) {
      if (*ranking) {
        out << ',' << format_double((*ranking)->scores[k]) << ','
            << format_double((*ranking)->ranks[k]);
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
  return out.str();
}

void emit_csv(const AlignmentReport& report, const std::filesystem::path& path) {
  write_text(rankings_csv(report), path);
}

void emit_attributions(const AttributionMatrix& attributions,
                       const std::vector<std::string>& features,
                       const std::filesystem::path& path) {
  if (static_cast<std::size_t>(attributions.phi.cols()) != features.size())
    throw DataError("attribution width does not match the feature list");
  std::ostringstream out;
  out << "instance_id,output,base_value";
  for (const auto& f : features) out << ',' << csv_field(f);
  out << '\n';
  for (Eigen::Index i = 0; i < attributions.phi.rows(); ++i) {
    out << attributions.instance_ids.at(static_cast<std::size_t>(i)) << ','
        << format_double(attributions.outputs(i)) << ','
        << format_double(attributions.base_value);
    for (Eigen::Index j = 0; j < attributions.phi.cols(); ++j)
      out << ',' << format_double(attributions.phi(i, j));
    out << '\n';
  }
  write_text(out.str(), path);
}

std::string scatter_svg(const Ranking& a, const Ranking& b, std::optional<double> rho,
                        const std::string& dataset) {
  if (a.features != b.features) throw DataError("scatter rankings cover different features");
  const std::size_t p = a.features.size();
  constexpr double kSize = 520.0;
  constexpr double kMargin = 70.0;
  constexpr double kPlot = kSize - 2 * kMargin;
  const double lo = 0.5;
  const double hi = static_cast<double>(p) + 0.5;
  // Rank 1 sits at the left / top so that the most important features share
  // a corner.
  auto sx = [&](double r) { return kMargin + (r - lo) / (hi - lo) * kPlot; };
  auto sy = [&](double r) { return kMargin + (r - lo) / (hi - lo) * kPlot; };

  const std::string label_a(method_label(a.method));
  const std::string label_b(method_label(b.method));
  std::string title = label_a + " vs. " + label_b;
  if (!dataset.empty()) title = dataset + ": " + title;
  title += rho ? " (\xCF\x81 = " + fixed(*rho, 3) + ")" : " (\xCF\x81 undefined)";

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
    << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\" font-family=\"sans-serif\">\n"
    << "  <rect x=\"0\" y=\"0\" width=\"" << kSize << "\" height=\"" << kSize
    << "\" fill=\"white\"/>\n"
    << "  <text x=\"" << kSize / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">"
    << xml_escape(title) << "</text>\n"
    << "  <rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kPlot
    << "\" height=\"" << kPlot << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t r = 1; r <= p; ++r) {
    const double rr = static_cast<double>(r);
    s << "  <line x1=\"" << fixed(sx(rr), 2) << "\" y1=\"" << kMargin + kPlot << "\" x2=\""
      << fixed(sx(rr), 2) << "\" y2=\"" << kMargin + kPlot + 5 << "\" stroke=\"black\"/>\n"
      << "  <text x=\"" << fixed(sx(rr), 2) << "\" y=\"" << kMargin + kPlot + 20
      << "\" text-anchor=\"middle\" font-size=\"11\">" << r << "</text>\n"
      << "  <line x1=\"" << kMargin - 5 << "\" y1=\"" << fixed(sy(rr), 2) << "\" x2=\"" << kMargin
      << "\" y2=\"" << fixed(sy(rr), 2) << "\" stroke=\"black\"/>\n"
      << "  <text x=\"" << kMargin - 10 << "\" y=\"" << fixed(sy(rr) + 4, 2)
      << "\" text-anchor=\"end\" font-size=\"11\">" << r << "</text>\n";
  }
  s << "  <line class=\"diagonal\" x1=\"" << fixed(sx(lo), 2) << "\" y1=\"" << fixed(sy(lo), 2)
    << "\" x2=\"" << fixed(sx(hi), 2) << "\" y2=\"" << fixed(sy(hi), 2)
    << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n"
    << "  <text x=\"" << kSize / 2 << "\" y=\"" << kSize - 20
    << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(label_a)
    << " rank</text>\n"
    << "  <text x=\"20\" y=\"" << kSize / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
    << "transform=\"rotate(-90 20 " << kSize / 2 << ")\">" << xml_escape(label_b)
    << " rank</text>\n";
  for (std::size_t k = 0; k < p; ++k) {
    const double x = sx(a.ranks[k]);
    const double y = sy(b.ranks[k]);
    s << "  <g class=\"point\" data-feature=\"" << xml_escape(a.features[k]) << "\" data-rank-a=\""
      << format_double(a.ranks[k]) << "\" data-rank-b=\"" << format_double(b.ranks[k]) << "\">"
      << "<circle cx=\"" << fixed(x, 2) << "\" cy=\"" << fixed(y, 2)
      << "\" r=\"5\" fill=\"steelblue\"/>"
      << "<text x=\"" << fixed(x + 7, 2) << "\" y=\"" << fixed(y - 7, 2) << "\" font-size=\"11\">"
      << xml_escape(a.features[k]) << "</text></g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void emit_scatter(const Ranking& a, const Ranking& b, std::optional<double> rho,
                  const std::filesystem::path& path, const std::string& dataset) {
  write_text(scatter_svg(a, b, rho, dataset), path);
}

}  // namespace align_audit
