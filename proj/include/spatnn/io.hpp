#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spatnn/geometry.hpp"
#include "spatnn/nnct.hpp"
#include "spatnn/nnct_tests.hpp"

namespace spatnn {

using json = nlohmann::json;

struct LoadedPoints {
    PointSet ps;
    std::vector<std::string> class_names;  // id -> original label text
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline bool is_nonneg_integer(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

} // namespace detail

/// CSV point-set reader: header `x,y,label`, one point per row. Integer
/// labels are class ids directly; other labels map to ids in first-appearance
/// order, with the mapping reported alongside the points.
inline LoadedPoints read_points_csv(std::istream& in, const std::string& origin = "<stream>",
                                    std::optional<Rect> region = std::nullopt) {
    std::string line;
    if (!std::getline(in, line)) throw invalid_input(origin + ": empty file");
    {
        auto cols = detail::split_csv_line(line);
        if (cols.size() < 3 || cols[0] != "x" || cols[1] != "y" || cols[2] != "label")
            throw invalid_input(origin + ": header must be `x,y,label`");
    }
    std::vector<Point> pts;
    std::vector<int> raw_labels;
    std::vector<std::string> tokens;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto cols = detail::split_csv_line(line);
        if (cols.size() < 3)
            throw invalid_input(origin + ":" + std::to_string(lineno) +
                                ": expected columns x,y,label");
        Point p{};
        try {
            std::size_t used = 0;
            p.x = std::stod(cols[0], &used);
            if (used != cols[0].size()) throw std::invalid_argument("x");
            p.y = std::stod(cols[1], &used);
            if (used != cols[1].size()) throw std::invalid_argument("y");
        } catch (const std::exception&) {
            throw invalid_input(origin + ":" + std::to_string(lineno) +
                                ": could not parse coordinate in column x or y");
        }
        if (cols[2].empty())
            throw invalid_input(origin + ":" + std::to_string(lineno) + ": missing label column");
        pts.push_back(p);
        tokens.push_back(cols[2]);
        raw_labels.push_back(-1);
    }
    if (pts.size() < 2) throw invalid_input(origin + ": needs at least 2 points");

    bool all_int = true;
    for (const auto& t : tokens)
        if (!detail::is_nonneg_integer(t)) {
            all_int = false;
            break;
        }
    std::vector<std::string> names;
    if (all_int) {
        int q = 0;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            raw_labels[i] = std::stoi(tokens[i]);
            q = std::max(q, raw_labels[i] + 1);
        }
        for (int c = 0; c < q; ++c) names.push_back(std::to_string(c));
    } else {
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            auto it = std::find(names.begin(), names.end(), tokens[i]);
            if (it == names.end()) {
                raw_labels[i] = static_cast<int>(names.size());
                names.push_back(tokens[i]);
            } else {
                raw_labels[i] = static_cast<int>(it - names.begin());
            }
        }
    }
    PointSet ps = region ? PointSet(std::move(pts), std::move(raw_labels), *region)
                         : PointSet(std::move(pts), std::move(raw_labels));
    return LoadedPoints{std::move(ps), std::move(names)};
}

inline LoadedPoints read_points_csv_file(const std::string& path,
                                         std::optional<Rect> region = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw invalid_input(path + ": cannot open");
    return read_points_csv(in, path, region);
}

inline void write_points_csv(std::ostream& out, const PointSet& ps,
                             const std::vector<std::string>& class_names = {}) {
    out << "x,y,label\n";
    out.precision(17);
    for (int i = 0; i < ps.n(); ++i) {
        const int l = ps.label(i);
        out << ps.point(i).x << ',' << ps.point(i).y << ',';
        if (static_cast<std::size_t>(l) < class_names.size()) out << class_names[static_cast<std::size_t>(l)];
        else out << l;
        out << '\n';
    }
}

inline void write_points_csv_file(const std::string& path, const PointSet& ps,
                                  const std::vector<std::string>& class_names = {}) {
    std::ofstream out(path);
    if (!out) throw invalid_input(path + ": cannot open for writing");
    write_points_csv(out, ps, class_names);
}

/// NNCT summary fixture: cell counts plus the join counts Q and R, enough to
/// run every analytic two-class test without coordinates.
struct NnctSummary {
    Nnct table;
    long long Q = 0;
    int R = 0;
    std::vector<std::string> class_names;
};

inline NnctSummary read_nnct_summary(const json& j, const std::string& origin = "<json>") {
    if (!j.contains("counts") || !j["counts"].is_array())
        throw invalid_input(origin + ": missing `counts` matrix");
    const auto& rows = j["counts"];
    const int q = static_cast<int>(rows.size());
    std::vector<long long> counts;
    for (const auto& row : rows) {
        if (!row.is_array() || static_cast<int>(row.size()) != q)
            throw invalid_input(origin + ": `counts` must be a square matrix");
        for (const auto& v : row) counts.push_back(v.get<long long>());
    }
    NnctSummary s{Nnct(q, std::move(counts)), 0, 0, {}};
    if (!j.contains("Q") || !j.contains("R"))
        throw invalid_input(origin + ": missing `Q` or `R`");
    s.Q = j["Q"].get<long long>();
    s.R = j["R"].get<int>();
    if (s.Q < 0 || s.R < 0 || s.R % 2 != 0 || s.R > s.table.n())
        throw invalid_input(origin + ": Q must be >= 0 and R an even count between 0 and n");
    if (j.contains("labels"))
        for (const auto& v : j["labels"]) s.class_names.push_back(v.get<std::string>());
    return s;
}

inline NnctSummary read_nnct_summary_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input(path + ": cannot open");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw invalid_input(path + ": bad JSON (" + e.what() + ")");
    }
    return read_nnct_summary(j, path);
}

/// Table-style p-value rendering: values below 1e-4 print as "<.0001".
inline std::string format_pvalue(double p) {
    if (p < 1e-4) return "<.0001";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", p);
    return buf;
}

inline json nnct_to_json(const Nnct& t) {
    json rows = json::array();
    for (int i = 0; i < t.q(); ++i) {
        json row = json::array();
        for (int j = 0; j < t.q(); ++j) row.push_back(t.count(i, j));
        rows.push_back(row);
    }
    return json{{"counts", rows},
                {"row_sums", t.row_sums()},
                {"col_sums", t.col_sums()},
                {"n", t.n()}};
}

inline json test_result_to_json(const TestResult& r) {
    json j;
    j["method"] = method_name(r.method);
    if (r.method == Method::dixon_cell) j["cell"] = {r.cell_i, r.cell_j};
    if (r.k > 0) j["k"] = r.k;
    j["statistic"] = r.statistic;
    if (r.df) j["df"] = *r.df;
    if (r.p_asymptotic) {
        j["p_asymptotic"] = *r.p_asymptotic;
        j["p_asymptotic_display"] = format_pvalue(*r.p_asymptotic);
    }
    if (r.p_permutation) {
        j["p_permutation"] = *r.p_permutation;
        j["p_permutation_display"] = format_pvalue(*r.p_permutation);
    }
    j["null_model"] = r.null_model == NullModel::rl ? "rl" : "csr-conditional";
    j["small_cell"] = r.small_cell;
    if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
    return j;
}

} // namespace spatnn
