#include "cvoodg/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cvoodg::io {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void emit(const json& j, std::string& out, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close(2 * depth, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + json(it.key()).dump() + ": ";
                emit(it.value(), out, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                emit(j[i], out, depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) {
                out += "null";
                return;
            }
            std::string s = format_double(x);
            // keep it a JSON float
            if (s.find_first_of(".eE") == std::string::npos) s += ".0";
            out += s;
            return;
        }
        default: out += j.dump();
    }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string dump_json(const json& j) {
    std::string out;
    emit(j, out, 0);
    out += "\n";
    return out;
}

json to_json(const BoundReport& r) {
    json j;
    j["schema"] = kBoundReportSchema;
    j["value"] = r.value;
    j["branch"] = r.branch;
    j["params"] = {{"s", optional_number(r.params.s)},
                   {"M", r.params.M ? json(*r.params.M) : json(nullptr)},
                   {"kappa", optional_number(r.params.kappa)}};
    json im = json::object();
    for (const auto& [k, v] : r.intermediates) im[k] = v;
    j["intermediates"] = im;
    return j;
}

json to_json(const oracle::Assertion& a) {
    json wp = json::object();
    for (const auto& [k, v] : a.worst_point) wp[k] = v;
    return {{"name", a.name}, {"status", a.status}, {"max_slack", a.max_slack}, {"worst_point", wp}, {"detail", a.detail}};
}

json to_json(const oracle::VerificationReport& r) {
    json list = json::array();
    for (const auto& a : r.assertions) list.push_back(to_json(a));
    std::size_t failures = 0;
    for (const auto& a : r.assertions) failures += a.ok() ? 0 : 1;
    return {{"schema", kVerificationSchema},
            {"suite", r.suite},
            {"seed", r.seed},
            {"passed", r.passed()},
            {"failures", failures},
            {"assertions", list}};
}

FockMatrix fock_matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("re")) throw std::invalid_argument("fock matrix JSON needs an \"re\" array");
    const auto& re = j.at("re");
    const std::size_t n = re.size();
    if (n == 0) throw std::invalid_argument("fock matrix JSON: empty matrix");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (re[i].size() != n) throw std::invalid_argument("fock matrix JSON: \"re\" is not square");
        for (std::size_t k = 0; k < n; ++k) m(i, k).real(re[i][k].get<double>());
    }
    if (j.contains("im")) {
        const auto& im = j.at("im");
        if (im.size() != n) throw std::invalid_argument("fock matrix JSON: \"im\" shape mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (im[i].size() != n) throw std::invalid_argument("fock matrix JSON: \"im\" shape mismatch");
            for (std::size_t k = 0; k < n; ++k) m(i, k).imag(im[i][k].get<double>());
        }
    }
    return FockMatrix(m);
}

FockMatrix read_fock_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
    }
    return fock_matrix_from_json(j);
}

BoundCurve read_curve_csv(const std::string& path, const InDistributionGuarantee& g) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::string line;
    int col_n = -1, col_e = -1;
    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (col_n < 0) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == "nbar") col_n = static_cast<int>(i);
                if (cells[i] == "epsilon") col_e = static_cast<int>(i);
            }
            if (col_n < 0 || col_e < 0) throw std::invalid_argument(path + ": header lacks nbar/epsilon");
            continue;
        }
        if (static_cast<int>(cells.size()) <= std::max(col_n, col_e)) throw std::invalid_argument(path + ": short row");
        try {
            pts.emplace_back(std::stod(cells[col_n]), std::stod(cells[col_e]));
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ": non-numeric entry");
        }
    }
    if (pts.empty()) throw std::invalid_argument(path + ": no rows");
    std::sort(pts.begin(), pts.end());
    return {ClassTag::custom, g,
            [pts](double n) {
                if (n <= pts.front().first) return pts.front().second;
                if (n >= pts.back().first) return pts.back().second;
                const auto it = std::upper_bound(pts.begin(), pts.end(), std::make_pair(n, -1e300));
                const auto& [x1, y1] = *it;
                const auto& [x0, y0] = *(it - 1);
                return y0 + (y1 - y0) * (n - x0) / (x1 - x0);
            },
            false};
}

}  // namespace cvoodg::io
