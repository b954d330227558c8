#include "homoglab/coefficient_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace homoglab::torus {
namespace {

using nlohmann::json;

Eigen::MatrixXd read_block(const json& node, int rows, const char* key) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, rows);
    if (node.is_null()) return m;
    if (node.is_number()) {
        if (rows != 1) throw ConfigError(std::string("coefficient: '") + key + "' must be a matrix");
        m(0, 0) = node.get<double>();
        return m;
    }
    if (!node.is_array() || int(node.size()) != rows)
        throw ConfigError(std::string("coefficient: '") + key + "' must have " +
                          std::to_string(rows) + " rows");
    for (int r = 0; r < rows; ++r) {
        const json& row = node[std::size_t(r)];
        if (!row.is_array() || int(row.size()) != rows)
            throw ConfigError(std::string("coefficient: '") + key + "' must be square");
        for (int c = 0; c < rows; ++c) m(r, c) = row[std::size_t(c)].get<double>();
    }
    return m;
}

int default_sampling_points(int max_frequency) {
    int n = std::max(64, 4 * max_frequency + 4);
    return n + (n % 2);
}

} // namespace

CoefficientCell parse_coefficient(const std::string& json_text, CoefficientKind kind,
                                  int sampling_points) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("coefficient: invalid JSON: ") + e.what());
    }
    if (!doc.is_array() || doc.empty()) throw ConfigError("coefficient: expected a non-empty list");

    int dimension = -1;
    std::vector<CoefficientTerm> terms;
    int max_frequency = 0;
    try {
        for (const auto& entry : doc) {
            const auto& freq = entry.at("freq");
            if (!freq.is_array() || freq.empty() || freq.size() > 2)
                throw ConfigError("coefficient: 'freq' must list 1 or 2 integers");
            const int d = int(freq.size());
            if (dimension < 0) dimension = d;
            if (d != dimension) throw ConfigError("coefficient: inconsistent frequency lengths");
            Mode k{freq[0].get<int>(), d == 2 ? freq[1].get<int>() : 0};
            max_frequency = std::max({max_frequency, std::abs(k[0]), std::abs(k[1])});
            const int rows = kind == CoefficientKind::matrix ? d : 1;
            const Eigen::MatrixXd re = read_block(entry.contains("re") ? entry["re"] : json(), rows, "re");
            const Eigen::MatrixXd im =
                read_block(entry.contains("im") ? entry["im"] : json(), rows, "im");
            Eigen::MatrixXcd amplitude(rows, rows);
            amplitude.real() = re;
            amplitude.imag() = im;
            terms.push_back({k, amplitude});
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("coefficient: malformed entry: ") + e.what());
    }
    const int n = sampling_points > 0 ? sampling_points : default_sampling_points(max_frequency);
    return CoefficientCell(kind, dimension, std::move(terms), CellGrid(dimension, n));
}

CoefficientCell load_coefficient(const std::string& path, CoefficientKind kind,
                                 int sampling_points) {
    std::ifstream in(path);
    if (!in) throw ConfigError("coefficient: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_coefficient(buffer.str(), kind, sampling_points);
}

std::string coefficient_to_json(const CoefficientCell& c) {
    json doc = json::array();
    for (const auto& t : c.terms()) {
        json entry;
        entry["freq"] = c.dimension() == 1 ? json::array({t.frequency[0]})
                                           : json::array({t.frequency[0], t.frequency[1]});
        json re = json::array(), im = json::array();
        for (int r = 0; r < t.amplitude.rows(); ++r) {
            json rr = json::array(), ii = json::array();
            for (int col = 0; col < t.amplitude.cols(); ++col) {
                rr.push_back(t.amplitude(r, col).real());
                ii.push_back(t.amplitude(r, col).imag());
            }
            re.push_back(rr);
            im.push_back(ii);
        }
        entry["re"] = re;
        entry["im"] = im;
        doc.push_back(entry);
    }
    return doc.dump(2);
}

} // namespace homoglab::torus
