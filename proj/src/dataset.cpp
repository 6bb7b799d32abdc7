#include "clsunbias/dataset.hpp"

#include "clsunbias/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace clsunbias {

void Dataset::validate() const {
    if (X.rows() != y.size()) {
        throw structural_error("dataset has " + std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) + " labels");
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0 && y[i] != 1) {
            throw domain_error("labels must be 0 or 1");
        }
    }
}

Dataset Dataset::subset(const std::vector<Eigen::Index> &indices) const {
    Dataset out;
    out.role = role;
    out.X.resize(static_cast<Eigen::Index>(indices.size()), X.cols());
    out.y.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        out.X.row(static_cast<Eigen::Index>(k)) = X.row(indices[k]);
        out.y[static_cast<Eigen::Index>(k)] = y[indices[k]];
    }
    return out;
}

void write_csv(const Dataset &ds, const std::filesystem::path &path) {
    ds.validate();
    std::ofstream out(path);
    if (!out) {
        throw io_error("cannot open " + path.string() + " for writing");
    }
    for (Eigen::Index j = 0; j < ds.num_features(); ++j) {
        out << 'f' << (j + 1) << ',';
    }
    out << "label\n";
    char buf[32];
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        for (Eigen::Index j = 0; j < ds.num_features(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.9g", ds.X(i, j));
            out << buf << ',';
        }
        out << ds.y[i] << '\n';
    }
    if (!out) {
        throw io_error("write failed: " + path.string());
    }
}

Dataset read_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw io_error(path.string() + ": empty file");
    }
    std::size_t columns = 1;
    for (const char c : line) {
        columns += c == ',' ? 1 : 0;
    }
    if (columns < 2 || line.substr(line.rfind(',') + 1) != "label") {
        throw io_error(path.string() + ": header must be f1,...,label");
    }
    const std::size_t features = columns - 1;

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            try {
                if (col < features) {
                    values.push_back(std::stod(cell));
                } else if (col == features) {
                    labels.push_back(std::stoi(cell));
                }
            } catch (const std::exception &) {
                throw io_error(path.string() + ":" + std::to_string(lineno) + ": cannot parse '" + cell + "'");
            }
            ++col;
        }
        if (col != columns) {
            throw io_error(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) + " fields");
        }
    }

    Dataset ds;
    const auto n = static_cast<Eigen::Index>(labels.size());
    ds.X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), n, static_cast<Eigen::Index>(features));
    ds.y = Eigen::Map<const LabelVector>(labels.data(), n);
    ds.role = path.stem().string();
    ds.validate();
    return ds;
}

}  // namespace clsunbias
