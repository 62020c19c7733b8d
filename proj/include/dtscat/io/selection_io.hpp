#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dtscat/featsel/ols.hpp"
#include "dtscat/io/binary.hpp"

namespace dtscat::io {

// Textual selection format, one line per class:
//   class <id> indices <i...> residual <r>
//   union indices <i...>

inline void save_selection(const std::filesystem::path& path,
                           const featsel::OlsSelection& sel) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "# dtscat selection v1\n";
    for (const auto& c : sel.per_class) {
        out << "class " << c.class_id << " indices";
        for (int i : c.indices) out << ' ' << i;
        double resid = c.residual_history.empty() ? 0.0 : c.residual_history.back();
        out << " residual " << resid;
        if (c.exhausted) out << " exhausted";
        out << '\n';
    }
    out << "union indices";
    for (int i : sel.union_indices) out << ' ' << i;
    out << '\n';
    file.commit();
}

inline featsel::OlsSelection load_selection(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("selection: cannot open " + path.string());
    featsel::OlsSelection sel;
    std::string line;
    bool saw_union = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "class") {
            featsel::OlsClassSelection c;
            std::string word;
            ss >> c.class_id >> word;
            if (word != "indices") throw data_error("selection: malformed class line");
            while (ss >> word) {
                if (word == "residual") {
                    double r;
                    ss >> r;
                    c.residual_history.push_back(r);
                } else if (word == "exhausted") {
                    c.exhausted = true;
                } else {
                    c.indices.push_back(std::stoi(word));
                }
            }
            sel.per_class.push_back(std::move(c));
        } else if (tag == "union") {
            std::string word;
            ss >> word;
            int idx;
            while (ss >> idx) sel.union_indices.push_back(idx);
            saw_union = true;
        } else {
            throw data_error("selection: unknown line tag '" + tag + "' in " + path.string());
        }
    }
    if (!saw_union) throw data_error("selection: missing union line in " + path.string());
    return sel;
}

}  // namespace dtscat::io
