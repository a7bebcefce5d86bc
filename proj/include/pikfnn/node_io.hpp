#pragma once

// Node files: a header line
//
//   # dim=<d> time=<0|1> normals=<0|1> kind_col=<0|1>
//
// then one comma-separated row per node: coordinates, [time], [normal
// components], [kind D|N|I|R], value. Blank lines and further '#' lines are
// skipped. Values are written with 17 significant digits so a write/load
// round trip is bit-exact.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "pikfnn/geometry.hpp"

namespace pikfnn {

struct NodeFileLayout {
    int dim = 2;
    bool time = false;
    bool normals = false;
    bool kind_col = false;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline NodeFileLayout parse_header(const std::string& line, int lineno) {
    NodeFileLayout layout;
    std::istringstream is(line.substr(1));
    std::string tok;
    bool have_dim = false;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) {
            throw ParseError("malformed header token '" + tok + "'", lineno);
        }
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        int v = 0;
        auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
        if (ec != std::errc() || p != val.data() + val.size()) {
            throw ParseError("header value for '" + key + "' is not an integer", lineno);
        }
        if (key == "dim") {
            if (v < 1 || v > kMaxDim) {
                throw ParseError("header dim must be 1..4", lineno);
            }
            layout.dim = v;
            have_dim = true;
        } else if (key == "time" || key == "normals" || key == "kind_col") {
            if (v != 0 && v != 1) {
                throw ParseError("header flag '" + key + "' must be 0 or 1", lineno);
            }
            (key == "time" ? layout.time : key == "normals" ? layout.normals : layout.kind_col) = v == 1;
        } else {
            throw ParseError("unknown header key '" + key + "'", lineno);
        }
    }
    if (!have_dim) {
        throw ParseError("header is missing dim=", lineno);
    }
    return layout;
}

inline double parse_field(const std::string& text, int lineno) {
    const auto t = trim(text);
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) {
        throw ParseError("invalid number '" + t + "'", lineno);
    }
    return v;
}

inline std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Parse a node file. Rows without a kind column are Dirichlet rows.
inline CollocationSet read_nodes(std::istream& in) {
    std::string line;
    int lineno = 0;
    NodeFileLayout layout;
    bool have_header = false;
    CollocationSet set;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = detail::trim(line);
        if (t.empty()) {
            continue;
        }
        if (t[0] == '#') {
            if (!have_header) {
                layout = detail::parse_header(t, lineno);
                have_header = true;
                set.dim = layout.dim;
            }
            continue;
        }
        if (!have_header) {
            throw ParseError("missing '# dim=...' header before the first row", lineno);
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream row(t);
        while (std::getline(row, field, ',')) {
            fields.push_back(field);
        }
        const std::size_t expected = static_cast<std::size_t>(layout.dim) * (layout.normals ? 2 : 1) +
                                     (layout.time ? 1 : 0) + (layout.kind_col ? 1 : 0) + 1;
        if (fields.size() != expected) {
            throw ParseError("expected " + std::to_string(expected) + " fields, found " + std::to_string(fields.size()),
                             lineno);
        }
        Node n;
        n.dim = layout.dim;
        std::size_t f = 0;
        for (int d = 0; d < layout.dim; ++d) {
            n.x[static_cast<std::size_t>(d)] = detail::parse_field(fields[f++], lineno);
        }
        if (layout.time) {
            n.has_t = true;
            n.t = detail::parse_field(fields[f++], lineno);
        }
        if (layout.normals) {
            n.has_normal = true;
            double n2 = 0.0;
            for (int d = 0; d < layout.dim; ++d) {
                const double c = detail::parse_field(fields[f++], lineno);
                n.normal[static_cast<std::size_t>(d)] = c;
                n2 += c * c;
            }
            if (std::abs(std::sqrt(n2) - 1.0) > 1e-8) {
                throw ValidationError("line " + std::to_string(lineno) + ": normal is not unit length");
            }
        }
        ConditionKind kind = ConditionKind::Dirichlet;
        if (layout.kind_col) {
            const auto k = detail::trim(fields[f++]);
            if (k == "D") {
                kind = ConditionKind::Dirichlet;
            } else if (k == "N") {
                kind = ConditionKind::Neumann;
            } else if (k == "I") {
                kind = ConditionKind::Initial;
            } else if (k == "R") {
                kind = ConditionKind::InteriorResidual;
            } else {
                throw ParseError("unknown row kind '" + k + "' (expected D, N, I or R)", lineno);
            }
        }
        if (kind == ConditionKind::Neumann && !layout.normals) {
            throw ValidationError("line " + std::to_string(lineno) + ": Neumann row without normals");
        }
        const double value = detail::parse_field(fields[f++], lineno);
        set.add(n, kind, value);
    }
    if (!have_header) {
        throw ParseError("empty node file", 0);
    }
    return set;
}

inline CollocationSet load_nodes(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open node file '" + path + "'");
    }
    return read_nodes(in);
}

/// Layout that can represent every row of `set`.
inline NodeFileLayout layout_for(const CollocationSet& set) {
    NodeFileLayout l;
    l.dim = set.dim;
    for (std::size_t i = 0; i < set.size(); ++i) {
        l.time = l.time || set.nodes[i].has_t;
        l.normals = l.normals || set.nodes[i].has_normal;
        l.kind_col = l.kind_col || set.kinds[i] != ConditionKind::Dirichlet;
    }
    return l;
}

inline void write_nodes(std::ostream& out, const CollocationSet& set) {
    const auto l = layout_for(set);
    out << "# dim=" << l.dim << " time=" << (l.time ? 1 : 0) << " normals=" << (l.normals ? 1 : 0)
        << " kind_col=" << (l.kind_col ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& n = set.nodes[i];
        if (l.normals && !n.has_normal) {
            throw ValidationError("write_nodes: row " + std::to_string(i) + " has no normal");
        }
        std::string row;
        for (int d = 0; d < l.dim; ++d) {
            row += (d ? "," : "") + detail::format17(n.x[static_cast<std::size_t>(d)]);
        }
        if (l.time) {
            row += "," + detail::format17(n.t);
        }
        if (l.normals) {
            for (int d = 0; d < l.dim; ++d) {
                row += "," + detail::format17(n.normal[static_cast<std::size_t>(d)]);
            }
        }
        if (l.kind_col) {
            row += ',';
            row += to_char(set.kinds[i]);
        }
        row += "," + detail::format17(set.values[i]);
        out << row << '\n';
    }
}

inline void save_nodes(const std::string& path, const CollocationSet& set) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write node file '" + path + "'");
    }
    write_nodes(out, set);
}

} // namespace pikfnn
