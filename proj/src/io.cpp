// Field and table I/O: CSV for 1D fields, PGM P2 plus a JSON sidecar for 2D
// fields, pair CSV for tabulated weights, and plot-ready column dumps.
#include "nlgrad/io.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nlgrad {
namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open for reading: " + path);
    return in;
}

bool blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

double parse_double(const std::string& token, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(token, &used);
        while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
        if (used != token.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw config_error(where + ": bad number '" + token + "'");
    }
}

}  // namespace

void write_field_csv(const std::string& path, const ScalarField& u) {
    const DomainGrid& g = u.grid();
    if (g.dim() != 1) throw config_error("write_field_csv: 1D fields only; use the PGM writer for 2D");
    std::ofstream out = open_out(path);
    out << "# field 1d\n";
    out << "# n " << g.extent(0) << "\n";
    out << "# length " << fmt17(g.spacing(0) * static_cast<double>(g.extent(0))) << "\n";
    out << "# origin " << fmt17(g.origin(0)) << "\n";
    for (std::size_t i = 0; i < u.size(); ++i) out << fmt17(u[i]) << "\n";
    if (!out) throw config_error("write failed: " + path);
}

FieldFile read_field_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::size_t n = 0;
    double length = 1.0, origin = 0.0;
    bool have_n = false;
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        if (line.rfind("# n ", 0) == 0) {
            n = static_cast<std::size_t>(parse_double(line.substr(4), where));
            have_n = true;
            continue;
        }
        if (line.rfind("# length ", 0) == 0) {
            length = parse_double(line.substr(9), where);
            continue;
        }
        if (line.rfind("# origin ", 0) == 0) {
            origin = parse_double(line.substr(9), where);
            continue;
        }
        if (blank_or_comment(line)) continue;
        values.push_back(parse_double(line, where));
    }
    if (!have_n) n = values.size();
    if (n == 0 || values.size() != n)
        throw config_error(path + ": expected " + std::to_string(n) + " values, found " +
                           std::to_string(values.size()));
    FieldFile ff{DomainGrid::interval(n, length, origin), std::move(values)};
    return ff;
}

void write_field_pgm(const std::string& base, const ScalarField& u) {
    const DomainGrid& g = u.grid();
    if (g.dim() != 2) throw config_error("write_field_pgm: 2D fields only");
    double lo = u[0], hi = u[0];
    for (std::size_t i = 0; i < u.size(); ++i) {
        lo = std::min(lo, u[i]);
        hi = std::max(hi, u[i]);
    }
    const double span = (hi > lo) ? (hi - lo) : 1.0;
    const std::size_t n0 = g.extent(0), n1 = g.extent(1);

    std::ofstream img = open_out(base + ".pgm");
    img << "P2\n" << n1 << " " << n0 << "\n255\n";
    for (std::size_t i0 = 0; i0 < n0; ++i0) {
        for (std::size_t i1 = 0; i1 < n1; ++i1) {
            const double t = (u[g.flat(i0, i1)] - lo) / span;
            const long level = std::lround(255.0 * std::clamp(t, 0.0, 1.0));
            img << level << (i1 + 1 == n1 ? '\n' : ' ');
        }
    }
    if (!img) throw config_error("write failed: " + base + ".pgm");

    nlohmann::ordered_json side;
    side["format"] = "pgm-rescale";
    side["min"] = lo;
    side["max"] = hi;
    side["levels"] = 255;
    side["extent"] = {n0, n1};
    side["length"] = {g.spacing(0) * static_cast<double>(n0), g.spacing(1) * static_cast<double>(n1)};
    std::ofstream meta = open_out(base + ".json");
    meta << side.dump(2) << "\n";
    if (!meta) throw config_error("write failed: " + base + ".json");
}

FieldFile read_field_pgm(const std::string& pgm_path) {
    std::string base = pgm_path;
    if (base.size() > 4 && base.compare(base.size() - 4, 4, ".pgm") == 0) base.resize(base.size() - 4);

    nlohmann::ordered_json side;
    {
        std::ifstream meta = open_in(base + ".json");
        try {
            side = nlohmann::ordered_json::parse(meta);
        } catch (const std::exception& e) {
            throw config_error(base + ".json: " + e.what());
        }
    }
    if (!side.contains("min") || !side.contains("max") || !side.contains("extent") ||
        !side.contains("length"))
        throw config_error(base + ".json: missing rescale metadata");
    const double lo = side["min"].get<double>();
    const double hi = side["max"].get<double>();
    const double span = (hi > lo) ? (hi - lo) : 1.0;

    std::ifstream img = open_in(pgm_path);
    std::string magic;
    img >> magic;
    if (magic != "P2") throw config_error(pgm_path + ": expected plain PGM (P2)");
    std::size_t w = 0, h = 0;
    long maxval = 0;
    img >> w >> h >> maxval;
    if (!img || w == 0 || h == 0 || maxval != 255)
        throw config_error(pgm_path + ": bad PGM header");
    if (h != side["extent"][0].get<std::size_t>() || w != side["extent"][1].get<std::size_t>())
        throw config_error(pgm_path + ": image size disagrees with sidecar extent");

    std::vector<double> values(w * h);
    for (std::size_t i = 0; i < values.size(); ++i) {
        long level = 0;
        img >> level;
        if (!img || level < 0 || level > 255) throw config_error(pgm_path + ": bad pixel data");
        values[i] = lo + span * (static_cast<double>(level) / 255.0);
    }
    FieldFile ff{DomainGrid::box2d(h, w, side["length"][0].get<double>(), side["length"][1].get<double>()),
                 std::move(values)};
    return ff;
}

std::pair<std::size_t, std::vector<double>> read_pair_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::size_t> is, js;
    std::vector<double> vs;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank_or_comment(line)) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        long i = -1, j = -1;
        double v = 0.0;
        if (!(ss >> i >> j >> v) || i < 0 || j < 0)
            throw config_error(where + ": expected 'i,j,value'");
        std::string rest;
        if (ss >> rest) throw config_error(where + ": trailing junk '" + rest + "'");
        is.push_back(static_cast<std::size_t>(i));
        js.push_back(static_cast<std::size_t>(j));
        vs.push_back(v);
        n = std::max(n, static_cast<std::size_t>(std::max(i, j)) + 1);
    }
    if (n == 0) throw config_error(path + ": no pair entries");
    std::vector<double> table(n * n, 0.0);
    for (std::size_t k = 0; k < vs.size(); ++k) table[is[k] * n + js[k]] = vs[k];
    return {n, std::move(table)};
}

void write_table_csv(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path);
    out << "#";
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : " ") << columns[c];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << fmt17(row[c]);
        out << "\n";
    }
    if (!out) throw config_error("write failed: " + path);
}

void emit_plotdata(const std::string& path, const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << fmt17(row[c]);
        out << "\n";
    }
    if (!out) throw config_error("write failed: " + path);
}

std::uint64_t fnv1a(const void* data, std::size_t bytes) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string field_digest(const ScalarField& u) {
    const std::uint64_t h = fnv1a(u.data(), u.size() * sizeof(double));
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nlgrad
