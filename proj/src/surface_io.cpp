#include "jumpstop/surface_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace jumpstop {

std::string format_real(double v) {
    char buf[40];
    // %.17g round-trips every double; trim to the shortest form that does.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_surface_csv(std::ostream& os, const ValueSurface& surface, const std::string& source) {
    const SolverGrid& g = surface.grid;
    os << "t";
    for (int a = 0; a < g.dim; ++a) os << ",x" << (a + 1);
    os << ",value,control_index,stop";
    if (!source.empty()) os << ",source";
    os << "\n";
    size_t n = g.node_count();
    for (int k = 0; k <= g.nt; ++k) {
        std::string ts = format_real(g.time_at(k));
        for (size_t j = 0; j < n; ++j) {
            os << ts;
            Vec x = g.coords(j);
            for (int a = 0; a < g.dim; ++a) os << ',' << format_real(x[a]);
            os << ',' << format_real(surface.values[k][j]) << ',' << surface.argopt[k][j] << ','
               << int(surface.stop[k][j]);
            if (!source.empty()) os << ',' << source;
            os << "\n";
        }
    }
}

void write_surface_csv_file(const std::string& path, const ValueSurface& surface,
                            const std::string& source) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    write_surface_csv(out, surface, source);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

ValueSurface read_surface_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("surface csv: empty stream");
    auto header = split_csv(line);
    if (header.empty() || header[0] != "t") throw ParseError("surface csv: bad header");
    int dim = 0;
    while (1 + dim < static_cast<int>(header.size()) && header[1 + dim][0] == 'x' &&
           header[1 + dim] != "value")
        ++dim;
    if (dim < 1 || dim > 2) throw ParseError("surface csv: unsupported dimension");
    size_t vcol = 1 + dim, ccol = vcol + 1, scol = ccol + 1;
    if (header.size() <= scol || header[vcol] != "value")
        throw ParseError("surface csv: bad header columns");

    struct Row {
        double t;
        std::array<double, 2> x;
        double v;
        int32_t arg;
        uint8_t stop;
    };
    std::vector<Row> rows;
    std::vector<double> ts;
    std::array<std::vector<double>, 2> xs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() < scol + 1) throw ParseError("surface csv: short row");
        Row r{};
        r.t = std::strtod(f[0].c_str(), nullptr);
        for (int a = 0; a < dim; ++a) r.x[a] = std::strtod(f[1 + a].c_str(), nullptr);
        r.v = std::strtod(f[vcol].c_str(), nullptr);
        r.arg = static_cast<int32_t>(std::strtol(f[ccol].c_str(), nullptr, 10));
        r.stop = f[scol] == "1" ? 1 : 0;
        ts.push_back(r.t);
        for (int a = 0; a < dim; ++a) xs[a].push_back(r.x[a]);
        rows.push_back(r);
    }
    auto uniq = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(ts);
    for (int a = 0; a < dim; ++a) uniq(xs[a]);
    if (ts.size() < 2) throw ParseError("surface csv: need at least two time slices");

    ValueSurface surf;
    surf.grid.dim = dim;
    surf.grid.nt = static_cast<int>(ts.size()) - 1;
    surf.grid.t0 = ts.front();
    surf.grid.horizon = ts.back();
    for (int a = 0; a < dim; ++a) {
        surf.grid.lo[a] = xs[a].front();
        surf.grid.hi[a] = xs[a].back();
        surf.grid.nodes[a] = static_cast<int>(xs[a].size());
    }
    size_t n = surf.grid.node_count();
    surf.values.assign(surf.grid.nt + 1, Vec(n));
    surf.argopt.assign(surf.grid.nt + 1, std::vector<int32_t>(n, 0));
    surf.stop.assign(surf.grid.nt + 1, std::vector<uint8_t>(n, 0));
    auto locate = [](const std::vector<double>& v, double q) {
        auto it = std::lower_bound(v.begin(), v.end(), q);
        if (it != v.begin() && (it == v.end() || std::abs(*(it - 1) - q) < std::abs(*it - q)))
            --it;
        return static_cast<int>(it - v.begin());
    };
    for (const auto& r : rows) {
        int k = locate(ts, r.t);
        int i0 = locate(xs[0], r.x[0]);
        int i1 = dim > 1 ? locate(xs[1], r.x[1]) : 0;
        size_t j = surf.grid.index(i0, i1);
        surf.values[k][j] = r.v;
        surf.argopt[k][j] = r.arg;
        surf.stop[k][j] = r.stop;
    }
    return surf;
}

ValueSurface read_surface_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + path);
    return read_surface_csv(in);
}

}  // namespace jumpstop
