#ifndef FFB_IO_HPP
#define FFB_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ffb/common.hpp"
#include "ffb/grid.hpp"

#include <json.hpp>

namespace ffb {

// 17 significant digits guarantee double round-trips through text.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw error("CsvWriter: cannot open " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            out_ << (i ? "," : "") << fmt_double(vals[i]);
        out_ << "\n";
    }
    void row_mixed(const std::vector<std::string>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            out_ << (i ? "," : "") << vals[i];
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

// Field CSV (x,y,value) with a JSON sidecar carrying the grid metadata.
inline void write_field(const Field& u, const std::filesystem::path& csv_path) {
    const Grid& g = u.grid();
    CsvWriter csv(csv_path, g.n() == 2 ? std::vector<std::string>{"x1", "x2", "y", "value"}
                                       : std::vector<std::string>{"x", "y", "value"});
    for (std::size_t p = 0; p < g.node_count(); ++p) {
        if (!g.active(p)) continue;
        auto X = g.position(p);
        if (g.n() == 2)
            csv.row({X[0], X[1], X[2], u[p]});
        else
            csv.row({X[0], X[2], u[p]});
    }
    nlohmann::ordered_json meta;
    meta["nx"] = g.config().nx;
    meta["ny"] = g.config().ny;
    meta["n"] = g.n();
    meta["a"] = g.a();
    meta["grading"] = g.config().grading;
    meta["halfwidth"] = g.config().halfwidth;
    meta["height"] = g.config().height;
    meta["shape"] = g.config().shape == DomainShape::HalfBall ? "half_ball" : "half_box";
    if (g.config().shape == DomainShape::HalfBall) meta["ball_radius"] = g.config().ball_radius;
    std::ofstream side(csv_path.string() + ".json");
    side << meta.dump(2) << "\n";
}

inline void write_profile_csv(const std::vector<double>& r, const std::vector<double>& v,
                              const std::filesystem::path& path,
                              const std::string& xname = "r",
                              const std::string& yname = "value") {
    CsvWriter csv(path, {xname, yname});
    for (std::size_t i = 0; i < r.size(); ++i) csv.row({r[i], v[i]});
}

// gnuplot-ready two-column data
inline void write_dat(const std::vector<double>& x, const std::vector<double>& y,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw error("write_dat: cannot open " + path.string());
    for (std::size_t i = 0; i < x.size(); ++i)
        out << fmt_double(x[i]) << " " << fmt_double(y[i]) << "\n";
}

inline void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw error("write_json: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

} // namespace ffb

#endif
