#include "vortexpacket/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace vortex {

static_assert(std::endian::native == std::endian::little,
              "VPGRID01 files are little-endian; big-endian hosts are not supported");

namespace {

void fmt17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
    return f;
}

}  // namespace

void write_trajectory_csv(const std::vector<TrajectoryPoint>& points, const std::string& path) {
    std::string body =
        "t,r_x,r_y,r_z,p_x,p_y,p_z,l_x,l_y,l_z,helicity,theta_dyn,theta_dirac,theta_berry,"
        "energy,D\n";
    for (const auto& pt : points) {
        const double cols[16] = {pt.t,       pt.r.x,         pt.r.y,         pt.r.z,
                                 pt.p.x,     pt.p.y,         pt.p.z,         pt.l_vec.x,
                                 pt.l_vec.y, pt.l_vec.z,     pt.helicity,    pt.theta_dyn,
                                 pt.theta_dirac, pt.theta_berry, pt.energy,  pt.dos};
        for (int i = 0; i < 16; ++i) {
            if (i) body += ',';
            fmt17(body, cols[i]);
        }
        body += '\n';
    }
    auto f = open_out(path, std::ios::binary);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw Error(ErrorCode::io_error, "write failed: " + path);
}

std::vector<TrajectoryPoint> read_trajectory_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::io_error, "cannot open for reading: " + path);
    std::string line;
    if (!std::getline(f, line)) throw Error(ErrorCode::io_error, "empty trajectory file: " + path);
    std::vector<TrajectoryPoint> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::array<double, 16> c{};
        std::stringstream ss(line);
        std::string item;
        int i = 0;
        while (std::getline(ss, item, ',') && i < 16) c[i++] = std::strtod(item.c_str(), nullptr);
        if (i != 16)
            throw Error(ErrorCode::io_error, "trajectory row with wrong column count in " + path);
        TrajectoryPoint pt;
        pt.t = c[0];
        pt.r = {c[1], c[2], c[3]};
        pt.p = {c[4], c[5], c[6]};
        pt.l_vec = {c[7], c[8], c[9]};
        pt.helicity = c[10];
        pt.theta_dyn = c[11];
        pt.theta_dirac = c[12];
        pt.theta_berry = c[13];
        pt.energy = c[14];
        pt.dos = c[15];
        out.push_back(pt);
    }
    return out;
}

void write_grid_csv(const GridField& grid, const CurrentField& current, const std::string& path) {
    if (current.density.size() != grid.values.size())
        throw Error(ErrorCode::grid_mismatch, "write_grid_csv: current field size mismatch");
    std::string body = "x,y,re_u,im_u,rho,j_x,j_y,j_z\n";
    const int n = grid.grid_n;
    for (int iy = 0; iy < n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const size_t k = static_cast<size_t>(iy) * n + ix;
            const double cols[8] = {grid.coord(ix),          y,
                                    grid.values[k].real(),   grid.values[k].imag(),
                                    current.density[k],      current.exact[k].x,
                                    current.exact[k].y,      current.exact[k].z};
            for (int i = 0; i < 8; ++i) {
                if (i) body += ',';
                fmt17(body, cols[i]);
            }
            body += '\n';
        }
    }
    auto f = open_out(path, std::ios::binary);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw Error(ErrorCode::io_error, "write failed: " + path);
}

namespace {
constexpr char kGridMagic[8] = {'V', 'P', 'G', 'R', 'I', 'D', '0', '1'};
}

void write_grid_binary(const GridField& grid, const std::string& path) {
    auto f = open_out(path, std::ios::binary);
    char header[32] = {};
    std::memcpy(header, kGridMagic, 8);
    const std::uint32_t n = static_cast<std::uint32_t>(grid.grid_n);
    std::memcpy(header + 8, &n, 4);  // bytes 12..15 stay reserved/zero
    std::memcpy(header + 16, &grid.extent, 8);
    std::memcpy(header + 24, &grid.tau, 8);
    f.write(header, 32);
    f.write(reinterpret_cast<const char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * sizeof(std::complex<double>)));
    if (!f) throw Error(ErrorCode::io_error, "write failed: " + path);
}

GridField read_grid_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot open for reading: " + path);
    char header[32];
    f.read(header, 32);
    if (!f || std::memcmp(header, kGridMagic, 8) != 0)
        throw Error(ErrorCode::io_error, "not a VPGRID01 file: " + path);
    GridField grid;
    std::uint32_t n = 0;
    std::memcpy(&n, header + 8, 4);
    std::memcpy(&grid.extent, header + 16, 8);
    std::memcpy(&grid.tau, header + 24, 8);
    if (n == 0 || n > (1u << 16))
        throw Error(ErrorCode::io_error, "unreasonable grid size in " + path);
    grid.grid_n = static_cast<int>(n);
    grid.values.resize(static_cast<size_t>(n) * n);
    f.read(reinterpret_cast<char*>(grid.values.data()),
           static_cast<std::streamsize>(grid.values.size() * sizeof(std::complex<double>)));
    if (!f) throw Error(ErrorCode::io_error, "truncated VPGRID01 file: " + path);
    return grid;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    auto f = open_out(path, std::ios::binary);
    for (const auto& [key, value] : entries) f << key << " = " << value << "\n";
    if (!f) throw Error(ErrorCode::io_error, "write failed: " + path);
}

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                           const std::string& label) {
    if (xs.size() != ys.size())
        throw Error(ErrorCode::invalid_argument, "SvgPlot: x/y size mismatch");
    lines_.push_back({xs, ys, label});
}

void SvgPlot::add_segments(const std::vector<std::array<double, 4>>& segs,
                           const std::string& color) {
    segments_.emplace_back(segs, color);
}

void SvgPlot::save(const std::string& path) const {
    constexpr double w = 820.0, h = 600.0;
    constexpr double ml = 80.0, mr = 140.0, mt = 48.0, mb = 64.0;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    auto expand = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const auto& ln : lines_)
        for (size_t i = 0; i < ln.xs.size(); ++i) expand(ln.xs[i], ln.ys[i]);
    for (const auto& [segs, color] : segments_)
        for (const auto& s : segs) {
            expand(s[0], s[1]);
            expand(s[2], s[3]);
        }
    if (!(xmax > xmin)) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if (!(ymax > ymin)) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double sx = (w - ml - mr) / (xmax - xmin);
    const double sy = (h - mt - mb) / (ymax - ymin);
    auto px = [&](double x) { return ml + (x - xmin) * sx; };
    auto py = [&](double y) { return h - mb - (y - ymin) * sy; };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };

    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                     "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title_ << "</text>\n";
    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
        << h - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        svg << "<line x1=\"" << px(fx) << "\" y1=\"" << h - mb << "\" x2=\"" << px(fx)
            << "\" y2=\"" << h - mb + 6 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(fx) << "\" y=\"" << h - mb + 22
            << "\" text-anchor=\"middle\" font-size=\"12\">" << num(fx) << "</text>\n";
        svg << "<line x1=\"" << ml - 6 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml << "\" y2=\""
            << py(fy) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml - 10 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\" font-size=\"12\">" << num(fy) << "</text>\n";
    }
    svg << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 16
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label_ << "</text>\n";
    svg << "<text x=\"20\" y=\"" << (mt + h - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
        << (mt + h - mb) / 2 << ")\">" << y_label_ << "</text>\n";

    for (const auto& [segs, color] : segments_) {
        svg << "<g stroke=\"" << color << "\" stroke-width=\"1\">\n";
        for (const auto& s : segs)
            svg << "<line x1=\"" << px(s[0]) << "\" y1=\"" << py(s[1]) << "\" x2=\"" << px(s[2])
                << "\" y2=\"" << py(s[3]) << "\"/>\n";
        svg << "</g>\n";
    }
    for (size_t li = 0; li < lines_.size(); ++li) {
        const auto& ln = lines_[li];
        const char* color = kPalette[li % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < ln.xs.size(); ++i)
            svg << px(ln.xs[i]) << "," << py(ln.ys[i]) << " ";
        svg << "\"/>\n";
        const double ly = mt + 18.0 * li;
        svg << "<line x1=\"" << w - mr + 8 << "\" y1=\"" << ly << "\" x2=\"" << w - mr + 32
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << w - mr + 38 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
            << ln.label << "</text>\n";
    }
    svg << "</svg>\n";

    auto f = open_out(path, std::ios::binary);
    const std::string body = svg.str();
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw Error(ErrorCode::io_error, "write failed: " + path);
}

}  // namespace vortex
