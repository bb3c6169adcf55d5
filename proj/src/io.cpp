#include "hmlab/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hmlab/errors.hpp"

namespace hmlab {

namespace {

constexpr char kMagic[8] = {'H', 'M', 'L', 'F', 'I', 'E', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "raw dumps are written little-endian");

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error("truncated field file");
    return v;
}

// Non-finite values have no JSON literal; they are written as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json report_to_json(const ExperimentReport& r) {
    Json j;
    j["experiment"] = r.experiment;
    j["scenario"] = r.scenario;
    j["h"] = r.h;
    j["h_fine"] = r.h_fine;
    j["params"] = r.params;
    j["tables"] = Json::array();
    for (const auto& t : r.tables) {
        Json pts = Json::array();
        for (const auto& p : t.points) pts.push_back({{"x", number(p.x)}, {"y", number(p.y)}});
        j["tables"].push_back({{"name", t.name}, {"x_label", t.x_label}, {"y_label", t.y_label}, {"points", pts}});
    }
    j["constants"] = Json::object();
    for (const auto& [name, c] : r.constants)
        j["constants"][name] = {{"h", number(c.coarse)}, {"h_half", number(c.fine)}, {"drift", number(c.drift)},
                                {"band", c.band}, {"stable", c.stable()}};
    j["criteria"] = Json::array();
    for (const auto& c : r.criteria) j["criteria"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["notes"] = r.notes;
    j["pass"] = r.pass();
    j["seconds"] = r.seconds;
    return j;
}

std::string table_csv(const Table& t) {
    std::string s = "x,y\n";
    for (const auto& p : t.points) s += g17(p.x) + "," + g17(p.y) + "\n";
    return s;
}

std::string slug(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') out += c;
        else if (c == '=') out += '-';
        else out += '_';
    }
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

std::vector<std::string> write_report(const std::string& dir, const ExperimentReport& report) {
    std::vector<std::string> paths;
    std::string base = (std::filesystem::path(dir) / slug(report.experiment)).string();
    write_text(base + ".json", report_to_json(report).dump(2) + "\n");
    paths.push_back(base + ".json");
    for (const auto& t : report.tables) {
        std::string path = base + "__" + slug(t.name) + ".csv";
        write_text(path, table_csv(t));
        paths.push_back(path);
    }
    return paths;
}

void write_field(const std::string& path, const Grid& grid, const std::vector<double>& values, const std::string& format,
                 const std::string& name) {
    if (values.size() != grid.size()) throw ArgumentError("field size does not match the grid");
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const auto& d = grid.dims();
    if (format == "text") {
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path);
        out << "# hmlab field " << name << "\n";
        out << "# dim " << grid.dim() << "\n";
        out << "# dims " << d[0] << " " << d[1] << " " << d[2] << "\n";
        out << "# h " << g17(grid.h()) << "\n";
        out << "# origin " << g17(grid.origin()[0]) << " " << g17(grid.origin()[1]) << " " << g17(grid.origin()[2]) << "\n";
        for (double v : values) out << g17(v) << "\n";
    } else if (format == "raw") {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path);
        out.write(kMagic, sizeof kMagic);
        put<std::uint32_t>(out, kVersion);
        put<std::uint32_t>(out, std::uint32_t(grid.dim()));
        for (int i = 0; i < 3; ++i) put<std::int32_t>(out, d[i]);
        put<std::uint32_t>(out, 0);  // padding
        put<double>(out, grid.h());
        for (int i = 0; i < 3; ++i) put<double>(out, grid.origin()[i]);
        put<std::uint64_t>(out, values.size());
        char label[32] = {};
        std::memcpy(label, name.data(), std::min<std::size_t>(name.size(), sizeof label - 1));
        out.write(label, sizeof label);
        out.write(reinterpret_cast<const char*>(values.data()), std::streamsize(values.size() * sizeof(double)));
    } else {
        throw ConfigError("unknown field format '" + format + "'");
    }
}

FieldDump read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    FieldDump f;
    char magic[8];
    in.read(magic, sizeof magic);
    if (in && std::memcmp(magic, kMagic, sizeof magic) == 0) {
        if (take<std::uint32_t>(in) != kVersion) throw Error("unsupported field version");
        f.dim = int(take<std::uint32_t>(in));
        for (int i = 0; i < 3; ++i) f.dims[i] = take<std::int32_t>(in);
        take<std::uint32_t>(in);
        f.h = take<double>(in);
        for (int i = 0; i < 3; ++i) f.origin[i] = take<double>(in);
        auto count = take<std::uint64_t>(in);
        char label[32];
        in.read(label, sizeof label);
        f.name.assign(label, strnlen(label, sizeof label));
        f.values.resize(count);
        in.read(reinterpret_cast<char*>(f.values.data()), std::streamsize(count * sizeof(double)));
        if (!in) throw Error("truncated field file");
        return f;
    }
    in.clear();
    in.seekg(0);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "hmlab") ls >> key >> f.name;
            else if (key == "dim") ls >> f.dim;
            else if (key == "dims") ls >> f.dims[0] >> f.dims[1] >> f.dims[2];
            else if (key == "h") ls >> f.h;
            else if (key == "origin") ls >> f.origin[0] >> f.origin[1] >> f.origin[2];
            continue;
        }
        f.values.push_back(std::stod(line));
    }
    return f;
}

}  // namespace hmlab
