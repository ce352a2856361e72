#include "weakident/dataset_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "weakident/errors.hpp"
#include "weakident/kvfile.hpp"

namespace weakident {

namespace {

std::string strip_widh(const std::string& path) {
    const std::string ext = ".widh";
    if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
        return path.substr(0, path.size() - ext.size());
    return path;
}

void write_payload(const std::string& path, const Eigen::ArrayXd& field) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("format", "cannot write '" + path + "'");
    std::uint8_t bytes[8];
    for (Eigen::Index i = 0; i < field.size(); ++i) {
        std::uint64_t bits;
        const double v = field[i];
        std::memcpy(&bits, &v, 8);
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff);
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
    if (!out) throw InputError("format", "write failed for '" + path + "'");
}

Eigen::ArrayXd read_payload(const std::string& path, std::int64_t expected) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw InputError("format", "cannot open '" + path + "'");
    const std::int64_t size_bytes = static_cast<std::int64_t>(in.tellg());
    if (size_bytes != expected * 8)
        throw InputError("size", "payload '" + path + "' holds " + std::to_string(size_bytes / 8) +
                                     " values, expected " + std::to_string(expected));
    in.seekg(0);
    Eigen::ArrayXd field(expected);
    std::uint8_t bytes[8];
    for (std::int64_t i = 0; i < expected; ++i) {
        in.read(reinterpret_cast<char*>(bytes), 8);
        if (!in) throw InputError("size", "truncated payload '" + path + "'");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        double v;
        std::memcpy(&v, &bits, 8);
        field[i] = v;
    }
    return field;
}

} // namespace

void save_dataset(const ObservationSet& data, const std::string& prefix_in) {
    data.validate();
    const std::string prefix = strip_widh(prefix_in);
    const GridSpec& g = data.grid;
    const std::vector<std::string> names =
        data.var_names.empty() ? default_var_names(data.num_vars(), g.spatial_dims)
                               : data.var_names;

    KvFile kv;
    kv.set("format_version", "1");
    kv.set("num_vars", std::to_string(data.num_vars()));
    kv.set("spatial_dims", std::to_string(g.spatial_dims));
    if (g.spatial_dims >= 1) {
        kv.set("nx", std::to_string(g.nx[0]));
        kv.set("dx", format_double(g.dx[0]));
        kv.set("x0", format_double(g.x0[0]));
    }
    if (g.spatial_dims == 2) {
        kv.set("ny", std::to_string(g.nx[1]));
        kv.set("dy", format_double(g.dx[1]));
        kv.set("y0", format_double(g.x0[1]));
    }
    kv.set("nt", std::to_string(g.nt));
    kv.set("dt", format_double(g.dt));
    kv.set("t0", format_double(g.t0));
    std::string joined;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) joined += ",";
        joined += names[i];
    }
    kv.set("vars", joined);

    std::ofstream header(prefix + ".widh", std::ios::binary | std::ios::trunc);
    if (!header) throw InputError("format", "cannot write '" + prefix + ".widh'");
    header << kv.serialize();
    header.close();

    for (int v = 0; v < data.num_vars(); ++v)
        write_payload(prefix + "." + names[static_cast<std::size_t>(v)] + ".widb",
                      data.values[static_cast<std::size_t>(v)]);
}

ObservationSet load_dataset(const std::string& path) {
    const std::string prefix = strip_widh(path);
    const KvFile kv = KvFile::parse_file(prefix + ".widh");

    if (kv.get_int("format_version") != 1)
        throw InputError("format", "unsupported format_version");

    ObservationSet data;
    GridSpec& g = data.grid;
    const long nv = kv.get_int("num_vars");
    g.spatial_dims = static_cast<int>(kv.get_int("spatial_dims"));
    if (nv < 1) throw InputError("format", "num_vars must be >= 1");
    if (g.spatial_dims < 0 || g.spatial_dims > 2)
        throw InputError("format", "spatial_dims must be 0, 1 or 2");
    if (g.spatial_dims >= 1) {
        g.nx[0] = static_cast<int>(kv.get_int("nx"));
        g.dx[0] = kv.get_double("dx");
        g.x0[0] = kv.get_double("x0");
    }
    if (g.spatial_dims == 2) {
        g.nx[1] = static_cast<int>(kv.get_int("ny"));
        g.dx[1] = kv.get_double("dy");
        g.x0[1] = kv.get_double("y0");
    }
    g.nt = static_cast<int>(kv.get_int("nt"));
    g.dt = kv.get_double("dt");
    g.t0 = kv.has("t0") ? kv.get_double("t0") : 0.0;
    try {
        g.validate();
    } catch (const InputError& e) {
        throw InputError("format", e.what());
    }

    const std::string vars = kv.get("vars");
    std::size_t start = 0;
    while (start <= vars.size()) {
        const auto comma = vars.find(',', start);
        const std::string name =
            comma == std::string::npos ? vars.substr(start) : vars.substr(start, comma - start);
        if (name.empty()) throw InputError("format", "empty variable name");
        data.var_names.push_back(name);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (static_cast<long>(data.var_names.size()) != nv)
        throw InputError("format", "vars list does not match num_vars");

    for (const std::string& name : data.var_names)
        data.values.push_back(read_payload(prefix + "." + name + ".widb", g.total_points()));

    data.validate();
    return data;
}

} // namespace weakident
