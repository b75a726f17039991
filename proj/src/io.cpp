#include "isoflex/io.hpp"

#include "isoflex/errors.hpp"

#include <fstream>
#include <sstream>

namespace isoflex {

using nlohmann::json;

json net_to_json(const QuadNet& net, const json& metadata) {
    json j;
    j["m"] = net.m();
    j["n"] = net.n();
    json verts = json::array();
    for (const Point3& p : net.vertices()) verts.push_back({p.x, p.y, p.z});
    j["vertices"] = std::move(verts);
    if (!metadata.is_null() && !metadata.empty()) j["metadata"] = metadata;
    return j;
}

QuadNet net_from_json(const json& j) {
    if (!j.contains("m") || !j.contains("n") || !j.contains("vertices"))
        throw ParseError("net json: required keys m, n, vertices");
    const int m = j.at("m").get<int>();
    const int n = j.at("n").get<int>();
    std::vector<Point3> verts;
    for (const auto& v : j.at("vertices")) {
        if (!v.is_array() || v.size() != 3) throw ParseError("net json: vertex must be [x,y,z]");
        verts.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
    }
    if (verts.size() != static_cast<std::size_t>((m + 1) * (n + 1)))
        throw ParseError("net json: vertex count must be (m+1)(n+1)");
    return QuadNet(m, n, std::move(verts));
}

NetFile read_net(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("json parse error in " + path + ": " + e.what());
    }
    NetFile f{net_from_json(j), j.value("metadata", json::object())};
    return f;
}

void write_net(const std::string& path, const QuadNet& net, const json& metadata) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << net_to_json(net, metadata).dump(2) << "\n";
}

json lnet_to_json(const WideLShapedNet& l) {
    json j;
    j["m"] = l.m;
    j["n"] = l.n;
    json verts = json::array();
    for (int i = 0; i <= l.m; ++i)
        for (int jj = 0; jj <= l.n; ++jj) {
            if (WideLShapedNet::covered(i, jj)) {
                const Vec3& p = l.verts.at(i, jj);
                verts.push_back({p.x, p.y, p.z});
            } else {
                verts.push_back(nullptr);
            }
        }
    j["vertices"] = std::move(verts);
    return j;
}

WideLShapedNet lnet_from_json(const json& j) {
    WideLShapedNet l;
    l.m = j.at("m").get<int>();
    l.n = j.at("n").get<int>();
    if (l.m < 2 || l.n < 2) throw ParseError("lnet json: m, n >= 2 required");
    const auto& verts = j.at("vertices");
    if (verts.size() != static_cast<std::size_t>((l.m + 1) * (l.n + 1)))
        throw ParseError("lnet json: vertex count must be (m+1)(n+1)");
    l.verts = VertexGrid(l.m + 1, l.n + 1);
    std::size_t idx = 0;
    for (int i = 0; i <= l.m; ++i)
        for (int jj = 0; jj <= l.n; ++jj, ++idx) {
            const auto& v = verts[idx];
            if (WideLShapedNet::covered(i, jj)) {
                if (!v.is_array() || v.size() != 3)
                    throw ParseError("lnet json: covered vertex must be [x,y,z]");
                l.verts.at(i, jj) = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
            }
        }
    return l;
}

WideLShapedNet read_lnet(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("json parse error in " + path + ": " + e.what());
    }
    return lnet_from_json(j);
}

void write_lnet(const std::string& path, const WideLShapedNet& l) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << lnet_to_json(l).dump(2) << "\n";
}

void write_obj(const std::string& path, const QuadNet& net) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out.precision(17);
    for (const Point3& p : net.vertices())
        out << "v " << p.x << " " << p.y << " " << p.z << "\n";
    const int n = net.n();
    auto vid = [&](int i, int j) { return i * (n + 1) + j + 1; };
    for (int i = 0; i < net.m(); ++i)
        for (int j = 0; j < n; ++j)
            out << "f " << vid(i, j) << " " << vid(i + 1, j) << " " << vid(i + 1, j + 1) << " "
                << vid(i, j + 1) << "\n";
}

json family_to_json(const DeformationFamily& fam) {
    json j;
    j["kind"] = family_kind_name(fam.kind);
    if (fam.kind != FamilyKind::Example2x2) {
        json a = json::array(), b = json::array();
        for (const Vec3& v : fam.data.a) a.push_back({v.x, v.y, v.z});
        for (const Vec3& v : fam.data.b) b.push_back({v.x, v.y, v.z});
        j["a"] = std::move(a);
        j["b"] = std::move(b);
        j["sigma"] = fam.data.sigma;
    }
    j["t_range"] = {fam.t0, fam.t1};
    return j;
}

DeformationFamily family_from_json(const json& j) {
    DeformationFamily fam;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "example2x2") {
        fam.kind = FamilyKind::Example2x2;
    } else if (kind == "cone-cylinder") {
        fam.kind = FamilyKind::ConeCylinder;
    } else if (kind == "generalized-t") {
        fam.kind = FamilyKind::GeneralizedT;
    } else {
        throw ParseError("family json: unknown kind '" + kind + "'");
    }
    if (fam.kind != FamilyKind::Example2x2) {
        for (const auto& v : j.at("a"))
            fam.data.a.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
        for (const auto& v : j.at("b"))
            fam.data.b.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
        fam.data.sigma = j.at("sigma").get<std::vector<double>>();
        fam.data.check();
    }
    if (j.contains("t_range")) {
        fam.t0 = j["t_range"][0].get<double>();
        fam.t1 = j["t_range"][1].get<double>();
    }
    return fam;
}

DeformationFamily read_family(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("json parse error in " + path + ": " + e.what());
    }
    return family_from_json(j);
}

void write_family(const std::string& path, const DeformationFamily& fam) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << family_to_json(fam).dump(2) << "\n";
}

CurveSamples read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    CurveSamples s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::vector<double> vals;
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (...) {
                throw ParseError("curve csv: bad number '" + cell + "' in " + path);
            }
        }
        if (vals.size() != 2 && vals.size() != 4)
            throw ParseError("curve csv: rows must be param,s or param,x,y,z");
        const int cols = static_cast<int>(vals.size()) - 1;
        if (s.columns == 0)
            s.columns = cols;
        else if (s.columns != cols)
            throw ParseError("curve csv: inconsistent column count");
        s.params.push_back(vals[0]);
        s.values.push_back({vals.begin() + 1, vals.end()});
    }
    if (s.params.size() < 3) throw ParseError("curve csv: need at least 3 samples");
    return s;
}

}  // namespace isoflex
