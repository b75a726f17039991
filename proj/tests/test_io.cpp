#include "isoflex/errors.hpp"
#include "isoflex/io.hpp"

#include <doctest.h>

#include "test_helpers.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace isoflex;
using namespace isoflex::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("isoflex_io_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("net json round trip is bit exact") {
    std::mt19937 rng(97);
    const QuadNet net = random_perturbed_net(3, 4, rng, 0.07);
    TempDir dir;
    const std::string path = (dir.path / "net.json").string();
    write_net(path, net, {{"generator", "test"}});
    const NetFile back = read_net(path);
    REQUIRE(back.net.m() == net.m());
    REQUIRE(back.net.n() == net.n());
    for (std::size_t k = 0; k < net.vertices().size(); ++k) {
        CHECK(back.net.vertices()[k].x == net.vertices()[k].x);
        CHECK(back.net.vertices()[k].y == net.vertices()[k].y);
        CHECK(back.net.vertices()[k].z == net.vertices()[k].z);
    }
    CHECK(back.metadata["generator"] == "test");
}

TEST_CASE("net json rejects malformed input") {
    TempDir dir;
    const std::string path = (dir.path / "bad.json").string();
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(read_net(path), ParseError);

    std::ofstream(path) << R"({"m":2,"n":2,"vertices":[[0,0,0]]})";
    CHECK_THROWS_AS(read_net(path), ParseError);
}

TEST_CASE("obj export uses grid order and 1-based quads") {
    const QuadNet net = paraboloid_net(2, 2);
    TempDir dir;
    const std::string path = (dir.path / "net.obj").string();
    write_obj(path, net);
    std::ifstream in(path);
    std::string line;
    int vcount = 0, fcount = 0;
    std::string first_face;
    std::vector<Vec3> verts;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) {
            ++vcount;
            std::istringstream ss(line.substr(2));
            Vec3 v;
            ss >> v.x >> v.y >> v.z;
            verts.push_back(v);
        } else if (line.rfind("f ", 0) == 0) {
            if (fcount == 0) first_face = line;
            ++fcount;
        }
    }
    CHECK(vcount == 9);
    CHECK(fcount == 4);
    CHECK(first_face == "f 1 4 5 2");
    CHECK((verts[4] - net.at(1, 1)).norm() == 0.0);  // row-major order
}

TEST_CASE("family json round trip") {
    std::mt19937 rng(101);
    DeformationFamily fam;
    fam.kind = FamilyKind::GeneralizedT;
    fam.data = random_t_data(3, 3, rng);
    fam.t0 = 0.0;
    fam.t1 = 0.75;
    TempDir dir;
    const std::string path = (dir.path / "fam.json").string();
    write_family(path, fam);
    const DeformationFamily back = read_family(path);
    CHECK(back.kind == FamilyKind::GeneralizedT);
    CHECK(back.t1 == 0.75);
    REQUIRE(back.data.a.size() == fam.data.a.size());
    const QuadNet f1 = fam.frame(0.5), f2 = back.frame(0.5);
    CHECK(max_vertex_distance(f1, f2) == 0.0);
}

TEST_CASE("l-shaped net json round trip") {
    const QuadNet net = egg_crate_net(4, 4);
    const WideLShapedNet l = extract_wide_L(net);
    TempDir dir;
    const std::string path = (dir.path / "lnet.json").string();
    write_lnet(path, l);
    const WideLShapedNet back = read_lnet(path);
    REQUIRE(back.m == 4);
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j)
            if (WideLShapedNet::covered(i, j))
                CHECK((back.verts.at(i, j) - l.verts.at(i, j)).norm() == 0.0);
}

TEST_CASE("curve csv parsing") {
    TempDir dir;
    const std::string path = (dir.path / "curve.csv").string();
    std::ofstream(path) << "# param,x,y,z\n0,0,0,0\n0.5,0.5,0,0.25\n1,1,0,1\n";
    const CurveSamples s = read_curve_csv(path);
    CHECK(s.columns == 3);
    REQUIRE(s.params.size() == 3);
    CHECK(s.values[1][2] == 0.25);

    std::ofstream(path) << "0,1\n0.5,1.5\n1,2\n";
    const CurveSamples sc = read_curve_csv(path);
    CHECK(sc.columns == 1);

    std::ofstream(path) << "0,1,2\n1,2,3\n";
    CHECK_THROWS_AS(read_curve_csv(path), ParseError);
}
