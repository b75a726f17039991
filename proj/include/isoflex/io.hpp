#pragma once

#include "isoflex/flexion.hpp"
#include "isoflex/quadnet.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace isoflex {

struct NetFile {
    QuadNet net;
    nlohmann::json metadata;  // optional generator/provenance info
};

nlohmann::json net_to_json(const QuadNet& net, const nlohmann::json& metadata = {});
QuadNet net_from_json(const nlohmann::json& j);

NetFile read_net(const std::string& path);
void write_net(const std::string& path, const QuadNet& net,
               const nlohmann::json& metadata = {});

// L-shaped net files reuse the net schema with null entries at uncovered slots.
WideLShapedNet lnet_from_json(const nlohmann::json& j);
nlohmann::json lnet_to_json(const WideLShapedNet& l);
WideLShapedNet read_lnet(const std::string& path);
void write_lnet(const std::string& path, const WideLShapedNet& l);

// OBJ export: vertices in grid order, 1-based quad faces
// (i,j), (i+1,j), (i+1,j+1), (i,j+1).
void write_obj(const std::string& path, const QuadNet& net);

nlohmann::json family_to_json(const DeformationFamily& fam);
DeformationFamily family_from_json(const nlohmann::json& j);
DeformationFamily read_family(const std::string& path);
void write_family(const std::string& path, const DeformationFamily& fam);

// Curve samples: CSV rows "param,x,y,z" or "param,s". Lines starting with '#'
// are skipped.
struct CurveSamples {
    std::vector<double> params;
    std::vector<std::vector<double>> values;  // 1 or 3 columns
    int columns = 0;
};
CurveSamples read_curve_csv(const std::string& path);

}  // namespace isoflex
