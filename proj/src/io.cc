#include "gcpose/io.h"

#include "gcpose/geometry.h"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gcpose {

using nlohmann::json;

namespace {

template <int N>
Eigen::Matrix<double, N, 1> read_numbers(const json &j, const char *key, int line) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_array() || it->size() != N) {
        throw ParseError(std::string("field \"") + key + "\" must be an array of " + std::to_string(N) + " numbers",
                         line);
    }
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) {
        const json &x = (*it)[i];
        if (!x.is_number()) {
            throw ParseError(std::string("field \"") + key + "\" contains a non-number", line);
        }
        v(i) = x.get<double>();
    }
    return v;
}

int read_index(const json &j, const char *key, int line) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) {
        throw ParseError(std::string("field \"") + key + "\" must be an integer", line);
    }
    return it->get<int>();
}

std::string format_number(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

std::ifstream open_input(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return in;
}

}  // namespace

RigCalibration read_rig(std::istream &in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("rig calibration: ") + e.what());
    }
    if (!j.is_object() || !j.contains("cameras") || !j["cameras"].is_array()) {
        throw ParseError("rig calibration: expected an object with a \"cameras\" array");
    }
    std::vector<CameraExtrinsics> cams;
    for (const json &c : j["cameras"]) {
        if (!c.is_object()) {
            throw ParseError("rig calibration: camera entry is not an object");
        }
        const Eigen::Matrix<double, 9, 1> r = read_numbers<9>(c, "R", 0);
        CameraExtrinsics cam;
        cam.rotation << r(0), r(1), r(2), r(3), r(4), r(5), r(6), r(7), r(8);
        cam.offset = read_numbers<3>(c, "t", 0);
        cams.push_back(cam);
    }
    try {
        return RigCalibration(std::move(cams));
    } catch (const std::invalid_argument &e) {
        throw ParseError(std::string("rig calibration: ") + e.what());
    }
}

RigCalibration read_rig_file(const std::string &path) {
    std::ifstream in = open_input(path);
    return read_rig(in);
}

void write_rig(std::ostream &out, const RigCalibration &rig) {
    out << "{\"cameras\":[";
    for (std::size_t i = 0; i < rig.size(); ++i) {
        const CameraExtrinsics &cam = rig.cameras()[i];
        out << (i ? "," : "") << "{\"R\":[";
        for (int k = 0; k < 9; ++k) {
            out << (k ? "," : "") << format_number(cam.rotation(k / 3, k % 3));
        }
        out << "],\"t\":[";
        for (int k = 0; k < 3; ++k) {
            out << (k ? "," : "") << format_number(cam.offset(k));
        }
        out << "]}";
    }
    out << "]}\n";
}

std::vector<Correspondence> read_correspondences(std::istream &in) {
    std::vector<Correspondence> out;
    std::string text;
    int line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error &e) {
            throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
        }
        if (!j.is_object()) {
            throw ParseError("line " + std::to_string(line) + ": expected a JSON object", line);
        }
        try {
            Correspondence c;
            c.camera0 = read_index(j, "cam0", line);
            c.camera1 = read_index(j, "cam1", line);
            c.bearing0 = read_numbers<3>(j, "b0", line);
            c.bearing1 = read_numbers<3>(j, "b1", line);
            for (const Vec3 *b : {&c.bearing0, &c.bearing1}) {
                if (std::abs(b->norm() - 1.0) > kUnitTolerance) {
                    throw ParseError("bearing is not unit-norm", line);
                }
            }
            out.push_back(c);
        } catch (const ParseError &e) {
            throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
        }
    }
    return out;
}

std::vector<Correspondence> read_correspondences_file(const std::string &path) {
    std::ifstream in = open_input(path);
    return read_correspondences(in);
}

void write_correspondences(std::ostream &out, const std::vector<Correspondence> &matches) {
    auto vec = [&](const Vec3 &v) {
        out << "[" << format_number(v.x()) << "," << format_number(v.y()) << "," << format_number(v.z()) << "]";
    };
    for (const Correspondence &c : matches) {
        out << "{\"cam0\":" << c.camera0 << ",\"cam1\":" << c.camera1 << ",\"b0\":";
        vec(c.bearing0);
        out << ",\"b1\":";
        vec(c.bearing1);
        out << "}\n";
    }
}

}  // namespace gcpose
