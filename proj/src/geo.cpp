#include "aeroloc/geo.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aeroloc {

AnchorTransform AnchorTransform::inverse() const {
    AnchorTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -inv.rotation * translation;
    return inv;
}

Eigen::Vector3d apply_transform(const AnchorTransform& t, const Eigen::Vector3d& p) {
    return t.rotation * p + t.translation;
}

AteReport ate(const GeoTrajectory& estimated, const GeoTrajectory& truth,
              double association_window) {
    if (estimated.samples.empty() || truth.samples.empty())
        throw std::invalid_argument("ate: empty trajectory");

    AteReport report;
    for (const auto& est : estimated.samples) {
        // truth timestamps are monotone; binary search for the closest one
        auto cmp = [](const GeoSample& s, double t) { return s.timestamp < t; };
        auto it = std::lower_bound(truth.samples.begin(), truth.samples.end(),
                                   est.timestamp, cmp);
        const GeoSample* best = nullptr;
        if (it != truth.samples.end()) best = &*it;
        if (it != truth.samples.begin()) {
            const GeoSample* prev = &*(it - 1);
            if (!best || std::abs(prev->timestamp - est.timestamp) <
                             std::abs(best->timestamp - est.timestamp))
                best = prev;
        }
        if (!best || std::abs(best->timestamp - est.timestamp) > association_window)
            continue;
        report.per_point.push_back(est.point.distance_to(best->point));
    }

    if (report.per_point.empty())
        throw std::runtime_error("ate: no associable pairs");

    double sum = 0.0;
    for (double e : report.per_point) sum += e;
    report.mean = sum / static_cast<double>(report.per_point.size());
    double var = 0.0;
    for (double e : report.per_point) var += (e - report.mean) * (e - report.mean);
    report.sd = std::sqrt(var / static_cast<double>(report.per_point.size()));
    return report;
}

namespace {

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

}  // namespace

OdomTrajectory load_odom_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    OdomTrajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = parse_row(line);
        if (row.size() != 8)
            throw std::runtime_error("bad odometry row in " + path);
        OdomPose p;
        p.timestamp = row[0];
        p.position = {row[1], row[2], row[3]};
        p.orientation = Eigen::Quaterniond(row[4], row[5], row[6], row[7]).normalized();
        if (!traj.poses.empty() && p.timestamp <= traj.poses.back().timestamp)
            throw std::runtime_error("non-monotone timestamps in " + path);
        traj.poses.push_back(p);
    }
    if (traj.poses.empty()) throw std::runtime_error("empty trajectory in " + path);
    return traj;
}

GeoTrajectory load_geo_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    GeoTrajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = parse_row(line);
        if (row.size() < 3) throw std::runtime_error("bad geo row in " + path);
        traj.samples.push_back({row[0], {row[1], row[2]}});
    }
    if (traj.samples.empty()) throw std::runtime_error("empty trajectory in " + path);
    return traj;
}

void save_geo_csv(const GeoTrajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "timestamp,easting,northing\n";
    out.precision(17);
    for (const auto& s : traj.samples)
        out << s.timestamp << ',' << s.point.easting << ',' << s.point.northing << '\n';
}

}  // namespace aeroloc
