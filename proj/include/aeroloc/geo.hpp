#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>
#include <string>
#include <vector>

namespace aeroloc {

/// Earth-fixed planar position (UTM-style local metric frame).
struct GeoPoint {
    double easting = 0.0;
    double northing = 0.0;

    GeoPoint() = default;
    GeoPoint(double e, double n) : easting(e), northing(n) {}

    Eigen::Vector2d vec() const { return {easting, northing}; }
    Eigen::Vector3d lifted() const { return {easting, northing, 0.0}; }

    double distance_to(const GeoPoint& o) const {
        return std::hypot(easting - o.easting, northing - o.northing);
    }
};

/// Timestamped pose in the local odometry frame.
struct OdomPose {
    double timestamp = 0.0;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

enum class GravityFrame { Local, World };

/// Unit gravity direction observed by the IMU in a given frame.
struct GravityVector {
    Eigen::Vector3d direction{0.0, 0.0, -1.0};
    GravityFrame frame = GravityFrame::Local;

    GravityVector() = default;
    GravityVector(const Eigen::Vector3d& d, GravityFrame f)
        : direction(d.normalized()), frame(f) {}
};

/// Rigid transform from the odometry frame into the Earth frame.
struct AnchorTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    double residual_rms = 0.0;
    bool degenerate = false;

    AnchorTransform inverse() const;
};

Eigen::Vector3d apply_transform(const AnchorTransform& t, const Eigen::Vector3d& p);

/// Timestamped Earth-fixed sample, the element type of ground-truth and
/// estimate trajectories.
struct GeoSample {
    double timestamp = 0.0;
    GeoPoint point;
};

struct OdomTrajectory {
    std::vector<OdomPose> poses;
};

struct GeoTrajectory {
    std::vector<GeoSample> samples;
};

struct AteReport {
    double mean = 0.0;
    double sd = 0.0;  // population standard deviation
    std::vector<double> per_point;
};

/// Absolute trajectory error between two planar trajectories, paired by
/// nearest timestamp within `association_window` seconds.
AteReport ate(const GeoTrajectory& estimated, const GeoTrajectory& truth,
              double association_window = 0.5);

// Trajectory CSV I/O. Odometry rows: timestamp,x,y,z,qw,qx,qy,qz.
// Geo rows: timestamp,easting,northing.
OdomTrajectory load_odom_csv(const std::string& path);
GeoTrajectory load_geo_csv(const std::string& path);
void save_geo_csv(const GeoTrajectory& traj, const std::string& path);

}  // namespace aeroloc
