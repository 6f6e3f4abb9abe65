#include "aeroloc/align.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>

namespace aeroloc {

namespace {

struct Centered {
    Eigen::MatrixXd local;   // n x 3, centroid-subtracted
    Eigen::MatrixXd world;   // n x 3, centroid-subtracted
    Eigen::Vector3d local_centroid;
    Eigen::Vector3d world_centroid;
};

Centered center_pairs(const CorrespondenceWindow& window) {
    const auto n = static_cast<Eigen::Index>(window.size());
    Centered c;
    c.local.resize(n, 3);
    c.world.resize(n, 3);
    c.local_centroid.setZero();
    c.world_centroid.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& pr = window.pair(static_cast<std::size_t>(i));
        c.local.row(i) = pr.first.transpose();
        c.world.row(i) = pr.second.transpose();
        c.local_centroid += pr.first;
        c.world_centroid += pr.second;
    }
    c.local_centroid /= static_cast<double>(n);
    c.world_centroid /= static_cast<double>(n);
    c.local.rowwise() -= c.local_centroid.transpose();
    c.world.rowwise() -= c.world_centroid.transpose();
    return c;
}

/// RMS-scale singular values of the centered horizontal (x, y) coordinates.
Eigen::Vector2d horizontal_singular_values(const Eigen::MatrixXd& centered_local) {
    const Eigen::MatrixXd xy = centered_local.leftCols<2>();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(xy);
    Eigen::Vector2d s = Eigen::Vector2d::Zero();
    for (Eigen::Index i = 0; i < svd.singularValues().size() && i < 2; ++i)
        s[i] = svd.singularValues()[i] / std::sqrt(static_cast<double>(xy.rows()));
    return s;
}

double residual_rms(const CorrespondenceWindow& window, const AnchorTransform& t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        const auto& pr = window.pair(i);
        sum += (apply_transform(t, pr.first) - pr.second).squaredNorm();
    }
    return std::sqrt(sum / static_cast<double>(window.size()));
}

}  // namespace

double CorrespondenceWindow::horizontal_extent() const {
    if (pairs_.empty()) return 0.0;
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& pr : pairs_) centroid += pr.first.head<2>();
    centroid /= static_cast<double>(pairs_.size());
    double max_sq = 0.0;
    for (const auto& pr : pairs_)
        max_sq = std::max(max_sq, (pr.first.head<2>() - centroid).squaredNorm());
    return 2.0 * std::sqrt(max_sq);
}

AlignmentReport align_rigid(const CorrespondenceWindow& window,
                            double condition_threshold) {
    if (window.size() < 3)
        throw std::invalid_argument("align_rigid: need at least 3 pairs");

    const Centered c = center_pairs(window);

    const Eigen::Matrix3d cross = c.local.transpose() * c.world;
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;

    AlignmentReport report;
    report.transform.rotation = svd.matrixV() * flip * svd.matrixU().transpose();
    report.transform.translation =
        c.world_centroid - report.transform.rotation * c.local_centroid;

    const Eigen::Vector2d s = horizontal_singular_values(c.local);
    report.spread = s[0];
    report.condition = s[1] > 1e-12 ? s[0] / s[1]
                                    : std::numeric_limits<double>::infinity();
    report.degenerate = report.condition > condition_threshold;
    report.transform.degenerate = report.degenerate;
    report.rms_residual = residual_rms(window, report.transform);
    report.transform.residual_rms = report.rms_residual;
    return report;
}

AlignmentReport align_gravity(const CorrespondenceWindow& window,
                              const GravityVector& g_local,
                              const GravityVector& g_world) {
    if (window.size() < 2)
        throw std::invalid_argument("align_gravity: need at least 2 pairs");

    const Eigen::Vector3d gl = g_local.direction.normalized();
    const Eigen::Vector3d gw = g_world.direction.normalized();

    AlignmentReport report;

    // minimal rotation taking local gravity onto world gravity; the
    // antiparallel case has no unique minimal axis, pick one and flag
    Eigen::Matrix3d r_g;
    const bool antiparallel = gl.dot(gw) < -1.0 + 1e-12;
    r_g = Eigen::Quaterniond::FromTwoVectors(gl, gw).toRotationMatrix();
    if (antiparallel) report.degenerate = true;

    const Centered c = center_pairs(window);
    const Eigen::Vector3d up = -gw;  // yaw axis in the world frame

    double dot_sum = 0.0;
    double cross_sum = 0.0;
    double extent = 0.0;
    for (Eigen::Index i = 0; i < c.local.rows(); ++i) {
        Eigen::Vector3d a = r_g * c.local.row(i).transpose();
        Eigen::Vector3d b = c.world.row(i).transpose();
        a -= a.dot(up) * up;  // project into the gravity plane
        b -= b.dot(up) * up;
        dot_sum += a.dot(b);
        cross_sum += a.cross(b).dot(up);
        extent += a.squaredNorm();
    }
    if (extent < 1e-18)
        throw std::invalid_argument("align_gravity: insufficient horizontal extent");

    const double theta = std::atan2(cross_sum, dot_sum);
    report.transform.rotation =
        Eigen::AngleAxisd(theta, up).toRotationMatrix() * r_g;
    report.transform.translation =
        c.world_centroid - report.transform.rotation * c.local_centroid;

    const Eigen::Vector2d s = horizontal_singular_values(c.local);
    report.spread = s[0];
    report.condition = s[1] > 1e-12 ? s[0] / s[1]
                                    : std::numeric_limits<double>::infinity();
    report.rms_residual = residual_rms(window, report.transform);
    report.transform.residual_rms = report.rms_residual;
    report.transform.degenerate = report.degenerate;
    return report;
}

AlignmentReport align_gravity_soft(const CorrespondenceWindow& window,
                                   const GravityVector& g_local,
                                   const GravityVector& g_world,
                                   double gravity_weight, std::size_t max_iters) {
    if (window.size() < 2)
        throw std::invalid_argument("align_gravity_soft: need at least 2 pairs");
    if (gravity_weight < 0.0)
        throw std::invalid_argument("align_gravity_soft: negative weight");

    const Eigen::Vector3d gl = g_local.direction.normalized();
    const Eigen::Vector3d gw = g_world.direction.normalized();
    const Centered c = center_pairs(window);
    const double sqrt_w = std::sqrt(gravity_weight);

    // start from the hard-constraint solution and refine with Gauss-Newton
    Eigen::Matrix3d rot = align_gravity(window, g_local, g_world).transform.rotation;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        auto accumulate = [&](const Eigen::Vector3d& v, const Eigen::Vector3d& target,
                              double weight) {
            const Eigen::Vector3d rv = rot * v;
            Eigen::Matrix3d jac;  // d(exp(d)Rv)/dd = -[Rv]x
            jac << 0, rv.z(), -rv.y(), -rv.z(), 0, rv.x(), rv.y(), -rv.x(), 0;
            const Eigen::Vector3d res = rv - target;
            jtj += weight * jac.transpose() * jac;
            jtr += weight * jac.transpose() * res;
        };
        for (Eigen::Index i = 0; i < c.local.rows(); ++i)
            accumulate(c.local.row(i), c.world.row(i), 1.0);
        if (sqrt_w > 0.0) accumulate(gl, gw, gravity_weight);

        const Eigen::Vector3d delta =
            (jtj + 1e-12 * Eigen::Matrix3d::Identity()).ldlt().solve(-jtr);
        const double angle = delta.norm();
        if (angle > 0.0)
            rot = Eigen::AngleAxisd(angle, delta / angle).toRotationMatrix() * rot;
        if (angle < 1e-13) break;
    }

    AlignmentReport report;
    report.transform.rotation = rot;
    report.transform.translation = c.world_centroid - rot * c.local_centroid;
    const Eigen::Vector2d s = horizontal_singular_values(c.local);
    report.spread = s[0];
    report.condition = s[1] > 1e-12 ? s[0] / s[1]
                                    : std::numeric_limits<double>::infinity();
    report.rms_residual = residual_rms(window, report.transform);
    report.transform.residual_rms = report.rms_residual;
    return report;
}

}  // namespace aeroloc
