#ifndef SPHTRANS_TESTCASES_HPP
#define SPHTRANS_TESTCASES_HPP

#include <optional>
#include <string>

#include <Eigen/Core>

#include "sphtrans/geometry.hpp"

namespace sphtrans {

enum class FlowKind { SolidBody, Vortex, Deformational };

std::string to_string(FlowKind kind);
/// Accepts "solid_body", "vortex", "deformational".
FlowKind flow_kind_from_string(const std::string& name);

/// Velocity in the (longitude, latitude) frame.
struct Velocity {
    double v1 = 0.0;
    double v2 = 0.0;
};

struct FlowParameters {
    double alpha = 1.5707963267948966;  // solid body: rotation tilt
    double bell_radius = 0.5;           // solid body R_b and deformational r
    double rho0 = 3.0;                  // vortex
    double zeta = 5.0;                  // vortex
    double bell1_lambda = 0.0, bell1_theta = 0.0;
    double bell2_lambda = 0.0, bell2_theta = 0.0;
};

/// One of the benchmark flows: velocity, initial condition and exact solution.
class TestCase {
public:
    TestCase(FlowKind kind, double final_time, FlowParameters params);

    FlowKind kind() const { return kind_; }
    std::string name() const { return to_string(kind_); }
    double final_time() const { return final_time_; }
    const FlowParameters& parameters() const { return params_; }
    bool time_dependent_velocity() const { return kind_ == FlowKind::Deformational; }

    Velocity velocity(double lambda, double theta, double t) const;
    double initial(double lambda, double theta) const;
    /// Empty where no closed form exists (deformational flow away from t = 0, T).
    std::optional<double> exact(double lambda, double theta, double t) const;

    Velocity velocity(const SpherePoint& p, double t) const { return velocity(p.lambda, p.theta, t); }
    double initial(const SpherePoint& p) const { return initial(p.lambda, p.theta); }
    std::optional<double> exact(const SpherePoint& p, double t) const {
        return exact(p.lambda, p.theta, t);
    }

private:
    double cosine_bell(const Vec3& p, const Vec3& center, double radius) const;

    FlowKind kind_;
    double final_time_;
    FlowParameters params_;
};

/// Cosine bell carried once around the sphere over the poles, T = 2π.
TestCase solid_body_case();
/// Steady vortex roll-up, ρ0 = 3, ζ = 5, T = 3.
TestCase vortex_case(double final_time = 3.0);
/// Reversing deformational flow with two bells, T = 5.
TestCase deformational_case(double bell_radius = 0.5);
TestCase make_case(FlowKind kind);

/// ω(θ) of the vortex flow; the ρ = 0 value is the analytic limit 3√3/2.
double vortex_angular_speed(double theta, double rho0);

struct NodalVelocity {
    Eigen::VectorXd v1;
    Eigen::VectorXd v2;
};
NodalVelocity sample_velocity(const TestCase& tc, const PointSet& ps, double t);
Eigen::VectorXd sample_initial(const TestCase& tc, const PointSet& ps);
/// Throws DomainError when the exact solution is unavailable at t.
Eigen::VectorXd sample_exact(const TestCase& tc, const PointSet& ps, double t);

/// Equal-weight quadrature norm sqrt(4π/N Σ f_j^2).
double l2_norm(const Eigen::VectorXd& values);

}  // namespace sphtrans

#endif  // SPHTRANS_TESTCASES_HPP
