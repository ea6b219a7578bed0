#include "sphtrans/testcases.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "sphtrans/errors.hpp"

namespace sphtrans {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(FlowKind kind) {
    switch (kind) {
        case FlowKind::SolidBody: return "solid_body";
        case FlowKind::Vortex: return "vortex";
        case FlowKind::Deformational: return "deformational";
    }
    return "unknown";
}

FlowKind flow_kind_from_string(const std::string& name) {
    if (name == "solid_body") return FlowKind::SolidBody;
    if (name == "vortex") return FlowKind::Vortex;
    if (name == "deformational") return FlowKind::Deformational;
    throw DomainError("unknown test '" + name + "' (valid: solid_body, vortex, deformational)");
}

TestCase::TestCase(FlowKind kind, double final_time, FlowParameters params)
    : kind_(kind), final_time_(final_time), params_(params) {
    if (!(final_time >= 0.0)) throw DomainError("final time must be non-negative");
}

double vortex_angular_speed(double theta, double rho0) {
    const double rho = rho0 * std::cos(theta);
    const double sech = 1.0 / std::cosh(rho);
    const double tanh_over_rho = std::abs(rho) < 1e-8 ? 1.0 - rho * rho / 3.0 : std::tanh(rho) / rho;
    return 1.5 * std::sqrt(3.0) * sech * sech * tanh_over_rho;
}

Velocity TestCase::velocity(double lambda, double theta, double t) const {
    switch (kind_) {
        case FlowKind::SolidBody: {
            const double a = params_.alpha;
            return {std::sin(theta) * std::sin(lambda) * std::sin(a) - std::cos(theta) * std::cos(a),
                    std::cos(lambda) * std::sin(a)};
        }
        case FlowKind::Vortex:
            return {vortex_angular_speed(theta, params_.rho0) * std::cos(theta), 0.0};
        case FlowKind::Deformational: {
            const double phase = std::cos(kPi * t / final_time_);
            const double sl = std::sin(lambda);
            return {2.0 * sl * sl * std::sin(2.0 * theta) * phase,
                    2.0 * std::sin(2.0 * lambda) * std::cos(theta) * phase};
        }
    }
    return {};
}

double TestCase::cosine_bell(const Vec3& p, const Vec3& center, double radius) const {
    const double r = geodesic_distance(p, center);
    return r < radius ? 0.5 * (1.0 + std::cos(kPi * r / radius)) : 0.0;
}

double TestCase::initial(double lambda, double theta) const {
    const Vec3 p = spherical_to_cartesian(lambda, theta);
    switch (kind_) {
        case FlowKind::SolidBody:
            return cosine_bell(p, Vec3::UnitX(), params_.bell_radius);
        case FlowKind::Vortex:
            return *exact(lambda, theta, 0.0);
        case FlowKind::Deformational: {
            const Vec3 c1 = spherical_to_cartesian(params_.bell1_lambda, params_.bell1_theta);
            const Vec3 c2 = spherical_to_cartesian(params_.bell2_lambda, params_.bell2_theta);
            const double r = params_.bell_radius;
            if (geodesic_distance(p, c1) < r) return 0.1 + 0.9 * cosine_bell(p, c1, r);
            if (geodesic_distance(p, c2) < r) return 0.1 + 0.9 * cosine_bell(p, c2, r);
            return 0.1;
        }
    }
    return 0.0;
}

std::optional<double> TestCase::exact(double lambda, double theta, double t) const {
    switch (kind_) {
        case FlowKind::SolidBody: {
            // The velocity field is ω × p with ω = -(0, sin α, cos α); pull p back
            // along the rotation and evaluate the initial bell there.
            const Vec3 axis(0.0, -std::sin(params_.alpha), -std::cos(params_.alpha));
            const Vec3 p = spherical_to_cartesian(lambda, theta);
            const Vec3 p0 = Eigen::AngleAxisd(-t, axis) * p;
            return cosine_bell(p0.normalized(), Vec3::UnitX(), params_.bell_radius);
        }
        case FlowKind::Vortex: {
            const double rho = params_.rho0 * std::cos(theta);
            const double omega = vortex_angular_speed(theta, params_.rho0);
            return 1.0 - std::tanh(rho / params_.zeta * std::sin(lambda - omega * t));
        }
        case FlowKind::Deformational: {
            const double tol = 1e-12 * std::max(1.0, final_time_);
            if (std::abs(t) <= tol || std::abs(t - final_time_) <= tol) return initial(lambda, theta);
            return std::nullopt;
        }
    }
    return std::nullopt;
}

TestCase solid_body_case() {
    FlowParameters p;
    p.alpha = kPi / 2;
    p.bell_radius = 0.5;
    return TestCase(FlowKind::SolidBody, 2.0 * kPi, p);
}

TestCase vortex_case(double final_time) {
    FlowParameters p;
    p.rho0 = 3.0;
    p.zeta = 5.0;
    return TestCase(FlowKind::Vortex, final_time, p);
}

TestCase deformational_case(double bell_radius) {
    FlowParameters p;
    p.bell_radius = bell_radius;
    p.bell1_lambda = 5.0 * kPi / 6.0;
    p.bell1_theta = 0.0;
    p.bell2_lambda = -5.0 * kPi / 6.0;  // 7π/6 wrapped into [-π, π]
    p.bell2_theta = 0.0;
    return TestCase(FlowKind::Deformational, 5.0, p);
}

TestCase make_case(FlowKind kind) {
    switch (kind) {
        case FlowKind::SolidBody: return solid_body_case();
        case FlowKind::Vortex: return vortex_case();
        case FlowKind::Deformational: return deformational_case();
    }
    throw DomainError("unknown flow kind");
}

NodalVelocity sample_velocity(const TestCase& tc, const PointSet& ps, double t) {
    NodalVelocity v{Eigen::VectorXd(ps.size()), Eigen::VectorXd(ps.size())};
    for (Index i = 0; i < ps.size(); ++i) {
        const Velocity vi = tc.velocity(ps[i], t);
        v.v1(i) = vi.v1;
        v.v2(i) = vi.v2;
    }
    return v;
}

Eigen::VectorXd sample_initial(const TestCase& tc, const PointSet& ps) {
    Eigen::VectorXd u(ps.size());
    for (Index i = 0; i < ps.size(); ++i) u(i) = tc.initial(ps[i]);
    return u;
}

Eigen::VectorXd sample_exact(const TestCase& tc, const PointSet& ps, double t) {
    Eigen::VectorXd u(ps.size());
    for (Index i = 0; i < ps.size(); ++i) {
        const auto v = tc.exact(ps[i], t);
        if (!v) throw DomainError(tc.name() + ": no exact solution at t = " + std::to_string(t));
        u(i) = *v;
    }
    return u;
}

double l2_norm(const Eigen::VectorXd& values) {
    if (values.size() == 0) throw DomainError("l2_norm of an empty evaluation set");
    return std::sqrt(4.0 * kPi / static_cast<double>(values.size()) * values.squaredNorm());
}

}  // namespace sphtrans
