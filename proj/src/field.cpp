#include "isinglab/field.hpp"

#include <cmath>
#include <string>

namespace isinglab {

FieldSpec::FieldSpec(double h_star, double alpha,
                     std::optional<int> truncation_radius,
                     std::map<Site, double> perturbation)
    : h_star(h_star), alpha(alpha), truncation_radius(truncation_radius),
      perturbation(std::move(perturbation)) {
    if (!(h_star > 0)) throw ValidationError("FieldSpec: h_star must be > 0");
    if (!(alpha > 0)) throw ValidationError("FieldSpec: alpha must be > 0");
    if (truncation_radius && *truncation_radius < 0)
        throw ValidationError("FieldSpec: truncation_radius must be >= 0");
    for (const auto& [site, dv] : this->perturbation) {
        (void)dv;
        if (field_at(site, *this) < 0)
            throw ValidationError("FieldSpec: perturbation makes h < 0 at (" +
                                  std::to_string(site.x) + "," +
                                  std::to_string(site.y) + "," +
                                  std::to_string(site.z) + ")");
    }
}

CouplingSpec::CouplingSpec(double J, double beta) : J(J), beta(beta) {
    if (!(J > 0)) throw ValidationError("CouplingSpec: J must be > 0");
    if (!(beta > 0)) throw ValidationError("CouplingSpec: beta must be > 0");
}

double field_at(const Site& x, const FieldSpec& f) {
    int r = l1_norm(x);
    double base;
    if (f.truncation_radius && r <= *f.truncation_radius)
        base = 0.0;
    else if (r == 0)
        base = f.h_star;
    else
        base = f.h_star / std::pow(double(r), f.alpha);
    if (!f.perturbation.empty()) {
        auto it = f.perturbation.find(x);
        if (it != f.perturbation.end()) base += it->second;
    }
    return base;
}

double field_sum(const Region& K, const FieldSpec& f) {
    double sum = 0.0, comp = 0.0;
    for (const Site& s : K.sites()) {
        double y = field_at(s, f) - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

PeierlsCondition peierls_condition(const Region& K, const CouplingSpec& c,
                                   const FieldSpec& f) {
    double lhs = c.J * double(boundary_edge_count(K));
    double rhs = 2.0 * field_sum(K, f);
    return {lhs, rhs, lhs > rhs};
}

int dominating_ball_radius(long boundary_size, double c_const, int d) {
    if (boundary_size <= 0) throw ValidationError("boundary_size must be > 0");
    if (!(c_const > 0)) throw ValidationError("c_const must be > 0");
    if (d != 2 && d != 3) throw ValidationError("dimension must be 2 or 3");
    double r = c_const * std::pow(double(boundary_size), 1.0 / double(d - 1));
    return int(std::ceil(r - 1e-12));
}

double surface_normalized_ball_sum(int R, const FieldSpec& f, int d,
                                   std::size_t site_cap) {
    if (R < 1) throw ValidationError("surface_normalized_ball_sum: R >= 1");
    return field_sum(ball(R, d, site_cap), f) / std::pow(double(R), double(d - 1));
}

std::vector<double> ball_field_sum_profile(int R_max, const FieldSpec& f, int d) {
    if (R_max < 0) throw ValidationError("ball_field_sum_profile: R_max >= 0");
    std::vector<double> out;
    out.reserve(R_max + 1);
    double sum = 0.0, comp = 0.0;
    for (int r = 0; r <= R_max; ++r) {
        Region shell = shell_l1(r, d);
        for (const Site& s : shell.sites()) {
            double y = field_at(s, f) - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        out.push_back(sum);
    }
    return out;
}

int truncation_radius_for(const CouplingSpec& c, const FieldSpec& f,
                          double C_threshold, int d) {
    if (!(C_threshold > 0)) throw ValidationError("C_threshold must be > 0");
    if (d != 2 && d != 3) throw ValidationError("dimension must be 2 or 3");
    double dd = double(d);
    double surface = std::pow(2.0 * dd, dd / (dd - 1.0));
    double num = f.h_star * std::pow(C_threshold, 1.0 / (dd - 1.0));
    // smallest R with num / (R^alpha * surface) <= J
    double r = std::pow(num / (c.J * surface), 1.0 / f.alpha);
    int R = int(std::ceil(r - 1e-12));
    return R < 1 ? 1 : R;
}

std::optional<long> lemma21_threshold_scan(const CouplingSpec& c,
                                           const FieldSpec& f, int d,
                                           int max_radius) {
    if (max_radius < 1) throw ValidationError("max_radius must be >= 1");
    if (d != 2 && d != 3) throw ValidationError("dimension must be 2 or 3");
    auto sums = ball_field_sum_profile(max_radius, f, d);
    int worst_bad = 0;  // 0 = none
    for (int R = 1; R <= max_radius; ++R) {
        double lhs = c.J * 2.0 * d * std::pow(double(R), double(d - 1));
        if (!(lhs > 2.0 * sums[R])) worst_bad = R;
    }
    if (worst_bad == max_radius) return std::nullopt;
    if (worst_bad == 0) return 1;
    return long(ball(worst_bad, d).size()) + 1;
}

}  // namespace isinglab
