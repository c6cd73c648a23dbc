#include "model.hpp"

#include "errors.hpp"
#include "stats.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace jdlab {

namespace {

std::string point_str(const double* x, int dim) {
    std::ostringstream os;
    os << "(" << x[0];
    if (dim == 2) os << ", " << x[1];
    os << ")";
    return os.str();
}

void eval_checked(const VecFn& f, const double* x, double* out, int dim, const char* what) {
    f(x, out);
    for (int i = 0; i < dim; ++i) {
        if (!std::isfinite(out[i])) {
            std::ostringstream os;
            os << "non-finite " << what << " at " << point_str(x, dim);
            throw NumericError(os.str());
        }
    }
}

void eval_mat_checked(const MatFn& f, const double* x, double* out, int dim, const char* what) {
    f(x, out);
    for (int i = 0; i < dim * dim; ++i) {
        if (!std::isfinite(out[i])) {
            std::ostringstream os;
            os << "non-finite " << what << " at " << point_str(x, dim);
            throw NumericError(os.str());
        }
    }
}

// minimum eigenvalue of a symmetric d x d matrix, d <= 2
double min_eig_sym(const double* m, int dim) {
    if (dim == 1) return m[0];
    const double tr = m[0] + m[3];
    const double det = m[0] * m[3] - m[1] * m[2];
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return tr / 2.0 - disc;
}

double det2(const double* m, int dim) {
    if (dim == 1) return m[0];
    return m[0] * m[3] - m[1] * m[2];
}

void aaT(const double* a, double* out, int dim) {
    if (dim == 1) {
        out[0] = a[0] * a[0];
        return;
    }
    out[0] = a[0] * a[0] + a[1] * a[1];
    out[1] = a[0] * a[2] + a[1] * a[3];
    out[2] = out[1];
    out[3] = a[2] * a[2] + a[3] * a[3];
}

std::vector<std::array<double, 2>> make_points(const AuditGrid& g, int dim) {
    std::vector<std::array<double, 2>> pts;
    const int n = g.points_per_axis;
    const double step = (g.hi - g.lo) / (n - 1);
    if (dim == 1) {
        pts.reserve(n);
        for (int i = 0; i < n; ++i) pts.push_back({g.lo + i * step, 0.0});
    } else {
        // coarser tensor grid in 2d keeps the audit at desk scale
        const int m = std::min(n, 81);
        const double s2 = (g.hi - g.lo) / (m - 1);
        pts.reserve(static_cast<std::size_t>(m) * m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                pts.push_back({g.lo + i * s2, g.lo + j * s2});
    }
    return pts;
}

} // namespace

AssumptionReport audit_assumptions(const ModelSpec& spec, const AuditGrid& grid, double tol) {
    if (grid.points_per_axis < 2) throw ValidationError("audit: grid needs at least 2 points");
    if (!(tol > 0.0)) throw ValidationError("audit: tol must be > 0");
    const int d = spec.dim;
    AssumptionReport rep;
    auto points = make_points(grid, d);

    // finite-difference Lipschitz estimate and sup norms along each axis
    const double fd = 1e-4;
    double lip_b = 0.0, lip_g = 0.0, lip_aat = 0.0;
    std::array<double, 2> lip_b_at{0, 0}, lip_g_at{0, 0};
    double sup_b = 0.0, sup_g = 0.0, sup_aat = 0.0;
    std::array<double, 2> sup_b_at{0, 0};
    double min_eig = 1e300, min_det = 1e300;
    std::array<double, 2> min_eig_at{0, 0}, min_det_at{0, 0};

    double bx[2], bx2[2], ax[4], ax2[4], gx[4], gx2[4], aat1[4], aat2[4];
    for (const auto& p : points) {
        eval_checked(spec.drift, p.data(), bx, d, "drift");
        eval_mat_checked(spec.diffusion, p.data(), ax, d, "diffusion");
        eval_mat_checked(spec.jump_coeff, p.data(), gx, d, "jump coefficient");
        aaT(ax, aat1, d);
        for (int i = 0; i < d; ++i) sup_b = std::max(sup_b, std::fabs(bx[i]));
        if (std::fabs(bx[0]) >= sup_b) sup_b_at = p;
        for (int i = 0; i < d * d; ++i) {
            sup_g = std::max(sup_g, std::fabs(gx[i]));
            sup_aat = std::max(sup_aat, std::fabs(aat1[i]));
        }
        const double eigv = min_eig_sym(aat1, d);
        if (eigv < min_eig) {
            min_eig = eigv;
            min_eig_at = p;
        }
        const double dg = det2(gx, d);
        if (dg < min_det) {
            min_det = dg;
            min_det_at = p;
        }
        for (int axis = 0; axis < d; ++axis) {
            std::array<double, 2> q = p;
            q[axis] += fd;
            eval_checked(spec.drift, q.data(), bx2, d, "drift");
            eval_mat_checked(spec.jump_coeff, q.data(), gx2, d, "jump coefficient");
            eval_mat_checked(spec.diffusion, q.data(), ax2, d, "diffusion");
            aaT(ax2, aat2, d);
            double nb = 0.0, ng = 0.0, na = 0.0;
            for (int i = 0; i < d; ++i) nb = std::max(nb, std::fabs(bx2[i] - bx[i]));
            for (int i = 0; i < d * d; ++i) {
                ng = std::max(ng, std::fabs(gx2[i] - gx[i]));
                na = std::max(na, std::fabs(aat2[i] - aat1[i]));
            }
            if (nb / fd > lip_b) {
                lip_b = nb / fd;
                lip_b_at = p;
            }
            if (ng / fd > lip_g) {
                lip_g = ng / fd;
                lip_g_at = p;
            }
            lip_aat = std::max(lip_aat, na / fd);
        }
    }

    {
        AuditItem it;
        it.name = "A1.lipschitz";
        it.pass = lip_b <= spec.lipschitz_cap && lip_g <= spec.lipschitz_cap &&
                  lip_aat <= spec.lipschitz_cap;
        it.worst = lip_b >= lip_g ? lip_b_at : lip_g_at;
        it.value = std::max({lip_b, lip_g, lip_aat});
        std::ostringstream os;
        os << "max finite-difference slope b=" << lip_b << " gamma=" << lip_g
           << " aaT=" << lip_aat << " cap=" << spec.lipschitz_cap;
        it.detail = os.str();
        rep.items.push_back(it);
    }
    {
        AuditItem it;
        it.name = "A1.bounded";
        it.pass = std::isfinite(sup_b) && std::isfinite(sup_g) && std::isfinite(sup_aat);
        it.worst = sup_b_at;
        it.value = sup_b;
        std::ostringstream os;
        os << "sup|b|=" << sup_b << " sup|gamma|=" << sup_g << " sup|aaT|=" << sup_aat;
        it.detail = os.str();
        rep.items.push_back(it);
    }
    {
        AuditItem it;
        it.name = "A1.elliptic";
        it.pass = min_eig > tol;
        it.worst = min_eig_at;
        it.value = min_eig;
        it.detail = "min eigenvalue of aaT over grid";
        rep.items.push_back(it);
    }
    {
        AuditItem it;
        it.name = "A1.jump_nondegenerate";
        it.pass = min_det > tol;
        it.worst = min_det_at;
        it.value = min_det;
        it.detail = "min det(gamma) over grid";
        rep.items.push_back(it);
    }

    {
        // inward drift beyond |x| >= rho: fit <x,b(x)> = alpha |x| + beta by
        // least squares and require alpha < 0; the witness constants are
        // c1 = -alpha and c2 = max(<x,b> + c1 |x|).
        const double rho = 5.0;
        std::vector<double> r, xb;
        std::array<double, 2> worst{0, 0};
        for (const auto& p : points) {
            const double nrm = std::hypot(p[0], d == 2 ? p[1] : 0.0);
            if (nrm < rho) continue;
            eval_checked(spec.drift, p.data(), bx, d, "drift");
            double dot = p[0] * bx[0] + (d == 2 ? p[1] * bx[1] : 0.0);
            r.push_back(nrm);
            xb.push_back(dot);
        }
        AuditItem it;
        it.name = "A2.inward_drift";
        if (r.size() < 8) {
            it.pass = false;
            it.detail = "audit grid too small to reach |x| >= 5";
        } else {
            LineFit fit = fit_line(r, xb);
            const double c1 = -fit.slope;
            double c2 = -1e300;
            for (std::size_t i = 0; i < r.size(); ++i)
                c2 = std::max(c2, xb[i] + c1 * r[i]);
            it.pass = c1 > tol;
            it.value = c1;
            it.worst = worst;
            std::ostringstream os;
            os << "fit <x,b> <= -c1|x| + c2 with c1=" << c1 << " c2=" << c2;
            it.detail = os.str();
        }
        rep.items.push_back(it);
    }

    // jump measure items
    const LevyMeasure& F = spec.levy;
    if (F.is_none()) {
        AuditItem it;
        it.name = "A3-A5.jumps";
        it.pass = true;
        it.detail = "no jump part";
        rep.items.push_back(it);
    } else {
        {
            AuditItem it;
            it.name = "A3.envelope";
            double worst_ratio = 0.0;
            double worst_r = 0.0;
            bool support_ok = true;
            for (int i = 1; i <= 200; ++i) {
                const double r = 0.05 * i;
                double z[2] = {r, 0.0};
                const double fr = F.density(z);
                if (fr <= 0.0) support_ok = false;
                const double ratio = fr * std::pow(r, d + F.alpha());
                if (ratio > worst_ratio) {
                    worst_ratio = ratio;
                    worst_r = r;
                }
            }
            it.pass = support_ok && worst_ratio <= F.c3() * (1.0 + 1e-9);
            it.worst = {worst_r, 0.0};
            it.value = worst_ratio;
            std::ostringstream os;
            os << "sup |z|^(d+alpha) F(z) = " << worst_ratio << " vs c3=" << F.c3()
               << (support_ok ? "" : "; support hole found");
            it.detail = os.str();
            rep.items.push_back(it);
        }
        {
            AuditItem it;
            it.name = "A4.exp_moment";
            const double m = F.exp_moment(F.eps0());
            it.pass = std::isfinite(m) && m <= F.c4() * (1.0 + 1e-9);
            it.value = m;
            std::ostringstream os;
            os << "integral |z|^2 exp(eps0|z|) F dz = " << m << " vs c4=" << F.c4();
            it.detail = os.str();
            rep.items.push_back(it);
        }
        {
            AuditItem it;
            it.name = "A5.symmetry";
            if (std::fabs(F.alpha() - 1.0) > 1e-12) {
                it.pass = true;
                it.detail = "alpha != 1, no symmetry requirement";
            } else {
                double worst = 0.0, at = 0.0;
                for (int i = 1; i <= 100; ++i) {
                    const double r = 0.1 * i;
                    double zp[2] = {r, 0.0}, zm[2] = {-r, 0.0};
                    const double diff = std::fabs(F.density(zp) - F.density(zm));
                    if (diff > worst) {
                        worst = diff;
                        at = r;
                    }
                }
                it.pass = worst <= tol;
                it.worst = {at, 0.0};
                it.value = worst;
                it.detail = "max |F(z) - F(-z)| over radial grid";
            }
            rep.items.push_back(it);
        }
    }

    if (d == 1) {
        // a^2 twice differentiable with bounded derivatives
        AuditItem it;
        it.name = "A6.diffusion_smooth";
        double sup1 = 0.0, sup2 = 0.0;
        std::array<double, 2> at{0, 0};
        const double step = 1e-3;
        for (const auto& p : points) {
            double xm[2] = {p[0] - step, 0.0}, x0[2] = {p[0], 0.0}, xp[2] = {p[0] + step, 0.0};
            double am[1], a0[1], ap[1];
            eval_mat_checked(spec.diffusion, xm, am, 1, "diffusion");
            eval_mat_checked(spec.diffusion, x0, a0, 1, "diffusion");
            eval_mat_checked(spec.diffusion, xp, ap, 1, "diffusion");
            const double s1 = std::fabs(ap[0] * ap[0] - am[0] * am[0]) / (2 * step);
            const double s2 = std::fabs(ap[0] * ap[0] - 2 * a0[0] * a0[0] + am[0] * am[0]) / (step * step);
            if (s1 > sup1) {
                sup1 = s1;
                at = p;
            }
            sup2 = std::max(sup2, s2);
        }
        it.pass = sup1 <= spec.lipschitz_cap && sup2 <= 100.0 * spec.lipschitz_cap;
        it.worst = at;
        it.value = sup1;
        std::ostringstream os;
        os << "sup|(a^2)'|=" << sup1 << " sup|(a^2)''|=" << sup2;
        it.detail = os.str();
        rep.items.push_back(it);
    }

    return rep;
}

bool check_c4_condition(double a, double gamma, double c4) {
    if (a == 0.0) throw ValidationError("check_c4_condition: a must be nonzero");
    if (!(gamma > 0.0)) throw ValidationError("check_c4_condition: gamma must be > 0");
    if (!(c4 > 0.0)) throw ValidationError("check_c4_condition: c4 must be > 0");
    return c4 < a * a / (2.0 * gamma * gamma * 16.0 * 28.0);
}

double LyapunovSpec::operator()(double x) const {
    const double ax = std::fabs(x);
    if (ax >= 1.0) return std::exp(eps * ax);
    const double x2 = x * x;
    return c0 + c2 * x2 + c4 * x2 * x2;
}

LyapunovSpec make_lyapunov(double eps) {
    if (!(eps > 0.0)) throw ValidationError("make_lyapunov: eps must be > 0");
    LyapunovSpec f;
    f.eps = eps;
    const double E = std::exp(eps);
    // match value and first two derivatives of exp(eps x) at x = 1
    f.c4 = E * eps * (eps - 1.0) / 8.0;
    f.c2 = (eps * E - 4.0 * f.c4) / 2.0;
    f.c0 = E - f.c2 - f.c4;
    // the interior minimum must stay >= 1
    double mn = 1e300;
    for (int i = 0; i <= 100; ++i) mn = std::min(mn, f(i / 100.0));
    if (mn < 1.0) throw NumericError("lyapunov surrogate dips below 1");
    return f;
}

namespace {

ModelSpec make_model(int dim, const std::string& id, VecFn b, double a_const,
                     double g_const, LevyMeasure levy,
                     std::function<double(const double*)> inv = nullptr) {
    ModelSpec m;
    m.dim = dim;
    m.id = id;
    m.drift = std::move(b);
    m.diffusion = [dim, a_const](const double*, double* out) {
        if (dim == 1) {
            out[0] = a_const;
        } else {
            out[0] = a_const; out[1] = 0.0; out[2] = 0.0; out[3] = a_const;
        }
    };
    m.jump_coeff = [dim, g_const](const double*, double* out) {
        if (dim == 1) {
            out[0] = g_const;
        } else {
            out[0] = g_const; out[1] = 0.0; out[2] = 0.0; out[3] = g_const;
        }
    };
    m.levy = std::move(levy);
    m.constant_coeffs = true;
    m.invariant_density = std::move(inv);
    return m;
}

std::map<std::string, ModelSpec> build_catalogue() {
    std::map<std::string, ModelSpec> cat;
    auto ou1 = [](const double* x, double* out) { out[0] = -x[0]; };
    auto tanh1 = [](const double* x, double* out) { out[0] = -std::tanh(x[0]); };
    auto ou2 = [](const double* x, double* out) {
        out[0] = -x[0];
        out[1] = -x[1];
    };
    auto tanh2 = [](const double* x, double* out) {
        out[0] = -std::tanh(x[0]);
        out[1] = -std::tanh(x[1]);
    };

    auto gauss_inv_1 = [](const double* x) {
        // stationary law of dX = -X dt + dB: N(0, 1/2)
        return std::exp(-x[0] * x[0]) / std::sqrt(M_PI);
    };
    auto sech2_inv_1 = [](const double* x) {
        const double c = std::cosh(x[0]);
        return 0.5 / (c * c);
    };
    auto gauss_inv_2 = [](const double* x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1])) / M_PI;
    };
    auto sech2_inv_2 = [](const double* x) {
        const double c0 = std::cosh(x[0]), c1 = std::cosh(x[1]);
        return 0.25 / (c0 * c0 * c1 * c1);
    };

    auto jumps1 = LevyMeasure::compound_poisson_gauss(1, 1.0, {1.0, 1.0}, 0.5, 0.5);
    auto jumps2 = LevyMeasure::compound_poisson_gauss(2, 1.0, {1.0, 1.0}, 0.5, 0.5);

    cat.emplace("ou_d1", make_model(1, "ou_d1", ou1, 1.0, 1.0, LevyMeasure::none(1), gauss_inv_1));
    cat.emplace("tanh_d1", make_model(1, "tanh_d1", tanh1, 1.0, 1.0, LevyMeasure::none(1), sech2_inv_1));
    cat.emplace("ou_cpois_d1", make_model(1, "ou_cpois_d1", ou1, 1.0, 1.0, jumps1));
    cat.emplace("tanh_cpois_d1", make_model(1, "tanh_cpois_d1", tanh1, 1.0, 1.0, jumps1));
    cat.emplace("ou_d2", make_model(2, "ou_d2", ou2, 1.0, 1.0, LevyMeasure::none(2), gauss_inv_2));
    cat.emplace("tanh_d2", make_model(2, "tanh_d2", tanh2, 1.0, 1.0, LevyMeasure::none(2), sech2_inv_2));
    cat.emplace("ou_cpois_d2", make_model(2, "ou_cpois_d2", ou2, 1.0, 1.0, jumps2));
    cat.emplace("tanh_cpois_d2", make_model(2, "tanh_cpois_d2", tanh2, 1.0, 1.0, jumps2));
    return cat;
}

const std::map<std::string, ModelSpec>& the_catalogue() {
    static const std::map<std::string, ModelSpec> cat = build_catalogue();
    return cat;
}

} // namespace

const ModelSpec& catalogue(const std::string& id) {
    const auto& cat = the_catalogue();
    auto it = cat.find(id);
    if (it == cat.end()) throw ValidationError("unknown catalogue model id: " + id);
    return it->second;
}

std::vector<std::string> catalogue_ids() {
    std::vector<std::string> ids;
    for (const auto& [k, v] : the_catalogue()) ids.push_back(k);
    return ids;
}

} // namespace jdlab
