#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "levyfbsde/rng.hpp"

namespace levyfbsde {

enum class LevyKind {
    GammaProcess,
    TemperedStableSubordinator,
    CompoundPoissonTest,
};

enum class SeriesMethod {
    InverseLevy,
    Rejection,
    Thinning,
    Bondesson,
    RosinskiTemperedStable,
};

std::string to_string(LevyKind k);
std::string to_string(SeriesMethod m);
SeriesMethod series_method_from_string(const std::string& name);

struct Atom {
    double size = 0.0;    // may be negative
    double weight = 0.0;  // > 0
};

// A jump-size intensity measure plus the moment order of the study.
struct LevyModel {
    LevyKind kind = LevyKind::GammaProcess;

    // gamma process: intensity rate alpha, jump scale 1/beta
    double alpha = 1.0;
    double beta = 1.0;

    // classical tempered stable subordinator
    double ts_stability = 0.5;  // in (0,1)
    double ts_intensity = 1.0;  // delta > 0
    double ts_tempering = 1.0;  // lambda > 0

    // finite test measure
    std::vector<Atom> atoms;

    double moment_order_p = 2.0;  // >= 2

    static LevyModel gamma_process(double alpha, double beta, double p = 2.0);
    static LevyModel tempered_stable(double stability, double intensity, double tempering,
                                     double p = 2.0);
    static LevyModel compound_poisson(std::vector<Atom> atoms, double p = 2.0);

    void validate() const;

    // int |e|^q nu(de). Analytic for the built-in kinds.
    double full_moment(double q) const;
    // int e nu(de), signed.
    double full_signed_first_moment() const;

    std::string id() const;
};

// One term of the series: jump size H(r, v) at unit-rate epoch coordinate
// r with mark v. |H(r, v)| is nonincreasing in r for each mark.
class SeriesRepresentation {
  public:
    virtual ~SeriesRepresentation() = default;

    SeriesMethod method() const { return method_; }

    // Draws the mark(s) and returns the jump size; zero means a rejected
    // proposal. The number of mark draws per call is fixed per method so
    // truncation levels sharing a stream stay nested.
    virtual double jump_size(double r, RngStream& marks) const = 0;

    // E[|H(r,V)|^q]
    virtual double abs_moment(double r, double q) const = 0;
    // E[H(r,V)], signed
    virtual double signed_mean(double r) const = 0;
    // E[w(H(r,V)) * H(r,V)] for a bounded weight w
    virtual double weighted_mean(double r, const std::function<double(double)>& w) const = 0;

    // Representative jump size at mark quantile u (validator support).
    virtual double quantile_proxy(double r, double u) const = 0;

    virtual bool can_reject() const { return false; }

    // Centering constant of the i-th term (zero for all built-in cases).
    virtual double centering(std::size_t /*i*/) const { return 0.0; }

    // Moments of the truncated measure computed exactly rather than by
    // quadrature; the atomic test measure overrides these.
    virtual bool has_exact_moments() const { return false; }
    virtual double exact_retained_abs_moment(double /*n*/, double /*q*/) const { return 0.0; }
    virtual double exact_discarded_abs_moment(double /*n*/, double /*q*/) const { return 0.0; }
    virtual double exact_retained_signed_moment(double /*n*/) const { return 0.0; }
    virtual double exact_retained_weighted_moment(double /*n*/,
                                                  const std::function<double(double)>& /*w*/) const {
        return 0.0;
    }

    // Jump-size samples representative of the truncated measure at level n.
    virtual std::vector<double> support_samples(double n, int r_count,
                                                const std::vector<double>& mark_quantiles) const;

  protected:
    explicit SeriesRepresentation(SeriesMethod m) : method_(m) {}
    SeriesMethod method_;
};

// Builds the representation for a model; throws ConfigError for pairs the
// library does not support.
std::unique_ptr<SeriesRepresentation> make_representation(const LevyModel& model, SeriesMethod method);

// Moments of the retained measure nu^n and the discarded remainder at
// truncation level n.
struct TruncationMoments {
    double n = 0.0;
    double sigma2 = 0.0;   // second moment of the discarded mass
    double sigma_p = 0.0;  // p-th moment of the discarded mass
    double m1_abs = 0.0;   // first absolute moment of the retained mass
    double m_p = 0.0;      // p-th absolute moment of the retained mass
    double zeta1 = 0.0;    // signed first moment of the retained mass
};

// Total mass of the truncated measure; the construction makes this n,
// counting failed-acceptance atoms at zero.
double truncated_measure_mass(const LevyModel& model, double n);

// int_n^inf E|H(r,V)|^q dr
double discarded_moment(const LevyModel& model, const SeriesRepresentation& rep, double n, double q);
// int_0^n E|H(r,V)|^q dr
double retained_moment(const LevyModel& model, const SeriesRepresentation& rep, double n, double q);
// zeta(n) = int_0^n E[H(r,V)] dr, the drift used to compensate jumps
double retained_signed_first_moment(const LevyModel& model, const SeriesRepresentation& rep, double n);
// zeta_rho(n) = int rho(e) e nu^n(de)
double retained_weighted_first_moment(const LevyModel& model, const SeriesRepresentation& rep,
                                      double n, const std::function<double(double)>& rho);

TruncationMoments compute_truncation_moments(const LevyModel& model, const SeriesRepresentation& rep,
                                             double n);

}  // namespace levyfbsde
