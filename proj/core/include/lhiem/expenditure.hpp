#pragma once

#include "lhiem/person.hpp"
#include "lhiem/rng.hpp"
#include "lhiem/tree.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace lhiem::expenditure {

inline constexpr double kNheaFactor = 1.27;

inline double apply_nhea_adjustment(double spend) { return kNheaFactor * spend; }

// Covariates entering the two-part spending model, extracted from a person
// record at year t to predict spending at t+1.
struct SpendCovariates {
    AgeGroup age_group = AgeGroup::Under19;
    Sex sex = Sex::Male;
    HealthStatus hs = HealthStatus::Good;
    InsCat ins_cat = InsCat::Uninsured;
    Race race = Race::White;
    double income = 0.0;
    Preg preg = Preg::NotPregnant;
    double prev_spend = 0.0;

    static SpendCovariates from_person(const PersonRecord& p) {
        return {age_group_of(p.age), p.sex,  p.hs,   p.ins_cat,
                p.race,              p.fam_income, p.preg, p.med_spend};
    }
};

struct PersonYearRow {
    SpendCovariates cov;
    double next_spend = 0.0;
};

inline constexpr int kHurdleDim = 17;
inline constexpr int kLeafDim = 15;

// Dummy-coded design vectors. Income is scaled to units of $100k and the
// previous-spend amount enters as ln(spend + 1).
std::array<double, kHurdleDim> hurdle_design(const SpendCovariates& c);
std::array<double, kLeafDim> leaf_design(const SpendCovariates& c);

// Column layout for the partition tree over the same covariates.
std::vector<tree::ColumnSpec> tree_columns();
std::array<double, 7> tree_row(const SpendCovariates& c);

// Part one: logistic regression for the probability of nonzero spending.
struct HurdleModel {
    std::array<double, kHurdleDim> beta{};
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
};

// Maximum-likelihood fit via iteratively reweighted least squares. Throws
// ModelError("Separation") on a single-class outcome or detected perfect
// separation, ModelError("NonConvergence") past the iteration cap.
HurdleModel fit_hurdle(const std::vector<PersonYearRow>& train, std::uint64_t seed);

// Throws ModelError("MissingCovariate") when an input is NaN.
double predict_nonzero_prob(const HurdleModel& m, const SpendCovariates& c);

// Part two, per tree leaf: OLS on ln(next_spend) with residual scale.
struct LeafRegression {
    int leaf_id = -1;
    std::array<double, kLeafDim> beta{};
    double sigma = 0.0;
    long n_rows = 0;
};

// Fits one regression per leaf of the pruned tree. Rows must all have
// next_spend > 0. Throws ModelError("ThinLeaf") when a leaf receives fewer
// than min_rows rows.
std::vector<LeafRegression> fit_leaf_glms(const tree::PartitionTree& tree,
                                          const std::vector<PersonYearRow>& train,
                                          int min_rows = 30);

// The assembled two-part model plus its complexity curve for reporting.
struct TwoPartModel {
    HurdleModel hurdle;
    tree::PartitionTree tree;
    std::vector<LeafRegression> leaves; // indexed by leaf_id
    tree::CvCurve curve;

    std::string to_json() const;
    static TwoPartModel from_json(const std::string& text);
    void save(const std::string& path) const;
    static TwoPartModel load(const std::string& path);
};

// Grows the part-two tree on rows with positive next-year spending.
// Training rows with Pregnant status are rejected (they are costed by the
// maternity sampler, never by this model).
tree::FitResult grow_spending_tree(const std::vector<PersonYearRow>& rows,
                                   const tree::GrowControls& controls);

// Hurdle draw, leaf routing, lognormal residual. Requires a living,
// non-pregnant person; the residual enters as exp(X beta + sigma * z).
double predict_spending(const TwoPartModel& m, const SpendCovariates& c, rng::Stream& stream);

// Maternity and childbirth costs: truncated lognormal with fixed support.
struct MaternityCostSampler {
    double log_mean = 0.0;
    double log_sd = 0.0;
    double lower = 835.0;
    double upper = 26850.0;
    double median_target = 5123.0;

    // Solves log_mean so the truncated median hits median_target exactly.
    static MaternityCostSampler calibrated(double log_sd = 0.85, double lower = 835.0,
                                           double upper = 26850.0, double median = 5123.0);

    double sample(rng::Stream& stream) const;
};

// First-year-of-life cost: Poisson with rate omega^2.5 * 1000, omega the
// latent infant health score on 1 (good) .. 5 (poor).
double newborn_cost_rate(int omega);
double sample_newborn_cost(int omega, rng::Stream& stream);

// Deterministic 85/15-style split by hashed row index.
void split_train_test(const std::vector<PersonYearRow>& rows, double train_share,
                      std::uint64_t seed, std::vector<PersonYearRow>& train,
                      std::vector<PersonYearRow>& test);

// Synthetic stand-in for the two-year spending panel used to fit the
// default model shipped with the project.
std::vector<PersonYearRow> default_training_rows(std::size_t n, std::uint64_t seed);

} // namespace lhiem::expenditure
