#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lhiem {

enum class Sex : std::uint8_t { Male = 0, Female = 1 };
enum class Race : std::uint8_t { Hispanic = 0, White = 1, Black = 2, Other = 3 };
enum class InsCat : std::uint8_t {
    Uninsured = 0,
    Medicaid = 1,
    OtherPublic = 2,
    NonGroupPrivate = 3,
    OtherPrivate = 4
};
enum class Preg : std::uint8_t { NotPregnant = 0, Pregnant = 1 };
enum class HealthStatus : std::uint8_t { Good = 0, Bad = 1 };
enum class Morbidity : std::uint8_t { None = 0, Chronic = 1, Acute = 2 };

inline constexpr int kNumInsCats = 5;
inline constexpr int kNumRaces = 4;

// Age groups used by the spending map, hurdle covariates and all reports:
// <=18, 19-34, 35-49, 50-64 (65+ records keep the last group).
enum class AgeGroup : std::uint8_t { Under19 = 0, From19To34 = 1, From35To49 = 2, From50To64 = 3 };
inline constexpr int kNumAgeGroups = 4;

constexpr AgeGroup age_group_of(int age) {
    if (age <= 18) return AgeGroup::Under19;
    if (age <= 34) return AgeGroup::From19To34;
    if (age <= 49) return AgeGroup::From35To49;
    return AgeGroup::From50To64;
}

std::string_view to_string(Sex v);
std::string_view to_string(Race v);
std::string_view to_string(InsCat v);
std::string_view to_string(Preg v);
std::string_view to_string(HealthStatus v);
std::string_view to_string(Morbidity v);
std::string_view to_string(AgeGroup v);

Sex sex_from_string(std::string_view s);
Race race_from_string(std::string_view s);
InsCat ins_cat_from_string(std::string_view s);
Preg preg_from_string(std::string_view s);
HealthStatus hs_from_string(std::string_view s);
Morbidity morbidity_from_string(std::string_view s);

// Full per-individual state vector. One row of the population snapshot.
struct PersonRecord {
    std::string pid;
    std::string fid;
    std::string tid;   // tax group, carried through unchanged
    double wt = 0.0;   // individual expansion weight
    double wth = 0.0;  // household expansion weight
    Sex sex = Sex::Male;
    int age = 0;
    Race race = Race::White;
    bool survive = true;
    double fam_income = 0.0; // nominal dollars, family total
    double wage_prop = 0.0;  // share of family income from this person's wages
    InsCat ins_cat = InsCat::Uninsured;
    double deduct = 0.0;
    double med_spend = 0.0;
    int visits = 0;
    Preg preg = Preg::NotPregnant;
    HealthStatus hs = HealthStatus::Good;
    Morbidity morbidity = Morbidity::None;

    bool operator==(const PersonRecord&) const = default;
};

// Weighted collection of persons grouped into family units; the Markov
// chain state. Families index maps fid to member positions in `persons`.
struct Population {
    int year = 0;
    std::vector<PersonRecord> persons;
    std::unordered_map<std::string, std::vector<std::size_t>> families;

    void rebuild_family_index();
    double total_weight() const;

    // Weighted count of living persons.
    double living_weight() const;
};

// Families whose fid begins with this prefix act as immigration templates.
// The marker lives in the id itself so it survives snapshot round-trips.
inline constexpr char kImmigrantFidPrefix = 'I';

inline bool is_immigrant_family(std::string_view fid) {
    return !fid.empty() && fid.front() == kImmigrantFidPrefix;
}

} // namespace lhiem
