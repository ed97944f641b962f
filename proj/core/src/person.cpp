#include "lhiem/person.hpp"

#include "lhiem/errors.hpp"

namespace lhiem {

std::string_view to_string(Sex v) { return v == Sex::Male ? "Male" : "Female"; }

std::string_view to_string(Race v) {
    switch (v) {
    case Race::Hispanic: return "Hispanic";
    case Race::White: return "White";
    case Race::Black: return "Black";
    default: return "Other";
    }
}

std::string_view to_string(InsCat v) {
    switch (v) {
    case InsCat::Uninsured: return "Uninsured";
    case InsCat::Medicaid: return "Medicaid";
    case InsCat::OtherPublic: return "OtherPublic";
    case InsCat::NonGroupPrivate: return "NonGroupPrivate";
    default: return "OtherPrivate";
    }
}

std::string_view to_string(Preg v) { return v == Preg::Pregnant ? "Pregnant" : "NotPregnant"; }

std::string_view to_string(HealthStatus v) { return v == HealthStatus::Good ? "Good" : "Bad"; }

std::string_view to_string(Morbidity v) {
    switch (v) {
    case Morbidity::None: return "None";
    case Morbidity::Chronic: return "Chronic";
    default: return "Acute";
    }
}

std::string_view to_string(AgeGroup v) {
    switch (v) {
    case AgeGroup::Under19: return "<19";
    case AgeGroup::From19To34: return "19-34";
    case AgeGroup::From35To49: return "35-49";
    default: return "50-64";
    }
}

namespace {
[[noreturn]] void bad_level(std::string_view what, std::string_view s) {
    throw DataError("unknown " + std::string(what) + " level: '" + std::string(s) + "'");
}
} // namespace

Sex sex_from_string(std::string_view s) {
    if (s == "Male") return Sex::Male;
    if (s == "Female") return Sex::Female;
    bad_level("sex", s);
}

Race race_from_string(std::string_view s) {
    if (s == "Hispanic") return Race::Hispanic;
    if (s == "White") return Race::White;
    if (s == "Black") return Race::Black;
    if (s == "Other") return Race::Other;
    bad_level("race", s);
}

InsCat ins_cat_from_string(std::string_view s) {
    if (s == "Uninsured") return InsCat::Uninsured;
    if (s == "Medicaid") return InsCat::Medicaid;
    if (s == "OtherPublic") return InsCat::OtherPublic;
    if (s == "NonGroupPrivate") return InsCat::NonGroupPrivate;
    if (s == "OtherPrivate") return InsCat::OtherPrivate;
    bad_level("ins_cat", s);
}

Preg preg_from_string(std::string_view s) {
    if (s == "Pregnant") return Preg::Pregnant;
    if (s == "NotPregnant") return Preg::NotPregnant;
    bad_level("preg", s);
}

HealthStatus hs_from_string(std::string_view s) {
    if (s == "Good") return HealthStatus::Good;
    if (s == "Bad") return HealthStatus::Bad;
    bad_level("hs", s);
}

Morbidity morbidity_from_string(std::string_view s) {
    if (s == "None") return Morbidity::None;
    if (s == "Chronic") return Morbidity::Chronic;
    if (s == "Acute") return Morbidity::Acute;
    bad_level("morbidity", s);
}

void Population::rebuild_family_index() {
    families.clear();
    for (std::size_t i = 0; i < persons.size(); ++i) {
        families[persons[i].fid].push_back(i);
    }
}

double Population::total_weight() const {
    double w = 0.0;
    for (const auto& p : persons) w += p.wt;
    return w;
}

double Population::living_weight() const {
    double w = 0.0;
    for (const auto& p : persons) {
        if (p.survive) w += p.wt;
    }
    return w;
}

} // namespace lhiem
