#include "lhiem/population.hpp"

#include "lhiem/csv.hpp"
#include "lhiem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lhiem {

std::vector<Violation> validate_population(const Population& pop) {
    std::vector<Violation> out;
    auto flag = [&out](const std::string& pid, std::string rule) {
        out.push_back({pid, std::move(rule)});
    };

    std::unordered_map<std::string, int> pid_seen;
    std::unordered_map<std::string, double> living_wage_prop;
    double total_weight = 0.0;

    for (const auto& p : pop.persons) {
        if (++pid_seen[p.pid] == 2) flag(p.pid, "duplicate pid");
        if (p.wt < 0.0) flag(p.pid, "wt must be nonnegative");
        if (p.wth < 0.0) flag(p.pid, "wth must be nonnegative");
        if (p.age < 0) flag(p.pid, "age must be nonnegative");
        if (p.fam_income < 0.0) flag(p.pid, "fam_income must be nonnegative");
        if (p.wage_prop < 0.0 || p.wage_prop > 1.0) flag(p.pid, "wage_prop must be in [0,1]");
        if (p.deduct < 0.0) flag(p.pid, "deduct must be nonnegative");
        if (p.med_spend < 0.0) flag(p.pid, "med_spend must be nonnegative");
        if (p.visits < 0) flag(p.pid, "visits must be nonnegative");
        if (p.preg == Preg::Pregnant && (p.sex != Sex::Female || p.age < 15 || p.age > 49)) {
            flag(p.pid, "Pregnant requires Female aged 15-49");
        }
        if (p.morbidity == Morbidity::None && p.hs != HealthStatus::Good) {
            flag(p.pid, "morbidity None requires hs Good");
        }
        if (p.morbidity != Morbidity::None && p.hs != HealthStatus::Bad) {
            flag(p.pid, "morbidity Chronic/Acute requires hs Bad");
        }
        if (!pop.families.count(p.fid)) flag(p.pid, "fid missing from family index");
        if (p.survive) living_wage_prop[p.fid] += p.wage_prop;
        total_weight += p.wt;
    }

    for (const auto& [fid, share] : living_wage_prop) {
        if (share > 1.0 + 1e-9) {
            flag("", "family " + fid + ": living members' wage_prop sums to " +
                         csv::format_double(share) + " > 1");
        }
    }
    if (!(total_weight > 0.0)) flag("", "total weight must be positive");
    return out;
}

void HarmonizationRules::add(const std::string& dataset, const std::string& variable,
                             const std::string& raw, const std::string& harmonized) {
    std::string key = dataset + '\x1f' + variable;
    auto& target = (raw == "*") ? fallback_ : exact_;
    if (raw != "*") key += '\x1f' + raw;
    auto [it, inserted] = target.emplace(key, harmonized);
    if (!inserted && it->second != harmonized) {
        throw DataError("harmonization rules map (" + dataset + ", " + variable + ", " + raw +
                        ") to both '" + it->second + "' and '" + harmonized + "'");
    }
}

const std::string& HarmonizationRules::harmonize(const std::string& dataset,
                                                 const std::string& variable,
                                                 const std::string& raw) const {
    std::string key = dataset + '\x1f' + variable + '\x1f' + raw;
    if (auto it = exact_.find(key); it != exact_.end()) return it->second;
    std::string fkey = dataset + '\x1f' + variable;
    if (auto it = fallback_.find(fkey); it != fallback_.end()) return it->second;
    throw DataError("UnknownRawValue: no harmonization rule for (" + dataset + ", " + variable +
                    ", " + raw + ")");
}

HarmonizationRules HarmonizationRules::from_file(const std::string& path) {
    csv::Table t = csv::read_file(path);
    std::size_t c_ds = t.col("dataset");
    std::size_t c_var = t.col("variable");
    std::size_t c_raw = t.col("raw");
    std::size_t c_harm = t.col("harmonized");
    HarmonizationRules rules;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        rules.add(t.cell(r, c_ds), t.cell(r, c_var), t.cell(r, c_raw), t.cell(r, c_harm));
    }
    return rules;
}

double weighted_quantile(std::vector<WeightedEntry> entries, double q) {
    if (entries.empty()) throw DataError("weighted_quantile: empty input");
    std::sort(entries.begin(), entries.end(), [](const WeightedEntry& a, const WeightedEntry& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.tie_key < b.tie_key;
    });
    double total = 0.0;
    for (const auto& e : entries) total += e.weight;
    if (!(total > 0.0)) throw DataError("weighted_quantile: total weight must be positive");
    double target = q * total;
    double acc = 0.0;
    for (const auto& e : entries) {
        acc += e.weight;
        if (acc >= target - 1e-12 * total) return e.value;
    }
    return entries.back().value;
}

namespace {

// Mean over the cumulative-weight band (lo, hi]; records straddling a band
// edge contribute the overlapping share of their weight.
double band_mean(const std::vector<WeightedEntry>& sorted, double lo, double hi) {
    double wsum = 0.0;
    double vsum = 0.0;
    double acc = 0.0;
    for (const auto& e : sorted) {
        double begin = acc;
        acc += e.weight;
        double overlap = std::min(acc, hi) - std::max(begin, lo);
        if (overlap > 0.0) {
            wsum += overlap;
            vsum += overlap * e.value;
        }
    }
    return wsum > 0.0 ? vsum / wsum : 0.0;
}

} // namespace

SpendingSummary weighted_spending_summary(const Population& pop) {
    std::vector<WeightedEntry> entries;
    entries.reserve(pop.persons.size());

    // pid rank gives the deterministic tie-break for equal spending.
    std::vector<std::size_t> order(pop.persons.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&pop](std::size_t a, std::size_t b) {
        return pop.persons[a].pid < pop.persons[b].pid;
    });
    std::vector<std::size_t> pid_rank(pop.persons.size());
    for (std::size_t r = 0; r < order.size(); ++r) pid_rank[order[r]] = r;

    for (std::size_t i = 0; i < pop.persons.size(); ++i) {
        const auto& p = pop.persons[i];
        if (!p.survive || p.wt <= 0.0) continue;
        entries.push_back({p.med_spend, p.wt, pid_rank[i]});
    }
    if (entries.empty()) throw DataError("EmptyPopulation: no living weighted persons");

    std::sort(entries.begin(), entries.end(), [](const WeightedEntry& a, const WeightedEntry& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.tie_key < b.tie_key;
    });
    double total = 0.0;
    double weighted_sum = 0.0;
    for (const auto& e : entries) {
        total += e.weight;
        weighted_sum += e.weight * e.value;
    }

    SpendingSummary s;
    s.overall = weighted_sum / total;
    s.bottom50 = band_mean(entries, 0.0, 0.5 * total);
    s.top50 = band_mean(entries, 0.5 * total, total);
    s.top30 = band_mean(entries, 0.7 * total, total);
    s.top10 = band_mean(entries, 0.9 * total, total);
    s.top5 = band_mean(entries, 0.95 * total, total);
    s.top1 = band_mean(entries, 0.99 * total, total);
    return s;
}

namespace {
constexpr const char* kSnapshotHeader[] = {"pid",        "fid",       "tid",      "wt",
                                           "wth",        "sex",       "age",      "race",
                                           "survive",    "fam_income", "wage_prop", "ins_cat",
                                           "deduct",     "med_spend", "visits",   "preg",
                                           "hs",         "morbidity"};
} // namespace

void save_population(const Population& pop, const std::string& path) {
    csv::Writer w(path);
    w.field(std::string("# year=") + std::to_string(pop.year));
    w.end_row();
    for (const char* h : kSnapshotHeader) w.field(std::string(h));
    w.end_row();
    for (const auto& p : pop.persons) {
        w.field(p.pid);
        w.field(p.fid);
        w.field(p.tid);
        w.field(p.wt);
        w.field(p.wth);
        w.field(std::string(to_string(p.sex)));
        w.field(p.age);
        w.field(std::string(to_string(p.race)));
        w.field(long(p.survive ? 1 : 0));
        w.field(p.fam_income);
        w.field(p.wage_prop);
        w.field(std::string(to_string(p.ins_cat)));
        w.field(p.deduct);
        w.field(p.med_spend);
        w.field(p.visits);
        w.field(std::string(to_string(p.preg)));
        w.field(std::string(to_string(p.hs)));
        w.field(std::string(to_string(p.morbidity)));
        w.end_row();
    }
}

Population load_population_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open snapshot: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    Population pop;
    if (text.rfind("# year=", 0) == 0) {
        pop.year = std::atoi(text.c_str() + 7);
    }
    csv::Table t = csv::parse(text, path);

    std::size_t c[18];
    for (std::size_t i = 0; i < 18; ++i) c[i] = t.col(kSnapshotHeader[i]);

    pop.persons.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        PersonRecord p;
        p.pid = t.cell(r, c[0]);
        p.fid = t.cell(r, c[1]);
        p.tid = t.cell(r, c[2]);
        p.wt = t.num(r, c[3]);
        p.wth = t.num(r, c[4]);
        p.sex = sex_from_string(t.cell(r, c[5]));
        p.age = static_cast<int>(t.integer(r, c[6]));
        p.race = race_from_string(t.cell(r, c[7]));
        const std::string& sv = t.cell(r, c[8]);
        if (sv == "1" || sv == "true") {
            p.survive = true;
        } else if (sv == "0" || sv == "false") {
            p.survive = false;
        } else {
            throw DataError(path + ": row " + std::to_string(r + 2) +
                            ": survive must be 0/1/true/false, got '" + sv + "'");
        }
        p.fam_income = t.num(r, c[9]);
        p.wage_prop = t.num(r, c[10]);
        p.ins_cat = ins_cat_from_string(t.cell(r, c[11]));
        p.deduct = t.num(r, c[12]);
        p.med_spend = t.num(r, c[13]);
        p.visits = static_cast<int>(t.integer(r, c[14]));
        p.preg = preg_from_string(t.cell(r, c[15]));
        p.hs = hs_from_string(t.cell(r, c[16]));
        p.morbidity = morbidity_from_string(t.cell(r, c[17]));
        pop.persons.push_back(std::move(p));
    }
    pop.rebuild_family_index();
    return pop;
}

} // namespace lhiem
